//! Single Qubit Products: the columns of an identity product.

use crate::pauli::{letter_product, PauliLetter, PhaseExponent};

/// Classification of an SQP by the per-letter occurrence parities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqpClass {
    /// Each of X, Y, Z occurs an odd number of times; ordered product +-iI.
    Odd,
    /// Each of X, Y, Z occurs an even number of times, with at least two
    /// distinct non-identity letters present; ordered product +-I.
    EvenNontrivial,
    /// Even with at most one distinct non-identity letter; ordered product +I
    /// and no anticommuting pair in the column.
    Trivial,
    /// Mixed occurrence parities: the column product is not proportional to
    /// the identity, so the column cannot belong to an ID.
    IllegalForId,
}

impl SqpClass {
    pub fn is_odd(self) -> bool {
        self == SqpClass::Odd
    }

    pub fn is_even(self) -> bool {
        matches!(self, SqpClass::EvenNontrivial | SqpClass::Trivial)
    }
}

impl std::fmt::Display for SqpClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SqpClass::Odd => write!(f, "Odd"),
            SqpClass::EvenNontrivial => write!(f, "Even"),
            SqpClass::Trivial => write!(f, "Trivial"),
            SqpClass::IllegalForId => write!(f, "Illegal-for-ID"),
        }
    }
}

/// One column of an ID: the ordered list of letters a qubit contributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqpColumn {
    letters: Vec<PauliLetter>,
    class: SqpClass,
    ordered_phase: PhaseExponent,
}

impl SqpColumn {
    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn class(&self) -> SqpClass {
        self.class
    }

    pub fn ordered_phase(&self) -> PhaseExponent {
        self.ordered_phase
    }
}

/// Classifies a column and computes its ordered product phase.
///
/// Mixed parity counts are reported as [`SqpClass::IllegalForId`] rather
/// than as an error, so enumeration probes can reject cheaply.
pub fn classify_sqp(letters: &[PauliLetter]) -> SqpColumn {
    assert!(!letters.is_empty(), "empty SQP");
    let mut counts = [0usize; 4];
    for letter in letters {
        counts[*letter as usize] += 1;
    }
    let odd = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
        .iter()
        .map(|l| counts[*l as usize] % 2)
        .sum::<usize>();

    let mut phase = PhaseExponent::ZERO;
    let mut acc = PauliLetter::I;
    for letter in letters {
        let (k, next) = letter_product(acc, *letter);
        phase = phase.combine(k);
        acc = next;
    }

    let class = match odd {
        3 => SqpClass::Odd,
        0 => {
            let distinct = PauliLetter::NON_IDENTITY
                .iter()
                .filter(|l| counts[**l as usize] > 0)
                .count();
            if distinct <= 1 {
                SqpClass::Trivial
            } else {
                SqpClass::EvenNontrivial
            }
        }
        _ => SqpClass::IllegalForId,
    };

    debug_assert!(
        class != SqpClass::IllegalForId || acc != PauliLetter::I,
        "mixed parity must leave a non-identity product"
    );

    SqpColumn { letters: letters.to_vec(), class, ordered_phase: phase }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PauliLetter::*;

    #[test]
    fn odd_column() {
        let col = classify_sqp(&[Z, X, Y]);
        assert_eq!(col.class(), SqpClass::Odd);
        assert_eq!(col.ordered_phase(), PhaseExponent::new(1));
    }

    #[test]
    fn trivial_column() {
        let col = classify_sqp(&[Z, Z, I, I]);
        assert_eq!(col.class(), SqpClass::Trivial);
        assert_eq!(col.ordered_phase(), PhaseExponent::ZERO);

        let col = classify_sqp(&[I, I]);
        assert_eq!(col.class(), SqpClass::Trivial);
    }

    #[test]
    fn even_nontrivial_column() {
        let col = classify_sqp(&[Z, X, Z, X]);
        assert_eq!(col.class(), SqpClass::EvenNontrivial);
        assert_eq!(col.ordered_phase(), PhaseExponent::new(2));
    }

    #[test]
    fn mixed_parity_is_illegal() {
        let col = classify_sqp(&[Z, X]);
        assert_eq!(col.class(), SqpClass::IllegalForId);
    }

    #[test]
    fn class_matches_phase_parity() {
        // Exhaustive over all columns of length 4: Odd <=> imaginary phase,
        // Trivial => phase 0.
        for code in 0..256usize {
            let letters: Vec<PauliLetter> =
                (0..4).map(|i| PauliLetter::ALL[(code >> (2 * i)) & 3]).collect();
            let col = classify_sqp(&letters);
            match col.class() {
                SqpClass::Odd => assert!(!col.ordered_phase().is_real()),
                SqpClass::EvenNontrivial => assert!(col.ordered_phase().is_real()),
                SqpClass::Trivial => assert_eq!(col.ordered_phase(), PhaseExponent::ZERO),
                SqpClass::IllegalForId => {}
            }
        }
    }
}
