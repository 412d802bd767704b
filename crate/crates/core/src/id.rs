//! Identity products: validation, sign computation, and derived structure.

use thiserror::Error;

use crate::pauli::{commutes_unchecked, word_product_unchecked, PauliWord, PhaseExponent, Sign};
use crate::sqp::{classify_sqp, SqpClass, SqpColumn};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum IdError {
    #[error("an ID needs at least 2 rows, got {got}")]
    TooFewRows { got: usize },
    #[error("row {row} has {got} qubits, expected {want}")]
    RaggedRow { row: usize, got: usize, want: usize },
    #[error("rows {first} and {second} are identical")]
    DuplicateRow { first: usize, second: usize },
    #[error("row {row} is the identity word")]
    IdentityRow { row: usize },
    #[error("rows {first} and {second} do not commute")]
    NonCommutingPair { first: usize, second: usize },
    #[error("product of the rows is {product}, not proportional to the identity")]
    ProductNotIdentity { product: PauliWord },
    #[error("product phase i^{k} is imaginary; commuting Hermitian rows cannot do this")]
    ImaginaryProduct { k: u8 },
    #[error("{m} rows on {n} qubits exceeds the M <= N+1 bound for independent rows")]
    TooManyRows { m: usize, n: usize },
    #[error("rows do not form an entangled set")]
    NotEntangled,
    #[error("ID has no Odd SQPs; odd-criticality is undefined for O = 0")]
    OddCountZero,
}

/// A validated M x N identity product with its derived data.
///
/// Construction goes through [`analyze_id`], which guarantees: rows pairwise
/// distinct, none the identity, all pairs commuting, and the full product
/// equal to +-I.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdTable {
    rows: Vec<PauliWord>,
    n: usize,
    sign: Sign,
    odd_count: usize,
    columns: Vec<SqpColumn>,
}

impl IdTable {
    pub fn rows(&self) -> &[PauliWord] {
        &self.rows
    }

    /// Observable count M.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Qubit count N.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Number of Odd SQP columns (the subscript O); always even.
    pub fn odd_count(&self) -> usize {
        self.odd_count
    }

    pub fn columns(&self) -> &[SqpColumn] {
        &self.columns
    }

    pub fn column(&self, q: usize) -> &SqpColumn {
        &self.columns[q]
    }

    /// 0-based indices of the Odd columns, ascending.
    pub fn odd_columns(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.columns[q].class() == SqpClass::Odd)
            .collect()
    }

    /// Rows sorted in the fixed word order; two IdTables are the same set of
    /// observables iff these agree.
    pub fn sorted_rows(&self) -> Vec<PauliWord> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    /// The compact ID M^N_O label.
    pub fn label(&self) -> String {
        format!("ID{}^{}_{}", self.m(), self.n(), self.odd_count())
    }
}

impl std::fmt::Display for IdTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Validates `rows` as an identity product and computes sign, odd count, and
/// per-column SQP classes.
pub fn analyze_id(rows: &[PauliWord]) -> Result<IdTable, IdError> {
    if rows.len() < 2 {
        return Err(IdError::TooFewRows { got: rows.len() });
    }
    let n = rows[0].n();
    for (i, row) in rows.iter().enumerate() {
        if row.n() != n {
            return Err(IdError::RaggedRow { row: i, got: row.n(), want: n });
        }
        if row.is_identity() {
            return Err(IdError::IdentityRow { row: i });
        }
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if rows[i] == rows[j] {
                return Err(IdError::DuplicateRow { first: i, second: j });
            }
            if !commutes_unchecked(&rows[i], &rows[j]) {
                return Err(IdError::NonCommutingPair { first: i, second: j });
            }
        }
    }

    let mut phase = PhaseExponent::ZERO;
    let mut acc = PauliWord::identity(n);
    for row in rows {
        let (k, next) = word_product_unchecked(&acc, row);
        phase = phase.combine(k);
        acc = next;
    }
    if !acc.is_identity() {
        return Err(IdError::ProductNotIdentity { product: acc });
    }
    let sign = phase.sign().ok_or(IdError::ImaginaryProduct { k: phase.value() })?;

    let columns: Vec<SqpColumn> = (0..n)
        .map(|q| {
            let letters: Vec<_> = rows.iter().map(|row| row.letter(q)).collect();
            classify_sqp(&letters)
        })
        .collect();
    debug_assert!(
        columns.iter().all(|c| c.class() != SqpClass::IllegalForId),
        "identity product cannot contain a mixed-parity column"
    );
    debug_assert_eq!(
        columns
            .iter()
            .fold(PhaseExponent::ZERO, |acc, c| acc.combine(c.ordered_phase())),
        phase,
        "product sign must equal the product of column ordered phases"
    );

    let odd_count = columns.iter().filter(|c| c.class() == SqpClass::Odd).count();
    debug_assert!(odd_count % 2 == 0, "the number of Odd SQPs is always even");

    Ok(IdTable { rows: rows.to_vec(), n, sign, odd_count, columns })
}

/// Rank r = 2^(N-M+1) of the joint eigenprojectors of a valid ID with
/// independent rows. Complete IDs (M = N+1) have rank 1.
pub fn eigenbasis_rank(id: &IdTable) -> Result<u64, IdError> {
    if id.m() > id.n() + 1 {
        return Err(IdError::TooManyRows { m: id.m(), n: id.n() });
    }
    Ok(1u64 << (id.n() + 1 - id.m()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::product_sign_oracle;

    fn rows(texts: &[&str]) -> Vec<PauliWord> {
        texts.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn bell_id() {
        let id = analyze_id(&rows(&["ZZ", "XX", "YY"])).unwrap();
        assert_eq!(id.m(), 3);
        assert_eq!(id.n(), 2);
        assert_eq!(id.sign(), Sign::Minus);
        assert_eq!(id.odd_count(), 2);
        assert_eq!(id.label(), "ID3^2_2");
        // Independent dense-matrix confirmation of the sign.
        assert_eq!(product_sign_oracle(id.rows()).unwrap(), PhaseExponent::new(2));
    }

    #[test]
    fn ghz_id() {
        let id = analyze_id(&rows(&["ZZZ", "ZXX", "XZX", "XXZ"])).unwrap();
        assert_eq!(id.sign(), Sign::Minus);
        assert_eq!(id.odd_count(), 0);
        assert_eq!(product_sign_oracle(id.rows()).unwrap(), PhaseExponent::new(2));
    }

    #[test]
    fn rejects_non_identity_product() {
        assert!(matches!(
            analyze_id(&rows(&["ZI", "IZ"])),
            Err(IdError::ProductNotIdentity { .. })
        ));
        // {ZZ, ZX} anticommute at qubit 2 only, so the pair check fires
        // before the product check.
        assert_eq!(
            analyze_id(&rows(&["ZZ", "ZX"])),
            Err(IdError::NonCommutingPair { first: 0, second: 1 })
        );
    }

    #[test]
    fn rejects_duplicates_identity_and_noncommuting() {
        assert_eq!(
            analyze_id(&rows(&["ZZ", "ZZ"])),
            Err(IdError::DuplicateRow { first: 0, second: 1 })
        );
        assert_eq!(analyze_id(&rows(&["ZZ", "II"])), Err(IdError::IdentityRow { row: 1 }));
        assert_eq!(
            analyze_id(&rows(&["ZI", "XI", "YI"])),
            Err(IdError::NonCommutingPair { first: 0, second: 1 })
        );
        assert_eq!(analyze_id(&rows(&["ZZ"])), Err(IdError::TooFewRows { got: 1 }));
        assert!(matches!(
            analyze_id(&rows(&["ZZ", "XXX"])),
            Err(IdError::RaggedRow { row: 1, .. })
        ));
    }

    #[test]
    fn sign_equals_product_of_column_phases() {
        for table in [
            vec!["ZZ", "XX", "YY"],
            vec!["ZZZ", "ZXX", "XZX", "XXZ"],
            vec!["ZZI", "ZIZ", "XXX", "XYY"],
            vec!["ZI", "IZ", "ZZ"],
        ] {
            let id = analyze_id(&rows(&table)).unwrap();
            let combined = id
                .columns()
                .iter()
                .fold(PhaseExponent::ZERO, |acc, c| acc.combine(c.ordered_phase()));
            assert_eq!(combined.sign(), Some(id.sign()));
            assert_eq!(id.odd_count() % 2, 0);
        }
    }

    #[test]
    fn rank_examples() {
        let complete = analyze_id(&rows(&["ZZ", "XX", "YY"])).unwrap();
        assert_eq!(eigenbasis_rank(&complete).unwrap(), 1);

        let id44 = analyze_id(&rows(&["ZZZZ", "XXXX", "YIZX", "IYXZ"])).unwrap();
        assert_eq!(eigenbasis_rank(&id44).unwrap(), 2);

        let id54 = analyze_id(&rows(&["ZZZZ", "ZZXX", "XXII", "XIZX", "IXXZ"])).unwrap();
        assert_eq!(eigenbasis_rank(&id54).unwrap(), 1);
    }

    #[test]
    fn rank_rejects_too_many_rows() {
        // The 7 non-identity words of the diagonal group on 3 qubits form a
        // valid ID with dependent rows and M = 7 > N + 1.
        let id =
            analyze_id(&rows(&["ZII", "IZI", "IIZ", "ZZI", "ZIZ", "IZZ", "ZZZ"])).unwrap();
        assert_eq!(id.sign(), Sign::Plus);
        assert_eq!(eigenbasis_rank(&id), Err(IdError::TooManyRows { m: 7, n: 3 }));

        // M = N + 1 with dependent rows is still rank 1.
        let id = analyze_id(&rows(&["ZI", "IZ", "ZZ"])).unwrap();
        assert_eq!(eigenbasis_rank(&id).unwrap(), 1);
    }
}
