//! NKS and KS sets: parity verification, the independent GF(2) value
//! assignment oracle, set-level criticality, and the KS-from-NKS generation
//! method.
//!
//! A set of IDs proves the N-qubit Kochen-Specker theorem (is an NKS set)
//! iff the number of negative IDs is odd while each single-qubit Pauli
//! observable appears an even number of times per qubit across the set. It
//! proves the Kochen-Specker theorem (is a KS set) iff the number of
//! negative IDs is odd while each N-qubit observable appears in an even
//! number of the IDs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::budget::{Budget, BudgetError};
use crate::gf2::{Gf2Solution, Gf2System};
use crate::id::{analyze_id, IdError, IdTable};
use crate::pauli::{PauliLetter, PauliWord, Sign};

#[derive(Debug, Error, PartialEq, Clone)]
pub enum ContextError {
    #[error("IDs in a set must share one qubit count; ID {index} has n={got}, expected {want}")]
    MixedQubitCounts { index: usize, got: usize, want: usize },
    #[error("IDs {first} and {second} are identical as row sets")]
    DuplicateId { first: usize, second: usize },
    #[error("the set is not an NKS set")]
    NotNks,
    #[error("the set is not a KS set")]
    NotKs,
    #[error("word {word} has a single non-identity letter; its pairing ID would repeat a row")]
    SingleQubitWord { word: PauliWord },
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Id(#[from] IdError),
}

/// An ordered collection of IDs over a common qubit count; the carrier of
/// NKS/KS properties. Members must be pairwise non-identical as row sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdSet {
    ids: Vec<IdTable>,
}

impl IdSet {
    pub fn new(ids: Vec<IdTable>) -> Result<IdSet, ContextError> {
        if let Some(first) = ids.first() {
            let want = first.n();
            for (index, id) in ids.iter().enumerate() {
                if id.n() != want {
                    return Err(ContextError::MixedQubitCounts { index, got: id.n(), want });
                }
            }
        }
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                if ids[i].sorted_rows() == ids[j].sorted_rows() {
                    return Err(ContextError::DuplicateId { first: i, second: j });
                }
            }
        }
        Ok(IdSet { ids })
    }

    pub fn ids(&self) -> &[IdTable] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn n(&self) -> Option<usize> {
        self.ids.first().map(|id| id.n())
    }

    pub fn negative_count(&self) -> usize {
        self.ids.iter().filter(|id| id.sign().is_negative()).count()
    }

    /// Occurrence count per distinct word: the number of member IDs
    /// containing it (rows within one ID are distinct).
    pub fn word_occurrences(&self) -> BTreeMap<PauliWord, usize> {
        let mut counts = BTreeMap::new();
        for id in &self.ids {
            for row in id.rows() {
                *counts.entry(*row).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Occurrence count of each non-identity letter per qubit, with row
    /// multiplicity, across all member IDs.
    pub fn letter_occurrences(&self) -> BTreeMap<(usize, PauliLetter), usize> {
        let mut counts = BTreeMap::new();
        for id in &self.ids {
            for row in id.rows() {
                for q in 0..row.n() {
                    let letter = row.letter(q);
                    if !letter.is_identity() {
                        *counts.entry((q, letter)).or_insert(0) += 1;
                    }
                }
            }
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NksReport {
    pub holds: bool,
    pub negative_count: usize,
    /// (qubit, letter) pairs with odd occurrence counts.
    pub odd_letters: Vec<(usize, PauliLetter)>,
}

/// NKS verification: odd negative count and even per-qubit letter counts.
pub fn verify_nks(set: &IdSet) -> NksReport {
    let negative_count = set.negative_count();
    let odd_letters: Vec<(usize, PauliLetter)> = set
        .letter_occurrences()
        .into_iter()
        .filter(|(_, count)| count % 2 != 0)
        .map(|(key, _)| key)
        .collect();
    NksReport {
        holds: negative_count % 2 == 1 && odd_letters.is_empty(),
        negative_count,
        odd_letters,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsReport {
    pub holds: bool,
    pub negative_count: usize,
    /// Words appearing in an odd number of member IDs.
    pub odd_words: Vec<PauliWord>,
}

/// KS verification: odd negative count and even per-word ID membership.
pub fn verify_ks(set: &IdSet) -> KsReport {
    let negative_count = set.negative_count();
    let odd_words: Vec<PauliWord> = set
        .word_occurrences()
        .into_iter()
        .filter(|(_, count)| count % 2 != 0)
        .map(|(word, _)| word)
        .collect();
    KsReport { holds: negative_count % 2 == 1 && odd_words.is_empty(), negative_count, odd_words }
}

/// Which value assignment is being refuted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentMode {
    /// One +-1 value per distinct N-qubit observable.
    PerWord,
    /// One +-1 value per (qubit, single-qubit observable) pair.
    PerSingleQubitLetter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignVar {
    Word(PauliWord),
    Letter { qubit: usize, letter: PauliLetter },
}

impl std::fmt::Display for AssignVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssignVar::Word(word) => write!(f, "v({word})"),
            AssignVar::Letter { qubit, letter } => write!(f, "v({letter}_{})", qubit + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// An explicit noncontextual +-1 assignment satisfying every ID equation.
    Feasible { assignment: Vec<(AssignVar, Sign)> },
    /// Indices of member IDs whose product equations sum to 0 = 1 over GF(2).
    Infeasible { certificate: Vec<usize> },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Builds the GF(2) parity system for the set and solves it by elimination.
/// This is a code path independent of [`verify_nks`] / [`verify_ks`]: the
/// verifiers check the closed-form parity conditions, the oracle decides
/// actual solvability.
pub fn assignment_feasible(set: &IdSet, mode: AssignmentMode) -> Feasibility {
    let (vars, system) = build_parity_system(set, mode);
    match system.solve() {
        Gf2Solution::Feasible { assignment } => {
            debug_assert!(system.satisfies(&assignment));
            let assignment = vars
                .into_iter()
                .zip(assignment)
                .map(|(var, bit)| (var, if bit { Sign::Minus } else { Sign::Plus }))
                .collect();
            Feasibility::Feasible { assignment }
        }
        Gf2Solution::Infeasible { certificate } => {
            debug_assert!(system.certifies(&certificate));
            Feasibility::Infeasible { certificate }
        }
    }
}

fn build_parity_system(set: &IdSet, mode: AssignmentMode) -> (Vec<AssignVar>, Gf2System) {
    match mode {
        AssignmentMode::PerWord => {
            let words: Vec<PauliWord> = set.word_occurrences().into_keys().collect();
            let index: BTreeMap<PauliWord, usize> =
                words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
            let mut system = Gf2System::new(words.len());
            for id in set.ids() {
                let support: Vec<usize> = id.rows().iter().map(|row| index[row]).collect();
                system.add_equation(&support, id.sign().is_negative());
            }
            (words.into_iter().map(AssignVar::Word).collect(), system)
        }
        AssignmentMode::PerSingleQubitLetter => {
            let n = set.n().unwrap_or(0);
            let vars: Vec<AssignVar> = (0..n)
                .flat_map(|qubit| {
                    PauliLetter::NON_IDENTITY
                        .iter()
                        .map(move |&letter| AssignVar::Letter { qubit, letter })
                })
                .collect();
            let var_index = |qubit: usize, letter: PauliLetter| {
                qubit * 3
                    + match letter {
                        PauliLetter::X => 0,
                        PauliLetter::Y => 1,
                        PauliLetter::Z => 2,
                        PauliLetter::I => unreachable!(),
                    }
            };
            let mut system = Gf2System::new(vars.len());
            for id in set.ids() {
                let mut support = Vec::new();
                for row in id.rows() {
                    for q in 0..row.n() {
                        let letter = row.letter(q);
                        if !letter.is_identity() {
                            support.push(var_index(q, letter));
                        }
                    }
                }
                system.add_equation(&support, id.sign().is_negative());
            }
            (vars, system)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Nks,
    Ks,
}

fn kind_holds(set: &IdSet, kind: SetKind) -> bool {
    match kind {
        SetKind::Nks => verify_nks(set).holds,
        SetKind::Ks => verify_ks(set).holds,
    }
}

/// A proper removal that leaves a smaller verifying set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub kept_ids: Vec<usize>,
    pub kept_qubits: Vec<usize>,
    pub set: IdSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCriticality {
    pub critical: bool,
    pub witness: Option<Reduction>,
}

/// Restricts every ID in `set` at `kept_ids` to `kept_qubits`, discarding
/// identity rows. Returns None when some retained ID fails to restrict to a
/// valid ID or when the restricted members collide.
fn restrict_set(set: &IdSet, kept_ids: &[usize], kept_qubits: &[usize]) -> Option<IdSet> {
    if kept_ids.is_empty() || kept_qubits.is_empty() {
        return None;
    }
    let mut restricted = Vec::with_capacity(kept_ids.len());
    for &i in kept_ids {
        let rows: Vec<PauliWord> = set.ids()[i]
            .rows()
            .iter()
            .map(|row| row.restrict(kept_qubits))
            .filter(|row| !row.is_identity())
            .collect();
        restricted.push(analyze_id(&rows).ok()?);
    }
    IdSet::new(restricted).ok()
}

/// Exhaustive criticality of an NKS/KS set: false iff some proper removal of
/// member IDs and/or entire qubits leaves a set still verifying the kind.
/// Witness masks are scanned in ascending numeric order (IDs outer, qubits
/// inner with larger masks first), so the reported witness is deterministic.
pub fn set_critical(set: &IdSet, kind: SetKind, budget: &Budget) -> Result<SetCriticality, ContextError> {
    if !kind_holds(set, kind) {
        return Err(match kind {
            SetKind::Nks => ContextError::NotNks,
            SetKind::Ks => ContextError::NotKs,
        });
    }
    let k = set.len();
    let n = set.n().unwrap_or(0);
    let meter = budget.start();
    for ids_mask in 1..(1u64 << k) {
        let kept_ids: Vec<usize> = (0..k).filter(|i| (ids_mask >> i) & 1 == 1).collect();
        let full_ids = kept_ids.len() == k;
        // Larger qubit masks first: prefer witnesses that drop fewer qubits.
        for raw in (1..=((1u64 << n) - 1)).rev() {
            meter.tick(1)?;
            let kept_qubits: Vec<usize> = (0..n).filter(|q| (raw >> q) & 1 == 1).collect();
            if full_ids && kept_qubits.len() == n {
                continue; // not a proper removal
            }
            let Some(reduced) = restrict_set(set, &kept_ids, &kept_qubits) else {
                continue;
            };
            if kind_holds(&reduced, kind) {
                return Ok(SetCriticality {
                    critical: false,
                    witness: Some(Reduction { kept_ids, kept_qubits, set: reduced }),
                });
            }
        }
    }
    Ok(SetCriticality { critical: true, witness: None })
}

/// The KS-from-NKS generation method: for each word occurring in an odd
/// number of member IDs, append one positive ID made of the word and its
/// single-qubit decomposition (all Trivial SQPs). The input IDs are kept
/// untouched and the result verifies as a KS set.
pub fn ks_from_nks(set: &IdSet) -> Result<IdSet, ContextError> {
    if !verify_nks(set).holds {
        return Err(ContextError::NotNks);
    }
    let mut ids = set.ids().to_vec();
    for (word, count) in set.word_occurrences() {
        if count % 2 == 0 {
            continue;
        }
        if word.weight() < 2 {
            return Err(ContextError::SingleQubitWord { word });
        }
        let mut rows = vec![word];
        for q in 0..word.n() {
            let letter = word.letter(q);
            if !letter.is_identity() {
                rows.push(PauliWord::single(word.n(), q, letter));
            }
        }
        ids.push(analyze_id(&rows)?);
    }
    let result = IdSet::new(ids)?;
    debug_assert!(verify_ks(&result).holds);
    Ok(result)
}

/// Searches for an NKS subset of a KS set: subsets of member IDs combined
/// with qubit restrictions, smallest ID count first. Returns the first hit
/// in the deterministic scan order, or None if the search completes empty.
pub fn find_nks_subset(set: &IdSet, budget: &Budget) -> Result<Option<Reduction>, ContextError> {
    if !verify_ks(set).holds {
        return Err(ContextError::NotKs);
    }
    let k = set.len();
    let n = set.n().unwrap_or(0);
    let meter = budget.start();
    for size in 1..=k {
        let masks: Vec<u64> = (1..(1u64 << k))
            .filter(|mask| mask.count_ones() as usize == size)
            .collect();
        for ids_mask in masks {
            let kept_ids: Vec<usize> = (0..k).filter(|i| (ids_mask >> i) & 1 == 1).collect();
            for raw in (1..=((1u64 << n) - 1)).rev() {
                meter.tick(1)?;
                let kept_qubits: Vec<usize> = (0..n).filter(|q| (raw >> q) & 1 == 1).collect();
                let Some(reduced) = restrict_set(set, &kept_ids, &kept_qubits) else {
                    continue;
                };
                if verify_nks(&reduced).holds {
                    return Ok(Some(Reduction { kept_ids, kept_qubits, set: reduced }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(texts: &[&str]) -> IdTable {
        let rows: Vec<PauliWord> = texts.iter().map(|t| t.parse().unwrap()).collect();
        analyze_id(&rows).unwrap()
    }

    fn nks_pair() -> IdSet {
        IdSet::new(vec![id(&["ZZ", "XX", "YY"]), id(&["ZX", "XZ", "YY"])]).unwrap()
    }

    #[test]
    fn pair_is_nks_not_ks() {
        let set = nks_pair();
        assert!(verify_nks(&set).holds);
        let ks = verify_ks(&set);
        assert!(!ks.holds);
        assert!(ks.odd_words.contains(&"ZZ".parse().unwrap()));
    }

    #[test]
    fn single_ghz_id_is_nks() {
        let set = IdSet::new(vec![id(&["ZZZ", "ZXX", "XZX", "XXZ"])]).unwrap();
        assert!(verify_nks(&set).holds);
    }

    #[test]
    fn lone_bell_id_is_not_nks() {
        let set = IdSet::new(vec![id(&["ZZ", "XX", "YY"])]).unwrap();
        let report = verify_nks(&set);
        assert!(!report.holds);
        assert!(report.odd_letters.contains(&(0, PauliLetter::Z)));
    }

    #[test]
    fn empty_set_fails_both() {
        let set = IdSet::new(vec![]).unwrap();
        assert!(!verify_nks(&set).holds);
        assert!(!verify_ks(&set).holds);
    }

    #[test]
    fn duplicate_members_rejected() {
        let a = id(&["ZZ", "XX", "YY"]);
        let b = id(&["XX", "ZZ", "YY"]); // same row set, different order
        assert_eq!(
            IdSet::new(vec![a, b]),
            Err(ContextError::DuplicateId { first: 0, second: 1 })
        );
    }

    #[test]
    fn peres_mermin_square() {
        let square = ks_from_nks(&nks_pair()).unwrap();
        assert_eq!(square.len(), 6);
        assert_eq!(square.word_occurrences().len(), 9);
        assert!(verify_ks(&square).holds);
        // It is also a (noncritical) NKS set whose words all occur evenly,
        // so the generation method leaves it unchanged.
        assert!(verify_nks(&square).holds);
        let again = ks_from_nks(&square).unwrap();
        assert_eq!(again.len(), 6);
    }

    #[test]
    fn per_word_oracle_on_square() {
        let square = ks_from_nks(&nks_pair()).unwrap();
        match assignment_feasible(&square, AssignmentMode::PerWord) {
            Feasibility::Infeasible { certificate } => {
                assert_eq!(certificate, vec![0, 1, 2, 3, 4, 5]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn per_letter_oracle_on_pair() {
        match assignment_feasible(&nks_pair(), AssignmentMode::PerSingleQubitLetter) {
            Feasibility::Infeasible { certificate } => assert_eq!(certificate, vec![0, 1]),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn lone_id_is_feasible_per_word() {
        let set = IdSet::new(vec![id(&["ZZ", "XX", "YY"])]).unwrap();
        match assignment_feasible(&set, AssignmentMode::PerWord) {
            Feasibility::Feasible { assignment } => {
                let negatives =
                    assignment.iter().filter(|(_, sign)| sign.is_negative()).count();
                assert_eq!(negatives % 2, 1);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn pair_is_critical_nks() {
        let result = set_critical(&nks_pair(), SetKind::Nks, &Budget::unlimited()).unwrap();
        assert!(result.critical);
    }

    #[test]
    fn square_is_critical_ks() {
        let square = ks_from_nks(&nks_pair()).unwrap();
        let result = set_critical(&square, SetKind::Ks, &Budget::unlimited()).unwrap();
        assert!(result.critical);
    }

    #[test]
    fn redundant_positive_id_breaks_criticality() {
        let mut ids = nks_pair().ids().to_vec();
        ids.push(id(&["ZI", "IZ", "ZZ"]));
        let set = IdSet::new(ids).unwrap();
        assert!(verify_nks(&set).holds);
        let result = set_critical(&set, SetKind::Nks, &Budget::unlimited()).unwrap();
        assert!(!result.critical);
        let witness = result.witness.unwrap();
        assert_eq!(witness.kept_ids, vec![0, 1]);
    }

    #[test]
    fn set_critical_requires_the_property() {
        let set = IdSet::new(vec![id(&["ZZ", "XX", "YY"])]).unwrap();
        assert_eq!(
            set_critical(&set, SetKind::Nks, &Budget::unlimited()),
            Err(ContextError::NotNks)
        );
    }

    #[test]
    fn find_nks_inside_square() {
        let square = ks_from_nks(&nks_pair()).unwrap();
        let found = find_nks_subset(&square, &Budget::unlimited()).unwrap().unwrap();
        assert_eq!(found.kept_ids, vec![0, 1]);
        assert_eq!(found.set.len(), 2);
        assert!(verify_nks(&found.set).holds);
    }

    #[test]
    fn find_nks_requires_ks() {
        assert_eq!(
            find_nks_subset(&nks_pair(), &Budget::unlimited()),
            Err(ContextError::NotKs)
        );
    }

    #[test]
    fn ghz_star_from_single_id() {
        let star_core = id(&["XYY", "YXY", "YYX", "XXX"]);
        assert_eq!(star_core.sign(), Sign::Minus);
        let set = IdSet::new(vec![star_core]).unwrap();
        assert!(verify_nks(&set).holds);
        let star = ks_from_nks(&set).unwrap();
        assert_eq!(star.len(), 5);
        assert!(verify_ks(&star).holds);
        match assignment_feasible(&star, AssignmentMode::PerWord) {
            Feasibility::Infeasible { certificate } => {
                assert_eq!(certificate, vec![0, 1, 2, 3, 4]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        // The star contains its single-ID NKS subset.
        let found = find_nks_subset(&star, &Budget::unlimited()).unwrap().unwrap();
        assert_eq!(found.kept_ids, vec![0]);
    }
}
