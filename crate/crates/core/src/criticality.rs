//! Criticality of identity products and the entangled-set criterion.
//!
//! An ID is critical when no deletion of rows and/or qubits leaves a smaller
//! identity product: neither a proper row subset multiplying to +-identity
//! (a product of smaller IDs), nor a proper qubit subset onto which the rows
//! restrict to a mutually commuting set (a direct product of smaller IDs),
//! nor a combined deletion whose restricted row subset is itself a valid
//! smaller ID.

use crate::id::{IdError, IdTable};
use crate::pauli::{commutes_unchecked, PauliWord};
use crate::sqp::SqpClass;

/// Why an ID failed to be critical. Witness index sets are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitWitness {
    /// A proper nonempty row subset whose product is +-identity. The subset
    /// (and its complement) is itself a valid ID.
    RowSplit { rows: Vec<usize> },
    /// A proper nonempty qubit subset onto which all rows restrict to a
    /// mutually commuting set with +-identity product. Restricted rows may
    /// repeat or be the identity.
    ColumnSplit { qubits: Vec<usize> },
    /// A proper row subset restricted to a proper qubit subset forming a
    /// valid smaller ID (distinct non-identity commuting restrictions with
    /// +-identity product).
    GeneralSplit { rows: Vec<usize>, qubits: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalityReport {
    pub critical: bool,
    pub witness: Option<SplitWitness>,
}

/// Iterates subsets of 0..n with min_size..=max_size elements, ordered by
/// size then lexicographically, stopping at the first subset `f` accepts.
fn find_subset(
    n: usize,
    min_size: usize,
    max_size: usize,
    mut f: impl FnMut(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    let mut subset: Vec<usize> = Vec::new();
    fn rec(
        n: usize,
        size: usize,
        start: usize,
        subset: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if subset.len() == size {
            return f(subset);
        }
        let remaining = size - subset.len();
        for next in start..=n.saturating_sub(remaining) {
            subset.push(next);
            if rec(n, size, next + 1, subset, f) {
                return true;
            }
            subset.pop();
        }
        false
    }
    for size in min_size..=max_size {
        if rec(n, size, 0, &mut subset, &mut f) {
            return Some(subset);
        }
    }
    None
}

/// True iff the product of the given rows has the identity word part; the
/// phase is then automatically real for commuting rows.
fn rows_multiply_to_identity(rows: &[PauliWord], subset: &[usize]) -> bool {
    let mut x = 0u64;
    let mut z = 0u64;
    for &i in subset {
        x ^= rows[i].x_bits();
        z ^= rows[i].z_bits();
    }
    x == 0 && z == 0
}

/// Loose column split: all rows restrict to a mutually commuting set on
/// `qubits` (the restricted product is then automatically +-identity, and
/// duplicate or identity restrictions are permitted).
pub(crate) fn is_column_split(id: &IdTable, qubits: &[usize]) -> bool {
    restrictions_commute(id.rows(), qubits)
}

fn restrictions_commute(rows: &[PauliWord], qubits: &[usize]) -> bool {
    let mut qmask = 0u64;
    for &q in qubits {
        qmask |= 1u64 << q;
    }
    commute_on_mask(rows, qmask)
}

fn commute_on_mask(rows: &[PauliWord], qmask: u64) -> bool {
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let cross = (rows[i].x_bits() & rows[j].z_bits() & qmask).count_ones()
                + (rows[i].z_bits() & rows[j].x_bits() & qmask).count_ones();
            if !cross.is_multiple_of(2) {
                return false;
            }
        }
    }
    true
}

/// Strict general split: the rows at `row_subset`, restricted to the qubits
/// in `qmask`, form a valid smaller ID (distinct, non-identity, commuting,
/// product +-identity) with no Trivial column — a restriction that lands on
/// trivial structure is discardable padding, not a genuine smaller ID. The
/// product-word condition is a precondition: the caller chooses `qmask`
/// inside the zero support of the subset XOR.
fn strict_split_on_mask(rows: &[PauliWord], row_subset: &[usize], qmask: u64) -> bool {
    for (pos, &i) in row_subset.iter().enumerate() {
        let support = (rows[i].x_bits() | rows[i].z_bits()) & qmask;
        if support == 0 {
            return false; // identity restriction
        }
        for &j in &row_subset[pos + 1..] {
            let diff = ((rows[i].x_bits() ^ rows[j].x_bits())
                | (rows[i].z_bits() ^ rows[j].z_bits()))
                & qmask;
            if diff == 0 {
                return false; // duplicate restrictions
            }
            let cross = (rows[i].x_bits() & rows[j].z_bits() & qmask).count_ones()
                + (rows[i].z_bits() & rows[j].x_bits() & qmask).count_ones();
            if !cross.is_multiple_of(2) {
                return false;
            }
        }
    }
    // Every column needs at least two distinct non-identity letters.
    let mut mask = qmask;
    while mask != 0 {
        let q = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        let mut seen = 0u8;
        for &i in row_subset {
            let x = (rows[i].x_bits() >> q) & 1;
            let z = (rows[i].z_bits() >> q) & 1;
            if x != 0 || z != 0 {
                seen |= 1 << (x | (z << 1));
            }
        }
        if seen.count_ones() < 2 {
            return false; // trivial column
        }
    }
    true
}

/// Enumerates the nonempty submasks of `allowed`, largest first.
fn submasks(allowed: u64) -> impl Iterator<Item = u64> {
    let mut sub = allowed;
    let mut done = allowed == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = sub;
        if sub == 0 {
            done = true;
            return None;
        }
        sub = (sub - 1) & allowed;
        if current == 0 {
            None
        } else {
            Some(current)
        }
    })
}

fn mask_to_vec(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|q| (mask >> q) & 1 == 1).collect()
}

/// Searches for a strict general split with a proper row subset. Pairs can
/// never split strictly (equal restrictions), so sizes run 3..=m-1.
fn find_general_split(id: &IdTable, full_mask: u64) -> Option<(Vec<usize>, u64)> {
    let rows = id.rows();
    let m = rows.len();
    if m < 4 {
        return None;
    }
    let mut result: Option<(Vec<usize>, u64)> = None;
    find_subset(m, 3, m - 1, |subset| {
        let mut x = 0u64;
        let mut z = 0u64;
        for &i in subset {
            x ^= rows[i].x_bits();
            z ^= rows[i].z_bits();
        }
        let allowed = full_mask & !(x | z);
        if allowed == 0 {
            return false;
        }
        for qmask in submasks(allowed) {
            if qmask == full_mask {
                continue; // Q = all is the plain RowSplit, handled earlier
            }
            if strict_split_on_mask(rows, subset, qmask) {
                result = Some((subset.to_vec(), qmask));
                return true;
            }
        }
        false
    });
    result
}

/// Decides criticality by exhaustive search over row-subset splits, loose
/// column splits, and combined row-and-qubit deletions. RowSplit witnesses
/// are preferred, then ColumnSplits, then general splits; within each kind
/// the first witness in (size, lexicographic) order is returned.
pub fn is_critical_id(id: &IdTable) -> CriticalityReport {
    let m = id.m();
    let n = id.n();
    let full_mask: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    // A row subset with identity product has >= 2 rows and so does its
    // complement, so sizes 2..=m-2 suffice.
    if m >= 4 {
        if let Some(rows) =
            find_subset(m, 2, m - 2, |subset| rows_multiply_to_identity(id.rows(), subset))
        {
            return CriticalityReport { critical: false, witness: Some(SplitWitness::RowSplit { rows }) };
        }
    }

    if n >= 2 {
        if let Some(qubits) = find_subset(n, 1, n - 1, |subset| is_column_split(id, subset)) {
            return CriticalityReport {
                critical: false,
                witness: Some(SplitWitness::ColumnSplit { qubits }),
            };
        }
    }

    if let Some((rows, qmask)) = find_general_split(id, full_mask) {
        return CriticalityReport {
            critical: false,
            witness: Some(SplitWitness::GeneralSplit { rows, qubits: mask_to_vec(qmask, n) }),
        };
    }

    CriticalityReport { critical: true, witness: None }
}

/// Odd-criticality, the admission condition for CNS instantiation: the rows
/// cannot be separated into smaller IDs (no row split, no general split),
/// and no column split separates the Odd qubits (every loose split keeps
/// them all on one side, so they can never be removed).
pub fn is_odd_critical(id: &IdTable) -> Result<bool, IdError> {
    if id.odd_count() == 0 {
        return Err(IdError::OddCountZero);
    }
    let m = id.m();
    let n = id.n();
    let full_mask: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    if m >= 4
        && find_subset(m, 2, m - 2, |subset| rows_multiply_to_identity(id.rows(), subset)).is_some()
    {
        return Ok(false);
    }
    if find_general_split(id, full_mask).is_some() {
        return Ok(false);
    }

    let mut odd_mask = 0u64;
    for q in 0..n {
        if id.column(q).class() == SqpClass::Odd {
            odd_mask |= 1 << q;
        }
    }
    let separating = find_subset(n, 1, n - 1, |subset| {
        let mut qmask = 0u64;
        for &q in subset {
            qmask |= 1 << q;
        }
        let overlap = qmask & odd_mask;
        if overlap == 0 || overlap == odd_mask {
            return false; // odds stay together
        }
        is_column_split(id, subset)
    });
    Ok(separating.is_none())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntangledCheck {
    pub entangled: bool,
    /// A proper qubit subset on which all row restrictions pairwise commute
    /// (the complement then also commutes, by parity of the symplectic form).
    pub witness: Option<Vec<usize>>,
}

/// The entangled-set criterion for a commuting set of observables: the set
/// is entangled iff every proper nonempty qubit subset has some pair of rows
/// anticommuting when restricted to it.
pub fn entangled_set_check(rows: &[PauliWord]) -> Result<EntangledCheck, IdError> {
    if rows.is_empty() {
        return Err(IdError::TooFewRows { got: 0 });
    }
    let n = rows[0].n();
    for (i, row) in rows.iter().enumerate() {
        if row.n() != n {
            return Err(IdError::RaggedRow { row: i, got: row.n(), want: n });
        }
    }
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            if !commutes_unchecked(&rows[i], &rows[j]) {
                return Err(IdError::NonCommutingPair { first: i, second: j });
            }
        }
    }
    if n == 1 {
        // No proper nonempty subset exists; a single qubit is never split.
        return Ok(EntangledCheck { entangled: true, witness: None });
    }
    match find_subset(n, 1, n - 1, |subset| restrictions_commute(rows, subset)) {
        Some(witness) => Ok(EntangledCheck { entangled: false, witness: Some(witness) }),
        None => Ok(EntangledCheck { entangled: true, witness: None }),
    }
}

/// True iff `rows` is an entangled set that stops being entangled when any
/// single row is removed.
pub fn minimal_generators_check(rows: &[PauliWord]) -> Result<bool, IdError> {
    let check = entangled_set_check(rows)?;
    if !check.entangled {
        return Err(IdError::NotEntangled);
    }
    for skip in 0..rows.len() {
        let remaining: Vec<PauliWord> = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, r)| *r)
            .collect();
        if remaining.is_empty() {
            continue;
        }
        if entangled_set_check(&remaining)?.entangled {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::analyze_id;

    fn rows(texts: &[&str]) -> Vec<PauliWord> {
        texts.iter().map(|t| t.parse().unwrap()).collect()
    }

    fn id(texts: &[&str]) -> IdTable {
        analyze_id(&rows(texts)).unwrap()
    }

    #[test]
    fn bell_id_is_critical() {
        let report = is_critical_id(&id(&["ZZ", "XX", "YY"]));
        assert!(report.critical);
        assert!(report.witness.is_none());
    }

    #[test]
    fn column_split_witness() {
        let report = is_critical_id(&id(&["ZZZZ", "XXXX", "YYYY"]));
        assert_eq!(
            report.witness,
            Some(SplitWitness::ColumnSplit { qubits: vec![0, 1] })
        );
        // The restriction to the witness is the Bell ID.
        let table = id(&["ZZZZ", "XXXX", "YYYY"]);
        let restricted: Vec<PauliWord> =
            table.rows().iter().map(|r| r.restrict(&[0, 1])).collect();
        let sub = analyze_id(&restricted).unwrap();
        assert_eq!(sub.sign(), crate::pauli::Sign::Minus);
    }

    #[test]
    fn row_split_witness() {
        let report = is_critical_id(&id(&["ZZII", "XXII", "YYII", "IIZZ", "IIXX", "IIYY"]));
        assert_eq!(report.witness, Some(SplitWitness::RowSplit { rows: vec![0, 1, 2] }));
        // The witness subset re-verifies as a valid ID.
        let table = id(&["ZZII", "XXII", "YYII", "IIZZ", "IIXX", "IIYY"]);
        let subset: Vec<PauliWord> = [0usize, 1, 2].iter().map(|&i| table.rows()[i]).collect();
        assert!(analyze_id(&subset).is_ok());
    }

    #[test]
    fn general_split_witness() {
        // No row subset multiplies to +-I and no qubit cut commutes, but
        // dropping rows 2, 3 and qubits 1, 2 leaves the valid ID {XX,YY,ZZ}.
        let table = id(&["IIXX", "IXIX", "XIIX", "YYYY", "ZZZZ"]);
        let report = is_critical_id(&table);
        assert!(!report.critical);
        match report.witness {
            Some(SplitWitness::GeneralSplit { rows: r, qubits: q }) => {
                let restricted: Vec<PauliWord> =
                    r.iter().map(|&i| table.rows()[i].restrict(&q)).collect();
                assert!(analyze_id(&restricted).is_ok());
            }
            other => panic!("expected a general split, got {other:?}"),
        }
    }

    #[test]
    fn trivial_column_is_a_size_one_split() {
        let report = is_critical_id(&id(&["ZZI", "XXI", "YYI"]));
        assert_eq!(report.witness, Some(SplitWitness::ColumnSplit { qubits: vec![2] }));
    }

    #[test]
    fn product_basis_group_is_noncritical() {
        // {ZI, IZ, ZZ} factors as a direct product with repeated elements.
        let report = is_critical_id(&id(&["ZI", "IZ", "ZZ"]));
        assert_eq!(report.witness, Some(SplitWitness::ColumnSplit { qubits: vec![0] }));
    }

    #[test]
    fn three_and_four_qubit_ids_are_critical() {
        assert!(is_critical_id(&id(&["ZZZ", "ZXX", "XZX", "XXZ"])).critical);
        assert!(is_critical_id(&id(&["ZZI", "ZIZ", "XXX", "XYY"])).critical);
        assert!(is_critical_id(&id(&["ZZZZ", "XXXX", "YIZX", "IYXZ"])).critical);
        assert!(is_critical_id(&id(&["ZZZI", "XXIZ", "YIXX", "IYYY"])).critical);
        assert!(is_critical_id(&id(&["ZZZZ", "XXZZ", "YIXI", "IYIX", "IIXX"])).critical);
        assert!(is_critical_id(&id(&["ZZZZ", "ZZXX", "XXII", "XIZX", "IXXZ"])).critical);
    }

    #[test]
    fn entangled_set_examples() {
        let check = entangled_set_check(&rows(&["ZZ", "XX", "YY"])).unwrap();
        assert!(check.entangled);

        let check = entangled_set_check(&rows(&["ZZZZ", "XXXX", "YYYY"])).unwrap();
        assert!(!check.entangled);
        assert_eq!(check.witness, Some(vec![0, 1]));

        let check = entangled_set_check(&rows(&["ZZ"])).unwrap();
        assert!(!check.entangled);
        assert_eq!(check.witness, Some(vec![0]));
    }

    #[test]
    fn entangled_set_rejects_noncommuting() {
        assert_eq!(
            entangled_set_check(&rows(&["ZI", "XI"])),
            Err(IdError::NonCommutingPair { first: 0, second: 1 })
        );
    }

    #[test]
    fn minimal_generator_checks() {
        assert!(minimal_generators_check(&rows(&["ZZZ", "ZXX", "XZX"])).unwrap());
        assert!(minimal_generators_check(&rows(&["ZZ", "XX"])).unwrap());
        assert_eq!(
            minimal_generators_check(&rows(&["ZZII", "XXII", "YYII", "IIZZ", "IIXX"])),
            Err(IdError::NotEntangled)
        );
        // {ZZZ, ZXX, XZX, XXZ} stays entangled after dropping the last row.
        assert!(!minimal_generators_check(&rows(&["ZZZ", "ZXX", "XZX", "XXZ"])).unwrap());
    }

    #[test]
    fn odd_critical_examples() {
        assert!(is_odd_critical(&id(&["ZZI", "ZIZ", "XXX", "XYY"])).unwrap());
        assert!(is_odd_critical(&id(&["ZZ", "XX", "YY"])).unwrap());
        assert_eq!(
            is_odd_critical(&id(&["ZZZ", "ZXX", "XZX", "XXZ"])),
            Err(IdError::OddCountZero)
        );
    }

    #[test]
    fn padded_id_stays_odd_critical() {
        // The Bell ID padded with two identity qubits: noncritical (the
        // extra qubits split off), but the Odd qubits stay together.
        let padded = id(&["ZZII", "XXII", "YYII"]);
        assert!(!is_critical_id(&padded).critical);
        assert!(is_odd_critical(&padded).unwrap());
    }

    #[test]
    fn column_split_implies_non_entangled_on_same_subset() {
        let table = id(&["ZZZZ", "XXXX", "YYYY"]);
        if let Some(SplitWitness::ColumnSplit { qubits }) = is_critical_id(&table).witness {
            assert!(restrictions_commute(table.rows(), &qubits));
            let check = entangled_set_check(table.rows()).unwrap();
            assert!(!check.entangled);
        } else {
            panic!("expected a column split");
        }
    }
}
