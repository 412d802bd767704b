//! Representative-class machinery: anticommutation color-hypergraphs and
//! canonical keys for identity products.
//!
//! Two IDs are the same representative ID iff one maps onto the other under
//! a qubit permutation plus per-qubit permutations of {X, Y, Z}, ignoring
//! row order. For O = 0 classes the sign is part of the identity (no such
//! transformation can change it); for O > 0 the sign is free.

use crate::budget::{Budget, BudgetError};
use crate::id::IdTable;
use crate::pauli::PauliLetter;

/// The anticommutation structure of an ID: one vertex per observable, one
/// color per qubit, and edges joining the row pairs whose letters at that
/// qubit anticommute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorHypergraph {
    vertex_count: usize,
    colors: Vec<Vec<(usize, usize)>>,
}

impl ColorHypergraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edge sets per color (qubit), each edge as an ordered pair i < j.
    pub fn colors(&self) -> &[Vec<(usize, usize)>] {
        &self.colors
    }

    /// Legality: every vertex has even degree within each color, and every
    /// vertex pair is covered by an even number of colors.
    pub fn is_legal(&self) -> bool {
        for edges in &self.colors {
            let mut degree = vec![0usize; self.vertex_count];
            for &(i, j) in edges {
                degree[i] += 1;
                degree[j] += 1;
            }
            if degree.iter().any(|d| d % 2 != 0) {
                return false;
            }
        }
        for i in 0..self.vertex_count {
            for j in i + 1..self.vertex_count {
                let cover = self
                    .colors
                    .iter()
                    .filter(|edges| edges.contains(&(i, j)))
                    .count();
                if cover % 2 != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the color-hypergraph of a valid ID. Color q holds exactly the
/// anticommuting letter pairs of column q.
pub fn build_hypergraph(id: &IdTable) -> ColorHypergraph {
    let m = id.m();
    let colors = (0..id.n())
        .map(|q| {
            let mut edges = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    if id.rows()[i].letter(q).anticommutes(id.rows()[j].letter(q)) {
                        edges.push((i, j));
                    }
                }
            }
            edges
        })
        .collect();
    let graph = ColorHypergraph { vertex_count: m, colors };
    debug_assert!(graph.is_legal());
    graph
}

/// How the sign participates in class identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignTag {
    /// O > 0: reflections of an Odd SQP flip the sign, so it is not a class
    /// invariant.
    Free,
    FixedPlus,
    FixedMinus,
}

impl SignTag {
    fn code(self) -> u8 {
        match self {
            SignTag::Free => 0,
            SignTag::FixedPlus => 1,
            SignTag::FixedMinus => 2,
        }
    }

    fn from_code(code: u8) -> Option<SignTag> {
        match code {
            0 => Some(SignTag::Free),
            1 => Some(SignTag::FixedPlus),
            2 => Some(SignTag::FixedMinus),
            _ => None,
        }
    }
}

/// A total-order-comparable fingerprint of a representative ID class.
///
/// Encoding (stable across runs and platforms): byte 0 = M, byte 1 = N,
/// byte 2 = sign tag (0 free, 1 fixed +, 2 fixed -), then the minimized
/// letter grid row-major with letters mapped I=0 < X=1 < Y=2 < Z=3. The
/// minimized grid is the lexicographic minimum, over all qubit orderings and
/// per-qubit permutations of {X, Y, Z}, of the grid with rows sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    bytes: Vec<u8>,
}

impl CanonicalKey {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn m(&self) -> usize {
        self.bytes[0] as usize
    }

    pub fn n(&self) -> usize {
        self.bytes[1] as usize
    }

    pub fn sign_tag(&self) -> SignTag {
        SignTag::from_code(self.bytes[2]).expect("valid sign tag byte")
    }

    /// The minimized grid as rows of letters.
    pub fn grid(&self) -> Vec<Vec<PauliLetter>> {
        let (m, n) = (self.m(), self.n());
        (0..m)
            .map(|i| {
                (0..n)
                    .map(|q| PauliLetter::ALL[self.bytes[3 + i * n + q] as usize])
                    .collect()
            })
            .collect()
    }

    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The six permutations of {X, Y, Z} with I fixed, as code maps.
const LETTER_PERMS: [[u8; 4]; 6] = [
    [0, 1, 2, 3], // identity
    [0, 1, 3, 2], // Y <-> Z
    [0, 2, 1, 3], // X <-> Y
    [0, 2, 3, 1], // X -> Y -> Z -> X
    [0, 3, 1, 2], // X -> Z -> Y -> X
    [0, 3, 2, 1], // X <-> Z
];

/// Index of the X <-> Y transposition in [`LETTER_PERMS`]; an odd
/// permutation, used to reflect an Odd SQP and flip an ID sign.
pub(crate) const REFLECTION_XY: usize = 2;

pub(crate) fn apply_letter_perm(perm: usize, letter: PauliLetter) -> PauliLetter {
    PauliLetter::ALL[LETTER_PERMS[perm][letter as usize] as usize]
}

fn grid_codes(id: &IdTable) -> Vec<Vec<u8>> {
    id.rows()
        .iter()
        .map(|row| (0..id.n()).map(|q| row.letter(q) as u8).collect())
        .collect()
}

fn sorted_flat(grid: &[Vec<u8>]) -> Vec<u8> {
    let mut rows = grid.to_vec();
    rows.sort_unstable();
    rows.into_iter().flatten().collect()
}

/// Cheap pre-filter for canonicalization: false when some single-qubit
/// letter permutation, qubit transposition, or transposition-with-relabeling
/// strictly lowers the row-sorted flat encoding. The canonical member of a
/// class is minimal under every transform, so only locally minimal grids can
/// carry the canonical key; censuses skip the rest without losing classes.
pub fn is_locally_minimal(id: &IdTable) -> bool {
    let grid = grid_codes(id);
    let (m, n) = (id.m(), id.n());
    let base = sorted_flat(&grid);
    let mut variant = grid.clone();

    // Single-qubit letter permutations.
    for q in 0..n {
        for perm in LETTER_PERMS.iter().skip(1) {
            for i in 0..m {
                variant[i][q] = perm[grid[i][q] as usize];
            }
            if sorted_flat(&variant) < base {
                return false;
            }
            for row in variant.iter_mut().zip(&grid) {
                row.0[q] = row.1[q];
            }
        }
    }

    // Qubit transpositions combined with letter permutations on both
    // swapped qubits.
    for a in 0..n {
        for b in a + 1..n {
            for pa in LETTER_PERMS {
                for pb in LETTER_PERMS {
                    for i in 0..m {
                        variant[i][a] = pa[grid[i][b] as usize];
                        variant[i][b] = pb[grid[i][a] as usize];
                    }
                    if sorted_flat(&variant) < base {
                        return false;
                    }
                }
            }
            for i in 0..m {
                variant[i][a] = grid[i][a];
                variant[i][b] = grid[i][b];
            }
        }
    }
    true
}

/// Encodes a full column assignment: for each output position d the chosen
/// source column and letter permutation.
struct CanonState<'a> {
    grid: &'a [Vec<u8>],
    m: usize,
    n: usize,
    /// (source column, letter perm) per assigned output position.
    assigned: Vec<(usize, usize)>,
    used: u64,
    /// Current best complete flat grid (row-major, rows sorted).
    best: Vec<u8>,
}

impl CanonState<'_> {
    /// Flattens the currently assigned prefix into sorted rows padded with
    /// zeros; a lower bound for any completion of this assignment.
    fn padded_prefix(&self) -> Vec<u8> {
        let d = self.assigned.len();
        let mut prefixes: Vec<Vec<u8>> = (0..self.m)
            .map(|i| {
                self.assigned
                    .iter()
                    .map(|&(col, perm)| LETTER_PERMS[perm][self.grid[i][col] as usize])
                    .collect()
            })
            .collect();
        prefixes.sort_unstable();
        let mut flat = vec![0u8; self.m * self.n];
        for (i, prefix) in prefixes.iter().enumerate() {
            flat[i * self.n..i * self.n + d].copy_from_slice(prefix);
        }
        flat
    }

    fn search(&mut self) {
        if self.assigned.len() == self.n {
            let flat = self.padded_prefix();
            if flat < self.best {
                self.best = flat;
            }
            return;
        }
        for col in 0..self.n {
            if (self.used >> col) & 1 == 1 {
                continue;
            }
            for perm in 0..6 {
                self.assigned.push((col, perm));
                self.used |= 1 << col;
                if self.padded_prefix() <= self.best {
                    self.search();
                }
                self.used &= !(1u64 << col);
                self.assigned.pop();
            }
        }
    }
}

/// Canonical key of an ID; equal keys iff the IDs are related by a qubit
/// permutation plus per-qubit letter permutations (and, for O = 0, equal
/// sign).
pub fn canonical_key(id: &IdTable) -> CanonicalKey {
    let grid = grid_codes(id);
    let (m, n) = (id.m(), id.n());

    // Seed with the identity transform.
    let mut seed: Vec<Vec<u8>> = grid.clone();
    seed.sort_unstable();
    let best: Vec<u8> = seed.into_iter().flatten().collect();

    let mut state = CanonState { grid: &grid, m, n, assigned: Vec::new(), used: 0, best };
    state.search();

    let sign_tag = if id.odd_count() > 0 {
        SignTag::Free
    } else if id.sign().is_negative() {
        SignTag::FixedMinus
    } else {
        SignTag::FixedPlus
    };

    let mut bytes = Vec::with_capacity(3 + m * n);
    bytes.push(m as u8);
    bytes.push(n as u8);
    bytes.push(sign_tag.code());
    bytes.extend_from_slice(&state.best);
    CanonicalKey { bytes }
}

/// True iff the two IDs belong to the same representative class.
pub fn equivalent(a: &IdTable, b: &IdTable) -> bool {
    if a.m() != b.m() || a.n() != b.n() {
        return false;
    }
    canonical_key(a) == canonical_key(b)
}

/// Direct search over qubit permutations and per-qubit letter permutations
/// for an exact match of the (row-sorted) grids; the oracle for
/// [`canonical_key`]. The budget is ticked once per transformation.
pub fn brute_force_equivalent(
    a: &IdTable,
    b: &IdTable,
    budget: &Budget,
) -> Result<bool, BudgetError> {
    if a.m() != b.m() || a.n() != b.n() {
        return Ok(false);
    }
    let n = a.n();
    // Sign handling: for O = 0 no transformation changes the sign, so grid
    // equality decides; for O > 0 the grids of differently-signed members
    // are related by a reflection, which the letter-perm sweep covers.
    if a.odd_count() == 0 && (b.odd_count() != 0 || a.sign() != b.sign()) {
        return Ok(false);
    }

    let grid_a = grid_codes(a);
    let mut sorted_b = grid_codes(b);
    sorted_b.sort_unstable();

    let meter = budget.start();
    let mut qubit_order: Vec<usize> = (0..n).collect();
    let mut perm_choice = vec![0usize; n];

    // Plain odometer over letter perms nested inside qubit permutations.
    let mut result = false;
    permute(&mut qubit_order, &mut |order: &[usize]| -> Result<bool, BudgetError> {
        loop {
            meter.tick(1)?;
            let mut transformed: Vec<Vec<u8>> = grid_a
                .iter()
                .map(|row| {
                    (0..n)
                        .map(|d| LETTER_PERMS[perm_choice[d]][row[order[d]] as usize])
                        .collect()
                })
                .collect();
            transformed.sort_unstable();
            if transformed == sorted_b {
                return Ok(true);
            }
            // Advance the odometer; done when it wraps.
            let mut d = 0;
            loop {
                if d == n {
                    return Ok(false);
                }
                perm_choice[d] += 1;
                if perm_choice[d] < 6 {
                    break;
                }
                perm_choice[d] = 0;
                d += 1;
            }
        }
    }, &mut result)?;
    Ok(result)
}

/// Heap's algorithm; stops early when the visitor returns Ok(true).
fn permute<E>(
    items: &mut [usize],
    visit: &mut impl FnMut(&[usize]) -> Result<bool, E>,
    found: &mut bool,
) -> Result<(), E> {
    fn rec<E>(
        k: usize,
        items: &mut [usize],
        visit: &mut impl FnMut(&[usize]) -> Result<bool, E>,
        found: &mut bool,
    ) -> Result<(), E> {
        if *found {
            return Ok(());
        }
        if k == 1 {
            if visit(items)? {
                *found = true;
            }
            return Ok(());
        }
        for i in 0..k {
            rec(k - 1, items, visit, found)?;
            if *found {
                return Ok(());
            }
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
        Ok(())
    }
    rec(items.len(), items, visit, found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::analyze_id;
    use crate::pauli::PauliWord;

    fn id(texts: &[&str]) -> IdTable {
        let rows: Vec<PauliWord> = texts.iter().map(|t| t.parse().unwrap()).collect();
        analyze_id(&rows).unwrap()
    }

    #[test]
    fn hypergraph_of_bell_id() {
        let graph = build_hypergraph(&id(&["ZZ", "XX", "YY"]));
        assert_eq!(graph.vertex_count(), 3);
        assert_eq!(graph.colors().len(), 2);
        for color in graph.colors() {
            assert_eq!(color, &[(0, 1), (0, 2), (1, 2)]);
        }
        assert!(graph.is_legal());
    }

    #[test]
    fn hypergraph_with_trivial_column() {
        let graph = build_hypergraph(&id(&["ZZI", "XXI", "YYI"]));
        assert!(graph.colors()[2].is_empty());
    }

    #[test]
    fn hypergraph_of_table_2b() {
        let graph = build_hypergraph(&id(&["ZZI", "ZIZ", "XXX", "XYY"]));
        assert_eq!(graph.colors()[0], vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(graph.colors()[1], vec![(0, 2), (0, 3), (2, 3)]);
        assert_eq!(graph.colors()[2], vec![(1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn reflected_bell_ids_are_equivalent() {
        let a = id(&["ZZ", "XX", "YY"]);
        let b = id(&["ZX", "XZ", "YY"]);
        assert_eq!(canonical_key(&a), canonical_key(&b));
        assert!(equivalent(&a, &b));
    }

    #[test]
    fn key_invariant_under_shuffles() {
        let a = id(&["ZZI", "ZIZ", "XXX", "XYY"]);
        // Qubits reordered as (3,1,2) and rows shuffled.
        let permuted = id(&["XXX", "IZZ", "YXY", "ZZI"]);
        assert_eq!(canonical_key(&a), canonical_key(&permuted));
    }

    #[test]
    fn distinct_three_qubit_classes() {
        let a = id(&["ZZZ", "ZXX", "XZX", "XXZ"]);
        let b = id(&["ZZI", "ZIZ", "XXX", "XYY"]);
        assert!(!equivalent(&a, &b));
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn key_decodes_back_to_its_own_fields() {
        let a = id(&["ZZ", "XX", "YY"]);
        let key = canonical_key(&a);
        assert_eq!(key.m(), 3);
        assert_eq!(key.n(), 2);
        assert_eq!(key.sign_tag(), SignTag::Free);
        let grid = key.grid();
        assert_eq!(grid.len(), 3);
        // The minimized grid is itself an equivalent ID.
        let rows: Vec<PauliWord> = grid
            .iter()
            .map(|letters| PauliWord::from_letters(letters).unwrap())
            .collect();
        let decoded = analyze_id(&rows).unwrap();
        assert!(equivalent(&a, &decoded));
    }

    #[test]
    fn o_zero_sign_is_fixed() {
        let ghz = id(&["ZZZ", "ZXX", "XZX", "XXZ"]);
        assert_eq!(canonical_key(&ghz).sign_tag(), SignTag::FixedMinus);
    }

    #[test]
    fn brute_force_agrees() {
        let budget = Budget::nodes(10_000_000);
        let a = id(&["ZZ", "XX", "YY"]);
        let b = id(&["ZX", "XZ", "YY"]);
        assert!(brute_force_equivalent(&a, &b, &budget).unwrap());

        let c = id(&["ZZZ", "ZXX", "XZX", "XXZ"]);
        let d = id(&["ZZI", "ZIZ", "XXX", "XYY"]);
        assert!(!brute_force_equivalent(&c, &d, &budget).unwrap());
        assert!(brute_force_equivalent(&c, &c, &budget).unwrap());
    }

    #[test]
    fn brute_force_budget_exceeded() {
        let a = id(&["ZZ", "XX", "YY"]);
        assert_eq!(
            brute_force_equivalent(&a, &a, &Budget::nodes(0)),
            Err(BudgetError::Exhausted { nodes: 1 })
        );
    }

    #[test]
    fn letter_relabeling_is_equivalent() {
        // X <-> Y on qubit 1 of the Bell ID.
        let a = id(&["ZZ", "XX", "YY"]);
        let b = id(&["ZZ", "YX", "XY"]);
        assert!(equivalent(&a, &b));
        assert!(brute_force_equivalent(&a, &b, &Budget::nodes(1_000_000)).unwrap());
    }
}
