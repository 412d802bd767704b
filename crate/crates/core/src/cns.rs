//! Critical NKS Structures: {O, I} matrices abstracting sets of generalized
//! IDs, their criticality, enumeration up to row/column permutation, the
//! Ring and Kite families, and instantiation of NKS sets from a pool of
//! odd-critical IDs.

use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::{Budget, BudgetError};
use crate::contextuality::{verify_nks, ContextError, IdSet};
use crate::criticality::is_odd_critical;
use crate::equivalence::{apply_letter_perm, REFLECTION_XY};
use crate::id::{analyze_id, IdError, IdTable};
use crate::pauli::{PauliLetter, PauliWord, Sign};

/// Enumeration and canonicalization use u32 row masks.
pub const MAX_CNS_COLUMNS: usize = 24;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum CnsError {
    #[error("empty CNS matrix")]
    Empty,
    #[error("row {row} has {got} columns, expected {want}")]
    RaggedRow { row: usize, got: usize, want: usize },
    #[error("illegal character {found:?} in row {row}, column {col}")]
    IllegalChar { row: usize, col: usize, found: char },
    #[error("{o} columns exceeds the supported maximum of {MAX_CNS_COLUMNS}")]
    TooManyColumns { o: usize },
    #[error("a Kite needs an even number of odd qubits, got {o}")]
    KiteOddO { o: usize },
    #[error("matrix is not a legal CNS")]
    NotLegal,
    #[error("pool index {index} out of range for pool of {len}")]
    PoolIndex { index: usize, len: usize },
    #[error("pool ID for row {row} is not critical over its Odd SQPs")]
    NotOddCritical { row: usize },
    #[error("row {row}: ID odd columns do not match the row's O cells")]
    OddColumnMismatch { row: usize },
    #[error("row {row}: invalid qubit targets: {reason}")]
    BadTargets { row: usize, reason: String },
    #[error("an NKS set needs an odd number of negative IDs, got {negatives}")]
    EvenNegativeParity { negatives: usize },
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Id(#[from] IdError),
}

/// An R x Q grid over {O, I}. Row bit (q - 1 - c) ... rows are stored as
/// integers with column 0 as the most significant bit, so integer order
/// matches the text order with I < O.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnsMatrix {
    q: usize,
    rows: Vec<u32>,
}

impl CnsMatrix {
    pub fn from_rows(q: usize, rows: Vec<u32>) -> Result<CnsMatrix, CnsError> {
        if q == 0 || rows.is_empty() {
            return Err(CnsError::Empty);
        }
        if q > MAX_CNS_COLUMNS {
            return Err(CnsError::TooManyColumns { o: q });
        }
        debug_assert!(rows.iter().all(|r| r >> q == 0));
        Ok(CnsMatrix { q, rows })
    }

    /// Column count Q (the number of odd qubits).
    pub fn q(&self) -> usize {
        self.q
    }

    /// Row count R (the number of generalized IDs).
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn is_o(&self, row: usize, col: usize) -> bool {
        (self.rows[row] >> (self.q - 1 - col)) & 1 == 1
    }

    /// 0-based columns with an O cell in `row`, ascending.
    pub fn o_columns(&self, row: usize) -> Vec<usize> {
        (0..self.q).filter(|&c| self.is_o(row, c)).collect()
    }

    fn o_count_in_column(&self, col: usize) -> usize {
        self.rows.iter().filter(|&&r| (r >> (self.q - 1 - col)) & 1 == 1).count()
    }

    /// Lexicographically minimal row-sorted matrix over column permutations.
    pub fn canonical(&self) -> CnsMatrix {
        let grid: Vec<Vec<u8>> = (0..self.r())
            .map(|r| (0..self.q).map(|c| self.is_o(r, c) as u8).collect())
            .collect();
        let mut seed: Vec<Vec<u8>> = grid.clone();
        seed.sort_unstable();
        let best: Vec<u8> = seed.into_iter().flatten().collect();
        let mut state = CanonState { grid: &grid, m: self.r(), n: self.q, assigned: Vec::new(), used: 0, best };
        state.search();
        let rows: Vec<u32> = (0..self.r())
            .map(|r| {
                (0..self.q).fold(0u32, |acc, c| (acc << 1) | state.best[r * self.q + c] as u32)
            })
            .collect();
        CnsMatrix { q: self.q, rows }
    }
}

/// Column-assignment DFS minimizing the flat row-sorted grid; the same
/// pruning scheme as the ID canonicalizer, with no letter permutations.
struct CanonState<'a> {
    grid: &'a [Vec<u8>],
    m: usize,
    n: usize,
    assigned: Vec<usize>,
    used: u32,
    best: Vec<u8>,
}

impl CanonState<'_> {
    fn padded_prefix(&self) -> Vec<u8> {
        let d = self.assigned.len();
        let mut prefixes: Vec<Vec<u8>> = (0..self.m)
            .map(|i| self.assigned.iter().map(|&col| self.grid[i][col]).collect())
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
            self.assigned.push(col);
            self.used |= 1 << col;
            if self.padded_prefix() <= self.best {
                self.search();
            }
            self.used &= !(1u32 << col);
            self.assigned.pop();
        }
    }
}

impl FromStr for CnsMatrix {
    type Err = CnsError;

    fn from_str(text: &str) -> Result<CnsMatrix, CnsError> {
        let mut rows = Vec::new();
        let mut q = 0usize;
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let line = line.trim();
            if rows.is_empty() {
                q = line.chars().count();
                if q > MAX_CNS_COLUMNS {
                    return Err(CnsError::TooManyColumns { o: q });
                }
            } else if line.chars().count() != q {
                return Err(CnsError::RaggedRow { row: i, got: line.chars().count(), want: q });
            }
            let mut bits = 0u32;
            for (col, c) in line.chars().enumerate() {
                bits <<= 1;
                match c {
                    'O' => bits |= 1,
                    'I' => {}
                    _ => return Err(CnsError::IllegalChar { row: i, col, found: c }),
                }
            }
            rows.push(bits);
        }
        CnsMatrix::from_rows(q, rows)
    }
}

impl std::fmt::Display for CnsMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, _) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for c in 0..self.q {
                write!(f, "{}", if self.is_o(i, c) { 'O' } else { 'I' })?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnsReport {
    pub legal: bool,
    /// Rows with an odd or < 2 count of O cells.
    pub row_violations: Vec<usize>,
    /// Columns with an odd or < 2 count of O cells.
    pub column_violations: Vec<usize>,
}

/// Checks the CNS parity invariants: every row and every column holds an
/// even number >= 2 of O cells.
pub fn verify_cns(m: &CnsMatrix) -> CnsReport {
    let row_violations: Vec<usize> = (0..m.r())
        .filter(|&r| {
            let count = m.rows()[r].count_ones() as usize;
            count < 2 || !count.is_multiple_of(2)
        })
        .collect();
    let column_violations: Vec<usize> = (0..m.q())
        .filter(|&c| {
            let count = m.o_count_in_column(c);
            count < 2 || !count.is_multiple_of(2)
        })
        .collect();
    CnsReport {
        legal: row_violations.is_empty() && column_violations.is_empty(),
        row_violations,
        column_violations,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnsCriticality {
    pub critical: bool,
    /// Kept row indices of a reducing subset, if any.
    pub witness: Option<Vec<usize>>,
}

/// CNS criticality via the row-subset criterion: reducible iff some proper
/// nonempty row subset has all column counts even (its nonzero columns then
/// form a smaller legal CNS). This is the closure of the hypergraph deletion
/// rules; [`deletion_rule_reducible`] is the literal simulator kept as a
/// cross-check.
pub fn cns_critical(m: &CnsMatrix) -> CnsCriticality {
    let r = m.r();
    for mask in 1..((1u64 << r) - 1) {
        let mut xor = 0u32;
        for i in 0..r {
            if (mask >> i) & 1 == 1 {
                xor ^= m.rows()[i];
            }
        }
        if xor == 0 {
            let witness = (0..r).filter(|i| (mask >> i) & 1 == 1).collect();
            return CnsCriticality { critical: false, witness: Some(witness) };
        }
    }
    CnsCriticality { critical: true, witness: None }
}

/// Literal deletion-rule simulation on the CNS color-hypergraph: tries every
/// initial deletion of rows and/or columns, cascades the two rules to a
/// fixed point, and reports whether any run ends in a smaller legal CNS.
pub fn deletion_rule_reducible(m: &CnsMatrix) -> bool {
    let r = m.r();
    let q = m.q();
    for row_del in 0..(1u64 << r) {
        for col_del in 0..(1u64 << q) {
            if row_del == 0 && col_del == 0 {
                continue;
            }
            let mut alive_rows: Vec<bool> = (0..r).map(|i| (row_del >> i) & 1 == 0).collect();
            let mut alive_cols: Vec<bool> = (0..q).map(|c| (col_del >> c) & 1 == 0).collect();
            // Deleting a color removes its last edges, which removes every
            // vertex that color was connected to (rule 2).
            for (c, alive_col) in alive_cols.iter().enumerate() {
                if !alive_col {
                    for (i, alive) in alive_rows.iter_mut().enumerate() {
                        if m.is_o(i, c) {
                            *alive = false;
                        }
                    }
                }
            }
            // Cascade: a color whose edges vanish deletes its remaining
            // vertex; empty colors are dropped.
            loop {
                let mut changed = false;
                #[allow(clippy::needless_range_loop)] // alive_cols is mutated inside
                for c in 0..q {
                    if !alive_cols[c] {
                        continue;
                    }
                    let holders: Vec<usize> = (0..r)
                        .filter(|&i| alive_rows[i] && m.is_o(i, c))
                        .collect();
                    match holders.len() {
                        0 => {
                            alive_cols[c] = false;
                            changed = true;
                        }
                        1 => {
                            alive_rows[holders[0]] = false;
                            alive_cols[c] = false;
                            changed = true;
                        }
                        _ => {}
                    }
                }
                if !changed {
                    break;
                }
            }
            let rows: Vec<usize> = (0..r).filter(|&i| alive_rows[i]).collect();
            let cols: Vec<usize> = (0..q).filter(|&c| alive_cols[c]).collect();
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            if rows.len() == r && cols.len() == q {
                continue;
            }
            let sub_rows: Vec<u32> = rows
                .iter()
                .map(|&i| {
                    cols.iter()
                        .fold(0u32, |acc, &c| (acc << 1) | (m.is_o(i, c) as u32))
                })
                .collect();
            let sub = CnsMatrix { q: cols.len(), rows: sub_rows };
            if verify_cns(&sub).legal {
                return true;
            }
        }
    }
    false
}

/// The named CNS families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnsFamily {
    /// o generalized IDs, each linking two adjacent qubits in one closed
    /// loop; o = 2 degenerates into the 2 x 2 all-O matrix.
    Ring,
    /// Two identical all-O generalized IDs; needs even o.
    Kite,
}

pub fn family_cns(kind: CnsFamily, o: usize) -> Result<CnsMatrix, CnsError> {
    if o < 2 {
        return Err(CnsError::Empty);
    }
    if o > MAX_CNS_COLUMNS {
        return Err(CnsError::TooManyColumns { o });
    }
    let matrix = match kind {
        CnsFamily::Ring => {
            if o == 2 {
                return family_cns(CnsFamily::Kite, 2);
            }
            let rows: Vec<u32> = (0..o)
                .map(|r| {
                    let a = o - 1 - r;
                    let b = o - 1 - ((r + 1) % o);
                    (1 << a) | (1 << b)
                })
                .collect();
            CnsMatrix { q: o, rows }
        }
        CnsFamily::Kite => {
            if !o.is_multiple_of(2) {
                return Err(CnsError::KiteOddO { o });
            }
            let full = (1u32 << o) - 1;
            CnsMatrix { q: o, rows: vec![full, full] }
        }
    };
    debug_assert!(verify_cns(&matrix).legal);
    debug_assert!(cns_critical(&matrix).critical);
    Ok(matrix)
}

/// Even-weight (>= 2) row patterns over `o` columns, ascending.
fn row_patterns(o: usize) -> Vec<u32> {
    (3..(1u32 << o)).filter(|p| p.count_ones() >= 2 && p.count_ones() % 2 == 0).collect()
}

/// Enumerates the representative critical CNSs with exactly `o` columns,
/// up to row and column permutations, in canonical order.
///
/// Generation: strictly increasing even-weight rows with the final row
/// forced as the column-parity closure; the first row is normalized to the
/// compact pattern I..IO..O and no later row is lighter (the canonical
/// member of every class satisfies both). R = 2 is the Kite special case,
/// the only critical CNS with duplicate rows.
pub fn enumerate_cns(o: usize, budget: &Budget) -> Result<Vec<CnsMatrix>, CnsError> {
    if o < 2 {
        return Err(CnsError::Empty);
    }
    if o > MAX_CNS_COLUMNS {
        return Err(CnsError::TooManyColumns { o });
    }
    let meter = budget.start();
    let patterns = row_patterns(o);
    let full = (1u32 << o) - 1;

    let mut by_canon: BTreeMap<Vec<u32>, CnsMatrix> = BTreeMap::new();
    if o.is_multiple_of(2) {
        let kite = CnsMatrix { q: o, rows: vec![full, full] };
        by_canon.insert(kite.canonical().rows, kite);
    }

    // First rows: compact patterns with their O's in the trailing columns.
    // Parallelize over (first, second) row pairs.
    let first_rows: Vec<u32> = (1..=o / 2).map(|w| (1u32 << (2 * w)) - 1).collect();
    let mut tasks: Vec<(u32, u32)> = Vec::new();
    for &r1 in &first_rows {
        for &r2 in patterns.iter().filter(|&&p| p > r1 && p.count_ones() >= r1.count_ones()) {
            tasks.push((r1, r2));
        }
    }

    let found: Result<Vec<Vec<CnsMatrix>>, BudgetError> = tasks
        .par_iter()
        .map(|&(r1, r2)| {
            let mut hits = Vec::new();
            let min_weight = r1.count_ones();
            let mut chosen = vec![r1, r2];
            search_cns(
                o,
                &patterns,
                min_weight,
                full,
                &mut chosen,
                r1 ^ r2,
                r1 | r2,
                &meter,
                &mut hits,
            )?;
            Ok(hits)
        })
        .collect();

    for hit in found.map_err(CnsError::Budget)?.into_iter().flatten() {
        by_canon.entry(hit.canonical().rows).or_insert(hit);
    }

    Ok(by_canon
        .into_iter()
        .map(|(rows, m)| {
            let canon = CnsMatrix { q: m.q, rows };
            debug_assert!(verify_cns(&canon).legal && cns_critical(&canon).critical);
            canon
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn search_cns(
    o: usize,
    patterns: &[u32],
    min_weight: u32,
    full: u32,
    chosen: &mut Vec<u32>,
    xor_acc: u32,
    or_acc: u32,
    meter: &crate::budget::BudgetMeter<'_>,
    hits: &mut Vec<CnsMatrix>,
) -> Result<(), BudgetError> {
    meter.tick(1)?;
    let last = *chosen.last().unwrap();
    // Try closing with the forced row.
    if chosen.len() >= 2 {
        let forced = xor_acc;
        if forced > last
            && forced.count_ones() >= min_weight
            && (or_acc | forced) == full
            && forced.count_ones().is_multiple_of(2)
        {
            let mut rows = chosen.clone();
            rows.push(forced);
            if rank_is_r_minus_one(&rows) {
                hits.push(CnsMatrix { q: o, rows });
            }
        }
    }
    if chosen.len() >= o {
        // R - 1 <= o since a critical CNS has GF(2) rank R - 1 <= o.
        return Ok(());
    }
    let start = patterns.partition_point(|&p| p <= last);
    for &next in &patterns[start..] {
        if next.count_ones() < min_weight {
            continue;
        }
        chosen.push(next);
        search_cns(o, patterns, min_weight, full, chosen, xor_acc ^ next, or_acc | next, meter, hits)?;
        chosen.pop();
    }
    Ok(())
}

/// True iff the only GF(2) dependency among the rows is the full sum, i.e.
/// rank = R - 1; exactly the row-subset criticality criterion.
fn rank_is_r_minus_one(rows: &[u32]) -> bool {
    let mut basis: Vec<u32> = Vec::new();
    let mut rank = 0usize;
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            // Keep basis reduced so v^b comparison stays valid.
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
            rank += 1;
        }
    }
    rank == rows.len() - 1
}

/// Assignment of one pool ID to one CNS row.
#[derive(Debug, Clone)]
pub struct RowAssignment {
    pub pool_index: usize,
    /// Target CNS column for each Odd column of the ID, in ascending ID
    /// column order; must cover the row's O cells exactly.
    pub odd_targets: Vec<usize>,
    /// Target qubit for each non-Odd column of the ID, in ascending ID
    /// column order. Values below Q address I cells of this row; values
    /// >= Q address extra qubits.
    pub other_targets: Vec<usize>,
    pub negative: bool,
}

/// The default placement: Odd columns onto the row's O cells in order, all
/// other columns onto fresh extra qubits appended after the CNS columns in
/// row order.
pub fn auto_assignment(
    cns: &CnsMatrix,
    pool: &[IdTable],
    pool_indices: &[usize],
    negatives: &[bool],
) -> Result<Vec<RowAssignment>, CnsError> {
    let mut next_extra = cns.q();
    let mut assignments = Vec::with_capacity(cns.r());
    for row in 0..cns.r() {
        let pool_index = *pool_indices.get(row).ok_or(CnsError::BadTargets {
            row,
            reason: format!("no pool index for row {row}"),
        })?;
        let id = pool.get(pool_index).ok_or(CnsError::PoolIndex {
            index: pool_index,
            len: pool.len(),
        })?;
        let other_count = id.n() - id.odd_count();
        let other_targets: Vec<usize> = (next_extra..next_extra + other_count).collect();
        next_extra += other_count;
        assignments.push(RowAssignment {
            pool_index,
            odd_targets: cns.o_columns(row),
            other_targets,
            negative: *negatives.get(row).unwrap_or(&false),
        });
    }
    Ok(assignments)
}

/// Instantiates an NKS set from a CNS and a pool of odd-critical IDs.
///
/// Each assigned ID is placed with its Odd columns on the row's O cells and
/// its remaining columns on I cells or extra qubits; target signs are
/// realized by reflecting the first Odd SQP (an odd letter permutation)
/// where needed. The output always satisfies the NKS parity conditions.
pub fn instantiate_nks(
    cns: &CnsMatrix,
    pool: &[IdTable],
    assignments: &[RowAssignment],
) -> Result<IdSet, CnsError> {
    if !verify_cns(cns).legal {
        return Err(CnsError::NotLegal);
    }
    if assignments.len() != cns.r() {
        return Err(CnsError::BadTargets {
            row: assignments.len().min(cns.r()),
            reason: format!("{} assignments for {} rows", assignments.len(), cns.r()),
        });
    }
    let negatives = assignments.iter().filter(|a| a.negative).count();
    if negatives % 2 == 0 {
        return Err(CnsError::EvenNegativeParity { negatives });
    }

    let total_n = assignments
        .iter()
        .flat_map(|a| a.odd_targets.iter().chain(&a.other_targets))
        .max()
        .map_or(cns.q(), |&max| (max + 1).max(cns.q()));

    let mut members = Vec::with_capacity(cns.r());
    for (row, assignment) in assignments.iter().enumerate() {
        let id = pool
            .get(assignment.pool_index)
            .ok_or(CnsError::PoolIndex { index: assignment.pool_index, len: pool.len() })?;
        match is_odd_critical(id) {
            Ok(true) => {}
            _ => return Err(CnsError::NotOddCritical { row }),
        }

        let odd_cols = id.odd_columns();
        let mut sorted_odd_targets = assignment.odd_targets.clone();
        sorted_odd_targets.sort_unstable();
        if assignment.odd_targets.len() != odd_cols.len()
            || sorted_odd_targets != cns.o_columns(row)
        {
            return Err(CnsError::OddColumnMismatch { row });
        }

        let other_cols: Vec<usize> =
            (0..id.n()).filter(|c| !odd_cols.contains(c)).collect();
        if assignment.other_targets.len() != other_cols.len() {
            return Err(CnsError::BadTargets {
                row,
                reason: format!(
                    "{} targets for {} non-Odd columns",
                    assignment.other_targets.len(),
                    other_cols.len()
                ),
            });
        }
        let mut seen = vec![false; total_n];
        for &t in assignment.odd_targets.iter().chain(&assignment.other_targets) {
            if t >= total_n || seen[t] {
                return Err(CnsError::BadTargets { row, reason: format!("target {t} reused or out of range") });
            }
            seen[t] = true;
        }
        for &t in &assignment.other_targets {
            if t < cns.q() && cns.is_o(row, t) {
                return Err(CnsError::BadTargets {
                    row,
                    reason: format!("non-Odd column placed on O cell {t}"),
                });
            }
        }

        // target[id column] = output qubit
        let mut target = vec![0usize; id.n()];
        for (i, &c) in odd_cols.iter().enumerate() {
            target[c] = assignment.odd_targets[i];
        }
        for (i, &c) in other_cols.iter().enumerate() {
            target[c] = assignment.other_targets[i];
        }

        let build = |reflect: bool| -> Result<IdTable, IdError> {
            let rows: Vec<PauliWord> = id
                .rows()
                .iter()
                .map(|word| {
                    let mut letters = vec![PauliLetter::I; total_n];
                    for (c, &t) in target.iter().enumerate() {
                        let mut letter = word.letter(c);
                        if reflect && c == odd_cols[0] {
                            letter = apply_letter_perm(REFLECTION_XY, letter);
                        }
                        letters[t] = letter;
                    }
                    PauliWord::from_letters(&letters).unwrap()
                })
                .collect();
            analyze_id(&rows)
        };

        let target_sign = if assignment.negative { Sign::Minus } else { Sign::Plus };
        let placed = build(false)?;
        let member = if placed.sign() == target_sign {
            placed
        } else {
            let reflected = build(true)?;
            debug_assert_eq!(reflected.sign(), target_sign, "reflection flips an odd SQP sign");
            reflected
        };
        members.push(member);
    }

    let set = IdSet::new(members)?;
    debug_assert!(verify_nks(&set).holds);
    Ok(set)
}
