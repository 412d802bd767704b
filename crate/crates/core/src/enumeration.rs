//! Exhaustive enumeration of representative critical ID classes.
//!
//! The search walks rows in the fixed word order (symmetry breaking: each
//! chosen row exceeds the previous, the first row is normalized to the
//! pattern I..IX..X and no later row has more identity letters), requires
//! the chosen rows to stay independent over GF(2), and forces the final row
//! as the product of the others. Completed grids are validated, filtered to
//! critical IDs, and deduplicated by canonical key.
//!
//! Every critical class is hit: the class member realizing the canonical
//! key has sorted rows whose first row is exactly I^a X^(n-a) with `a` the
//! maximal identity count over rows (an invariant of the class), and in a
//! critical ID every m-1 rows are independent.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::{Budget, BudgetError, BudgetMeter};
use crate::criticality::is_critical_id;
use crate::equivalence::{canonical_key, is_locally_minimal, CanonicalKey};
use crate::id::{analyze_id, IdTable};
use crate::pauli::{PauliLetter, PauliWord, Sign};

/// Enumeration is backed by per-qubit-count lookup tables of size 4^n.
pub const MAX_ENUM_QUBITS: usize = 6;

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("census needs m >= 3 and n >= 2, got m={m}, n={n}")]
    BadSizes { m: usize, n: usize },
    #[error("enumeration supports at most {MAX_ENUM_QUBITS} qubits, got {n}")]
    TooLarge { n: usize },
    #[error("budget exhausted; partial census is not authoritative")]
    BudgetExceeded { partial: Box<Census> },
    #[error("invalid ID in census stream: {0}")]
    InvalidId(#[from] crate::id::IdError),
}

/// One representative class: its canonical key and the exemplar decoded from
/// the minimized grid (so the exemplar is identical across runs and worker
/// counts).
#[derive(Debug, Clone)]
pub struct CensusClass {
    pub key: CanonicalKey,
    pub exemplar: IdTable,
}

/// Census of representative classes, grouped by the Odd-SQP count O.
///
/// Under the default sign convention, O = 0 classes count negative-sign
/// classes only; positive O = 0 classes are excluded unless
/// [`EnumOptions::include_positive_o0`] is set.
#[derive(Debug, Clone, Default)]
pub struct Census {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub counts_by_o: BTreeMap<usize, usize>,
    pub classes: Vec<CensusClass>,
    pub exhaustive: bool,
    pub include_positive_o0: bool,
    pub nodes_visited: u64,
}

impl Census {
    pub fn total_classes(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnumOptions {
    pub include_positive_o0: bool,
    pub budget: Budget,
}

/// Lookup tables for all words on n qubits, indexed by the base-4 letter
/// code (qubit 1 most significant), which is exactly the fixed word order.
struct WordTables {
    n: usize,
    count: usize,
    mask_words: usize,
    x_of: Vec<u32>,
    z_of: Vec<u32>,
    idx_of_xz: Vec<u32>,
    identity_count: Vec<u8>,
    /// commute[w] is a bitset over word indices that commute with w.
    commute: Vec<Vec<u64>>,
}

impl WordTables {
    fn build(n: usize) -> WordTables {
        let count = 1usize << (2 * n);
        let mask_words = count.div_ceil(64);
        let mut x_of = vec![0u32; count];
        let mut z_of = vec![0u32; count];
        let mut idx_of_xz = vec![0u32; count];
        let mut identity_count = vec![0u8; count];
        for idx in 0..count {
            let (mut x, mut z, mut ids) = (0u32, 0u32, 0u8);
            for q in 0..n {
                let code = (idx >> (2 * (n - 1 - q))) & 3;
                match code {
                    0 => ids += 1,
                    1 => x |= 1 << q,
                    2 => {
                        x |= 1 << q;
                        z |= 1 << q;
                    }
                    _ => z |= 1 << q,
                }
            }
            x_of[idx] = x;
            z_of[idx] = z;
            identity_count[idx] = ids;
            idx_of_xz[((x as usize) << n) | z as usize] = idx as u32;
        }
        let mut commute = vec![vec![0u64; mask_words]; count];
        for a in 0..count {
            for b in a..count {
                let cross = (x_of[a] & z_of[b]).count_ones() + (z_of[a] & x_of[b]).count_ones();
                if cross.is_multiple_of(2) {
                    commute[a][b / 64] |= 1 << (b % 64);
                    commute[b][a / 64] |= 1 << (a % 64);
                }
            }
        }
        WordTables { n, count, mask_words, x_of, z_of, idx_of_xz, identity_count, commute }
    }

    fn word(&self, idx: usize) -> PauliWord {
        PauliWord::from_bits(self.n, self.x_of[idx] as u64, self.z_of[idx] as u64).unwrap()
    }

    /// Phase increment of multiplying accumulated word (ax, az) by word b.
    fn phase_term(&self, ax: u32, az: u32, b: usize) -> u8 {
        let bx = self.x_of[b];
        let bz = self.z_of[b];
        let cx = ax ^ bx;
        let cz = az ^ bz;
        let k = (ax & az).count_ones() as i64 + (bx & bz).count_ones() as i64
            - (cx & cz).count_ones() as i64
            + 2 * (az & bx).count_ones() as i64;
        k.rem_euclid(4) as u8
    }
}

fn set_bit(mask: &mut [u64], i: usize) {
    mask[i / 64] |= 1 << (i % 64);
}

fn iter_bits(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
    mask.iter().enumerate().flat_map(|(w, &bits)| {
        let mut bits = bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            }
        })
    })
}

/// GF(2) echelon basis over packed (x | z << 32) vectors.
#[derive(Clone, Default)]
struct Gf2Basis {
    rows: Vec<u64>,
}

impl Gf2Basis {
    fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.rows {
            let lead = 63 - b.leading_zeros();
            if (v >> lead) & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    /// Returns false when v is dependent on the basis.
    fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.rows.push(r);
        true
    }

    fn pop(&mut self) {
        self.rows.pop();
    }
}

struct SearchCtx<'a> {
    tables: &'a WordTables,
    m: usize,
    include_positive_o0: bool,
    meter: &'a BudgetMeter<'a>,
    /// Words allowed after the first row (identity count bounded by the
    /// first row's).
    allowed: Vec<u64>,
}

/// A deduplication payload: the class key and the raw rows that hit it.
type ClassHit = (CanonicalKey, Vec<PauliWord>);

struct SearchState {
    chosen: Vec<usize>,
    acc_x: u32,
    acc_z: u32,
    acc_phase: u8,
    basis: Gf2Basis,
    hits: Vec<ClassHit>,
}

fn dfs(ctx: &SearchCtx<'_>, state: &mut SearchState, candidates: &[u64]) -> Result<(), BudgetError> {
    ctx.meter.tick(1)?;
    let depth = state.chosen.len();
    if depth == ctx.m - 1 {
        finish(ctx, state);
        return Ok(());
    }
    let mut next_mask = vec![0u64; ctx.tables.mask_words];
    for w in iter_bits(candidates) {
        // Independence of chosen rows; dependence cannot occur in a critical ID.
        let packed = ctx.tables.x_of[w] as u64 | ((ctx.tables.z_of[w] as u64) << 32);
        if !state.basis.insert(packed) {
            continue;
        }
        state.chosen.push(w);
        let phase = ctx.tables.phase_term(state.acc_x, state.acc_z, w);
        let (px, pz, pk) = (state.acc_x, state.acc_z, state.acc_phase);
        state.acc_x ^= ctx.tables.x_of[w];
        state.acc_z ^= ctx.tables.z_of[w];
        state.acc_phase = (state.acc_phase + phase) % 4;

        // Words after w that commute with w and satisfy the identity-count cap.
        for i in 0..next_mask.len() {
            next_mask[i] = candidates[i] & ctx.tables.commute[w][i] & ctx.allowed[i];
        }
        clear_upto(&mut next_mask, w);
        dfs(ctx, state, &next_mask)?;

        state.acc_x = px;
        state.acc_z = pz;
        state.acc_phase = pk;
        state.chosen.pop();
        state.basis.pop();
    }
    Ok(())
}

/// Clears bits 0..=w.
fn clear_upto(mask: &mut [u64], w: usize) {
    let word = w / 64;
    for item in mask.iter_mut().take(word) {
        *item = 0;
    }
    let bit = w % 64;
    if bit == 63 {
        mask[word] = 0;
    } else {
        mask[word] &= !((1u64 << (bit + 1)) - 1);
    }
}

fn finish(ctx: &SearchCtx<'_>, state: &mut SearchState) {
    let tables = ctx.tables;
    if !state.acc_phase.is_multiple_of(2) {
        return;
    }
    if state.acc_x == 0 && state.acc_z == 0 {
        return;
    }
    let forced = tables.idx_of_xz[((state.acc_x as usize) << tables.n) | state.acc_z as usize] as usize;
    // Forced row must extend the sorted order, making each ID appear exactly
    // once (the largest row of an ID is always the product of the others).
    if forced <= *state.chosen.last().unwrap() {
        return;
    }

    let rows: Vec<PauliWord> =
        state.chosen.iter().map(|&w| tables.word(w)).chain([tables.word(forced)]).collect();
    let Ok(id) = analyze_id(&rows) else {
        return;
    };
    if !is_critical_id(&id).critical {
        return;
    }
    if !ctx.include_positive_o0 && id.odd_count() == 0 && id.sign() == Sign::Plus {
        return;
    }
    // Only the class member carrying the canonical key needs the full
    // canonical search; everyone else fails the cheap local-minimality test.
    if !is_locally_minimal(&id) {
        return;
    }
    state.hits.push((canonical_key(&id), rows));
}

/// First-row patterns I^a X^(n-a) for a = 0..n-1, as word indices.
fn first_row_patterns(tables: &WordTables) -> Vec<(usize, usize)> {
    let n = tables.n;
    (0..n)
        .map(|a| {
            let mut idx = 0usize;
            for q in a..n {
                idx |= 1 << (2 * (n - 1 - q));
            }
            (idx, a)
        })
        .collect()
}

/// Enumerates the representative critical ID classes for the given sizes.
pub fn enumerate_critical_ids(m: usize, n: usize, opts: &EnumOptions) -> Result<Census, EnumError> {
    if m < 3 || n < 2 {
        return Err(EnumError::BadSizes { m, n });
    }
    if n > MAX_ENUM_QUBITS {
        return Err(EnumError::TooLarge { n });
    }
    let tables = WordTables::build(n);
    let meter = opts.budget.start();

    // Parallelize over (first row pattern, second row) pairs.
    let mut tasks: Vec<(usize, usize, usize)> = Vec::new();
    for (r1, a) in first_row_patterns(&tables) {
        let max_identity = a as u8;
        for w in 0..tables.count {
            if w <= r1 || tables.identity_count[w] > max_identity {
                continue;
            }
            let commuting = (tables.commute[r1][w / 64] >> (w % 64)) & 1 == 1;
            if commuting {
                tasks.push((r1, a, w));
            }
        }
    }

    let results: Result<Vec<Vec<ClassHit>>, BudgetError> = tasks
        .par_iter()
        .map(|&(r1, a, r2)| {
            let mut allowed = vec![0u64; tables.mask_words];
            for w in 0..tables.count {
                if w > 0 && tables.identity_count[w] <= a as u8 {
                    set_bit(&mut allowed, w);
                }
            }
            let ctx = SearchCtx {
                tables: &tables,
                m,
                include_positive_o0: opts.include_positive_o0,
                meter: &meter,
                allowed,
            };
            let mut state = SearchState {
                chosen: vec![r1],
                acc_x: tables.x_of[r1],
                acc_z: tables.z_of[r1],
                acc_phase: 0,
                basis: Gf2Basis::default(),
                hits: Vec::new(),
            };
            let packed1 = tables.x_of[r1] as u64 | ((tables.z_of[r1] as u64) << 32);
            state.basis.insert(packed1);

            if m == 3 {
                // Only the second row remains before the forced one.
                let packed2 = tables.x_of[r2] as u64 | ((tables.z_of[r2] as u64) << 32);
                if state.basis.insert(packed2) {
                    state.chosen.push(r2);
                    let term = ctx.tables.phase_term(state.acc_x, state.acc_z, r2);
                    state.acc_x ^= tables.x_of[r2];
                    state.acc_z ^= tables.z_of[r2];
                    state.acc_phase = (state.acc_phase + term) % 4;
                    ctx.meter.tick(1)?;
                    finish(&ctx, &mut state);
                }
                return Ok(state.hits);
            }

            let packed2 = tables.x_of[r2] as u64 | ((tables.z_of[r2] as u64) << 32);
            if !state.basis.insert(packed2) {
                return Ok(state.hits);
            }
            state.chosen.push(r2);
            let term = ctx.tables.phase_term(state.acc_x, state.acc_z, r2);
            state.acc_x ^= tables.x_of[r2];
            state.acc_z ^= tables.z_of[r2];
            state.acc_phase = (state.acc_phase + term) % 4;

            let mut candidates = vec![0u64; tables.mask_words];
            for (i, slot) in candidates.iter_mut().enumerate() {
                *slot = tables.commute[r1][i] & tables.commute[r2][i] & ctx.allowed[i];
            }
            clear_upto(&mut candidates, r2);
            dfs(&ctx, &mut state, &candidates)?;
            Ok(state.hits)
        })
        .collect();

    let mut census = Census {
        m: Some(m),
        n: Some(n),
        exhaustive: true,
        include_positive_o0: opts.include_positive_o0,
        ..Census::default()
    };
    match results {
        Ok(hit_lists) => {
            let mut by_key: BTreeMap<CanonicalKey, Vec<PauliWord>> = BTreeMap::new();
            for (key, rows) in hit_lists.into_iter().flatten() {
                by_key.entry(key).or_insert(rows);
            }
            census.nodes_visited = meter.nodes();
            for (key, _) in by_key {
                let exemplar = exemplar_from_key(&key);
                *census.counts_by_o.entry(exemplar.odd_count()).or_insert(0) += 1;
                census.classes.push(CensusClass { key, exemplar });
            }
            Ok(census)
        }
        Err(BudgetError::Exhausted { nodes }) => {
            census.exhaustive = false;
            census.nodes_visited = nodes;
            Err(EnumError::BudgetExceeded { partial: Box::new(census) })
        }
    }
}

/// Decodes the minimized grid of a canonical key back into a validated ID.
pub fn exemplar_from_key(key: &CanonicalKey) -> IdTable {
    let rows: Vec<PauliWord> = key
        .grid()
        .iter()
        .map(|letters| PauliWord::from_letters(letters).unwrap())
        .collect();
    analyze_id(&rows).expect("canonical grid is a valid ID")
}

/// The smallest m >= 3 for which a critical ID M^N exists, certifying
/// emptiness below exhaustively. The existence check includes positive
/// O = 0 classes.
pub fn min_critical_size(n: usize, budget: &Budget) -> Result<usize, EnumError> {
    let opts = EnumOptions { include_positive_o0: true, budget: budget.clone() };
    for m in 3..=n + 1 {
        let census = enumerate_critical_ids(m, n, &opts)?;
        if census.total_classes() > 0 {
            return Ok(m);
        }
    }
    unreachable!("a complete critical ID with M = N + 1 exists for every n >= 2");
}

/// Groups already-built IDs into representative classes; order-independent.
pub fn class_census(ids: impl IntoIterator<Item = IdTable>) -> Result<Census, EnumError> {
    let mut by_key: BTreeMap<CanonicalKey, ()> = BTreeMap::new();
    let mut dims: Option<(usize, usize)> = None;
    let mut uniform = true;
    for id in ids {
        // Re-validate: the stream may come from outside.
        let id = analyze_id(id.rows())?;
        match dims {
            None => dims = Some((id.m(), id.n())),
            Some(d) if d != (id.m(), id.n()) => uniform = false,
            _ => {}
        }
        by_key.insert(canonical_key(&id), ());
    }
    let mut census = Census {
        m: if uniform { dims.map(|d| d.0) } else { None },
        n: if uniform { dims.map(|d| d.1) } else { None },
        exhaustive: true,
        include_positive_o0: true,
        ..Census::default()
    };
    for (key, ()) in by_key {
        let exemplar = exemplar_from_key(&key);
        *census.counts_by_o.entry(exemplar.odd_count()).or_insert(0) += 1;
        census.classes.push(CensusClass { key, exemplar });
    }
    Ok(census)
}

/// Slow reference enumeration with no symmetry breaking beyond sorted rows;
/// retained as an independent oracle for the pruned search (usable for
/// n <= 3 at reasonable cost).
pub fn enumerate_critical_ids_reference(
    m: usize,
    n: usize,
    opts: &EnumOptions,
) -> Result<Census, EnumError> {
    if m < 3 || n < 2 {
        return Err(EnumError::BadSizes { m, n });
    }
    if n > MAX_ENUM_QUBITS {
        return Err(EnumError::TooLarge { n });
    }
    let count = 1usize << (2 * n);
    let words: Vec<PauliWord> = (0..count)
        .map(|idx| {
            let letters: Vec<PauliLetter> = (0..n)
                .map(|q| PauliLetter::ALL[(idx >> (2 * (n - 1 - q))) & 3])
                .collect();
            PauliWord::from_letters(&letters).unwrap()
        })
        .collect();

    let meter = opts.budget.start();
    let mut by_key: BTreeMap<CanonicalKey, ()> = BTreeMap::new();
    let mut stack: Vec<usize> = Vec::new();
    collect_reference(m, count, &words, &mut stack, &mut by_key, opts, &meter).map_err(|_| {
        EnumError::BudgetExceeded {
            partial: Box::new(Census { m: Some(m), n: Some(n), ..Census::default() }),
        }
    })?;

    let mut census = Census {
        m: Some(m),
        n: Some(n),
        exhaustive: true,
        include_positive_o0: opts.include_positive_o0,
        nodes_visited: meter.nodes(),
        ..Census::default()
    };
    for (key, ()) in by_key {
        let exemplar = exemplar_from_key(&key);
        *census.counts_by_o.entry(exemplar.odd_count()).or_insert(0) += 1;
        census.classes.push(CensusClass { key, exemplar });
    }
    Ok(census)
}

fn collect_reference(
    m: usize,
    count: usize,
    words: &[PauliWord],
    stack: &mut Vec<usize>,
    by_key: &mut BTreeMap<CanonicalKey, ()>,
    opts: &EnumOptions,
    meter: &BudgetMeter<'_>,
) -> Result<(), BudgetError> {
    if stack.len() == m {
        meter.tick(1)?;
        let rows: Vec<PauliWord> = stack.iter().map(|&i| words[i]).collect();
        if let Ok(id) = analyze_id(&rows) {
            if is_critical_id(&id).critical
                && (opts.include_positive_o0 || id.odd_count() > 0 || id.sign() == Sign::Minus)
            {
                by_key.insert(canonical_key(&id), ());
            }
        }
        return Ok(());
    }
    let start = stack.last().map_or(1, |&w| w + 1);
    for w in start..count {
        meter.tick(1)?;
        stack.push(w);
        collect_reference(m, count, words, stack, by_key, opts, meter)?;
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_census() {
        let census = enumerate_critical_ids(3, 2, &EnumOptions::default()).unwrap();
        assert_eq!(census.counts_by_o, BTreeMap::from([(2, 1)]));
        let exemplar = &census.classes[0].exemplar;
        assert!(is_critical_id(exemplar).critical);
        assert_eq!(exemplar.m(), 3);
    }

    #[test]
    fn three_qubit_census() {
        let census = enumerate_critical_ids(4, 3, &EnumOptions::default()).unwrap();
        assert_eq!(census.counts_by_o, BTreeMap::from([(0, 1), (2, 1)]));
    }

    #[test]
    fn no_critical_id3_on_three_qubits() {
        let census = enumerate_critical_ids(3, 3, &EnumOptions::default()).unwrap();
        assert_eq!(census.total_classes(), 0);
    }

    #[test]
    fn agrees_with_reference_search() {
        for (m, n) in [(3, 2), (4, 2), (3, 3), (4, 3)] {
            let fast = enumerate_critical_ids(m, n, &EnumOptions::default()).unwrap();
            let slow = enumerate_critical_ids_reference(m, n, &EnumOptions::default()).unwrap();
            assert_eq!(fast.counts_by_o, slow.counts_by_o, "m={m} n={n}");
            let fast_keys: Vec<_> = fast.classes.iter().map(|c| c.key.clone()).collect();
            let slow_keys: Vec<_> = slow.classes.iter().map(|c| c.key.clone()).collect();
            assert_eq!(fast_keys, slow_keys, "m={m} n={n}");
        }
    }

    #[test]
    fn agrees_with_reference_search_inclusive() {
        // Same cross-check with positive O = 0 classes counted.
        let opts = EnumOptions { include_positive_o0: true, budget: Budget::unlimited() };
        for (m, n) in [(3, 2), (4, 2), (3, 3)] {
            let fast = enumerate_critical_ids(m, n, &opts).unwrap();
            let slow = enumerate_critical_ids_reference(m, n, &opts).unwrap();
            assert_eq!(fast.counts_by_o, slow.counts_by_o, "m={m} n={n}");
        }
    }

    #[test]
    fn min_size_small() {
        let budget = Budget::unlimited();
        assert_eq!(min_critical_size(2, &budget).unwrap(), 3);
        assert_eq!(min_critical_size(3, &budget).unwrap(), 4);
    }

    #[test]
    fn census_dedups_duplicates() {
        let census = enumerate_critical_ids(3, 2, &EnumOptions::default()).unwrap();
        let exemplar = census.classes[0].exemplar.clone();
        let stream = vec![exemplar.clone(), exemplar];
        let grouped = class_census(stream).unwrap();
        assert_eq!(grouped.total_classes(), 1);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let opts = EnumOptions { include_positive_o0: false, budget: Budget::nodes(5) };
        match enumerate_critical_ids(4, 3, &opts) {
            Err(EnumError::BudgetExceeded { partial }) => assert!(!partial.exhaustive),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn bad_sizes_rejected() {
        assert!(matches!(
            enumerate_critical_ids(2, 2, &EnumOptions::default()),
            Err(EnumError::BadSizes { .. })
        ));
    }
}
