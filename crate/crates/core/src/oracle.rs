//! Independent dense-matrix verification for small qubit counts.
//!
//! Everything here works on explicit 2^n x 2^n complex matrices (n <= 5) and
//! deliberately avoids the symplectic code paths, so it can serve as an
//! oracle for product signs, joint eigenprojector ranks, and entanglement
//! checks. Quantities are sums of exact dyadic entries, so the 1e-9
//! tolerance is far looser than any honest rounding error.

use num_complex::Complex64;
use thiserror::Error;

use crate::id::IdTable;
use crate::pauli::{PauliLetter, PauliWord, PhaseExponent, Sign};

/// Dense oracle hard cap: 32 x 32 complex matrices.
pub const MAX_ORACLE_QUBITS: usize = 5;

/// Numerical tolerance for idempotence, purity, and identity checks.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq, Clone)]
pub enum OracleError {
    #[error("{n} qubits exceeds the dense-oracle cap of {MAX_ORACLE_QUBITS}")]
    TooLarge { n: usize },
    #[error("matrix product is not proportional to the identity")]
    NotIdentity,
    #[error("matrix is not a projector")]
    NotProjector,
    #[error("outcome count {got} does not match row count {want}")]
    OutcomeCount { got: usize, want: usize },
}

/// A square complex matrix of dimension 2^n, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += v;
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> DenseOperator {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let (da, db) = (self.dim, other.dim);
        let mut out = Self::zeros(da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k, j * db + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let squared = self.mul(self);
        self.data
            .iter()
            .zip(&squared.data)
            .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Distance to i^k * I, or `None` if no k in 0..4 fits.
    pub fn identity_phase(&self, tol: f64) -> Option<PhaseExponent> {
        'phase: for k in 0u8..4 {
            let factor = Complex64::i().powu(k as u32);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let want = if i == j { factor } else { Complex64::ZERO };
                    if (self[(i, j)] - want).norm() > tol {
                        continue 'phase;
                    }
                }
            }
            return Some(PhaseExponent::new(k));
        }
        None
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

fn letter_matrix(letter: PauliLetter) -> DenseOperator {
    let mut m = DenseOperator::zeros(2);
    match letter {
        PauliLetter::I => {
            m[(0, 0)] = Complex64::ONE;
            m[(1, 1)] = Complex64::ONE;
        }
        PauliLetter::X => {
            m[(0, 1)] = Complex64::ONE;
            m[(1, 0)] = Complex64::ONE;
        }
        PauliLetter::Y => {
            m[(0, 1)] = -Complex64::i();
            m[(1, 0)] = Complex64::i();
        }
        PauliLetter::Z => {
            m[(0, 0)] = Complex64::ONE;
            m[(1, 1)] = -Complex64::ONE;
        }
    }
    m
}

/// Tensor product of the standard 2x2 letter matrices, qubit 1 as the
/// leftmost (most significant) factor.
pub fn word_to_matrix(word: &PauliWord) -> Result<DenseOperator, OracleError> {
    if word.n() > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { n: word.n() });
    }
    let mut m = letter_matrix(word.letter(0));
    for q in 1..word.n() {
        m = m.kron(&letter_matrix(word.letter(q)));
    }
    Ok(m)
}

/// Multiplies the dense matrices of `rows` in order and returns k such that
/// the product equals i^k * I.
pub fn product_sign_oracle(rows: &[PauliWord]) -> Result<PhaseExponent, OracleError> {
    assert!(!rows.is_empty(), "empty row list");
    let n = rows[0].n();
    if n > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { n });
    }
    let mut product = DenseOperator::identity(1 << n);
    for row in rows {
        product = product.mul(&word_to_matrix(row)?);
    }
    product.identity_phase(TOLERANCE).ok_or(OracleError::NotIdentity)
}

/// Joint eigenprojector Prod_m (I + lambda_m A_m)/2 for the rows of `id`.
///
/// Inconsistent outcomes yield the zero matrix; the flag in the result
/// distinguishes that from a genuine projector.
pub struct JointProjector {
    pub projector: DenseOperator,
    pub rank: usize,
    pub zero: bool,
}

pub fn joint_projectors(id: &IdTable, outcomes: &[Sign]) -> Result<JointProjector, OracleError> {
    let n = id.n();
    if n > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { n });
    }
    if outcomes.len() != id.m() {
        return Err(OracleError::OutcomeCount { got: outcomes.len(), want: id.m() });
    }
    let dim = 1 << n;
    let mut projector = DenseOperator::identity(dim);
    for (row, outcome) in id.rows().iter().zip(outcomes) {
        let signed = word_to_matrix(row)?.scale(Complex64::new(outcome.as_f64(), 0.0));
        let factor = DenseOperator::identity(dim).add(&signed).scale(Complex64::new(0.5, 0.0));
        projector = projector.mul(&factor);
    }
    let trace = projector.trace();
    let rank = trace.re.round() as usize;
    let zero = rank == 0;
    debug_assert!((trace.re - rank as f64).abs() < TOLERANCE && trace.im.abs() < TOLERANCE);
    Ok(JointProjector { projector, rank, zero })
}

/// All outcome vectors consistent with the ID sign (product of outcomes
/// equals the sign), in a fixed order. Vectors that contradict internal row
/// dependencies still appear; their projectors are zero and flagged.
pub fn consistent_outcomes(id: &IdTable) -> Vec<Vec<Sign>> {
    let m = id.m();
    let mut out = Vec::new();
    for bits in 0..(1u32 << (m - 1)) {
        let mut outcomes: Vec<Sign> = (0..m - 1)
            .map(|i| if (bits >> i) & 1 == 1 { Sign::Minus } else { Sign::Plus })
            .collect();
        let partial = outcomes
            .iter()
            .fold(Sign::Plus, |acc, s| acc.combine(*s));
        // Last outcome forced so the product matches the ID sign.
        outcomes.push(partial.combine(id.sign()));
        out.push(outcomes);
    }
    out
}

/// Partial trace over the qubits NOT in `keep` (0-based, ascending).
pub fn partial_trace(op: &DenseOperator, n: usize, keep: &[usize]) -> DenseOperator {
    assert_eq!(op.dim(), 1 << n);
    let kept = keep.len();
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let mut out = DenseOperator::zeros(1 << kept);
    // Qubit q occupies bit position (n - 1 - q) of a basis index.
    let bit = |q: usize| n - 1 - q;
    for ka in 0..(1usize << kept) {
        for kb in 0..(1usize << kept) {
            let mut acc = Complex64::ZERO;
            for t in 0..(1usize << traced.len()) {
                let mut row = 0usize;
                let mut col = 0usize;
                for (i, &q) in keep.iter().enumerate() {
                    row |= ((ka >> (kept - 1 - i)) & 1) << bit(q);
                    col |= ((kb >> (kept - 1 - i)) & 1) << bit(q);
                }
                for (i, &q) in traced.iter().enumerate() {
                    let b = (t >> i) & 1;
                    row |= b << bit(q);
                    col |= b << bit(q);
                }
                acc += op[(row, col)];
            }
            out[(ka, kb)] = acc;
        }
    }
    out
}

/// Purity Tr(rho^2) of a normalized reduced state.
pub fn purity(rho: &DenseOperator) -> f64 {
    rho.mul(rho).trace().re
}

fn bipartitions(n: usize) -> Vec<Vec<usize>> {
    // Proper bipartitions up to complement: enumerate subsets containing
    // qubit 0 that are not the full set.
    let mut out = Vec::new();
    for bits in 0..(1u32 << (n - 1)) {
        let subset: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|q| (bits >> (q - 1)) & 1 == 1))
            .collect();
        if subset.len() < n {
            out.push(subset);
        }
    }
    out
}

/// Deterministic pseudo-random stream for subspace sampling (SplitMix64).
pub struct SampleRng(u64);

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        SampleRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [0, bound).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }
}

/// Number of states sampled from the range of a rank > 1 projector.
pub const ENTANGLEMENT_SAMPLES: usize = 8;

/// Fixed seed for the rank > 1 sampling; documented so runs are reproducible.
pub const ENTANGLEMENT_SEED: u64 = 0x0001_d50f_5eed;

/// Checks that the states supported by `p` have all n qubits inseparably
/// entangled.
///
/// For rank-1 projectors: every single-qubit reduced state must be maximally
/// mixed (the smallest subsystems carry no local information) and no proper
/// bipartition may factorize (smaller-side purity below 1 - [`TOLERANCE`]).
/// Uniform mixedness on larger cuts is not required; no 4-qubit state
/// achieves it across two-qubit cuts. For rank r > 1 the check samples
/// [`ENTANGLEMENT_SAMPLES`] states from the range (deterministic seed) and
/// requires each to be entangled across every bipartition in the same
/// purity sense.
pub fn max_entanglement_check(p: &DenseOperator, n: usize) -> Result<bool, OracleError> {
    if n > MAX_ORACLE_QUBITS {
        return Err(OracleError::TooLarge { n });
    }
    if !p.is_projector(TOLERANCE) {
        return Err(OracleError::NotProjector);
    }
    let rank = p.trace().re.round() as usize;
    if rank == 0 {
        return Err(OracleError::NotProjector);
    }
    if rank == 1 {
        let rho = p.clone();
        for q in 0..n {
            let reduced = partial_trace(&rho, n, &[q]);
            for i in 0..2 {
                for j in 0..2 {
                    let want =
                        if i == j { Complex64::new(0.5, 0.0) } else { Complex64::ZERO };
                    if (reduced[(i, j)] - want).norm() > TOLERANCE {
                        return Ok(false);
                    }
                }
            }
        }
        for part in bipartitions(n) {
            let small = if part.len() * 2 <= n {
                part.clone()
            } else {
                (0..n).filter(|q| !part.contains(q)).collect()
            };
            let reduced = partial_trace(&rho, n, &small);
            if purity(&reduced) >= 1.0 - TOLERANCE {
                return Ok(false);
            }
        }
        return Ok(true);
    }

    let mut rng = SampleRng::new(ENTANGLEMENT_SEED);
    for _ in 0..ENTANGLEMENT_SAMPLES {
        let state = sample_range_state(p, &mut rng);
        let rho = state_projector(&state);
        for part in bipartitions(n) {
            let reduced = partial_trace(&rho, n, &part);
            if purity(&reduced) >= 1.0 - TOLERANCE {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Projects a random vector into the range of `p` and normalizes it.
pub fn sample_range_state(p: &DenseOperator, rng: &mut SampleRng) -> Vec<Complex64> {
    let dim = p.dim();
    loop {
        let raw: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let mut projected = vec![Complex64::ZERO; dim];
        for i in 0..dim {
            for j in 0..dim {
                projected[i] += p[(i, j)] * raw[j];
            }
        }
        let norm: f64 = projected.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return projected.iter().map(|v| v / norm).collect();
        }
    }
}

pub fn state_projector(state: &[Complex64]) -> DenseOperator {
    let dim = state.len();
    let mut rho = DenseOperator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            rho[(i, j)] = state[i] * state[j].conj();
        }
    }
    rho
}

/// Applies `op` to `state`.
pub fn apply(op: &DenseOperator, state: &[Complex64]) -> Vec<Complex64> {
    let dim = op.dim();
    let mut out = vec![Complex64::ZERO; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i] += op[(i, j)] * state[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id::analyze_id;

    fn w(text: &str) -> PauliWord {
        text.parse().unwrap()
    }

    fn rows(texts: &[&str]) -> Vec<PauliWord> {
        texts.iter().map(|t| w(t)).collect()
    }

    #[test]
    fn letter_matrices() {
        let z = word_to_matrix(&w("Z")).unwrap();
        assert_eq!(z[(0, 0)], Complex64::ONE);
        assert_eq!(z[(1, 1)], -Complex64::ONE);
        assert_eq!(z[(0, 1)], Complex64::ZERO);

        let xx = word_to_matrix(&w("XX")).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { Complex64::ONE } else { Complex64::ZERO };
                assert_eq!(xx[(i, j)], want);
            }
        }

        let y = word_to_matrix(&w("Y")).unwrap();
        assert!(y.mul(&y).identity_phase(TOLERANCE) == Some(PhaseExponent::ZERO));
    }

    #[test]
    fn sign_oracle_on_fixed_tables() {
        assert_eq!(
            product_sign_oracle(&rows(&["ZZ", "XX", "YY"])).unwrap(),
            PhaseExponent::new(2)
        );
        assert_eq!(
            product_sign_oracle(&rows(&["ZZI", "ZIZ", "XXX", "XYY"])).unwrap(),
            PhaseExponent::new(2)
        );
        assert_eq!(
            product_sign_oracle(&rows(&["ZI", "IZ", "ZZ"])).unwrap(),
            PhaseExponent::new(0)
        );
        assert_eq!(product_sign_oracle(&rows(&["ZZ", "ZX"])), Err(OracleError::NotIdentity));
    }

    #[test]
    fn sign_oracle_matches_word_product_chain() {
        // Exhaustive over all pairs (a, b) with product phase, n = 2: the
        // chained symbolic product of [a, b, a*b] must match the dense
        // product of the same three words.
        for a_code in 1..16u64 {
            for b_code in 1..16u64 {
                let a = PauliWord::from_bits(2, a_code & 3, a_code >> 2).unwrap();
                let b = PauliWord::from_bits(2, b_code & 3, b_code >> 2).unwrap();
                let (k, c) = crate::pauli::word_product(&a, &b).unwrap();
                if c.is_identity() {
                    continue;
                }
                let list = [a, b, c];
                // product of a*b*c = i^k * c * c = i^k I
                let dense = product_sign_oracle(&list).unwrap();
                assert_eq!(dense, k, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn bell_projector_is_rank_one_and_maximally_entangled() {
        let id = analyze_id(&rows(&["ZZ", "XX", "YY"])).unwrap();
        let jp = joint_projectors(&id, &[Sign::Plus, Sign::Plus, Sign::Minus]).unwrap();
        assert_eq!(jp.rank, 1);
        assert!(!jp.zero);
        assert!(max_entanglement_check(&jp.projector, 2).unwrap());
    }

    #[test]
    fn inconsistent_outcomes_yield_zero() {
        let id = analyze_id(&rows(&["ZZ", "XX", "YY"])).unwrap();
        // Product of outcomes (+,+,+) = +1 but the ID sign is -1.
        let jp = joint_projectors(&id, &[Sign::Plus, Sign::Plus, Sign::Plus]).unwrap();
        assert!(jp.zero);
        assert_eq!(jp.rank, 0);
    }

    #[test]
    fn resolution_of_identity() {
        let id = analyze_id(&rows(&["ZZI", "ZIZ", "XXX", "XYY"])).unwrap();
        let mut total = DenseOperator::zeros(8);
        for outcomes in consistent_outcomes(&id) {
            total = total.add(&joint_projectors(&id, &outcomes).unwrap().projector);
        }
        assert_eq!(total.identity_phase(TOLERANCE), Some(PhaseExponent::ZERO));
    }

    #[test]
    fn ghz_projector_entangled_product_state_not() {
        let ghz = analyze_id(&rows(&["ZZZ", "ZXX", "XZX", "XXZ"])).unwrap();
        let jp = joint_projectors(&ghz, &consistent_outcomes(&ghz)[0]).unwrap();
        assert_eq!(jp.rank, 1);
        assert!(max_entanglement_check(&jp.projector, 3).unwrap());

        // Product eigenstate of {ZZZZ, XXXX, YYYY} across {1,2}|{3,4}:
        // (Bell state on 1,2) x (Bell state on 3,4).
        let bell = analyze_id(&rows(&["ZZ", "XX", "YY"])).unwrap();
        let b = joint_projectors(&bell, &[Sign::Plus, Sign::Plus, Sign::Minus]).unwrap();
        let product = b.projector.kron(&b.projector);
        assert!(product.is_projector(TOLERANCE));
        assert!(!max_entanglement_check(&product, 4).unwrap());
        let reduced = partial_trace(&product, 4, &[0, 1]);
        assert!(purity(&reduced) >= 1.0 - TOLERANCE);
    }

    #[test]
    fn partial_trace_of_identity() {
        let rho = DenseOperator::identity(8).scale(Complex64::new(1.0 / 8.0, 0.0));
        let reduced = partial_trace(&rho, 3, &[1]);
        assert!((reduced[(0, 0)].re - 0.5).abs() < TOLERANCE);
        assert!((reduced.trace().re - 1.0).abs() < TOLERANCE);
    }
}
