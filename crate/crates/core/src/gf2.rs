//! GF(2) linear systems with refutation certificates.
//!
//! Rows are bit-packed. Elimination tracks, for every working row, which
//! original equations were combined into it, so an inconsistent row directly
//! yields the certificate 0 = 1 as a list of equation indices.

/// A dense GF(2) system `A x = b`.
#[derive(Debug, Clone)]
pub struct Gf2System {
    vars: usize,
    rows: Vec<Gf2Row>,
}

#[derive(Debug, Clone)]
struct Gf2Row {
    coeffs: Vec<u64>,
    rhs: bool,
    /// Combination of original equations this row currently represents.
    history: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gf2Solution {
    /// One solution; free variables are set to false.
    Feasible { assignment: Vec<bool> },
    /// Indices of original equations whose sum is 0 = 1.
    Infeasible { certificate: Vec<usize> },
}

fn words(bits: usize) -> usize {
    bits.div_ceil(64)
}

fn get_bit(v: &[u64], i: usize) -> bool {
    (v[i / 64] >> (i % 64)) & 1 == 1
}

fn set_bit(v: &mut [u64], i: usize) {
    v[i / 64] |= 1 << (i % 64);
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

impl Gf2System {
    pub fn new(vars: usize) -> Self {
        Gf2System { vars, rows: Vec::new() }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn equations(&self) -> usize {
        self.rows.len()
    }

    /// Adds the equation `sum of vars in support = rhs`. Repeated indices in
    /// `support` cancel mod 2.
    pub fn add_equation(&mut self, support: &[usize], rhs: bool) {
        let mut coeffs = vec![0u64; words(self.vars)];
        for &v in support {
            assert!(v < self.vars);
            coeffs[v / 64] ^= 1 << (v % 64);
        }
        let index = self.rows.len();
        let mut history = vec![0u64; words(index + 1)];
        set_bit(&mut history, index);
        self.rows.push(Gf2Row { coeffs, rhs, history });
    }

    /// Gaussian elimination with first-pivot selection; deterministic.
    pub fn solve(&self) -> Gf2Solution {
        let eqs = self.rows.len();
        let hist_words = words(eqs.max(1));
        let mut work: Vec<Gf2Row> = self
            .rows
            .iter()
            .map(|r| {
                let mut history = r.history.clone();
                history.resize(hist_words, 0);
                Gf2Row { coeffs: r.coeffs.clone(), rhs: r.rhs, history }
            })
            .collect();

        let mut pivot_of_row: Vec<usize> = Vec::new();
        let mut row_cursor = 0usize;
        for col in 0..self.vars {
            let Some(found) = (row_cursor..work.len()).find(|&r| get_bit(&work[r].coeffs, col))
            else {
                continue;
            };
            work.swap(row_cursor, found);
            let (pivot, rest) = work.split_at_mut(row_cursor + 1);
            let pivot = &pivot[row_cursor];
            for row in rest.iter_mut() {
                if get_bit(&row.coeffs, col) {
                    let coeffs = pivot.coeffs.clone();
                    let history = pivot.history.clone();
                    xor_into(&mut row.coeffs, &coeffs);
                    xor_into(&mut row.history, &history);
                    row.rhs ^= pivot.rhs;
                }
            }
            pivot_of_row.push(col);
            row_cursor += 1;
            if row_cursor == work.len() {
                break;
            }
        }

        // Any remaining row is all-zero in coefficients; rhs = 1 refutes.
        for row in &work[row_cursor..] {
            debug_assert!(row.coeffs.iter().all(|w| *w == 0));
            if row.rhs {
                let certificate: Vec<usize> =
                    (0..eqs).filter(|&i| get_bit(&row.history, i)).collect();
                return Gf2Solution::Infeasible { certificate };
            }
        }

        // Back-substitute; free variables default to false.
        let mut assignment = vec![false; self.vars];
        for r in (0..row_cursor).rev() {
            let col = pivot_of_row[r];
            let mut value = work[r].rhs;
            for (v, &set) in assignment.iter().enumerate().skip(col + 1) {
                if set && get_bit(&work[r].coeffs, v) {
                    value = !value;
                }
            }
            assignment[col] = value;
        }
        Gf2Solution::Feasible { assignment }
    }

    /// Rank of the coefficient matrix (ignoring right-hand sides).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self.rows.iter().map(|r| r.coeffs.clone()).collect();
        let mut rank = 0usize;
        for col in 0..self.vars {
            let Some(found) = (rank..rows.len()).find(|&r| get_bit(&rows[r], col)) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && get_bit(row, col) {
                    xor_into(row, &pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Checks an assignment against every original equation.
    pub fn satisfies(&self, assignment: &[bool]) -> bool {
        self.rows.iter().all(|row| {
            let mut lhs = false;
            for (v, &set) in assignment.iter().enumerate() {
                if set && get_bit(&row.coeffs, v) {
                    lhs = !lhs;
                }
            }
            lhs == row.rhs
        })
    }

    /// Checks that the given equations really sum to 0 = 1.
    pub fn certifies(&self, certificate: &[usize]) -> bool {
        let mut coeffs = vec![0u64; words(self.vars)];
        let mut rhs = false;
        for &i in certificate {
            xor_into(&mut coeffs, &self.rows[i].coeffs);
            rhs ^= self.rows[i].rhs;
        }
        coeffs.iter().all(|w| *w == 0) && rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_system() {
        let mut sys = Gf2System::new(3);
        sys.add_equation(&[0, 1], true);
        sys.add_equation(&[1, 2], false);
        match sys.solve() {
            Gf2Solution::Feasible { assignment } => assert!(sys.satisfies(&assignment)),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut sys = Gf2System::new(2);
        sys.add_equation(&[0, 1], true);
        sys.add_equation(&[0], false);
        sys.add_equation(&[1], false);
        match sys.solve() {
            Gf2Solution::Infeasible { certificate } => {
                assert!(sys.certifies(&certificate));
                assert_eq!(certificate, vec![0, 1, 2]);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_support_cancels() {
        let mut sys = Gf2System::new(2);
        sys.add_equation(&[0, 0, 1], true); // same as [1] = 1
        match sys.solve() {
            Gf2Solution::Feasible { assignment } => {
                assert!(!assignment[0]);
                assert!(assignment[1]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn empty_equation_refutes() {
        let mut sys = Gf2System::new(1);
        sys.add_equation(&[], true);
        assert_eq!(sys.solve(), Gf2Solution::Infeasible { certificate: vec![0] });
    }
}
