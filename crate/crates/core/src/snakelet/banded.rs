//! Symmetric positive definite pentadiagonal systems.

use alloc::vec;
use alloc::vec::Vec;

/// Symmetric pentadiagonal matrix stored by its main and two upper
/// diagonals: `main[i] = A[i][i]`, `upper1[i] = A[i][i+1]`,
/// `upper2[i] = A[i][i+2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pentadiagonal {
    pub main: Vec<f64>,
    pub upper1: Vec<f64>,
    pub upper2: Vec<f64>,
}

impl Pentadiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            main: vec![0.0; n],
            upper1: vec![0.0; n.saturating_sub(1)],
            upper2: vec![0.0; n.saturating_sub(2)],
        }
    }

    pub fn len(&self) -> usize {
        self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty()
    }

    /// Internal-force matrix `I + alpha D1'D1 + beta D2'D2` of an open
    /// chain of `n` points. `D1` holds the `n - 1` first differences and
    /// `D2` the second differences at interior points only, so rigidity
    /// vanishes at both ends.
    pub fn snake_system(n: usize, alpha: f64, beta: f64) -> Self {
        let mut m = Self::zeros(n);
        m.main.iter_mut().for_each(|d| *d = 1.0);
        for i in 0..n.saturating_sub(1) {
            m.main[i] += alpha;
            m.main[i + 1] += alpha;
            m.upper1[i] -= alpha;
        }
        for r in 1..n.saturating_sub(1) {
            m.main[r - 1] += beta;
            m.main[r] += 4.0 * beta;
            m.main[r + 1] += beta;
            m.upper1[r - 1] -= 2.0 * beta;
            m.upper1[r] -= 2.0 * beta;
            m.upper2[r - 1] += beta;
        }
        m
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            d[i][i] = self.main[i];
            if i + 1 < n {
                d[i][i + 1] = self.upper1[i];
                d[i + 1][i] = self.upper1[i];
            }
            if i + 2 < n {
                d[i][i + 2] = self.upper2[i];
                d[i + 2][i] = self.upper2[i];
            }
        }
        d
    }

    /// `L D L'` factorization. Returns `None` if a pivot is not positive,
    /// i.e. the matrix is not positive definite.
    pub fn factor(&self) -> Option<PentaFactor> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n.saturating_sub(1)];
        let mut l2 = vec![0.0; n.saturating_sub(2)];
        for i in 0..n {
            let mut di = self.main[i];
            if i >= 1 {
                di -= l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > 0.0) {
                return None;
            }
            d[i] = di;
            if i + 1 < n {
                let mut a = self.upper1[i];
                if i >= 1 {
                    a -= l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = a / di;
            }
            if i + 2 < n {
                l2[i] = self.upper2[i] / di;
            }
        }
        Some(PentaFactor { d, l1, l2 })
    }
}

/// Factor `L D L'` of a pentadiagonal SPD matrix, with unit lower
/// bidiagonal-plus-one `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct PentaFactor {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl PentaFactor {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Solves in place.
    pub fn solve(&self, rhs: &mut [f64]) {
        let n = self.d.len();
        assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] -= self.l1[i - 1] * rhs[i - 1];
            if i >= 2 {
                rhs[i] -= self.l2[i - 2] * rhs[i - 2];
            }
        }
        for i in 0..n {
            rhs[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            rhs[i] -= self.l1[i] * rhs[i + 1];
            if i + 2 < n {
                rhs[i] -= self.l2[i] * rhs[i + 2];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dense(m: &Pentadiagonal) -> DMatrix<f64> {
        let d = m.to_dense();
        let n = m.len();
        DMatrix::from_fn(n, n, |i, j| d[i][j])
    }

    #[test]
    fn assembled_matrix_matches_difference_operators() {
        // Oracle: I + alpha D1'D1 + beta D2'D2 built from explicit dense
        // difference matrices.
        for n in 2..9 {
            let (alpha, beta) = (0.3, 0.7);
            let d1 = DMatrix::from_fn(n - 1, n, |r, c| {
                if c == r {
                    -1.0
                } else if c == r + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let d2 = DMatrix::from_fn(n.saturating_sub(2), n, |r, c| match c as isize - r as isize {
                0 | 2 => 1.0,
                1 => -2.0,
                _ => 0.0,
            });
            let expect = DMatrix::<f64>::identity(n, n) + d1.transpose() * &d1 * alpha + d2.transpose() * &d2 * beta;
            let got = dense(&Pentadiagonal::snake_system(n, alpha, beta));
            assert!((expect - got).abs().max() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn solve_matches_dense_lu() {
        for n in [2, 3, 4, 7, 20] {
            let m = Pentadiagonal::snake_system(n, 0.05, 0.5);
            let rhs: Vec<f64> = (0..n).map(|i| libm::sin(i as f64 * 1.3) * 10.0).collect();
            let mut x = rhs.clone();
            m.factor().unwrap().solve(&mut x);
            let expect = dense(&m).lu().solve(&DVector::from_vec(rhs)).unwrap();
            for i in 0..n {
                assert!((x[i] - expect[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn indefinite_matrix_has_no_factor() {
        let mut m = Pentadiagonal::snake_system(4, 0.0, 0.0);
        m.main[2] = -1.0;
        assert!(m.factor().is_none());
    }
}
