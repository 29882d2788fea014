//! Small dense symmetric matrices and totally symmetric cubic tensors.
//!
//! Model dimensions here are tiny (N = 2 for the Gaussian, user-chosen for
//! the quadratic model), so everything is heap-allocated dense storage on
//! top of `nalgebra` with no attempt at sparsity.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{IgError, Result};

/// A symmetric real matrix, stored exactly symmetric.
///
/// Construction either mirrors the lower triangle ([`SymMatrix::from_fn`])
/// or rejects input that is not bitwise symmetric ([`SymMatrix::from_rows`]),
/// so `m[(i, j)] == m[(j, i)]` holds exactly for every instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds from a generator evaluated only on `i <= j`; the lower
    /// triangle is mirrored, so symmetry is exact by construction.
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        SymMatrix { data }
    }

    /// Builds from row data, requiring exact symmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(IgError::InvalidInput(format!(
                "matrix rows must all have length {n}"
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(IgError::InvalidInput(format!(
                        "matrix not symmetric at ({i},{j}): {} vs {}",
                        rows[i][j], rows[j][i]
                    )));
                }
            }
        }
        Ok(SymMatrix {
            data: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        })
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.data * v
    }

    /// u · M v.
    pub fn quad(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.data * v))
    }

    /// Cholesky factorization; `None` when the matrix is not positive
    /// definite. This is the positive-definiteness test used everywhere.
    pub fn cholesky(&self) -> Option<Cholesky<f64, Dyn>> {
        Cholesky::new(self.data.clone())
    }

    pub fn try_inverse(&self) -> Option<SymMatrix> {
        let inv = self.data.clone().try_inverse()?;
        // Symmetrize: inversion of a symmetric matrix is symmetric up to
        // rounding, and the type promises exact symmetry.
        Some(SymMatrix::from_fn(self.dim(), |i, j| {
            0.5 * (inv[(i, j)] + inv[(j, i)])
        }))
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        (&self.data - &other.data).abs().max()
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            data: &self.data * s,
        }
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        SymMatrix {
            data: &self.data + &other.data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }
}

/// Totally symmetric rank-3 tensor, dense N³ storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicTensor {
    n: usize,
    data: Vec<f64>,
}

impl CubicTensor {
    pub fn zeros(n: usize) -> Self {
        CubicTensor {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    /// Builds from a generator evaluated once per canonical index triple
    /// `i <= j <= k`; all permutations receive the same value, so total
    /// symmetry is exact by construction.
    pub fn from_fn_sym<F: FnMut(usize, usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut t = CubicTensor::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    t.set_sym(i, j, k, f(i, j, k));
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    /// Writes `v` into every permutation of `(i, j, k)`.
    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, v: f64) {
        for (a, b, c) in [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ] {
            let id = self.idx(a, b, c);
            self.data[id] = v;
        }
    }

    /// Contraction over the last two slots: `w_i = T_ijk u^j v^k`.
    pub fn contract2(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |i, _| {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += self.get(i, j, k) * u[j] * v[k];
                }
            }
            s
        })
    }

    pub fn scale(&self, s: f64) -> CubicTensor {
        CubicTensor {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest deviation from total symmetry over all permutations;
    /// zero for every tensor built through the symmetric constructors.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    for w in [self.get(i, k, j), self.get(j, i, k), self.get(k, j, i)] {
                        worst = worst.max((v - w).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &CubicTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Max-norm of `a*b - I`, the inverse-pair defect used in metric checks.
pub fn inverse_pair_defect(a: &SymMatrix, b: &SymMatrix) -> f64 {
    let prod = a.as_matrix() * b.as_matrix();
    let n = a.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_from_fn_is_exactly_symmetric() {
        let m = SymMatrix::from_fn(3, |i, j| (i * 7 + j) as f64 * 0.1);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn sym_from_rows_rejects_asymmetry() {
        let bad = vec![vec![1.0, 2.0], vec![2.5, 1.0]];
        assert!(SymMatrix::from_rows(&bad).is_err());
        let good = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(SymMatrix::from_rows(&good).is_ok());
    }

    #[test]
    fn cholesky_detects_indefiniteness() {
        let spd = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(spd.cholesky().is_some());
        let indef = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(indef.cholesky().is_none());
    }

    #[test]
    fn inverse_pair_defect_small_for_true_inverse() {
        let m = SymMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = m.try_inverse().unwrap();
        assert!(inverse_pair_defect(&m, &inv) < 1e-14);
    }

    #[test]
    fn cubic_permutation_symmetry_exact() {
        let t = CubicTensor::from_fn_sym(3, |i, j, k| (i + 2 * j + 4 * k) as f64 / 3.0);
        assert_eq!(t.max_asymmetry(), 0.0);
    }

    #[test]
    fn cubic_contract2() {
        let mut t = CubicTensor::zeros(2);
        t.set_sym(0, 0, 1, 2.0);
        let u = DVector::from_vec(vec![1.0, 1.0]);
        // w_0 = T_001 + T_010 = 4, w_1 = T_100 = 2
        let w = t.contract2(&u, &u);
        assert_eq!(w[0], 4.0);
        assert_eq!(w[1], 2.0);
    }
}
