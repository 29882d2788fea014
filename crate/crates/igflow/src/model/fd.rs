//! Central finite differences for scalar functions of a coordinate vector.
//!
//! Step sizes follow the usual truncation/round-off balance:
//! `h = eps^(1/3) (1 + |x_i|)` for first and second derivatives and
//! `eps^(1/4)` scaling for third derivatives.

use nalgebra::DVector;

use crate::error::Result;
use crate::linalg::{CubicTensor, SymMatrix};

pub fn step_h1(x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / 3.0) * (1.0 + x.abs())
}

pub fn step_h3(x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / 4.0) * (1.0 + x.abs())
}

fn shifted(x: &DVector<f64>, i: usize, d: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[i] += d;
    y
}

/// Central-difference gradient.
pub fn grad_fd<F>(f: &F, x: &DVector<f64>) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> Result<f64> + ?Sized,
{
    let n = x.len();
    let mut g = DVector::zeros(n);
    for i in 0..n {
        let h = step_h1(x[i]);
        g[i] = (f(&shifted(x, i, h))? - f(&shifted(x, i, -h))?) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian (symmetrized).
pub fn hess_fd<F>(f: &F, x: &DVector<f64>) -> Result<SymMatrix>
where
    F: Fn(&DVector<f64>) -> Result<f64> + ?Sized,
{
    let n = x.len();
    let f0 = f(x)?;
    let mut vals = vec![vec![0.0; n]; n];
    for i in 0..n {
        let hi = step_h1(x[i]);
        vals[i][i] = (f(&shifted(x, i, hi))? - 2.0 * f0 + f(&shifted(x, i, -hi))?) / (hi * hi);
        for j in (i + 1)..n {
            let hj = step_h1(x[j]);
            let pp = f(&shifted(&shifted(x, i, hi), j, hj))?;
            let pm = f(&shifted(&shifted(x, i, hi), j, -hj))?;
            let mp = f(&shifted(&shifted(x, i, -hi), j, hj))?;
            let mm = f(&shifted(&shifted(x, i, -hi), j, -hj))?;
            let v = (pp - pm - mp + mm) / (4.0 * hi * hj);
            vals[i][j] = v;
            vals[j][i] = v;
        }
    }
    Ok(SymMatrix::from_fn(n, |i, j| vals[i][j]))
}

/// Central-difference third-derivative tensor, built by differencing an
/// analytic-or-FD Hessian provider along each coordinate.
pub fn third_fd<H>(hess: &H, x: &DVector<f64>) -> Result<CubicTensor>
where
    H: Fn(&DVector<f64>) -> Result<SymMatrix> + ?Sized,
{
    let n = x.len();
    // d/dx_k of H_ij, symmetrized over the canonical triple afterwards.
    let mut parts: Vec<SymMatrix> = Vec::with_capacity(n);
    for k in 0..n {
        let h = step_h3(x[k]);
        let hp = hess(&shifted(x, k, h))?;
        let hm = hess(&shifted(x, k, -h))?;
        parts.push(SymMatrix::from_fn(n, |i, j| {
            (hp.get(i, j) - hm.get(i, j)) / (2.0 * h)
        }));
    }
    Ok(CubicTensor::from_fn_sym(n, |i, j, k| {
        // Average the three equivalent difference routes for symmetry.
        (parts[k].get(i, j) + parts[j].get(i, k) + parts[i].get(j, k)) / 3.0
    }))
}
