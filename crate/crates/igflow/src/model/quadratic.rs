//! Quadratic potential Ψ(θ) = ½ θᵀQθ with SPD Q.
//!
//! With Q = I the model is self-dual (η = θ, metric = identity, cubic
//! tensor = 0), which makes it the simplest end-to-end test bed.

use nalgebra::DVector;

use crate::error::{IgError, Result};
use crate::linalg::{CubicTensor, SymMatrix};

use super::DuallyFlatModel;

#[derive(Debug, Clone)]
pub struct QuadraticModel {
    q: SymMatrix,
    q_inv: SymMatrix,
    name: String,
}

impl QuadraticModel {
    pub fn new(q: SymMatrix) -> Result<Self> {
        if q.cholesky().is_none() {
            return Err(IgError::InvalidInput(
                "quadratic model needs a symmetric positive definite Q".into(),
            ));
        }
        let q_inv = q
            .try_inverse()
            .ok_or_else(|| IgError::InvalidInput("Q is not invertible".into()))?;
        Ok(QuadraticModel {
            q,
            q_inv,
            name: "quadratic".to_string(),
        })
    }

    /// Q = identity of the given dimension.
    pub fn identity(dim: usize) -> Self {
        QuadraticModel::new(SymMatrix::identity(dim)).expect("identity is SPD")
    }

    pub fn q(&self) -> &SymMatrix {
        &self.q
    }
}

impl DuallyFlatModel for QuadraticModel {
    fn dim(&self) -> usize {
        self.q.dim()
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn domain_theta(&self, theta: &DVector<f64>) -> bool {
        theta.len() == self.dim() && theta.iter().all(|x| x.is_finite())
    }

    fn domain_eta(&self, eta: &DVector<f64>) -> bool {
        eta.len() == self.dim() && eta.iter().all(|x| x.is_finite())
    }

    fn psi(&self, theta: &DVector<f64>) -> f64 {
        0.5 * self.q.quad(theta, theta)
    }

    fn grad_psi(&self, theta: &DVector<f64>) -> DVector<f64> {
        self.q.mul_vec(theta)
    }

    fn hess_psi(&self, _theta: &DVector<f64>) -> SymMatrix {
        self.q.clone()
    }

    fn third_psi(&self, _theta: &DVector<f64>) -> CubicTensor {
        CubicTensor::zeros(self.dim())
    }

    fn newton_seed(&self, eta: &DVector<f64>) -> Option<DVector<f64>> {
        Some(self.q_inv.mul_vec(eta))
    }

    fn psi_dual(&self, eta: &DVector<f64>) -> Result<f64> {
        Ok(0.5 * self.q_inv.quad(eta, eta))
    }

    fn grad_psi_dual(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.q_inv.mul_vec(eta))
    }

    fn hess_psi_dual(&self, _eta: &DVector<f64>) -> Result<SymMatrix> {
        Ok(self.q_inv.clone())
    }

    fn third_psi_dual(&self, _eta: &DVector<f64>) -> Result<CubicTensor> {
        Ok(CubicTensor::zeros(self.dim()))
    }
}
