//! The two-parameter Gaussian family in natural coordinates.
//!
//! Coordinates: θ¹ = μ/σ², θ² = −1/(2σ²) and η₁ = μ, η₂ = μ² + σ², with
//! domain θ² < 0, equivalently η₂ − η₁² > 0. The potential is the
//! log-normalizer of the family,
//!
//! ```text
//! Ψ(θ) = −(θ¹)²/(4θ²) + ½ ln(−π/θ²),
//! ```
//!
//! and its Legendre dual is the negative differential entropy
//! Ψ*(η) = −½ ln(2πe(η₂ − η₁²)). Both sides carry analytic first, second
//! and third derivatives.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{IgError, Result};
use crate::linalg::{CubicTensor, SymMatrix};

use super::DuallyFlatModel;

#[derive(Debug, Clone, Default)]
pub struct GaussianModel;

impl GaussianModel {
    pub fn new() -> Self {
        GaussianModel
    }

    /// θ-coordinates of N(μ, σ²).
    pub fn theta_from_mu_sigma(mu: f64, sigma: f64) -> Result<DVector<f64>> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(IgError::InvalidInput(format!(
                "need finite μ and σ > 0, got μ={mu}, σ={sigma}"
            )));
        }
        let s2 = sigma * sigma;
        Ok(DVector::from_vec(vec![mu / s2, -1.0 / (2.0 * s2)]))
    }

    /// η-coordinates of N(μ, σ²).
    pub fn eta_from_mu_sigma(mu: f64, sigma: f64) -> Result<DVector<f64>> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(IgError::InvalidInput(format!(
                "need finite μ and σ > 0, got μ={mu}, σ={sigma}"
            )));
        }
        Ok(DVector::from_vec(vec![mu, mu * mu + sigma * sigma]))
    }

    /// (μ, σ) of a θ-point.
    pub fn mu_sigma_from_theta(theta: &DVector<f64>) -> Result<(f64, f64)> {
        if theta.len() != 2 || !(theta[1] < 0.0) {
            return Err(IgError::Domain("θ² must be negative".into()));
        }
        let s2 = -1.0 / (2.0 * theta[1]);
        Ok((theta[0] * s2, s2.sqrt()))
    }

    /// (μ, σ) of an η-point.
    pub fn mu_sigma_from_eta(eta: &DVector<f64>) -> Result<(f64, f64)> {
        if eta.len() != 2 {
            return Err(IgError::InvalidInput("η must have length 2".into()));
        }
        let s2 = eta[1] - eta[0] * eta[0];
        if !(s2 > 0.0) {
            return Err(IgError::Domain("η₂ − η₁² must be positive".into()));
        }
        Ok((eta[0], s2.sqrt()))
    }

    /// Differential entropy ½ ln(2πeσ²); Ψ* is its negative.
    pub fn entropy(sigma: f64) -> f64 {
        0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln()
    }
}

impl DuallyFlatModel for GaussianModel {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "gaussian"
    }

    fn domain_theta(&self, theta: &DVector<f64>) -> bool {
        theta.len() == 2 && theta.iter().all(|x| x.is_finite()) && theta[1] < 0.0
    }

    fn domain_eta(&self, eta: &DVector<f64>) -> bool {
        eta.len() == 2
            && eta.iter().all(|x| x.is_finite())
            && eta[1] - eta[0] * eta[0] > 0.0
    }

    fn psi(&self, theta: &DVector<f64>) -> f64 {
        let (t1, t2) = (theta[0], theta[1]);
        -t1 * t1 / (4.0 * t2) + 0.5 * (-PI / t2).ln()
    }

    fn grad_psi(&self, theta: &DVector<f64>) -> DVector<f64> {
        let (t1, t2) = (theta[0], theta[1]);
        DVector::from_vec(vec![
            -t1 / (2.0 * t2),
            t1 * t1 / (4.0 * t2 * t2) - 1.0 / (2.0 * t2),
        ])
    }

    fn hess_psi(&self, theta: &DVector<f64>) -> SymMatrix {
        let (t1, t2) = (theta[0], theta[1]);
        let h11 = -1.0 / (2.0 * t2);
        let h12 = t1 / (2.0 * t2 * t2);
        let h22 = -t1 * t1 / (2.0 * t2 * t2 * t2) + 1.0 / (2.0 * t2 * t2);
        SymMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => h11,
            (0, 1) => h12,
            _ => h22,
        })
    }

    fn third_psi(&self, theta: &DVector<f64>) -> CubicTensor {
        let (t1, t2) = (theta[0], theta[1]);
        let t2_2 = t2 * t2;
        let t2_3 = t2_2 * t2;
        let t2_4 = t2_2 * t2_2;
        let c112 = 1.0 / (2.0 * t2_2);
        let c122 = -t1 / t2_3;
        let c222 = 1.5 * t1 * t1 / t2_4 - 1.0 / t2_3;
        CubicTensor::from_fn_sym(2, |i, j, k| match (i, j, k) {
            (0, 0, 0) => 0.0,
            (0, 0, 1) => c112,
            (0, 1, 1) => c122,
            _ => c222,
        })
    }

    fn newton_seed(&self, eta: &DVector<f64>) -> Option<DVector<f64>> {
        self.grad_psi_dual(eta).ok()
    }

    fn psi_dual(&self, eta: &DVector<f64>) -> Result<f64> {
        let s = eta[1] - eta[0] * eta[0];
        Ok(-0.5 * (2.0 * PI * std::f64::consts::E * s).ln())
    }

    fn grad_psi_dual(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        let s = eta[1] - eta[0] * eta[0];
        Ok(DVector::from_vec(vec![eta[0] / s, -1.0 / (2.0 * s)]))
    }

    fn hess_psi_dual(&self, eta: &DVector<f64>) -> Result<SymMatrix> {
        let e1 = eta[0];
        let s = eta[1] - e1 * e1;
        let s2 = s * s;
        Ok(SymMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => (s + 2.0 * e1 * e1) / s2,
            (0, 1) => -e1 / s2,
            _ => 0.5 / s2,
        }))
    }

    fn third_psi_dual(&self, eta: &DVector<f64>) -> Result<CubicTensor> {
        let e1 = eta[0];
        let s = eta[1] - e1 * e1;
        let s3 = s * s * s;
        let c111 = 2.0 * e1 * (3.0 * s + 4.0 * e1 * e1) / s3;
        let c112 = -(s + 4.0 * e1 * e1) / s3;
        let c122 = 2.0 * e1 / s3;
        let c222 = -1.0 / s3;
        Ok(CubicTensor::from_fn_sym(2, |i, j, k| match (i, j, k) {
            (0, 0, 0) => c111,
            (0, 0, 1) => c112,
            (0, 1, 1) => c122,
            _ => c222,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

    fn model() -> GaussianModel {
        GaussianModel::new()
    }

    #[test]
    fn potential_at_standard_normal() {
        // θ = (0, −1/2) is N(0, 1); Ψ there is ½ ln 2π (normalization
        // integral, cross-checked by quadrature in the oracle tests).
        let m = model();
        let theta = DVector::from_vec(vec![0.0, -0.5]);
        assert!((m.potential(&theta).unwrap() - HALF_LN_2PI).abs() < 1e-15);
    }

    #[test]
    fn potential_rejects_nonnegative_theta2() {
        let m = model();
        let theta = DVector::from_vec(vec![1.0, 0.2]);
        assert!(matches!(m.potential(&theta), Err(IgError::Domain(_))));
    }

    #[test]
    fn dual_potential_is_negative_entropy() {
        let m = model();
        let eta = DVector::from_vec(vec![0.0, 1.0]);
        let expect = -(HALF_LN_2PI + 0.5); // −½ ln 2πe
        assert!((m.dual_potential(&eta).unwrap() - expect).abs() < 1e-15);
        assert!((m.dual_potential(&eta).unwrap() + GaussianModel::entropy(1.0)).abs() < 1e-15);
    }

    #[test]
    fn dual_potential_rejects_degenerate_eta() {
        let m = model();
        let eta = DVector::from_vec(vec![1.0, 0.5]);
        assert!(matches!(m.dual_potential(&eta), Err(IgError::Domain(_))));
    }

    #[test]
    fn chart_maps_at_reference_point() {
        // μ = 1.2, σ = 0.8 gives θ = (1.875, −0.78125), η = (1.2, 2.08)
        let m = model();
        let theta = GaussianModel::theta_from_mu_sigma(1.2, 0.8).unwrap();
        assert_eq!(theta[0], 1.875);
        assert_eq!(theta[1], -0.78125);
        let eta = m.eta_of_theta(&theta).unwrap();
        assert!((eta[0] - 1.2).abs() < 1e-14);
        assert!((eta[1] - 2.08).abs() < 1e-14);
        let back = m.theta_of_eta(&eta).unwrap();
        assert!((&back - &theta).amax() < 1e-13);
    }

    #[test]
    fn mu_sigma_round_trip_exact_at_dyadic_values() {
        let (mu, sigma) = (0.5, 2.0);
        let theta = GaussianModel::theta_from_mu_sigma(mu, sigma).unwrap();
        let (mu2, sigma2) = GaussianModel::mu_sigma_from_theta(&theta).unwrap();
        assert_eq!(mu, mu2);
        assert_eq!(sigma, sigma2);
    }

    #[test]
    fn metric_at_standard_normal() {
        let m = model();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let g = m.metric_lower(&theta).unwrap();
        assert!((g.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((g.get(1, 1) - 2.0).abs() < 1e-14);
        assert!(g.get(0, 1).abs() < 1e-14);
        let eta = m.eta_of_theta(&theta).unwrap();
        let gu = m.metric_upper(&eta).unwrap();
        assert!((gu.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((gu.get(1, 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn metric_matches_paper_form_in_mu_sigma() {
        // g_ij = 2σ² [[1/2, μ], [μ, 2μ² + σ²]]
        let m = model();
        let (mu, sigma) = (0.7, 1.3);
        let theta = GaussianModel::theta_from_mu_sigma(mu, sigma).unwrap();
        let g = m.hess_psi(&theta);
        let s2 = sigma * sigma;
        assert!((g.get(0, 0) - s2).abs() < 1e-12);
        assert!((g.get(0, 1) - 2.0 * mu * s2).abs() < 1e-12);
        assert!((g.get(1, 1) - 2.0 * s2 * (2.0 * mu * mu + s2)).abs() < 1e-11);
    }

    #[test]
    fn cubic_tensor_at_standard_normal() {
        let m = model();
        let theta = DVector::from_vec(vec![0.0, -0.5]);
        let c = m.cubic_tensor(&theta).unwrap();
        assert_eq!(c.get(0, 0, 0), 0.0);
        assert!((c.get(0, 0, 1) - 2.0).abs() < 1e-14);
        assert_eq!(c.get(0, 1, 1), 0.0);
        assert!((c.get(1, 1, 1) - 8.0).abs() < 1e-13);
        assert_eq!(c.max_asymmetry(), 0.0);
    }

    #[test]
    fn scalar_fields_at_standard_normal() {
        let m = model();
        let theta = DVector::from_vec(vec![0.0, -0.5]);
        let eta = DVector::from_vec(vec![0.0, 1.0]);
        assert!((m.eta_squared(&theta).unwrap() - 0.5).abs() < 1e-14);
        assert!((m.theta_squared(&eta).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn chi_squared_reduces_and_deforms() {
        let m = model();
        let theta = DVector::from_vec(vec![0.0, -0.5]);
        let zero = DVector::zeros(2);
        assert_eq!(
            m.chi_squared(&theta, &zero).unwrap(),
            m.eta_squared(&theta).unwrap()
        );
        // A = η_r of (μ, σ) = (1.2, 0.8): χ² = 1.44 + 0.5·1.1664 = 2.0232
        let a = GaussianModel::eta_from_mu_sigma(1.2, 0.8).unwrap();
        assert!((m.chi_squared(&theta, &a).unwrap() - 2.0232).abs() < 1e-13);
    }

    #[test]
    fn divergence_examples() {
        let m = model();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let theta_r = GaussianModel::theta_from_mu_sigma(1.2, 0.8).unwrap();
        assert_eq!(m.divergence_theta(&theta, &theta).unwrap(), 0.0);
        // closed-form KL(N(1.2, 0.8²) ‖ N(0, 1)) = ln(1/0.8) + (0.64+1.44)/2 − ½
        let kl = (1.0f64 / 0.8).ln() + (0.64 + 1.44) / 2.0 - 0.5;
        let d = m.divergence_theta(&theta, &theta_r).unwrap();
        assert!((d - kl).abs() < 1e-12);
        assert!((d - 0.763144).abs() < 1e-6);
    }
}
