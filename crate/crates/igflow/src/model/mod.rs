//! Dually-flat model abstraction.
//!
//! A model is a strictly convex potential Ψ on the θ-chart together with
//! its derivatives and domain predicates. Everything else — the dual
//! coordinates η = ∇Ψ(θ), the dual potential Ψ*(η) = θ·η − Ψ(θ), the
//! Hessian metrics g_ij(θ) and g^ij(η), the cubic tensor and the
//! α-connections, the Bregman divergences, and the scalar fields η²(θ),
//! θ²(η), χ²(θ) — is derived from it.
//!
//! Models with closed-form dual data (Gaussian, quadratic) override the
//! η-side methods; otherwise the defaults go through damped-Newton
//! Legendre inversion using the analytic Hessian.

mod fd;
mod gaussian;
mod quadratic;

pub use fd::{grad_fd, hess_fd, third_fd};
pub use gaussian::GaussianModel;
pub use quadratic::QuadraticModel;

use nalgebra::{Cholesky, DVector, Dyn};

use crate::chart::{Chart, ChartPoint};
use crate::error::{IgError, Result};
use crate::fields::CovectorField;
use crate::linalg::{CubicTensor, SymMatrix};

/// Gradient-residual tolerance of the Legendre (Newton) inversion.
pub const LEGENDRE_TOL: f64 = 1e-12;
/// Iteration cap of the Legendre inversion.
pub const LEGENDRE_MAX_ITER: usize = 50;

pub trait DuallyFlatModel: Send + Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> &str;

    /// Domain predicate of the θ-chart.
    fn domain_theta(&self, theta: &DVector<f64>) -> bool;
    /// Domain predicate of the η-chart.
    fn domain_eta(&self, eta: &DVector<f64>) -> bool;

    /// Ψ(θ). Callers guarantee `domain_theta`.
    fn psi(&self, theta: &DVector<f64>) -> f64;
    /// ∇Ψ(θ), i.e. η(θ).
    fn grad_psi(&self, theta: &DVector<f64>) -> DVector<f64>;
    /// Hessian of Ψ at θ: the lower-index metric g_ij(θ).
    fn hess_psi(&self, theta: &DVector<f64>) -> SymMatrix;
    /// Third derivatives of Ψ at θ: the cubic tensor C_ijk(θ).
    fn third_psi(&self, theta: &DVector<f64>) -> CubicTensor;

    /// Seed for the Newton inversion when no closed form is available.
    /// `None` means the caller must supply a guess.
    fn newton_seed(&self, _eta: &DVector<f64>) -> Option<DVector<f64>> {
        None
    }

    /// Ψ*(η). Default: Legendre transform through Newton inversion.
    fn psi_dual(&self, eta: &DVector<f64>) -> Result<f64> {
        let theta = self.invert_grad(eta, None)?;
        Ok(theta.dot(eta) - self.psi(&theta))
    }

    /// ∇Ψ*(η), i.e. θ(η). Default: Newton inversion.
    fn grad_psi_dual(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        self.invert_grad(eta, None)
    }

    /// Hessian of Ψ* at η: the upper-index metric g^ij(η).
    /// Default: matrix inverse of the Hessian at θ(η).
    fn hess_psi_dual(&self, eta: &DVector<f64>) -> Result<SymMatrix> {
        let theta = self.grad_psi_dual(eta)?;
        self.hess_psi(&theta).try_inverse().ok_or_else(|| {
            IgError::Domain("metric not invertible at the dual point".into())
        })
    }

    /// Third derivatives of Ψ* at η: C^ijk(η).
    /// Default: push-forward of −C_abc through three inverse metrics,
    /// obtained by differentiating g^ij(η) g_jk(θ(η)) = δ^i_k.
    fn third_psi_dual(&self, eta: &DVector<f64>) -> Result<CubicTensor> {
        let theta = self.grad_psi_dual(eta)?;
        let g_up = self.hess_psi_dual(eta)?;
        let c_low = self.third_psi(&theta);
        let n = self.dim();
        Ok(CubicTensor::from_fn_sym(n, |i, j, k| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        s += g_up.get(i, a) * g_up.get(j, b) * g_up.get(k, c) * c_low.get(a, b, c);
                    }
                }
            }
            -s
        }))
    }

    // ---- checked operations ------------------------------------------

    /// Ψ(θ) with domain check.
    fn potential(&self, theta: &DVector<f64>) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.psi(theta))
    }

    /// Ψ*(η) with domain check.
    fn dual_potential(&self, eta: &DVector<f64>) -> Result<f64> {
        self.check_eta(eta)?;
        self.psi_dual(eta)
    }

    /// η = ∇Ψ(θ).
    fn eta_of_theta(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_theta(theta)?;
        Ok(self.grad_psi(theta))
    }

    /// θ = ∇Ψ*(η).
    fn theta_of_eta(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_eta(eta)?;
        self.grad_psi_dual(eta)
    }

    /// g_ij(θ), positive-definiteness enforced.
    fn metric_lower(&self, theta: &DVector<f64>) -> Result<SymMatrix> {
        self.check_theta(theta)?;
        let h = self.hess_psi(theta);
        if h.cholesky().is_none() {
            return Err(IgError::Domain(
                "Hessian metric not positive definite".into(),
            ));
        }
        Ok(h)
    }

    /// g^ij(η), positive-definiteness enforced.
    fn metric_upper(&self, eta: &DVector<f64>) -> Result<SymMatrix> {
        self.check_eta(eta)?;
        let h = self.hess_psi_dual(eta)?;
        if h.cholesky().is_none() {
            return Err(IgError::Domain(
                "dual Hessian metric not positive definite".into(),
            ));
        }
        Ok(h)
    }

    /// Lower metric at a point in either chart; η-chart input is mapped
    /// through the duality first.
    fn metric_lower_at(&self, point: &ChartPoint) -> Result<SymMatrix> {
        match point.chart() {
            Chart::Theta => self.metric_lower(point.coords()),
            Chart::Eta => {
                let theta = self.theta_of_eta(point.coords())?;
                self.metric_lower(&theta)
            }
        }
    }

    /// Upper metric at a point in either chart.
    fn metric_upper_at(&self, point: &ChartPoint) -> Result<SymMatrix> {
        match point.chart() {
            Chart::Eta => self.metric_upper(point.coords()),
            Chart::Theta => {
                let eta = self.eta_of_theta(point.coords())?;
                self.metric_upper(&eta)
            }
        }
    }

    /// C_ijk(θ).
    fn cubic_tensor(&self, theta: &DVector<f64>) -> Result<CubicTensor> {
        self.check_theta(theta)?;
        Ok(self.third_psi(theta))
    }

    /// Γ^(α)_ijk(θ) = ((1−α)/2) C_ijk(θ).
    fn alpha_connection(&self, theta: &DVector<f64>, alpha: f64) -> Result<CubicTensor> {
        Ok(self.cubic_tensor(theta)?.scale((1.0 - alpha) / 2.0))
    }

    /// Bregman divergence D(θ, θ_r) = Ψ(θ) − Ψ(θ_r) − η_r·(θ − θ_r).
    fn divergence_theta(&self, theta: &DVector<f64>, theta_ref: &DVector<f64>) -> Result<f64> {
        self.check_theta(theta)?;
        self.check_theta(theta_ref)?;
        let eta_ref = self.grad_psi(theta_ref);
        Ok(self.psi(theta) - self.psi(theta_ref) - eta_ref.dot(&(theta - theta_ref)))
    }

    /// Dual Bregman divergence D(η, η_r) = Ψ*(η) − Ψ*(η_r) − θ_r·(η − η_r).
    fn divergence_eta(&self, eta: &DVector<f64>, eta_ref: &DVector<f64>) -> Result<f64> {
        self.check_eta(eta)?;
        self.check_eta(eta_ref)?;
        let theta_ref = self.grad_psi_dual(eta_ref)?;
        Ok(self.psi_dual(eta)? - self.psi_dual(eta_ref)? - theta_ref.dot(&(eta - eta_ref)))
    }

    /// η²(θ) = g^ij(θ) η_i η_j with η = ∇Ψ(θ).
    fn eta_squared(&self, theta: &DVector<f64>) -> Result<f64> {
        let chol = self.hess_chol(theta)?;
        let eta = self.grad_psi(theta);
        Ok(eta.dot(&chol.solve(&eta)))
    }

    /// θ²(η) = g_ij(η) θ^i θ^j with θ = ∇Ψ*(η).
    fn theta_squared(&self, eta: &DVector<f64>) -> Result<f64> {
        self.check_eta(eta)?;
        let theta = self.grad_psi_dual(eta)?;
        let g_low = self.hess_psi(&theta);
        Ok(g_low.quad(&theta, &theta))
    }

    /// χ²(θ) = g^ij(θ) (η_i − A_i)(η_j − A_j); reduces to η²(θ) at A = 0.
    fn chi_squared(&self, theta: &DVector<f64>, a: &DVector<f64>) -> Result<f64> {
        let chol = self.hess_chol(theta)?;
        if a.len() != self.dim() {
            return Err(IgError::InvalidInput(format!(
                "covector length {} does not match model dimension {}",
                a.len(),
                self.dim()
            )));
        }
        let d = self.grad_psi(theta) - a;
        Ok(d.dot(&chol.solve(&d)))
    }

    /// χ²(θ) against a covector field evaluated at θ.
    fn chi_squared_field(&self, theta: &DVector<f64>, a: &CovectorField) -> Result<f64> {
        let av = a.eval(theta)?;
        self.chi_squared(theta, &av)
    }

    // ---- plumbing -----------------------------------------------------

    fn check_theta(&self, theta: &DVector<f64>) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(IgError::InvalidInput(format!(
                "θ length {} does not match model dimension {}",
                theta.len(),
                self.dim()
            )));
        }
        if !self.domain_theta(theta) {
            return Err(IgError::Domain(format!(
                "θ outside the domain of model '{}'",
                self.name()
            )));
        }
        Ok(())
    }

    fn check_eta(&self, eta: &DVector<f64>) -> Result<()> {
        if eta.len() != self.dim() {
            return Err(IgError::InvalidInput(format!(
                "η length {} does not match model dimension {}",
                eta.len(),
                self.dim()
            )));
        }
        if !self.domain_eta(eta) {
            return Err(IgError::Domain(format!(
                "η outside the domain of model '{}'",
                self.name()
            )));
        }
        Ok(())
    }

    /// Cholesky factor of the Hessian metric; the factorization doubles as
    /// the positive-definiteness check (a failure is a domain exit).
    fn hess_chol(&self, theta: &DVector<f64>) -> Result<Cholesky<f64, Dyn>> {
        self.check_theta(theta)?;
        self.hess_psi(theta).cholesky().ok_or_else(|| {
            IgError::Domain("Hessian metric not positive definite".into())
        })
    }

    /// Damped-Newton solve of ∇Ψ(θ) = η.
    ///
    /// The Hessian is analytic and SPD on the domain, so full Newton steps
    /// converge quadratically; backtracking halves the step when the
    /// residual fails to decrease or the iterate leaves the domain.
    fn invert_grad(&self, eta: &DVector<f64>, seed: Option<&DVector<f64>>) -> Result<DVector<f64>> {
        let mut theta = match seed {
            Some(s) => s.clone(),
            None => self.newton_seed(eta).ok_or_else(|| {
                IgError::Convergence(format!(
                    "model '{}' has no Newton seed; supply an initial guess",
                    self.name()
                ))
            })?,
        };
        if !self.domain_theta(&theta) {
            return Err(IgError::Convergence(
                "Newton seed outside the θ-domain".into(),
            ));
        }
        let res_norm = |t: &DVector<f64>| -> f64 {
            (self.grad_psi(t) - eta).amax()
        };
        let mut res = res_norm(&theta);
        for _ in 0..LEGENDRE_MAX_ITER {
            if res <= LEGENDRE_TOL {
                return Ok(theta);
            }
            let chol = self
                .hess_psi(&theta)
                .cholesky()
                .ok_or_else(|| IgError::Convergence("Hessian lost definiteness".into()))?;
            let full_step = chol.solve(&(self.grad_psi(&theta) - eta));
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let cand = &theta - lambda * &full_step;
                if self.domain_theta(&cand) {
                    let cand_res = res_norm(&cand);
                    if cand_res < res || cand_res <= LEGENDRE_TOL {
                        theta = cand;
                        res = cand_res;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return Err(IgError::Convergence(
                    "Newton line search stalled during Legendre inversion".into(),
                ));
            }
        }
        if res <= LEGENDRE_TOL {
            Ok(theta)
        } else {
            Err(IgError::Convergence(format!(
                "Legendre inversion residual {res:.3e} after {LEGENDRE_MAX_ITER} iterations"
            )))
        }
    }
}

/// A model defined only by its potential; all derivatives fall back to
/// central differences. Intended for quick experiments with custom convex
/// potentials; the built-in models carry analytic derivatives.
pub struct FiniteDiffModel<F, D> {
    name: String,
    dim: usize,
    potential: F,
    domain: D,
    seed: Option<DVector<f64>>,
}

impl<F, D> FiniteDiffModel<F, D>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
    D: Fn(&DVector<f64>) -> bool + Send + Sync,
{
    pub fn new(name: &str, dim: usize, potential: F, domain: D) -> Self {
        FiniteDiffModel {
            name: name.to_string(),
            dim,
            potential,
            domain,
            seed: None,
        }
    }

    /// Fixed seed for the Legendre inversion.
    pub fn with_newton_seed(mut self, seed: DVector<f64>) -> Self {
        self.seed = Some(seed);
        self
    }
}

impl<F, D> DuallyFlatModel for FiniteDiffModel<F, D>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
    D: Fn(&DVector<f64>) -> bool + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn domain_theta(&self, theta: &DVector<f64>) -> bool {
        (self.domain)(theta)
    }

    fn domain_eta(&self, _eta: &DVector<f64>) -> bool {
        // Without a closed-form dual the η-domain is only known implicitly;
        // the Newton inversion reports failures instead.
        true
    }

    fn psi(&self, theta: &DVector<f64>) -> f64 {
        (self.potential)(theta)
    }

    fn grad_psi(&self, theta: &DVector<f64>) -> DVector<f64> {
        grad_fd(&|t: &DVector<f64>| Ok((self.potential)(t)), theta)
            .expect("finite-difference gradient cannot fail for a total potential")
    }

    fn hess_psi(&self, theta: &DVector<f64>) -> SymMatrix {
        hess_fd(&|t: &DVector<f64>| Ok((self.potential)(t)), theta)
            .expect("finite-difference Hessian cannot fail for a total potential")
    }

    fn third_psi(&self, theta: &DVector<f64>) -> CubicTensor {
        third_fd(&|t: &DVector<f64>| Ok(self.hess_psi(t)), theta)
            .expect("finite-difference third derivatives cannot fail for a total potential")
    }

    fn newton_seed(&self, _eta: &DVector<f64>) -> Option<DVector<f64>> {
        self.seed.clone()
    }
}
