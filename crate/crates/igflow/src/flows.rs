//! Gradient-flow right-hand sides, closed-form solutions, and the rate
//! identities used as trajectory checks.
//!
//! Two divergence flows live here. The θ-chart flow
//! `dθ^i/dt = g^{ij}(θ)(η_j(θ) − η_j^r)` ascends the potential and grows
//! like e^t in the dual chart; the η-chart flow
//! `dη_i/dt = −g_{ij}(η)(θ^j(η) − θ_r^j)` relaxes to the reference state
//! and is linear, `θ(t) = θ_r + (θ_0 − θ_r)e^{−t}`, in the θ-chart. The
//! Randers-deformed flow replaces the constant reference covector by a
//! field A(θ).

use nalgebra::DVector;

use crate::chart::Chart;
use crate::error::{IgError, Result};
use crate::fields::CovectorField;
use crate::integrate::{integrate, IntegratorConfig, ParamName, Trajectory};
use crate::model::DuallyFlatModel;

/// RHS of the θ-divergence flow: g^{ij}(θ)(η_j(θ) − η_j^r) with
/// η^r = ∇Ψ(θ_r). Vanishes exactly at θ = θ_r.
pub fn grad_rhs_theta(
    model: &dyn DuallyFlatModel,
    theta: &DVector<f64>,
    theta_ref: &DVector<f64>,
) -> Result<DVector<f64>> {
    let eta_ref = model.eta_of_theta(theta_ref)?;
    grad_rhs_theta_with_eta_ref(model, theta, &eta_ref)
}

/// Same flow with the reference given directly as a dual-chart covector;
/// η^r = 0 is the pure potential-ascent case.
pub fn grad_rhs_theta_with_eta_ref(
    model: &dyn DuallyFlatModel,
    theta: &DVector<f64>,
    eta_ref: &DVector<f64>,
) -> Result<DVector<f64>> {
    rf_rhs_theta(
        model,
        theta,
        &CovectorField::Constant(eta_ref.clone()),
    )
}

/// RHS of the η-divergence flow: −g_{ij}(η)(θ^j(η) − θ_r^j) with
/// θ_r = ∇Ψ*(η_r).
pub fn grad_rhs_eta(
    model: &dyn DuallyFlatModel,
    eta: &DVector<f64>,
    eta_ref: &DVector<f64>,
) -> Result<DVector<f64>> {
    let theta_ref = model.theta_of_eta(eta_ref)?;
    grad_rhs_eta_with_theta_ref(model, eta, &theta_ref)
}

/// Same flow with the reference given directly in the θ-chart;
/// θ_r = 0 is the pure entropy-ascent case.
pub fn grad_rhs_eta_with_theta_ref(
    model: &dyn DuallyFlatModel,
    eta: &DVector<f64>,
    theta_ref: &DVector<f64>,
) -> Result<DVector<f64>> {
    model.check_eta(eta)?;
    let theta = model.grad_psi_dual(eta)?;
    let g_low = model.hess_psi(&theta);
    Ok(-g_low.mul_vec(&(&theta - theta_ref)))
}

/// RHS of the Randers-deformed flow: g^{ij}(θ)(η_j(θ) − A_j(θ)).
/// With A ≡ η^r this *is* `grad_rhs_theta` — same code path, so the
/// reduction is exact, not approximate.
pub fn rf_rhs_theta(
    model: &dyn DuallyFlatModel,
    theta: &DVector<f64>,
    a: &CovectorField,
) -> Result<DVector<f64>> {
    let chol = model.hess_chol(theta)?;
    let av = a.eval(theta)?;
    if av.len() != model.dim() {
        return Err(IgError::InvalidInput(format!(
            "deformation covector has length {}, model dimension is {}",
            av.len(),
            model.dim()
        )));
    }
    let d = model.grad_psi(theta) - av;
    Ok(chol.solve(&d))
}

/// Closed-form θ-chart solution of the η-divergence flow:
/// θ(t) = θ_r + (θ_0 − θ_r) e^{−t}.
pub fn linear_solution_theta(
    theta0: &DVector<f64>,
    theta_ref: &DVector<f64>,
    t: f64,
) -> DVector<f64> {
    theta_ref + (theta0 - theta_ref) * (-t).exp()
}

/// Closed-form η-chart solution of the θ-divergence flow:
/// η(t) = η_r + (η_0 − η_r) e^{t}.
pub fn linear_solution_eta(
    eta0: &DVector<f64>,
    eta_ref: &DVector<f64>,
    t: f64,
) -> DVector<f64> {
    eta_ref + (eta0 - eta_ref) * t.exp()
}

/// Closed-form Gaussian relaxation in (μ, σ):
///
/// ```text
/// μ(t) = (μ₀σ_r² + μ_r σ₀²(eᵗ−1)) / (σ_r² + σ₀²(eᵗ−1))
/// σ(t) = σ_r σ₀ e^{t/2} / sqrt(σ_r² + σ₀²(eᵗ−1))
/// ```
///
/// (μ_r, σ_r) are the t → ∞ limits.
pub fn gaussian_closed_form(
    mu0: f64,
    sigma0: f64,
    mu_r: f64,
    sigma_r: f64,
    t: f64,
) -> Result<(f64, f64)> {
    if !(sigma0 > 0.0) || !(sigma_r > 0.0) {
        return Err(IgError::InvalidInput(format!(
            "σ values must be positive, got σ0={sigma0}, σr={sigma_r}"
        )));
    }
    let em1 = t.exp_m1();
    let denom = sigma_r * sigma_r + sigma0 * sigma0 * em1;
    let mu = (mu0 * sigma_r * sigma_r + mu_r * sigma0 * sigma0 * em1) / denom;
    let sigma = sigma_r * sigma0 * (t / 2.0).exp() / denom.sqrt();
    Ok((mu, sigma))
}

/// The Gaussian η-divergence flow expressed in (μ, σ):
/// dμ/dt = (σ²/σ_r²)(μ_r − μ), dσ/dt = ½(σ − σ³/σ_r²).
pub fn gaussian_mu_sigma_rhs(mu: f64, sigma: f64, mu_r: f64, sigma_r: f64) -> (f64, f64) {
    let sr2 = sigma_r * sigma_r;
    (
        (sigma * sigma / sr2) * (mu_r - mu),
        0.5 * (sigma - sigma.powi(3) / sr2),
    )
}

/// Rate of the θ-potential along the θ-divergence flow:
/// dΨ/dt = η²(θ) − g^{ij}(θ) η_i η_j^r.
pub fn potential_rate(
    model: &dyn DuallyFlatModel,
    theta: &DVector<f64>,
    eta_ref: &DVector<f64>,
) -> Result<f64> {
    let chol = model.hess_chol(theta)?;
    let eta = model.grad_psi(theta);
    let u = chol.solve(&eta);
    Ok(u.dot(&(&eta - eta_ref)))
}

/// Rate of the dual potential along the η-divergence flow:
/// dΨ*/dt = −θ²(η) + g_{ij}(η) θ^i θ_r^j. The entropy rate is its
/// negative.
pub fn entropy_rate(
    model: &dyn DuallyFlatModel,
    eta: &DVector<f64>,
    theta_ref: &DVector<f64>,
) -> Result<f64> {
    model.check_eta(eta)?;
    let theta = model.grad_psi_dual(eta)?;
    let w = model.hess_psi(&theta).mul_vec(&theta);
    Ok(w.dot(theta_ref) - w.dot(&theta))
}

/// Per-interior-sample residual of d²θ/dt² + dθ/dt, estimated with
/// three-point finite differences (non-uniform spacing supported).
/// Near zero exactly when the trajectory solves the linearized
/// η-divergence flow, i.e. travels a pre-geodesic of the flat θ-chart.
pub fn pre_geodesic_residual(traj: &Trajectory) -> Result<Vec<f64>> {
    let n = traj.len();
    if n < 3 {
        return Err(IgError::InsufficientSamples { need: 3, got: n });
    }
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let h1 = traj.samples[k] - traj.samples[k - 1];
        let h2 = traj.samples[k + 1] - traj.samples[k];
        let ym = &traj.points[k - 1];
        let y0 = &traj.points[k];
        let yp = &traj.points[k + 1];
        let denom = h1 * h2 * (h1 + h2);
        // first and second derivative, three-point non-uniform stencils
        let d1 = (yp * (h1 * h1) - ym * (h2 * h2) + y0 * (h2 * h2 - h1 * h1)) / denom;
        let d2 = (yp * h1 + ym * h2 - y0 * (h1 + h2)) * (2.0 / denom);
        out.push((d2 + d1).norm());
    }
    Ok(out)
}

/// Convenience: integrates the η-divergence flow for a model and attaches
/// Ψ* per sample.
pub fn integrate_eta_flow(
    model: &dyn DuallyFlatModel,
    eta0: &DVector<f64>,
    eta_ref: &DVector<f64>,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let theta_ref = model.theta_of_eta(eta_ref)?;
    let mut traj = integrate(
        |eta| grad_rhs_eta_with_theta_ref(model, eta, &theta_ref),
        eta0,
        (0.0, horizon),
        cfg,
        ParamName::T,
        Chart::Eta,
    )?;
    let psi_star: Result<Vec<f64>> = traj.points.iter().map(|p| model.psi_dual(p)).collect();
    traj.push_scalar_column("psi_star", psi_star?)?;
    Ok(traj)
}

/// Convenience: integrates the θ-divergence flow (reference supplied as
/// η^r, which may be zero) and attaches Ψ per sample.
pub fn integrate_theta_flow(
    model: &dyn DuallyFlatModel,
    theta0: &DVector<f64>,
    eta_ref: &DVector<f64>,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut traj = integrate(
        |theta| grad_rhs_theta_with_eta_ref(model, theta, eta_ref),
        theta0,
        (0.0, horizon),
        cfg,
        ParamName::T,
        Chart::Theta,
    )?;
    let psi: Vec<f64> = traj.points.iter().map(|p| model.psi(p)).collect();
    traj.push_scalar_column("psi", psi)?;
    Ok(traj)
}

/// Integrates the Randers-deformed flow and attaches Ψ per sample.
pub fn integrate_rf_flow(
    model: &dyn DuallyFlatModel,
    theta0: &DVector<f64>,
    a: &CovectorField,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut traj = integrate(
        |theta| rf_rhs_theta(model, theta, a),
        theta0,
        (0.0, horizon),
        cfg,
        ParamName::T,
        Chart::Theta,
    )?;
    let psi: Vec<f64> = traj.points.iter().map(|p| model.psi(p)).collect();
    traj.push_scalar_column("psi", psi)?;
    Ok(traj)
}
