//! Hamiltonians whose flows reproduce the gradient flows.
//!
//! Six kinds are implemented, all functions of a position `q` in one chart
//! and a covariant momentum `p`:
//!
//! | kind                | H(q, p)                                              |
//! |---------------------|------------------------------------------------------|
//! | `IgSqrtTheta`       | √(g^{ij}(θ) p_i p_j) − √(η²(θ))                      |
//! | `IgSqrtEta`         | √(g_{ij}(η) p^i p^j) − √(θ²(η))                      |
//! | `IgQuadraticTheta`  | ½ g^{ij}(θ) p_i p_j − ½ η²(θ)                        |
//! | `IgQuadraticEta`    | ½ g_{ij}(η) p^i p^j − ½ θ²(η)                        |
//! | `ConformalIg`       | √(g^{ij}(θ) p_i p_j / η²(θ))                         |
//! | `RfIg`              | −A^i p_i/(ξχ²) + √((g^{ij}/(ξχ²) + A^iA^j/(ξχ²)²) p_i p_j) |
//!
//! The square-root and quadratic kinds vanish on-shell (p = ∇Ψ at the
//! position); the conformal and Randers-deformed kinds are homogeneous of
//! degree one in p and equal 1 on-shell. Hamilton flows of the degree-one
//! kinds run in the geodesic parameter x⁰ and map onto the gradient flows
//! in t after reparametrization (see [`reparametrize`]).

use std::sync::Arc;

use nalgebra::DVector;

use crate::chart::Chart;
use crate::error::{IgError, Result, EPS_SING};
use crate::fields::CovectorField;
use crate::integrate::{integrate, IntegratorConfig, ParamName, Trajectory};
use crate::interp::cumulative_trapezoid;
use crate::model::{grad_fd, DuallyFlatModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    IgSqrtTheta,
    IgSqrtEta,
    IgQuadraticTheta,
    IgQuadraticEta,
    ConformalIg,
    RfIg,
}

impl HamiltonianKind {
    pub fn chart(self) -> Chart {
        match self {
            HamiltonianKind::IgSqrtEta | HamiltonianKind::IgQuadraticEta => Chart::Eta,
            _ => Chart::Theta,
        }
    }

    /// Degree-one homogeneity in the momentum.
    pub fn is_degree_one(self) -> bool {
        matches!(self, HamiltonianKind::ConformalIg | HamiltonianKind::RfIg)
    }
}

/// A Hamiltonian kind bound to a model (plus the deformation one-form for
/// the Randers-deformed kind).
#[derive(Clone)]
pub struct HamiltonianSpec {
    kind: HamiltonianKind,
    model: Arc<dyn DuallyFlatModel>,
    a_field: Option<CovectorField>,
}

/// Phase-space state: position in the spec's chart plus covariant momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub position: DVector<f64>,
    pub momentum: DVector<f64>,
}

impl PhaseState {
    pub fn new(position: DVector<f64>, momentum: DVector<f64>) -> Result<Self> {
        if position.len() != momentum.len() {
            return Err(IgError::InvalidInput(format!(
                "position length {} and momentum length {} differ",
                position.len(),
                momentum.len()
            )));
        }
        if position.iter().chain(momentum.iter()).any(|x| !x.is_finite()) {
            return Err(IgError::InvalidInput(
                "phase state entries must be finite".into(),
            ));
        }
        Ok(PhaseState { position, momentum })
    }

    /// θ-chart on-shell state: p = ∇Ψ(θ).
    pub fn on_shell_theta(model: &dyn DuallyFlatModel, theta: &DVector<f64>) -> Result<Self> {
        let eta = model.eta_of_theta(theta)?;
        PhaseState::new(theta.clone(), eta)
    }
}

/// Phase trajectory with the Hamiltonian recorded per sample.
#[derive(Debug, Clone)]
pub struct PhaseTrajectory {
    pub param: ParamName,
    pub chart: Chart,
    pub samples: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub h_values: Vec<f64>,
    pub converged: bool,
    pub boundary_hit: bool,
}

impl PhaseTrajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest drift of H from its initial value.
    pub fn h_drift(&self) -> f64 {
        match self.h_values.first() {
            None => 0.0,
            Some(h0) => self
                .h_values
                .iter()
                .fold(0.0f64, |m, h| m.max((h - h0).abs())),
        }
    }
}

/// Intermediate quantities of a θ-side evaluation.
struct ThetaEval {
    /// g^{ij} p_j
    u: DVector<f64>,
    /// g^{ij} p_i p_j
    s: f64,
    /// η_i = ∂Ψ/∂θ^i
    eta: DVector<f64>,
    /// g^{ij} η_j
    v: DVector<f64>,
    /// η² = g^{ij} η_i η_j
    e: f64,
    /// Deformation quantities, only for the deformed kind.
    a: Option<RfEval>,
}

struct RfEval {
    /// A^i = g^{ij} A_j
    a_up: DVector<f64>,
    /// A^i p_i
    a_dot_p: f64,
    /// ξχ² = χ² − A²
    c: f64,
}

impl HamiltonianSpec {
    /// Builds a non-deformed spec; rejects `RfIg`, which needs an A field.
    pub fn new(kind: HamiltonianKind, model: Arc<dyn DuallyFlatModel>) -> Result<Self> {
        if kind == HamiltonianKind::RfIg {
            return Err(IgError::InvalidInput(
                "the Randers-deformed Hamiltonian needs a deformation field; use HamiltonianSpec::rf".into(),
            ));
        }
        Ok(HamiltonianSpec {
            kind,
            model,
            a_field: None,
        })
    }

    /// Builds the Randers-deformed spec.
    pub fn rf(model: Arc<dyn DuallyFlatModel>, a_field: CovectorField) -> Self {
        HamiltonianSpec {
            kind: HamiltonianKind::RfIg,
            model,
            a_field: Some(a_field),
        }
    }

    pub fn kind(&self) -> HamiltonianKind {
        self.kind
    }

    pub fn chart(&self) -> Chart {
        self.kind.chart()
    }

    pub fn model(&self) -> &Arc<dyn DuallyFlatModel> {
        &self.model
    }

    pub fn a_field(&self) -> Option<&CovectorField> {
        self.a_field.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    fn theta_eval(&self, theta: &DVector<f64>, p: &DVector<f64>) -> Result<ThetaEval> {
        let chol = self.model.hess_chol(theta)?;
        let eta = self.model.grad_psi(theta);
        let u = chol.solve(p);
        let s = p.dot(&u);
        let v = chol.solve(&eta);
        let e = eta.dot(&v);
        let a = match (&self.kind, &self.a_field) {
            (HamiltonianKind::RfIg, Some(field)) => {
                let av = field.eval(theta)?;
                let d = &eta - &av;
                let w = chol.solve(&d);
                let chi2 = d.dot(&w);
                if chi2 <= EPS_SING {
                    return Err(IgError::SingularField(
                        "χ²(θ) vanishes along the deformed flow".into(),
                    ));
                }
                let a_up = chol.solve(&av);
                let a2 = av.dot(&a_up);
                let c = chi2 - a2;
                if c / chi2 <= EPS_SING {
                    return Err(IgError::SingularField(format!(
                        "ξ = 1 − A²/χ² = {:.3e} is not positive",
                        c / chi2
                    )));
                }
                Some(RfEval {
                    a_dot_p: a_up.dot(p),
                    a_up,
                    c,
                })
            }
            _ => None,
        };
        Ok(ThetaEval { u, s, eta, v, e, a })
    }

    /// H(q, p).
    pub fn value(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        match self.kind {
            HamiltonianKind::IgSqrtTheta => {
                let ev = self.theta_eval(q, p)?;
                Ok(ev.s.sqrt() - ev.e.sqrt())
            }
            HamiltonianKind::IgQuadraticTheta => {
                let ev = self.theta_eval(q, p)?;
                Ok(0.5 * ev.s - 0.5 * ev.e)
            }
            HamiltonianKind::ConformalIg => {
                let ev = self.theta_eval(q, p)?;
                if ev.e <= EPS_SING {
                    return Err(IgError::SingularField(
                        "η²(θ) vanishes; the conformal Hamiltonian is undefined".into(),
                    ));
                }
                Ok((ev.s / ev.e).sqrt())
            }
            HamiltonianKind::RfIg => {
                let ev = self.theta_eval(q, p)?;
                let rf = ev.a.as_ref().expect("RfIg always carries RfEval");
                Ok(-rf.a_dot_p / rf.c + (ev.s / rf.c + (rf.a_dot_p / rf.c).powi(2)).sqrt())
            }
            HamiltonianKind::IgSqrtEta => {
                let (s, t2, _, _) = self.eta_scalars(q, p)?;
                Ok(s.sqrt() - t2.sqrt())
            }
            HamiltonianKind::IgQuadraticEta => {
                let (s, t2, _, _) = self.eta_scalars(q, p)?;
                Ok(0.5 * s - 0.5 * t2)
            }
        }
    }

    /// (g p p, θ², g_low p, g_low θ) at an η-chart point.
    fn eta_scalars(
        &self,
        eta: &DVector<f64>,
        p: &DVector<f64>,
    ) -> Result<(f64, f64, DVector<f64>, DVector<f64>)> {
        self.model.check_eta(eta)?;
        let theta = self.model.grad_psi_dual(eta)?;
        let g_low = self.model.hess_psi(&theta);
        let w = g_low.mul_vec(p);
        let s = p.dot(&w);
        let w_theta = g_low.mul_vec(&theta);
        let t2 = theta.dot(&w_theta);
        Ok((s, t2, w, w_theta))
    }

    /// ∂H/∂p, analytic for every kind.
    pub fn dh_dp(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        match self.kind {
            HamiltonianKind::IgSqrtTheta => {
                let ev = self.theta_eval(q, p)?;
                if ev.s <= EPS_SING {
                    return Err(IgError::SingularField(
                        "momentum norm vanishes in a square-root Hamiltonian".into(),
                    ));
                }
                Ok(&ev.u / ev.s.sqrt())
            }
            HamiltonianKind::IgQuadraticTheta => Ok(self.theta_eval(q, p)?.u),
            HamiltonianKind::ConformalIg => {
                let ev = self.theta_eval(q, p)?;
                if ev.e <= EPS_SING || ev.s <= EPS_SING {
                    return Err(IgError::SingularField(
                        "conformal Hamiltonian singular (η² or |p| vanishes)".into(),
                    ));
                }
                let h = (ev.s / ev.e).sqrt();
                Ok(&ev.u / (ev.e * h))
            }
            HamiltonianKind::RfIg => {
                let ev = self.theta_eval(q, p)?;
                let rf = ev.a.as_ref().expect("RfIg always carries RfEval");
                let m = ev.s / rf.c + (rf.a_dot_p / rf.c).powi(2);
                if m <= EPS_SING {
                    return Err(IgError::SingularField(
                        "deformed Hamiltonian momentum form vanishes".into(),
                    ));
                }
                let root = m.sqrt();
                Ok(-&rf.a_up / rf.c
                    + (&ev.u / rf.c + &rf.a_up * (rf.a_dot_p / (rf.c * rf.c))) / root)
            }
            HamiltonianKind::IgSqrtEta => {
                let (s, _, w, _) = self.eta_scalars(q, p)?;
                if s <= EPS_SING {
                    return Err(IgError::SingularField(
                        "momentum norm vanishes in a square-root Hamiltonian".into(),
                    ));
                }
                Ok(w / s.sqrt())
            }
            HamiltonianKind::IgQuadraticEta => Ok(self.eta_scalars(q, p)?.2),
        }
    }

    /// ∂H/∂q. Analytic through the model's third derivatives for the
    /// non-deformed kinds; the deformed kind falls back to central
    /// differences (the derivative of a general A field is not available).
    pub fn dh_dq(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        match self.kind {
            HamiltonianKind::RfIg => self.dh_dq_fd(q, p),
            HamiltonianKind::IgSqrtTheta
            | HamiltonianKind::IgQuadraticTheta
            | HamiltonianKind::ConformalIg => {
                let ev = self.theta_eval(q, p)?;
                let c3 = self.model.third_psi(q);
                // dS/dθ^i = −C_iab u^a u^b, dE/dθ^i = 2η_i − C_iab v^a v^b
                let ds = -c3.contract2(&ev.u, &ev.u);
                let de = &ev.eta * 2.0 - c3.contract2(&ev.v, &ev.v);
                match self.kind {
                    HamiltonianKind::IgSqrtTheta => {
                        if ev.s <= EPS_SING || ev.e <= EPS_SING {
                            return Err(IgError::SingularField(
                                "square-root Hamiltonian gradient singular".into(),
                            ));
                        }
                        Ok(ds / (2.0 * ev.s.sqrt()) - de / (2.0 * ev.e.sqrt()))
                    }
                    HamiltonianKind::IgQuadraticTheta => Ok((ds - de) * 0.5),
                    _ => {
                        if ev.e <= EPS_SING || ev.s <= EPS_SING {
                            return Err(IgError::SingularField(
                                "conformal Hamiltonian gradient singular".into(),
                            ));
                        }
                        let h = (ev.s / ev.e).sqrt();
                        Ok((ds * ev.e - de * ev.s) / (2.0 * ev.e * ev.e * h))
                    }
                }
            }
            HamiltonianKind::IgSqrtEta | HamiltonianKind::IgQuadraticEta => {
                let (s, t2, w, w_theta) = self.eta_scalars(q, p)?;
                let theta = self.model.grad_psi_dual(q)?;
                let c3 = self.model.third_psi_dual(q)?;
                // dS/dη_k = −C^abk w_a w_b, dθ²/dη_k = 2θ^k − C^abk w*_a w*_b
                let ds = -c3.contract2(&w, &w);
                let dt2 = &theta * 2.0 - c3.contract2(&w_theta, &w_theta);
                match self.kind {
                    HamiltonianKind::IgSqrtEta => {
                        if s <= EPS_SING || t2 <= EPS_SING {
                            return Err(IgError::SingularField(
                                "square-root Hamiltonian gradient singular".into(),
                            ));
                        }
                        Ok(ds / (2.0 * s.sqrt()) - dt2 / (2.0 * t2.sqrt()))
                    }
                    _ => Ok((ds - dt2) * 0.5),
                }
            }
        }
    }

    /// ∂H/∂q by central differences; the reference the analytic path is
    /// tested against.
    pub fn dh_dq_fd(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        grad_fd(&|x: &DVector<f64>| self.value(x, p), q)
    }

    /// Hamilton equations: (dq/dparam, dp/dparam) = (∂H/∂p, −∂H/∂q).
    pub fn rhs(&self, state: &PhaseState) -> Result<(DVector<f64>, DVector<f64>)> {
        let dq = self.dh_dp(&state.position, &state.momentum)?;
        let dp = -self.dh_dq(&state.position, &state.momentum)?;
        Ok((dq, dp))
    }
}

// Spec-shaped convenience wrappers over HamiltonianSpec.

/// √(g^{ij}(θ) p_i p_j) − √(η²(θ)); zero on-shell.
pub fn ig_hamiltonian_theta(
    model: Arc<dyn DuallyFlatModel>,
    theta: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<f64> {
    HamiltonianSpec::new(HamiltonianKind::IgSqrtTheta, model)?.value(theta, p)
}

/// √(g_{ij}(η) p^i p^j) − √(θ²(η)); zero when p = ∇Ψ*(η).
pub fn ig_hamiltonian_eta(
    model: Arc<dyn DuallyFlatModel>,
    eta: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<f64> {
    HamiltonianSpec::new(HamiltonianKind::IgSqrtEta, model)?.value(eta, p)
}

/// The quadratic form ½(metric in p) − ½(η² or θ²), in either chart.
pub fn ig_hamiltonian_quadratic(
    model: Arc<dyn DuallyFlatModel>,
    point: &DVector<f64>,
    p: &DVector<f64>,
    chart: Chart,
) -> Result<f64> {
    let kind = match chart {
        Chart::Theta => HamiltonianKind::IgQuadraticTheta,
        Chart::Eta => HamiltonianKind::IgQuadraticEta,
    };
    HamiltonianSpec::new(kind, model)?.value(point, p)
}

/// √(g^{ij}(θ) p_i p_j / η²(θ)); degree-one homogeneous, 1 on-shell.
pub fn conformal_ig_hamiltonian(
    model: Arc<dyn DuallyFlatModel>,
    theta: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<f64> {
    HamiltonianSpec::new(HamiltonianKind::ConformalIg, model)?.value(theta, p)
}

/// The Randers-deformed Hamiltonian; reduces to the conformal one at
/// A ≡ 0 and equals 1 on-shell.
pub fn rf_ig_hamiltonian(
    model: Arc<dyn DuallyFlatModel>,
    theta: &DVector<f64>,
    p: &DVector<f64>,
    a: &CovectorField,
) -> Result<f64> {
    HamiltonianSpec::rf(model, a.clone()).value(theta, p)
}

/// Integrates Hamilton's equations over the x⁰ parameter.
pub fn integrate_hamilton(
    spec: &HamiltonianSpec,
    state0: &PhaseState,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<PhaseTrajectory> {
    let n = spec.dim();
    if state0.position.len() != n {
        return Err(IgError::InvalidInput(format!(
            "state dimension {} does not match model dimension {n}",
            state0.position.len()
        )));
    }
    let stack = |q: &DVector<f64>, p: &DVector<f64>| {
        DVector::from_fn(2 * n, |i, _| if i < n { q[i] } else { p[i - n] })
    };
    let y0 = stack(&state0.position, &state0.momentum);
    let rhs = |y: &DVector<f64>| -> Result<DVector<f64>> {
        let q = DVector::from_fn(n, |i, _| y[i]);
        let p = DVector::from_fn(n, |i, _| y[n + i]);
        let (dq, dp) = spec.rhs(&PhaseState {
            position: q,
            momentum: p,
        })?;
        Ok(stack(&dq, &dp))
    };
    let raw = integrate(rhs, &y0, span, cfg, ParamName::X0, spec.chart())?;

    let mut states = Vec::with_capacity(raw.len());
    let mut h_values = Vec::with_capacity(raw.len());
    for y in &raw.points {
        let q = DVector::from_fn(n, |i, _| y[i]);
        let p = DVector::from_fn(n, |i, _| y[n + i]);
        h_values.push(spec.value(&q, &p)?);
        states.push(PhaseState {
            position: q,
            momentum: p,
        });
    }
    Ok(PhaseTrajectory {
        param: raw.param,
        chart: raw.chart,
        samples: raw.samples,
        states,
        h_values,
        converged: raw.converged,
        boundary_hit: raw.boundary_hit,
    })
}

/// Reparametrization factor dt = dx⁰ / factor used by [`reparametrize`].
#[derive(Clone)]
pub enum ReparamFactor {
    /// dx⁰ = η²(θ) dt — the conformal flow over a θ-chart trajectory.
    EtaSquared,
    /// dx⁰ = θ²(η) dt — the dual flow over an η-chart trajectory.
    ThetaSquared,
    /// dx⁰ = ξχ²(θ) dt — the bare conformal factor of the deformed
    /// metric. With a nonzero deformation the shift contribution A^iη_i
    /// is missing, so the mapped flow lags the deformed gradient flow;
    /// kept so that lag can be measured.
    RfConformalOnly(CovectorField),
    /// dx⁰ = (ξχ²(θ) + A^i η_i) dt — matches the on-shell velocity of the
    /// deformed Hamiltonian flow to the deformed gradient flow.
    RfExact(CovectorField),
}

/// Converts an x⁰-parametrized phase trajectory into a t-parametrized
/// coordinate trajectory by cumulative trapezoidal quadrature of
/// dt = dx⁰ / factor(θ(x⁰)). Positions are carried over unchanged; an
/// empty trajectory stays empty.
pub fn reparametrize(
    traj: &PhaseTrajectory,
    model: &dyn DuallyFlatModel,
    factor: &ReparamFactor,
) -> Result<Trajectory> {
    let mut out = Trajectory::empty(ParamName::T, traj.chart);
    if traj.is_empty() {
        return Ok(out);
    }
    let mut inv_factor = Vec::with_capacity(traj.len());
    for state in &traj.states {
        let q = &state.position;
        let den = match factor {
            ReparamFactor::EtaSquared => model.eta_squared(q)?,
            ReparamFactor::ThetaSquared => model.theta_squared(q)?,
            ReparamFactor::RfConformalOnly(a) => {
                let av = a.eval(q)?;
                let chol = model.hess_chol(q)?;
                let a_up = chol.solve(&av);
                model.chi_squared(q, &av)? - av.dot(&a_up)
            }
            ReparamFactor::RfExact(a) => {
                let av = a.eval(q)?;
                let chol = model.hess_chol(q)?;
                let eta = model.grad_psi(q);
                let a_up = chol.solve(&av);
                let d = &eta - &av;
                let chi2 = d.dot(&chol.solve(&d));
                chi2 - av.dot(&a_up) + a_up.dot(&eta)
            }
        };
        if den.abs() <= EPS_SING {
            return Err(IgError::SingularField(format!(
                "reparametrization factor denominator {den:.3e} below threshold"
            )));
        }
        inv_factor.push(1.0 / den);
    }
    out.samples = cumulative_trapezoid(&traj.samples, &inv_factor)?;
    out.points = traj.states.iter().map(|s| s.position.clone()).collect();
    out.converged = traj.converged;
    out.boundary_hit = traj.boundary_hit;
    Ok(out)
}

/// Euler defect p·∂H/∂p − H; zero exactly for the degree-one kinds and
/// √(η²(θ)) for the θ-side square-root kind.
pub fn euler_homogeneity_defect(
    spec: &HamiltonianSpec,
    q: &DVector<f64>,
    p: &DVector<f64>,
) -> Result<f64> {
    Ok(p.dot(&spec.dh_dp(q, p)?) - spec.value(q, p)?)
}

/// Per-interior-sample value of p·(dx/dparam) − H along a trajectory of a
/// degree-one spec, velocities by centered finite differences. Vanishes on
/// true solutions up to the difference budget; a constant (zero-velocity)
/// trajectory yields exactly −H.
pub fn null_lagrangian_residual(
    spec: &HamiltonianSpec,
    traj: &PhaseTrajectory,
) -> Result<Vec<f64>> {
    if !spec.kind().is_degree_one() {
        return Err(IgError::InvalidInput(format!(
            "{:?} is not first-order homogeneous in the momentum",
            spec.kind()
        )));
    }
    let n = traj.len();
    if n < 3 {
        return Err(IgError::InsufficientSamples { need: 3, got: n });
    }
    let mut out = Vec::with_capacity(n - 2);
    for k in 1..n - 1 {
        let h1 = traj.samples[k] - traj.samples[k - 1];
        let h2 = traj.samples[k + 1] - traj.samples[k];
        let denom = h1 * h2 * (h1 + h2);
        let qm = &traj.states[k - 1].position;
        let q0 = &traj.states[k].position;
        let qp = &traj.states[k + 1].position;
        let vel = (qp * (h1 * h1) - qm * (h2 * h2) + q0 * (h2 * h2 - h1 * h1)) / denom;
        out.push(traj.states[k].momentum.dot(&vel) - traj.h_values[k]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GaussianModel, QuadraticModel};

    fn gauss() -> Arc<dyn DuallyFlatModel> {
        Arc::new(GaussianModel::new())
    }

    fn quad2() -> Arc<dyn DuallyFlatModel> {
        Arc::new(QuadraticModel::identity(2))
    }

    #[test]
    fn sqrt_theta_values() {
        let m = gauss();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        // on-shell zero
        let eta = m.eta_of_theta(&theta).unwrap();
        assert!(ig_hamiltonian_theta(m.clone(), &theta, &eta).unwrap().abs() < 1e-14);
        // 1 − √0.5
        let p = DVector::from_vec(vec![1.0, 0.0]);
        let h = ig_hamiltonian_theta(m.clone(), &theta, &p).unwrap();
        assert!((h - 0.292_893_218_813_452_5).abs() < 1e-12);

        let q = quad2();
        let theta = DVector::from_vec(vec![3.0, 4.0]);
        let zero = DVector::zeros(2);
        assert_eq!(ig_hamiltonian_theta(q, &theta, &zero).unwrap(), -5.0);
    }

    #[test]
    fn sqrt_eta_values() {
        let m = gauss();
        let eta = GaussianModel::eta_from_mu_sigma(0.0, 1.0).unwrap();
        let theta = m.theta_of_eta(&eta).unwrap();
        assert!(ig_hamiltonian_eta(m.clone(), &eta, &theta).unwrap().abs() < 1e-14);
        // self-dual model mirrors the θ-side exactly
        let q = quad2();
        let point = DVector::from_vec(vec![1.0, -2.0]);
        let p = DVector::from_vec(vec![0.3, 0.4]);
        assert_eq!(
            ig_hamiltonian_eta(q.clone(), &point, &p).unwrap(),
            ig_hamiltonian_theta(q, &point, &p).unwrap()
        );
    }

    #[test]
    fn quadratic_kind_values() {
        let m = gauss();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let p = DVector::from_vec(vec![1.0, 0.0]);
        let h = ig_hamiltonian_quadratic(m.clone(), &theta, &p, Chart::Theta).unwrap();
        assert!((h - 0.25).abs() < 1e-14);
        let eta = m.eta_of_theta(&theta).unwrap();
        assert!(
            ig_hamiltonian_quadratic(m, &theta, &eta, Chart::Theta)
                .unwrap()
                .abs()
                < 1e-14
        );
        let q = quad2();
        let point = DVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(
            ig_hamiltonian_quadratic(q, &point, &point, Chart::Theta).unwrap(),
            0.0
        );
    }

    #[test]
    fn conformal_values_and_homogeneity() {
        let m = gauss();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let eta = m.eta_of_theta(&theta).unwrap();
        assert!((conformal_ig_hamiltonian(m.clone(), &theta, &eta).unwrap() - 1.0).abs() < 1e-14);
        let p = DVector::from_vec(vec![1.0, 0.0]);
        let h = conformal_ig_hamiltonian(m.clone(), &theta, &p).unwrap();
        assert!((h - std::f64::consts::SQRT_2).abs() < 1e-12);
        // degree-one: exact for the dyadic scale 2
        let h2 = conformal_ig_hamiltonian(m, &theta, &(&p * 2.0)).unwrap();
        assert_eq!(h2, 2.0 * h);
    }

    #[test]
    fn rf_worked_example_and_reduction() {
        let q = quad2();
        let theta = DVector::from_vec(vec![2.0, 0.0]);
        let a = CovectorField::constant_slice(&[0.5, 0.0]);
        let p = DVector::from_vec(vec![2.0, 0.0]);
        // ξχ² = 2, value −0.5 + √2.25 = 1
        let h = rf_ig_hamiltonian(q.clone(), &theta, &p, &a).unwrap();
        assert!((h - 1.0).abs() < 1e-14);

        // A ≡ 0 reproduces the conformal kind bitwise
        let zero_field = CovectorField::zero(2);
        for k in 0..20 {
            let th = DVector::from_vec(vec![1.0 + 0.1 * k as f64, 0.4 - 0.05 * k as f64]);
            let mom = DVector::from_vec(vec![0.3 * k as f64 - 1.0, 0.7]);
            let rf = rf_ig_hamiltonian(q.clone(), &th, &mom, &zero_field).unwrap();
            let conf = conformal_ig_hamiltonian(q.clone(), &th, &mom).unwrap();
            assert_eq!(rf, conf);
        }
    }

    #[test]
    fn rf_singular_when_xi_vanishes() {
        let q = quad2();
        let theta = DVector::from_vec(vec![1.0, 0.0]);
        let a = CovectorField::constant_slice(&[0.5, 0.0]);
        let p = DVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            rf_ig_hamiltonian(q, &theta, &p, &a),
            Err(IgError::SingularField(_))
        ));
    }

    #[test]
    fn hamilton_rhs_examples() {
        // conformal, Gaussian at (0,1), on-shell p = (0,1): dθ/dx⁰ = (0,1)
        let spec = HamiltonianSpec::new(HamiltonianKind::ConformalIg, gauss()).unwrap();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let state = PhaseState::on_shell_theta(spec.model().as_ref(), &theta).unwrap();
        let (dq, _) = spec.rhs(&state).unwrap();
        assert!(dq[0].abs() < 1e-13);
        assert!((dq[1] - 1.0).abs() < 1e-13);

        // quadratic kind on the self-dual model: dθ = p, dp = θ
        let spec = HamiltonianSpec::new(HamiltonianKind::IgQuadraticTheta, quad2()).unwrap();
        let state = PhaseState::new(
            DVector::from_vec(vec![1.0, -2.0]),
            DVector::from_vec(vec![0.5, 0.25]),
        )
        .unwrap();
        let (dq, dp) = spec.rhs(&state).unwrap();
        assert_eq!(dq, state.momentum);
        assert_eq!(dp, state.position);
    }

    #[test]
    fn analytic_position_gradient_matches_fd() {
        let m = gauss();
        let theta = GaussianModel::theta_from_mu_sigma(0.4, 1.2).unwrap();
        let p = DVector::from_vec(vec![0.7, -0.3]);
        for kind in [
            HamiltonianKind::IgSqrtTheta,
            HamiltonianKind::IgQuadraticTheta,
            HamiltonianKind::ConformalIg,
        ] {
            let spec = HamiltonianSpec::new(kind, m.clone()).unwrap();
            let a = spec.dh_dq(&theta, &p).unwrap();
            let f = spec.dh_dq_fd(&theta, &p).unwrap();
            assert!((a - f).amax() < 1e-6, "kind {kind:?}");
        }
        // η-side kinds at an η point
        let eta = GaussianModel::eta_from_mu_sigma(0.4, 1.2).unwrap();
        for kind in [HamiltonianKind::IgSqrtEta, HamiltonianKind::IgQuadraticEta] {
            let spec = HamiltonianSpec::new(kind, m.clone()).unwrap();
            let a = spec.dh_dq(&eta, &p).unwrap();
            let f = spec.dh_dq_fd(&eta, &p).unwrap();
            assert!((a - f).amax() < 1e-6, "kind {kind:?}");
        }
    }

    #[test]
    fn conformal_flow_conserves_h_and_stays_on_shell() {
        let spec = HamiltonianSpec::new(HamiltonianKind::ConformalIg, gauss()).unwrap();
        let theta0 = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let s0 = PhaseState::on_shell_theta(spec.model().as_ref(), &theta0).unwrap();
        let traj =
            integrate_hamilton(&spec, &s0, (0.0, 2.0), &IntegratorConfig::rk4(1e-3)).unwrap();
        assert!(traj.h_drift() <= 1e-8, "H drift {}", traj.h_drift());
        let mut worst = 0.0f64;
        for st in &traj.states {
            let eta = spec.model().grad_psi(&st.position);
            worst = worst.max((&st.momentum - eta).amax());
        }
        assert!(worst <= 1e-7, "on-shell transport defect {worst}");
    }

    #[test]
    fn quadratic_kind_reduces_to_ascent_flow_on_shell() {
        let spec = HamiltonianSpec::new(HamiltonianKind::IgQuadraticTheta, quad2()).unwrap();
        let theta0 = DVector::from_vec(vec![0.5, -0.3]);
        let s0 = PhaseState::on_shell_theta(spec.model().as_ref(), &theta0).unwrap();
        let traj =
            integrate_hamilton(&spec, &s0, (0.0, 1.0), &IntegratorConfig::rk4(1e-3)).unwrap();
        // dθ/dt = p = θ on-shell: θ(t) = θ0 e^t
        let last = traj.states.last().unwrap();
        let exact = &theta0 * 1.0f64.exp();
        assert!((&last.position - exact).amax() < 1e-8);
        assert!(traj.h_drift() <= 1e-8);
    }

    #[test]
    fn off_domain_start_errors_before_stepping() {
        let spec = HamiltonianSpec::new(HamiltonianKind::ConformalIg, gauss()).unwrap();
        let bad = PhaseState::new(
            DVector::from_vec(vec![0.0, 0.5]), // θ² > 0 is off-domain
            DVector::from_vec(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(
            integrate_hamilton(&spec, &bad, (0.0, 1.0), &IntegratorConfig::rk4(1e-3)),
            Err(IgError::Domain(_))
        ));
    }

    #[test]
    fn reparametrize_constant_factor_and_empty() {
        let m = QuadraticModel::identity(2);
        // constant η² = 2 along a synthetic trajectory: t spans [0, 0.5]
        let theta = DVector::from_vec(vec![2.0f64.sqrt(), 0.0]);
        let mut traj = PhaseTrajectory {
            param: ParamName::X0,
            chart: Chart::Theta,
            samples: (0..=10).map(|k| k as f64 * 0.1).collect(),
            states: (0..=10)
                .map(|_| PhaseState::new(theta.clone(), theta.clone()).unwrap())
                .collect(),
            h_values: vec![1.0; 11],
            converged: false,
            boundary_hit: false,
        };
        let out = reparametrize(&traj, &m, &ReparamFactor::EtaSquared).unwrap();
        assert!((out.samples.last().unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(out.points.len(), 11);

        traj.samples.clear();
        traj.states.clear();
        traj.h_values.clear();
        let empty = reparametrize(&traj, &m, &ReparamFactor::EtaSquared).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn euler_defect_values() {
        let m = gauss();
        let theta = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let p = DVector::from_vec(vec![0.8, 0.4]);
        let conf = HamiltonianSpec::new(HamiltonianKind::ConformalIg, m.clone()).unwrap();
        assert!(euler_homogeneity_defect(&conf, &theta, &p).unwrap().abs() < 1e-12);
        let sqrt = HamiltonianSpec::new(HamiltonianKind::IgSqrtTheta, m.clone()).unwrap();
        let defect = euler_homogeneity_defect(&sqrt, &theta, &p).unwrap();
        assert!((defect - 0.707_106_781_186_547_6).abs() < 1e-12);
        let rf = HamiltonianSpec::rf(m, CovectorField::constant_slice(&[0.1, 0.2]));
        assert!(euler_homogeneity_defect(&rf, &theta, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn null_lagrangian_cases() {
        let spec = HamiltonianSpec::new(HamiltonianKind::ConformalIg, gauss()).unwrap();
        let theta0 = GaussianModel::theta_from_mu_sigma(0.0, 1.0).unwrap();
        let s0 = PhaseState::on_shell_theta(spec.model().as_ref(), &theta0).unwrap();
        let traj =
            integrate_hamilton(&spec, &s0, (0.0, 1.0), &IntegratorConfig::rk4(1e-3)).unwrap();
        let res = null_lagrangian_residual(&spec, &traj).unwrap();
        let max = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(max <= 1e-6, "null-Lagrangian residual {max}");

        // constant trajectory: residual is exactly −H
        let h0 = spec.value(&s0.position, &s0.momentum).unwrap();
        let fixed = PhaseTrajectory {
            param: ParamName::X0,
            chart: Chart::Theta,
            samples: vec![0.0, 0.1, 0.2],
            states: vec![s0.clone(), s0.clone(), s0.clone()],
            h_values: vec![h0; 3],
            converged: false,
            boundary_hit: false,
        };
        let res = null_lagrangian_residual(&spec, &fixed).unwrap();
        assert_eq!(res[0], -h0);

        // non-degree-one specs are rejected
        let quad_spec = HamiltonianSpec::new(HamiltonianKind::IgQuadraticTheta, gauss()).unwrap();
        assert!(matches!(
            null_lagrangian_residual(&quad_spec, &fixed),
            Err(IgError::InvalidInput(_))
        ));

        // too few samples
        let short = PhaseTrajectory {
            param: ParamName::X0,
            chart: Chart::Theta,
            samples: vec![0.0],
            states: vec![s0],
            h_values: vec![h0],
            converged: false,
            boundary_hit: false,
        };
        assert!(matches!(
            null_lagrangian_residual(&spec, &short),
            Err(IgError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn rf_spec_construction_rules() {
        assert!(HamiltonianSpec::new(HamiltonianKind::RfIg, quad2()).is_err());
        let spec = HamiltonianSpec::rf(quad2(), CovectorField::zero(2));
        assert!(spec.a_field().is_some());
    }
}
