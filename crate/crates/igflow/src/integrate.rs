//! Fixed-step RK4 and adaptive RK45 (Dormand–Prince) integrators.
//!
//! The systems integrated here are smooth and low-dimensional, and every
//! numeric check in the crate is pinned against exact trajectories, so the
//! default is fixed-step RK4: bit-reproducible runs matter more than step
//! control. The adaptive path exists for convenience.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::chart::Chart;
use crate::error::{IgError, Result};

/// Fixed-point detection threshold on the RHS norm; integration stops
/// early with `converged = true` below it.
pub const FIXED_POINT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    T,
    X0,
    Tau,
}

impl ParamName {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::T => "t",
            ParamName::X0 => "x0",
            ParamName::Tau => "tau",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Rk4Fixed { step: f64 },
    Rk45Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    #[serde(flatten)]
    pub method: Method,
    pub max_steps: usize,
    pub domain_guard: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed { step: 1e-3 },
            max_steps: 2_000_000,
            domain_guard: true,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4Fixed { step },
            ..Default::default()
        }
    }

    pub fn rk45(rtol: f64, atol: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45Adaptive { rtol, atol },
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4Fixed { step } => {
                if !(step > 0.0) {
                    return Err(IgError::Config(format!("step must be > 0, got {step}")));
                }
            }
            Method::Rk45Adaptive { rtol, atol } => {
                if !(rtol > 0.0) || !(atol > 0.0) {
                    return Err(IgError::Config(format!(
                        "tolerances must be > 0, got rtol={rtol}, atol={atol}"
                    )));
                }
            }
        }
        if self.max_steps == 0 {
            return Err(IgError::Config("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Monotone parameter samples with coordinate points in a single chart.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub param: ParamName,
    pub chart: Chart,
    pub samples: Vec<f64>,
    pub points: Vec<DVector<f64>>,
    /// Optional named per-sample scalar columns (psi, psi_star, H, …).
    pub scalars: Vec<(String, Vec<f64>)>,
    pub converged: bool,
    pub boundary_hit: bool,
}

impl Trajectory {
    pub fn empty(param: ParamName, chart: Chart) -> Self {
        Trajectory {
            param,
            chart,
            samples: Vec::new(),
            points: Vec::new(),
            scalars: Vec::new(),
            converged: false,
            boundary_hit: false,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn endpoint(&self) -> Option<(&f64, &DVector<f64>)> {
        Some((self.samples.last()?, self.points.last()?))
    }

    /// Attaches a scalar column; length must match the sample count.
    pub fn push_scalar_column(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.samples.len() {
            return Err(IgError::InvalidInput(format!(
                "scalar column '{name}' has {} values for {} samples",
                values.len(),
                self.samples.len()
            )));
        }
        self.scalars.push((name.to_string(), values));
        Ok(())
    }
}

/// Outcome of a guarded RHS evaluation inside a step.
enum StepEval {
    Ok(DVector<f64>),
    Boundary,
}

fn eval_guarded<F>(rhs: &mut F, y: &DVector<f64>, cfg: &IntegratorConfig, t: f64) -> Result<StepEval>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    match rhs(y) {
        Ok(v) => Ok(StepEval::Ok(v)),
        Err(e) if e.is_boundary_kind() => {
            if cfg.domain_guard {
                Ok(StepEval::Boundary)
            } else {
                Err(IgError::DomainBoundaryHit {
                    param: t,
                    state: y.iter().copied().collect(),
                })
            }
        }
        Err(e) => Err(e),
    }
}

/// Integrates the autonomous system `dy/dparam = rhs(y)` over `span`.
///
/// The first RHS evaluation happens before any stepping, so an off-domain
/// initial state fails with the underlying error (typically `Domain`).
/// Mid-run boundary errors either truncate the trajectory (domain guard on,
/// `boundary_hit` flag set) or abort with `DomainBoundaryHit` carrying the
/// last valid state.
pub fn integrate<F>(
    mut rhs: F,
    y0: &DVector<f64>,
    span: (f64, f64),
    cfg: &IntegratorConfig,
    param: ParamName,
    chart: Chart,
) -> Result<Trajectory>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    cfg.validate()?;
    let (t0, t1) = span;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(IgError::InvalidInput(format!(
            "integration span must be finite with t1 > t0, got [{t0}, {t1}]"
        )));
    }
    // Off-domain start errors out before any stepping.
    let f0 = rhs(y0)?;

    let mut traj = Trajectory::empty(param, chart);
    traj.samples.push(t0);
    traj.points.push(y0.clone());

    if f0.amax() < FIXED_POINT_TOL {
        traj.converged = true;
        return Ok(traj);
    }

    match cfg.method {
        Method::Rk4Fixed { step } => rk4_loop(&mut rhs, traj, t1, step, cfg),
        Method::Rk45Adaptive { rtol, atol } => rk45_loop(&mut rhs, traj, t1, rtol, atol, cfg, f0),
    }
}

fn rk4_loop<F>(
    rhs: &mut F,
    mut traj: Trajectory,
    t1: f64,
    step: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut steps = 0usize;
    'outer: loop {
        let t = *traj.samples.last().unwrap();
        if t >= t1 {
            break;
        }
        if steps >= cfg.max_steps {
            return Err(IgError::StepLimitExceeded(cfg.max_steps));
        }
        steps += 1;
        let h = step.min(t1 - t);
        let y = traj.points.last().unwrap().clone();

        let mut ks: Vec<DVector<f64>> = Vec::with_capacity(4);
        for (c, prev_scale) in [(0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)] {
            let stage_y = if ks.is_empty() {
                y.clone()
            } else {
                &y + ks.last().unwrap() * (h * prev_scale)
            };
            let _ = c;
            match eval_guarded(rhs, &stage_y, cfg, t)? {
                StepEval::Ok(k) => ks.push(k),
                StepEval::Boundary => {
                    traj.boundary_hit = true;
                    break 'outer;
                }
            }
        }
        let y_new = &y + (&ks[0] + &ks[1] * 2.0 + &ks[2] * 2.0 + &ks[3]) * (h / 6.0);
        let t_new = t + h;

        // Accept only if the new point is still evaluable.
        let f_new = match eval_guarded(rhs, &y_new, cfg, t)? {
            StepEval::Ok(f) => f,
            StepEval::Boundary => {
                traj.boundary_hit = true;
                break;
            }
        };
        traj.samples.push(t_new);
        traj.points.push(y_new);
        if f_new.amax() < FIXED_POINT_TOL {
            traj.converged = true;
            break;
        }
    }
    Ok(traj)
}

// Dormand–Prince 5(4) coefficients.
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk45_loop<F>(
    rhs: &mut F,
    mut traj: Trajectory,
    t1: f64,
    rtol: f64,
    atol: f64,
    cfg: &IntegratorConfig,
    f0: DVector<f64>,
) -> Result<Trajectory>
where
    F: FnMut(&DVector<f64>) -> Result<DVector<f64>>,
{
    let t0 = traj.samples[0];
    let mut h = (t1 - t0) / 100.0;
    let h_min = (t1 - t0) * 1e-14;
    let mut k1 = f0; // FSAL
    let mut steps = 0usize;

    'outer: loop {
        let t = *traj.samples.last().unwrap();
        if t >= t1 {
            break;
        }
        if steps >= cfg.max_steps {
            return Err(IgError::StepLimitExceeded(cfg.max_steps));
        }
        steps += 1;
        h = h.min(t1 - t);
        if h < h_min {
            return Err(IgError::Convergence(
                "adaptive step size underflow".into(),
            ));
        }
        let y = traj.points.last().unwrap().clone();

        let mut ks: Vec<DVector<f64>> = vec![k1.clone()];
        for stage in 0..6 {
            let mut stage_y = y.clone();
            for (j, k) in ks.iter().enumerate() {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    stage_y += k * (h * a);
                }
            }
            match eval_guarded(rhs, &stage_y, cfg, t)? {
                StepEval::Ok(k) => ks.push(k),
                StepEval::Boundary => {
                    traj.boundary_hit = true;
                    break 'outer;
                }
            }
        }

        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for (j, k) in ks.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                y5 += k * (h * DP_B5[j]);
            }
            let d = DP_B5[j] - DP_B4[j];
            if d != 0.0 {
                err += k * (h * d);
            }
        }

        let mut err_norm = 0.0f64;
        for i in 0..y.len() {
            let scale = atol + rtol * y[i].abs().max(y5[i].abs());
            err_norm += (err[i] / scale).powi(2);
        }
        err_norm = (err_norm / y.len() as f64).sqrt();

        if err_norm <= 1.0 {
            // k7 of the accepted step is f(y5): FSAL.
            let k7 = ks[6].clone();
            traj.samples.push(t + h);
            traj.points.push(y5);
            if k7.amax() < FIXED_POINT_TOL {
                traj.converged = true;
                break;
            }
            k1 = k7;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay_rhs(y: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(-y)
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::rk4(0.0).validate().is_err());
        assert!(IntegratorConfig::rk45(1e-9, 0.0).validate().is_err());
        let mut c = IntegratorConfig::default();
        c.max_steps = 0;
        assert!(c.validate().is_err());
        assert!(IntegratorConfig::default().validate().is_ok());
    }

    #[test]
    fn rk4_matches_exponential_decay() {
        let y0 = DVector::from_vec(vec![2.0]);
        let traj = integrate(
            decay_rhs,
            &y0,
            (0.0, 1.0),
            &IntegratorConfig::rk4(1e-3),
            ParamName::T,
            Chart::Theta,
        )
        .unwrap();
        let (t, y) = traj.endpoint().unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((y[0] - 2.0 * (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn rk45_matches_exponential_decay() {
        let y0 = DVector::from_vec(vec![2.0]);
        let traj = integrate(
            decay_rhs,
            &y0,
            (0.0, 1.0),
            &IntegratorConfig::rk45(1e-9, 1e-12),
            ParamName::T,
            Chart::Theta,
        )
        .unwrap();
        let (_, y) = traj.endpoint().unwrap();
        assert!((y[0] - 2.0 * (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn step_limit_exceeded() {
        let y0 = DVector::from_vec(vec![1.0]);
        let mut cfg = IntegratorConfig::rk4(1e-3);
        cfg.max_steps = 10;
        let err = integrate(decay_rhs, &y0, (0.0, 1.0), &cfg, ParamName::T, Chart::Theta)
            .unwrap_err();
        assert!(matches!(err, IgError::StepLimitExceeded(10)));
    }

    #[test]
    fn fixed_point_sets_converged() {
        let y0 = DVector::from_vec(vec![0.0]);
        let traj = integrate(
            decay_rhs,
            &y0,
            (0.0, 5.0),
            &IntegratorConfig::rk4(1e-2),
            ParamName::T,
            Chart::Theta,
        )
        .unwrap();
        assert!(traj.converged);
        assert_eq!(traj.len(), 1);
    }

    // RHS with a wall at y >= 1: errors beyond it.
    fn walled_rhs(y: &DVector<f64>) -> Result<DVector<f64>> {
        if y[0] >= 1.0 {
            return Err(IgError::Domain("wall".into()));
        }
        Ok(DVector::from_vec(vec![1.0]))
    }

    #[test]
    fn domain_guard_truncates() {
        let y0 = DVector::from_vec(vec![0.0]);
        let traj = integrate(
            walled_rhs,
            &y0,
            (0.0, 2.0),
            &IntegratorConfig::rk4(1e-2),
            ParamName::T,
            Chart::Theta,
        )
        .unwrap();
        assert!(traj.boundary_hit);
        let (t, y) = traj.endpoint().unwrap();
        assert!(*t < 1.01);
        assert!(y[0] < 1.0);
    }

    #[test]
    fn guard_off_reports_boundary_hit() {
        let y0 = DVector::from_vec(vec![0.0]);
        let mut cfg = IntegratorConfig::rk4(1e-2);
        cfg.domain_guard = false;
        let err = integrate(walled_rhs, &y0, (0.0, 2.0), &cfg, ParamName::T, Chart::Theta)
            .unwrap_err();
        match err {
            IgError::DomainBoundaryHit { param, state } => {
                assert!(param < 1.01);
                assert!(state[0] < 1.0);
            }
            other => panic!("expected DomainBoundaryHit, got {other:?}"),
        }
    }

    #[test]
    fn off_domain_start_is_a_plain_error() {
        let y0 = DVector::from_vec(vec![2.0]);
        let err = integrate(
            walled_rhs,
            &y0,
            (0.0, 1.0),
            &IntegratorConfig::rk4(1e-2),
            ParamName::T,
            Chart::Theta,
        )
        .unwrap_err();
        assert!(matches!(err, IgError::Domain(_)));
    }

    #[test]
    fn scalar_column_length_checked() {
        let mut traj = Trajectory::empty(ParamName::T, Chart::Theta);
        traj.samples.push(0.0);
        traj.points.push(DVector::zeros(1));
        assert!(traj.push_scalar_column("psi", vec![1.0, 2.0]).is_err());
        assert!(traj.push_scalar_column("psi", vec![1.0]).is_ok());
    }
}
