//! Numerics for dually-flat geometry.
//!
//! The crate implements the pieces needed to study natural-gradient flows
//! as Hamiltonian flows:
//!
//! - [`model`]: convex potentials with dual coordinates, Hessian metrics,
//!   cubic tensors, α-connections, Bregman divergences, and the scalar
//!   fields η²(θ), θ²(η), χ²(θ) (Gaussian and quadratic instances).
//! - [`flows`]: gradient-flow right-hand sides, their linear dual-chart
//!   solutions, the Gaussian closed form, and rate/pre-geodesic checks.
//! - [`hamiltonian`]: the square-root, quadratic, conformal and
//!   Randers-deformed Hamiltonians, Hamilton equations, reparametrization
//!   between the geodesic parameter and flow time, and homogeneity
//!   diagnostics.
//! - [`spacetime`]: stationary (lapse/shift/spatial-metric) metrics, null
//!   momenta, the reduced Hamiltonians ℋ±, Zermelo and Randers
//!   conversions, conformal rescaling, and the bridge that realizes a
//!   model as such a metric.
//! - [`cli`]: the `igflow` experiment runner (CSV/JSON outputs).
//!
//! Everything is deterministic: fixed-step RK4 by default, seeded sampling
//! everywhere randomness appears.

pub mod chart;
pub mod checks;
pub mod cli;
pub mod error;
pub mod fields;
pub mod flows;
pub mod hamiltonian;
pub mod integrate;
pub mod interp;
pub mod linalg;
pub mod model;
pub mod output;
pub mod sampling;
pub mod spacetime;

pub use chart::{Chart, ChartPoint};
pub use error::{IgError, Result, EPS_SING};
pub use linalg::{CubicTensor, SymMatrix};
pub use model::{DuallyFlatModel, FiniteDiffModel, GaussianModel, QuadraticModel};
