//! Spectral laboratory for parameter-evolution wave mechanics on periodic
//! grids with signed metric signatures.
//!
//! The crate evolves a complex field ψ(q, s) under
//!
//! ```text
//! iħ ∂ψ/∂s = -(ħ²/2m) ∂_i∂^i ψ + U ψ
//! ```
//!
//! where the contraction `∂_i∂^i` carries a per-axis signature of ±1, and
//! provides the polar-decomposition diagnostics built on top of it: quantum
//! potential, guidance velocity, stability functional, continuity and
//! Hamilton–Jacobi residuals, the stabilizing action integral, and
//! distributional-equivariance checks for trajectory ensembles.
//!
//! Modules:
//!
//! * [`grid`] — periodic grids, signatures, model constants.
//! * [`spectral`] — FFT-based and finite-difference signed derivatives.
//! * [`field`] — wave fields, canonical initial states, snapshot output.
//! * [`evolution`] — split-step and Crank–Nicolson propagators.
//! * [`bohmian`] — polar decomposition and pointwise diagnostics.
//! * [`trajectory`] — guidance-velocity ensembles with exact inverse-CDF
//!   sampling.
//! * [`stats`] — piecewise-linear CDFs and Kolmogorov–Smirnov comparisons.

pub mod bohmian;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod spectral;
pub mod stats;
pub mod trajectory;

pub use bohmian::{Analyzer, ChetaevAction, PolarField, Residual, VelocityField};
pub use error::{CoreError, Result};
pub use evolution::{EvolveConfig, Evolution, Evolver, Expectation, Potential, Scheme};
pub use field::WaveField;
pub use grid::{AxisSpec, GridSpec, MetricSignature, ModelConstants};
pub use spectral::{DerivativeBackend, SpectralEngine};
pub use stats::{
    equivariance_report, ks_critical_1pct, ks_statistic, EquivarianceReport, PiecewiseLinearCdf,
};
pub use trajectory::{
    propagate, propagate_positions, sample_positions, Integrator, TrajectoryConfig,
    TrajectoryEnsemble,
};
