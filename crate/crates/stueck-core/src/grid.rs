//! Rectangular periodic grids, per-axis metric signs and model constants.
//!
//! Configuration space is a product of periodic intervals `[lo, hi)`, one per
//! axis, sampled on `n` uniformly spaced nodes.  Index contractions such as
//! `∂_i ∂^i` carry a per-axis sign `±1` supplied by [`MetricSignature`], so the
//! same operators serve both Euclidean and indefinite (Minkowski-like)
//! configuration spaces.

use crate::error::{CoreError, Result};

/// Dimensions supported by the grid machinery.
pub const SUPPORTED_DIMS: [usize; 3] = [1, 2, 4];

/// Minimum number of nodes per axis.
pub const MIN_NODES: usize = 8;

/// One periodic axis: the half-open interval `[lo, hi)` sampled on `n` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    /// Lower edge of the interval.
    pub lo: f64,
    /// Upper edge of the interval (excluded; the grid wraps around).
    pub hi: f64,
    /// Number of nodes.
    pub n: usize,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        AxisSpec { lo, hi, n }
    }

    /// Period of the axis, `hi - lo`.
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Node spacing `h = (hi - lo) / n`.
    pub fn spacing(&self) -> f64 {
        self.length() / self.n as f64
    }

    /// Coordinate of node `j`.
    pub fn node(&self, j: usize) -> f64 {
        self.lo + j as f64 * self.spacing()
    }

    /// All node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Wraps a coordinate into `[lo, hi)`.
    pub fn wrap(&self, q: f64) -> f64 {
        (q - self.lo).rem_euclid(self.length()) + self.lo
    }
}

/// A D-dimensional periodic grid (D ∈ {1, 2, 4}), row-major node ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<AxisSpec>,
}

impl GridSpec {
    /// Builds a grid, validating dimension, extents and node counts.
    pub fn new(axes: Vec<AxisSpec>) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&axes.len()) {
            return Err(CoreError::InvalidGrid(format!(
                "dimension must be one of {:?}, got {}",
                SUPPORTED_DIMS,
                axes.len()
            )));
        }
        for (a, ax) in axes.iter().enumerate() {
            if !ax.lo.is_finite() || !ax.hi.is_finite() || ax.hi <= ax.lo {
                return Err(CoreError::InvalidGrid(format!(
                    "axis {a}: extent [{}, {}) is not a finite non-empty interval",
                    ax.lo, ax.hi
                )));
            }
            if ax.n < MIN_NODES {
                return Err(CoreError::InvalidGrid(format!(
                    "axis {a}: need at least {MIN_NODES} nodes, got {}",
                    ax.n
                )));
            }
        }
        Ok(GridSpec { axes })
    }

    /// Convenience constructor for a cubic grid: every axis is `[lo, hi)` with `n` nodes.
    pub fn cubic(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        GridSpec::new(vec![AxisSpec::new(lo, hi, n); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    /// Node counts per axis, in storage order.
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    /// Total number of nodes.
    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    /// Volume element `dV = Π_a h_a` used by all quadratures.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Wraps a point into the fundamental domain, axis by axis.
    pub fn wrap(&self, point: &mut [f64]) {
        for (x, ax) in point.iter_mut().zip(&self.axes) {
            *x = ax.wrap(*x);
        }
    }
}

/// Per-axis signs of the index-raising metric, each `+1` or `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSignature {
    signs: Vec<f64>,
}

impl MetricSignature {
    /// Builds a signature from explicit `±1` entries.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if !SUPPORTED_DIMS.contains(&signs.len()) {
            return Err(CoreError::InvalidGrid(format!(
                "signature dimension must be one of {:?}, got {}",
                SUPPORTED_DIMS,
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(CoreError::InvalidParameter(format!(
                "signature entries must be +1 or -1, got {signs:?}"
            )));
        }
        Ok(MetricSignature {
            signs: signs.iter().map(|&s| s as f64).collect(),
        })
    }

    /// All-plus signature in `dim` dimensions.
    pub fn euclidean(dim: usize) -> Result<Self> {
        MetricSignature::new(vec![1; dim])
    }

    /// The 4-dimensional `{+, -, -, -}` signature.
    pub fn minkowski() -> Self {
        MetricSignature::new(vec![1, -1, -1, -1]).expect("static signature is valid")
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// Signs as `f64` multipliers, one per axis.
    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn sign(&self, axis: usize) -> f64 {
        self.signs[axis]
    }

    pub fn is_euclidean(&self) -> bool {
        self.signs.iter().all(|&s| s == 1.0)
    }
}

/// Model constants ħ and m.  The phase-to-action scale is `k = 1/ħ` by
/// construction, so `k·ħ = 1` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConstants {
    hbar: f64,
    mass: f64,
}

impl ModelConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "hbar must be finite and positive, got {hbar}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "mass must be finite and positive, got {mass}"
            )));
        }
        Ok(ModelConstants { hbar, mass })
    }

    /// Model units: ħ = m = 1.
    pub fn model_units() -> Self {
        ModelConstants {
            hbar: 1.0,
            mass: 1.0,
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Wavenumber per unit action, `k = 1/ħ`.
    pub fn k(&self) -> f64 {
        1.0 / self.hbar
    }
}
