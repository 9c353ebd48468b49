//! Sampling and distribution-comparison utilities shared by the trajectory
//! integrator and the equivariance diagnostics.
//!
//! Node densities on a periodic axis are interpreted as piecewise-linear
//! between nodes (the cell between the last and first node wraps around).
//! The same [`PiecewiseLinearCdf`] backs both inverse-CDF sampling and the
//! distribution function used in the Kolmogorov–Smirnov comparison, so a
//! freshly drawn ensemble scores a KS distance that is pure sampling noise.

use ndarray::{ArrayD, Axis};

use crate::error::{CoreError, Result};
use crate::evolution::Evolution;
use crate::grid::GridSpec;
use crate::trajectory::TrajectoryEnsemble;

/// Coefficient of the large-sample KS critical value at the 1% level:
/// `D_crit ≈ 1.63 / sqrt(n)`.
pub const KS_CRITICAL_COEFF_1PCT: f64 = 1.63;

/// Large-sample 1% critical value for the one-sample KS distance.
pub fn ks_critical_1pct(n: usize) -> f64 {
    KS_CRITICAL_COEFF_1PCT / (n as f64).sqrt()
}

/// Normalized cumulative distribution of a piecewise-linear density on a
/// periodic axis with `n` uniformly spaced nodes starting at `lo`.
#[derive(Debug, Clone)]
pub struct PiecewiseLinearCdf {
    lo: f64,
    h: f64,
    n: usize,
    /// Node densities with the wrap node repeated: `nodes[n] == nodes[0]`.
    nodes: Vec<f64>,
    /// `prefix[j]` = unnormalized mass of cells `[0, j)`; `prefix[n]` = total.
    prefix: Vec<f64>,
}

impl PiecewiseLinearCdf {
    /// Builds the CDF from node densities (negative dust is clamped to zero).
    pub fn new(node_density: &[f64], lo: f64, h: f64) -> Result<Self> {
        let n = node_density.len();
        if n < 2 || !(h > 0.0 && h.is_finite()) || !lo.is_finite() {
            return Err(CoreError::InvalidParameter(
                "piecewise-linear CDF needs at least two nodes and a positive spacing".into(),
            ));
        }
        let mut nodes: Vec<f64> = node_density.iter().map(|&p| p.max(0.0)).collect();
        if nodes.iter().any(|p| !p.is_finite()) {
            return Err(CoreError::InvalidParameter(
                "node densities must be finite".into(),
            ));
        }
        nodes.push(nodes[0]);
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for j in 0..n {
            acc += 0.5 * h * (nodes[j] + nodes[j + 1]);
            prefix.push(acc);
        }
        if !(acc.is_finite() && acc > 0.0) {
            return Err(CoreError::InvalidParameter(
                "density carries no probability mass".into(),
            ));
        }
        Ok(PiecewiseLinearCdf { lo, h, n, nodes, prefix })
    }

    /// Total unnormalized mass.
    pub fn total_mass(&self) -> f64 {
        self.prefix[self.n]
    }

    fn length(&self) -> f64 {
        self.h * self.n as f64
    }

    /// Normalized CDF at `q` (wrapped into the axis domain).
    pub fn cdf(&self, q: f64) -> f64 {
        let x = (q - self.lo).rem_euclid(self.length());
        let mut j = (x / self.h) as usize;
        if j >= self.n {
            j = self.n - 1;
        }
        let t = (x / self.h - j as f64).clamp(0.0, 1.0);
        let p0 = self.nodes[j];
        let slope = self.nodes[j + 1] - p0;
        let m = self.prefix[j] + self.h * (p0 * t + 0.5 * slope * t * t);
        (m / self.total_mass()).clamp(0.0, 1.0)
    }

    /// Inverse CDF: maps `u ∈ [0, 1)` to a coordinate, also returning the cell
    /// index and the fractional position inside it.
    pub fn sample_with_cell(&self, u: f64) -> (f64, usize, f64) {
        let target = u.clamp(0.0, 1.0) * self.total_mass();
        // Last cell whose prefix does not exceed the target.
        let mut j = self.prefix.partition_point(|&m| m <= target);
        j = j.saturating_sub(1).min(self.n - 1);
        let r = (target - self.prefix[j]).max(0.0);
        let p0 = self.nodes[j];
        let slope = self.nodes[j + 1] - p0;
        let scale = p0.abs().max(slope.abs()).max(1e-300);
        let t = if slope.abs() <= 1e-14 * scale {
            if p0 > 0.0 {
                r / (self.h * p0)
            } else {
                0.0
            }
        } else {
            // Solve h (p0 t + slope t²/2) = r for t, taking the root that
            // grows from t = 0 as r grows.
            let disc = (p0 * p0 + 2.0 * slope * r / self.h).max(0.0);
            (disc.sqrt() - p0) / slope
        };
        let t = t.clamp(0.0, 1.0 - 1e-12);
        (self.lo + (j as f64 + t) * self.h, j, t)
    }

    /// Inverse CDF without cell bookkeeping.
    pub fn sample(&self, u: f64) -> f64 {
        self.sample_with_cell(u).0
    }
}

/// Node values of the marginal density along `axis` (unnormalized sums over
/// the remaining axes).
pub fn marginal_node_density(density: &ArrayD<f64>, axis: usize) -> Vec<f64> {
    let n = density.shape()[axis];
    (0..n)
        .map(|j| density.index_axis(Axis(axis), j).sum())
        .collect()
}

/// Two-sided one-sample Kolmogorov–Smirnov distance between a sample and a
/// reference distribution function.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sample.len();
    assert!(n > 0, "KS distance of an empty sample");
    let mut sorted: Vec<f64> = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample value"));
    let nf = n as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }
    d
}

/// Per-snapshot KS comparison of a trajectory ensemble against the marginal
/// densities of the evolved field: the distributional-equivariance check.
#[derive(Debug, Clone)]
pub struct EquivarianceReport {
    /// Snapshot times.
    pub times: Vec<f64>,
    /// KS distance at each snapshot (maximum over axes in d > 1).
    pub ks: Vec<f64>,
    /// KS distance of the freshly drawn initial ensemble.
    pub initial: f64,
    /// Largest KS distance over all snapshots.
    pub max: f64,
    /// KS distance at the final snapshot.
    pub final_ks: f64,
    /// 1% critical value `1.63/sqrt(n)` for this ensemble size.
    pub critical_1pct: f64,
    pub n_trajectories: usize,
    pub resampled: usize,
    pub dead: usize,
}

/// Builds the equivariance report for an ensemble propagated through the
/// snapshots of `evolution`.
pub fn equivariance_report(
    evolution: &Evolution,
    ensemble: &TrajectoryEnsemble,
) -> Result<EquivarianceReport> {
    let snaps = &evolution.snapshots;
    if snaps.len() != ensemble.times().len() {
        return Err(CoreError::ShapeMismatch(format!(
            "{} snapshots but ensemble has {} position frames",
            snaps.len(),
            ensemble.times().len()
        )));
    }
    let n_traj = ensemble.n_trajectories();
    let mut ks = Vec::with_capacity(snaps.len());
    for (k, snap) in snaps.iter().enumerate() {
        let density = snap.probability_density();
        let positions = ensemble.positions_at(k);
        let mut worst = 0.0_f64;
        for axis in 0..snap.grid().dim() {
            let marginal = marginal_node_density(&density, axis);
            let ax = &snap.grid().axes()[axis];
            let cdf = PiecewiseLinearCdf::new(&marginal, ax.lo, ax.spacing())?;
            let coords: Vec<f64> = positions.column(axis).to_vec();
            worst = worst.max(ks_statistic(&coords, |q| cdf.cdf(q)));
        }
        ks.push(worst);
    }
    let initial = ks[0];
    let max = ks.iter().copied().fold(0.0, f64::max);
    let final_ks = *ks.last().expect("at least one snapshot");
    Ok(EquivarianceReport {
        times: ensemble.times().to_vec(),
        ks,
        initial,
        max,
        final_ks,
        critical_1pct: ks_critical_1pct(n_traj),
        n_trajectories: n_traj,
        resampled: ensemble.resampled(),
        dead: ensemble.dead(),
    })
}

/// Convenience container pairing a grid axis with its CDF.
pub(crate) fn axis_cdf(grid: &GridSpec, axis: usize, marginal: &[f64]) -> Result<PiecewiseLinearCdf> {
    let ax = &grid.axes()[axis];
    PiecewiseLinearCdf::new(marginal, ax.lo, ax.spacing())
}
