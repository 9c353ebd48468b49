//! Guidance-velocity trajectory ensembles.
//!
//! Initial positions are drawn from the node density by exact inverse-CDF
//! sampling (piecewise-linear in each axis, conditioned axis by axis in
//! d > 1).  Each trajectory owns a counter-mode RNG stream keyed by its index,
//! so ensembles are reproducible bit-for-bit regardless of thread count.
//!
//! Between consecutive snapshots the velocity field is interpolated
//! multilinearly in space and linearly in s, and positions advance by one RK4
//! step per snapshot interval.  A trajectory that probes a masked node (NaN
//! velocity) is redrawn from the current density; one that cannot be placed
//! after [`MAX_REDRAWS`] attempts is frozen and counted as dead.

use ndarray::{Array2, ArrayD, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bohmian::{Analyzer, VelocityField};
use crate::error::{CoreError, Result};
use crate::evolution::Evolution;
use crate::grid::GridSpec;
use crate::stats::{axis_cdf, marginal_node_density, PiecewiseLinearCdf};

/// Largest configuration-space dimension the integrator handles.
const MAX_DIM: usize = 4;

/// Redraw attempts before a trajectory is declared dead.
pub const MAX_REDRAWS: usize = 16;

/// Stepping rule used between snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Classical fourth-order Runge–Kutta (default).
    #[default]
    Rk4,
    /// Forward Euler, kept for step-error comparisons.
    Euler,
}

/// Ensemble size, RNG seed, and stepping rule for a trajectory run.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    pub seed: u64,
    pub integrator: Integrator,
}

impl TrajectoryConfig {
    pub fn new(n_trajectories: usize, seed: u64) -> Self {
        TrajectoryConfig {
            n_trajectories,
            seed,
            integrator: Integrator::Rk4,
        }
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }
}

/// Positions of every trajectory at every stored snapshot.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    times: Vec<f64>,
    /// One `(n_trajectories, dim)` frame per snapshot.
    frames: Vec<Array2<f64>>,
    seed: u64,
    integrator: Integrator,
    resampled: usize,
    dead: usize,
}

impl TrajectoryEnsemble {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_snapshots(&self) -> usize {
        self.frames.len()
    }

    pub fn n_trajectories(&self) -> usize {
        self.frames.first().map_or(0, |f| f.nrows())
    }

    pub fn dim(&self) -> usize {
        self.frames.first().map_or(0, |f| f.ncols())
    }

    /// Positions at snapshot `k`, shaped `(n_trajectories, dim)`.
    pub fn positions_at(&self, k: usize) -> ArrayView2<'_, f64> {
        self.frames[k].view()
    }

    /// Number of redraw events over the whole run.
    pub fn resampled(&self) -> usize {
        self.resampled
    }

    /// Trajectories frozen after exhausting their redraws.
    pub fn dead(&self) -> usize {
        self.dead
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn integrator(&self) -> Integrator {
        self.integrator
    }
}

/// Inverse-CDF sampler for a node density on a periodic grid.
///
/// Axis 0 is drawn from its marginal; each later axis from the conditional
/// density obtained by linear interpolation of the already-fixed coordinates.
pub struct DensitySampler {
    grid: GridSpec,
    density: ArrayD<f64>,
    marginal0: PiecewiseLinearCdf,
}

impl DensitySampler {
    pub fn new(grid: &GridSpec, density: &ArrayD<f64>) -> Result<Self> {
        if density.shape() != grid.shape().as_slice() {
            return Err(CoreError::ShapeMismatch(format!(
                "density shape {:?} does not match grid shape {:?}",
                density.shape(),
                grid.shape()
            )));
        }
        let marginal0 = axis_cdf(grid, 0, &marginal_node_density(density, 0))?;
        Ok(DensitySampler {
            grid: grid.clone(),
            density: density.clone(),
            marginal0,
        })
    }

    /// Draws one position into `out` (length = grid dimension).
    pub fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) -> Result<()> {
        let dim = self.grid.dim();
        debug_assert_eq!(out.len(), dim);
        let (q0, j0, t0) = self.marginal0.sample_with_cell(rng.gen());
        out[0] = q0;
        if dim == 1 {
            return Ok(());
        }
        let n0 = self.grid.axes()[0].n;
        let mut slab = {
            let lo = self.density.index_axis(ndarray::Axis(0), j0);
            let hi = self.density.index_axis(ndarray::Axis(0), (j0 + 1) % n0);
            let mut s = lo.mapv(|v| v * (1.0 - t0));
            s.zip_mut_with(&hi, |o, &v| *o += t0 * v);
            s
        };
        for (axis, slot) in out.iter_mut().enumerate().skip(1) {
            let marginal = marginal_node_density(&slab, 0);
            let cdf = axis_cdf(&self.grid, axis, &marginal)?;
            let (q, j, t) = cdf.sample_with_cell(rng.gen());
            *slot = q;
            if axis + 1 < dim {
                let n = self.grid.axes()[axis].n;
                let next = {
                    let lo = slab.index_axis(ndarray::Axis(0), j);
                    let hi = slab.index_axis(ndarray::Axis(0), (j + 1) % n);
                    let mut s = lo.mapv(|v| v * (1.0 - t));
                    s.zip_mut_with(&hi, |o, &v| *o += t * v);
                    s
                };
                slab = next;
            }
        }
        Ok(())
    }
}

/// Draws `n` positions from a node density, one RNG stream per row.
pub fn sample_positions(
    grid: &GridSpec,
    density: &ArrayD<f64>,
    n: usize,
    seed: u64,
) -> Result<Array2<f64>> {
    if n == 0 {
        return Err(CoreError::InvalidParameter(
            "ensemble size must be positive".into(),
        ));
    }
    let sampler = DensitySampler::new(grid, density)?;
    let dim = grid.dim();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let mut row = vec![0.0; dim];
            sampler.draw(&mut rng, &mut row).map(|_| row)
        })
        .collect::<Result<_>>()?;
    let mut out = Array2::zeros((n, dim));
    for (i, row) in rows.iter().enumerate() {
        out.row_mut(i).iter_mut().zip(row).for_each(|(o, &v)| *o = v);
    }
    Ok(out)
}

/// Per-trajectory RNG: one counter-mode stream per index.
fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

struct TrajState {
    x: [f64; MAX_DIM],
    rng: ChaCha8Rng,
    alive: bool,
    resampled: u32,
}

/// Multilinear interpolation of the velocity components at `x`; `None` when
/// any touched node is masked (NaN).
fn interp_velocity(
    v: &VelocityField,
    grid: &GridSpec,
    x: &[f64; MAX_DIM],
    out: &mut [f64; MAX_DIM],
) -> bool {
    let dim = grid.dim();
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0f64; MAX_DIM];
    for a in 0..dim {
        let ax = &grid.axes()[a];
        let rel = (x[a] - ax.lo).rem_euclid(ax.length()) / ax.spacing();
        let mut j = rel as usize;
        if j >= ax.n {
            j = ax.n - 1;
        }
        base[a] = j;
        frac[a] = (rel - j as f64).clamp(0.0, 1.0);
    }
    out[..dim].fill(0.0);
    let mut idx = [0usize; MAX_DIM];
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        for a in 0..dim {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx[a] = (base[a] + 1) % grid.axes()[a].n;
            } else {
                w *= 1.0 - frac[a];
                idx[a] = base[a];
            }
        }
        for (a, comp) in v.components.iter().enumerate() {
            let node = comp[&idx[..dim]];
            if !node.is_finite() {
                return false;
            }
            out[a] += w * node;
        }
    }
    true
}

/// One RK4 step of length `h` through velocity frames at the interval start
/// (`v0`) and end (`v1`), linear in s between them.
fn rk4_step(
    v0: &VelocityField,
    v1: &VelocityField,
    grid: &GridSpec,
    x: &[f64; MAX_DIM],
    h: f64,
) -> Option<[f64; MAX_DIM]> {
    let dim = grid.dim();
    let mut k1 = [0.0; MAX_DIM];
    let mut k2 = [0.0; MAX_DIM];
    let mut k3 = [0.0; MAX_DIM];
    let mut k4 = [0.0; MAX_DIM];
    let mut probe = [0.0; MAX_DIM];
    let mut tmp0 = [0.0; MAX_DIM];
    let mut tmp1 = [0.0; MAX_DIM];

    if !interp_velocity(v0, grid, x, &mut k1) {
        return None;
    }

    let mid = |kin: &[f64; MAX_DIM],
                   probe: &mut [f64; MAX_DIM],
                   tmp0: &mut [f64; MAX_DIM],
                   tmp1: &mut [f64; MAX_DIM],
                   kout: &mut [f64; MAX_DIM]|
     -> bool {
        for a in 0..dim {
            probe[a] = grid.axes()[a].wrap(x[a] + 0.5 * h * kin[a]);
        }
        if !interp_velocity(v0, grid, probe, tmp0) || !interp_velocity(v1, grid, probe, tmp1) {
            return false;
        }
        for a in 0..dim {
            kout[a] = 0.5 * (tmp0[a] + tmp1[a]);
        }
        true
    };

    if !mid(&k1, &mut probe, &mut tmp0, &mut tmp1, &mut k2) {
        return None;
    }
    if !mid(&k2, &mut probe, &mut tmp0, &mut tmp1, &mut k3) {
        return None;
    }
    for a in 0..dim {
        probe[a] = grid.axes()[a].wrap(x[a] + h * k3[a]);
    }
    if !interp_velocity(v1, grid, &probe, &mut k4) {
        return None;
    }

    let mut next = [0.0; MAX_DIM];
    for a in 0..dim {
        next[a] = grid.axes()[a].wrap(x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]));
    }
    Some(next)
}

/// Propagates an ensemble drawn from the initial snapshot's density.
pub fn propagate(
    evolution: &Evolution,
    analyzer: &Analyzer,
    config: &TrajectoryConfig,
) -> Result<TrajectoryEnsemble> {
    let snaps = &evolution.snapshots;
    if snaps.is_empty() {
        return Err(CoreError::InvalidParameter(
            "evolution holds no snapshots".into(),
        ));
    }
    if config.n_trajectories == 0 {
        return Err(CoreError::InvalidParameter(
            "ensemble size must be positive".into(),
        ));
    }
    let grid = snaps[0].grid();
    let initial = sample_positions(
        grid,
        &snaps[0].probability_density(),
        config.n_trajectories,
        config.seed,
    )?;
    propagate_positions(evolution, analyzer, &initial, config.seed, config.integrator)
}

/// Propagates trajectories from caller-chosen initial positions through the
/// stored snapshots of an evolution.
pub fn propagate_positions(
    evolution: &Evolution,
    analyzer: &Analyzer,
    initial: &Array2<f64>,
    seed: u64,
    integrator: Integrator,
) -> Result<TrajectoryEnsemble> {
    let snaps = &evolution.snapshots;
    if snaps.is_empty() {
        return Err(CoreError::InvalidParameter(
            "evolution holds no snapshots".into(),
        ));
    }
    let grid = snaps[0].grid().clone();
    let dim = grid.dim();
    if initial.ncols() != dim || initial.nrows() == 0 {
        return Err(CoreError::ShapeMismatch(format!(
            "initial positions must be a nonempty (n, {dim}) array, got ({}, {})",
            initial.nrows(),
            initial.ncols()
        )));
    }
    let times: Vec<f64> = snaps.iter().map(|f| f.s()).collect();

    let mut states: Vec<TrajState> = initial
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut x = [0.0; MAX_DIM];
            for (a, &v) in row.iter().enumerate() {
                x[a] = grid.axes()[a].wrap(v);
            }
            TrajState {
                x,
                rng: stream_rng(seed, i),
                alive: true,
                resampled: 0,
            }
        })
        .collect();

    let frame_of = |states: &[TrajState]| {
        let mut out = Array2::zeros((states.len(), dim));
        for (i, st) in states.iter().enumerate() {
            out.row_mut(i)
                .iter_mut()
                .zip(&st.x[..dim])
                .for_each(|(o, &v)| *o = v);
        }
        out
    };

    let mut frames = Vec::with_capacity(snaps.len());
    frames.push(frame_of(&states));

    let mut v_cur = analyzer.velocity_field(&snaps[0])?;
    for k in 0..snaps.len() - 1 {
        let v_next = analyzer.velocity_field(&snaps[k + 1])?;
        let h = times[k + 1] - times[k];
        if !(h.is_finite() && h > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "snapshot times must increase, got gap {h}"
            )));
        }
        let sampler = DensitySampler::new(&grid, &snaps[k].probability_density())?;
        states.par_iter_mut().for_each(|st| {
            if !st.alive {
                return;
            }
            let stepped = match integrator {
                Integrator::Rk4 => rk4_step(&v_cur, &v_next, &grid, &st.x, h),
                Integrator::Euler => euler_step(&v_cur, &grid, &st.x, h),
            };
            if let Some(next) = stepped {
                st.x = next;
                return;
            }
            // Redraw from the current density; the new point sits still for
            // this interval and rejoins the flow at the next one.
            st.resampled += 1;
            let mut probe = [0.0; MAX_DIM];
            for _ in 0..MAX_REDRAWS {
                if sampler.draw(&mut st.rng, &mut st.x[..dim]).is_err() {
                    break;
                }
                if interp_velocity(&v_cur, &grid, &st.x, &mut probe) {
                    return;
                }
            }
            st.alive = false;
        });
        frames.push(frame_of(&states));
        v_cur = v_next;
    }

    let resampled = states.iter().map(|s| s.resampled as usize).sum();
    let dead = states.iter().filter(|s| !s.alive).count();
    Ok(TrajectoryEnsemble {
        times,
        frames,
        seed,
        integrator,
        resampled,
        dead,
    })
}

/// One forward-Euler step using the velocity frame at the interval start.
fn euler_step(
    v0: &VelocityField,
    grid: &GridSpec,
    x: &[f64; MAX_DIM],
    h: f64,
) -> Option<[f64; MAX_DIM]> {
    let dim = grid.dim();
    let mut v = [0.0; MAX_DIM];
    if !interp_velocity(v0, grid, x, &mut v) {
        return None;
    }
    let mut next = [0.0; MAX_DIM];
    for a in 0..dim {
        next[a] = grid.axes()[a].wrap(x[a] + h * v[a]);
    }
    Some(next)
}
