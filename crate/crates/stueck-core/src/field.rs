//! Complex wave fields on periodic grids: constructors, norms, moments and
//! snapshot serialization.

use std::io::{self, Write};

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::{GridSpec, MetricSignature, ModelConstants};

/// Schema version stamped on every snapshot CSV this crate writes.
pub const SNAPSHOT_SCHEMA_VERSION: u32 = 1;

/// A complex field ψ on a periodic grid, tagged with the evolution parameter
/// `s` at which it was taken and the metric signature it lives under.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: GridSpec,
    metric: MetricSignature,
    values: ArrayD<Complex64>,
    s: f64,
}

impl WaveField {
    /// Wraps raw values, checking that grid, signature and storage agree.
    pub fn new(
        grid: GridSpec,
        metric: MetricSignature,
        values: ArrayD<Complex64>,
        s: f64,
    ) -> Result<Self> {
        if metric.dim() != grid.dim() {
            return Err(CoreError::ShapeMismatch(format!(
                "signature dimension {} does not match grid dimension {}",
                metric.dim(),
                grid.dim()
            )));
        }
        if values.shape() != grid.shape().as_slice() {
            return Err(CoreError::ShapeMismatch(format!(
                "value shape {:?} does not match grid shape {:?}",
                values.shape(),
                grid.shape()
            )));
        }
        Ok(WaveField {
            grid,
            metric,
            values,
            s,
        })
    }

    /// Samples ψ(q) = f(q) on every node.
    pub fn from_fn(
        grid: GridSpec,
        metric: MetricSignature,
        f: impl Fn(&[f64]) -> Complex64,
    ) -> Result<Self> {
        let shape = grid.shape();
        let mut values = ArrayD::<Complex64>::zeros(IxDyn(&shape));
        let mut coord = vec![0.0; grid.dim()];
        for (idx, v) in values.indexed_iter_mut() {
            for (a, c) in coord.iter_mut().enumerate() {
                *c = grid.axes()[a].node(idx[a]);
            }
            *v = f(&coord);
        }
        WaveField::new(grid, metric, values, 0.0)
    }

    /// Normalized Gaussian packet `Π_a exp(-(q_a-c_a)²/(4σ_a²) + i p_a (q_a-c_a)/ħ)`.
    ///
    /// The tails must be negligible at the periodic seam for the analytic
    /// free-spreading formulas to apply; callers pick domains of ~±8σ or more.
    pub fn gaussian(
        grid: GridSpec,
        metric: MetricSignature,
        constants: &ModelConstants,
        center: &[f64],
        sigma: &[f64],
        momentum: &[f64],
    ) -> Result<Self> {
        let dim = grid.dim();
        if center.len() != dim || sigma.len() != dim || momentum.len() != dim {
            return Err(CoreError::ShapeMismatch(format!(
                "center/sigma/momentum must have {dim} entries"
            )));
        }
        if sigma.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
            return Err(CoreError::InvalidParameter(format!(
                "sigma entries must be finite and positive, got {sigma:?}"
            )));
        }
        let inv_hbar = constants.k();
        let mut field = WaveField::from_fn(grid, metric, |q| {
            let mut log_amp = 0.0;
            let mut phase = 0.0;
            for a in 0..dim {
                let d = q[a] - center[a];
                log_amp -= d * d / (4.0 * sigma[a] * sigma[a]);
                phase += momentum[a] * d * inv_hbar;
            }
            Complex64::from_polar(log_amp.exp(), phase)
        })?;
        field.normalize();
        Ok(field)
    }

    /// Normalized plane wave `exp(i Σ_a k_a q_a)` with `k_a = 2π·mode_a / L_a`,
    /// an exact eigenmode of the periodic grid.
    pub fn plane_wave(grid: GridSpec, metric: MetricSignature, mode: &[i64]) -> Result<Self> {
        let dim = grid.dim();
        if mode.len() != dim {
            return Err(CoreError::ShapeMismatch(format!(
                "mode must have {dim} entries"
            )));
        }
        for (a, &m) in mode.iter().enumerate() {
            let n = grid.axes()[a].n as i64;
            if m.abs() >= n / 2 {
                return Err(CoreError::InvalidParameter(format!(
                    "mode {m} on axis {a} is not resolved by {n} nodes"
                )));
            }
        }
        let ks: Vec<f64> = (0..dim)
            .map(|a| 2.0 * std::f64::consts::PI * mode[a] as f64 / grid.axes()[a].length())
            .collect();
        let mut field = WaveField::from_fn(grid, metric, |q| {
            let phase: f64 = q.iter().zip(&ks).map(|(x, k)| k * x).sum();
            Complex64::from_polar(1.0, phase)
        })?;
        field.normalize();
        Ok(field)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn metric(&self) -> &MetricSignature {
        &self.metric
    }

    pub fn values(&self) -> &ArrayD<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.values
    }

    /// Evolution parameter at which this snapshot was taken.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn set_s(&mut self, s: f64) {
        self.s = s;
    }

    /// L² norm `sqrt(Σ |ψ|² dV)`, accumulated sequentially so results are
    /// independent of thread count.
    pub fn norm(&self) -> f64 {
        let dv = self.grid.cell_volume();
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * dv).sqrt()
    }

    /// Rescales to unit L² norm.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.values.mapv_inplace(|v| v * inv);
        }
    }

    /// Probability density P = |ψ|².
    pub fn probability_density(&self) -> ArrayD<f64> {
        self.values.mapv(|v| v.norm_sqr())
    }

    /// `⟨(q_axis - center)^p⟩` under P = |ψ|² (p = 1 or 2 in practice).
    pub fn moment(&self, axis: usize, center: f64, power: i32) -> f64 {
        let dv = self.grid.cell_volume();
        let ax = &self.grid.axes()[axis];
        let mut acc = 0.0;
        for (idx, v) in self.values.indexed_iter() {
            let q = ax.node(idx[axis]) - center;
            acc += q.powi(power) * v.norm_sqr();
        }
        acc * dv
    }

    /// Width `sqrt(⟨(q-center)²⟩)` along one axis.
    pub fn width(&self, axis: usize, center: f64) -> f64 {
        let norm2 = self.norm().powi(2);
        (self.moment(axis, center, 2) / norm2).sqrt()
    }

    /// Writes the snapshot as CSV with columns `q_0..q_{D-1}, re, im`, one row
    /// per node in row-major order, 17 significant digits.
    pub fn write_snapshot_csv(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# schema_version={SNAPSHOT_SCHEMA_VERSION}")?;
        let dim = self.grid.dim();
        for a in 0..dim {
            write!(w, "q_{a},")?;
        }
        writeln!(w, "re,im")?;
        for (idx, v) in self.values.indexed_iter() {
            for a in 0..dim {
                write!(w, "{:.16e},", self.grid.axes()[a].node(idx[a]))?;
            }
            writeln!(w, "{:.16e},{:.16e}", v.re, v.im)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisSpec;

    fn grid() -> GridSpec {
        GridSpec::new(vec![AxisSpec::new(-16.0, 16.0, 256)]).unwrap()
    }

    #[test]
    fn gaussian_is_normalized_with_unit_width() {
        let f = WaveField::gaussian(
            grid(),
            MetricSignature::euclidean(1).unwrap(),
            &ModelConstants::model_units(),
            &[0.0],
            &[1.0],
            &[0.0],
        )
        .unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert!((f.width(0, 0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plane_wave_has_uniform_density() {
        let grid = GridSpec::new(vec![AxisSpec::new(0.0, 2.0 * std::f64::consts::PI, 64)]).unwrap();
        let f = WaveField::plane_wave(grid, MetricSignature::euclidean(1).unwrap(), &[1]).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        let p = f.probability_density();
        let (min, max) = p
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        assert!((max - min).abs() < 1e-14);
    }

    #[test]
    fn unresolved_plane_wave_mode_is_rejected() {
        let grid = GridSpec::cubic(1, 0.0, 1.0, 8).unwrap();
        assert!(
            WaveField::plane_wave(grid, MetricSignature::euclidean(1).unwrap(), &[4]).is_err()
        );
    }

    #[test]
    fn snapshot_csv_round_figures() {
        let grid = GridSpec::cubic(1, 0.0, 1.0, 8).unwrap();
        let f = WaveField::plane_wave(grid, MetricSignature::euclidean(1).unwrap(), &[1]).unwrap();
        let mut buf = Vec::new();
        f.write_snapshot_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# schema_version=1");
        assert_eq!(lines.next().unwrap(), "q_0,re,im");
        assert_eq!(lines.count(), 8);
        // 17 significant digits survive a parse round-trip.
        let first = text.lines().nth(2).unwrap();
        let re: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
        let expect = f.values()[[0]].re;
        assert_eq!(re, expect);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let g = GridSpec::cubic(1, 0.0, 1.0, 8).unwrap();
        let vals = ArrayD::<Complex64>::zeros(IxDyn(&[9]));
        assert!(WaveField::new(g.clone(), MetricSignature::euclidean(1).unwrap(), vals, 0.0).is_err());
        let vals = ArrayD::<Complex64>::zeros(IxDyn(&[8]));
        assert!(WaveField::new(g, MetricSignature::new(vec![1, -1]).unwrap(), vals, 0.0).is_err());
    }
}
