//! Signed derivative operators on periodic grids.
//!
//! Two interchangeable discretizations back every operator:
//!
//! * [`DerivativeBackend::Spectral`] — FFT-diagonal derivatives, spectrally
//!   accurate for smooth periodic fields (the default everywhere);
//! * [`DerivativeBackend::FiniteDifference`] — second-order centered
//!   differences with periodic wrap, kept as an independent cross-check.
//!
//! All index contractions (`∂_i ∂^i`, `∂_i f ∂^i f`) multiply the per-axis
//! contribution by the metric sign, so the same code serves Euclidean and
//! indefinite signatures.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::{ArrayD, ArrayViewMut1, Axis, IxDyn, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{CoreError, Result};
use crate::grid::{GridSpec, MetricSignature};

/// Which discretization evaluates a derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeBackend {
    /// FFT-diagonal derivatives (default).
    Spectral,
    /// Second-order centered differences, periodic wrap.
    FiniteDifference,
}

/// Transform direction for the raw FFT passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FftDirection {
    Forward,
    Inverse,
}

/// Cached FFT plans and wavenumber tables for one grid.
pub struct SpectralEngine {
    grid: GridSpec,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    /// First-derivative wavenumbers per axis.  The Nyquist mode is zeroed so
    /// odd derivatives of real fields stay real.
    k_odd: Vec<Vec<f64>>,
    /// Squared wavenumbers per axis (Nyquist kept).
    k_sq: Vec<Vec<f64>>,
}

impl SpectralEngine {
    pub fn new(grid: &GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let mut forward = Vec::new();
        let mut inverse = Vec::new();
        let mut k_odd = Vec::new();
        let mut k_sq = Vec::new();
        for ax in grid.axes() {
            let n = ax.n;
            forward.push(planner.plan_fft_forward(n));
            inverse.push(planner.plan_fft_inverse(n));
            let mut k1 = vec![0.0; n];
            let mut k2 = vec![0.0; n];
            for m in 0..n {
                // Standard FFT frequency layout: 0, 1, ..., n/2-1, -n/2, ..., -1.
                let f = if 2 * m < n {
                    m as f64
                } else {
                    m as f64 - n as f64
                };
                let k = 2.0 * PI * f / ax.length();
                k2[m] = k * k;
                k1[m] = if n % 2 == 0 && m == n / 2 { 0.0 } else { k };
            }
            k_odd.push(k1);
            k_sq.push(k2);
        }
        SpectralEngine {
            grid: grid.clone(),
            forward,
            inverse,
            k_odd,
            k_sq,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// In-place FFT along one axis.  The inverse pass divides by `n` only when
    /// `normalize` is set; the propagator folds that factor into its kinetic
    /// multiplier to save a sweep.
    pub(crate) fn fft_axis(
        &self,
        data: &mut ArrayD<Complex64>,
        axis: usize,
        dir: FftDirection,
        normalize: bool,
    ) {
        let fft = match dir {
            FftDirection::Forward => &self.forward[axis],
            FftDirection::Inverse => &self.inverse[axis],
        };
        let n = self.grid.axes()[axis].n;
        let scale = if normalize && dir == FftDirection::Inverse {
            Some(1.0 / n as f64)
        } else {
            None
        };
        let scratch_len = fft.get_inplace_scratch_len();
        let last = data.ndim() - 1;
        if axis == last && data.is_standard_layout() {
            // Lanes are contiguous: transform them in place without gathering.
            let slice = data.as_slice_mut().expect("standard layout");
            slice.par_chunks_exact_mut(n).for_each_init(
                || vec![Complex64::new(0.0, 0.0); scratch_len],
                |scratch, chunk| {
                    fft.process_with_scratch(chunk, scratch);
                    if let Some(s) = scale {
                        for v in chunk.iter_mut() {
                            *v *= s;
                        }
                    }
                },
            );
        } else {
            let mut lanes: Vec<ArrayViewMut1<Complex64>> =
                data.lanes_mut(Axis(axis)).into_iter().collect();
            lanes.par_iter_mut().for_each_init(
                || {
                    (
                        vec![Complex64::new(0.0, 0.0); n],
                        vec![Complex64::new(0.0, 0.0); scratch_len],
                    )
                },
                |(buf, scratch), lane| {
                    for (b, v) in buf.iter_mut().zip(lane.iter()) {
                        *b = *v;
                    }
                    fft.process_with_scratch(buf, scratch);
                    if let Some(s) = scale {
                        for b in buf.iter_mut() {
                            *b *= s;
                        }
                    }
                    for (v, b) in lane.iter_mut().zip(buf.iter()) {
                        *v = *b;
                    }
                },
            );
        }
    }

    /// Multiplies entry `m` of every lane along `axis` by `factors[m]`.
    fn scale_axis(&self, data: &mut ArrayD<Complex64>, axis: usize, factors: &[Complex64]) {
        let last = data.ndim() - 1;
        if axis == last && data.is_standard_layout() {
            let n = factors.len();
            let slice = data.as_slice_mut().expect("standard layout");
            slice.par_chunks_exact_mut(n).for_each(|chunk| {
                for (v, f) in chunk.iter_mut().zip(factors) {
                    *v *= *f;
                }
            });
        } else {
            let mut lanes: Vec<ArrayViewMut1<Complex64>> =
                data.lanes_mut(Axis(axis)).into_iter().collect();
            lanes.par_iter_mut().for_each(|lane| {
                for (v, f) in lane.iter_mut().zip(factors) {
                    *v *= *f;
                }
            });
        }
    }

    fn check_shape(&self, values: &ArrayD<Complex64>) -> Result<()> {
        if values.shape() != self.grid.shape().as_slice() {
            return Err(CoreError::ShapeMismatch(format!(
                "field shape {:?} does not match grid shape {:?}",
                values.shape(),
                self.grid.shape()
            )));
        }
        Ok(())
    }

    /// `∂^order / ∂q_axis^order` of a complex field (order 1 or 2).
    pub fn derivative(
        &self,
        values: &ArrayD<Complex64>,
        axis: usize,
        order: u8,
        backend: DerivativeBackend,
    ) -> Result<ArrayD<Complex64>> {
        self.check_shape(values)?;
        if axis >= self.grid.dim() {
            return Err(CoreError::InvalidParameter(format!(
                "axis {axis} out of range for dimension {}",
                self.grid.dim()
            )));
        }
        if order != 1 && order != 2 {
            return Err(CoreError::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {order}"
            )));
        }
        match backend {
            DerivativeBackend::Spectral => {
                let mut out = values.clone();
                self.fft_axis(&mut out, axis, FftDirection::Forward, false);
                let factors: Vec<Complex64> = if order == 1 {
                    self.k_odd[axis]
                        .iter()
                        .map(|&k| Complex64::new(0.0, k))
                        .collect()
                } else {
                    self.k_sq[axis]
                        .iter()
                        .map(|&k2| Complex64::new(-k2, 0.0))
                        .collect()
                };
                self.scale_axis(&mut out, axis, &factors);
                self.fft_axis(&mut out, axis, FftDirection::Inverse, true);
                Ok(out)
            }
            DerivativeBackend::FiniteDifference => {
                let h = self.grid.axes()[axis].spacing();
                Ok(fd_derivative(values, axis, order, h))
            }
        }
    }

    /// Signed Laplacian `∂_i ∂^i f = Σ_a sign_a ∂²f/∂q_a²`.
    pub fn signed_laplacian(
        &self,
        values: &ArrayD<Complex64>,
        metric: &MetricSignature,
        backend: DerivativeBackend,
    ) -> Result<ArrayD<Complex64>> {
        self.check_metric(metric)?;
        let mut acc: Option<ArrayD<Complex64>> = None;
        for axis in 0..self.grid.dim() {
            let mut d2 = self.derivative(values, axis, 2, backend)?;
            let s = metric.sign(axis);
            if s != 1.0 {
                d2.mapv_inplace(|v| v * s);
            }
            acc = Some(match acc {
                None => d2,
                Some(mut a) => {
                    a += &d2;
                    a
                }
            });
        }
        Ok(acc.expect("grid has at least one axis"))
    }

    /// Index-raised gradient `∂^a f = sign_a ∂_a f`, one component per axis.
    pub fn signed_gradient(
        &self,
        values: &ArrayD<Complex64>,
        metric: &MetricSignature,
        backend: DerivativeBackend,
    ) -> Result<Vec<ArrayD<Complex64>>> {
        self.check_metric(metric)?;
        (0..self.grid.dim())
            .map(|axis| {
                let mut d = self.derivative(values, axis, 1, backend)?;
                let s = metric.sign(axis);
                if s != 1.0 {
                    d.mapv_inplace(|v| v * s);
                }
                Ok(d)
            })
            .collect()
    }

    /// Real-field counterpart of [`SpectralEngine::derivative`].
    pub fn derivative_real(
        &self,
        values: &ArrayD<f64>,
        axis: usize,
        order: u8,
        backend: DerivativeBackend,
    ) -> Result<ArrayD<f64>> {
        let c = complex_from_real(values);
        Ok(real_part(&self.derivative(&c, axis, order, backend)?))
    }

    /// Real-field counterpart of [`SpectralEngine::signed_laplacian`].
    pub fn signed_laplacian_real(
        &self,
        values: &ArrayD<f64>,
        metric: &MetricSignature,
        backend: DerivativeBackend,
    ) -> Result<ArrayD<f64>> {
        let c = complex_from_real(values);
        Ok(real_part(&self.signed_laplacian(&c, metric, backend)?))
    }

    /// Full-shape table of `Σ_a sign_a k_a²`, the symbol of `-∂_i∂^i`.
    pub(crate) fn signed_k_squared(&self, metric: &MetricSignature) -> ArrayD<f64> {
        let shape = self.grid.shape();
        let dim = self.grid.dim();
        let mut out = ArrayD::<f64>::zeros(IxDyn(&shape));
        for (idx, v) in out.indexed_iter_mut() {
            let mut acc = 0.0;
            for a in 0..dim {
                acc += metric.sign(a) * self.k_sq[a][idx[a]];
            }
            *v = acc;
        }
        out
    }

    fn check_metric(&self, metric: &MetricSignature) -> Result<()> {
        if metric.dim() != self.grid.dim() {
            return Err(CoreError::ShapeMismatch(format!(
                "signature dimension {} does not match grid dimension {}",
                metric.dim(),
                self.grid.dim()
            )));
        }
        Ok(())
    }
}

/// Centered-difference derivative along one axis with periodic wrap.
fn fd_derivative(values: &ArrayD<Complex64>, axis: usize, order: u8, h: f64) -> ArrayD<Complex64> {
    let mut out = values.clone();
    Zip::from(out.lanes_mut(Axis(axis)))
        .and(values.lanes(Axis(axis)))
        .for_each(|mut o, i| {
            let n = i.len();
            if order == 1 {
                let c = 1.0 / (2.0 * h);
                for j in 0..n {
                    o[j] = (i[(j + 1) % n] - i[(j + n - 1) % n]) * c;
                }
            } else {
                let c = 1.0 / (h * h);
                for j in 0..n {
                    o[j] = (i[(j + 1) % n] - i[j] * 2.0 + i[(j + n - 1) % n]) * c;
                }
            }
        });
    out
}

/// Embeds a real field into the complex plane.
pub fn complex_from_real(values: &ArrayD<f64>) -> ArrayD<Complex64> {
    values.mapv(|x| Complex64::new(x, 0.0))
}

/// Real part of a complex field.
pub fn real_part(values: &ArrayD<Complex64>) -> ArrayD<f64> {
    values.mapv(|v| v.re)
}
