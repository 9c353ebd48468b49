//! Unitary propagation of ψ in the invariant evolution parameter `s`:
//!
//! ```text
//!   iħ ∂ψ/∂s = -(ħ²/2m) ∂_i∂^i ψ + U ψ
//! ```
//!
//! The default scheme is Strang-split spectral stepping,
//! `exp(-iU ds/2ħ) · exp(-iK̂ ds/ħ) · exp(-iU ds/2ħ)`, where the kinetic
//! factor is diagonal in transform space with symbol `ħ Σ_a sign_a k_a² / 2m`.
//! Every factor has unit modulus, so the discrete norm is preserved to
//! rounding regardless of step size.  A Crank–Nicolson variant replaces the
//! kinetic exponential with its Cayley form `(1 - iθ/2)/(1 + iθ/2)`; both
//! schemes are second order in `ds` and agree on smooth fields to O(ds²).

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::WaveField;
use crate::grid::{GridSpec, MetricSignature, ModelConstants};
use crate::spectral::{DerivativeBackend, FftDirection, SpectralEngine};

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Strang splitting with exact kinetic exponential (default).
    SplitStepSpectral,
    /// Strang splitting with the Cayley (Crank–Nicolson) kinetic update.
    CrankNicolson,
}

/// External potential U(q).
#[derive(Debug, Clone)]
pub enum Potential {
    Zero,
    /// `U = m/2 · Σ_a ω_a² (q_a - c_a)²`.
    Harmonic { omega: Vec<f64>, center: Vec<f64> },
    /// Arbitrary real values sampled on the grid nodes.
    Tabulated(ArrayD<f64>),
}

impl Potential {
    /// Samples the potential on the grid.  `None` means identically zero, which
    /// lets the propagator skip the potential phases entirely.
    pub fn sample(
        &self,
        grid: &GridSpec,
        constants: &ModelConstants,
    ) -> Result<Option<ArrayD<f64>>> {
        match self {
            Potential::Zero => Ok(None),
            Potential::Harmonic { omega, center } => {
                let dim = grid.dim();
                if omega.len() != dim || center.len() != dim {
                    return Err(CoreError::ShapeMismatch(format!(
                        "harmonic omega/center must have {dim} entries"
                    )));
                }
                if omega.iter().any(|w| !w.is_finite()) || center.iter().any(|c| !c.is_finite()) {
                    return Err(CoreError::InvalidParameter(
                        "harmonic parameters must be finite".into(),
                    ));
                }
                let half_m = 0.5 * constants.mass();
                let shape = grid.shape();
                let mut u = ArrayD::<f64>::zeros(IxDyn(&shape));
                for (idx, v) in u.indexed_iter_mut() {
                    let mut acc = 0.0;
                    for a in 0..dim {
                        let d = grid.axes()[a].node(idx[a]) - center[a];
                        acc += omega[a] * omega[a] * d * d;
                    }
                    *v = half_m * acc;
                }
                Ok(Some(u))
            }
            Potential::Tabulated(values) => {
                if values.shape() != grid.shape().as_slice() {
                    return Err(CoreError::ShapeMismatch(format!(
                        "tabulated potential shape {:?} does not match grid {:?}",
                        values.shape(),
                        grid.shape()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(CoreError::InvalidParameter(
                        "tabulated potential contains non-finite values".into(),
                    ));
                }
                Ok(Some(values.clone()))
            }
        }
    }
}

/// Step size, step count, snapshot cadence and scheme for one evolution run.
#[derive(Debug, Clone)]
pub struct EvolveConfig {
    pub ds: f64,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    pub scheme: Scheme,
}

impl EvolveConfig {
    pub fn new(ds: f64, n_steps: usize, snapshot_stride: usize, scheme: Scheme) -> Result<Self> {
        if !(ds.is_finite() && ds > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "ds must be finite and positive, got {ds}"
            )));
        }
        if n_steps == 0 {
            return Err(CoreError::InvalidParameter("n_steps must be positive".into()));
        }
        if snapshot_stride == 0 {
            return Err(CoreError::InvalidParameter(
                "snapshot_stride must be positive".into(),
            ));
        }
        Ok(EvolveConfig {
            ds,
            n_steps,
            snapshot_stride,
            scheme,
        })
    }
}

/// A sequence of snapshots produced by [`Evolver::evolve`], uniformly spaced
/// `stride·ds` apart in `s` and including the initial state.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub snapshots: Vec<WaveField>,
    pub ds: f64,
    pub stride: usize,
}

impl Evolution {
    /// Spacing in `s` between stored snapshots.
    pub fn snapshot_ds(&self) -> f64 {
        self.ds * self.stride as f64
    }
}

/// Precomputed phase tables for stepping one grid/potential/step-size combination.
pub struct Evolver {
    engine: SpectralEngine,
    grid: GridSpec,
    metric: MetricSignature,
    config: EvolveConfig,
    /// exp(-i U ds / 2ħ); `None` when U ≡ 0.
    half_potential_phase: Option<ArrayD<Complex64>>,
    /// Kinetic update in transform space with the inverse-FFT normalization
    /// `1/Π n_a` folded in.
    kinetic_factor: ArrayD<Complex64>,
    /// Sampled potential, kept for energy expectations.
    potential: Option<ArrayD<f64>>,
    constants: ModelConstants,
    warnings: Vec<String>,
}

impl Evolver {
    pub fn new(
        grid: &GridSpec,
        metric: &MetricSignature,
        constants: &ModelConstants,
        potential: &Potential,
        config: &EvolveConfig,
    ) -> Result<Self> {
        if metric.dim() != grid.dim() {
            return Err(CoreError::ShapeMismatch(format!(
                "signature dimension {} does not match grid dimension {}",
                metric.dim(),
                grid.dim()
            )));
        }
        let engine = SpectralEngine::new(grid);
        let ds = config.ds;
        let hbar = constants.hbar();
        let mass = constants.mass();

        // Kinetic phase per step: θ(k) = ds · ħ κ²_signed / 2m.
        let ksq = engine.signed_k_squared(metric);
        let theta_scale = ds * hbar / (2.0 * mass);
        let max_theta = ksq.iter().map(|k| (theta_scale * k).abs()).fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if max_theta > std::f64::consts::PI {
            warnings.push(format!(
                "kinetic phase per step reaches {max_theta:.3} rad (> π); \
                 the highest grid modes alias — reduce ds or refine the grid"
            ));
        }
        let norm = 1.0 / grid.num_nodes() as f64;
        let kinetic_factor = match config.scheme {
            Scheme::SplitStepSpectral => ksq.mapv(|k| {
                Complex64::from_polar(norm, -theta_scale * k)
            }),
            Scheme::CrankNicolson => ksq.mapv(|k| {
                let half = Complex64::new(0.0, 0.5 * theta_scale * k);
                (Complex64::new(1.0, 0.0) - half) / (Complex64::new(1.0, 0.0) + half) * norm
            }),
        };

        let sampled = potential.sample(grid, constants)?;
        let half_potential_phase = sampled.as_ref().map(|u| {
            u.mapv(|v| Complex64::from_polar(1.0, -v * ds / (2.0 * hbar)))
        });

        Ok(Evolver {
            engine,
            grid: grid.clone(),
            metric: metric.clone(),
            config: config.clone(),
            half_potential_phase,
            kinetic_factor,
            potential: sampled,
            constants: *constants,
            warnings,
        })
    }

    /// Diagnostics accumulated while planning (e.g. kinetic-phase aliasing).
    /// These are advisory; stepping proceeds regardless.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn engine(&self) -> &SpectralEngine {
        &self.engine
    }

    pub fn potential_values(&self) -> Option<&ArrayD<f64>> {
        self.potential.as_ref()
    }

    pub fn config(&self) -> &EvolveConfig {
        &self.config
    }

    pub fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    fn check_field(&self, field: &WaveField) -> Result<()> {
        if field.grid() != &self.grid || field.metric() != &self.metric {
            return Err(CoreError::ShapeMismatch(
                "field grid/signature does not match the evolver".into(),
            ));
        }
        Ok(())
    }

    /// Advances the field by one step of `ds` in place.
    pub fn step_in_place(&self, field: &mut WaveField) -> Result<()> {
        self.check_field(field)?;
        let values = field.values_mut();
        if let Some(phase) = &self.half_potential_phase {
            *values *= phase;
        }
        for axis in 0..self.grid.dim() {
            self.engine.fft_axis(values, axis, FftDirection::Forward, false);
        }
        *values *= &self.kinetic_factor;
        for axis in 0..self.grid.dim() {
            self.engine.fft_axis(values, axis, FftDirection::Inverse, false);
        }
        if let Some(phase) = &self.half_potential_phase {
            *values *= phase;
        }
        field.set_s(field.s() + self.config.ds);
        Ok(())
    }

    /// Advances the field by one step, returning the result (step is a pure map).
    pub fn step(&self, field: &WaveField) -> Result<WaveField> {
        let mut next = field.clone();
        self.step_in_place(&mut next)?;
        Ok(next)
    }

    /// Runs `n_steps` steps, storing every `snapshot_stride`-th state (plus the
    /// initial one).  Snapshot norms are checked for finiteness; a NaN/Inf is a
    /// numerical failure.
    pub fn evolve(&self, initial: &WaveField) -> Result<Evolution> {
        self.check_field(initial)?;
        let stride = self.config.snapshot_stride;
        let mut state = initial.clone();
        let mut snapshots = vec![state.clone()];
        for step in 1..=self.config.n_steps {
            self.step_in_place(&mut state)?;
            if step % stride == 0 || step == self.config.n_steps {
                if !state.norm().is_finite() {
                    return Err(CoreError::Numerical(format!(
                        "non-finite field norm after step {step}"
                    )));
                }
                snapshots.push(state.clone());
            }
        }
        Ok(Evolution {
            snapshots,
            ds: self.config.ds,
            stride,
        })
    }
}

/// A real expectation value together with the size of the imaginary part that
/// was discarded (a consistency diagnostic: it must sit at rounding level).
#[derive(Debug, Clone, Copy)]
pub struct Expectation {
    pub value: f64,
    pub imag_residual: f64,
}

/// `⟨K̂⟩ = ⟨ψ| -(ħ²/2m) ∂_i∂^i |ψ⟩ / ⟨ψ|ψ⟩`.
pub fn expectation_kinetic(
    field: &WaveField,
    engine: &SpectralEngine,
    constants: &ModelConstants,
    backend: DerivativeBackend,
) -> Result<Expectation> {
    let lap = engine.signed_laplacian(field.values(), field.metric(), backend)?;
    let scale = -constants.hbar() * constants.hbar() / (2.0 * constants.mass());
    let dv = field.grid().cell_volume();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut norm2 = 0.0;
    for (v, l) in field.values().iter().zip(lap.iter()) {
        acc += v.conj() * l;
        norm2 += v.norm_sqr();
    }
    acc *= scale * dv;
    norm2 *= dv;
    Ok(Expectation {
        value: acc.re / norm2,
        imag_residual: acc.im / norm2,
    })
}

/// `⟨K̂ + U⟩`, the conserved energy for s-independent potentials.
pub fn expectation_energy(
    field: &WaveField,
    engine: &SpectralEngine,
    constants: &ModelConstants,
    backend: DerivativeBackend,
    potential: Option<&ArrayD<f64>>,
) -> Result<Expectation> {
    let kinetic = expectation_kinetic(field, engine, constants, backend)?;
    let mut value = kinetic.value;
    if let Some(u) = potential {
        // The volume element cancels in the ⟨U⟩/⟨1⟩ ratio.
        let mut num = 0.0;
        let mut norm2 = 0.0;
        for (v, uu) in field.values().iter().zip(u.iter()) {
            num += uu * v.norm_sqr();
            norm2 += v.norm_sqr();
        }
        value += num / norm2;
    }
    Ok(Expectation {
        value,
        imag_residual: kinetic.imag_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisSpec;
    use std::f64::consts::PI;

    fn ring_grid(n: usize) -> GridSpec {
        GridSpec::new(vec![AxisSpec::new(0.0, 2.0 * PI, n)]).unwrap()
    }

    fn euclid(d: usize) -> MetricSignature {
        MetricSignature::euclidean(d).unwrap()
    }

    #[test]
    fn plane_wave_acquires_kinetic_phase() {
        // ψ = e^{iq} picks up e^{-i s/2} under ħ = m = 1 free evolution.
        let grid = ring_grid(256);
        let mc = ModelConstants::model_units();
        let cfg = EvolveConfig::new(1e-3, 100, 100, Scheme::SplitStepSpectral).unwrap();
        let evolver = Evolver::new(&grid, &euclid(1), &mc, &Potential::Zero, &cfg).unwrap();
        let initial = WaveField::plane_wave(grid.clone(), euclid(1), &[1]).unwrap();
        let out = evolver.evolve(&initial).unwrap();
        let fin = out.snapshots.last().unwrap();
        let s = 0.1;
        let rot = Complex64::from_polar(1.0, -0.5 * s);
        let max = fin
            .values()
            .iter()
            .zip(initial.values().iter())
            .map(|(a, b)| (a - b * rot).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-12, "phase error {max}");
        assert!((fin.s() - s).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_kinetic_expectation_is_half() {
        let grid = ring_grid(256);
        let engine = SpectralEngine::new(&grid);
        let f = WaveField::plane_wave(grid, euclid(1), &[1]).unwrap();
        let e = expectation_kinetic(&f, &engine, &ModelConstants::model_units(), DerivativeBackend::Spectral)
            .unwrap();
        assert!((e.value - 0.5).abs() < 1e-10);
        assert!(e.imag_residual.abs() < 1e-10);
    }

    #[test]
    fn mixed_signature_plane_wave_has_zero_kinetic_expectation() {
        let grid = GridSpec::cubic(2, 0.0, 2.0 * PI, 32).unwrap();
        let metric = MetricSignature::new(vec![1, -1]).unwrap();
        let engine = SpectralEngine::new(&grid);
        let f = WaveField::plane_wave(grid, metric, &[1, 1]).unwrap();
        let e = expectation_kinetic(&f, &engine, &ModelConstants::model_units(), DerivativeBackend::Spectral)
            .unwrap();
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn norm_is_preserved_by_both_schemes() {
        let grid = GridSpec::new(vec![AxisSpec::new(-16.0, 16.0, 128)]).unwrap();
        let mc = ModelConstants::model_units();
        let pot = Potential::Harmonic {
            omega: vec![1.0],
            center: vec![0.0],
        };
        for scheme in [Scheme::SplitStepSpectral, Scheme::CrankNicolson] {
            let cfg = EvolveConfig::new(1e-3, 100, 100, scheme).unwrap();
            let evolver = Evolver::new(&grid, &euclid(1), &mc, &pot, &cfg).unwrap();
            let initial = WaveField::gaussian(grid.clone(), euclid(1), &mc, &[0.0], &[1.0], &[0.0])
                .unwrap();
            let out = evolver.evolve(&initial).unwrap();
            let drift = (out.snapshots.last().unwrap().norm() - 1.0).abs();
            assert!(drift < 1e-12, "{scheme:?}: norm drift {drift}");
        }
    }

    #[test]
    fn energy_is_conserved_for_static_potential() {
        let grid = GridSpec::new(vec![AxisSpec::new(-16.0, 16.0, 256)]).unwrap();
        let mc = ModelConstants::model_units();
        let pot = Potential::Harmonic {
            omega: vec![1.0],
            center: vec![0.0],
        };
        let cfg = EvolveConfig::new(1e-3, 1000, 1000, Scheme::SplitStepSpectral).unwrap();
        let evolver = Evolver::new(&grid, &euclid(1), &mc, &pot, &cfg).unwrap();
        // Offset packet so it actually oscillates.
        let initial =
            WaveField::gaussian(grid.clone(), euclid(1), &mc, &[2.0], &[1.0], &[0.0]).unwrap();
        let e0 = expectation_energy(
            &initial,
            evolver.engine(),
            &mc,
            DerivativeBackend::Spectral,
            evolver.potential_values(),
        )
        .unwrap()
        .value;
        let out = evolver.evolve(&initial).unwrap();
        let e1 = expectation_energy(
            out.snapshots.last().unwrap(),
            evolver.engine(),
            &mc,
            DerivativeBackend::Spectral,
            evolver.potential_values(),
        )
        .unwrap()
        .value;
        assert!((e1 - e0).abs() < 1e-6, "energy drift {}", e1 - e0);
    }

    #[test]
    fn step_is_linear() {
        let grid = ring_grid(64);
        let mc = ModelConstants::model_units();
        let cfg = EvolveConfig::new(1e-2, 1, 1, Scheme::SplitStepSpectral).unwrap();
        let pot = Potential::Harmonic {
            omega: vec![1.0],
            center: vec![PI],
        };
        let evolver = Evolver::new(&grid, &euclid(1), &mc, &pot, &cfg).unwrap();
        let f = WaveField::plane_wave(grid.clone(), euclid(1), &[1]).unwrap();
        let g = WaveField::plane_wave(grid.clone(), euclid(1), &[2]).unwrap();
        let (a, b) = (Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.9));
        let mut combo = f.clone();
        {
            let cv = combo.values_mut();
            cv.zip_mut_with(g.values(), |x, y| *x = *x * a + *y * b);
        }
        let lhs = evolver.step(&combo).unwrap();
        let fa = evolver.step(&f).unwrap();
        let gb = evolver.step(&g).unwrap();
        let max = lhs
            .values()
            .iter()
            .zip(fa.values().iter().zip(gb.values().iter()))
            .map(|(l, (x, y))| (l - (x * a + y * b)).norm())
            .fold(0.0, f64::max);
        assert!(max < 1e-12, "nonlinearity {max}");
    }

    #[test]
    fn aliasing_warning_fires_for_coarse_steps() {
        let grid = ring_grid(64);
        let mc = ModelConstants::model_units();
        // max κ² = (n/2 · 2π/L)² = 32² = 1024; θ_max = ds·κ²/2 > π needs ds > ~6e-3.
        let cfg = EvolveConfig::new(1e-2, 1, 1, Scheme::SplitStepSpectral).unwrap();
        let evolver = Evolver::new(&grid, &euclid(1), &mc, &Potential::Zero, &cfg).unwrap();
        assert_eq!(evolver.warnings().len(), 1);
        let cfg = EvolveConfig::new(1e-4, 1, 1, Scheme::SplitStepSpectral).unwrap();
        let evolver = Evolver::new(&grid, &euclid(1), &mc, &Potential::Zero, &cfg).unwrap();
        assert!(evolver.warnings().is_empty());
    }

    #[test]
    fn tabulated_potential_must_match_grid_and_be_finite() {
        let grid = ring_grid(16);
        let mc = ModelConstants::model_units();
        let bad_shape = Potential::Tabulated(ArrayD::zeros(IxDyn(&[8])));
        assert!(bad_shape.sample(&grid, &mc).is_err());
        let mut vals = ArrayD::zeros(IxDyn(&[16]));
        vals[[0]] = f64::NAN;
        assert!(Potential::Tabulated(vals).sample(&grid, &mc).is_err());
    }
}
