//! Polar-decomposition diagnostics: ψ = A·e^{iS/ħ} and the fields built from
//! it — quantum potential, velocity, stability functional, continuity and
//! Hamilton–Jacobi residuals, and the stabilizing action integral.
//!
//! Phase-sensitive quantities are never obtained by differentiating `arg ψ`
//! (which wraps); instead they come from logarithmic derivatives of ψ itself:
//!
//! * `∂_a S          = ħ Im[∂_a ψ / ψ]`
//! * `∂_i ∂^i S      = ħ Im[Σ_a sign_a (∂²_a ψ/ψ - (∂_a ψ/ψ)²)]`
//! * `∂_s S          = ħ Im[∂_s ψ / ψ]` (centered in s)
//! * flux `J^a       = (ħ/m) sign_a Im[ψ̄ ∂_a ψ]` (no division at all)
//!
//! Divisions by ψ are only trusted where the amplitude exceeds a configurable
//! floor; nodes below it are masked with NaN and excluded from norms and
//! integrals.

use ndarray::ArrayD;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::WaveField;
use crate::grid::{GridSpec, MetricSignature, ModelConstants};
use crate::spectral::{complex_from_real, DerivativeBackend, SpectralEngine};

/// Default amplitude floor, relative to `max A`, below which phase quantities
/// are considered unreliable.
pub const DEFAULT_AMPLITUDE_FLOOR: f64 = 1e-8;

/// Probability mass on masked nodes above which integral diagnostics flag
/// themselves as low-confidence.
pub const LOW_CONFIDENCE_MASS: f64 = 0.01;

/// Amplitude/action representation of a field, with the node mask.
#[derive(Debug, Clone)]
pub struct PolarField {
    amplitude: ArrayD<f64>,
    /// Action S = ħ·arg ψ, valued in (-πħ, πħ].
    action: ArrayD<f64>,
    /// `true` where the amplitude sits below the floor.
    mask: ArrayD<bool>,
    floor_abs: f64,
    grid: GridSpec,
    metric: MetricSignature,
    constants: ModelConstants,
    s: f64,
}

impl PolarField {
    pub fn amplitude(&self) -> &ArrayD<f64> {
        &self.amplitude
    }

    pub fn action(&self) -> &ArrayD<f64> {
        &self.action
    }

    pub fn mask(&self) -> &ArrayD<bool> {
        &self.mask
    }

    /// Absolute amplitude floor that produced the mask.
    pub fn floor_abs(&self) -> f64 {
        self.floor_abs
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Rebuilds ψ = A·e^{iS/ħ} on every node (masked ones included).
    pub fn reconstruct(&self) -> Result<WaveField> {
        let k = self.constants.k();
        let mut values = self.amplitude.mapv(|a| Complex64::new(a, 0.0));
        values.zip_mut_with(&self.action, |v, &s| {
            *v = Complex64::from_polar(v.re, s * k);
        });
        WaveField::new(self.grid.clone(), self.metric.clone(), values, self.s)
    }

    /// Fraction of total probability carried by masked nodes.
    pub fn masked_probability(&self) -> f64 {
        let mut masked = 0.0;
        let mut total = 0.0;
        for (a, &m) in self.amplitude.iter().zip(self.mask.iter()) {
            let p = a * a;
            total += p;
            if m {
                masked += p;
            }
        }
        if total > 0.0 {
            masked / total
        } else {
            0.0
        }
    }
}

/// The stabilizing action integral `∫ Q A² dV` and its cross-check.
#[derive(Debug, Clone, Copy)]
pub struct ChetaevAction {
    /// Direct quadrature of Q·A² over unmasked nodes.
    pub value: f64,
    /// Integration-by-parts form `(ħ²/2m) ∫ ∂_a A ∂^a A dV` (periodic domain).
    pub gradient_form: f64,
    /// Probability mass excluded by the amplitude mask.
    pub masked_probability: f64,
    /// Set when the masked mass exceeds [`LOW_CONFIDENCE_MASS`].
    pub low_confidence: bool,
}

/// Velocity components with the amplitude mask that accompanies them.
#[derive(Debug, Clone)]
pub struct VelocityField {
    /// `v^a = (ħ/m) sign_a Im[∂_a ψ / ψ]`, NaN on masked nodes.
    pub components: Vec<ArrayD<f64>>,
    pub mask: ArrayD<bool>,
}

/// A residual field together with its L² norm `sqrt(Σ r² dV)` (over unmasked
/// nodes when the residual carries a mask).
#[derive(Debug, Clone)]
pub struct Residual {
    pub field: ArrayD<f64>,
    pub l2: f64,
}

/// Shared context for polar diagnostics on one grid/signature.
pub struct Analyzer {
    engine: SpectralEngine,
    grid: GridSpec,
    metric: MetricSignature,
    constants: ModelConstants,
    backend: DerivativeBackend,
    floor_rel: f64,
}

impl Analyzer {
    pub fn new(
        grid: &GridSpec,
        metric: &MetricSignature,
        constants: &ModelConstants,
        backend: DerivativeBackend,
        floor_rel: f64,
    ) -> Result<Self> {
        if metric.dim() != grid.dim() {
            return Err(CoreError::ShapeMismatch(format!(
                "signature dimension {} does not match grid dimension {}",
                metric.dim(),
                grid.dim()
            )));
        }
        if !(floor_rel.is_finite() && floor_rel > 0.0 && floor_rel < 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "amplitude floor must lie in (0, 1), got {floor_rel}"
            )));
        }
        Ok(Analyzer {
            engine: SpectralEngine::new(grid),
            grid: grid.clone(),
            metric: metric.clone(),
            constants: *constants,
            backend,
            floor_rel,
        })
    }

    /// Analyzer with the default backend and amplitude floor.
    pub fn with_defaults(
        grid: &GridSpec,
        metric: &MetricSignature,
        constants: &ModelConstants,
    ) -> Result<Self> {
        Analyzer::new(
            grid,
            metric,
            constants,
            DerivativeBackend::Spectral,
            DEFAULT_AMPLITUDE_FLOOR,
        )
    }

    pub fn engine(&self) -> &SpectralEngine {
        &self.engine
    }

    pub fn constants(&self) -> &ModelConstants {
        &self.constants
    }

    pub fn backend(&self) -> DerivativeBackend {
        self.backend
    }

    fn check_field(&self, field: &WaveField) -> Result<()> {
        if field.grid() != &self.grid || field.metric() != &self.metric {
            return Err(CoreError::ShapeMismatch(
                "field grid/signature does not match the analyzer".into(),
            ));
        }
        Ok(())
    }

    /// Node mask: `true` where |ψ| is below `floor_rel · max |ψ|`.
    pub fn amplitude_mask(&self, field: &WaveField) -> (ArrayD<bool>, f64) {
        let max_amp = field.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let floor = self.floor_rel * max_amp;
        (field.values().mapv(|v| v.norm() < floor), floor)
    }

    /// Splits ψ into amplitude A = |ψ| and action S = ħ·arg ψ.
    pub fn decompose(&self, field: &WaveField) -> Result<PolarField> {
        self.check_field(field)?;
        let (mask, floor_abs) = self.amplitude_mask(field);
        if floor_abs == 0.0 {
            return Err(CoreError::InvalidParameter(
                "cannot decompose an all-zero field".into(),
            ));
        }
        let hbar = self.constants.hbar();
        Ok(PolarField {
            amplitude: field.values().mapv(|v| v.norm()),
            action: field.values().mapv(|v| hbar * v.arg()),
            mask,
            floor_abs,
            grid: self.grid.clone(),
            metric: self.metric.clone(),
            constants: self.constants,
            s: field.s(),
        })
    }

    /// Quantum potential `Q = -(ħ²/2m) (∂_i∂^i A)/A`; NaN on masked nodes.
    pub fn quantum_potential(&self, polar: &PolarField) -> Result<ArrayD<f64>> {
        let lap = self.engine.signed_laplacian_real(
            &polar.amplitude,
            &self.metric,
            self.backend,
        )?;
        let scale = -self.constants.hbar().powi(2) / (2.0 * self.constants.mass());
        let mut q = lap;
        q.zip_mut_with(&polar.amplitude, |l, &a| *l = scale * *l / a);
        mask_nan(&mut q, &polar.mask);
        Ok(q)
    }

    /// Guidance velocity `v^a = (ħ/m) sign_a Im[∂_a ψ / ψ]`; NaN on masked nodes.
    pub fn velocity_field(&self, field: &WaveField) -> Result<VelocityField> {
        self.check_field(field)?;
        let (mask, _) = self.amplitude_mask(field);
        let scale = self.constants.hbar() / self.constants.mass();
        let mut components = Vec::with_capacity(self.grid.dim());
        for axis in 0..self.grid.dim() {
            let d = self.engine.derivative(field.values(), axis, 1, self.backend)?;
            let sign = self.metric.sign(axis);
            let mut v = ArrayD::<f64>::zeros(d.raw_dim());
            for ((out, dpsi), psi) in v.iter_mut().zip(d.iter()).zip(field.values().iter()) {
                *out = scale * sign * (dpsi / psi).im;
            }
            mask_nan(&mut v, &mask);
            components.push(v);
        }
        Ok(VelocityField { components, mask })
    }

    /// Probability flux `J^a = (ħ/m) sign_a Im[ψ̄ ∂_a ψ]` — smooth everywhere,
    /// no division by ψ, hence no mask.
    pub fn flux(&self, field: &WaveField) -> Result<Vec<ArrayD<f64>>> {
        self.check_field(field)?;
        let scale = self.constants.hbar() / self.constants.mass();
        let mut out = Vec::with_capacity(self.grid.dim());
        for axis in 0..self.grid.dim() {
            let d = self.engine.derivative(field.values(), axis, 1, self.backend)?;
            let sign = self.metric.sign(axis);
            let mut j = ArrayD::<f64>::zeros(d.raw_dim());
            for ((out_v, dpsi), psi) in j.iter_mut().zip(d.iter()).zip(field.values().iter()) {
                *out_v = scale * sign * (psi.conj() * dpsi).im;
            }
            out.push(j);
        }
        Ok(out)
    }

    /// Stability functional `Λ = (1/m) ∂_i ∂^i S`, evaluated as the divergence
    /// of the guidance velocity in logarithmic-derivative form (no phase
    /// unwrapping); NaN on masked nodes.
    pub fn stability_functional(&self, field: &WaveField) -> Result<ArrayD<f64>> {
        self.check_field(field)?;
        let (mask, _) = self.amplitude_mask(field);
        let scale = self.constants.hbar() / self.constants.mass();
        let mut lambda = ArrayD::<f64>::zeros(field.values().raw_dim());
        for axis in 0..self.grid.dim() {
            let d1 = self.engine.derivative(field.values(), axis, 1, self.backend)?;
            let d2 = self.engine.derivative(field.values(), axis, 2, self.backend)?;
            let sign = self.metric.sign(axis);
            for (((out, psi), g1), g2) in lambda
                .iter_mut()
                .zip(field.values().iter())
                .zip(d1.iter())
                .zip(d2.iter())
            {
                let r1 = g1 / psi;
                let r2 = g2 / psi;
                *out += scale * sign * (r2 - r1 * r1).im;
            }
        }
        mask_nan(&mut lambda, &mask);
        Ok(lambda)
    }

    /// Chetaev dissipation measure `ε = Λ/(2k)` with `k = 1/ħ`.
    pub fn epsilon_field(&self, field: &WaveField) -> Result<ArrayD<f64>> {
        let mut lambda = self.stability_functional(field)?;
        let half_hbar = 0.5 * self.constants.hbar();
        lambda.mapv_inplace(|v| v * half_hbar);
        Ok(lambda)
    }

    /// Continuity residual `∂P/∂s + ∂_a J^a` at the middle of three uniformly
    /// spaced snapshots.  Built entirely from smooth fields, so no mask.
    pub fn continuity_residual(
        &self,
        prev: &WaveField,
        mid: &WaveField,
        next: &WaveField,
    ) -> Result<Residual> {
        let two_ds = self.snapshot_gap(prev, mid, next)?;
        let p_prev = prev.probability_density();
        let p_next = next.probability_density();
        let mut residual = &p_next - &p_prev;
        residual.mapv_inplace(|v| v / two_ds);
        let flux = self.flux(mid)?;
        for (axis, j) in flux.iter().enumerate() {
            // Plain divergence Σ_a ∂_a J^a: the index was already raised in J.
            let dj = self.engine.derivative_real(j, axis, 1, self.backend)?;
            residual += &dj;
        }
        let l2 = l2_norm(&residual, None, self.grid.cell_volume());
        Ok(Residual { field: residual, l2 })
    }

    /// The density bracket `∂_i∂^i P / P - ½ (∂_i P ∂^i P)/P²` appearing in the
    /// quantum Hamilton–Jacobi equation; equals `2 ∂_i∂^i A / A` for P = A².
    pub fn density_bracket(&self, density: &ArrayD<f64>) -> Result<ArrayD<f64>> {
        let p = complex_from_real(density);
        let lap = self.engine.signed_laplacian(&p, &self.metric, self.backend)?;
        let mut bracket = ArrayD::<f64>::zeros(density.raw_dim());
        for ((b, l), &pv) in bracket.iter_mut().zip(lap.iter()).zip(density.iter()) {
            *b = l.re / pv;
        }
        for axis in 0..self.grid.dim() {
            let dp = self.engine.derivative(&p, axis, 1, self.backend)?;
            let sign = self.metric.sign(axis);
            for ((b, d), &pv) in bracket.iter_mut().zip(dp.iter()).zip(density.iter()) {
                *b -= 0.5 * sign * d.re * d.re / (pv * pv);
            }
        }
        Ok(bracket)
    }

    /// Quantum Hamilton–Jacobi residual
    /// `∂_s S + (∂_i S ∂^i S)/2m + U - (ħ²/4m)[∂_i∂^i P/P - ½(∂_i P ∂^i P)/P²]`
    /// at the middle snapshot; NaN on masked nodes, L² over the rest.
    pub fn hamilton_jacobi_residual(
        &self,
        prev: &WaveField,
        mid: &WaveField,
        next: &WaveField,
        potential: Option<&ArrayD<f64>>,
    ) -> Result<Residual> {
        let two_ds = self.snapshot_gap(prev, mid, next)?;
        let (mask, _) = self.amplitude_mask(mid);
        let hbar = self.constants.hbar();
        let mass = self.constants.mass();

        // ∂_s S = ħ Im[(ψ_next - ψ_prev) / (2Δs ψ_mid)] — no branch cuts.
        let mut residual = ArrayD::<f64>::zeros(mid.values().raw_dim());
        for (((r, pn), pp), pm) in residual
            .iter_mut()
            .zip(next.values().iter())
            .zip(prev.values().iter())
            .zip(mid.values().iter())
        {
            *r = hbar * (((pn - pp) / two_ds) / pm).im;
        }

        // Kinetic term (∂_i S ∂^i S)/2m with ∂_a S = ħ Im[∂_a ψ/ψ].
        for axis in 0..self.grid.dim() {
            let d = self.engine.derivative(mid.values(), axis, 1, self.backend)?;
            let sign = self.metric.sign(axis);
            for ((r, g), psi) in residual.iter_mut().zip(d.iter()).zip(mid.values().iter()) {
                let ds_a = hbar * (g / psi).im;
                *r += sign * ds_a * ds_a / (2.0 * mass);
            }
        }

        if let Some(u) = potential {
            if u.shape() != residual.shape() {
                return Err(CoreError::ShapeMismatch(
                    "potential shape does not match the field".into(),
                ));
            }
            residual += u;
        }

        let bracket = self.density_bracket(&mid.probability_density())?;
        let quantum_scale = hbar * hbar / (4.0 * mass);
        residual.zip_mut_with(&bracket, |r, &b| *r -= quantum_scale * b);

        mask_nan(&mut residual, &mask);
        let l2 = l2_norm(&residual, Some(&mask), self.grid.cell_volume());
        Ok(Residual { field: residual, l2 })
    }

    /// Stabilizing action `∫ Q A² dV` with its integration-by-parts cross-check.
    pub fn chetaev_action(&self, field: &WaveField) -> Result<ChetaevAction> {
        let polar = self.decompose(field)?;
        let q = self.quantum_potential(&polar)?;
        let dv = self.grid.cell_volume();

        let mut value = 0.0;
        for ((&qv, &a), &m) in q.iter().zip(polar.amplitude.iter()).zip(polar.mask.iter()) {
            if !m {
                value += qv * a * a;
            }
        }
        value *= dv;

        // (ħ²/2m) Σ_a sign_a ∫ (∂_a A)² dV — integration by parts on the
        // periodic domain, derivatives of the smooth amplitude only.
        let scale = self.constants.hbar().powi(2) / (2.0 * self.constants.mass());
        let mut gradient_form = 0.0;
        for axis in 0..self.grid.dim() {
            let da = self
                .engine
                .derivative_real(&polar.amplitude, axis, 1, self.backend)?;
            let sum: f64 = da.iter().map(|d| d * d).sum();
            gradient_form += self.metric.sign(axis) * sum;
        }
        gradient_form *= scale * dv;

        let masked_probability = polar.masked_probability();
        Ok(ChetaevAction {
            value,
            gradient_form,
            masked_probability,
            low_confidence: masked_probability > LOW_CONFIDENCE_MASS,
        })
    }

    /// Continuity residual at every interior snapshot of a uniformly spaced
    /// sequence, as `(s, residual)` pairs.
    pub fn continuity_series(&self, snapshots: &[WaveField]) -> Result<Vec<(f64, Residual)>> {
        if snapshots.len() < 3 {
            return Err(CoreError::InvalidParameter(
                "continuity residuals need at least three snapshots".into(),
            ));
        }
        snapshots
            .windows(3)
            .map(|w| Ok((w[1].s(), self.continuity_residual(&w[0], &w[1], &w[2])?)))
            .collect()
    }

    /// Hamilton–Jacobi residual at every interior snapshot of a uniformly
    /// spaced sequence.
    pub fn hamilton_jacobi_series(
        &self,
        snapshots: &[WaveField],
        potential: Option<&ArrayD<f64>>,
    ) -> Result<Vec<(f64, Residual)>> {
        if snapshots.len() < 3 {
            return Err(CoreError::InvalidParameter(
                "Hamilton-Jacobi residuals need at least three snapshots".into(),
            ));
        }
        snapshots
            .windows(3)
            .map(|w| {
                Ok((
                    w[1].s(),
                    self.hamilton_jacobi_residual(&w[0], &w[1], &w[2], potential)?,
                ))
            })
            .collect()
    }

    /// Validates a snapshot triple and returns `2Δs`.
    fn snapshot_gap(&self, prev: &WaveField, mid: &WaveField, next: &WaveField) -> Result<f64> {
        self.check_field(prev)?;
        self.check_field(mid)?;
        self.check_field(next)?;
        let d1 = mid.s() - prev.s();
        let d2 = next.s() - mid.s();
        if d1 <= 0.0 || d2 <= 0.0 || (d1 - d2).abs() > 1e-12 * d1.max(d2) {
            return Err(CoreError::InvalidParameter(format!(
                "snapshots must be uniformly spaced in s, got gaps {d1} and {d2}"
            )));
        }
        Ok(d1 + d2)
    }
}

/// Writes NaN into entries selected by the mask.
fn mask_nan(values: &mut ArrayD<f64>, mask: &ArrayD<bool>) {
    values.zip_mut_with(mask, |v, &m| {
        if m {
            *v = f64::NAN;
        }
    });
}

/// `sqrt(Σ f² dV)` over unmasked nodes.
fn l2_norm(values: &ArrayD<f64>, mask: Option<&ArrayD<bool>>, dv: f64) -> f64 {
    let sum: f64 = match mask {
        Some(m) => values
            .iter()
            .zip(m.iter())
            .filter(|(_, &masked)| !masked)
            .map(|(v, _)| v * v)
            .sum(),
        None => values.iter().map(|v| v * v).sum(),
    };
    (sum * dv).sqrt()
}
