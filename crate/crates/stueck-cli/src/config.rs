//! Run configuration: a structured TOML document whose sections mirror the
//! library parameters one-to-one (identical names and units).  Unknown keys
//! are hard errors so typos cannot silently fall back to defaults.

use serde::{Deserialize, Serialize};
use stueck_core::{
    AxisSpec, GridSpec, Integrator, MetricSignature, ModelConstants, Potential, Scheme, WaveField,
};

use crate::error::{CliError, Result};

/// Top-level configuration.  Every section is optional; omitted sections use
/// the documented defaults (the canonical free-Gaussian run and the reference
/// oscillation observables).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub evolution: EvolutionSection,
    pub potential: PotentialSection,
    pub trajectories: TrajectoriesSection,
    pub oscillation: OscillationSection,
    pub masses: MassesSection,
    pub cosmo: CosmoSection,
}

impl RunConfig {
    /// Parses a TOML document, rejecting unknown keys with the offending key
    /// named in the message.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config error: {e}")))
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }
}

/// One grid axis: periodic extent [lo, hi) with n uniformly spaced nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// [grid] — geometry, signature, and model constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Per-axis extents and node counts.
    pub axes: Vec<AxisSection>,
    /// Per-axis metric signs, each exactly +1 or -1.
    pub signature: Vec<i8>,
    /// Action scale ħ (model units).
    pub hbar: f64,
    /// Particle mass m (model units).
    pub mass: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            axes: vec![AxisSection {
                lo: -16.0,
                hi: 16.0,
                n: 512,
            }],
            signature: vec![1],
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl GridSection {
    pub fn grid(&self) -> Result<GridSpec> {
        let axes = self
            .axes
            .iter()
            .map(|a| AxisSpec::new(a.lo, a.hi, a.n))
            .collect();
        Ok(GridSpec::new(axes)?)
    }

    pub fn metric(&self) -> Result<MetricSignature> {
        Ok(MetricSignature::new(self.signature.clone())?)
    }

    pub fn constants(&self) -> Result<ModelConstants> {
        Ok(ModelConstants::new(self.hbar, self.mass)?)
    }
}

/// Initial-state preset for evolution runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    Gaussian,
    PlaneWave,
}

/// Propagation scheme selector (mirrors the library enum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeChoice {
    SplitStepSpectral,
    CrankNicolson,
}

impl From<SchemeChoice> for Scheme {
    fn from(c: SchemeChoice) -> Scheme {
        match c {
            SchemeChoice::SplitStepSpectral => Scheme::SplitStepSpectral,
            SchemeChoice::CrankNicolson => Scheme::CrankNicolson,
        }
    }
}

/// [evolution] — step size, duration, snapshot cadence, scheme, initial
/// state, and the amplitude floor used by the diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionSection {
    pub ds: f64,
    pub n_steps: usize,
    pub snapshot_stride: usize,
    pub scheme: SchemeChoice,
    pub initial: InitialState,
    /// Gaussian packet center, one entry per axis.
    pub center: Vec<f64>,
    /// Gaussian packet width, one entry per axis.
    pub sigma: Vec<f64>,
    /// Gaussian packet momentum, one entry per axis.
    pub momentum: Vec<f64>,
    /// Plane-wave integer mode, one entry per axis.
    pub mode: Vec<i64>,
    /// Relative amplitude floor: nodes with |ψ| below this fraction of
    /// max |ψ| are masked in diagnostics and trajectory guidance.
    pub amplitude_floor: f64,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        EvolutionSection {
            ds: 1e-3,
            n_steps: 2000,
            snapshot_stride: 100,
            scheme: SchemeChoice::SplitStepSpectral,
            initial: InitialState::Gaussian,
            center: vec![0.0],
            sigma: vec![1.0],
            momentum: vec![0.0],
            mode: vec![1],
            amplitude_floor: stueck_core::bohmian::DEFAULT_AMPLITUDE_FLOOR,
        }
    }
}

impl EvolutionSection {
    pub fn initial_field(
        &self,
        grid: &GridSpec,
        metric: &MetricSignature,
        constants: &ModelConstants,
    ) -> Result<WaveField> {
        let field = match self.initial {
            InitialState::Gaussian => WaveField::gaussian(
                grid.clone(),
                metric.clone(),
                constants,
                &self.center,
                &self.sigma,
                &self.momentum,
            )?,
            InitialState::PlaneWave => {
                WaveField::plane_wave(grid.clone(), metric.clone(), &self.mode)?
            }
        };
        Ok(field)
    }
}

/// Potential preset selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Zero,
    Harmonic,
    Tabulated,
}

/// [potential] — external potential U(q).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    /// Harmonic angular frequency per axis.
    pub omega: Vec<f64>,
    /// Harmonic center per axis.
    pub center: Vec<f64>,
    /// Tabulated node values in row-major order (length = total node count).
    pub values: Vec<f64>,
}

impl Default for PotentialSection {
    fn default() -> Self {
        PotentialSection {
            kind: PotentialKind::Zero,
            omega: vec![1.0],
            center: vec![0.0],
            values: Vec::new(),
        }
    }
}

impl PotentialSection {
    pub fn potential(&self, grid: &GridSpec) -> Result<Potential> {
        match self.kind {
            PotentialKind::Zero => Ok(Potential::Zero),
            PotentialKind::Harmonic => Ok(Potential::Harmonic {
                omega: self.omega.clone(),
                center: self.center.clone(),
            }),
            PotentialKind::Tabulated => {
                if self.values.len() != grid.num_nodes() {
                    return Err(CliError::Validation(format!(
                        "tabulated potential needs {} values (one per node), got {}",
                        grid.num_nodes(),
                        self.values.len()
                    )));
                }
                let arr = ndarray::ArrayD::from_shape_vec(
                    ndarray::IxDyn(&grid.shape()),
                    self.values.clone(),
                )
                .map_err(|e| CliError::Validation(format!("tabulated potential shape: {e}")))?;
                Ok(Potential::Tabulated(arr))
            }
        }
    }
}

/// Trajectory integrator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegratorChoice {
    Rk4,
    Euler,
}

impl From<IntegratorChoice> for Integrator {
    fn from(c: IntegratorChoice) -> Integrator {
        match c {
            IntegratorChoice::Rk4 => Integrator::Rk4,
            IntegratorChoice::Euler => Integrator::Euler,
        }
    }
}

/// [trajectories] — ensemble size and integrator (the seed is the global
/// `--seed` flag so one knob controls every random draw of a run).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectoriesSection {
    pub n_traj: usize,
    pub integrator: IntegratorChoice,
}

impl Default for TrajectoriesSection {
    fn default() -> Self {
        TrajectoriesSection {
            n_traj: 10_000,
            integrator: IntegratorChoice::Rk4,
        }
    }
}

/// Swept variable of the oscillation scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    BaselineKm,
    EnergyGev,
}

/// [oscillation] — two-flavor scenario and sweep layout.  Masses in eV,
/// baseline in km, energy in GeV, β = v/c.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillationSection {
    pub m1: f64,
    pub m2: f64,
    /// Mixing angle, radians, in [0, π/2).
    pub theta: f64,
    pub baseline_km: f64,
    pub energy_gev: f64,
    /// Velocity for the mass-operator phase.  When omitted it is derived
    /// from `energy_gev` and `m1` (the physically consistent choice: both
    /// columns then describe the same beam and their phases differ by the
    /// model factor ≈ 1/2).  Set it explicitly to scan slow packets.
    pub beta: Option<f64>,
    pub sweep: SweepAxis,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
}

impl Default for OscillationSection {
    fn default() -> Self {
        OscillationSection {
            m1: 0.130955,
            // √(m1² + 7.5e-5): the solar splitting on top of the lightest
            // reconstructed mass.
            m2: 0.131240,
            // atan(√0.452): the reference mixing angle.
            theta: 0.591_778,
            baseline_km: 180.0,
            energy_gev: 0.004,
            beta: None,
            sweep: SweepAxis::BaselineKm,
            sweep_min: 1.0,
            sweep_max: 500.0,
            sweep_points: 200,
        }
    }
}

/// [masses] — oscillation observables for the spectrum inversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassesSection {
    /// Solar mass-squared splitting m₂² − m₁², eV².
    pub dm2_21: f64,
    /// Atmospheric mass-squared splitting m₂² − m₃², eV².
    pub dm2_32: f64,
    /// tan²θ₁₂.
    pub tan2_theta12: f64,
    pub model: ModelChoice,
}

impl Default for MassesSection {
    fn default() -> Self {
        MassesSection {
            dm2_21: 7.5e-5,
            dm2_32: 2.32e-3,
            tan2_theta12: 0.452,
            model: ModelChoice::Standard,
        }
    }
}

/// Temporal-evolution model selector (mirrors the library enum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Standard,
    Prqm,
}

impl std::fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelChoice::Standard => write!(f, "standard"),
            ModelChoice::Prqm => write!(f, "prqm"),
        }
    }
}

/// [cosmo] — neutrino-cloud inputs and the comparison scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CosmoSection {
    /// Neutrino mass in eV fed to the cloud-size formulas.
    pub m_nu_ev: f64,
    /// Large-scale-structure reference length, Mpc.
    pub lss_scale_mpc: f64,
    /// Ambient neutrino number density, per m³.
    pub number_density_per_m3: f64,
    /// Extra gravitating-mass multiplier: effective density is
    /// n·(1 + multiplier).
    pub mass_multiplier: f64,
    /// Inclusive consistency band on diameter/LSS.
    pub band: (f64, f64),
}

impl Default for CosmoSection {
    fn default() -> Self {
        CosmoSection {
            m_nu_ev: 0.185461,
            lss_scale_mpc: stueck_neutrino::DEFAULT_LSS_SCALE_MPC,
            number_density_per_m3: stueck_neutrino::DEFAULT_NUMBER_DENSITY_PER_M3,
            mass_multiplier: stueck_neutrino::cosmology::DEFAULT_MASS_MULTIPLIER,
            band: stueck_neutrino::DEFAULT_CONSISTENCY_BAND,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back.masses.dm2_21, cfg.masses.dm2_21);
        assert_eq!(back.grid.axes.len(), 1);
        assert_eq!(back.evolution.n_steps, 2000);
    }

    #[test]
    fn unknown_keys_are_hard_errors_naming_the_key() {
        let err = RunConfig::from_toml("[masses]\nmistyped_knob = 1.0\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("mistyped_knob"), "message was: {msg}");
    }

    #[test]
    fn unknown_sections_are_hard_errors() {
        let err = RunConfig::from_toml("[warp_drive]\nenabled = true\n").unwrap_err();
        assert!(format!("{err}").contains("warp_drive"));
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg = RunConfig::from_toml("[evolution]\nn_steps = 7\n").unwrap();
        assert_eq!(cfg.evolution.n_steps, 7);
        assert_eq!(cfg.evolution.snapshot_stride, 100);
        assert_eq!(cfg.masses.tan2_theta12, 0.452);
    }
}
