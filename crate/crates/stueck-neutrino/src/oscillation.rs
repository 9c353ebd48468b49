//! Two-flavor vacuum oscillation under two temporal-evolution models.
//!
//! In the standard model the evolution eigenvalue is the relativistic energy
//! E_j = √(p²c² + m_j²c⁴) and the oscillation phase is driven by ΔE·t with
//! t = L/c.  In the parametrized model (here tagged `Prqm`) the eigenvalue is
//! the mass operator K_j = (ħ²/2m_j)·k^μk_μ, and the phase picks up the
//! factor [m₁/(m₁+m₂)]·(1/β) relative to the standard kernel.  In the
//! ultra-relativistic, near-degenerate limit the two phases differ by exactly
//! a factor 2, which is equivalent to doubling Δm² (see [`dm2_equivalent`]).

use serde::{Deserialize, Serialize};

use crate::constants::oscillation_kernel;
use crate::error::{NeutrinoError, Result};

/// Which operator generates evolution in the oscillation phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalModel {
    /// Relativistic energy eigenvalues; phase α = kernel·Δm²·L/E.
    Standard,
    /// Mass-operator eigenvalues; phase carries [m₁/(m₁+m₂)]/β.
    Prqm,
}

impl std::fmt::Display for TemporalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TemporalModel::Standard => write!(f, "standard"),
            TemporalModel::Prqm => write!(f, "prqm"),
        }
    }
}

/// Kinematic input for [`eigenvalue_t`].
#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionInput {
    /// Three-momentum magnitude |p|c in eV (energy operator).
    Momentum(f64),
    /// Four-wave-vector in energy units: ħω in eV and ħc·k components in eV
    /// (mass operator).
    FourWave { omega_ev: f64, k_ev: Vec<f64> },
}

/// Eigenvalue of the temporal-evolution operator for a mass eigenstate, eV.
///
/// `Standard` expects [`EvolutionInput::Momentum`] and returns the
/// relativistic energy √(p² + m²).  `Prqm` expects
/// [`EvolutionInput::FourWave`] and returns (ω̃² − κ·κ)/(2m), which on the
/// mass shell ω̃² − κ² = m² reduces to m/2 (i.e. mc²/2).
pub fn eigenvalue_t(model: TemporalModel, mass_ev: f64, input: &EvolutionInput) -> Result<f64> {
    if !(mass_ev.is_finite() && mass_ev >= 0.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "mass must be finite and non-negative, got {mass_ev} eV"
        )));
    }
    match (model, input) {
        (TemporalModel::Standard, EvolutionInput::Momentum(p)) => {
            if !p.is_finite() {
                return Err(NeutrinoError::InvalidParameter(format!(
                    "momentum must be finite, got {p}"
                )));
            }
            Ok(p.hypot(mass_ev))
        }
        (TemporalModel::Prqm, EvolutionInput::FourWave { omega_ev, k_ev }) => {
            if mass_ev == 0.0 {
                return Err(NeutrinoError::InvalidParameter(
                    "the mass operator divides by the mass; m = 0 is not allowed".into(),
                ));
            }
            if !omega_ev.is_finite() || k_ev.iter().any(|k| !k.is_finite()) {
                return Err(NeutrinoError::InvalidParameter(
                    "four-wave-vector components must be finite".into(),
                ));
            }
            let k2: f64 = k_ev.iter().map(|k| k * k).sum();
            Ok((omega_ev * omega_ev - k2) / (2.0 * mass_ev))
        }
        (TemporalModel::Standard, EvolutionInput::FourWave { .. }) => {
            Err(NeutrinoError::InvalidParameter(
                "the energy eigenvalue takes a three-momentum, not a four-wave-vector".into(),
            ))
        }
        (TemporalModel::Prqm, EvolutionInput::Momentum(_)) => {
            Err(NeutrinoError::InvalidParameter(
                "the mass eigenvalue takes a four-wave-vector, not a three-momentum".into(),
            ))
        }
    }
}

/// A two-flavor mixing scenario.
///
/// Masses in eV, mixing angle in radians, baseline in km, energy in GeV,
/// velocity as the ratio β = v/c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingScenario {
    pub m1: f64,
    pub m2: f64,
    pub theta: f64,
    pub baseline_km: f64,
    pub energy_gev: f64,
    pub beta: f64,
    pub model: TemporalModel,
}

impl MixingScenario {
    /// Validates: m₁, m₂ ≥ 0; 0 ≤ θ < π/2; L > 0; E > 0; 0 < β ≤ 1.
    /// θ = 0 is admitted as the no-mixing boundary.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m1: f64,
        m2: f64,
        theta: f64,
        baseline_km: f64,
        energy_gev: f64,
        beta: f64,
        model: TemporalModel,
    ) -> Result<Self> {
        let check = |ok: bool, msg: String| {
            if ok {
                Ok(())
            } else {
                Err(NeutrinoError::InvalidParameter(msg))
            }
        };
        check(
            m1.is_finite() && m1 >= 0.0 && m2.is_finite() && m2 >= 0.0,
            format!("masses must be finite and non-negative, got {m1}, {m2} eV"),
        )?;
        check(
            theta.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(&theta),
            format!("mixing angle must lie in [0, π/2), got {theta}"),
        )?;
        check(
            baseline_km.is_finite() && baseline_km > 0.0,
            format!("baseline must be positive, got {baseline_km} km"),
        )?;
        check(
            energy_gev.is_finite() && energy_gev > 0.0,
            format!("energy must be positive, got {energy_gev} GeV"),
        )?;
        check(
            beta.is_finite() && beta > 0.0 && beta <= 1.0,
            format!("velocity ratio must lie in (0, 1], got {beta}"),
        )?;
        Ok(Self {
            m1,
            m2,
            theta,
            baseline_km,
            energy_gev,
            beta,
            model,
        })
    }

    /// Builds a kinematically consistent scenario where the energy is derived
    /// from the velocity: E = m₁c²/√(1−β²).  Requires β < 1.
    pub fn with_velocity(
        m1: f64,
        m2: f64,
        theta: f64,
        baseline_km: f64,
        beta: f64,
        model: TemporalModel,
    ) -> Result<Self> {
        let energy_gev = energy_from_velocity_gev(m1, beta)?;
        Self::new(m1, m2, theta, baseline_km, energy_gev, beta, model)
    }

    /// Signed mass-squared splitting m₂² − m₁², eV².
    pub fn dm2(&self) -> f64 {
        self.m2 * self.m2 - self.m1 * self.m1
    }
}

/// Relativistic energy of a mass-m₁ particle at velocity β, in GeV.
pub fn energy_from_velocity_gev(m1_ev: f64, beta: f64) -> Result<f64> {
    if !(m1_ev.is_finite() && m1_ev > 0.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "mass must be positive to derive the energy, got {m1_ev} eV"
        )));
    }
    if !(beta.is_finite() && beta > 0.0 && beta < 1.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "velocity ratio must lie in (0, 1) to derive a finite energy, got {beta}"
        )));
    }
    Ok(m1_ev * 1e-9 / (1.0 - beta * beta).sqrt())
}

/// The dynamical phase α of one oscillation arm, tagged with its model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseFactor {
    /// Phase in radians; non-negative whenever m₂ ≥ m₁.
    pub alpha: f64,
    pub model: TemporalModel,
}

/// Standard phase α = kernel · Δm²[eV²] · L[km] / E[GeV].
pub fn alpha_standard(scenario: &MixingScenario) -> PhaseFactor {
    let alpha =
        oscillation_kernel() * scenario.dm2() * scenario.baseline_km / scenario.energy_gev;
    PhaseFactor {
        alpha,
        model: TemporalModel::Standard,
    }
}

/// Mass-operator phase: the standard kernel evaluated at the
/// velocity-consistent energy E = m₁c²/√(1−β²), times [m₁/(m₁+m₂)]·(1/β).
///
/// At β = 1 the phase vanishes (infinite energy limit); the two printed forms
/// of the phase coincide there and everywhere else — see
/// [`alpha_prqm_direct`].
pub fn alpha_prqm(scenario: &MixingScenario) -> Result<PhaseFactor> {
    if scenario.m1 + scenario.m2 <= 0.0 {
        return Err(NeutrinoError::InvalidParameter(
            "m1 + m2 must be positive for the mass-operator phase".into(),
        ));
    }
    let alpha = if scenario.beta >= 1.0 {
        0.0
    } else {
        let energy_gev = energy_from_velocity_gev(scenario.m1, scenario.beta)?;
        oscillation_kernel() * scenario.dm2() * scenario.baseline_km / energy_gev
            * (scenario.m1 / (scenario.m1 + scenario.m2))
            / scenario.beta
    };
    Ok(PhaseFactor {
        alpha,
        model: TemporalModel::Prqm,
    })
}

/// The same phase written directly as
/// (m₂−m₁)[eV] · L[m] · √(1−β²) / (4·ħc[eV·m]·β) — algebraically identical
/// to [`alpha_prqm`]; kept as an independent route for cross-checks.
pub fn alpha_prqm_direct(scenario: &MixingScenario) -> PhaseFactor {
    let hbar_c = crate::constants::hbar_c_ev_m();
    let beta = scenario.beta;
    let alpha = (scenario.m2 - scenario.m1) * scenario.baseline_km * 1e3
        * (1.0 - beta * beta).max(0.0).sqrt()
        / (4.0 * hbar_c * beta);
    PhaseFactor {
        alpha,
        model: TemporalModel::Prqm,
    }
}

/// The phase selected by the scenario's model tag.
pub fn phase(scenario: &MixingScenario) -> Result<PhaseFactor> {
    match scenario.model {
        TemporalModel::Standard => Ok(alpha_standard(scenario)),
        TemporalModel::Prqm => alpha_prqm(scenario),
    }
}

/// Survival probability P(ν_e → ν_e) = 1 − sin²2θ·sin²α, clamped to [0, 1]
/// against floating-point dust.
pub fn survival_probability(scenario: &MixingScenario) -> Result<f64> {
    Ok((1.0 - transition_probability(scenario)?).clamp(0.0, 1.0))
}

/// Transition probability sin²2θ·sin²α; survival + transition = 1 exactly.
pub fn transition_probability(scenario: &MixingScenario) -> Result<f64> {
    let alpha = phase(scenario)?.alpha;
    let s2 = (2.0 * scenario.theta).sin();
    Ok((s2 * s2 * alpha.sin().powi(2)).clamp(0.0, 1.0))
}

/// The mass-squared splitting that makes the standard kernel reproduce the
/// mass-operator phase in the ultra-relativistic near-degenerate limit:
/// exactly twice the input.
pub fn dm2_equivalent(dm2_standard: f64) -> Result<f64> {
    if !(dm2_standard.is_finite() && dm2_standard >= 0.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "mass-squared splitting must be finite and non-negative, got {dm2_standard}"
        )));
    }
    Ok(2.0 * dm2_standard)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reactor_scenario(m1: f64, m2: f64, model: TemporalModel) -> MixingScenario {
        MixingScenario::new(m1, m2, 0.5, 180.0, 0.004, 0.9, model).unwrap()
    }

    #[test]
    fn standard_phase_matches_the_unit_conversion_oracle() {
        // Δm² = 7.5e−5 eV², L = 180 km, E = 4 MeV → α ≈ 4.276 rad.
        let m2 = (7.5e-5_f64).sqrt();
        let sc = reactor_scenario(0.0, m2, TemporalModel::Standard);
        let alpha = alpha_standard(&sc).alpha;
        assert!((alpha - 4.276).abs() < 5e-4, "α = {alpha}");
        let direct = oscillation_kernel() * 7.5e-5 * 180.0 / 0.004;
        assert!((alpha - direct).abs() < 1e-12);
    }

    #[test]
    fn standard_phase_is_linear_in_baseline_and_zero_at_degeneracy() {
        let sc = reactor_scenario(0.1, 0.1, TemporalModel::Standard);
        assert_eq!(alpha_standard(&sc).alpha, 0.0);

        let near = reactor_scenario(0.1, 0.2, TemporalModel::Standard);
        let mut far = near;
        far.baseline_km *= 2.0;
        assert_eq!(alpha_standard(&far).alpha, 2.0 * alpha_standard(&near).alpha);
    }

    #[test]
    fn the_two_printed_mass_operator_forms_coincide() {
        for beta in [0.1, 0.5, 0.9, 0.999, 1.0 - 1e-10] {
            let sc =
                MixingScenario::with_velocity(0.13, 0.19, 0.5, 300.0, beta, TemporalModel::Prqm)
                    .unwrap();
            let via_kernel = alpha_prqm(&sc).unwrap().alpha;
            let direct = alpha_prqm_direct(&sc).alpha;
            assert!(
                (via_kernel - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "β = {beta}: {via_kernel} vs {direct}"
            );
        }
    }

    #[test]
    fn mass_operator_factor_reduces_to_half_over_beta() {
        // Near-degenerate masses: α_prqm/α_standard → [m₁/(m₁+m₂)]/β.
        for beta in [0.5, 0.9, 1.0 - 1e-10] {
            let m1 = 0.13;
            let m2 = m1 * (1.0 + 1e-12);
            let sc =
                MixingScenario::with_velocity(m1, m2, 0.5, 300.0, beta, TemporalModel::Prqm)
                    .unwrap();
            let ratio = alpha_prqm(&sc).unwrap().alpha / alpha_standard(&sc).alpha;
            assert!(
                (ratio - 0.5 / beta).abs() < 1e-9,
                "β = {beta}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn doubling_the_splitting_matches_the_standard_phase_in_the_limit() {
        // The identity needs the near-degenerate limit: m₂/m₁ − 1 ≤ 1e−8.
        let m1 = 0.13_f64;
        let beta = 1.0 - 1e-10;
        let m2 = m1 * (1.0 + 1e-9);
        let dm2 = m2 * m2 - m1 * m1;
        let standard =
            MixingScenario::with_velocity(m1, m2, 0.5, 300.0, beta, TemporalModel::Standard)
                .unwrap();
        let m2_doubled = (m1 * m1 + dm2_equivalent(dm2).unwrap()).sqrt();
        let doubled =
            MixingScenario::with_velocity(m1, m2_doubled, 0.5, 300.0, beta, TemporalModel::Prqm)
                .unwrap();
        let a_std = alpha_standard(&standard).alpha;
        let a_prqm = alpha_prqm(&doubled).unwrap().alpha;
        assert!(
            ((a_prqm - a_std) / a_std).abs() < 1e-6,
            "{a_prqm} vs {a_std}"
        );
    }

    #[test]
    fn survival_hits_the_textbook_points() {
        // α = π/2 with sin²2θ = 0.85 → survival 0.15.
        let theta = 0.5 * (0.85_f64).sqrt().asin();
        let dm2 = 7.5e-5_f64;
        let m2 = dm2.sqrt();
        let energy = 0.004;
        let baseline = std::f64::consts::FRAC_PI_2 * energy / (oscillation_kernel() * dm2);
        let sc = MixingScenario::new(
            0.0,
            m2,
            theta,
            baseline,
            energy,
            0.9,
            TemporalModel::Standard,
        )
        .unwrap();
        let p = survival_probability(&sc).unwrap();
        assert!((p - 0.15).abs() < 1e-12, "survival {p}");

        // θ = 0 → no mixing.
        let no_mix = MixingScenario::new(
            0.0,
            m2,
            0.0,
            baseline,
            energy,
            0.9,
            TemporalModel::Standard,
        )
        .unwrap();
        assert_eq!(survival_probability(&no_mix).unwrap(), 1.0);
    }

    #[test]
    fn eigenvalues_cover_rest_shell_and_ultrarelativistic_regimes() {
        // Rest energy.
        let rest = eigenvalue_t(TemporalModel::Standard, 1.0, &EvolutionInput::Momentum(0.0));
        assert_eq!(rest.unwrap(), 1.0);

        // Ultra-relativistic series E ≈ p + m²/2p at p/m = 10³.
        let (m, p) = (1.0, 1e3);
        let e = eigenvalue_t(TemporalModel::Standard, m, &EvolutionInput::Momentum(p)).unwrap();
        let series = p + m * m / (2.0 * p);
        assert!(((e - series) / e).abs() < 1e-6);

        // On the mass shell the mass operator gives m/2.
        let m = 0.13;
        let k = 2.5_f64;
        let omega = (k * k + m * m).sqrt();
        let kv = eigenvalue_t(
            TemporalModel::Prqm,
            m,
            &EvolutionInput::FourWave {
                omega_ev: omega,
                k_ev: vec![k, 0.0, 0.0],
            },
        )
        .unwrap();
        assert!((kv - m / 2.0).abs() < 1e-12, "K = {kv}");

        // Massless states are rejected by the mass operator.
        assert!(eigenvalue_t(
            TemporalModel::Prqm,
            0.0,
            &EvolutionInput::FourWave {
                omega_ev: 1.0,
                k_ev: vec![1.0]
            }
        )
        .is_err());
        // Mismatched input kinds are rejected.
        assert!(
            eigenvalue_t(TemporalModel::Standard, 1.0, &EvolutionInput::FourWave {
                omega_ev: 1.0,
                k_ev: vec![0.0]
            })
            .is_err()
        );
    }

    #[test]
    fn splitting_doubler_is_exact_and_guards_sign() {
        assert_eq!(dm2_equivalent(7.5e-5).unwrap(), 1.5e-4);
        assert_eq!(dm2_equivalent(2.32e-3).unwrap(), 4.64e-3);
        assert_eq!(dm2_equivalent(0.0).unwrap(), 0.0);
        assert!(dm2_equivalent(-1.0).is_err());
    }

    #[test]
    fn scenario_validation_rejects_out_of_domain_inputs() {
        let ok = MixingScenario::new(0.1, 0.2, 0.5, 1.0, 1.0, 0.5, TemporalModel::Standard);
        assert!(ok.is_ok());
        for bad in [
            MixingScenario::new(-0.1, 0.2, 0.5, 1.0, 1.0, 0.5, TemporalModel::Standard),
            MixingScenario::new(0.1, 0.2, 1.6, 1.0, 1.0, 0.5, TemporalModel::Standard),
            MixingScenario::new(0.1, 0.2, 0.5, 0.0, 1.0, 0.5, TemporalModel::Standard),
            MixingScenario::new(0.1, 0.2, 0.5, 1.0, -1.0, 0.5, TemporalModel::Standard),
            MixingScenario::new(0.1, 0.2, 0.5, 1.0, 1.0, 1.5, TemporalModel::Standard),
            MixingScenario::new(0.1, 0.2, 0.5, 1.0, 1.0, 0.0, TemporalModel::Standard),
        ] {
            assert!(bad.is_err());
        }
    }
}
