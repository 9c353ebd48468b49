//! Degenerate-fermion cloud sizes and the comparison against the
//! characteristic large-scale-structure length.
//!
//! Everything funnels through the equilibrium radius of a self-gravitating,
//! non-relativistic degenerate Fermi gas, r = C·(ħ²/G)·M^{−1/3}·m^{−8/3},
//! applied at two very different scales: neutron stars (sanity anchor) and
//! neutrino clouds (the physics target).

use serde::Serialize;

use crate::constants::{ev_to_kg, hbar, mpc_to_m, GRAVITATIONAL};
use crate::error::{NeutrinoError, Result};

/// First-principles equilibrium prefactor (9π/4)^{2/3} ≈ 3.6832 of the
/// degenerate-gas radius.  The frequently quoted rounded constant 1.2 puts a
/// 1.4-solar-mass neutron star at ≈3.6 km instead of the expected ≈10 km, so
/// this value is used for [`degenerate_radius`].
pub fn degeneracy_prefactor() -> f64 {
    (9.0 * std::f64::consts::PI / 4.0).powf(2.0 / 3.0)
}

/// Rounded equilibrium constant used by the neutrino-cloud fixed point
/// ([`self_consistent_cloud`]); with it the first-principles cloud-diameter
/// coefficient lands within ~20% of the authoritative 7.1, whereas
/// [`degeneracy_prefactor`] would scale it up by √(3.68/1.2) ≈ 1.75.
pub const CLOUD_EQUILIBRIUM_PREFACTOR: f64 = 1.2;

/// Authoritative coefficient of the cloud-diameter relation
/// d[Mpc] = 7.1·m[eV]^{−3/2}; never overridden by the derived coefficient.
pub const CLOUD_DIAMETER_COEFF_MPC: f64 = 7.1;

/// Default cosmic neutrino number density per flavor state, m⁻³.
pub const DEFAULT_NUMBER_DENSITY_PER_M3: f64 = 110e6;

/// Default ratio of non-neutrino (dark-matter + gas) mass to neutrino mass
/// inside a cloud; the gravitating density is n·(1 + multiplier)·m.
pub const DEFAULT_MASS_MULTIPLIER: f64 = 19.0;

/// Default characteristic large-scale-structure length, Mpc.
pub const DEFAULT_LSS_SCALE_MPC: f64 = 90.0;

/// Default consistency band on diameter/λ_LSS.
pub const DEFAULT_CONSISTENCY_BAND: (f64, f64) = (0.8, 1.25);

fn require_positive(value: f64, name: &str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(NeutrinoError::InvalidParameter(format!(
            "{name} must be finite and positive, got {value}"
        )))
    }
}

/// Equilibrium radius (meters) of `total_mass_kg` of degenerate fermions of
/// mass `fermion_mass_kg`: r = (9π/4)^{2/3}·(ħ²/G)·M^{−1/3}·m^{−8/3}.
pub fn degenerate_radius(fermion_mass_kg: f64, total_mass_kg: f64) -> Result<f64> {
    require_positive(fermion_mass_kg, "fermion mass")?;
    require_positive(total_mass_kg, "total mass")?;
    let h = hbar();
    Ok(degeneracy_prefactor() * (h * h / GRAVITATIONAL)
        / total_mass_kg.cbrt()
        / fermion_mass_kg.powf(8.0 / 3.0))
}

/// Cloud diameter in Mpc from the authoritative relation
/// d = 7.1·m^{−3/2} with m in eV.
pub fn cloud_diameter(m_nu_ev: f64) -> Result<f64> {
    require_positive(m_nu_ev, "neutrino mass")?;
    Ok(CLOUD_DIAMETER_COEFF_MPC * m_nu_ev.powf(-1.5))
}

/// A self-consistently sized neutrino cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudResult {
    pub m_nu_ev: f64,
    pub radius_mpc: f64,
    pub diameter_mpc: f64,
    pub cloud_mass_kg: f64,
    /// First-principles analogue of the 7.1 coefficient implied by the fixed
    /// point: diameter·m^{3/2}.  Reported for comparison, never used in
    /// place of [`CLOUD_DIAMETER_COEFF_MPC`].
    pub derived_coefficient_mpc: f64,
}

/// Solves the fixed point r = 1.2·(ħ²/G)·M^{−1/3}·m^{−8/3} with the cloud's
/// own gravitating mass M = (4/3)πr³·n·(1 + multiplier)·m.
///
/// The system collapses to the closed form
/// r = √(1.2·ħ²/G)·[(4/3)π·n·(1+multiplier)]^{−1/6}·m^{−3/2}, which makes the
/// −3/2 diameter-mass exponent exact.
pub fn self_consistent_cloud(
    m_nu_ev: f64,
    number_density_per_m3: f64,
    mass_multiplier: f64,
) -> Result<CloudResult> {
    require_positive(m_nu_ev, "neutrino mass")?;
    require_positive(number_density_per_m3, "number density")?;
    if !(mass_multiplier.is_finite() && mass_multiplier >= 0.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "mass multiplier must be finite and non-negative, got {mass_multiplier}"
        )));
    }

    let m_kg = m_nu_ev * ev_to_kg();
    let h = hbar();
    let effective_density = number_density_per_m3 * (1.0 + mass_multiplier);
    let shape = 4.0 / 3.0 * std::f64::consts::PI;

    let radius_m = (CLOUD_EQUILIBRIUM_PREFACTOR * h * h / GRAVITATIONAL).sqrt()
        * (shape * effective_density).powf(-1.0 / 6.0)
        * m_kg.powf(-1.5);
    let cloud_mass_kg = shape * radius_m.powi(3) * effective_density * m_kg;

    let radius_mpc = radius_m / mpc_to_m();
    let diameter_mpc = 2.0 * radius_mpc;
    Ok(CloudResult {
        m_nu_ev,
        radius_mpc,
        diameter_mpc,
        cloud_mass_kg,
        derived_coefficient_mpc: diameter_mpc * m_nu_ev.powf(1.5),
    })
}

/// Verdict of a diameter-vs-LSS comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LssComparison {
    pub diameter_mpc: f64,
    pub lss_scale_mpc: f64,
    pub ratio: f64,
    pub consistent: bool,
    /// "consistent" or "inconsistent".
    pub verdict: &'static str,
    pub band: (f64, f64),
}

/// Compares a cloud diameter against the LSS length with the default
/// [0.8, 1.25] band.
pub fn lss_compare(diameter_mpc: f64, lss_scale_mpc: f64) -> Result<LssComparison> {
    lss_compare_with_band(diameter_mpc, lss_scale_mpc, DEFAULT_CONSISTENCY_BAND)
}

/// Same comparison with a caller-chosen inclusive band on the ratio.
pub fn lss_compare_with_band(
    diameter_mpc: f64,
    lss_scale_mpc: f64,
    band: (f64, f64),
) -> Result<LssComparison> {
    require_positive(diameter_mpc, "diameter")?;
    require_positive(lss_scale_mpc, "LSS scale")?;
    if !(band.0.is_finite() && band.1.is_finite() && 0.0 < band.0 && band.0 < band.1) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "consistency band must satisfy 0 < lo < hi, got {band:?}"
        )));
    }
    let ratio = diameter_mpc / lss_scale_mpc;
    let consistent = (band.0..=band.1).contains(&ratio);
    Ok(LssComparison {
        diameter_mpc,
        lss_scale_mpc,
        ratio,
        consistent,
        verdict: if consistent {
            "consistent"
        } else {
            "inconsistent"
        },
        band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{NEUTRON_MASS, SOLAR_MASS};

    #[test]
    fn neutron_star_radius_lands_near_ten_kilometers() {
        let r = degenerate_radius(NEUTRON_MASS, 1.4 * SOLAR_MASS).unwrap();
        assert!(
            (8e3..=12e3).contains(&r),
            "neutron-star radius {r} m out of the sanity window"
        );
        assert!((r - 1e4).abs() / 1e4 <= 0.2, "more than 20% off 10 km: {r}");
    }

    #[test]
    fn degenerate_radius_obeys_its_power_laws() {
        let r = degenerate_radius(1e-27, 1e30).unwrap();
        let quad = degenerate_radius(4e-27, 1e30).unwrap();
        assert!((r / quad / 4.0_f64.powf(8.0 / 3.0) - 1.0).abs() < 1e-12);
        let heavier = degenerate_radius(1e-27, 2e30).unwrap();
        assert!((r / heavier / 2.0_f64.cbrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cloud_diameters_hit_the_reference_masses() {
        assert_eq!(cloud_diameter(1.0).unwrap(), 7.1);
        let heavy = cloud_diameter(0.185461).unwrap();
        assert!((88.0..=91.0).contains(&heavy), "d = {heavy}");
        let light = cloud_diameter(0.131141).unwrap();
        assert!((148.0..=151.0).contains(&light), "d = {light}");
        // Strictly decreasing in the mass.
        let mut prev = f64::INFINITY;
        for m in [0.05, 0.1, 0.2, 0.4, 0.8] {
            let d = cloud_diameter(m).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn fixed_point_cloud_is_self_consistent_with_exact_exponent() {
        let cloud = self_consistent_cloud(
            0.185,
            DEFAULT_NUMBER_DENSITY_PER_M3,
            DEFAULT_MASS_MULTIPLIER,
        )
        .unwrap();

        // Plugging the fixed-point mass back into the radius relation must
        // return the same radius (with the same 1.2 prefactor).
        let h = hbar();
        let m_kg = 0.185 * ev_to_kg();
        let radius_m = cloud.radius_mpc * mpc_to_m();
        let back = CLOUD_EQUILIBRIUM_PREFACTOR * (h * h / GRAVITATIONAL)
            / cloud.cloud_mass_kg.cbrt()
            / m_kg.powf(8.0 / 3.0);
        assert!((back / radius_m - 1.0).abs() < 1e-9, "{back} vs {radius_m}");

        // Exponent −3/2 exactly.
        let doubled = self_consistent_cloud(
            0.37,
            DEFAULT_NUMBER_DENSITY_PER_M3,
            DEFAULT_MASS_MULTIPLIER,
        )
        .unwrap();
        let expect = (0.37_f64 / 0.185).powf(-1.5);
        assert!((doubled.diameter_mpc / cloud.diameter_mpc / expect - 1.0).abs() < 1e-12);

        // The derived coefficient stays within a factor 2 of the
        // authoritative 7.1, and the diameter within a factor 2 of the
        // 7.1-route value.
        let ratio = cloud.derived_coefficient_mpc / CLOUD_DIAMETER_COEFF_MPC;
        assert!((0.5..=2.0).contains(&ratio), "coefficient ratio {ratio}");
        let reference = cloud_diameter(0.185).unwrap();
        assert!(
            (0.5..=2.0).contains(&(cloud.diameter_mpc / reference)),
            "{} vs {reference}",
            cloud.diameter_mpc
        );

        // Density covariance: ×8 density shrinks the radius by 8^{1/6}.
        let denser = self_consistent_cloud(
            0.185,
            8.0 * DEFAULT_NUMBER_DENSITY_PER_M3,
            DEFAULT_MASS_MULTIPLIER,
        )
        .unwrap();
        assert!(
            (cloud.radius_mpc / denser.radius_mpc / 8.0_f64.powf(1.0 / 6.0) - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn lss_verdicts_follow_the_band() {
        let close = lss_compare(88.896, 90.0).unwrap();
        assert!(close.consistent);
        assert_eq!(close.verdict, "consistent");
        assert!((close.ratio - 0.98773).abs() < 1e-4);

        let far = lss_compare(149.503, 90.0).unwrap();
        assert!(!far.consistent);
        assert_eq!(far.verdict, "inconsistent");

        assert!(lss_compare(90.0, 90.0).unwrap().consistent);
        assert!(lss_compare(72.0, 90.0).unwrap().consistent); // ratio 0.8 inclusive
        assert!(lss_compare(112.5, 90.0).unwrap().consistent); // ratio 1.25 inclusive
        assert!(!lss_compare(71.9, 90.0).unwrap().consistent);

        // Raising the LSS scale to 150 flips both verdicts.
        assert!(!lss_compare(88.896, 150.0).unwrap().consistent);
        assert!(lss_compare(149.503, 150.0).unwrap().consistent);

        assert!(lss_compare(88.9, 0.0).is_err());
        assert!(lss_compare_with_band(88.9, 90.0, (1.5, 0.5)).is_err());
    }
}
