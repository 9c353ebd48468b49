//! Single table of physical constants, with derived quantities computed from
//! the exact SI definitions rather than hard-coded, so every downstream
//! number traces back to here.

use std::f64::consts::{PI, TAU};

/// Planck constant, J·s (exact by SI definition).
pub const PLANCK_H: f64 = 6.62607015e-34;

/// Speed of light in vacuum, m/s (exact by SI definition).
pub const LIGHT_SPEED: f64 = 2.99792458e8;

/// Electron-volt, J (exact by SI definition).
pub const ELECTRON_VOLT: f64 = 1.602176634e-19;

/// Newtonian constant of gravitation, m³ kg⁻¹ s⁻² (CODATA 2018).
pub const GRAVITATIONAL: f64 = 6.67430e-11;

/// Neutron mass, kg (CODATA 2018).
pub const NEUTRON_MASS: f64 = 1.67492749804e-27;

/// Solar mass, kg (IAU nominal value).
pub const SOLAR_MASS: f64 = 1.98847e30;

/// Astronomical unit, m (exact by IAU definition).
pub const ASTRONOMICAL_UNIT: f64 = 1.495978707e11;

/// Reduced Planck constant ħ = h/2π, J·s.
pub fn hbar() -> f64 {
    PLANCK_H / TAU
}

/// ħc expressed in eV·m, ≈ 1.973269804e−7.
pub fn hbar_c_ev_m() -> f64 {
    hbar() * LIGHT_SPEED / ELECTRON_VOLT
}

/// Mass equivalent of 1 eV, kg: eV/c² ≈ 1.782661921e−36.
pub fn ev_to_kg() -> f64 {
    ELECTRON_VOLT / (LIGHT_SPEED * LIGHT_SPEED)
}

/// One megaparsec in meters, from the exact parsec definition
/// (648000/π astronomical units): ≈ 3.085677581e22.
pub fn mpc_to_m() -> f64 {
    648_000.0 / PI * ASTRONOMICAL_UNIT * 1e6
}

/// Conversion kernel of the vacuum oscillation phase: multiplies
/// Δm²[eV²]·L[km]/E[GeV] to give radians.  Equal to
/// 10³/(4·ħc[eV·m]·10⁹) ≈ 1.266933; always computed, never hard-coded.
pub fn oscillation_kernel() -> f64 {
    1e3 / (4.0 * hbar_c_ev_m() * 1e9)
}
