//! Neutrino phenomenology toolbox: two-flavor vacuum oscillation phases under
//! an energy-operator and a mass-operator evolution model, closed-form
//! inversion of a three-state see-saw mass matrix from oscillation data, and
//! degenerate neutrino-cloud sizes compared against the characteristic
//! large-scale-structure length.
//!
//! The chain the three modules form: oscillation fits fix the mass-squared
//! splittings (differing by an exact factor 2 between the two evolution
//! models), the mass-matrix inversion turns splittings plus the solar mixing
//! angle into absolute masses, and the cloud relation turns the heaviest mass
//! into a structure size with a consistency verdict.

pub mod constants;
pub mod cosmology;
pub mod error;
pub mod massmodel;
pub mod oscillation;

pub use cosmology::{
    cloud_diameter, degenerate_radius, lss_compare, lss_compare_with_band, self_consistent_cloud,
    CloudResult, LssComparison, CLOUD_DIAMETER_COEFF_MPC, DEFAULT_CONSISTENCY_BAND,
    DEFAULT_LSS_SCALE_MPC, DEFAULT_MASS_MULTIPLIER, DEFAULT_NUMBER_DENSITY_PER_M3,
};
pub use error::{NeutrinoError, Result};
pub use massmodel::{
    build_matrix, coefficients, delta_from_angle, eigenvalues_closed, fitted_angle,
    mixing_matrix, solve_masses, sum_mass_check, tan_squared_2theta, BoundReport, DeltaFit,
    MassMatrixParams, MassSolution, MassTriplet, OscillationData, RoundTrip, SUM_MASS_BOUND_EV,
};
pub use oscillation::{
    alpha_prqm, alpha_prqm_direct, alpha_standard, dm2_equivalent, eigenvalue_t,
    energy_from_velocity_gev, phase, survival_probability, transition_probability,
    EvolutionInput, MixingScenario, PhaseFactor, TemporalModel,
};
