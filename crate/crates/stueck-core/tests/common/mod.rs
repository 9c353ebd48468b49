//! Closed-form and independently relaxed oracle states shared by the
//! integration tests.  Everything here is built from textbook formulas or a
//! test-local imaginary-time iteration — never from the propagator under test.
//!
//! Each test target compiles this module separately, so helpers used by only
//! some targets would otherwise trip dead-code warnings.
#![allow(dead_code)]

use ndarray::ArrayD;
use num_complex::Complex64;
use stueck_core::{
    DerivativeBackend, GridSpec, MetricSignature, ModelConstants, SpectralEngine, WaveField,
};

/// Width of a free Gaussian packet at parameter `s` (ħ = m = 1):
/// `σ(s) = σ₀ √(1 + (s/2σ₀²)²)`.
pub fn free_gaussian_width(sigma0: f64, s: f64) -> f64 {
    sigma0 * (1.0 + (s / (2.0 * sigma0 * sigma0)).powi(2)).sqrt()
}

/// Guidance velocity of the free Gaussian: `v(q, s) = q s / (s² + 4σ₀⁴)`.
pub fn free_gaussian_velocity(sigma0: f64, q: f64, s: f64) -> f64 {
    q * s / (s * s + 4.0 * sigma0.powi(4))
}

/// Stability functional of the free Gaussian, spatially uniform:
/// `Λ(s) = s / (s² + 4σ₀⁴)`.
pub fn free_gaussian_lambda(sigma0: f64, s: f64) -> f64 {
    s / (s * s + 4.0 * sigma0.powi(4))
}

/// Closed-form free Gaussian at parameter `s`, centered and at rest
/// (ħ = m = 1):
///
/// `ψ(q, s) ∝ (1 + is/2σ₀²)^{-1/2} exp(-q² / (4σ₀² (1 + is/2σ₀²)))`
///
/// Returned normalized with the time tag set to `s`.
pub fn free_gaussian_field(
    grid: &GridSpec,
    metric: &MetricSignature,
    sigma0: f64,
    s: f64,
) -> WaveField {
    let z = Complex64::new(1.0, s / (2.0 * sigma0 * sigma0));
    let prefactor = z.sqrt().inv();
    let mut field = WaveField::from_fn(grid.clone(), metric.clone(), |q| {
        let q2: f64 = q.iter().map(|&x| x * x).sum();
        prefactor * (-(q2 / (4.0 * sigma0 * sigma0)) * z.inv()).exp()
    })
    .expect("oracle field construction");
    field.normalize();
    field.set_s(s);
    field
}

/// L2 distance `sqrt(Σ |a - b|² dV)` between two fields up to a global phase:
/// the phase is fixed by the overlap ⟨a|b⟩.
pub fn phase_free_l2_distance(a: &WaveField, b: &WaveField) -> f64 {
    let dv = a.grid().cell_volume();
    let overlap: Complex64 = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let phase = overlap / overlap.norm();
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(x, y)| (x * phase - y).norm_sqr())
        .sum();
    (sum * dv).sqrt()
}

/// Ground state of the harmonic well `U = m ω² q²/2`, found by explicit-Euler
/// imaginary-time iteration of the *discrete* spectral Hamiltonian.  Returns
/// the state and its energy; the iteration is independent of the production
/// propagator (it composes the public derivative operator directly).
pub fn relax_harmonic_ground_state(
    grid: &GridSpec,
    metric: &MetricSignature,
    constants: &ModelConstants,
    omega: f64,
) -> (WaveField, f64) {
    let engine = SpectralEngine::new(grid);
    let hbar = constants.hbar();
    let mass = constants.mass();
    let dv = grid.cell_volume();

    // Analytic continuum ground state as the starting guess.
    let sigma = (hbar / (2.0 * mass * omega)).sqrt();
    let mut field = WaveField::gaussian(
        grid.clone(),
        metric.clone(),
        constants,
        &vec![0.0; grid.dim()],
        &vec![sigma; grid.dim()],
        &vec![0.0; grid.dim()],
    )
    .expect("initial guess");

    // Sampled potential.
    let mut u = ArrayD::<f64>::zeros(ndarray::IxDyn(&grid.shape()));
    for (idx, uv) in u.indexed_iter_mut() {
        let mut acc = 0.0;
        for (a, ax) in grid.axes().iter().enumerate() {
            let q = ax.node(idx[a]);
            acc += 0.5 * mass * omega * omega * q * q;
        }
        *uv = acc;
    }

    // Stability bound for explicit Euler: dτ < 2 / λ_max.
    let k_max: f64 = grid
        .axes()
        .iter()
        .map(|ax| std::f64::consts::PI / ax.spacing())
        .fold(0.0, f64::max);
    let lambda_max = hbar * hbar * k_max * k_max * grid.dim() as f64 / (2.0 * mass)
        + u.iter().cloned().fold(0.0, f64::max);
    let dtau = 1.0 / lambda_max;

    let kinetic_scale = -hbar * hbar / (2.0 * mass);
    let mut energy = 0.0;
    for iter in 0..200_000 {
        let lap = engine
            .signed_laplacian(field.values(), metric, DerivativeBackend::Spectral)
            .expect("laplacian");
        let mut hpsi = lap;
        hpsi.mapv_inplace(|v| v * kinetic_scale);
        for (hv, (psi, &uv)) in hpsi
            .iter_mut()
            .zip(field.values().iter().zip(u.iter()))
        {
            *hv += uv * psi;
        }

        // Rayleigh quotient and eigen-residual every few hundred sweeps.
        if iter % 250 == 0 {
            let norm2: f64 = field.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * dv;
            let e: f64 = field
                .values()
                .iter()
                .zip(hpsi.iter())
                .map(|(psi, hv)| (psi.conj() * hv).re)
                .sum::<f64>()
                * dv
                / norm2;
            let resid2: f64 = field
                .values()
                .iter()
                .zip(hpsi.iter())
                .map(|(psi, hv)| (hv - e * psi).norm_sqr())
                .sum::<f64>()
                * dv;
            energy = e;
            if resid2.sqrt() < 1e-11 {
                break;
            }
        }

        let values = field.values_mut();
        values.zip_mut_with(&hpsi, |psi, hv| *psi -= dtau * hv);
        field.normalize();
    }
    (field, energy)
}
