//! Three-state symmetric mass matrix with one perturbed diagonal entry and a
//! common off-diagonal coupling: closed-form eigenvalues, the orthogonal
//! matrix that diagonalizes it, the perturbation fitted from the solar mixing
//! angle, and the closed-form inversion that reconstructs the mass spectrum
//! from two mass-squared splittings plus the mixing angle.
//!
//! The matrix is
//!
//! ```text
//!       ⎡ P + 2δ    Q       Q    ⎤
//!   M = ⎢   Q     P − δ     Q    ⎥
//!       ⎣   Q       Q     P − δ  ⎦
//! ```
//!
//! with eigenvalues β₁,₂ = P + Q/2 + δ/2 ∓ √(9δ² − 6Qδ + 9Q²)/2 and
//! β₃ = P − Q − δ, so the trace identity β₁+β₂+β₃ = 3P holds exactly.

use nalgebra::{Matrix2, Matrix3, Vector2};
use serde::Serialize;

use crate::error::{NeutrinoError, Result};

/// Parameters (P, Q, δ) of the mass matrix, all in eV.
///
/// `offdiag_q` is the off-diagonal coupling (unrelated to the quantum
/// potential of the wave modules); `perturb_d` breaks the degeneracy of the
/// first diagonal entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassMatrixParams {
    pub trace_p: f64,
    pub offdiag_q: f64,
    pub perturb_d: f64,
}

/// Signed eigenvalue triplet (m₁, m₂, m₃), eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassTriplet {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MassTriplet {
    pub fn abs(&self) -> [f64; 3] {
        [self.m1.abs(), self.m2.abs(), self.m3.abs()]
    }

    pub fn sum_abs(&self) -> f64 {
        self.m1.abs() + self.m2.abs() + self.m3.abs()
    }

    /// |m₃| < |m₁| < |m₂| — the ordering of the fitted solution branch.
    pub fn is_inverted_hierarchy(&self) -> bool {
        let [a1, a2, a3] = self.abs();
        a3 < a1 && a1 < a2
    }
}

/// Observed oscillation inputs: two positive mass-squared splittings (eV²)
/// and the squared tangent of the solar mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationData {
    pub dm2_21: f64,
    pub dm2_32: f64,
    pub tan2_theta12: f64,
}

impl OscillationData {
    /// Rejects malformed numbers outright; zero splittings are deferred to
    /// [`solve_masses`], which reports them as infeasible rather than
    /// malformed.
    pub fn new(dm2_21: f64, dm2_32: f64, tan2_theta12: f64) -> Result<Self> {
        if !(dm2_21.is_finite() && dm2_21 >= 0.0 && dm2_32.is_finite() && dm2_32 >= 0.0) {
            return Err(NeutrinoError::InvalidParameter(format!(
                "mass-squared splittings must be finite and non-negative, got {dm2_21}, {dm2_32}"
            )));
        }
        if !(tan2_theta12.is_finite() && tan2_theta12 > 0.0) {
            return Err(NeutrinoError::InvalidParameter(format!(
                "tan²θ must be finite and positive, got {tan2_theta12}"
            )));
        }
        Ok(Self {
            dm2_21,
            dm2_32,
            tan2_theta12,
        })
    }
}

/// Builds the symmetric matrix; trace = 3·P exactly.
pub fn build_matrix(params: &MassMatrixParams) -> Matrix3<f64> {
    let MassMatrixParams {
        trace_p: p,
        offdiag_q: q,
        perturb_d: d,
    } = *params;
    Matrix3::new(
        p + 2.0 * d,
        q,
        q,
        q,
        p - d,
        q,
        q,
        q,
        p - d,
    )
}

/// Closed-form eigenvalues (β₁, β₂, β₃).
pub fn eigenvalues_closed(params: &MassMatrixParams) -> MassTriplet {
    let MassMatrixParams {
        trace_p: p,
        offdiag_q: q,
        perturb_d: d,
    } = *params;
    let w = (9.0 * d * d - 6.0 * q * d + 9.0 * q * q).sqrt();
    let mid = p + q / 2.0 + d / 2.0;
    MassTriplet {
        m1: mid - w / 2.0,
        m2: mid + w / 2.0,
        m3: p - q - d,
    }
}

/// The squared tangent of the doubled mixing angle implied by the parameters:
/// 8Q²/(Q − 3δ)².  Infinite when Q = 3δ (maximal mixing).
pub fn tan_squared_2theta(params: &MassMatrixParams) -> f64 {
    let q = params.offdiag_q;
    let denom = q - 3.0 * params.perturb_d;
    8.0 * q * q / (denom * denom)
}

/// The orthogonal matrix whose columns are the eigenvectors paired with
/// (β₁, β₂, β₃):
///
/// ```text
///       ⎡  cosθ      −sinθ       0    ⎤
///   V = ⎢ sinθ/√2   cosθ/√2   −1/√2   ⎥
///       ⎣ sinθ/√2   cosθ/√2    1/√2   ⎦
/// ```
///
/// Orthogonal with det V = +1 for every θ.  The angle that pairs the columns
/// with the closed-form eigenvalue order for Q > 0 is the *negative* branch
/// returned by [`fitted_angle`]; positive angles describe the opposite sign
/// convention of the coupling.
pub fn mixing_matrix(theta: f64) -> Result<Matrix3<f64>> {
    if !(theta.is_finite() && theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "mixing angle must satisfy |θ| < π/2, got {theta}"
        )));
    }
    let (s, c) = theta.sin_cos();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Matrix3::new(
        c,
        -s,
        0.0,
        s * r,
        c * r,
        -r,
        s * r,
        c * r,
        r,
    ))
}

/// Result of fitting the diagonal perturbation to the solar mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaFit {
    /// Canonical branch of r = δ/Q (negative for tan²θ < 1/2).
    pub ratio: f64,
    /// The other root of the quadratic — reported, never used downstream.
    pub alternate: f64,
    /// tan²2θ implied by the input tan²θ.
    pub tan_squared_2theta: f64,
}

/// Solves tan²2θ = 8Q²/(Q − 3δ)² for r = δ/Q given tan²θ:
/// r = (1 − √(8/tan²2θ))/3 (canonical), r = (1 + √(8/tan²2θ))/3 (alternate).
pub fn delta_from_angle(tan2_theta12: f64) -> Result<DeltaFit> {
    if !(tan2_theta12.is_finite() && tan2_theta12 > 0.0) {
        return Err(NeutrinoError::InvalidParameter(format!(
            "tan²θ must be finite and positive, got {tan2_theta12}"
        )));
    }
    if tan2_theta12 == 1.0 {
        return Err(NeutrinoError::InvalidParameter(
            "θ = 45° leaves tan 2θ undefined; the perturbation ratio has no solution".into(),
        ));
    }
    let t = tan2_theta12;
    let tan2_2t = 4.0 * t / ((1.0 - t) * (1.0 - t));
    let root = (8.0 / tan2_2t).sqrt();
    Ok(DeltaFit {
        ratio: (1.0 - root) / 3.0,
        alternate: (1.0 + root) / 3.0,
        tan_squared_2theta: tan2_2t,
    })
}

/// Eigenvalue coefficients (c₁, c₂, c₃) such that m_i = P + c_i·Q when
/// δ = r·Q: c₁,₂ = (1+r)/2 ∓ √(9r² − 6r + 9)/2, c₃ = −(1+r).
pub fn coefficients(r: f64) -> [f64; 3] {
    let w = (9.0 * r * r - 6.0 * r + 9.0).sqrt();
    let mid = (1.0 + r) / 2.0;
    [mid - w / 2.0, mid + w / 2.0, -(1.0 + r)]
}

/// The signed mixing angle pairing the eigenvector columns with (β₁, β₂, β₃)
/// for Q > 0: tanθ = (1 − 3r − √(9r² − 6r + 9))/(2√2), negative on the
/// canonical branch.
pub fn fitted_angle(tan2_theta12: f64) -> Result<f64> {
    let r = delta_from_angle(tan2_theta12)?.ratio;
    let w = (9.0 * r * r - 6.0 * r + 9.0).sqrt();
    Ok(((1.0 - 3.0 * r - w) / (2.0 * std::f64::consts::SQRT_2)).atan())
}

/// Upper bound on the summed absolute masses, eV.
pub const SUM_MASS_BOUND_EV: f64 = 0.6;

/// Pass/fail report of the summed-mass bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub sum_abs_ev: f64,
    pub bound_ev: f64,
    pub pass: bool,
}

pub fn sum_mass_check(triplet: &MassTriplet) -> BoundReport {
    let sum = triplet.sum_abs();
    BoundReport {
        sum_abs_ev: sum,
        bound_ev: SUM_MASS_BOUND_EV,
        pass: sum <= SUM_MASS_BOUND_EV,
    }
}

/// Relative residuals of the inputs recomputed from a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTrip {
    pub dm2_21_rel: f64,
    pub dm2_32_rel: f64,
    pub tan2_theta12_rel: f64,
}

/// Full output of the closed-form inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassSolution {
    pub params: MassMatrixParams,
    pub masses_signed: MassTriplet,
    pub masses_abs: [f64; 3],
    pub sum_abs: f64,
    pub inverted_hierarchy: bool,
    pub delta: DeltaFit,
    pub coefficients: [f64; 3],
    /// Signed angle from [`fitted_angle`], radians.
    pub fitted_theta: f64,
    pub roundtrip: RoundTrip,
}

/// Reconstructs (P, Q, δ) and the mass triplet from (Δm²₂₁, Δm²₃₂, tan²θ₁₂).
///
/// With m_i = P + c_i·Q the two splitting constraints are bilinear in (P, Q);
/// their ratio fixes x = P/Q linearly, then Δm²₂₁ fixes Q² — all closed form,
/// followed by a Newton polish to push round-trip residuals to machine
/// precision.  Sign conventions: both splittings are imposed positive, which
/// selects the branch with m₁, m₃ < 0 < m₂ and |m₃| < |m₁| < |m₂| whenever
/// Δm²₃₂ > Δm²₂₁.
pub fn solve_masses(data: &OscillationData) -> Result<MassSolution> {
    let delta = delta_from_angle(data.tan2_theta12)?;
    let r = delta.ratio;
    let c = coefficients(r);
    let [c1, c2, c3] = c;

    if data.dm2_21 <= 0.0 || data.dm2_32 <= 0.0 {
        return Err(NeutrinoError::Infeasible(format!(
            "positive mass-squared splittings are required to fix the spectrum, got {} and {}",
            data.dm2_21, data.dm2_32
        )));
    }

    // Ratio of the two constraints eliminates Q: linear in x = P/Q.
    let ratio = data.dm2_21 / data.dm2_32;
    let denom = 2.0 * ((c2 - c1) - ratio * (c2 - c3));
    if denom.abs() < 1e-300 {
        return Err(NeutrinoError::Infeasible(
            "the splitting ratio degenerates the linear stage of the inversion".into(),
        ));
    }
    let x = (ratio * (c2 - c3) * (c2 + c3) - (c2 - c1) * (c1 + c2)) / denom;

    let q2 = data.dm2_21 / ((c2 - c1) * (2.0 * x + c1 + c2));
    if !(q2.is_finite() && q2 > 0.0) {
        return Err(NeutrinoError::Infeasible(format!(
            "no real off-diagonal coupling reproduces the splittings (Q² = {q2})"
        )));
    }
    let mut q = q2.sqrt();
    let mut p = x * q;

    // Newton polish of f₁ = (m₂²−m₁²) − Δm²₂₁, f₂ = (m₂²−m₃²) − Δm²₃₂.
    for _ in 0..8 {
        let m = [p + c1 * q, p + c2 * q, p + c3 * q];
        let f1 = (m[1] * m[1] - m[0] * m[0]) - data.dm2_21;
        let f2 = (m[1] * m[1] - m[2] * m[2]) - data.dm2_32;
        let scale = data.dm2_21.abs().max(data.dm2_32.abs());
        if f1.abs() + f2.abs() < 1e-15 * scale {
            break;
        }
        let jac = Matrix2::new(
            2.0 * (m[1] - m[0]),
            2.0 * (m[1] * c2 - m[0] * c1),
            2.0 * (m[1] - m[2]),
            2.0 * (m[1] * c2 - m[2] * c3),
        );
        match jac.lu().solve(&Vector2::new(f1, f2)) {
            Some(step) => {
                p -= step[0];
                q -= step[1];
            }
            None => break,
        }
    }

    let triplet = MassTriplet {
        m1: p + c1 * q,
        m2: p + c2 * q,
        m3: p + c3 * q,
    };
    let params = MassMatrixParams {
        trace_p: p,
        offdiag_q: q,
        perturb_d: r * q,
    };

    let rd21 = ((triplet.m2 * triplet.m2 - triplet.m1 * triplet.m1) / data.dm2_21 - 1.0).abs();
    let rd32 = ((triplet.m2 * triplet.m2 - triplet.m3 * triplet.m3) / data.dm2_32 - 1.0).abs();
    let rtan = (tan_squared_2theta(&params) / delta.tan_squared_2theta - 1.0).abs();

    Ok(MassSolution {
        params,
        masses_signed: triplet,
        masses_abs: triplet.abs(),
        sum_abs: triplet.sum_abs(),
        inverted_hierarchy: triplet.is_inverted_hierarchy(),
        delta,
        coefficients: c,
        fitted_theta: fitted_angle(data.tan2_theta12)?,
        roundtrip: RoundTrip {
            dm2_21_rel: rd21,
            dm2_32_rel: rd32,
            tan2_theta12_rel: rtan,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{SymmetricEigen, Vector3};
    use rand::{Rng, SeedableRng};

    fn sorted(mut v: [f64; 3]) -> [f64; 3] {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn matrix_construction_matches_direct_substitution() {
        let identity = build_matrix(&MassMatrixParams {
            trace_p: 1.0,
            offdiag_q: 0.0,
            perturb_d: 0.0,
        });
        assert_eq!(identity, Matrix3::identity());

        let hollow = build_matrix(&MassMatrixParams {
            trace_p: 0.0,
            offdiag_q: 1.0,
            perturb_d: 0.0,
        });
        assert_eq!(
            hollow,
            Matrix3::new(0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0)
        );

        let general = build_matrix(&MassMatrixParams {
            trace_p: 1.0,
            offdiag_q: 0.5,
            perturb_d: 0.1,
        });
        assert_eq!(
            general,
            Matrix3::new(1.2, 0.5, 0.5, 0.5, 0.9, 0.5, 0.5, 0.5, 0.9)
        );
        assert!((general.trace() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_eigenvalues_match_hand_cases() {
        let t = eigenvalues_closed(&MassMatrixParams {
            trace_p: 1.0,
            offdiag_q: 0.0,
            perturb_d: 0.0,
        });
        assert_eq!((t.m1, t.m2, t.m3), (1.0, 1.0, 1.0));

        let t = eigenvalues_closed(&MassMatrixParams {
            trace_p: 0.0,
            offdiag_q: 1.0,
            perturb_d: 0.0,
        });
        assert_eq!((t.m1, t.m2, t.m3), (-1.0, 2.0, -1.0));
    }

    #[test]
    fn closed_form_agrees_with_the_numeric_eigensolver() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let params = MassMatrixParams {
                trace_p: rng.gen_range(-2.0..2.0),
                offdiag_q: rng.gen_range(-2.0..2.0),
                perturb_d: rng.gen_range(-2.0..2.0),
            };
            let closed = eigenvalues_closed(&params);
            let numeric = SymmetricEigen::new(build_matrix(&params)).eigenvalues;
            let a = sorted([closed.m1, closed.m2, closed.m3]);
            let b = sorted([numeric[0], numeric[1], numeric[2]]);
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-10, "{params:?}: {a:?} vs {b:?}");
            }
            let trace_gap = (closed.m1 + closed.m2 + closed.m3 - 3.0 * params.trace_p).abs();
            assert!(trace_gap < 1e-12 * (1.0 + params.trace_p.abs()));
        }
    }

    #[test]
    fn perturbation_fit_reproduces_the_reference_ratio() {
        let fit = delta_from_angle(0.452).unwrap();
        assert!((fit.ratio - (-0.050909)).abs() < 5e-6, "r = {}", fit.ratio);
        assert!((fit.alternate - 0.71758).abs() < 1e-4);
        assert!((fit.tan_squared_2theta - 6.0205657).abs() < 1e-6);

        // tan²2θ = 8 ⇔ tan²θ = 1/2 → unperturbed matrix.
        let unperturbed = delta_from_angle(0.5).unwrap();
        assert!(unperturbed.ratio.abs() < 1e-15);
        assert!((unperturbed.tan_squared_2theta - 8.0).abs() < 1e-12);

        // tan²2θ = 2 ⇔ tan²θ = 2−√3 → r = −1/3.
        let third = delta_from_angle(2.0 - 3.0_f64.sqrt()).unwrap();
        assert!((third.ratio - (-1.0 / 3.0)).abs() < 1e-12);

        assert!(delta_from_angle(1.0).is_err());
        assert!(delta_from_angle(-0.4).is_err());
    }

    #[test]
    fn mixing_matrix_is_special_orthogonal_with_paired_eigenvectors() {
        for theta in [-0.6, -0.3, 0.2, std::f64::consts::FRAC_PI_4] {
            let v = mixing_matrix(theta).unwrap();
            let gram = v * v.transpose();
            assert!((gram - Matrix3::identity()).norm() < 1e-12);
            assert!((v.determinant() - 1.0).abs() < 1e-12);
        }
        let v = mixing_matrix(std::f64::consts::FRAC_PI_4).unwrap();
        let half_sqrt2 = std::f64::consts::SQRT_2 / 2.0;
        assert!((v[(0, 0)] - half_sqrt2).abs() < 1e-15);
        assert!((v[(0, 1)] + half_sqrt2).abs() < 1e-15);
        assert_eq!(v[(0, 2)], 0.0);

        // Columns diagonalize the matrix at the fitted angle.
        let fit = delta_from_angle(0.452).unwrap();
        let theta = fitted_angle(0.452).unwrap();
        assert!(theta < 0.0, "canonical branch pairs with a negative angle");
        let params = MassMatrixParams {
            trace_p: -0.3,
            offdiag_q: 0.7,
            perturb_d: fit.ratio * 0.7,
        };
        let m = build_matrix(&params);
        let v = mixing_matrix(theta).unwrap();
        let beta = eigenvalues_closed(&params);
        for (col, eig) in [(0, beta.m1), (1, beta.m2), (2, beta.m3)] {
            let vi: Vector3<f64> = v.column(col).into();
            let residual = (m * vi - eig * vi).norm();
            assert!(residual < 1e-10, "column {col}: ‖Mv − βv‖ = {residual}");
        }
    }

    #[test]
    fn spectrum_inversion_reproduces_the_reference_columns() {
        let standard = solve_masses(
            &OscillationData::new(7.5e-5, 2.32e-3, 0.452).unwrap(),
        )
        .unwrap();
        let printed_standard = [0.130955, 0.131141, 0.121975];
        for (ours, printed) in standard.masses_abs.iter().zip(printed_standard.iter()) {
            assert!(
                ((ours - printed) / printed).abs() < 2.5e-3,
                "{ours} vs {printed}"
            );
        }
        assert!(standard.inverted_hierarchy);
        assert!(standard.roundtrip.dm2_21_rel < 1e-9);
        assert!(standard.roundtrip.dm2_32_rel < 1e-9);
        assert!(standard.roundtrip.tan2_theta12_rel < 1e-9);
        assert!(sum_mass_check(&standard.masses_signed).pass);
        assert!((standard.sum_abs - 0.384).abs() < 1e-3);

        let doubled = solve_masses(
            &OscillationData::new(15.0e-5, 4.64e-3, 0.452).unwrap(),
        )
        .unwrap();
        let printed_doubled = [0.185056, 0.185461, 0.172499];
        for (ours, printed) in doubled.masses_abs.iter().zip(printed_doubled.iter()) {
            assert!(
                ((ours - printed) / printed).abs() < 2.5e-3,
                "{ours} vs {printed}"
            );
        }
        assert!((doubled.sum_abs - 0.543).abs() < 1e-3);

        // Doubling both splittings scales every mass by √2 (homogeneity).
        for (d, s) in doubled.masses_abs.iter().zip(standard.masses_abs.iter()) {
            assert!(
                (d / s - std::f64::consts::SQRT_2).abs() < 1e-9,
                "{d} vs √2·{s}"
            );
        }
    }

    #[test]
    fn infeasible_inputs_are_reported_not_panicked() {
        let zero = OscillationData::new(0.0, 2.32e-3, 0.452).unwrap();
        assert!(matches!(
            solve_masses(&zero),
            Err(NeutrinoError::Infeasible(_))
        ));

        // A splitting ratio far above 1 drives Q² negative.
        let lopsided = OscillationData::new(1.0, 1e-6, 0.452).unwrap();
        assert!(matches!(
            solve_masses(&lopsided),
            Err(NeutrinoError::Infeasible(_))
        ));

        assert!(OscillationData::new(-1.0, 1.0, 0.452).is_err());
        assert!(OscillationData::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn summed_mass_bound_flags_heavy_spectra() {
        let heavy = MassTriplet {
            m1: 0.3,
            m2: 0.3,
            m3: 0.3,
        };
        let report = sum_mass_check(&heavy);
        assert!((report.sum_abs_ev - 0.9).abs() < 1e-15);
        assert!(!report.pass);
    }
}
