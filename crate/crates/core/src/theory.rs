//! Asymptotic theory of anchored phase retrieval.
//!
//! Every function here is a pure, reentrant function of the oversampling
//! ratio `alpha = m/n` and (where relevant) the input cosine similarity
//! `rho` between the anchor vector and the target signal. The central
//! objects are:
//!
//! * `rho_critical(alpha)` — the sharp threshold on the cosine similarity
//!   above which PhaseMax recovers the signal perfectly in the large-system
//!   limit, and below which it provably fails;
//! * `spo_solve(rho, alpha)` — the scalar performance optimization whose
//!   maximizer `(s*, r*)` gives the limiting NMSE `(1 - s*)^2 + r*^2` of the
//!   raw LP solution;
//! * `lamp_certificate(alpha)` — the PhaseLamp sufficient-recovery
//!   certificate `(theta*, s_hat, ell, rho_s)`, with `rho_s(alpha)` strictly
//!   below `rho_critical(alpha)`;
//! * `c_d(s, r)` — the closed form of `E[min(|q| - |r g + s q|, 0)^2]` over
//!   independent standard normals `(q, g)`, the constraint-slack expectation
//!   behind the dual-route identity `r_star_of_s == r_alpha`.
//!
//! All formulas require `alpha > 2`, enforced by the [`Alpha`] newtype.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from theory-level evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("oversampling ratio must be a finite real > 2, got {0}")]
    InvalidAlpha(f64),
    #[error("cosine similarity must lie in (0, 1], got {0}")]
    InvalidCosine(f64),
    #[error("{name} = {value} outside domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
}

/// Oversampling ratio `m/n`, restricted to `alpha > 2` where all asymptotic
/// formulas below are defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self, TheoryError> {
        if value.is_finite() && value > 2.0 {
            Ok(Alpha(value))
        } else {
            Err(TheoryError::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// The geometry constant `c_alpha = cot(pi/alpha)` shared by every
    /// formula in this module. Positive for `alpha > 2`.
    pub fn c_alpha(self) -> f64 {
        1.0 / (PI / self.0).tan()
    }
}

/// Cosine similarity between the anchor and the target, in `(0, 1]`.
/// Positivity encodes the convention that the anchor is positively
/// correlated with the signal (both signs of the signal are valid targets).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineSimilarity(f64);

impl CosineSimilarity {
    pub fn new(value: f64) -> Result<Self, TheoryError> {
        if value.is_finite() && value > 0.0 && value <= 1.0 {
            Ok(CosineSimilarity(value))
        } else {
            Err(TheoryError::InvalidCosine(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Output of [`spo_solve`]: the maximizer of the scalar performance
/// optimization and the limiting NMSE it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    /// Limiting overlap of the LP solution with the target, in `[0, 1]`.
    pub s_star: f64,
    /// Limiting norm of the orthogonal component, `r_alpha(s_star)`.
    pub r_star: f64,
    /// Limiting NMSE, `1 + s_star^2 + r_star^2 - 2 |s_star|`.
    pub nmse: f64,
    /// Recovery threshold `rho_critical(alpha)` for the same ratio.
    pub rho_c: f64,
}

/// PhaseLamp sufficient-recovery certificate for one oversampling ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LampCertificate {
    /// Unique root of the angular fixed-point equation in `(0, pi/2)`.
    pub theta_star: f64,
    /// Overlap level induced by `theta_star`, in `(0, 1)`.
    pub s_hat: f64,
    /// Slope of the sufficient condition in the `(rho, sqrt(1-rho^2))` plane.
    pub ell: f64,
    /// Sufficient cosine similarity `ell / sqrt(ell^2 + 1)`; PhaseLamp
    /// recovers perfectly whenever `rho_init > rho_s`.
    pub rho_s: f64,
}

fn check_s(s: f64) -> Result<(), TheoryError> {
    if s.is_finite() && s.abs() <= 1.0 {
        Ok(())
    } else {
        Err(TheoryError::OutOfDomain {
            name: "s",
            value: s,
            domain: "[-1, 1]",
        })
    }
}

#[inline]
fn r_alpha_unchecked(s: f64, alpha: Alpha) -> f64 {
    let c = alpha.c_alpha();
    // rationalized form of sqrt(c^2 + 1 - s^2) - c: exactly zero at the
    // endpoints and free of cancellation as |s| -> 1
    let q = 1.0 - s * s;
    q / ((c * c + q).sqrt() + c)
}

/// Radial coordinate of the constraint geometry:
/// `r_alpha(s) = sqrt(c_alpha^2 + 1 - s^2) - c_alpha`.
///
/// Even in `s`, maximized at `s = 0`, and exactly `0` at `|s| = 1`.
pub fn r_alpha(s: f64, alpha: Alpha) -> Result<f64, TheoryError> {
    check_s(s)?;
    Ok(r_alpha_unchecked(s, alpha))
}

#[inline]
fn g_alpha_unchecked(s: f64, alpha: Alpha) -> f64 {
    if s.abs() == 1.0 {
        // analytic limit: the linear and arctangent terms cancel exactly
        return 0.0;
    }
    let a = alpha.value();
    let c = alpha.c_alpha();
    let r = r_alpha_unchecked(s, alpha);
    -1.0 - s * s + 2.0 * a * r / PI + (2.0 * a * s / PI) * (s / (r + c)).atan()
}

/// The variance-gain function of the scalar performance optimization.
/// Positive on `(-1, 1)`, zero at the endpoints.
pub fn g_alpha(s: f64, alpha: Alpha) -> Result<f64, TheoryError> {
    check_s(s)?;
    Ok(g_alpha_unchecked(s, alpha))
}

/// Derivative of `g_alpha` in `s`. After simplification,
/// `g'(s) = -2 s + (2 alpha / pi) (r' + atan(s / (r + c)) + s / (r + c))`
/// with `r' = -s / (r + c)`, so the bracket vanishes at `|s| = 1`.
fn g_alpha_prime(s: f64, alpha: Alpha) -> f64 {
    let a = alpha.value();
    let c = alpha.c_alpha();
    let r = r_alpha_unchecked(s, alpha);
    let rc = r + c;
    let r_prime = -s / rc;
    -2.0 * s + (2.0 * a / PI) * (r_prime + (s / rc).atan() + s / rc)
}

/// Critical cosine similarity `sqrt(1 - (pi/alpha) / tan(pi/alpha))`.
///
/// PhaseMax recovers the target perfectly in the large-system limit if and
/// only if `rho_init` exceeds this threshold. Strictly decreasing in
/// `alpha`; tends to 1 as `alpha -> 2+` and to 0 as `alpha -> inf`.
pub fn rho_critical(alpha: Alpha) -> f64 {
    let x = PI / alpha.value();
    (1.0 - x / x.tan()).sqrt()
}

/// Objective of the scalar performance optimization at overlap `s`:
/// `rho * s + sqrt((1 - rho^2) * g_alpha(s))`. Concave on `[0, 1]`.
pub fn spo_objective(s: f64, rho: CosineSimilarity, alpha: Alpha) -> Result<f64, TheoryError> {
    check_s(s)?;
    let r = rho.value();
    // clamp: g can round to a tiny negative near |s| = 1
    Ok(r * s + ((1.0 - r * r) * g_alpha_unchecked(s, alpha).max(0.0)).sqrt())
}

/// Derivative of the SPO objective. The endpoint `s = 1` uses the analytic
/// limit `rho - k * sqrt((alpha/pi) tan(pi/alpha) - 1)` (both `g` and `g'`
/// vanish there, so the generic quotient is 0/0).
fn spo_derivative(s: f64, rho: f64, k: f64, alpha: Alpha) -> f64 {
    if s >= 1.0 {
        let a = alpha.value();
        let t = (a / PI) * (PI / a).tan() - 1.0;
        return rho - k * t.sqrt();
    }
    let g = g_alpha_unchecked(s, alpha).max(f64::MIN_POSITIVE);
    rho + k * g_alpha_prime(s, alpha) / (2.0 * g.sqrt())
}

/// Solve the scalar performance optimization for a `(rho, alpha)` pair.
///
/// Above the threshold (`rho > rho_critical(alpha)`) the maximizer sits at
/// the corner `s* = 1, r* = 0` and the limiting NMSE is exactly zero.
/// Otherwise the interior maximizer is located by a golden-section pass on
/// `[0, 1]` followed by bisection on the analytic derivative, to `1e-12`
/// accuracy in `s`.
pub fn spo_solve(rho: CosineSimilarity, alpha: Alpha) -> Result<TheoryPrediction, TheoryError> {
    let rho_c = rho_critical(alpha);
    let r = rho.value();
    if r > rho_c {
        return Ok(TheoryPrediction {
            s_star: 1.0,
            r_star: 0.0,
            nmse: 0.0,
            rho_c,
        });
    }
    let k = (1.0 - r * r).sqrt();
    let f = |s: f64| r * s + k * g_alpha_unchecked(s, alpha).max(0.0).sqrt();
    let (mut lo, mut hi) = golden_section_bracket(&f, 0.0, 1.0, 1e-6);
    let fp = |s: f64| spo_derivative(s, r, k, alpha);
    if !(fp(lo) >= 0.0 && fp(hi) <= 0.0) {
        // fall back to the full interval; the derivative is rho > 0 at s = 0
        // and nonpositive at s = 1 whenever rho <= rho_c
        lo = 0.0;
        hi = 1.0;
    }
    let mut iterations = 0usize;
    while hi - lo > 1e-12 {
        iterations += 1;
        if iterations > 200 {
            return Err(TheoryError::ConvergenceFailure(format!(
                "scalar maximizer bracket stuck at width {}",
                hi - lo
            )));
        }
        let mid = 0.5 * (lo + hi);
        if fp(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s_star = 0.5 * (lo + hi);
    let r_star = r_alpha_unchecked(s_star, alpha);
    let nmse = (1.0 + s_star * s_star + r_star * r_star - 2.0 * s_star.abs()).max(0.0);
    Ok(TheoryPrediction {
        s_star,
        r_star,
        nmse,
        rho_c,
    })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns the final bracket.
fn golden_section_bracket(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > width {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    (a, b)
}

/// Closed form of `E[min(|q| - |r g + s q|, 0)^2]` over independent standard
/// normals `(q, g)` — the expected squared constraint slack at overlap `s`
/// and orthogonal radius `r`.
pub fn c_d(s: f64, r: f64) -> Result<f64, TheoryError> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(TheoryError::OutOfDomain {
            name: "r",
            value: r,
            domain: "[0, inf)",
        });
    }
    if !s.is_finite() {
        return Err(TheoryError::OutOfDomain {
            name: "s",
            value: s,
            domain: "(-inf, inf)",
        });
    }
    if r == 0.0 {
        // limit: each arctangent term collapses to +-pi/2, leaving only the
        // over-unity part of the overlap
        let e = (s.abs() - 1.0).max(0.0);
        return Ok(e * e);
    }
    let t1 = ((1.0 - s) * (1.0 - s) + r * r) * (FRAC_PI_2 - ((1.0 - s) / r).atan());
    let t2 = ((1.0 + s) * (1.0 + s) + r * r) * (FRAC_PI_2 - ((1.0 + s) / r).atan());
    Ok(((t1 + t2 - 2.0 * r) / PI).max(0.0))
}

/// The radius maximizing `r^2 - alpha * c_d(s, r)` at fixed overlap `s`,
/// in its independent closed form
/// `sqrt(cot(pi/alpha)^2 + (1 - s^2)) - cot(pi/alpha)`.
///
/// Algebraically identical to [`r_alpha`]; kept as a second route so the
/// two derivations can be checked against each other.
pub fn r_star_of_s(s: f64, alpha: Alpha) -> Result<f64, TheoryError> {
    check_s(s)?;
    let cot = 1.0 / (PI / alpha.value()).tan();
    Ok((cot * cot + (1.0 - s * s)).sqrt() - cot)
}

/// Residual (left minus right side) of the angular fixed-point equation
/// whose root in `(0, pi/2)` determines the PhaseLamp certificate.
pub fn lamp_equation_residual(theta: f64, alpha: Alpha) -> f64 {
    let (st, ct) = theta.sin_cos();
    let lhs = theta * ct * ct + (1.0 + 3.0 * st * st) * (st * ct / (1.0 + st * st)).atan();
    let rhs = 2.0 * st * ct + (PI / alpha.value()) * st * st * ct * ct;
    lhs - rhs
}

/// Unique root of the angular fixed-point equation in `(0, pi/2)`.
///
/// Located by scanning 4096 uniform interior points for a sign change and
/// bisecting the bracket down to width `1e-14`. A missing sign change is
/// reported as a convergence failure rather than clamped.
pub fn lamp_theta(alpha: Alpha) -> Result<f64, TheoryError> {
    const SCAN: usize = 4096;
    let h = |t: f64| lamp_equation_residual(t, alpha);
    let step = FRAC_PI_2 / (SCAN as f64 + 1.0);
    let mut t_prev = step;
    let mut h_prev = h(t_prev);
    for k in 2..=SCAN {
        let t = step * k as f64;
        let h_cur = h(t);
        if h_prev <= 0.0 && h_cur >= 0.0 && (h_prev != 0.0 || h_cur != 0.0) {
            let (mut lo, mut hi) = (t_prev, t);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if h(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        t_prev = t;
        h_prev = h_cur;
    }
    Err(TheoryError::ConvergenceFailure(format!(
        "no sign change of the angular equation on (0, pi/2) for alpha = {}",
        alpha.value()
    )))
}

/// Full PhaseLamp sufficient-recovery certificate for one ratio.
pub fn lamp_certificate(alpha: Alpha) -> Result<LampCertificate, TheoryError> {
    let theta_star = lamp_theta(alpha)?;
    let a = alpha.value();
    let c = alpha.c_alpha();
    let t = theta_star.tan();
    let s_hat = t / ((1.0 + c * c + t * t).sqrt() + c);
    let g = g_alpha_unchecked(s_hat, alpha);
    let ell = (s_hat - (a / PI) * (s_hat / (c * c + 1.0 - s_hat * s_hat).sqrt()).atan()) / g.sqrt();
    let rho_s = ell / (ell * ell + 1.0).sqrt();
    Ok(LampCertificate {
        theta_star,
        s_hat,
        ell,
        rho_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn alpha(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn rho(v: f64) -> CosineSimilarity {
        CosineSimilarity::new(v).unwrap()
    }

    #[test]
    fn alpha_rejects_out_of_range() {
        assert!(Alpha::new(2.0).is_err());
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(f64::INFINITY).is_err());
        assert!(Alpha::new(2.0000001).is_ok());
    }

    #[test]
    fn cosine_rejects_out_of_range() {
        assert!(CosineSimilarity::new(0.0).is_err());
        assert!(CosineSimilarity::new(-0.2).is_err());
        assert!(CosineSimilarity::new(1.0000001).is_err());
        assert!(CosineSimilarity::new(1.0).is_ok());
        assert!(CosineSimilarity::new(1e-12).is_ok());
    }

    #[test]
    fn r_alpha_endpoints_vanish() {
        assert_eq!(r_alpha(1.0, alpha(3.0)).unwrap(), 0.0);
        assert_eq!(r_alpha(-1.0, alpha(5.0)).unwrap(), 0.0);
    }

    #[test]
    fn r_alpha_at_zero_alpha_four() {
        // c_4 = 1 exactly, so r = sqrt(2) - 1
        assert_abs_diff_eq!(
            r_alpha(0.0, alpha(4.0)).unwrap(),
            std::f64::consts::SQRT_2 - 1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn r_alpha_domain_errors() {
        assert!(r_alpha(1.1, alpha(3.0)).is_err());
        assert!(r_alpha(f64::NAN, alpha(3.0)).is_err());
    }

    #[test]
    fn g_alpha_endpoints_exact_zero() {
        for a in [2.1, 3.0, 4.0, 7.5, 20.0] {
            assert_eq!(g_alpha(1.0, alpha(a)).unwrap(), 0.0);
            assert_eq!(g_alpha(-1.0, alpha(a)).unwrap(), 0.0);
        }
    }

    #[test]
    fn g_alpha_pinned_values() {
        // pinned against a 50-digit evaluation of the closed form
        assert_abs_diff_eq!(
            g_alpha(0.0, alpha(4.0)).unwrap(),
            0.054786175158098906,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            g_alpha(0.5, alpha(3.0)).unwrap(),
            0.062835249132198592,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            g_alpha(0.0, alpha(3.0)).unwrap(),
            0.1026577908435841,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            g_alpha(0.25, alpha(6.0)).unwrap(),
            0.020751706223063112,
            epsilon = 1e-15
        );
    }

    #[test]
    fn g_alpha_prime_matches_finite_differences() {
        let h = 1e-6;
        for a in [2.5, 3.0, 5.0, 9.0] {
            for s in [-0.9, -0.4, 0.0, 0.3, 0.7, 0.95] {
                let al = alpha(a);
                let fd = (g_alpha_unchecked(s + h, al) - g_alpha_unchecked(s - h, al)) / (2.0 * h);
                assert_abs_diff_eq!(g_alpha_prime(s, al), fd, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn rho_critical_pinned_values() {
        assert_abs_diff_eq!(rho_critical(alpha(3.0)), 0.62880856540120967, epsilon = 1e-15);
        assert_abs_diff_eq!(rho_critical(alpha(4.0)), 0.46325137517610424, epsilon = 1e-15);
        assert_abs_diff_eq!(rho_critical(alpha(5.0)), 0.36768700551255552, epsilon = 1e-15);
    }

    #[test]
    fn rho_critical_limits() {
        assert!(rho_critical(alpha(2.0 + 1e-9)) > 0.9999);
        assert!(rho_critical(alpha(1e6)) < 1e-2);
    }

    #[test]
    fn spo_perfect_recovery_branch_is_exact() {
        // 0.99 is far above rho_c(5) ~ 0.368
        let p = spo_solve(rho(0.99), alpha(5.0)).unwrap();
        assert_eq!(p.s_star, 1.0);
        assert_eq!(p.r_star, 0.0);
        assert_eq!(p.nmse, 0.0);
    }

    #[test]
    fn spo_continuous_at_the_boundary() {
        let a = alpha(3.0);
        let rc = rho_critical(a);
        let above = spo_solve(rho(rc + 1e-6), a).unwrap();
        assert!(above.nmse < 1e-3);
        let below = spo_solve(rho(rc - 1e-6), a).unwrap();
        assert!(below.nmse < 1e-3, "nmse just below threshold = {}", below.nmse);
    }

    #[test]
    fn spo_pinned_interior_solution() {
        // pinned against a 50-digit golden-section solve of the objective
        let p = spo_solve(rho(0.2), alpha(5.0)).unwrap();
        assert_abs_diff_eq!(p.s_star, 0.56504756800494282, epsilon = 1e-10);
        assert_abs_diff_eq!(p.r_star, 0.22834498367532808, epsilon = 1e-10);
        assert_abs_diff_eq!(p.nmse, 0.24132504966810069, epsilon = 1e-10);
    }

    #[test]
    fn spo_prediction_invariants() {
        for (r, a) in [(0.1, 3.0), (0.3, 3.0), (0.2, 5.0), (0.45, 4.0)] {
            let al = alpha(a);
            let p = spo_solve(rho(r), al).unwrap();
            assert!(p.s_star >= 0.0 && p.s_star <= 1.0);
            assert!(p.r_star >= 0.0);
            assert!(p.nmse >= 0.0);
            let recomputed = 1.0 + p.s_star * p.s_star + p.r_star * p.r_star - 2.0 * p.s_star.abs();
            assert_abs_diff_eq!(p.nmse, recomputed.max(0.0), epsilon = 1e-12);
            assert_abs_diff_eq!(p.r_star, r_alpha(p.s_star, al).unwrap(), epsilon = 1e-12);
            assert_abs_diff_eq!(p.rho_c, rho_critical(al), epsilon = 0.0);
        }
    }

    #[test]
    fn c_d_trivial_points() {
        assert_eq!(c_d(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(c_d(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(c_d(-1.0, 0.0).unwrap(), 0.0);
        // |s| > 1 at r = 0 leaves the square of the excess overlap
        assert_abs_diff_eq!(c_d(1.5, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(c_d(-2.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn c_d_pinned_values() {
        assert_abs_diff_eq!(
            c_d(0.3, 0.5).unwrap(),
            0.054527074679428038,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            c_d(-0.7, 0.2).unwrap(),
            0.0062289934437347669,
            epsilon = 1e-15
        );
    }

    #[test]
    fn c_d_rejects_negative_radius() {
        assert!(c_d(0.0, -0.1).is_err());
        assert!(c_d(0.0, f64::NAN).is_err());
    }

    #[test]
    fn r_star_of_s_equals_r_alpha() {
        for a in [2.2, 3.0, 4.0, 8.0, 15.0] {
            let al = alpha(a);
            for k in 0..=100 {
                let s = -1.0 + 2.0 * k as f64 / 100.0;
                let d = (r_star_of_s(s, al).unwrap() - r_alpha(s, al).unwrap()).abs();
                assert!(d <= 1e-12, "mismatch {d} at s={s}, alpha={a}");
            }
        }
    }

    #[test]
    fn lamp_theta_residual_below_tolerance() {
        for a in [2.1, 3.0, 4.0, 10.0, 20.0] {
            let al = alpha(a);
            let t = lamp_theta(al).unwrap();
            assert!(t > 0.0 && t < FRAC_PI_2);
            assert!(
                lamp_equation_residual(t, al).abs() < 1e-10,
                "residual {} at alpha={a}",
                lamp_equation_residual(t, al)
            );
        }
    }

    #[test]
    fn lamp_theta_pinned_values() {
        assert_abs_diff_eq!(
            lamp_theta(alpha(4.0)).unwrap(),
            0.78136305417204385,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            lamp_theta(alpha(10.0)).unwrap(),
            0.24740436239761751,
            epsilon = 1e-12
        );
    }

    #[test]
    fn lamp_certificate_pinned_alpha_six() {
        let c = lamp_certificate(alpha(6.0)).unwrap();
        assert_abs_diff_eq!(c.theta_star, 0.45026738529044259, epsilon = 1e-12);
        assert_abs_diff_eq!(c.s_hat, 0.12755440310558269, epsilon = 1e-12);
        assert_abs_diff_eq!(c.ell, 0.037556190023452297, epsilon = 1e-12);
        assert_abs_diff_eq!(c.rho_s, 0.037529732117656649, epsilon = 1e-12);
    }

    #[test]
    fn lamp_certificate_internal_consistency() {
        for a in [2.5, 3.0, 5.0, 12.0] {
            let al = alpha(a);
            let c = lamp_certificate(al).unwrap();
            assert!(c.s_hat > 0.0 && c.s_hat < 1.0);
            assert_abs_diff_eq!(c.rho_s, c.ell / (c.ell * c.ell + 1.0).sqrt(), epsilon = 1e-15);
            assert!(c.rho_s > 0.0 && c.rho_s < 1.0);
            assert!(c.rho_s < rho_critical(al));
        }
    }

    #[test]
    fn sufficient_ratio_inversion_matches_reported_operating_points() {
        // invert rho_s by bisection: rho_s(alpha) = 0.3 at alpha ~ 3.3
        let target = |t: f64| {
            let f = |a: f64| lamp_certificate(alpha(a)).unwrap().rho_s - t;
            let (mut lo, mut hi) = (2.5, 8.0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                // rho_s decreases in alpha
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert_abs_diff_eq!(target(0.3), 3.3078776542780441, epsilon = 1e-9);
        assert!((target(0.3) - 3.3).abs() < 0.05);
        assert_abs_diff_eq!(target(0.1), 4.5303553349971144, epsilon = 1e-9);
    }
}
