//! Recovering the post-selection angle `beta` from measured quantities.
//!
//! Estimators invert through the ideal scheme-B model (`|A_w| = cot beta`,
//! `P = sin^2 beta`) while the data come from scheme C with an unnoticed
//! pre-selection deflection `alpha`. The resulting bias is the systematic
//! error `err = beta_hat - beta_true`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weak_value::{closed_form, scheme_c_im_magnitude, SchemeConfig};

/// Which measured quantity is inverted to obtain `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EstimatorKind {
    /// `|Im A_w|`, read off the momentum shift.
    ImBased,
    /// `|A_w|`, from the joint position and momentum shifts.
    AbBased,
    /// Post-selection probability.
    ProbBased,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::ImBased, EstimatorKind::AbBased, EstimatorKind::ProbBased];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::ImBased => "im",
            EstimatorKind::AbBased => "ab",
            EstimatorKind::ProbBased => "prob",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "im" => Ok(EstimatorKind::ImBased),
            "ab" => Ok(EstimatorKind::AbBased),
            "prob" => Ok(EstimatorKind::ProbBased),
            _ => Err(Error::invalid(format!("unknown estimator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub beta_true: f64,
    pub alpha_deflection: f64,
    pub estimator: EstimatorKind,
    pub measured: f64,
    pub beta_hat: f64,
    pub err: f64,
}

/// Noiseless measurement of the quantity used by `kind`.
pub fn measure(cfg: &SchemeConfig, kind: EstimatorKind) -> Result<f64> {
    let wv = closed_form(cfg)?;
    Ok(match kind {
        EstimatorKind::ImBased => wv.im.abs(),
        EstimatorKind::AbBased => wv.ab,
        EstimatorKind::ProbBased => wv.prob,
    })
}

/// Inverts `measured` through the scheme-B model; principal branch in `(0, pi/2)`.
pub fn estimate_beta(measured: f64, kind: EstimatorKind) -> Result<f64> {
    match kind {
        EstimatorKind::ImBased | EstimatorKind::AbBased => {
            if !(measured.is_finite() && measured > 0.0) {
                return Err(Error::invalid(format!("{kind} estimator needs a positive measurement, got {measured}")));
            }
            Ok(measured.recip().atan())
        }
        EstimatorKind::ProbBased => {
            if !(measured > 0.0 && measured <= 1.0) {
                return Err(Error::invalid(format!("probability must lie in (0, 1], got {measured}")));
            }
            Ok(measured.sqrt().asin())
        }
    }
}

pub fn systematic_error(beta_true: f64, alpha_deflection: f64, kind: EstimatorKind) -> Result<ErrorRecord> {
    let cfg = SchemeConfig::c(alpha_deflection, beta_true)?;
    let measured = measure(&cfg, kind)?;
    let beta_hat = estimate_beta(measured, kind)?;
    Ok(ErrorRecord {
        beta_true,
        alpha_deflection,
        estimator: kind,
        measured,
        beta_hat,
        err: beta_hat - beta_true,
    })
}

/// One `(beta, estimator)` point of an error curve; failures are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub beta_true: f64,
    pub alpha_deflection: f64,
    pub estimator: EstimatorKind,
    pub outcome: Result<ErrorRecord>,
}

/// Systematic errors of every estimator over `betas`, ordered by `(beta, estimator)`.
pub fn error_curve(betas: &[f64], alpha_deflection: f64) -> Vec<CurvePoint> {
    let mut sorted = betas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .into_iter()
        .flat_map(|beta| {
            EstimatorKind::ALL.into_iter().map(move |kind| CurvePoint {
                beta_true: beta,
                alpha_deflection,
                estimator: kind,
                outcome: systematic_error(beta, alpha_deflection, kind),
            })
        })
        .collect()
}

/// Relative gap below the peak value treated as a tangent (single) root.
pub const TANGENT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 200;

/// All `beta` in `(0, pi/4)` with `|Im A_w(alpha, beta)| = im_target` in scheme C.
///
/// `|Im A_w|` rises on `(0, alpha)`, peaks at `cot(2 alpha)` when
/// `beta = alpha` and falls afterwards, so a target yields two roots below the
/// peak, one at it and none above it. Each monotone branch is bisected.
pub fn invert_im_two_branch(im_target: f64, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < FRAC_PI_4) {
        return Err(Error::invalid(format!("alpha must lie in (0, pi/4), got {alpha}")));
    }
    if !(im_target.is_finite() && im_target > 0.0) {
        return Err(Error::invalid(format!("target must be positive, got {im_target}")));
    }
    let f = |beta: f64| scheme_c_im_magnitude(alpha, beta);
    let peak = f(alpha);
    if (im_target - peak).abs() <= TANGENT_TOL * peak {
        return Ok(vec![alpha]);
    }
    if im_target > peak {
        return Ok(Vec::new());
    }
    let mut roots = vec![bisect(f, im_target, 0.0, alpha)];
    if f(FRAC_PI_4) < im_target {
        roots.push(bisect(f, im_target, alpha, FRAC_PI_4));
    }
    Ok(roots)
}

/// Bisection for `f(x) = target` on `[lo, hi]`, given a sign change of `f - target`.
fn bisect(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let below_at_lo = f(lo) < target;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == target {
            return mid;
        }
        if (v < target) == below_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo), f(hi));
    if (flo - target).abs() <= (fhi - target).abs() {
        lo
    } else {
        hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn measurements() {
        let c = SchemeConfig::c(0.002, 0.002).unwrap();
        assert!((measure(&c, EstimatorKind::ImBased).unwrap() - 249.998_666_665_244_4).abs() < 1e-8);
        assert!((measure(&c, EstimatorKind::AbBased).unwrap() - 353.552_919_191_455_7).abs() < 1e-8);
        let b = SchemeConfig::b(0.002).unwrap();
        assert!((measure(&b, EstimatorKind::ProbBased).unwrap() - 3.999_994_666_669_511e-6).abs() < 1e-18);
        assert!(measure(&SchemeConfig::b(0.0).unwrap(), EstimatorKind::ImBased).is_err());
    }

    #[test]
    fn estimator_inversions() {
        let q = estimate_beta(1.0, EstimatorKind::AbBased).unwrap();
        assert!((q - FRAC_PI_4).abs() < 1e-15);
        let b = estimate_beta(249.998_666_665_244_4, EstimatorKind::ImBased).unwrap();
        assert!((b - 0.004).abs() < 1e-12);
        let b = estimate_beta(7.999_957_333_424_355e-6, EstimatorKind::ProbBased).unwrap();
        assert!((b - 0.002_828_423_353_499_464).abs() < 1e-14);
    }

    #[test]
    fn estimator_domains() {
        assert!(estimate_beta(0.0, EstimatorKind::ImBased).is_err());
        assert!(estimate_beta(-3.0, EstimatorKind::AbBased).is_err());
        assert!(estimate_beta(f64::NAN, EstimatorKind::AbBased).is_err());
        assert!(estimate_beta(0.0, EstimatorKind::ProbBased).is_err());
        assert!(estimate_beta(1.5, EstimatorKind::ProbBased).is_err());
        assert!(estimate_beta(1.0, EstimatorKind::ProbBased).is_ok());
    }

    #[test]
    fn reference_errors() {
        let im = systematic_error(0.002, 0.002, EstimatorKind::ImBased).unwrap();
        assert!((im.err - 0.002).abs() < 1e-12);
        let ab = systematic_error(0.002, 0.002, EstimatorKind::AbBased).unwrap();
        assert!((ab.err - 8.284_233_534_994_643e-4).abs() < 1e-14);
        let pr = systematic_error(0.002, 0.002, EstimatorKind::ProbBased).unwrap();
        assert!((pr.err - ab.err).abs() < 1e-12);
        for kind in EstimatorKind::ALL {
            let r = systematic_error(0.002, 0.0, kind).unwrap();
            assert!(r.err.abs() < 1e-12, "{kind}: {}", r.err);
            assert_eq!(r.err, r.beta_hat - r.beta_true);
        }
    }

    #[test]
    fn error_falls_with_deflection() {
        let small = systematic_error(0.002, 0.001, EstimatorKind::ImBased).unwrap();
        let big = systematic_error(0.002, 0.002, EstimatorKind::ImBased).unwrap();
        assert!((small.err - 4.999_996_249_996_562e-4).abs() < 1e-12);
        assert!(small.err < big.err);
    }

    #[test]
    fn curve_ordering_and_flags() {
        let pts = error_curve(&[0.003, 0.0, 0.002], 0.0);
        assert_eq!(pts.len(), 9);
        assert!(pts.windows(2).all(|w| (w[0].beta_true, w[0].estimator) < (w[1].beta_true, w[1].estimator)));
        // alpha = beta = 0 diverges and is kept, flagged
        assert!(pts[..3].iter().all(|p| p.outcome.is_err()));
        assert!(pts[3..].iter().all(|p| p.outcome.as_ref().unwrap().err.abs() < 1e-12));
    }

    #[test]
    fn two_branch_examples() {
        let alpha: f64 = 0.002;
        let peak = (2.0 * alpha).tan().recip();
        assert_eq!(invert_im_two_branch(peak, alpha).unwrap(), vec![alpha]);
        assert!(invert_im_two_branch(300.0, alpha).unwrap().is_empty());

        let roots = invert_im_two_branch(200.0, alpha).unwrap();
        assert_eq!(roots.len(), 2);
        // 40-digit roots of the exact formula
        assert!((roots[0] - 1.000_009_889_007_685e-3).abs() < 1e-15);
        assert!((roots[1] - 3.999_948_444_950_637e-3).abs() < 1e-15);
    }

    #[test]
    fn two_branch_preconditions() {
        assert!(invert_im_two_branch(10.0, 0.0).is_err());
        assert!(invert_im_two_branch(10.0, 0.9).is_err());
        assert!(invert_im_two_branch(-1.0, 0.01).is_err());
    }

    #[test]
    fn low_target_keeps_rising_branch_only() {
        // the falling branch ends at cos(2 alpha) when beta = pi/4
        let alpha: f64 = 0.2;
        let roots = invert_im_two_branch(0.5 * (2.0 * alpha).cos(), alpha).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0] < alpha);
    }

    proptest! {
        #[test]
        fn ab_and_prob_estimators_coincide(alpha in 0.0..0.3f64, beta in 1e-5..0.3f64) {
            let ab = systematic_error(beta, alpha, EstimatorKind::AbBased).unwrap();
            let pr = systematic_error(beta, alpha, EstimatorKind::ProbBased).unwrap();
            prop_assert!((ab.beta_hat - pr.beta_hat).abs() <= 1e-12);
        }

        #[test]
        fn estimator_ordering(alpha in 1e-6..0.05f64, beta in 1e-6..0.05f64) {
            let im = systematic_error(beta, alpha, EstimatorKind::ImBased).unwrap().err;
            let ab = systematic_error(beta, alpha, EstimatorKind::AbBased).unwrap().err;
            let pr = systematic_error(beta, alpha, EstimatorKind::ProbBased).unwrap().err;
            prop_assert!(im > ab);
            prop_assert!((ab - pr).abs() <= 1e-12);
            prop_assert!(ab >= 0.0);
        }

        #[test]
        fn two_branch_roots_hit_target(alpha in 1e-4..0.3f64, frac in 0.05..0.999f64) {
            let peak = scheme_c_im_magnitude(alpha, alpha);
            let target = frac * peak;
            let roots = invert_im_two_branch(target, alpha).unwrap();
            prop_assert!(!roots.is_empty());
            for &r in &roots {
                let v = scheme_c_im_magnitude(alpha, r);
                prop_assert!((v - target).abs() <= 1e-10 * target, "r={} v={} t={}", r, v, target);
            }
            if roots.len() == 2 {
                prop_assert!(roots[0] < alpha && alpha < roots[1]);
            }
        }
    }
}
