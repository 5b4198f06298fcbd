//! Measurement schemes and their weak values.
//!
//! Three configurations are modeled:
//!
//! * **A**: pre-selection `linear(pi/4 + alpha)`, post-selection `linear(-pi/4)`;
//!   the weak value `cot(alpha)` is purely real.
//! * **B**: pre-selection `linear(pi/4)`, post-selection `phase(beta)`;
//!   the weak value `-i cot(beta)` is purely imaginary.
//! * **C**: pre-selection `linear(pi/4 + alpha)`, post-selection `phase(beta)`;
//!   the weak value is plural (both parts nonzero).
//!
//! [`weak_value`] evaluates the general definition `<f|A|i> / <f|i>` from the
//! states; [`closed_form`] evaluates the per-scheme trigonometric expressions.
//! Both use the conjugated-bra convention of [`crate::states::inner`], under
//! which scheme C reduces to A as `beta -> 0` and to B as `alpha -> 0`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{apply, braket, inner, linear_state, phase_state, Observable, PolarizationState};

/// Smallest `|<post|pre>|` for which a weak value is reported.
pub const EPS_DIV: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SchemeKind {
    A,
    B,
    C,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::A => "a",
            SchemeKind::B => "b",
            SchemeKind::C => "c",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(SchemeKind::A),
            "b" => Ok(SchemeKind::B),
            "c" => Ok(SchemeKind::C),
            _ => Err(Error::invalid(format!("unknown scheme `{s}` (expected a, b or c)"))),
        }
    }
}

/// Scheme identity plus the polarizer deflection `alpha` and the
/// post-selection angle `beta`, both in radians within `(-pi/2, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    kind: SchemeKind,
    alpha: f64,
    beta: f64,
}

fn check_angle(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() >= FRAC_PI_2 {
        return Err(Error::invalid(format!("{name} must lie in (-pi/2, pi/2), got {x}")));
    }
    Ok(())
}

impl SchemeConfig {
    /// Scheme A with deflection `alpha`.
    pub fn a(alpha: f64) -> Result<Self> {
        check_angle("alpha", alpha)?;
        Ok(Self {
            kind: SchemeKind::A,
            alpha,
            beta: 0.0,
        })
    }

    /// Scheme B with post-selection angle `beta`.
    pub fn b(beta: f64) -> Result<Self> {
        check_angle("beta", beta)?;
        Ok(Self {
            kind: SchemeKind::B,
            alpha: 0.0,
            beta,
        })
    }

    /// Scheme C with both angles.
    pub fn c(alpha: f64, beta: f64) -> Result<Self> {
        check_angle("alpha", alpha)?;
        check_angle("beta", beta)?;
        Ok(Self {
            kind: SchemeKind::C,
            alpha,
            beta,
        })
    }

    /// Builds a config of `kind`, ignoring the angle the scheme does not use.
    pub fn new(kind: SchemeKind, alpha: f64, beta: f64) -> Result<Self> {
        match kind {
            SchemeKind::A => Self::a(alpha),
            SchemeKind::B => Self::b(beta),
            SchemeKind::C => Self::c(alpha, beta),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A weak value together with its post-selection probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeakValueResult {
    #[serde(skip)]
    pub aw: Complex64,
    pub re: f64,
    pub im: f64,
    /// Modulus `|A_w|`.
    pub ab: f64,
    pub prob: f64,
}

impl WeakValueResult {
    fn from_parts(aw: Complex64, prob: f64) -> Self {
        Self {
            aw,
            re: aw.re,
            im: aw.im,
            ab: aw.norm(),
            prob,
        }
    }
}

pub fn pre_state(cfg: &SchemeConfig) -> PolarizationState {
    let theta = match cfg.kind {
        SchemeKind::A | SchemeKind::C => FRAC_PI_4 + cfg.alpha,
        SchemeKind::B => FRAC_PI_4,
    };
    linear_state(theta).expect("validated angle is finite")
}

pub fn post_state(cfg: &SchemeConfig) -> PolarizationState {
    match cfg.kind {
        SchemeKind::A => linear_state(-FRAC_PI_4),
        SchemeKind::B | SchemeKind::C => phase_state(cfg.beta),
    }
    .expect("validated angle is finite")
}

/// `<post|obs|pre> / <post|pre>` and `|<post|pre>|^2`.
pub fn weak_value(
    pre: &PolarizationState,
    post: &PolarizationState,
    obs: &Observable,
) -> Result<WeakValueResult> {
    let overlap = inner(post, pre);
    if overlap.norm() < EPS_DIV {
        return Err(Error::OrthogonalPostselection {
            overlap: overlap.norm(),
        });
    }
    let numerator = braket(post, &apply(obs, pre));
    Ok(WeakValueResult::from_parts(numerator / overlap, overlap.norm_sqr()))
}

pub fn postselection_probability(pre: &PolarizationState, post: &PolarizationState) -> f64 {
    inner(post, pre).norm_sqr().min(1.0)
}

/// Weak value of `pauli_hv` evaluated from the scheme's states.
pub fn general(cfg: &SchemeConfig) -> Result<WeakValueResult> {
    weak_value(&pre_state(cfg), &post_state(cfg), &Observable::pauli_hv())
}

/// Closed-form weak value and probability of a scheme.
///
/// Scheme C is evaluated as
/// `(cos a cos b + i sin a sin b) / (sin a cos b + i cos a sin b)` with
/// probability `sin^2 a cos^2 b + cos^2 a sin^2 b = (1 - cos 2a cos 2b) / 2`,
/// which avoids the cancellation of the `1 - cos cos` form at small angles.
pub fn closed_form(cfg: &SchemeConfig) -> Result<WeakValueResult> {
    let (sa, ca) = cfg.alpha.sin_cos();
    let (sb, cb) = cfg.beta.sin_cos();
    match cfg.kind {
        SchemeKind::A => {
            guard(sa.abs())?;
            Ok(WeakValueResult::from_parts(Complex64::new(ca / sa, 0.0), sa * sa))
        }
        SchemeKind::B => {
            guard(sb.abs())?;
            Ok(WeakValueResult::from_parts(Complex64::new(0.0, -cb / sb), sb * sb))
        }
        SchemeKind::C => {
            let num = Complex64::new(ca * cb, sa * sb);
            let den = Complex64::new(sa * cb, ca * sb);
            guard(den.norm())?;
            Ok(WeakValueResult::from_parts(num / den, den.norm_sqr()))
        }
    }
}

fn guard(overlap: f64) -> Result<()> {
    if overlap < EPS_DIV {
        Err(Error::OrthogonalPostselection { overlap })
    } else {
        Ok(())
    }
}

/// `|Im A_w|` of scheme C as a function of `beta` at fixed `alpha`:
/// `sin 2b cos 2a / (1 - cos 2a cos 2b)`.
pub fn scheme_c_im_magnitude(alpha: f64, beta: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let prob = sa * sa * cb * cb + ca * ca * sb * sb;
    ((2.0 * beta).sin() * (2.0 * alpha).cos() / (2.0 * prob)).abs()
}

/// `Re A_w` of scheme C: `sin 2a / (1 - cos 2a cos 2b)`.
pub fn scheme_c_re(alpha: f64, beta: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let prob = sa * sa * cb * cb + ca * ca * sb * sb;
    sa * ca / prob
}
