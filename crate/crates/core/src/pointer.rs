//! Gaussian pointer model.
//!
//! The probe starts in a Gaussian with momentum variance `W^2` (position
//! standard deviation `1/(2W)`) and couples to the system through
//! `exp(-i tau A p)`. Because `A = |H><H| - |V><V|` has eigenvalues `+-1`, the
//! post-selected pointer is exactly
//!
//! ```text
//! phi(q)  = c+ G(q - tau) + c- G(q + tau)
//! phi~(p) = (c+ e^{-i p tau} + c- e^{i p tau}) G~(p)
//! ```
//!
//! with `c+ = conj(f_h) i_h` and `c- = conj(f_v) i_v`. [`evolve_exact`]
//! integrates both forms independently on uniform grids; the first-order
//! shifts `tau Re A_w` and `2 tau W^2 Im A_w` come from [`first_order_shifts`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weak_value::{general, post_state, pre_state, SchemeConfig, WeakValueResult, EPS_DIV};

/// Weakness `tau |A_w|` above which first-order shifts are flagged.
pub const WEAKNESS_WARNING: f64 = 0.1;

/// Weakness at or below which first-order shifts are expected to match the
/// exact evolution to 2%.
pub const ORACLE_AGREEMENT_WEAKNESS: f64 = 0.01;

const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPointer {
    w: f64,
    tau: f64,
}

impl GaussianPointer {
    pub fn new(w: f64, tau: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::invalid(format!("pointer width W must be positive, got {w}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::invalid(format!("coupling tau must be finite and >= 0, got {tau}")));
        }
        Ok(Self { w, tau })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Position-space standard deviation `1/(2W)`.
    pub fn sigma_q(&self) -> f64 {
        0.5 / self.w
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.w, tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerShift {
    pub dq: f64,
    pub dp: f64,
    /// `tau |A_w|`.
    pub weakness: f64,
    /// Set when `weakness` exceeds the warning threshold.
    pub warning: bool,
}

pub fn first_order_shifts(wv: &WeakValueResult, ptr: &GaussianPointer) -> PointerShift {
    first_order_shifts_with(wv, ptr, WEAKNESS_WARNING)
}

pub fn first_order_shifts_with(wv: &WeakValueResult, ptr: &GaussianPointer, warn_above: f64) -> PointerShift {
    let weakness = ptr.tau * wv.ab;
    PointerShift {
        dq: ptr.tau * wv.re,
        dp: 2.0 * ptr.tau * ptr.w * ptr.w * wv.im,
        weakness,
        warning: weakness > warn_above,
    }
}

/// Uniform trapezoidal grids for the exact evolution.
///
/// The position grid spans `[-L, L]` with
/// `L = half_width_sigmas * sigma_q + tau_margin * tau`; the momentum grid
/// spans `half_width_sigmas * W` on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub points: usize,
    pub half_width_sigmas: f64,
    pub tau_margin: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            points: 1 << 14,
            half_width_sigmas: 10.0,
            tau_margin: 10.0,
        }
    }
}

impl QuadratureSpec {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactEvolution {
    pub shift: PointerShift,
    /// `int |phi(q)|^2 dq`.
    pub prob: f64,
}

/// All-orders pointer shifts and post-selection probability of `cfg`.
pub fn evolve_exact(cfg: &SchemeConfig, ptr: &GaussianPointer, grid: &QuadratureSpec) -> Result<ExactEvolution> {
    evolve_signed(cfg, ptr.w, ptr.tau, grid)
}

/// Same as [`evolve_exact`] but accepts a negative coupling.
pub(crate) fn evolve_signed(cfg: &SchemeConfig, w: f64, tau: f64, grid: &QuadratureSpec) -> Result<ExactEvolution> {
    let pre = pre_state(cfg);
    let post = post_state(cfg);
    let c_plus = post.amp_h().conj() * pre.amp_h();
    let c_minus = post.amp_v().conj() * pre.amp_v();
    if c_plus.norm() < EPS_DIV && c_minus.norm() < EPS_DIV {
        return Err(Error::OrthogonalPostselection {
            overlap: (c_plus + c_minus).norm(),
        });
    }
    if grid.points < 3 {
        return Err(Error::Resolution(format!("need at least 3 quadrature points, got {}", grid.points)));
    }

    let sigma = 0.5 / w;
    let n = grid.points;

    // position space: |c+ G(q - tau) + c- G(q + tau)|^2
    let lq = grid.half_width_sigmas * sigma + grid.tau_margin * tau.abs();
    let hq = 2.0 * lq / (n - 1) as f64;
    if hq > sigma / 4.0 {
        return Err(Error::Resolution(format!(
            "position step {hq:e} does not resolve pointer width {sigma:e}"
        )));
    }
    let gauss_q = |q: f64| (2.0 * PI * sigma * sigma).powf(-0.25) * (-q * q / (4.0 * sigma * sigma)).exp();
    let mut mass = 0.0;
    let mut norm_q = 0.0;
    let mut first_q = 0.0;
    for i in 0..n {
        let q = grid_point(lq, hq, i, n);
        let wt = trapezoid_weight(hq, i, n);
        let g0 = gauss_q(q);
        let phi = c_plus * gauss_q(q - tau) + c_minus * gauss_q(q + tau);
        let dens = phi.norm_sqr();
        mass += wt * g0 * g0;
        norm_q += wt * dens;
        first_q += wt * q * dens;
    }
    if mass < 1.0 - MASS_TOL {
        return Err(Error::Resolution(format!(
            "position grid holds only {mass} of the pointer mass"
        )));
    }

    // momentum space: |(c+ e^{-i p tau} + c- e^{i p tau}) G~(p)|^2
    let lp = grid.half_width_sigmas * w;
    let hp = 2.0 * lp / (n - 1) as f64;
    if hp > w / 4.0 || 2.0 * tau.abs() * hp > PI / 8.0 {
        return Err(Error::Resolution(format!(
            "momentum step {hp:e} does not resolve width {w:e} and phase period of tau = {tau:e}"
        )));
    }
    let gauss_p = |p: f64| (2.0 * PI * w * w).powf(-0.25) * (-p * p / (4.0 * w * w)).exp();
    let mut mass_p = 0.0;
    let mut norm_p = 0.0;
    let mut first_p = 0.0;
    for i in 0..n {
        let p = grid_point(lp, hp, i, n);
        let wt = trapezoid_weight(hp, i, n);
        let g = gauss_p(p);
        let amp = (c_plus * Complex64::from_polar(1.0, -p * tau) + c_minus * Complex64::from_polar(1.0, p * tau)) * g;
        let dens = amp.norm_sqr();
        mass_p += wt * g * g;
        norm_p += wt * dens;
        first_p += wt * p * dens;
    }
    if mass_p < 1.0 - MASS_TOL {
        return Err(Error::Resolution(format!(
            "momentum grid holds only {mass_p} of the pointer mass"
        )));
    }
    if norm_q < EPS_DIV * EPS_DIV {
        return Err(Error::OrthogonalPostselection { overlap: norm_q.sqrt() });
    }

    let weakness = match general(cfg) {
        Ok(wv) => tau.abs() * wv.ab,
        Err(_) => f64::INFINITY,
    };
    Ok(ExactEvolution {
        shift: PointerShift {
            dq: first_q / norm_q,
            dp: first_p / norm_p,
            weakness,
            warning: weakness > WEAKNESS_WARNING,
        },
        prob: norm_q,
    })
}

/// Grid points mirror exactly around zero.
fn grid_point(half_width: f64, step: f64, i: usize, n: usize) -> f64 {
    let j = n - 1 - i;
    if i <= j {
        -half_width + i as f64 * step
    } else {
        half_width - j as f64 * step
    }
}

fn trapezoid_weight(step: f64, i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        0.5 * step
    } else {
        step
    }
}

/// One row of a first-order vs exact comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub dq_exact: f64,
    pub dq_first: f64,
    pub dp_exact: f64,
    pub dp_first: f64,
    pub weakness: f64,
}

impl ConvergenceRow {
    pub fn dq_residual(&self) -> f64 {
        self.dq_exact - self.dq_first
    }

    pub fn dp_residual(&self) -> f64 {
        self.dp_exact - self.dp_first
    }
}

/// Exact and first-order shifts at the pointer's own coupling.
pub fn convergence_row(cfg: &SchemeConfig, ptr: &GaussianPointer, grid: &QuadratureSpec) -> Result<ConvergenceRow> {
    let wv = general(cfg)?;
    let first = first_order_shifts(&wv, ptr);
    let exact = evolve_exact(cfg, ptr, grid)?;
    Ok(ConvergenceRow {
        tau: ptr.tau,
        dq_exact: exact.shift.dq,
        dq_first: first.dq,
        dp_exact: exact.shift.dp,
        dp_first: first.dp,
        weakness: first.weakness,
    })
}

/// One [`ConvergenceRow`] per coupling in `taus`, at the width of `ptr`.
pub fn convergence_study(
    cfg: &SchemeConfig,
    ptr: &GaussianPointer,
    taus: &[f64],
    grid: &QuadratureSpec,
) -> Result<Vec<ConvergenceRow>> {
    taus.iter()
        .map(|&tau| convergence_row(cfg, &ptr.with_tau(tau)?, grid))
        .collect()
}
