//! Angle sweeps and the sensitivity/post-selection anomaly.
//!
//! In scheme C at fixed `beta`, `Re A_w = sin 2a / (1 - cos 2a cos 2b)` is not
//! monotone in `alpha`: it peaks at `alpha = beta`. Below the peak, lowering
//! the post-selection probability (smaller `alpha`) also lowers the
//! sensitivity, which is the anomaly located by [`anomaly_report`].

use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weak_value::{closed_form, scheme_c_re, SchemeConfig, SchemeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` angles from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleGrid {
    start: f64,
    stop: f64,
    count: usize,
    spacing: Spacing,
}

impl AngleGrid {
    pub fn new(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(Error::invalid(format!("grid needs finite start < stop, got {start}..{stop}")));
        }
        if count < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return Err(Error::invalid("log spacing requires start > 0"));
        }
        Ok(Self {
            start,
            stop,
            count,
            spacing,
        })
    }

    pub fn linear(start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::new(start, stop, count, Spacing::Linear)
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Result<Self> {
        Self::new(start, stop, count, Spacing::Log)
    }

    /// 400 log-spaced points on `[1e-5, 0.1]`.
    pub fn default_log() -> Self {
        Self::log(1e-5, 0.1, 400).expect("static grid")
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut pts: Vec<f64> = match self.spacing {
            Spacing::Linear => (0..self.count)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / last)
                .collect(),
            Spacing::Log => {
                let (l0, l1) = (self.start.ln(), self.stop.ln());
                (0..self.count)
                    .map(|i| (l0 + (l1 - l0) * i as f64 / last).exp())
                    .collect()
            }
        };
        pts[0] = self.start;
        pts[self.count - 1] = self.stop;
        pts
    }

    /// [`AngleGrid::points`] merged with [`refine_around`] points.
    pub fn refined_around(&self, center: f64) -> Vec<f64> {
        refine_around(&self.points(), center)
    }
}

/// Merges 100 linear points on `[center/2, 3 center/2]` into `points`,
/// clipped to their range, sorted and deduplicated.
pub fn refine_around(points: &[f64], center: f64) -> Vec<f64> {
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mut pts = points.to_vec();
    if center > 0.0 {
        pts.extend((0..100).map(|i| center * (0.5 + i as f64 / 99.0)));
    }
    pts.retain(|x| (lo..=hi).contains(x));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

impl FromStr for AngleGrid {
    type Err = Error;

    /// Parses `start:stop:count:spacing`, e.g. `1e-5:0.01:400:log`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid(format!("cannot parse grid `{s}` (expected start:stop:count:linear|log)"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts[3].trim() {
            "linear" | "lin" => Spacing::Linear,
            "log" => Spacing::Log,
            _ => return Err(bad()),
        };
        Self::new(start, stop, count, spacing)
    }
}

/// Which angle varies along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SweepPlan {
    /// Scheme A over `alpha`.
    SchemeA,
    /// Scheme B over `beta`.
    SchemeB,
    /// Scheme C over `alpha` at fixed `beta`.
    FixedBeta(f64),
    /// Scheme C over `beta` at fixed `alpha`.
    FixedAlpha(f64),
}

impl SweepPlan {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SweepPlan::SchemeA => SchemeKind::A,
            SweepPlan::SchemeB => SchemeKind::B,
            SweepPlan::FixedBeta(_) | SweepPlan::FixedAlpha(_) => SchemeKind::C,
        }
    }

    /// `(alpha, beta)` at swept value `x`.
    pub fn angles(&self, x: f64) -> (f64, f64) {
        match *self {
            SweepPlan::SchemeA => (x, 0.0),
            SweepPlan::SchemeB => (0.0, x),
            SweepPlan::FixedBeta(beta) => (x, beta),
            SweepPlan::FixedAlpha(alpha) => (alpha, x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub re_aw: f64,
    pub im_aw: f64,
    pub ab_aw: f64,
    pub prob: f64,
    /// False when the point diverges or is out of domain; the values are NaN then.
    pub ok: bool,
}

/// Closed-form rows at each swept angle, ascending.
pub fn sweep(plan: SweepPlan, points: &[f64]) -> Vec<SweepRow> {
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    xs.into_iter()
        .map(|x| {
            let (alpha, beta) = plan.angles(x);
            match SchemeConfig::new(plan.kind(), alpha, beta).and_then(|cfg| closed_form(&cfg)) {
                Ok(wv) => SweepRow {
                    alpha,
                    beta,
                    re_aw: wv.re,
                    im_aw: wv.im,
                    ab_aw: wv.ab,
                    prob: wv.prob,
                    ok: true,
                },
                Err(_) => SweepRow {
                    alpha,
                    beta,
                    re_aw: f64::NAN,
                    im_aw: f64::NAN,
                    ab_aw: f64::NAN,
                    prob: f64::NAN,
                    ok: false,
                },
            }
        })
        .collect()
}

const GOLDEN_ITERS: usize = 200;

/// `argmax_alpha Re A_w(alpha, beta_fixed)` in scheme C.
///
/// The grid argmax brackets the peak, which is then refined by golden-section
/// search on its two neighbouring intervals.
pub fn find_sensitivity_peak(beta_fixed: f64, search: &[f64]) -> Result<f64> {
    if !(beta_fixed.is_finite() && beta_fixed > 0.0) {
        return Err(Error::invalid(format!("beta must be positive, got {beta_fixed}")));
    }
    if search.len() < 3 {
        return Err(Error::Resolution("peak search needs at least 3 grid points".into()));
    }
    let f = |a: f64| scheme_c_re(a, beta_fixed);
    let (imax, _) = search
        .iter()
        .enumerate()
        .map(|(i, &a)| (i, f(a)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    if imax == 0 || imax == search.len() - 1 {
        return Err(Error::Range(format!(
            "sensitivity peak for beta = {beta_fixed:e} lies outside [{:e}, {:e}]",
            search[0],
            search[search.len() - 1]
        )));
    }
    Ok(golden_max(f, search[imax - 1], search[imax + 1]))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if b - a <= 4.0 * f64::EPSILON * b.abs() {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Joint behaviour of `Re A_w` and `P` on one grid interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    /// Both rise with `alpha`: less post-selection, less sensitivity.
    Anomalous,
    /// `Re A_w` falls while `P` rises.
    Normal,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub beta_fixed: f64,
    /// Refined location of the `Re A_w` maximum; `None` when it lies below the grid.
    pub alpha_peak: Option<f64>,
    /// `(0, end of the leading run of anomalous intervals)`; `None` when empty.
    pub anomalous_interval: Option<(f64, f64)>,
    /// From the anomalous boundary to the grid end.
    pub normal_interval: Option<(f64, f64)>,
    /// Grid spacing at the anomalous boundary.
    pub boundary_step: f64,
    pub trends: Vec<Trend>,
}

/// Classifies the intervals of `points` by the signs of the finite differences
/// of `Re A_w` and `P` in scheme C at fixed `beta`.
pub fn anomaly_report(beta_fixed: f64, points: &[f64]) -> Result<AnomalyReport> {
    if !(beta_fixed.is_finite() && beta_fixed >= 0.0) {
        return Err(Error::invalid(format!("beta must be >= 0, got {beta_fixed}")));
    }
    let rows = sweep(SweepPlan::FixedBeta(beta_fixed), points);
    if rows.len() < 3 {
        return Err(Error::Resolution("anomaly classification needs at least 3 grid points".into()));
    }
    if let Some(bad) = rows.iter().find(|r| !r.ok) {
        return Err(Error::OrthogonalPostselection { overlap: bad.alpha.abs() });
    }
    let last = rows[rows.len() - 1].alpha;
    if beta_fixed > last {
        return Err(Error::Range(format!(
            "grid ends at {last:e}, below beta = {beta_fixed:e}; nothing lies past the peak"
        )));
    }

    let trends: Vec<Trend> = rows
        .windows(2)
        .map(|w| {
            let d_re = w[1].re_aw - w[0].re_aw;
            let d_p = w[1].prob - w[0].prob;
            match (d_re > 0.0, d_re < 0.0, d_p > 0.0) {
                (true, _, true) => Trend::Anomalous,
                (_, true, true) => Trend::Normal,
                _ => Trend::Other,
            }
        })
        .collect();
    let leading = trends.iter().take_while(|t| **t == Trend::Anomalous).count();

    let alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let (alpha_peak, anomalous_interval, boundary, boundary_step) = if leading == 0 {
        (None, None, alphas[0], alphas[1] - alphas[0])
    } else {
        let below = leading + 1;
        let above = alphas.len() - leading;
        if below < 3 || above < 3 {
            return Err(Error::Resolution(format!(
                "grid has {below} points up to the peak and {above} from it; need at least 3 on each side"
            )));
        }
        let peak = find_sensitivity_peak(beta_fixed, &alphas)?;
        let b = alphas[leading];
        let step = (alphas[leading + 1] - b).max(b - alphas[leading - 1]);
        (Some(peak), Some((0.0, b)), b, step)
    };
    let normal_interval = (boundary < last).then_some((boundary, last));
    Ok(AnomalyReport {
        beta_fixed,
        alpha_peak,
        anomalous_interval,
        normal_interval,
        boundary_step,
        trends,
    })
}
