//! Command-line front end.
//!
//! Every subcommand renders to a string so output is assembled in one place
//! and in a fixed order. CSV numbers use Rust's shortest round-trip
//! scientific notation (`{:e}`), so repeated runs are byte-identical.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::estimation::{error_curve, invert_im_two_branch};
use crate::pointer::{convergence_row, GaussianPointer, QuadratureSpec};
use crate::sweep::{anomaly_report, refine_around, sweep, AngleGrid, SweepPlan};
use crate::weak_value::{closed_form, SchemeConfig, SchemeKind};

pub const FORMAT_VERSION: u32 = 1;

pub const SWEEP_HEADER: &str = "alpha_rad,beta_rad,re_aw,im_aw,ab_aw,prob,ok";
pub const SYSERR_HEADER: &str = "beta_true,alpha_defl,estimator,measured,beta_hat,err,ok";
pub const INVERT_HEADER: &str = "alpha,im_target,branch,beta_root,ok";
pub const ORACLE_HEADER: &str = "tau,dq_exact,dq_first,dp_exact,dp_first,weakness,ok";
pub const ANOMALY_HEADER: &str =
    "beta_fixed,alpha_peak,anomalous_start,anomalous_end,normal_start,normal_end,boundary_step,ok";
pub const WEAKVALUE_HEADER: &str = "re,im,ab,prob";

#[derive(Debug, Parser)]
#[command(name = "weakval", version, about = "Weak values, pointer shifts and systematic errors of pre-/post-selected weak measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format (default: json for `weakvalue`, csv otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,

    /// Interpret every angle argument in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,

    /// Output schema version; only 1 exists.
    #[arg(long, global = true, default_value_t = FORMAT_VERSION)]
    pub format_version: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    A,
    B,
    C,
}

impl From<SchemeArg> for SchemeKind {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::A => SchemeKind::A,
            SchemeArg::B => SchemeKind::B,
            SchemeArg::C => SchemeKind::C,
        }
    }
}

#[derive(Debug, Args)]
pub struct Angles {
    #[arg(long, value_enum, default_value = "c")]
    pub scheme: SchemeArg,
    /// Pre-selection deflection (radians).
    #[arg(long, default_value_t = 0.002, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Post-selection angle (radians).
    #[arg(long, default_value_t = 0.002, allow_negative_numbers = true)]
    pub beta: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak value and post-selection probability of one configuration.
    Weakvalue(Angles),
    /// Closed-form rows over an angle grid.
    Sweep {
        #[arg(long, value_enum, default_value = "c")]
        scheme: SchemeArg,
        /// Fixed angle for scheme c: `alpha=X` or `beta=X`.
        #[arg(long, default_value = "beta=0.002")]
        fix: String,
        /// `start:stop:count:linear|log`.
        #[arg(long, default_value = "1e-5:0.1:400:log")]
        grid: String,
        /// Add 100 linear points around the fixed angle.
        #[arg(long)]
        refine: bool,
    },
    /// Anomalous interval of Re[A_w] at fixed beta.
    Anomaly {
        #[arg(long, default_value_t = 0.002)]
        beta: f64,
        #[arg(long, default_value = "1e-5:0.1:400:log")]
        grid: String,
        #[arg(long)]
        refine: bool,
    },
    /// Systematic error of each estimator.
    Syserr {
        #[arg(long, default_value_t = 0.002, allow_negative_numbers = true)]
        beta_true: f64,
        #[arg(long, default_value_t = 0.002, allow_negative_numbers = true)]
        alpha: f64,
        /// Evaluate over a grid of true beta values instead of `--beta-true`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Both beta roots of a measured |Im[A_w]|.
    Invert {
        #[arg(long, default_value_t = 0.002)]
        alpha: f64,
        #[arg(long)]
        im: f64,
    },
    /// First-order pointer shifts against the exact evolution.
    Oracle {
        #[command(flatten)]
        angles: Angles,
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, default_value_t = 1e-6)]
        tau: f64,
        /// Comma-separated couplings; overrides `--tau`.
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1 << 14)]
        points: usize,
    },
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, code: 0 }
    }
}

/// Machine-readable error object written to standard error.
pub fn error_object(err: &Error) -> String {
    let label = match err {
        Error::InvalidArgument(_) => "invalid argument",
        Error::OrthogonalPostselection { .. } => "orthogonal postselection",
        Error::Resolution(_) => "resolution",
        Error::Range(_) => "range",
    };
    json!({
        "error": label,
        "kind": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    })
    .to_string()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if cli.format_version != FORMAT_VERSION {
        return Err(Error::invalid(format!(
            "unsupported format version {} (this build writes {FORMAT_VERSION})",
            cli.format_version
        )));
    }
    let ang = |x: f64| if cli.degrees { x.to_radians() } else { x };
    let grid = |s: &str| -> Result<Vec<f64>> {
        let g: AngleGrid = s.parse()?;
        let g = if cli.degrees {
            AngleGrid::new(g.start().to_radians(), g.stop().to_radians(), g.count(), g.spacing())?
        } else {
            g
        };
        Ok(g.points())
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Weakvalue(_) => Format::Json,
        _ => Format::Csv,
    });

    match &cli.command {
        Command::Weakvalue(a) => {
            let cfg = SchemeConfig::new(a.scheme.into(), ang(a.alpha), ang(a.beta))?;
            let wv = closed_form(&cfg)?;
            Ok(Outcome::ok(match format {
                Format::Json => json_line(&wv),
                Format::Csv => format!("{WEAKVALUE_HEADER}\n{}\n", csv_nums(&[wv.re, wv.im, wv.ab, wv.prob])),
            }))
        }
        Command::Sweep {
            scheme,
            fix,
            grid: g,
            refine,
        } => {
            let plan = match SchemeKind::from(*scheme) {
                SchemeKind::A => SweepPlan::SchemeA,
                SchemeKind::B => SweepPlan::SchemeB,
                SchemeKind::C => parse_fix(fix, &ang)?,
            };
            let mut pts = grid(g)?;
            if *refine {
                let center = match plan {
                    SweepPlan::FixedAlpha(x) | SweepPlan::FixedBeta(x) => x,
                    _ => 0.0,
                };
                pts = refine_around(&pts, center);
            }
            let rows = sweep(plan, &pts);
            let code = if rows.iter().all(|r| r.ok) { 0 } else { 2 };
            let output = match format {
                Format::Json => json_line(&rows),
                Format::Csv => csv_table(SWEEP_HEADER, rows.iter().map(|r| {
                    format!("{},{}", csv_nums(&[r.alpha, r.beta, r.re_aw, r.im_aw, r.ab_aw, r.prob]), r.ok)
                })),
            };
            Ok(Outcome { output, code })
        }
        Command::Anomaly { beta, grid: g, refine } => {
            let beta = ang(*beta);
            let mut pts = grid(g)?;
            if *refine {
                pts = refine_around(&pts, beta);
            }
            let rep = anomaly_report(beta, &pts)?;
            let output = match format {
                Format::Json => json_line(&json!({
                    "beta_fixed": rep.beta_fixed,
                    "alpha_peak": rep.alpha_peak,
                    "anomalous_interval": rep.anomalous_interval,
                    "normal_interval": rep.normal_interval,
                    "boundary_step": rep.boundary_step,
                })),
                Format::Csv => {
                    let pair = |p: Option<(f64, f64)>| p.map_or((f64::NAN, f64::NAN), |(a, b)| (a, b));
                    let (a0, a1) = pair(rep.anomalous_interval);
                    let (n0, n1) = pair(rep.normal_interval);
                    let row = csv_nums(&[
                        rep.beta_fixed,
                        rep.alpha_peak.unwrap_or(f64::NAN),
                        a0,
                        a1,
                        n0,
                        n1,
                        rep.boundary_step,
                    ]);
                    format!("{ANOMALY_HEADER}\n{row},true\n")
                }
            };
            Ok(Outcome::ok(output))
        }
        Command::Syserr {
            beta_true,
            alpha,
            grid: g,
        } => {
            let alpha = ang(*alpha);
            let points = match g {
                Some(g) => error_curve(&grid(g)?, alpha),
                None => error_curve(&[ang(*beta_true)], alpha),
            };
            let code = points.iter().find_map(|p| p.outcome.as_ref().err()).map_or(0, Error::exit_code);
            let output = match format {
                Format::Json => {
                    let v: Vec<_> = points
                        .iter()
                        .map(|p| match &p.outcome {
                            Ok(r) => json!({"beta_true": r.beta_true, "alpha_defl": r.alpha_deflection,
                                "estimator": r.estimator.as_str(), "measured": r.measured,
                                "beta_hat": r.beta_hat, "err": r.err, "ok": true}),
                            Err(e) => json!({"beta_true": p.beta_true, "alpha_defl": p.alpha_deflection,
                                "estimator": p.estimator.as_str(), "ok": false, "error": e.to_string()}),
                        })
                        .collect();
                    json_line(&v)
                }
                Format::Csv => csv_table(SYSERR_HEADER, points.iter().map(|p| {
                    let (m, b, e, ok) = match &p.outcome {
                        Ok(r) => (r.measured, r.beta_hat, r.err, true),
                        Err(_) => (f64::NAN, f64::NAN, f64::NAN, false),
                    };
                    format!("{},{},{},{},{ok}", num(p.beta_true), num(p.alpha_deflection), p.estimator, csv_nums(&[m, b, e]))
                })),
            };
            Ok(Outcome { output, code })
        }
        Command::Invert { alpha, im } => {
            let alpha = ang(*alpha);
            let roots = invert_im_two_branch(*im, alpha)?;
            let labelled: Vec<(&str, f64)> = roots
                .iter()
                .map(|&r| {
                    let branch = if r == alpha {
                        "peak"
                    } else if r < alpha {
                        "rising"
                    } else {
                        "falling"
                    };
                    (branch, r)
                })
                .collect();
            let output = match format {
                Format::Json => json_line(&json!({
                    "alpha": alpha,
                    "im_target": im,
                    "roots": labelled.iter().map(|(b, r)| json!({"branch": b, "beta_root": r})).collect::<Vec<_>>(),
                })),
                Format::Csv => csv_table(INVERT_HEADER, labelled.iter().map(|(b, r)| {
                    format!("{},{},{b},{},true", num(alpha), num(*im), num(*r))
                })),
            };
            Ok(Outcome::ok(output))
        }
        Command::Oracle {
            angles,
            w,
            tau,
            taus,
            points,
        } => {
            let cfg = SchemeConfig::new(angles.scheme.into(), ang(angles.alpha), ang(angles.beta))?;
            let base = GaussianPointer::new(*w, *tau)?;
            let quad = QuadratureSpec::with_points(*points);
            let taus = taus.clone().unwrap_or_else(|| vec![*tau]);
            let rows: Vec<(f64, Result<_>)> = taus
                .iter()
                .map(|&t| (t, base.with_tau(t).and_then(|p| convergence_row(&cfg, &p, &quad))))
                .collect();
            let code = rows.iter().find_map(|(_, r)| r.as_ref().err()).map_or(0, Error::exit_code);
            let output = match format {
                Format::Json => {
                    let v: Vec<_> = rows
                        .iter()
                        .map(|(t, r)| match r {
                            Ok(r) => json!({"tau": r.tau, "dq_exact": r.dq_exact, "dq_first": r.dq_first,
                                "dp_exact": r.dp_exact, "dp_first": r.dp_first, "weakness": r.weakness, "ok": true}),
                            Err(e) => json!({"tau": t, "ok": false, "error": e.to_string()}),
                        })
                        .collect();
                    json_line(&v)
                }
                Format::Csv => csv_table(ORACLE_HEADER, rows.iter().map(|(t, r)| match r {
                    Ok(r) => format!(
                        "{},true",
                        csv_nums(&[r.tau, r.dq_exact, r.dq_first, r.dp_exact, r.dp_first, r.weakness])
                    ),
                    Err(_) => format!("{},NaN,NaN,NaN,NaN,NaN,false", num(*t)),
                })),
            };
            Ok(Outcome { output, code })
        }
    }
}

fn parse_fix(fix: &str, ang: &impl Fn(f64) -> f64) -> Result<SweepPlan> {
    let bad = || Error::invalid(format!("`--fix` expects alpha=X or beta=X, got `{fix}`"));
    let (name, value) = fix.split_once('=').ok_or_else(bad)?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    match name.trim() {
        "alpha" => Ok(SweepPlan::FixedAlpha(ang(value))),
        "beta" => Ok(SweepPlan::FixedBeta(ang(value))),
        _ => Err(bad()),
    }
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn csv_nums(xs: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{x:e}");
    }
    s
}

fn csv_table(header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn json_line<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("rows serialize");
    s.push('\n');
    s
}
