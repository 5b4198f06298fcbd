//! Simulation and estimation toolkit for pre-/post-selected weak measurements.
//!
//! The crate computes real, imaginary and plural weak values for three
//! polarization schemes, the Gaussian pointer shifts they produce (to first
//! order and exactly), the anomaly where the sensitivity and the
//! post-selection probability fall together, and the systematic error made
//! when a plural weak value is inverted as if it were purely imaginary.
//!
//! ```
//! use weakval::{closed_form, SchemeConfig};
//!
//! let wv = closed_form(&SchemeConfig::c(0.002, 0.002)?)?;
//! assert!((wv.prob * (1.0 + wv.ab * wv.ab) - 1.0).abs() < 1e-9);
//! # Ok::<(), weakval::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimation;
pub mod pointer;
pub mod states;
pub mod sweep;
pub mod weak_value;

pub use error::{Error, Result};
pub use estimation::{
    error_curve, estimate_beta, invert_im_two_branch, measure, systematic_error, CurvePoint, ErrorRecord,
    EstimatorKind,
};
pub use pointer::{
    convergence_study, evolve_exact, first_order_shifts, ConvergenceRow, ExactEvolution, GaussianPointer,
    PointerShift, QuadratureSpec,
};
pub use states::{apply, inner, linear_state, phase_state, Observable, PolarizationState};
pub use sweep::{anomaly_report, find_sensitivity_peak, refine_around, sweep, AngleGrid, AnomalyReport, Spacing, SweepPlan, SweepRow};
pub use weak_value::{
    closed_form, general, post_state, postselection_probability, pre_state, weak_value, SchemeConfig, SchemeKind,
    WeakValueResult,
};
