//! Numerical checks of gradient estimates and Harnack inequalities.
//!
//! Each check samples a [`Solution`] (closed form or grid) according to a
//! [`SamplePlan`], evaluates a signed margin per sample (negative means the
//! inequality fails there) and reduces the margins into a
//! [`VerificationReport`]. Analytic checks use a fixed tolerance; grid checks
//! use `c (dx^2 + dt)`.

mod checks;
mod plan;
mod report;
mod weak;

pub use checks::{
    aronson_benilan_check, benilan_crandall_check, calibrate_tolerance_constant,
    esteban_vazquez_check, harnack_check, li_yau_check, BoundProducer,
};
pub use plan::{AnalyticField, PointSource, SamplePlan, Solution};
pub use report::{
    write_reports_csv, write_reports_json, Inequality, SampleRecord, SharpnessStats,
    VerificationReport, REPORT_CSV_HEADER, WORST_KEPT,
};
pub use weak::{
    scaled_weak_form_residual, weak_form_residual, weak_form_terms, BumpFunction, WeakFormTerms,
};
