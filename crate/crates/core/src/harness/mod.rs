//! Test-function corpus, JSON experiment configs, verification and
//! convergence runs, and CSV reports.

mod config;
mod corpus;
mod report;
mod run;

pub use config::{BoundKind, DegreeSpec, Ell, ExperimentConfig, Projector, TargetSpec};
pub use corpus::{corpus, exp_target, piecewise_c1_target, runge_target, sin_target, CORPUS};
pub use report::{
    fit_order, ErrorReport, Outcome, ReportRow, CSV_HEADER, EFFECTIVITY_TOLERANCE, FIT_POINTS, FIT_R2, ORDER_SLACK,
};
pub use run::{flavor_for, run_convergence, run_verify, INTERFACE_SAMPLES, INTERFACE_TOLERANCE, MIN_REFINEMENTS};
