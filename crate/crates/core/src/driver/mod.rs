//! Experiment configuration, test problems, the time loop and CSV output.

pub mod cases;
pub mod config;
pub mod output;
pub mod run;
pub mod studies;

pub use cases::{TestCase, TestCaseId};
pub use config::{parse_key_values, ExperimentConfig, SchemeId};
pub use run::{run, run_with, RunOutcome, Solver};
pub use studies::{
    fitted_order, run_comparison_suite, run_convergence, run_fixed_dof_study, write_dispersion,
    write_stability_region, ComparisonSuite, StudyOptions,
};
