//! Manufactured problems, error norms and convergence studies.

mod errors;
mod experiment;
mod problems;

pub use errors::{
    boundary_flux_defect, compute_eoc, compute_errors, loglog_slope, macro_mass_defects, ErrorReport, ERROR_ORDER,
};
pub use experiment::{
    check_levels, run_experiment, run_experiment_with, solve_level, write_csv, ExperimentConfig, HarnessError, LevelResult, LevelRun, StageError,
    CSV_HEADER, DEFAULT_LEVELS,
};
pub use problems::{DomainSpec, ExactSolution, Example, EX1_RADIUS, TOP_ROW_FRACTION};
