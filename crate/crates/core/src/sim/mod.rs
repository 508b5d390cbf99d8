//! Data-generating mechanisms, their analytic truths, and the replicate
//! runner for bias studies.

mod mechanism;
mod study;

pub use mechanism::{
    generate, generate_with, mechanism_laws, true_pair, true_values, true_values_with, Level, Mechanism, MixedCovCovariate,
    MixedMode, Scenario, SimOptions, TrueValues, SCENARIO_NAMES, TRUTH_BRACKET_EPS,
};
pub use study::{
    aggregate_bias, estimates_at, run_study, BiasSummary, CellResult, LongRecord, Metric, SimStudyResult, SimStudySpec,
    study_mcmc, DESK_REPLICATES, FULL_REPLICATES,
};
