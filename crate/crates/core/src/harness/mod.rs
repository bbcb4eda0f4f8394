//! Batch drivers: randomized verification of the algebraic identities and
//! the Monte Carlo convergence experiment for random unit fractions.

mod experiment;
mod identities;

pub use experiment::{
    run_convergence_experiment, run_trial, ExperimentConfig, ExperimentOutput, ExperimentSummary,
    InputLaw, TrialResult, SCHEMA,
};
pub use identities::{
    check_case, run_identities, run_identity_suite, CaseOutcome, Identity, IdentityReport,
    IdentityStat, INPUT_GATE_TOL, INPUT_SHAPE, MAX_SUITE_RANK,
};
