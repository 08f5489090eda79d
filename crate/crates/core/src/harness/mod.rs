//! Experiment configs, runners and reports: condition checks, decay and
//! non-decay campaigns, bracketing runs and the Stefan construction.

mod config;
mod report;
mod run;

pub use config::{
    BoxPerturbation, BracketingConfig, BumpConfig, DomainConfig, EntropyConfig, ExperimentConfig,
    InitialRecipe, NonDecayConfig, Scenario, StefanSection, Verdict, DEFAULT_DECAY_FRACTION,
    OUTPUT_ROOT_ENV,
};
pub use report::{
    norms_csv, tolerances, write_experiment_dir, BracketReport, ConditionReport, InvariantSummary,
    Manifest, NormSample, Report, RuleResult, StefanDetails, BOUND_VIOLATION_TOL, CONSERVATION_TOL,
    CSV_HEADER, MASS_BALANCE_TOL, ORDER_TOL,
};
pub use run::{
    preset_classifications, run_bracketing_experiment, run_condition_report, run_decay_experiment,
    run_experiment, run_stefan_experiment, ASSEMBLED_MEAN_TOL,
};
