//! Seeded risk experiments, rate fits and their on-disk artifacts.

pub mod config;
pub mod fit;
pub mod persist;
pub mod plot;
pub mod run;
pub mod scenarios;

pub use config::{BetaSpec, DRule, DesignTemplate, EstimatorSpec, ExperimentConfig, ScalingCheck};
pub use fit::{fit_rate_slope, ols, trimmed_mean, CellSummary, Predictor, RateFitResult, TRIM_FRACTION};
pub use persist::{load_json, persist, Artifact, FileHeader, Format, RECORD_CSV_HEADER};
pub use plot::{fit_svg, write_fit_svg};
pub use run::{build_instance, run_estimator, run_risk_experiment, trial_seed, ExcludedCell, RiskExperiment, TrialRecord};
pub use scenarios::{
    corollary1_experiment, counterexample_design, counterexample_scenario, CounterexampleReport, SequenceExperiment,
};
