//! Sparse linear regression over ℓq-balls: problem generation, constrained
//! estimators, design diagnostics, packing constructions, rate formulas and a
//! seeded experiment harness.

pub mod ballgeom;
pub mod bounds;
pub mod conditions;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod linalg;
pub mod linmodel;
pub mod rng;

pub use ballgeom::{ball_contains, Metric, PackingResult};
pub use error::{Error, Result};
pub use estimators::EstimateResult;
pub use harness::{ExperimentConfig, RateFitResult, TrialRecord};
pub use linmodel::{BallSpec, DesignKind, DesignSpec, LossSpec, ProblemInstance};
