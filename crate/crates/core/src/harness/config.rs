use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linmodel::{BallSpec, BetaPattern, DesignKind, DesignSpec, LossSpec};

/// Design ensemble without a size; sizes come from the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignTemplate {
    StandardGaussian,
    CorrelatedGaussian { covariance: Vec<Vec<f64>> },
    IdentitySequence,
}

impl DesignTemplate {
    pub fn instantiate(&self, n: usize, d: usize, seed: u64) -> DesignSpec {
        let kind = match self {
            DesignTemplate::StandardGaussian => DesignKind::StandardGaussian,
            DesignTemplate::CorrelatedGaussian { covariance } => DesignKind::CorrelatedGaussian {
                covariance: covariance.clone(),
            },
            DesignTemplate::IdentitySequence => DesignKind::IdentitySequence,
        };
        DesignSpec { kind, n, d, seed }
    }

    pub fn correlated(covariance: &DMatrix<f64>) -> Self {
        DesignTemplate::CorrelatedGaussian {
            covariance: crate::linmodel::matrix_to_rows(covariance),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DRule {
    Fixed { d: usize },
    /// `d = round(ratio · n)`.
    Proportional { ratio: f64 },
}

impl DRule {
    pub fn dimension(&self, n: usize) -> usize {
        match *self {
            DRule::Fixed { d } => d,
            DRule::Proportional { ratio } => ((ratio * n as f64).round() as usize).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Exhaustive ℓ0 search; `s` defaults to the ball's sparsity.
    L0 {
        #[serde(default)]
        s: Option<usize>,
    },
    /// ℓ1-constrained least squares; `radius` defaults to the ball's.
    L1 {
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// Multi-start ℓq-constrained least squares, optionally warm-started at the truth.
    Lq {
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_random_starts")]
        random_starts: usize,
        #[serde(default = "default_true")]
        oracle_start: bool,
    },
    Lasso {
        lambda: f64,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

fn default_max_iter() -> usize {
    100_000
}
fn default_tol() -> f64 {
    1e-9
}
fn default_random_starts() -> usize {
    4
}
fn default_true() -> bool {
    true
}

impl EstimatorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorSpec::L0 { .. } => "l0",
            EstimatorSpec::L1 { .. } => "l1",
            EstimatorSpec::Lq { .. } => "lq",
            EstimatorSpec::Lasso { .. } => "lasso",
        }
    }

    pub fn l1(radius: Option<f64>) -> Self {
        EstimatorSpec::L1 {
            radius,
            max_iter: default_max_iter(),
            tol: default_tol(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    /// Exponent κ in `d / (Rq · n^{q/2}) ≥ d^κ`.
    pub kappa_exponent: f64,
    #[serde(default)]
    pub enforce: bool,
}

impl ScalingCheck {
    pub fn holds(&self, n: usize, d: usize, ball: &BallSpec) -> bool {
        let (nf, df) = (n as f64, d as f64);
        df / (ball.radius * nf.powf(ball.q / 2.0)) >= df.powf(self.kappa_exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSpec {
    #[serde(flatten)]
    pub pattern: BetaPattern,
    pub magnitude: f64,
}

impl Default for BetaSpec {
    fn default() -> Self {
        Self {
            pattern: BetaPattern::RandomSupport,
            magnitude: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub design: DesignTemplate,
    pub ball: BallSpec,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub d_rule: DRule,
    pub trials_per_cell: usize,
    pub estimator: EstimatorSpec,
    #[serde(default = "default_losses")]
    pub losses: Vec<LossSpec>,
    pub seed_root: u64,
    #[serde(default)]
    pub beta: BetaSpec,
    #[serde(default)]
    pub scaling_check: Option<ScalingCheck>,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_losses() -> Vec<LossSpec> {
    vec![LossSpec::L2, LossSpec::L2Prediction]
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_grid must be strictly increasing".into()));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Config("trials_per_cell must be at least 1".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be finite and nonnegative, got {}", self.sigma)));
        }
        if let Some(w) = self.workers {
            if w == 0 {
                return Err(Error::Config("workers must be at least 1".into()));
            }
        }
        for &n in &self.n_grid {
            self.ball.bind(self.d_rule.dimension(n))?;
        }
        match self.estimator {
            EstimatorSpec::L0 { s } => {
                if !self.ball.is_hard() && s.is_none() {
                    return Err(Error::Config("l0 estimator on a soft ball needs an explicit s".into()));
                }
            }
            EstimatorSpec::Lq { .. } => {
                if !(self.ball.q > 0.0 && self.ball.q < 1.0) {
                    return Err(Error::Config("lq estimator needs a ball with 0 < q < 1".into()));
                }
            }
            EstimatorSpec::L1 { radius, .. } => {
                if radius.is_none() && self.ball.q != 1.0 {
                    return Err(Error::Config("l1 estimator needs a radius unless the ball has q = 1".into()));
                }
            }
            EstimatorSpec::Lasso { lambda, .. } => {
                if !(lambda >= 0.0) {
                    return Err(Error::Config(format!("lambda must be nonnegative, got {lambda}")));
                }
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
