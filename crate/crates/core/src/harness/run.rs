use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{EstimatorSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::estimators::{self, EstimateResult};
use crate::linmodel::{self, BallSpec, LossSpec, ProblemInstance};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub d: usize,
    pub trial: usize,
    pub seed: u64,
    /// Keyed by [`LossSpec::name`].
    pub losses: BTreeMap<String, f64>,
    pub objective_ok: bool,
    pub eqn_basic_ok: bool,
    pub converged: bool,
    pub wall_ms: f64,
}

impl TrialRecord {
    pub fn loss(&self, name: &str) -> Option<f64> {
        self.losses.get(name).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedCell {
    pub n: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskExperiment {
    pub records: Vec<TrialRecord>,
    /// Cells skipped by the scaling gate.
    pub excluded: Vec<ExcludedCell>,
}

/// Seed of one trial, independent of scheduling.
pub fn trial_seed(seed_root: u64, n: usize, d: usize, trial: usize) -> u64 {
    rng::derive_seed(&[seed_root, n as u64, d as u64, trial as u64])
}

/// Build one simulated instance for a grid cell.
pub fn build_instance(config: &ExperimentConfig, n: usize, d: usize, seed: u64) -> Result<ProblemInstance> {
    let x = linmodel::generate_design(&config.design.instantiate(n, d, seed))?;
    let beta = linmodel::generate_sparse_beta(&config.ball, d, &config.beta.pattern, config.beta.magnitude, seed)?;
    Ok(linmodel::simulate(&x, &beta, config.sigma, seed)?.with_ball(config.ball))
}

/// Run the configured estimator on an instance.
pub fn run_estimator(spec: &EstimatorSpec, ball: &BallSpec, inst: &ProblemInstance) -> Result<EstimateResult> {
    let (x, y) = (&inst.x, &inst.y);
    match *spec {
        EstimatorSpec::L0 { s } => {
            let s = s.or(ball.sparsity()).ok_or_else(|| Error::Config("l0 estimator needs s".into()))?;
            estimators::l0_least_squares(x, y, s)
        }
        EstimatorSpec::L1 { radius, max_iter, tol } => {
            let r = radius.unwrap_or(ball.radius);
            estimators::l1_constrained_ls(x, y, r, max_iter, tol)
        }
        EstimatorSpec::Lq {
            max_iter,
            tol,
            random_starts,
            oracle_start,
        } => {
            let mut starts = estimators::default_lq_starts(x, y, ball, 4, random_starts, inst.seed);
            if oracle_start {
                starts.push(inst.beta_star.clone());
            }
            estimators::lq_constrained_ls(x, y, ball, &starts, max_iter, tol)
        }
        EstimatorSpec::Lasso { lambda, max_iter, tol } => estimators::lasso(x, y, lambda, max_iter, tol),
    }
}

fn run_trial(config: &ExperimentConfig, n: usize, d: usize, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(config.seed_root, n, d, trial);
    let start = Instant::now();
    let inst = build_instance(config, n, d, seed)?;
    let est = run_estimator(&config.estimator, &config.ball, &inst)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let check = estimators::check_basic_inequality(&inst, &est);
    if matches!(config.estimator, EstimatorSpec::L0 { .. }) && !check.objective_ok {
        return Err(Error::Experiment(format!(
            "exhaustive l0 solution is worse than the truth at n = {n}, d = {d}, trial = {trial}"
        )));
    }
    let beta_hat = DVector::from_column_slice(&est.beta_hat);
    let mut losses = BTreeMap::new();
    let mut specs = config.losses.clone();
    for always in [LossSpec::L2, LossSpec::L2Prediction] {
        if !specs.contains(&always) {
            specs.push(always);
        }
    }
    for spec in &specs {
        losses.insert(spec.name(), linmodel::loss(spec, &inst.x, &beta_hat, &inst.beta_star)?);
    }
    Ok(TrialRecord {
        n,
        d,
        trial,
        seed,
        losses,
        objective_ok: check.objective_ok,
        eqn_basic_ok: check.eqn_basic_ok,
        converged: est.converged,
        wall_ms,
    })
}

/// Run every (cell, trial) pair of the grid.
///
/// Trials run in parallel; the output is sorted by `(n, d, trial)`. Cells
/// failing an enforced scaling gate are skipped and listed in `excluded`.
pub fn run_risk_experiment(config: &ExperimentConfig) -> Result<RiskExperiment> {
    config.validate()?;
    let mut jobs = Vec::new();
    let mut excluded = Vec::new();
    for &n in &config.n_grid {
        let d = config.d_rule.dimension(n);
        if let Some(gate) = config.scaling_check {
            if gate.enforce && !gate.holds(n, d, &config.ball) {
                excluded.push(ExcludedCell { n, d });
                continue;
            }
        }
        for trial in 0..config.trials_per_cell {
            jobs.push((n, d, trial));
        }
    }
    let run = || -> Result<Vec<TrialRecord>> {
        jobs.par_iter()
            .map(|&(n, d, t)| run_trial(config, n, d, t))
            .collect()
    };
    let records = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(RiskExperiment { records, excluded })
}
