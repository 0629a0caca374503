use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_rate_slope, Predictor, RateFitResult};
use super::run::{trial_seed, TrialRecord};
use crate::ballgeom::ball_contains;
use crate::conditions::in_re_cone;
use crate::error::{Error, Result};
use crate::estimators;
use crate::linmodel::{self, BallSpec, LossSpec};

/// Two-observation design on which ℓ0 recovery succeeds and ℓ1 fails.
pub fn counterexample_design() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 3, &[1.0, -2.0, -1.0, 2.0, -3.0, -3.0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub delta_in_kernel: bool,
    pub delta_in_cone_not_sparse: bool,
    pub l0_exact: bool,
    pub interpolant_beats_truth: bool,
    pub delta: Vec<f64>,
    pub l0_estimate: Vec<f64>,
    pub l0_error: f64,
    pub interpolant: Vec<f64>,
    pub interpolant_l1: f64,
    pub lasso_estimate: Vec<f64>,
    pub lasso_recovers_truth: bool,
}

impl CounterexampleReport {
    pub fn all_ok(&self) -> bool {
        self.delta_in_kernel && self.delta_in_cone_not_sparse && self.l0_exact && self.interpolant_beats_truth
    }

    pub fn ensure(&self) -> Result<()> {
        if self.all_ok() {
            Ok(())
        } else {
            Err(Error::Experiment(format!("counterexample checks failed: {self:?}")))
        }
    }
}

/// Noiseless 1-sparse truth `(1, 0, 0)` on [`counterexample_design`].
///
/// Checks that `Δ = (1, 1/3, 1/3)` lies in the kernel and in Γ(1, 1) but not
/// in B₀(2), that exhaustive ℓ0 search recovers the truth, and that the
/// minimum-ℓ1 interpolant is `(0, −1/3, −1/3)` with ℓ1-norm below the truth's.
pub fn counterexample_scenario() -> Result<CounterexampleReport> {
    let x = counterexample_design();
    let beta_star = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let inst = linmodel::simulate(&x, &beta_star, 0.0, 0)?;
    let delta = DVector::from_vec(vec![1.0, 1.0 / 3.0, 1.0 / 3.0]);

    let delta_in_kernel = (&x * &delta).amax() <= 1e-14;
    let delta_in_cone_not_sparse =
        in_re_cone(delta.as_slice(), 1, 1.0) && !ball_contains(&BallSpec::l0(2)?, delta.as_slice(), 0.0);

    let l0 = estimators::l0_least_squares(&x, &inst.y, 1)?;
    let l0_error = (l0.beta() - &beta_star).norm();

    let interp = estimators::min_l1_interpolant(&x, &inst.y)?;
    let interp_l1 = interp.iter().map(|v| v.abs()).sum::<f64>();
    let expected = DVector::from_vec(vec![0.0, -1.0 / 3.0, -1.0 / 3.0]);

    let lasso = estimators::lasso(&x, &inst.y, 1e-6, 1_000_000, 1e-13)?;
    let lasso_recovers_truth = (lasso.beta() - &beta_star).norm() <= 1e-3;

    Ok(CounterexampleReport {
        delta_in_kernel,
        delta_in_cone_not_sparse,
        l0_exact: l0_error <= 1e-10,
        interpolant_beats_truth: (&interp - &expected).norm() <= 1e-6 && interp_l1 < 1.0,
        delta: delta.as_slice().to_vec(),
        l0_estimate: l0.beta_hat,
        l0_error,
        interpolant: interp.as_slice().to_vec(),
        interpolant_l1: interp_l1,
        lasso_estimate: lasso.beta_hat,
        lasso_recovers_truth,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceExperiment {
    pub trials_per_cell: usize,
    pub seed_root: u64,
    /// Entry size of the truth; defaults to the boundary `τ√(2 log n/n)`.
    pub magnitude: Option<f64>,
}

impl Default for SequenceExperiment {
    fn default() -> Self {
        Self {
            trials_per_cell: 200,
            seed_root: 2024,
            magnitude: None,
        }
    }
}

/// Sequence-model risk sweep with `d = n`, `σ = τ/√n`.
///
/// `q = 0` uses the exhaustive ℓ0 estimator (separable here) and `q = 1` the
/// ℓ1-constrained estimator. The fit is of log mean ℓ2-risk against
/// `log(2 log n/n)`, where the rate predicts slope `1 − q/2`; `τ` enters only
/// the intercept.
pub fn corollary1_experiment(
    n_grid: &[usize],
    tau: f64,
    ball: &BallSpec,
    opts: &SequenceExperiment,
) -> Result<(RateFitResult, Vec<TrialRecord>)> {
    if ball.q != 0.0 && ball.q != 1.0 {
        return Err(Error::Parameter(format!(
            "sequence experiment needs q in {{0, 1}} for a certified estimator, got {}",
            ball.q
        )));
    }
    if n_grid.len() < 3 {
        return Err(Error::Experiment(format!(
            "a rate fit needs at least 3 grid points, got {}",
            n_grid.len()
        )));
    }
    let jobs: Vec<(usize, usize)> = n_grid
        .iter()
        .flat_map(|&n| (0..opts.trials_per_cell).map(move |t| (n, t)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(n, trial)| -> Result<TrialRecord> {
            let seed = trial_seed(opts.seed_root, n, n, trial);
            let mag = opts.magnitude.unwrap_or_else(|| linmodel::sequence_boundary_magnitude(n, tau));
            let inst = linmodel::sequence_model_instance_with(
                n,
                tau,
                ball,
                &linmodel::BetaPattern::RandomSupport,
                mag,
                seed,
            )?;
            let start = std::time::Instant::now();
            let est = match ball.sparsity() {
                Some(s) => estimators::l0_least_squares(&inst.x, &inst.y, s)?,
                None => estimators::l1_constrained_ls(&inst.x, &inst.y, ball.radius, 100_000, 1e-12)?,
            };
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let check = estimators::check_basic_inequality(&inst, &est);
            let beta_hat = est.beta();
            let mut losses = std::collections::BTreeMap::new();
            for spec in [LossSpec::L2, LossSpec::L2Prediction] {
                losses.insert(spec.name(), linmodel::loss(&spec, &inst.x, &beta_hat, &inst.beta_star)?);
            }
            Ok(TrialRecord {
                n,
                d: n,
                trial,
                seed,
                losses,
                objective_ok: check.objective_ok,
                eqn_basic_ok: check.eqn_basic_ok,
                converged: est.converged,
                wall_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_rate_slope(&records, "l2", Predictor::TwoLogNOverN, ball)?;
    Ok((fit, records))
}
