use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::TrialRecord;
use crate::error::{Error, Result};
use crate::linmodel::BallSpec;

/// Fraction dropped from each end before averaging a cell.
pub const TRIM_FRACTION: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predictor {
    /// Sample size, with `d` and the ball held fixed.
    N,
    /// `s·log(d/s)/n`.
    SLogdOverN,
    /// `Rq·(log d/n)^{1−q/2}`.
    RqLogdNPow,
    /// `2 log n / n`, the sequence-model scale at unit `τ`.
    TwoLogNOverN,
}

impl Predictor {
    fn value(&self, n: usize, d: usize, ball: &BallSpec) -> f64 {
        let (nf, df) = (n as f64, d as f64);
        match self {
            Predictor::N => nf,
            Predictor::SLogdOverN => ball.radius * (df / ball.radius).ln() / nf,
            Predictor::RqLogdNPow => ball.radius * (df.ln() / nf).powf(1.0 - ball.q / 2.0),
            Predictor::TwoLogNOverN => 2.0 * nf.ln() / nf,
        }
    }

    /// Slope of log risk against log predictor that the rate theory predicts.
    pub fn theoretical_slope(&self, ball: &BallSpec) -> f64 {
        let e = 1.0 - ball.q / 2.0;
        match self {
            Predictor::N => -e,
            Predictor::SLogdOverN | Predictor::RqLogdNPow => 1.0,
            Predictor::TwoLogNOverN => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub mean: f64,
    pub trimmed_mean: f64,
    pub predictor: f64,
    /// Left out of the fit because the trimmed mean was zero.
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub loss_kind: String,
    pub theoretical_slope: f64,
    pub cells: Vec<CellSummary>,
}

/// Mean after dropping `⌊fraction·k⌋` values from each end.
pub fn trimmed_mean(values: &[f64], fraction: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let cut = (fraction * v.len() as f64).floor() as usize;
    let kept = &v[cut..v.len() - cut];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Ordinary least squares of `ys` on `xs`: `(slope, intercept, r²)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r2)
}

/// Fit log(trimmed mean loss) against log(predictor) across grid cells.
pub fn fit_rate_slope(
    records: &[TrialRecord],
    loss_kind: &str,
    predictor: Predictor,
    ball: &BallSpec,
) -> Result<RateFitResult> {
    let mut cells: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        let v = r.loss(loss_kind).ok_or_else(|| {
            Error::Experiment(format!("record (n = {}, trial = {}) has no `{loss_kind}` loss", r.n, r.trial))
        })?;
        cells.entry((r.n, r.d)).or_default().push(v);
    }
    let summaries: Vec<CellSummary> = cells
        .into_iter()
        .map(|((n, d), vals)| {
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let trimmed = trimmed_mean(&vals, TRIM_FRACTION);
            CellSummary {
                n,
                d,
                trials: vals.len(),
                mean,
                trimmed_mean: trimmed,
                predictor: predictor.value(n, d, ball),
                excluded: !(trimmed > 0.0),
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = summaries
        .iter()
        .filter(|c| !c.excluded)
        .map(|c| (c.predictor.ln(), c.trimmed_mean.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::Experiment(format!(
            "a rate fit needs at least 3 cells with positive risk, got {}",
            xs.len()
        )));
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(RateFitResult {
        slope,
        intercept,
        r_squared,
        n_points: xs.len(),
        loss_kind: loss_kind.to_string(),
        theoretical_slope: predictor.theoretical_slope(ball),
        cells: summaries,
    })
}
