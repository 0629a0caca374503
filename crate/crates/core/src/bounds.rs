//! Closed-form minimax rates, Fano arithmetic, χ² tail bounds and exact
//! small-scale values of the Gaussian-complexity suprema.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    /// Lower ℓp-risk, `q ∈ (0,1]`.
    T1a,
    /// Lower ℓp-risk, `q = 0`.
    T1b,
    /// Upper ℓ2-risk, `q ∈ (0,1]`.
    T2a,
    /// Upper ℓ2-risk, `q = 0`, `s log d` form.
    T2bPlain,
    /// Upper ℓ2-risk, `q = 0`, `s log(d/s)` form.
    T2bSharp,
    /// Lower prediction risk, `q ∈ (0,1]`.
    T3a,
    /// Lower prediction risk, `q = 0`.
    T3b,
    /// Upper prediction risk, `q ∈ (0,1]`.
    T4a,
    /// Upper prediction risk, `q = 0`.
    T4b,
    /// Normal sequence model.
    Cor1,
}

impl Theorem {
    pub const ALL: [Theorem; 10] = [
        Theorem::T1a,
        Theorem::T1b,
        Theorem::T2a,
        Theorem::T2bPlain,
        Theorem::T2bSharp,
        Theorem::T3a,
        Theorem::T3b,
        Theorem::T4a,
        Theorem::T4b,
        Theorem::Cor1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::T1a => "T1a",
            Theorem::T1b => "T1b",
            Theorem::T2a => "T2a",
            Theorem::T2bPlain => "T2b_plain",
            Theorem::T2bSharp => "T2b_sharp",
            Theorem::T3a => "T3a",
            Theorem::T3b => "T3b",
            Theorem::T4a => "T4a",
            Theorem::T4b => "T4b",
            Theorem::Cor1 => "Cor1",
        }
    }

    /// Leading constant: a fixed number, or the name of a caller-supplied one.
    pub fn constant(&self) -> ConstantKind {
        match self {
            Theorem::T1a => ConstantKind::Generic("c_qp"),
            Theorem::T1b => ConstantKind::Generic("c_0p"),
            Theorem::T2a => ConstantKind::Explicit(24.0),
            Theorem::T2bPlain => ConstantKind::Explicit(6.0),
            Theorem::T2bSharp => ConstantKind::Explicit(144.0),
            Theorem::T3a => ConstantKind::Generic("c2q_prime"),
            Theorem::T3b => ConstantKind::Generic("c0q_prime"),
            Theorem::T4a => ConstantKind::Generic("c_2q"),
            Theorem::T4b => ConstantKind::Explicit(81.0),
            Theorem::Cor1 => ConstantKind::Generic("c_q"),
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Theorem::T1a => "c_qp * max{diam_term, Rq * [sigma^2/kappa_c^2 * log d/n]^((p-q)/2)}",
            Theorem::T1b => "c_0p * max{diam_term, s^(p/2) * [sigma^2/kappa_u^2 * log(d/s)/n]^(p/2)}",
            Theorem::T2a => "24 * Rq * [kappa_c^2/kappa_l^2 * sigma^2/kappa_l^2 * log d/n]^(1-q/2)",
            Theorem::T2bPlain => "6 * kappa_c^2/kappa_l^2 * sigma^2/kappa_l^2 * s log d/n",
            Theorem::T2bSharp => "144 * kappa_u^2/kappa_l^2 * sigma^2/kappa_l^2 * s log(d/s)/n",
            Theorem::T3a => "c2q_prime * Rq * kappa_l^2 * [sigma^2/kappa_c^2 * log d/n]^(1-q/2)",
            Theorem::T3b => "c0q_prime * kappa_l^2 * sigma^2/kappa_u^2 * s log(d/s)/n",
            Theorem::T4a => "c_2q * kappa_c^2 * Rq * [sigma^2/kappa_c^2 * log d/n]^(1-q/2)",
            Theorem::T4b => "81 * sigma^2 * s log(d/s)/n",
            Theorem::Cor1 => "c_q * (2 tau^2 log n/n)^(1-q/2)",
        }
    }

    fn hard_sparsity(&self) -> bool {
        matches!(
            self,
            Theorem::T1b | Theorem::T2bPlain | Theorem::T2bSharp | Theorem::T3b | Theorem::T4b
        )
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parameter(format!("unknown theorem `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstantKind {
    Explicit(f64),
    Generic(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub n: f64,
    pub d: f64,
    #[serde(default)]
    pub q: f64,
    /// `Rq` for `q > 0`, `s` for `q = 0`.
    pub rq_or_s: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    #[serde(default = "one")]
    pub kappa_c: f64,
    #[serde(default = "one")]
    pub kappa_u: f64,
    #[serde(default = "one")]
    pub kappa_l: f64,
    #[serde(default = "two")]
    pub p: f64,
    /// `diam_p^p` of the kernel intersected with the ball.
    #[serde(default)]
    pub diam_term: f64,
    /// Sequence-model noise scale; defaults to `σ√n`.
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}

impl RateParams {
    pub fn new(n: f64, d: f64, q: f64, rq_or_s: f64) -> Self {
        Self {
            n,
            d,
            q,
            rq_or_s,
            sigma: 1.0,
            kappa_c: 1.0,
            kappa_u: 1.0,
            kappa_l: 1.0,
            p: 2.0,
            diam_term: 0.0,
            tau: None,
            constants: BTreeMap::new(),
        }
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub theorem: Theorem,
    pub params: RateParams,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Value of the rate expression for `query.theorem`.
///
/// Generic constants must be present in `params.constants`; the explicit
/// constants 24, 6, 144 and 81 are built in. Powers are evaluated in log space.
pub fn minimax_rate(query: &RateQuery) -> Result<f64> {
    let t = query.theorem;
    let pr = &query.params;
    let n = positive("n", pr.n)?;
    let sigma = positive("sigma", pr.sigma)?;
    let constant = match t.constant() {
        ConstantKind::Explicit(c) => c,
        ConstantKind::Generic(name) => {
            let c = pr.constants.get(name).copied().ok_or(Error::MissingConstant {
                theorem: t.name().to_string(),
                name: name.to_string(),
            })?;
            positive(name, c)?
        }
    };
    let q = pr.q;
    if t.hard_sparsity() {
        if q != 0.0 {
            return Err(Error::Parameter(format!("{t} is a hard-sparsity bound; set q = 0")));
        }
    } else if t != Theorem::Cor1 && !(q > 0.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("{t} needs 0 < q <= 1, got {q}")));
    }
    let ln_c = constant.ln();
    let ln_s2 = 2.0 * sigma.ln();

    let ln_value = match t {
        Theorem::Cor1 => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::Parameter(format!("Cor1 needs 0 <= q <= 1, got {q}")));
            }
            let tau2 = match pr.tau {
                Some(tau) => positive("tau", tau)?.powi(2),
                None => sigma * sigma * n,
            };
            if n <= 1.0 {
                return Err(Error::Parameter("Cor1 needs n > 1".into()));
            }
            ln_c + (1.0 - q / 2.0) * (2.0 * tau2 * n.ln() / n).ln()
        }
        _ => {
            let d = positive("d", pr.d)?;
            let r = positive("Rq_or_s", pr.rq_or_s)?;
            let kc = positive("kappa_c", pr.kappa_c)?;
            let ku = positive("kappa_u", pr.kappa_u)?;
            let kl = positive("kappa_l", pr.kappa_l)?;
            let ln_logd = {
                if d <= 1.0 {
                    return Err(Error::Parameter("rates need d > 1".into()));
                }
                d.ln().ln()
            };
            let ln_logds = || -> Result<f64> {
                if d <= r {
                    return Err(Error::Parameter(format!("log(d/s) needs d > s (d = {d}, s = {r})")));
                }
                Ok((d / r).ln().ln())
            };
            let e = 1.0 - q / 2.0;
            match t {
                Theorem::T1a => {
                    let p = pr.p;
                    if !(p >= 1.0) {
                        return Err(Error::Parameter(format!("p must be >= 1, got {p}")));
                    }
                    let shape = r.ln() + ((p - q) / 2.0) * (ln_s2 - 2.0 * kc.ln() + ln_logd - n.ln());
                    ln_c + shape.max(pr.diam_term.ln())
                }
                Theorem::T1b => {
                    let p = pr.p;
                    if !(p >= 1.0) {
                        return Err(Error::Parameter(format!("p must be >= 1, got {p}")));
                    }
                    let shape = (p / 2.0) * (r.ln() + ln_s2 - 2.0 * ku.ln() + ln_logds()? - n.ln());
                    ln_c + shape.max(pr.diam_term.ln())
                }
                Theorem::T2a => {
                    ln_c + r.ln() + e * (2.0 * kc.ln() - 4.0 * kl.ln() + ln_s2 + ln_logd - n.ln())
                }
                Theorem::T2bPlain => {
                    ln_c + 2.0 * kc.ln() - 4.0 * kl.ln() + ln_s2 + r.ln() + ln_logd - n.ln()
                }
                Theorem::T2bSharp => {
                    ln_c + 2.0 * ku.ln() - 4.0 * kl.ln() + ln_s2 + r.ln() + ln_logds()? - n.ln()
                }
                Theorem::T3a => {
                    ln_c + r.ln() + 2.0 * kl.ln() + e * (ln_s2 - 2.0 * kc.ln() + ln_logd - n.ln())
                }
                Theorem::T3b => {
                    ln_c + 2.0 * kl.ln() + ln_s2 - 2.0 * ku.ln() + r.ln() + ln_logds()? - n.ln()
                }
                Theorem::T4a => {
                    ln_c + 2.0 * kc.ln() + r.ln() + e * (ln_s2 - 2.0 * kc.ln() + ln_logd - n.ln())
                }
                Theorem::T4b => ln_c + ln_s2 + r.ln() + ln_logds()? - n.ln(),
                Theorem::Cor1 => unreachable!(),
            }
        }
    };
    Ok(ln_value.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanoParams {
    pub delta_n: f64,
    pub epsilon_n: f64,
    /// `log M(δn)` of the packing.
    pub log_pack: f64,
    /// `log N₂(εn)` of the covering.
    pub log_cover: f64,
    pub n: f64,
    pub sigma: f64,
    pub kappa_c: f64,
    pub c_route: f64,
}

/// `1 − (log N + c·n·κc²·εn²/σ² + log 2)/log M`, clamped to `[0, 1]`.
pub fn fano_error_bound(params: &FanoParams) -> Result<f64> {
    let FanoParams {
        epsilon_n,
        log_pack,
        log_cover,
        n,
        sigma,
        kappa_c,
        c_route,
        ..
    } = *params;
    if !(log_pack > 0.0) {
        return Err(Error::Parameter(format!("log packing number must be positive, got {log_pack}")));
    }
    let info = c_route * n * kappa_c * kappa_c * epsilon_n * epsilon_n / (sigma * sigma);
    let v = 1.0 - (log_cover + info + std::f64::consts::LN_2) / log_pack;
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTails {
    /// `2√(mx) + 2x`: `P[Z − m ≥ this] ≤ upper_dev_bound`.
    pub upper_threshold: f64,
    pub upper_dev_bound: f64,
    /// `2√(mx)`: `P[Z − m ≤ −this] ≤ lower_dev_bound`.
    pub lower_threshold: f64,
    pub lower_dev_bound: f64,
    /// With `t = x/m ≥ 1`: `P[(Z − m)/m ≥ 4t] ≤ e^{−mt}`; `None` when `t < 1`.
    pub simplified_4t_bound: Option<f64>,
}

/// Deviation bounds for a centred χ² variate with `m` degrees of freedom.
pub fn chi_square_tails(m: usize, x: f64) -> Result<ChiSquareTails> {
    if m == 0 {
        return Err(Error::Parameter("degrees of freedom must be at least 1".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Parameter(format!("deviation level must be positive, got {x}")));
    }
    let mf = m as f64;
    let bound = (-x).exp();
    let t = x / mf;
    Ok(ChiSquareTails {
        upper_threshold: 2.0 * (mf * x).sqrt() + 2.0 * x,
        upper_dev_bound: bound,
        lower_threshold: 2.0 * (mf * x).sqrt(),
        lower_dev_bound: bound,
        simplified_4t_bound: (t >= 1.0).then(|| chi_square_big_tail(m, t)),
    })
}

/// `e^{−mt}`, bounding `P[(Z − m)/m ≥ 4t]` for `t ≥ 1`.
pub fn chi_square_big_tail(m: usize, t: f64) -> f64 {
    (-(m as f64) * t).exp()
}

pub const ORACLE_BUDGET: f64 = 1.0e6;

fn check_oracle_inputs(x: &DMatrix<f64>, w: &DVector<f64>, s: usize, r: f64) -> Result<usize> {
    if x.nrows() != w.len() {
        return Err(Error::Dimension(format!(
            "X has {} rows but w has length {}",
            x.nrows(),
            w.len()
        )));
    }
    if s == 0 || !(r >= 0.0) {
        return Err(Error::Parameter(format!("need s >= 1 and r >= 0 (s = {s}, r = {r})")));
    }
    let k = (2 * s).min(x.ncols());
    linalg::check_budget(x.ncols(), k, ORACLE_BUDGET)?;
    Ok(k)
}

fn max_over_supports(d: usize, k: usize, f: impl Fn(&[usize]) -> f64 + Sync) -> f64 {
    (0..=d - k)
        .into_par_iter()
        .map(|first| {
            let mut best = 0.0f64;
            linalg::for_each_support_with_first(d, k, first, |s| best = best.max(f(s)));
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// `sup { |wᵀXθ|/n : ‖θ‖₀ ≤ 2s, ‖θ‖₂ ≤ r } = (r/n)·max_{|S|=2s} ‖X_Sᵀw‖₂`.
pub fn sup_correlation_exact(x: &DMatrix<f64>, w: &DVector<f64>, s: usize, r: f64) -> Result<f64> {
    let k = check_oracle_inputs(x, w, s, r)?;
    let corr = x.tr_mul(w);
    // the best support holds the 2s largest correlations
    let mut sq: Vec<f64> = corr.iter().map(|c| c * c).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    let best: f64 = sq.iter().take(k).sum::<f64>().sqrt();
    Ok(r * best / x.nrows() as f64)
}

/// `sup { |wᵀXθ|/n : ‖θ‖₀ ≤ 2s, ‖Xθ‖₂/√n ≤ r } = r·max_{|S|=2s} ‖P_S w‖₂/√n`,
/// with `P_S` the projection onto the span of the columns in `S`.
pub fn sup_correlation_pred_exact(x: &DMatrix<f64>, w: &DVector<f64>, s: usize, r: f64) -> Result<f64> {
    let k = check_oracle_inputs(x, w, s, r)?;
    let best = max_over_supports(x.ncols(), k, |support| {
        let xs = linalg::select_columns(x, support);
        let z = linalg::lstsq_min_norm(&xs, w, 1e-12);
        (xs * z).norm()
    });
    Ok(r * best / (x.nrows() as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogBinomial {
    pub value: f64,
    /// `s·log(d/s)`.
    pub lower: f64,
    /// `s·log(de/s)`.
    pub upper: f64,
}

pub fn log_binomial(d: u64, s: u64) -> Result<LogBinomial> {
    if s > d {
        return Err(Error::Parameter(format!("need s <= d, got s = {s}, d = {d}")));
    }
    if s == 0 {
        return Ok(LogBinomial {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
        });
    }
    let value = statrs::function::factorial::ln_binomial(d, s);
    let (df, sf) = (d as f64, s as f64);
    Ok(LogBinomial {
        value,
        lower: sf * (df / sf).ln(),
        upper: sf * (df * std::f64::consts::E / sf).ln(),
    })
}
