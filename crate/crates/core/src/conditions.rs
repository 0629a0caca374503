//! Design-matrix diagnostics: column normalization, sparse spectrum,
//! restricted eigenvalues over the cone Γ(s, c0), kernel checks and the
//! Gaussian restricted-curvature inequalities.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SVD};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linmodel::{self, BallSpec, DesignSpec};
use crate::rng;

pub const SPECTRUM_BUDGET: f64 = 1.0e6;
/// Support enumerations used to seed the restricted-eigenvalue search.
const RE_SEED_BUDGET: f64 = 1.0e5;
const RANK_CUTOFF: f64 = 1e-10;

pub fn column_norm_constant(x: &DMatrix<f64>) -> f64 {
    let n = x.nrows() as f64;
    x.column_iter().map(|c| c.norm()).fold(0.0, f64::max) / n.sqrt()
}

/// `(κℓ, κu)`: extreme singular values of `X_S/√n` over `|S| = k`.
pub fn sparse_spectrum_at_level(x: &DMatrix<f64>, k: usize) -> Result<(f64, f64)> {
    let (n, d) = x.shape();
    if k == 0 {
        return Err(Error::Parameter("sparsity level must be positive".into()));
    }
    let k = k.min(d);
    linalg::check_budget(d, k, SPECTRUM_BUDGET)?;
    let root_n = (n as f64).sqrt();
    let (lo, hi) = (0..=d - k)
        .into_par_iter()
        .map(|first| {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            linalg::for_each_support_with_first(d, k, first, |support| {
                let sv = linalg::singular_values(&linalg::select_columns(x, support));
                // more columns than rows leaves a nontrivial kernel
                let smin = if k > n { 0.0 } else { sv.min() };
                lo = lo.min(smin);
                hi = hi.max(sv.max());
            });
            (lo, hi)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    Ok((lo / root_n, hi / root_n))
}

/// Sparse spectrum at level `2s`. Exceeding the enumeration budget is an
/// error; use [`re_constant`] in sampled mode for larger problems.
pub fn sparse_spectrum(x: &DMatrix<f64>, s: usize) -> Result<(f64, f64)> {
    sparse_spectrum_at_level(x, 2 * s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct REParams {
    pub s: usize,
    pub c0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum REMode {
    ExactTiny,
    Sampled { n_samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum REMethod {
    ExactTiny,
    SampledUpper,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct REEstimate {
    pub value: f64,
    pub method: REMethod,
    /// Direction attaining `value`.
    pub witness: Vec<f64>,
}

/// Membership in Γ(s, c0): the ℓ1 mass outside the `s` largest entries is at
/// most `c0` times the mass inside.
pub fn in_re_cone(theta: &[f64], s: usize, c0: f64) -> bool {
    let mut mags: Vec<f64> = theta.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let head: f64 = mags.iter().take(s).sum();
    let tail: f64 = mags.iter().skip(s).sum();
    tail <= c0 * head * (1.0 + 1e-12) + 1e-300
}

/// Tracks the smallest Rayleigh quotient `‖Xv‖²/‖v‖²` seen so far.
struct RayleighMin<'a> {
    gram: &'a DMatrix<f64>,
    best: f64,
    witness: DVector<f64>,
}

impl<'a> RayleighMin<'a> {
    fn new(gram: &'a DMatrix<f64>) -> Self {
        let d = gram.nrows();
        Self {
            gram,
            best: f64::INFINITY,
            witness: DVector::zeros(d),
        }
    }

    fn quotient(&self, v: &DVector<f64>) -> f64 {
        let nv = v.norm_squared();
        if nv == 0.0 {
            return f64::INFINITY;
        }
        (v.dot(&(self.gram * v)) / nv).max(0.0)
    }

    fn offer(&mut self, v: &DVector<f64>) {
        let r = self.quotient(v);
        if r < self.best {
            self.best = r;
            self.witness = v / v.norm();
        }
    }

    /// Minimize the quotient along `h + αt` for `α ∈ [0, amax]`; returns the minimizer.
    fn offer_segment(&mut self, h: &DVector<f64>, t: &DVector<f64>, amax: f64) -> f64 {
        let gh = self.gram * h;
        let gt = self.gram * t;
        let (a, b, c) = (h.dot(&gh), h.dot(&gt), t.dot(&gt));
        let (p, q, r) = (h.norm_squared(), h.dot(t), t.norm_squared());
        let ratio = |al: f64| {
            let den = p + 2.0 * q * al + r * al * al;
            if den <= 0.0 {
                f64::INFINITY
            } else {
                ((a + 2.0 * b * al + c * al * al) / den).max(0.0)
            }
        };
        // stationary points solve (bp − aq) + (cp − ar)α + (cq − br)α² = 0
        let (k0, k1, k2) = (b * p - a * q, c * p - a * r, c * q - b * r);
        let mut cands = vec![0.0, amax];
        if k2.abs() > 1e-300 {
            let disc = k1 * k1 - 4.0 * k2 * k0;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                cands.push((-k1 + sq) / (2.0 * k2));
                cands.push((-k1 - sq) / (2.0 * k2));
            }
        } else if k1.abs() > 1e-300 {
            cands.push(-k0 / k1);
        }
        let mut best_al = 0.0;
        let mut best_r = f64::INFINITY;
        for al in cands {
            if al.is_finite() && (0.0..=amax).contains(&al) {
                let r = ratio(al);
                if r < best_r {
                    best_r = r;
                    best_al = al;
                }
            }
        }
        if best_r < self.best {
            let v = h + t * best_al;
            let nv = v.norm();
            if nv > 0.0 {
                self.best = best_r;
                self.witness = v / nv;
            }
        }
        best_al
    }
}

fn bottom_right_singular_vector(xs: &DMatrix<f64>) -> DVector<f64> {
    let (n, k) = xs.shape();
    let m = if n >= k {
        xs.clone()
    } else {
        let mut p = DMatrix::zeros(k, k);
        p.view_mut((0, 0), (n, k)).copy_from(xs);
        p
    };
    let svd = SVD::new(m, false, true);
    let vt = svd.v_t.expect("v_t requested");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    vt.row(imin).transpose()
}

/// Bottom singular vectors of every `k`-column submatrix, embedded in `R^d`.
fn support_seeds(x: &DMatrix<f64>, k: usize, out: &mut RayleighMin<'_>) {
    let d = x.ncols();
    let k = k.min(d);
    if linalg::binomial(d, k) > RE_SEED_BUDGET {
        return;
    }
    linalg::for_each_support(d, k, |support| {
        let z = bottom_right_singular_vector(&linalg::select_columns(x, support));
        let mut v = DVector::zeros(d);
        for (i, &j) in support.iter().enumerate() {
            v[j] = z[i];
        }
        out.offer(&v);
    });
}

/// Restricted-eigenvalue constant `min ‖Xθ‖₂/(√n‖θ‖₂)` over Γ(s, c0).
///
/// Both modes search the same candidate families: bottom singular vectors of
/// `s`-column submatrices (and of `2s`-column submatrices when `c0 ≥ 1`,
/// since then B₀(2s) ⊂ Γ(s, c0)), kernel directions inside the cone, and
/// random segments `h + αt` with `h` supported on `s` coordinates, `t` off
/// it, and `α ≤ c0‖h‖₁/‖t‖₁`, minimized exactly in `α`. The sampled mode
/// returns an upper estimate of the true constant. The tiny mode (`d ≤ 12`)
/// uses a dense sample count and adds coordinate-line refinement of the best
/// directions.
///
/// For a fixed seed the estimate is non-increasing in `c0`.
pub fn re_constant(x: &DMatrix<f64>, params: &REParams, mode: &REMode) -> Result<REEstimate> {
    let (n, d) = x.shape();
    let REParams { s, c0 } = *params;
    if s == 0 {
        return Err(Error::Parameter("RE sparsity must be at least 1".into()));
    }
    if !(c0 >= 0.0) {
        return Err(Error::Parameter(format!("cone constant must be nonnegative, got {c0}")));
    }
    let (n_samples, seed, method) = match *mode {
        REMode::ExactTiny => {
            if d > 12 {
                return Err(Error::Parameter(format!("exact_tiny mode needs d <= 12, got d = {d}")));
            }
            (50_000, 0x5245, REMethod::ExactTiny)
        }
        REMode::Sampled { n_samples, seed } => (n_samples, seed, REMethod::SampledUpper),
    };
    let s = s.min(d);
    let gram = x.tr_mul(x);
    let mut tracker = RayleighMin::new(&gram);

    support_seeds(x, s, &mut tracker);
    if c0 >= 1.0 {
        support_seeds(x, 2 * s, &mut tracker);
    }
    let kernel = linalg::kernel_basis(x, RANK_CUTOFF);
    for col in kernel.column_iter() {
        let v: DVector<f64> = col.into_owned();
        if in_re_cone(v.as_slice(), s, c0) {
            tracker.offer(&v);
        }
    }

    let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, d as u64, s as u64]));
    let mut order: Vec<usize> = (0..d).collect();
    for _ in 0..n_samples {
        // the draw sequence does not depend on c0, which keeps estimates nested
        for i in 0..s {
            let j = rng.random_range(i..d);
            order.swap(i, j);
        }
        let mut h = DVector::zeros(d);
        let mut t = DVector::zeros(d);
        for (pos, &j) in order.iter().enumerate() {
            let g = rng::standard_normal(&mut rng);
            if pos < s {
                h[j] = g;
            } else {
                t[j] = g;
            }
        }
        // sparse tails probe the cone boundary more often than dense ones
        let keep = rng.random_range(0..=d - s);
        for &j in order.iter().skip(s + keep) {
            t[j] = 0.0;
        }
        let tl1 = t.iter().map(|v| v.abs()).sum::<f64>();
        if tl1 == 0.0 || c0 == 0.0 {
            tracker.offer(&h);
            continue;
        }
        let amax = c0 * h.iter().map(|v| v.abs()).sum::<f64>() / tl1;
        tracker.offer_segment(&h, &t, amax);
    }

    if method == REMethod::ExactTiny {
        refine_in_cone(&mut tracker, s, c0);
    }

    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let mut value = (tracker.best / n as f64).sqrt();
    if tracker.best <= 1e-24 * scale {
        value = 0.0;
    }
    Ok(REEstimate {
        value,
        method,
        witness: tracker.witness.as_slice().to_vec(),
    })
}

/// Coordinate-line descent on the Rayleigh quotient, staying inside the cone.
fn refine_in_cone(tracker: &mut RayleighMin<'_>, s: usize, c0: f64) {
    let d = tracker.gram.nrows();
    let mut v = tracker.witness.clone();
    for _sweep in 0..200 {
        let before = tracker.best;
        for j in 0..d {
            for dir in [1.0, -1.0] {
                let mut e = DVector::zeros(d);
                e[j] = dir;
                // largest step along e that stays in the cone, by halving
                let mut amax = 1.0;
                while amax > 1e-12 && !in_re_cone((&v + &e * amax).as_slice(), s, c0) {
                    amax *= 0.5;
                }
                if amax <= 1e-12 {
                    continue;
                }
                let al = tracker.offer_segment(&v, &e, amax);
                let cand = &v + &e * al;
                if in_re_cone(cand.as_slice(), s, c0) && tracker.quotient(&cand) <= tracker.best {
                    v = cand.clone() / cand.norm();
                }
            }
        }
        if before - tracker.best <= 1e-14 * before.max(1e-300) {
            break;
        }
    }
}

/// Whether every `n × 2s` column submatrix has full column rank, i.e. the
/// kernel meets B₀(2s) only at zero.
pub fn kernel_trivial_zero(x: &DMatrix<f64>, s: usize) -> Result<bool> {
    let (n, d) = x.shape();
    let k = (2 * s).min(d);
    if k > n {
        return Ok(false);
    }
    linalg::check_budget(d, k, SPECTRUM_BUDGET)?;
    let ok = (0..=d - k).into_par_iter().all(|first| {
        let mut ok = true;
        linalg::for_each_support_with_first(d, k, first, |support| {
            if ok && linalg::rank(&linalg::select_columns(x, support), RANK_CUTOFF) < k {
                ok = false;
            }
        });
        ok
    });
    Ok(ok)
}

/// Lower estimate of `max ‖θ‖_p` over `θ ∈ ker X ∩ B_q(Rq)`.
///
/// For `q > 0`, kernel directions (basis vectors and random combinations) are
/// rescaled onto the ball boundary. For `q = 0` the result is `0` when the
/// kernel meets B₀(2s) only at zero and `+∞` otherwise, since two `s`-sparse
/// vectors then share the same image and their difference can be scaled
/// without bound.
pub fn kernel_diameter(x: &DMatrix<f64>, ball: &BallSpec, p: f64, n_samples: usize, seed: u64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("norm exponent must be >= 1, got {p}")));
    }
    if let Some(s) = ball.sparsity() {
        return Ok(if kernel_trivial_zero(x, s)? { 0.0 } else { f64::INFINITY });
    }
    let kernel = linalg::kernel_basis(x, RANK_CUTOFF);
    let m = kernel.ncols();
    if m == 0 {
        return Ok(0.0);
    }
    let q = ball.q;
    let rescaled = |v: &DVector<f64>| {
        let mass = linalg::lq_sum(v.as_slice(), q);
        if mass == 0.0 {
            return 0.0;
        }
        let t = (ball.radius / mass).powf(1.0 / q);
        t * linalg::lp_norm(v.as_slice(), p)
    };
    let mut best = kernel.column_iter().map(|c| rescaled(&c.into_owned())).fold(0.0, f64::max);
    let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, 0x6b65726e]));
    for _ in 0..n_samples {
        let g = DVector::from_vec(rng::normal_vec(&mut rng, m));
        best = best.max(rescaled(&(&kernel * g)));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub checks: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    /// Smallest `‖Xv‖/√n − lower bound` over all checks.
    pub worst_lower_margin: f64,
    /// Smallest `upper bound − ‖Xv‖/√n` over all checks.
    pub worst_upper_margin: f64,
}

/// Monte Carlo check of
/// `½‖Σ^{1/2}v‖₂ − 6√(ρ log d/n)‖v‖₁ ≤ ‖Xv‖₂/√n ≤ 3‖Σ^{1/2}v‖₂ + 6√(ρ log d/n)‖v‖₁`
/// over `n_draws` designs and `n_directions` directions each. Directions mix
/// dense Gaussian vectors with Gaussian vectors on random supports of every size.
pub fn verify_prop1(spec: &DesignSpec, n_draws: usize, n_directions: usize, seed: u64) -> Result<Prop1Report> {
    let sigma = spec
        .covariance()?
        .ok_or_else(|| Error::Parameter("Gaussian-curvature check needs a Gaussian design".into()))?;
    let root = linalg::sym_sqrt_psd(&sigma)?;
    let (n, d) = (spec.n, spec.d);
    let rho = linmodel::max_variance(&sigma);
    let resid = 6.0 * (rho * (d as f64).ln() / n as f64).sqrt();
    let root_n = (n as f64).sqrt();

    let per_draw: Vec<Result<Prop1Report>> = (0..n_draws)
        .into_par_iter()
        .map(|draw| {
            let mut spec_i = spec.clone();
            spec_i.seed = rng::derive_seed(&[seed, draw as u64]);
            let x = linmodel::generate_design(&spec_i)?;
            let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, draw as u64, 0x64697273]));
            let mut rep = Prop1Report {
                checks: 0,
                lower_violations: 0,
                upper_violations: 0,
                worst_lower_margin: f64::INFINITY,
                worst_upper_margin: f64::INFINITY,
            };
            for k in 0..n_directions {
                let mut v = DVector::from_vec(rng::normal_vec(&mut rng, d));
                if k % 2 == 1 {
                    let size = rng.random_range(1..=d);
                    let mut idx: Vec<usize> = (0..d).collect();
                    for i in 0..size {
                        let j = rng.random_range(i..d);
                        idx.swap(i, j);
                    }
                    for &j in &idx[size..] {
                        v[j] = 0.0;
                    }
                }
                let lhs = (&x * &v).norm() / root_n;
                let sv = (&root * &v).norm();
                let l1 = v.iter().map(|a| a.abs()).sum::<f64>();
                let lower = 0.5 * sv - resid * l1;
                let upper = 3.0 * sv + resid * l1;
                rep.checks += 1;
                if lhs < lower {
                    rep.lower_violations += 1;
                }
                if lhs > upper {
                    rep.upper_violations += 1;
                }
                rep.worst_lower_margin = rep.worst_lower_margin.min(lhs - lower);
                rep.worst_upper_margin = rep.worst_upper_margin.min(upper - lhs);
            }
            Ok(rep)
        })
        .collect();

    let mut total = Prop1Report {
        checks: 0,
        lower_violations: 0,
        upper_violations: 0,
        worst_lower_margin: f64::INFINITY,
        worst_upper_margin: f64::INFINITY,
    };
    for r in per_draw {
        let r = r?;
        total.checks += r.checks;
        total.lower_violations += r.lower_violations;
        total.upper_violations += r.upper_violations;
        total.worst_lower_margin = total.worst_lower_margin.min(r.worst_lower_margin);
        total.worst_upper_margin = total.worst_upper_margin.min(r.worst_upper_margin);
    }
    Ok(total)
}

/// Whether a measured kernel diameter respects `diam₂ ≤ fℓ/κℓ`.
pub fn ident_consistency(kappa_l: f64, f_l_value: f64, diam2_estimate: f64) -> Result<bool> {
    if !(kappa_l > 0.0) {
        return Err(Error::Inconsistency(format!(
            "restricted curvature kappa_l = {kappa_l} gives no control of the kernel diameter"
        )));
    }
    Ok(diam2_estimate <= f_l_value / kappa_l + 1e-10)
}

/// Residual term `fℓ` of the restricted-curvature condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualDescriptor {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl Default for ResidualDescriptor {
    fn default() -> Self {
        Self {
            name: "zero".into(),
            params: BTreeMap::new(),
        }
    }
}

impl ResidualDescriptor {
    pub fn constant(value: f64) -> Self {
        Self {
            name: "constant".into(),
            params: BTreeMap::from([("value".to_string(), value)]),
        }
    }

    pub fn value(&self) -> Result<f64> {
        match self.name.as_str() {
            "zero" => Ok(0.0),
            "constant" => self
                .params
                .get("value")
                .copied()
                .ok_or_else(|| Error::Parameter("constant residual needs a `value` parameter".into())),
            other => Err(Error::Parameter(format!("unknown residual descriptor `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDiagnostics {
    pub kappa_c: f64,
    /// Sparse-spectrum extremes at level `2s`.
    pub kappa_l: f64,
    pub kappa_u: f64,
    /// Smallest singular value of `X_S/√n` over `|S| = s`.
    pub kappa_l_level_s: f64,
    pub f_l: ResidualDescriptor,
    pub re_constant: REEstimate,
    pub re_params: REParams,
    pub kernel_trivial: bool,
    pub diam2_estimate: f64,
    /// `re_constant ≤ kappa_l_level_s`, as the cone contains B₀(s).
    pub re_ordering_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnoseOptions {
    pub ball: BallSpec,
    pub c0: f64,
    pub re_mode: REMode,
    pub f_l: ResidualDescriptor,
    pub diameter_samples: usize,
    pub seed: u64,
}

/// Measure every design constant for sparsity level `s` (from a `q = 0`
/// ball, or `⌈Rq⌉` otherwise).
pub fn diagnose(x: &DMatrix<f64>, opts: &DiagnoseOptions) -> Result<DesignDiagnostics> {
    let d = x.ncols();
    let s = opts
        .ball
        .sparsity()
        .unwrap_or_else(|| (opts.ball.radius.ceil() as usize).max(1))
        .min(d);
    let kappa_c = column_norm_constant(x);
    let (kappa_l, kappa_u) = sparse_spectrum(x, s)?;
    let (kappa_l_level_s, _) = sparse_spectrum_at_level(x, s)?;
    let re_params = REParams { s, c0: opts.c0 };
    let re_constant = re_constant(x, &re_params, &opts.re_mode)?;
    let kernel_trivial = kernel_trivial_zero(x, s)?;
    let diam2_estimate = kernel_diameter(x, &opts.ball, 2.0, opts.diameter_samples, opts.seed)?;
    let re_ordering_ok = re_constant.value <= kappa_l_level_s * (1.0 + 1e-9) + 1e-12;
    Ok(DesignDiagnostics {
        kappa_c,
        kappa_l,
        kappa_u,
        kappa_l_level_s,
        f_l: opts.f_l.clone(),
        re_constant,
        re_params,
        kernel_trivial,
        diam2_estimate,
        re_ordering_ok,
    })
}
