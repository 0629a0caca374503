//! Constrained least-squares estimators over ℓq-balls and the Lasso.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ballgeom::{ball_contains, project_l1, project_lq_heuristic};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmodel::{BallSpec, ProblemInstance};
use crate::rng;

/// Largest `C(d, s)` the exhaustive ℓ0 solver will enumerate.
pub const L0_ENUMERATION_BUDGET: f64 = 1.0e7;

const RANK_CUTOFF: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub beta_hat: Vec<f64>,
    /// `‖y − Xβ̂‖²₂`.
    pub objective: f64,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt_residual: Option<f64>,
    /// Columns the solver could not use (all-zero columns in the Lasso).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_columns: Vec<usize>,
}

impl EstimateResult {
    pub fn beta(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.beta_hat)
    }

    fn build(x: &DMatrix<f64>, y: &DVector<f64>, beta: DVector<f64>, ball: Option<&BallSpec>) -> Self {
        let objective = residual_sq(x, y, &beta);
        let support = linalg::support_of(beta.as_slice(), 0.0);
        let feasible = ball.map_or(true, |b| ball_contains(b, beta.as_slice(), FEASIBILITY_TOL));
        Self {
            beta_hat: beta.as_slice().to_vec(),
            objective,
            support,
            iterations: 0,
            converged: true,
            feasible,
            duality_gap: None,
            kkt_residual: None,
            skipped_columns: Vec::new(),
        }
    }
}

pub fn residual_sq(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    (y - x * beta).norm_squared()
}

fn check_dims(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::Dimension(format!(
            "X has {} rows but y has length {}",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::Dimension("empty design".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ℓ0: exhaustive support enumeration

#[derive(Clone, Debug)]
struct Candidate {
    objective: f64,
    support: Vec<usize>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.objective
            .total_cmp(&other.objective)
            .then_with(|| self.support.cmp(&other.support))
    }
}

/// Bounded max-heap keeping the `cap` smallest candidates.
struct TopK {
    cap: usize,
    heap: BinaryHeap<Candidate>,
}

impl TopK {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            heap: BinaryHeap::with_capacity(cap + 1),
        }
    }

    fn offer(&mut self, objective: f64, support: &[usize]) {
        if self.heap.len() == self.cap {
            let worst = self.heap.peek().expect("nonempty");
            if objective.total_cmp(&worst.objective).then_with(|| support.cmp(&worst.support))
                != Ordering::Less
            {
                return;
            }
        }
        self.heap.push(Candidate {
            objective,
            support: support.to_vec(),
        });
        if self.heap.len() > self.cap {
            self.heap.pop();
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for c in other.heap {
            self.offer(c.objective, &c.support);
        }
        self
    }
}

/// Solve `G z = b` for a small SPD `G` (row-major, `k×k`) in place.
/// Returns `None` when a pivot is not safely positive.
fn cholesky_solve(g: &mut [f64], b: &mut [f64], k: usize, scale: f64) -> Option<()> {
    for j in 0..k {
        let mut diag = g[j * k + j];
        for p in 0..j {
            diag -= g[j * k + p] * g[j * k + p];
        }
        if !(diag > 1e-10 * scale) {
            return None;
        }
        let l = diag.sqrt();
        g[j * k + j] = l;
        for i in j + 1..k {
            let mut v = g[i * k + j];
            for p in 0..j {
                v -= g[i * k + p] * g[j * k + p];
            }
            g[i * k + j] = v / l;
        }
    }
    for i in 0..k {
        let mut v = b[i];
        for p in 0..i {
            v -= g[i * k + p] * b[p];
        }
        b[i] = v / g[i * k + i];
    }
    for i in (0..k).rev() {
        let mut v = b[i];
        for p in i + 1..k {
            v -= g[p * k + i] * b[p];
        }
        b[i] = v / g[i * k + i];
    }
    Some(())
}

fn min_norm_on_support(x: &DMatrix<f64>, y: &DVector<f64>, support: &[usize]) -> DVector<f64> {
    let xs = linalg::select_columns(x, support);
    let z = linalg::lstsq_min_norm(&xs, y, RANK_CUTOFF);
    let mut beta = DVector::zeros(x.ncols());
    for (k, &j) in support.iter().enumerate() {
        beta[j] = z[k];
    }
    beta
}

/// Columns with at most one nonzero each, in distinct rows.
fn has_disjoint_columns(x: &DMatrix<f64>) -> bool {
    let mut used = vec![false; x.nrows()];
    for col in x.column_iter() {
        let mut nz = col.iter().enumerate().filter(|(_, v)| **v != 0.0);
        if let Some((i, _)) = nz.next() {
            if nz.next().is_some() || used[i] {
                return false;
            }
            used[i] = true;
        }
    }
    true
}

fn l0_separable(x: &DMatrix<f64>, y: &DVector<f64>, diag: &[f64], xty: &DVector<f64>, s: usize) -> Result<EstimateResult> {
    let ball = BallSpec::l0(s)?;
    let d = x.ncols();
    let gain = |j: usize| if diag[j] > 0.0 { xty[j] * xty[j] / diag[j] } else { 0.0 };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| gain(b).total_cmp(&gain(a)).then(a.cmp(&b)));
    let mut support: Vec<usize> = order[..s].to_vec();
    support.sort_unstable();
    let beta = min_norm_on_support(x, y, &support);
    let mut res = EstimateResult::build(x, y, beta, Some(&ball));
    res.iterations = 1;
    Ok(res)
}

fn is_diagonal_gram(gram: &DMatrix<f64>) -> bool {
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let d = gram.nrows();
    (0..d).all(|i| (0..d).all(|j| i == j || gram[(i, j)].abs() <= 1e-14 * scale))
}

/// Global minimizer of `‖y − Xβ‖²₂` over `‖β‖₀ ≤ s`.
///
/// Every size-`s` support is scored through the Gram matrix; a smaller support
/// can never beat the best superset of itself, so sizes below `s` need no
/// separate pass. The best candidates are then re-solved directly with
/// minimum-norm least squares, and the winner is the lowest objective with ties
/// going to the lexicographically smallest support. When `XᵀX` is diagonal the
/// problem separates and the best support is read off without enumeration.
pub fn l0_least_squares(x: &DMatrix<f64>, y: &DVector<f64>, s: usize) -> Result<EstimateResult> {
    check_dims(x, y)?;
    let d = x.ncols();
    if s == 0 || s > d {
        return Err(Error::Parameter(format!("sparsity must satisfy 1 <= s <= d, got s = {s}, d = {d}")));
    }
    let xty = x.tr_mul(y);
    if has_disjoint_columns(x) {
        let diag: Vec<f64> = x.column_iter().map(|c| c.norm_squared()).collect();
        return l0_separable(x, y, &diag, &xty, s);
    }
    let gram = x.tr_mul(x);
    if is_diagonal_gram(&gram) {
        let diag: Vec<f64> = gram.diagonal().iter().copied().collect();
        return l0_separable(x, y, &diag, &xty, s);
    }

    let ball = BallSpec::l0(s)?;
    linalg::check_budget(d, s, L0_ENUMERATION_BUDGET)?;
    let yy = y.norm_squared();
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    const KEEP: usize = 64;

    let score = |support: &[usize], gbuf: &mut Vec<f64>, bbuf: &mut Vec<f64>| -> f64 {
        let k = support.len();
        gbuf.clear();
        bbuf.clear();
        for &i in support {
            for &j in support {
                gbuf.push(gram[(i, j)]);
            }
            bbuf.push(xty[i]);
        }
        let rhs: Vec<f64> = bbuf.clone();
        match cholesky_solve(gbuf, bbuf, k, scale) {
            Some(()) => yy - rhs.iter().zip(bbuf.iter()).map(|(a, b)| a * b).sum::<f64>(),
            None => residual_sq(x, y, &min_norm_on_support(x, y, support)),
        }
    };

    let top = (0..=d - s)
        .into_par_iter()
        .map(|first| {
            let mut top = TopK::new(KEEP);
            let (mut g, mut b) = (Vec::with_capacity(s * s), Vec::with_capacity(s));
            linalg::for_each_support_with_first(d, s, first, |support| {
                let obj = score(support, &mut g, &mut b);
                top.offer(obj, support);
            });
            top
        })
        .reduce(|| TopK::new(KEEP), TopK::merge);

    let count = linalg::binomial(d, s) as usize;
    let mut refined: Vec<(f64, Vec<usize>, DVector<f64>)> = top
        .heap
        .into_vec()
        .into_iter()
        .map(|c| {
            let beta = min_norm_on_support(x, y, &c.support);
            (residual_sq(x, y, &beta), c.support, beta)
        })
        .collect();
    let best = refined
        .iter()
        .map(|r| r.0)
        .fold(f64::INFINITY, f64::min);
    let tie = 1e-12 * yy.max(1.0);
    refined.retain(|r| r.0 <= best + tie);
    refined.sort_by(|a, b| a.1.cmp(&b.1));
    let (_, _, beta) = refined.into_iter().next().expect("at least one support");
    let mut res = EstimateResult::build(x, y, beta, Some(&ball));
    res.iterations = count;
    Ok(res)
}

// ---------------------------------------------------------------------------
// First-order machinery shared by the ℓ1 and ℓq solvers

/// Gradient and objective of `‖y − Xβ‖²`, using the Gram matrix when it is cheaper.
struct Quadratic<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    gram: Option<(DMatrix<f64>, DVector<f64>, f64)>,
}

impl<'a> Quadratic<'a> {
    fn new(x: &'a DMatrix<f64>, y: &'a DVector<f64>) -> Self {
        let gram = (x.ncols() <= x.nrows()).then(|| (x.tr_mul(x), x.tr_mul(y), y.norm_squared()));
        Self { x, y, gram }
    }

    fn value_and_grad(&self, beta: &DVector<f64>) -> (f64, DVector<f64>) {
        match &self.gram {
            Some((g, b, yy)) => {
                let gb = g * beta;
                let value = yy - 2.0 * b.dot(beta) + beta.dot(&gb);
                (value.max(0.0), (gb - b) * 2.0)
            }
            None => {
                let r = self.x * beta - self.y;
                (r.norm_squared(), self.x.tr_mul(&r) * 2.0)
            }
        }
    }

    fn value(&self, beta: &DVector<f64>) -> f64 {
        self.value_and_grad(beta).0
    }
}

fn step_size(x: &DMatrix<f64>) -> f64 {
    let l = 2.0 * linalg::largest_sq_singular_value(x, 1e-6);
    // the power iterate can undershoot by the relative tolerance
    if l > 0.0 {
        1.0 / (l * (1.0 + 1e-5))
    } else {
        1.0
    }
}

/// Minimizer of `‖y − Xβ‖²₂` over `‖β‖₁ ≤ R1`.
///
/// Monotone accelerated projected gradient. The Frank–Wolfe gap
/// `⟨∇f(β), β⟩ + R1‖∇f(β)‖∞` upper-bounds the suboptimality of every iterate;
/// the solver stops once it is at most `tol`.
pub fn l1_constrained_ls(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    r1: f64,
    max_iter: usize,
    tol: f64,
) -> Result<EstimateResult> {
    check_dims(x, y)?;
    if !(r1 > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {r1}")));
    }
    let ball = BallSpec::new(1.0, r1)?;
    let d = x.ncols();
    let f = Quadratic::new(x, y);
    let eta = step_size(x);
    let proj = |v: &DVector<f64>| DVector::from_vec(project_l1(v.as_slice(), r1));

    let gap_of = |beta: &DVector<f64>, g: &DVector<f64>| g.dot(beta) + r1 * g.amax();

    let mut beta = DVector::zeros(d);
    let (mut fval, mut grad) = f.value_and_grad(&beta);
    let mut prev = beta.clone();
    let mut point = beta.clone();
    let mut t = 1.0f64;
    let mut gap = gap_of(&beta, &grad);
    let mut iterations = 0;
    let mut converged = gap <= tol;

    while !converged && iterations < max_iter {
        iterations += 1;
        let (_, gp) = f.value_and_grad(&point);
        let z = proj(&(&point - gp * eta));
        let (fz, gz) = f.value_and_grad(&z);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        prev.copy_from(&beta);
        let accepted = fz <= fval;
        if accepted {
            beta = z.clone();
            fval = fz;
            grad = gz;
        }
        // monotone variant: momentum toward z, anchored at the accepted iterate
        point = &beta + (&z - &beta) * (t / t_next) + (&beta - &prev) * ((t - 1.0) / t_next);
        t = if accepted { t_next } else { 1.0 };
        gap = gap_of(&beta, &grad);
        converged = gap <= tol;
    }

    let mut res = EstimateResult::build(x, y, beta, Some(&ball));
    res.iterations = iterations;
    res.converged = converged;
    res.duality_gap = Some(gap.max(0.0));
    Ok(res)
}

/// Multi-start projected gradient over a nonconvex ℓq-ball, `0 < q < 1`.
///
/// Each start is first made feasible. The result is the lowest-objective
/// feasible point visited across all starts, so supplying the truth as a start
/// guarantees an objective no worse than the truth's.
pub fn lq_constrained_ls(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    ball: &BallSpec,
    starts: &[DVector<f64>],
    max_iter: usize,
    tol: f64,
) -> Result<EstimateResult> {
    check_dims(x, y)?;
    if !(ball.q > 0.0 && ball.q < 1.0) {
        return Err(Error::Parameter(format!("nonconvex solver needs 0 < q < 1, got {}", ball.q)));
    }
    if starts.is_empty() {
        return Err(Error::Parameter("at least one start is required".into()));
    }
    let d = x.ncols();
    if let Some(bad) = starts.iter().find(|s| s.len() != d) {
        return Err(Error::Dimension(format!("start of length {} for d = {d}", bad.len())));
    }
    let f = Quadratic::new(x, y);
    let eta = step_size(x);
    let proj = |v: &DVector<f64>| DVector::from_vec(project_lq_heuristic(v.as_slice(), ball));

    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut total_iter = 0;
    let mut all_stationary = true;
    for start in starts {
        let mut beta = proj(start);
        let mut fval = f.value(&beta);
        let mut run_best = (fval, beta.clone());
        let mut stationary = false;
        for _ in 0..max_iter {
            total_iter += 1;
            let (_, g) = f.value_and_grad(&beta);
            let next = proj(&(&beta - g * eta));
            let step = (&next - &beta).norm();
            beta = next;
            fval = f.value(&beta);
            if fval < run_best.0 {
                run_best = (fval, beta.clone());
            }
            if step <= tol * beta.norm().max(1.0) {
                stationary = true;
                break;
            }
        }
        all_stationary &= stationary;
        let exact = residual_sq(x, y, &run_best.1);
        if best.as_ref().map_or(true, |(b, _)| exact < *b) {
            best = Some((exact, run_best.1));
        }
    }

    let (_, beta) = best.expect("nonempty starts");
    let mut res = EstimateResult::build(x, y, beta, Some(ball));
    res.iterations = total_iter;
    res.converged = all_stationary;
    Ok(res)
}

/// Deterministic start set: the origin, signed vertices `±Rq^{1/q} e_j` for
/// the `k` columns most correlated with `y`, and `n_random` random feasible points.
pub fn default_lq_starts(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    ball: &BallSpec,
    k: usize,
    n_random: usize,
    seed: u64,
) -> Vec<DVector<f64>> {
    let d = x.ncols();
    let corner = ball.radius.powf(1.0 / ball.q);
    let xty = x.tr_mul(y);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| xty[b].abs().total_cmp(&xty[a].abs()).then(a.cmp(&b)));
    let mut starts = vec![DVector::zeros(d)];
    for &j in order.iter().take(k.min(d)) {
        let mut v = DVector::zeros(d);
        v[j] = corner.copysign(if xty[j] == 0.0 { 1.0 } else { xty[j] });
        starts.push(v);
    }
    let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, rng::stream::STARTS]));
    for _ in 0..n_random {
        let v = DVector::from_vec(rng::normal_vec(&mut rng, d));
        starts.push(DVector::from_vec(project_lq_heuristic(v.as_slice(), ball)));
    }
    starts
}

/// Cyclic coordinate descent for `(1/(2n))‖y − Xβ‖²₂ + λ‖β‖₁`.
///
/// Solved along a halving sequence of penalty levels, each warm-started from
/// the previous one. Stops when the largest coordinate change in a sweep at
/// the target level is at most `tol`. The
/// reported KKT residual is the largest violation of the subgradient
/// conditions at the returned point. All-zero columns are left at zero and
/// listed in `skipped_columns`.
pub fn lasso(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, max_iter: usize, tol: f64) -> Result<EstimateResult> {
    check_dims(x, y)?;
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be nonnegative, got {lambda}")));
    }
    let (n, d) = x.shape();
    let nf = n as f64;
    let col_sq: Vec<f64> = (0..d).map(|j| x.column(j).norm_squared() / nf).collect();
    let skipped: Vec<usize> = (0..d).filter(|&j| col_sq[j] == 0.0).collect();

    let mut beta = DVector::<f64>::zeros(d);
    let mut r = y.clone();
    let mut iterations = 0;
    let mut converged = false;
    for level in lambda_path(x, y, lambda) {
        converged = false;
        while iterations < max_iter {
            iterations += 1;
            let mut max_change = 0.0f64;
            for j in 0..d {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let xj = x.column(j);
                let old = beta[j];
                let z = xj.dot(&r) / nf + col_sq[j] * old;
                let new = soft_threshold(z, level) / col_sq[j];
                if new != old {
                    r.axpy(old - new, &xj, 1.0);
                    beta[j] = new;
                    max_change = max_change.max((new - old).abs());
                }
            }
            if max_change <= tol {
                converged = true;
                break;
            }
        }
    }

    let kkt = lasso_kkt_residual(x, y, &beta, lambda);
    let mut res = EstimateResult::build(x, y, beta, None);
    res.iterations = iterations;
    res.converged = converged;
    res.kkt_residual = Some(kkt);
    res.skipped_columns = skipped;
    Ok(res)
}

/// Warm-start levels halving from `max_j |X_jᵀy|/n` down to `lambda`.
fn lambda_path(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Vec<f64> {
    let lmax = x.tr_mul(y).amax() / x.nrows() as f64;
    let mut path = Vec::new();
    let mut level = lmax;
    while level > lambda && path.len() < 200 {
        path.push(level);
        level *= 0.5;
    }
    path.push(lambda);
    path
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Largest violation of `|X_jᵀr/n| ≤ λ` (for `β_j = 0`) or `X_jᵀr/n = λ·sign(β_j)`.
pub fn lasso_kkt_residual(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>, lambda: f64) -> f64 {
    let nf = x.nrows() as f64;
    let corr = x.tr_mul(&(y - x * beta)) / nf;
    (0..x.ncols())
        .map(|j| {
            if beta[j] == 0.0 {
                (corr[j].abs() - lambda).max(0.0)
            } else {
                (corr[j] - lambda * beta[j].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicInequalityCheck {
    pub objective_ok: bool,
    pub eqn_basic_ok: bool,
    /// `‖XΔ̂‖²₂ / n`.
    pub lhs: f64,
    /// `2|wᵀXΔ̂| / n`.
    pub rhs: f64,
}

/// Compare an estimate against the truth of a simulated instance.
pub fn check_basic_inequality(instance: &ProblemInstance, result: &EstimateResult) -> BasicInequalityCheck {
    let x = &instance.x;
    let beta_hat = result.beta();
    let w = instance.noise();
    let xdelta = x * (&beta_hat - &instance.beta_star);
    let nf = instance.n() as f64;
    let lhs = xdelta.norm_squared() / nf;
    let rhs = 2.0 * w.dot(&xdelta).abs() / nf;
    let obj_hat = residual_sq(x, &instance.y, &beta_hat);
    let obj_star = w.norm_squared();
    BasicInequalityCheck {
        objective_ok: obj_hat <= obj_star + 1e-8,
        eqn_basic_ok: lhs <= rhs + 1e-8,
        lhs,
        rhs,
    }
}

/// Minimum-ℓ1 solution of `Xβ = y`, found among basic solutions (supports of
/// independent columns, size at most `rank X`). Errors when `y ∉ col(X)`.
pub fn min_l1_interpolant(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    check_dims(x, y)?;
    let (n, d) = x.shape();
    let kmax = n.min(d);
    let total: f64 = (1..=kmax).map(|k| linalg::binomial(d, k)).sum();
    if total > 1.0e6 {
        return Err(Error::Enumeration {
            d,
            k: kmax,
            count: total,
            budget: 1.0e6,
        });
    }
    let scale = y.norm().max(x.abs().max()).max(1.0);
    if y.norm() <= 1e-14 * scale {
        return Ok(DVector::zeros(d));
    }
    let mut best: Option<(f64, DVector<f64>)> = None;
    for k in 1..=kmax {
        linalg::for_each_support(d, k, |support| {
            let xs = linalg::select_columns(x, support);
            if linalg::rank(&xs, 1e-10) < k {
                return;
            }
            let z = linalg::lstsq_min_norm(&xs, y, RANK_CUTOFF);
            if (&xs * &z - y).norm() > 1e-10 * scale {
                return;
            }
            let l1 = z.iter().map(|v| v.abs()).sum::<f64>();
            if best.as_ref().map_or(true, |(b, _)| l1 < *b - 1e-14) {
                let mut beta = DVector::zeros(d);
                for (i, &j) in support.iter().enumerate() {
                    beta[j] = z[i];
                }
                best = Some((l1, beta));
            }
        });
    }
    best.map(|(_, b)| b)
        .ok_or_else(|| Error::Precondition("y is not in the column span of X".into()))
}
