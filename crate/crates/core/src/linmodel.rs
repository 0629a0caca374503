//! Problem generation: design ensembles, sparse truth vectors, noisy
//! observations and loss evaluation for the model `y = Xβ* + w`.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::ballgeom;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, stream};

/// An ℓq-ball: `{β : Σ|β_j|^q ≤ radius}` for `q ∈ (0, 1]`, or the set of
/// `radius`-sparse vectors when `q = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub q: f64,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(q: f64, radius: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Parameter(format!("q must lie in [0, 1], got {q}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if q == 0.0 && radius.fract() != 0.0 {
            return Err(Error::Parameter(format!(
                "sparsity level must be an integer, got {radius}"
            )));
        }
        Ok(Self { q, radius })
    }

    /// Hard-sparsity ball `B₀(s)`.
    pub fn l0(s: usize) -> Result<Self> {
        Self::new(0.0, s as f64)
    }

    pub fn is_hard(&self) -> bool {
        self.q == 0.0
    }

    /// The sparsity level when `q = 0`.
    pub fn sparsity(&self) -> Option<usize> {
        self.is_hard().then_some(self.radius as usize)
    }

    /// Check the ball can live in dimension `d`.
    pub fn bind(&self, d: usize) -> Result<()> {
        if let Some(s) = self.sparsity() {
            if s == 0 || s > d {
                return Err(Error::Parameter(format!(
                    "sparsity {s} must satisfy 1 <= s <= d = {d}"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, theta: &[f64], tol: f64) -> bool {
        ballgeom::ball_contains(self, theta, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignKind {
    Explicit { rows: Vec<Vec<f64>> },
    StandardGaussian,
    CorrelatedGaussian { covariance: Vec<Vec<f64>> },
    IdentitySequence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    #[serde(flatten)]
    pub kind: DesignKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

impl DesignSpec {
    pub fn standard_gaussian(n: usize, d: usize, seed: u64) -> Self {
        Self {
            kind: DesignKind::StandardGaussian,
            n,
            d,
            seed,
        }
    }

    pub fn correlated_gaussian(n: usize, covariance: &DMatrix<f64>, seed: u64) -> Self {
        Self {
            kind: DesignKind::CorrelatedGaussian {
                covariance: matrix_to_rows(covariance),
            },
            n,
            d: covariance.nrows(),
            seed,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            kind: DesignKind::IdentitySequence,
            n,
            d: n,
            seed: 0,
        }
    }

    pub fn explicit(x: &DMatrix<f64>) -> Self {
        Self {
            kind: DesignKind::Explicit {
                rows: matrix_to_rows(x),
            },
            n: x.nrows(),
            d: x.ncols(),
            seed: 0,
        }
    }

    /// Covariance matrix of the rows, when the ensemble has one.
    pub fn covariance(&self) -> Result<Option<DMatrix<f64>>> {
        match &self.kind {
            DesignKind::CorrelatedGaussian { covariance } => {
                Ok(Some(rows_to_matrix(covariance)?))
            }
            DesignKind::StandardGaussian => Ok(Some(DMatrix::identity(self.d, self.d))),
            _ => Ok(None),
        }
    }
}

/// ρ(Σ) = max_j Σ_jj.
pub fn max_variance(sigma: &DMatrix<f64>) -> f64 {
    sigma.diagonal().iter().copied().fold(0.0, f64::max)
}

pub fn generate_design(spec: &DesignSpec) -> Result<DMatrix<f64>> {
    if spec.n == 0 || spec.d == 0 {
        return Err(Error::Dimension(format!(
            "design needs n, d >= 1 (got n = {}, d = {})",
            spec.n, spec.d
        )));
    }
    let mut rng = rng::rng_from_seed(rng::derive_seed(&[spec.seed, stream::DESIGN]));
    match &spec.kind {
        DesignKind::Explicit { rows } => {
            let x = rows_to_matrix(rows)?;
            if x.shape() != (spec.n, spec.d) {
                return Err(Error::Dimension(format!(
                    "explicit design is {}x{}, spec says {}x{}",
                    x.nrows(),
                    x.ncols(),
                    spec.n,
                    spec.d
                )));
            }
            Ok(x)
        }
        DesignKind::IdentitySequence => {
            if spec.n != spec.d {
                return Err(Error::Dimension(format!(
                    "identity design needs n = d (got {} and {})",
                    spec.n, spec.d
                )));
            }
            Ok(DMatrix::identity(spec.n, spec.d))
        }
        DesignKind::StandardGaussian => Ok(gaussian_matrix(&mut rng, spec.n, spec.d)),
        DesignKind::CorrelatedGaussian { covariance } => {
            let sigma = rows_to_matrix(covariance)?;
            if sigma.nrows() != spec.d {
                return Err(Error::Dimension(format!(
                    "covariance is {}x{}, design has d = {}",
                    sigma.nrows(),
                    sigma.ncols(),
                    spec.d
                )));
            }
            let root = linalg::sym_sqrt_psd(&sigma)?;
            let w = gaussian_matrix(&mut rng, spec.n, spec.d);
            Ok(w * root)
        }
    }
}

fn gaussian_matrix(rng: &mut rng::Rng, n: usize, d: usize) -> DMatrix<f64> {
    // fill row by row so a prefix of rows does not depend on d ordering quirks
    let mut x = DMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            x[(i, j)] = rng::standard_normal(rng);
        }
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "snake_case")]
pub enum BetaPattern {
    /// Equal magnitudes with random signs on a uniformly random support.
    RandomSupport,
    /// Equal positive magnitudes on the leading coordinates.
    FirstCoordinates,
    Explicit { values: Vec<f64> },
}

/// Draw a truth vector that is a member of `ball`.
///
/// For `q = 0` the support has exactly `s` entries of size `magnitude`. For
/// `q > 0` the support holds as many entries of size `magnitude` as the ball
/// admits (at least one, shrunk to `R_q^{1/q}` if a single entry is too big).
pub fn generate_sparse_beta(
    ball: &BallSpec,
    d: usize,
    pattern: &BetaPattern,
    magnitude: f64,
    seed: u64,
) -> Result<DVector<f64>> {
    ball.bind(d)?;
    if let BetaPattern::Explicit { values } = pattern {
        if values.len() != d {
            return Err(Error::Dimension(format!(
                "explicit beta has length {}, expected {d}",
                values.len()
            )));
        }
        if !ballgeom::ball_contains(ball, values, 0.0) {
            return Err(Error::Membership(format!(
                "explicit beta is outside the ball (q = {}, radius = {})",
                ball.q, ball.radius
            )));
        }
        return Ok(DVector::from_column_slice(values));
    }
    if !(magnitude >= 0.0) || !magnitude.is_finite() {
        return Err(Error::Parameter(format!(
            "magnitude must be finite and nonnegative, got {magnitude}"
        )));
    }

    let (k, mag) = match ball.sparsity() {
        Some(s) => (s, magnitude),
        None => {
            let q = ball.q;
            let per = magnitude.powf(q);
            if magnitude == 0.0 {
                (1, 0.0)
            } else if per > ball.radius {
                (1, ball.radius.powf(1.0 / q))
            } else {
                (((ball.radius / per).floor() as usize).clamp(1, d), magnitude)
            }
        }
    };

    let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, stream::BETA]));
    let mut beta = DVector::zeros(d);
    match pattern {
        BetaPattern::FirstCoordinates => {
            for j in 0..k {
                beta[j] = mag;
            }
        }
        BetaPattern::RandomSupport => {
            let mut support = index::sample(&mut rng, d, k).into_vec();
            support.sort_unstable();
            for j in support {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                beta[j] = sign * mag;
            }
        }
        BetaPattern::Explicit { .. } => unreachable!(),
    }

    // floating-point slack for q > 0: shrink until the direct sum is within the radius
    if !ball.is_hard() {
        let mut guard = 0;
        while linalg::lq_sum(beta.as_slice(), ball.q) > ball.radius && guard < 64 {
            beta *= 1.0 - 1e-15 * (1u64 << guard.min(40)) as f64;
            guard += 1;
        }
    }
    debug_assert!(ballgeom::ball_contains(ball, beta.as_slice(), 0.0));
    Ok(beta)
}

/// A concrete regression problem `y = Xβ* + w`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub x: DMatrix<f64>,
    pub beta_star: DVector<f64>,
    pub sigma: f64,
    pub y: DVector<f64>,
    pub seed: u64,
    pub ball: Option<BallSpec>,
}

impl ProblemInstance {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// The realized noise `w = y − Xβ*`.
    pub fn noise(&self) -> DVector<f64> {
        &self.y - &self.x * &self.beta_star
    }

    pub fn with_ball(mut self, ball: BallSpec) -> Self {
        self.ball = Some(ball);
        self
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            n: self.n(),
            d: self.d(),
            q: self.ball.map(|b| b.q),
            radius: self.ball.map(|b| b.radius),
            sigma: self.sigma,
            seed: self.seed,
            x: matrix_to_rows(&self.x),
            beta_star: self.beta_star.as_slice().to_vec(),
            y: self.y.as_slice().to_vec(),
        }
    }

    pub fn from_document(doc: &InstanceDocument) -> Result<Self> {
        let x = rows_to_matrix(&doc.x)?;
        if x.shape() != (doc.n, doc.d) || doc.beta_star.len() != doc.d || doc.y.len() != doc.n {
            return Err(Error::Dimension(
                "instance document fields disagree on n and d".into(),
            ));
        }
        let ball = match (doc.q, doc.radius) {
            (Some(q), Some(r)) => Some(BallSpec::new(q, r)?),
            _ => None,
        };
        Ok(Self {
            x,
            beta_star: DVector::from_column_slice(&doc.beta_star),
            sigma: doc.sigma,
            y: DVector::from_column_slice(&doc.y),
            seed: doc.seed,
            ball,
        })
    }

    /// Long-format CSV (`vector,index,value`) holding `y` and `β*`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("vector,index,value\n");
        for (i, v) in self.y.iter().enumerate() {
            out.push_str(&format!("y,{i},{v:?}\n"));
        }
        for (j, v) in self.beta_star.iter().enumerate() {
            out.push_str(&format!("beta_star,{j},{v:?}\n"));
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// JSON shape of a [`ProblemInstance`]; `X` is stored as an array of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub n: usize,
    pub d: usize,
    pub q: Option<f64>,
    pub radius: Option<f64>,
    pub sigma: f64,
    pub seed: u64,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    pub beta_star: Vec<f64>,
    pub y: Vec<f64>,
}

/// Draw `y = Xβ* + w` with `w ~ N(0, σ² I)` from the noise stream of `seed`.
pub fn simulate(
    x: &DMatrix<f64>,
    beta_star: &DVector<f64>,
    sigma: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if x.ncols() != beta_star.len() {
        return Err(Error::Dimension(format!(
            "X has {} columns but beta has length {}",
            x.ncols(),
            beta_star.len()
        )));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!(
            "noise level must be finite and nonnegative, got {sigma}"
        )));
    }
    let mut y = x * beta_star;
    if sigma > 0.0 {
        let mut rng = rng::rng_from_seed(rng::derive_seed(&[seed, stream::NOISE]));
        for yi in y.iter_mut() {
            *yi += sigma * rng::standard_normal(&mut rng);
        }
    }
    Ok(ProblemInstance {
        x: x.clone(),
        beta_star: beta_star.clone(),
        sigma,
        y,
        seed,
        ball: None,
    })
}

/// Entry size at the detection boundary of the sequence model, `τ√(2 log n / n)`.
pub fn sequence_boundary_magnitude(n: usize, tau: f64) -> f64 {
    if n <= 1 {
        return tau;
    }
    let nf = n as f64;
    tau * (2.0 * nf.ln() / nf).sqrt()
}

/// Normal sequence model `y_i = θ*_i + ε_i`, `ε_i ~ N(0, τ²/n)`, as the
/// regression problem with `d = n`, `X = I`. Truth entries sit at the
/// detection boundary, see [`sequence_boundary_magnitude`].
pub fn sequence_model_instance(
    n: usize,
    tau: f64,
    ball: &BallSpec,
    seed: u64,
) -> Result<ProblemInstance> {
    sequence_model_instance_with(
        n,
        tau,
        ball,
        &BetaPattern::RandomSupport,
        sequence_boundary_magnitude(n, tau),
        seed,
    )
}

pub fn sequence_model_instance_with(
    n: usize,
    tau: f64,
    ball: &BallSpec,
    pattern: &BetaPattern,
    magnitude: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if n == 0 {
        return Err(Error::Dimension("sequence model needs n >= 1".into()));
    }
    if !(tau > 0.0) {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    let x = generate_design(&DesignSpec::identity(n))?;
    let beta = generate_sparse_beta(ball, n, pattern, magnitude, seed)?;
    let sigma = tau / (n as f64).sqrt();
    Ok(simulate(&x, &beta, sigma, seed)?.with_ball(*ball))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LossSpec {
    /// `Σ_j |β̂_j − β*_j|^p`.
    Lp { p: f64 },
    /// `‖X(β̂ − β*)‖²₂ / n`.
    L2Prediction,
}

impl LossSpec {
    pub const L2: LossSpec = LossSpec::Lp { p: 2.0 };

    /// Short column-style name, e.g. `l2`, `l1`, `lp1.5`, `pred`.
    pub fn name(&self) -> String {
        match self {
            LossSpec::Lp { p } if *p == 2.0 => "l2".into(),
            LossSpec::Lp { p } if *p == 1.0 => "l1".into(),
            LossSpec::Lp { p } => format!("lp{p}"),
            LossSpec::L2Prediction => "pred".into(),
        }
    }
}

pub fn loss(
    spec: &LossSpec,
    x: &DMatrix<f64>,
    beta_hat: &DVector<f64>,
    beta_star: &DVector<f64>,
) -> Result<f64> {
    if beta_hat.len() != beta_star.len() || x.ncols() != beta_hat.len() {
        return Err(Error::Dimension(format!(
            "loss needs matching lengths (X has {} columns, estimates {} and {})",
            x.ncols(),
            beta_hat.len(),
            beta_star.len()
        )));
    }
    let delta = beta_hat - beta_star;
    match *spec {
        LossSpec::Lp { p } => {
            if !(p >= 1.0) {
                return Err(Error::Parameter(format!("loss exponent p must be >= 1, got {p}")));
            }
            if p == 2.0 {
                Ok(delta.norm_squared())
            } else {
                Ok(linalg::lq_sum(delta.as_slice(), p))
            }
        }
        LossSpec::L2Prediction => Ok((x * delta).norm_squared() / x.nrows() as f64),
    }
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension("matrix rows have unequal lengths".into()));
    }
    Ok(DMatrix::from_row_iterator(
        n,
        d,
        rows.iter().flat_map(|r| r.iter().copied()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counterexample_x() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 3, &[1.0, -2.0, -1.0, 2.0, -3.0, -3.0])
    }

    #[test]
    fn identity_design() {
        let x = generate_design(&DesignSpec::identity(3)).unwrap();
        assert_eq!(x, DMatrix::identity(3, 3));
    }

    #[test]
    fn zero_dimension_rejected() {
        let spec = DesignSpec::standard_gaussian(0, 4, 1);
        assert!(matches!(generate_design(&spec), Err(Error::Dimension(_))));
    }

    #[test]
    fn non_psd_covariance_rejected() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 1.0]);
        let spec = DesignSpec::correlated_gaussian(10, &sigma, 1);
        assert!(matches!(generate_design(&spec), Err(Error::Covariance(_))));
    }

    #[test]
    fn gaussian_column_norms_in_band() {
        let x = generate_design(&DesignSpec::standard_gaussian(200, 400, 11)).unwrap();
        let kc = x
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            / (200f64).sqrt();
        let upper = 1.0 + (32.0 * (400f64).ln() / 200.0).sqrt();
        assert!(kc >= 0.7 && kc <= upper, "kc = {kc}");
    }

    #[test]
    fn correlated_first_column_variance() {
        let mut diag = DVector::from_element(5, 1.0);
        diag[0] = 4.0;
        let sigma = DMatrix::from_diagonal(&diag);
        let x = generate_design(&DesignSpec::correlated_gaussian(500, &sigma, 5)).unwrap();
        let col = x.column(0);
        let mean = col.mean();
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 499.0;
        assert!((3.5..=4.5).contains(&var), "var = {var}");
    }

    #[test]
    fn design_reproducible() {
        let spec = DesignSpec::standard_gaussian(7, 5, 99);
        assert_eq!(generate_design(&spec).unwrap(), generate_design(&spec).unwrap());
    }

    #[test]
    fn canonical_basis_beta() {
        let ball = BallSpec::l0(1).unwrap();
        let b = generate_sparse_beta(&ball, 3, &BetaPattern::FirstCoordinates, 1.0, 0).unwrap();
        assert_eq!(b.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn explicit_beta_membership() {
        let ball = BallSpec::new(1.0, 1.0).unwrap();
        let ok = BetaPattern::Explicit {
            values: vec![0.5, -0.5, 0.0],
        };
        let b = generate_sparse_beta(&ball, 3, &ok, 0.0, 0).unwrap();
        assert_eq!(linalg::l1_norm(b.as_slice()), 1.0);
        let bad = BetaPattern::Explicit {
            values: vec![0.6, -0.6, 0.0],
        };
        assert!(matches!(
            generate_sparse_beta(&ball, 3, &bad, 0.0, 0),
            Err(Error::Membership(_))
        ));
    }

    #[test]
    fn soft_ball_random_support_is_member() {
        let ball = BallSpec::new(0.5, 2.0).unwrap();
        for seed in 0..20 {
            let b = generate_sparse_beta(&ball, 30, &BetaPattern::RandomSupport, 0.3, seed)
                .unwrap();
            let direct: f64 = b.iter().map(|v| v.abs().sqrt()).sum();
            assert!(direct <= 2.0, "sum = {direct}");
            assert!(b.iter().any(|v| *v != 0.0));
        }
    }

    #[test]
    fn noiseless_simulation() {
        let x = DMatrix::identity(2, 2);
        let b = DVector::from_vec(vec![1.0, 2.0]);
        let inst = simulate(&x, &b, 0.0, 3).unwrap();
        assert_eq!(inst.y.as_slice(), &[1.0, 2.0]);

        let b = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let inst = simulate(&counterexample_x(), &b, 0.0, 3).unwrap();
        assert_eq!(inst.y.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn noise_moments() {
        let n = 10_000;
        let x = DMatrix::zeros(n, 1);
        let b = DVector::zeros(1);
        let inst = simulate(&x, &b, 1.0, 17).unwrap();
        let mean = inst.y.mean();
        let var = inst.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() <= 0.03, "mean = {mean}");
        assert!((0.94..=1.06).contains(&var), "var = {var}");
    }

    #[test]
    fn sequence_model_noise_level() {
        let ball = BallSpec::l0(1).unwrap();
        let inst = sequence_model_instance(4, 2.0, &ball, 0).unwrap();
        assert_eq!(inst.sigma * inst.sigma, 1.0);
        assert_eq!(inst.x, DMatrix::identity(4, 4));

        let inst = sequence_model_instance(1, 3.0, &ball, 0).unwrap();
        assert_eq!(inst.sigma * inst.sigma, 9.0);
        assert_eq!(inst.x.shape(), (1, 1));
    }

    #[test]
    fn loss_values() {
        let x = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let star = DVector::from_vec(vec![0.0, 0.0]);
        let hat = DVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(loss(&LossSpec::L2, &x, &hat, &star).unwrap(), 25.0);
        assert_eq!(loss(&LossSpec::L2, &x, &star, &star).unwrap(), 0.0);
        assert_eq!(loss(&LossSpec::L2Prediction, &x, &star, &star).unwrap(), 0.0);
        let one = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(loss(&LossSpec::L2Prediction, &x, &one, &star).unwrap(), 2.5);
        assert!(matches!(
            loss(&LossSpec::Lp { p: 0.5 }, &x, &one, &star),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn prediction_loss_ignores_kernel_shift() {
        let x = counterexample_x();
        let k = DVector::from_vec(vec![1.0, 1.0 / 3.0, 1.0 / 3.0]);
        let star = DVector::from_vec(vec![0.2, -1.0, 0.5]);
        let hat = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let a = loss(&LossSpec::L2Prediction, &x, &hat, &star).unwrap();
        let b = loss(&LossSpec::L2Prediction, &x, &(&hat + &k * 2.5), &(&star + &k * 2.5)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn instance_document_round_trip() {
        let ball = BallSpec::l0(2).unwrap();
        let x = generate_design(&DesignSpec::standard_gaussian(4, 3, 2)).unwrap();
        let b = generate_sparse_beta(&ball, 3, &BetaPattern::RandomSupport, 1.0, 2).unwrap();
        let inst = simulate(&x, &b, 0.5, 2).unwrap().with_ball(ball);
        let json = serde_json::to_string(&inst.to_document()).unwrap();
        let back: InstanceDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(ProblemInstance::from_document(&back).unwrap(), inst);
    }
}
