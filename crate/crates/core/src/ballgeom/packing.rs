//! Finite packings with self-certifying minimum distances.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    L2,
    Lp { p: f64 },
    Hamming,
}

impl Metric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Metric::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Lp { p } => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                linalg::lp_norm(&diff, p)
            }
            Metric::Hamming => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingResult {
    pub points: Vec<Vec<f64>>,
    /// Exact minimum over distinct pairs; `+∞` for fewer than two points.
    pub min_pairwise_distance: f64,
    pub metric: Metric,
    pub delta: f64,
}

impl PackingResult {
    pub fn from_points(points: Vec<Vec<f64>>, metric: Metric, delta: f64) -> Self {
        let min_pairwise_distance = min_pairwise(&points, &metric);
        Self {
            points,
            min_pairwise_distance,
            metric,
            delta,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    /// Recompute every pairwise distance and confirm the stored minimum and
    /// the requested separation.
    pub fn certify(&self) -> bool {
        let recomputed = min_pairwise(&self.points, &self.metric);
        recomputed == self.min_pairwise_distance && recomputed >= self.delta
    }

    pub fn sidecar(&self) -> PackingSidecar {
        PackingSidecar {
            metric: self.metric,
            delta: self.delta,
            cardinality: self.cardinality(),
            min_distance: self
                .min_pairwise_distance
                .is_finite()
                .then_some(self.min_pairwise_distance),
        }
    }

    /// One point per CSV row plus a `<path>.json` sidecar.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        let mut out = String::new();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        let mut f = std::fs::File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
        f.write_all(out.as_bytes())
            .map_err(|e| Error::io(csv_path, e))?;
        let sidecar_path = csv_path.with_extension("json");
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(&sidecar_path, json).map_err(|e| Error::io(&sidecar_path, e))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingSidecar {
    pub metric: Metric,
    pub delta: f64,
    pub cardinality: usize,
    pub min_distance: Option<f64>,
}

fn min_pairwise(points: &[Vec<f64>], metric: &Metric) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min(metric.distance(&points[i], &points[j]));
        }
    }
    m
}

/// First-fit packing over a candidate stream: a candidate is kept when it is
/// at least `delta` from everything kept so far.
pub fn greedy_pack<I>(candidates: I, delta: f64, metric: Metric, max_points: usize) -> PackingResult
where
    I: IntoIterator<Item = Vec<f64>>,
{
    assert!(delta > 0.0, "packing separation must be positive");
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        if kept.len() >= max_points {
            break;
        }
        if kept.iter().all(|k| metric.distance(k, &c) >= delta) {
            kept.push(c);
        }
    }
    PackingResult::from_points(kept, metric, delta)
}

pub fn hamming_distance(a: &[i8], b: &[i8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// `exp((s/2) log((d − s)/(s/2)))`, the guaranteed packing size.
pub fn hamming_packing_target(d: usize, s: usize) -> f64 {
    let half = s as f64 / 2.0;
    ((d - s) as f64 / half).powf(half)
}

const FULL_SCAN_LIMIT: f64 = 2.0e5;

/// Packing of `{z ∈ {−1,0,+1}^d : ‖z‖₀ = s}` with pairwise Hamming distance ≥ s/2.
///
/// Greedy first-fit over the lexicographic enumeration (supports, then sign
/// patterns). When the candidate set is small the scan runs to completion;
/// otherwise it stops once `C(d,s)/C(d,s/2)` points are held, which already
/// exceeds the guaranteed size.
pub fn hamming_packing(d: usize, s: usize) -> Result<PackingResult> {
    validate_hamming(d, s)?;
    let total = linalg::binomial(d, s) * 2f64.powi(s as i32);
    let limit = if total <= FULL_SCAN_LIMIT {
        usize::MAX
    } else {
        let m = (linalg::binomial(d, s) / linalg::binomial(d, s / 2)).ceil();
        if m > 1.0e6 {
            return Err(Error::Parameter(format!(
                "Hamming packing for d = {d}, s = {s} would hold {m:.3e} points"
            )));
        }
        m as usize
    };
    hamming_packing_limited(d, s, limit)
}

pub fn hamming_packing_limited(d: usize, s: usize, max_points: usize) -> Result<PackingResult> {
    validate_hamming(d, s)?;
    let min_sep = s / 2;
    let mut kept: Vec<Vec<i8>> = Vec::new();
    let mut done = false;
    linalg::for_each_support(d, s, |support| {
        if done {
            return;
        }
        for signs in 0u64..(1u64 << s) {
            let mut z = vec![0i8; d];
            for (bit, &j) in support.iter().enumerate() {
                z[j] = if signs >> bit & 1 == 0 { 1 } else { -1 };
            }
            if kept.iter().all(|k| hamming_distance(k, &z) >= min_sep) {
                kept.push(z);
                if kept.len() >= max_points {
                    done = true;
                    return;
                }
            }
        }
    });
    let points = kept
        .into_iter()
        .map(|z| z.into_iter().map(f64::from).collect())
        .collect();
    Ok(PackingResult::from_points(points, Metric::Hamming, min_sep as f64))
}

fn validate_hamming(d: usize, s: usize) -> Result<()> {
    if s < 2 || s % 2 != 0 || s > d {
        return Err(Error::Parameter(format!(
            "Hamming packing needs an even s with 2 <= s <= d (s = {s}, d = {d})"
        )));
    }
    if s > 62 {
        return Err(Error::Parameter(format!("sign enumeration limited to s <= 62, got {s}")));
    }
    Ok(())
}

/// Scale a ternary packing by `√(2/s)·δ` and certify `δ² ≤ ‖β − β′‖²₂ ≤ 8δ²`.
///
/// The certificate is checked on the integer squared differences of the
/// ternary points, so it is exact.
pub fn rescale_hypercube_packing(packing: &PackingResult, delta_n: f64, s: usize) -> Result<PackingResult> {
    if packing.metric != Metric::Hamming {
        return Err(Error::Parameter("rescaling expects a Hamming packing".into()));
    }
    if !(delta_n >= 0.0) || s == 0 {
        return Err(Error::Parameter(format!(
            "need delta_n >= 0 and s >= 1 (delta_n = {delta_n}, s = {s})"
        )));
    }
    // (2/s)·D ∈ [1, 8]  ⇔  s ≤ 2D ≤ 8s with D = Σ(z_j − z′_j)²
    for i in 0..packing.points.len() {
        for j in i + 1..packing.points.len() {
            let dsq: f64 = packing.points[i]
                .iter()
                .zip(&packing.points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let twice = 2 * dsq as usize;
            if twice < s || twice > 8 * s {
                return Err(Error::Inconsistency(format!(
                    "pair ({i}, {j}) has squared ternary distance {dsq}, outside [s/2, 4s] for s = {s}"
                )));
            }
        }
    }
    let scale = (2.0 / s as f64).sqrt() * delta_n;
    let points: Vec<Vec<f64>> = packing
        .points
        .iter()
        .map(|p| p.iter().map(|v| v * scale).collect())
        .collect();
    let min = min_pairwise(&points, &Metric::L2);
    Ok(PackingResult {
        points,
        min_pairwise_distance: min,
        metric: Metric::L2,
        delta: delta_n,
    })
}
