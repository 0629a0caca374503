//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// All k-subsets of 0..d, by recursion.
pub fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..d {
            if d - j < k - cur.len() {
                break;
            }
            cur.push(j);
            go(j + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, d, k, &mut Vec::new(), &mut out);
    out
}

fn columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}

/// Least-squares residual on a column subset via the pseudo-inverse.
pub fn subset_rss(x: &DMatrix<f64>, y: &DVector<f64>, cols: &[usize]) -> f64 {
    let xs = columns(x, cols);
    let svd = xs.clone().svd(true, true);
    let coef = svd.solve(y, 1e-12 * svd.singular_values.max()).expect("svd solve");
    (y - &xs * coef).norm_squared()
}

/// Smallest residual sum of squares over supports of size at most s.
pub fn brute_force_l0(x: &DMatrix<f64>, y: &DVector<f64>, s: usize) -> f64 {
    let mut best = y.norm_squared();
    for k in 1..=s {
        for cols in subsets(x.ncols(), k) {
            best = best.min(subset_rss(x, y, &cols));
        }
    }
    best
}

/// Extreme singular values of X_S/√n over |S| = k.
pub fn brute_force_spectrum(x: &DMatrix<f64>, k: usize) -> (f64, f64) {
    let sn = (x.nrows() as f64).sqrt();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for cols in subsets(x.ncols(), k) {
        let sv = (columns(x, &cols) / sn).singular_values();
        let min = if k > x.nrows() { 0.0 } else { sv.min() };
        lo = lo.min(min);
        hi = hi.max(sv.max());
    }
    (lo, hi)
}

/// Random point on the unit sphere in dimension k.
pub fn unit_vector(rng: &mut ChaCha8Rng, k: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, k);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// Binomial standard error of a frequency estimate.
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
