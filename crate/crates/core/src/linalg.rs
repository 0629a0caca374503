//! Dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

/// Binomial coefficient as a float; exact for every value that fits a budget check.
pub fn binomial(d: usize, k: usize) -> f64 {
    if k > d {
        return 0.0;
    }
    let k = k.min(d - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (d - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

pub fn check_budget(d: usize, k: usize, budget: f64) -> Result<()> {
    let count = binomial(d, k);
    if count > budget {
        return Err(Error::Enumeration {
            d,
            k,
            count,
            budget,
        });
    }
    Ok(())
}

/// Advance `idx` to the next k-subset of `0..d` in lexicographic order.
pub fn next_combination(idx: &mut [usize], d: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < d - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visit every k-subset of `0..d` whose smallest element is `first`, in lexicographic order.
pub fn for_each_support_with_first(d: usize, k: usize, first: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || first + k > d {
        return;
    }
    let mut idx: Vec<usize> = (first..first + k).collect();
    loop {
        f(&idx);
        if k == 1 {
            return;
        }
        // advance the tail only; the leading index stays pinned
        let tail = &mut idx[1..];
        let shifted_d = d - (first + 1);
        for t in tail.iter_mut() {
            *t -= first + 1;
        }
        let more = next_combination(tail, shifted_d);
        for t in tail.iter_mut() {
            *t += first + 1;
        }
        if !more {
            return;
        }
    }
}

pub fn for_each_support(d: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 || k > d {
        return;
    }
    for first in 0..=d - k {
        for_each_support_with_first(d, k, first, &mut f);
    }
}

pub fn select_columns(x: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    x.select_columns(cols)
}

/// Minimum-norm least-squares solution of `a z = b`, discarding singular values
/// below `rel_cutoff * sigma_max`.
pub fn lstsq_min_norm(a: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return DVector::zeros(a.ncols());
    }
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut z = DVector::zeros(a.ncols());
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > rel_cutoff * smax {
            let coef = u.column(i).dot(b) / sv;
            z += vt.row(i).transpose() * coef;
        }
    }
    z
}

pub fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    SVD::new(a.clone(), false, false).singular_values
}

/// Numerical rank with a cutoff relative to the largest singular value.
pub fn rank(a: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    let sv = singular_values(a);
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * smax).count()
}

/// Largest squared singular value of `x` by power iteration on `xᵀx`.
pub fn largest_sq_singular_value(x: &DMatrix<f64>, rel_tol: f64) -> f64 {
    let d = x.ncols();
    if d == 0 || x.nrows() == 0 {
        return 0.0;
    }
    // deterministic start with no zero components
    let mut v = DVector::from_fn(d, |i, _| 1.0 + (i as f64 * 0.618_033_988_7).fract());
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = x.tr_mul(&(x * &v));
        let next = v.dot(&w);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / nw;
        if (next - lambda).abs() <= rel_tol * next.abs() {
            return next.max(nw);
        }
        lambda = next;
    }
    lambda
}

/// Symmetric PSD square root; eigenvalues in `[-1e-12·max, 1e-12)` are clamped to zero.
pub fn sym_sqrt_psd(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = sigma.nrows();
    if d != sigma.ncols() {
        return Err(Error::Covariance(format!(
            "covariance must be square, got {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let asym = (sigma - sigma.transpose()).abs().max();
    let scale = sigma.abs().max().max(1.0);
    if asym > 1e-10 * scale {
        return Err(Error::Covariance(format!(
            "covariance is not symmetric (max asymmetry {asym:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(sigma.clone());
    let emax = eig.eigenvalues.max().max(0.0);
    let mut roots = DVector::zeros(d);
    for (i, &e) in eig.eigenvalues.iter().enumerate() {
        if e < -1e-10 * emax.max(1.0) {
            return Err(Error::Covariance(format!(
                "covariance has negative eigenvalue {e:.3e}"
            )));
        }
        roots[i] = if e < 1e-12 { 0.0 } else { e.sqrt() };
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Orthonormal basis (as columns) for the numerical kernel of `x`.
pub fn kernel_basis(x: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let (n, d) = x.shape();
    if d == 0 {
        return DMatrix::zeros(0, 0);
    }
    // pad to at least d rows so the SVD returns a full right basis
    let padded = if n >= d {
        x.clone()
    } else {
        let mut p = DMatrix::zeros(d, d);
        p.view_mut((0, 0), (n, d)).copy_from(x);
        p
    };
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("v_t requested");
    let smax = svd.singular_values.max();
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= rel_cutoff * smax)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

pub fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// `Σ |v_j|^q` for `q > 0`.
pub fn lq_sum(v: &[f64], q: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(q)).sum()
}

pub fn lp_norm(v: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return l1_norm(v);
    }
    if p == 2.0 {
        return v.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    lq_sum(v, p).powf(1.0 / p)
}

pub fn support_of(v: &[f64], tol: f64) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > tol)
        .map(|(i, _)| i)
        .collect()
}
