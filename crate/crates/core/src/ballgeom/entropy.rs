//! Metric-entropy bound formulas for ℓq-balls. Constants are caller-supplied.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBoundParams {
    pub u_const: f64,
    pub l_const: f64,
    pub nu: f64,
}

impl Default for EntropyBoundParams {
    fn default() -> Self {
        Self {
            u_const: 1.0,
            l_const: 1.0,
            nu: 0.5,
        }
    }
}

impl EntropyBoundParams {
    pub fn new(u_const: f64, l_const: f64, nu: f64) -> Result<Self> {
        let p = Self { u_const, l_const, nu };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.u_const > 0.0 && self.l_const > 0.0) {
            return Err(Error::Parameter("entropy constants must be positive".into()));
        }
        if self.l_const > self.u_const {
            return Err(Error::Parameter(format!(
                "lower constant {} exceeds upper constant {}",
                self.l_const, self.u_const
            )));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(Error::Parameter(format!("nu must lie in (0,1), got {}", self.nu)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyBounds {
    pub lower: f64,
    pub upper: f64,
    /// Whether ε lies in the range where the lower bound is known to apply.
    pub lower_valid: bool,
}

/// Upper and lower bounds on `log N(ε; B_q(Rq), ℓp)`, both of shape
/// `Rq^{p/(p−q)}·(1/ε)^{pq/(p−q)}·log d`. `p = ∞` is accepted as the limit.
pub fn entropy_bounds(
    p: f64,
    q: f64,
    rq: f64,
    d: usize,
    epsilon: f64,
    params: &EntropyBoundParams,
) -> Result<EntropyBounds> {
    params.validate()?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("requires 0 < q <= 1, got q = {q}")));
    }
    if !(p > q) {
        return Err(Error::Parameter(format!("requires p > q, got p = {p}, q = {q}")));
    }
    if !(rq > 0.0) {
        return Err(Error::Parameter(format!("requires Rq > 0, got {rq}")));
    }
    if d < 2 {
        return Err(Error::Parameter(format!("requires d >= 2, got {d}")));
    }
    let radius = rq.powf(1.0 / q);
    if !(epsilon > 0.0 && epsilon < radius) {
        return Err(Error::Parameter(format!(
            "requires 0 < epsilon < Rq^(1/q) = {radius}, got {epsilon}"
        )));
    }

    let (a, b) = if p.is_infinite() {
        (1.0, q)
    } else {
        (p / (p - q), p * q / (p - q))
    };
    let log_d = (d as f64).ln();
    let ln_shape = a * rq.ln() - b * epsilon.ln() + log_d.ln();
    let shape = ln_shape.exp();

    // ε^p ≥ (log d / d^ν)^{(p−q)/q}, taken in logs
    let lower_valid = epsilon < 1.0
        && if p.is_infinite() {
            // p·ln ε ≥ (p/q)·ln(...) as p→∞ reduces to ln ε ≥ ln(...)/q
            epsilon.ln() >= (log_d.ln() - params.nu * log_d) / q
        } else {
            p * epsilon.ln() >= ((p - q) / q) * (log_d.ln() - params.nu * log_d)
        };

    Ok(EntropyBounds {
        lower: params.l_const * shape,
        upper: params.u_const * shape,
        lower_valid,
    })
}

/// Entropy bound for the image of the ℓq-ball under a design with column
/// normalization `kappa_c`, in ℓ2.
pub fn qconvex_entropy_bound(q: f64, rq: f64, d: usize, epsilon: f64, kappa_c: f64, u2: f64) -> Result<f64> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("requires 0 < q <= 1, got q = {q}")));
    }
    if !(kappa_c > 0.0) {
        return Err(Error::Parameter(format!("requires kappa_c > 0, got {kappa_c}")));
    }
    if !(rq > 0.0 && epsilon > 0.0 && u2 > 0.0) || d < 2 {
        return Err(Error::Parameter("requires Rq, epsilon, U2 > 0 and d >= 2".into()));
    }
    let e = 2.0 - q;
    let ln = (2.0 / e) * rq.ln() + (2.0 * q / e) * (kappa_c / epsilon).ln() + (d as f64).ln().ln();
    Ok(u2 * ln.exp())
}
