//! Geometry of ℓq-balls: membership, projections, the ℓ1/ℓ2 truncation
//! inequality, packing constructions and metric-entropy bound formulas.

mod entropy;
mod packing;
mod projection;

pub use entropy::{entropy_bounds, qconvex_entropy_bound, EntropyBoundParams, EntropyBounds};
pub use packing::{
    greedy_pack, hamming_distance, hamming_packing, hamming_packing_limited,
    hamming_packing_target, rescale_hypercube_packing, Metric, PackingResult, PackingSidecar,
};
pub use projection::{project_l1, project_lq_heuristic};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linmodel::BallSpec;

/// Membership in an ℓq-ball.
///
/// For `q = 0`, entries with `|θ_j| > tol` count towards the support. For
/// `q > 0`, the test is `Σ|θ_j|^q ≤ R_q + tol`.
pub fn ball_contains(ball: &BallSpec, theta: &[f64], tol: f64) -> bool {
    if theta.iter().any(|v| !v.is_finite()) {
        return false;
    }
    match ball.sparsity() {
        Some(s) => theta.iter().filter(|v| v.abs() > tol).count() <= s,
        None => linalg::lq_sum(theta, ball.q) <= ball.radius + tol,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖θ‖₁ ≤ √(2R_q) τ^{−q/2} ‖θ‖₂ + 2R_q τ^{1−q}` for `θ ∈ B_q(2R_q)`.
pub fn truncation_inequality(theta: &[f64], rq: f64, q: f64, tau: f64) -> Result<TruncationCheck> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Parameter(format!("q must lie in (0, 1], got {q}")));
    }
    if !(tau > 0.0) || !(rq > 0.0) {
        return Err(Error::Parameter(format!(
            "tau and R_q must be positive (tau = {tau}, R_q = {rq})"
        )));
    }
    let mass = linalg::lq_sum(theta, q);
    if mass > 2.0 * rq * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "theta is outside B_q(2 R_q): sum |theta_j|^q = {mass} > {}",
            2.0 * rq
        )));
    }
    let lhs = linalg::l1_norm(theta);
    let l2 = linalg::lp_norm(theta, 2.0);
    let rhs = (2.0 * rq).sqrt() * tau.powf(-q / 2.0) * l2 + 2.0 * rq * tau.powf(1.0 - q);
    Ok(TruncationCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12,
    })
}
