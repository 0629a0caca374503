use crate::linalg;
use crate::linmodel::BallSpec;

/// Euclidean projection onto `{x : ‖x‖₁ ≤ r1}` by sorting magnitudes.
pub fn project_l1(theta: &[f64], r1: f64) -> Vec<f64> {
    assert!(r1 > 0.0, "l1 radius must be positive");
    if linalg::l1_norm(theta) <= r1 {
        return theta.to_vec();
    }
    let mut mags: Vec<f64> = theta.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut threshold = 0.0;
    for (k, &m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - r1) / (k + 1) as f64;
        if m > t {
            threshold = t;
        } else {
            break;
        }
    }
    theta
        .iter()
        .map(|&v| v.signum() * (v.abs() - threshold).max(0.0))
        .collect()
}

/// Feasibility-restoring map onto a nonconvex ℓq-ball, `q ∈ (0, 1)`.
///
/// Returns the closest of several feasible candidates: magnitude clipping,
/// global rescaling, clipping restricted to the top-k entries, and the
/// separable Lagrangian (thresholded ℓq-prox) solution with the multiplier
/// found by bisection. The output always passes `ball_contains` at `1e-10`.
pub fn project_lq_heuristic(theta: &[f64], ball: &BallSpec) -> Vec<f64> {
    let q = ball.q;
    assert!(q > 0.0 && q < 1.0, "heuristic projection needs q in (0, 1)");
    let r = ball.radius;
    if linalg::lq_sum(theta, q) <= r {
        return theta.to_vec();
    }

    let dist = |x: &[f64]| -> f64 {
        x.iter()
            .zip(theta)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };
    let mut best = rescale(theta, q, r);
    let mut best_d = dist(&best);
    let mut consider = |cand: Vec<f64>| {
        if linalg::lq_sum(&cand, q) <= r {
            let dc = dist(&cand);
            if dc < best_d {
                best_d = dc;
                best = cand;
            }
        }
    };

    consider(clip(theta, q, r, None));
    consider(lagrangian(theta, q, r));

    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&a, &b| theta[b].abs().total_cmp(&theta[a].abs()));
    let mut k = 1;
    while k < theta.len() {
        consider(clip(theta, q, r, Some(&order[..k])));
        k *= 2;
    }
    best
}

fn rescale(theta: &[f64], q: f64, r: f64) -> Vec<f64> {
    let mass = linalg::lq_sum(theta, q);
    let mut c = (r / mass).powf(1.0 / q);
    let mut out: Vec<f64> = theta.iter().map(|v| v * c).collect();
    while linalg::lq_sum(&out, q) > r {
        c *= 1.0 - 1e-14;
        out = theta.iter().map(|v| v * c).collect();
    }
    out
}

/// Clip magnitudes at the largest level that keeps the (optionally
/// support-restricted) vector inside the ball.
fn clip(theta: &[f64], q: f64, r: f64, keep: Option<&[usize]>) -> Vec<f64> {
    let base: Vec<f64> = match keep {
        None => theta.to_vec(),
        Some(idx) => {
            let mut v = vec![0.0; theta.len()];
            for &i in idx {
                v[i] = theta[i];
            }
            v
        }
    };
    let apply = |t: f64| -> Vec<f64> {
        base.iter()
            .map(|&v| v.signum() * v.abs().min(t))
            .collect()
    };
    if linalg::lq_sum(&base, q) <= r {
        return base;
    }
    let (mut lo, mut hi) = (0.0, base.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if linalg::lq_sum(&apply(mid), q) <= r {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    apply(lo)
}

/// Minimizer of `½(x − a)² + μ|x|^q` over `x ≥ 0`, for `a ≥ 0`.
fn lq_prox(a: f64, mu: f64, q: f64) -> f64 {
    if mu == 0.0 || a == 0.0 {
        return a;
    }
    // g(x) = x + μ q x^{q−1} is minimized at x0; stationary points exist iff g(x0) ≤ a
    let x0 = (mu * q * (1.0 - q)).powf(1.0 / (2.0 - q));
    let g = |x: f64| x + mu * q * x.powf(q - 1.0);
    if x0 >= a || g(x0) > a {
        return 0.0;
    }
    let (mut lo, mut hi) = (x0, a);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let f = |x: f64| 0.5 * (x - a) * (x - a) + mu * x.powf(q);
    if f(x) < f(0.0) {
        x
    } else {
        0.0
    }
}

fn lagrangian(theta: &[f64], q: f64, r: f64) -> Vec<f64> {
    let apply = |mu: f64| -> Vec<f64> {
        theta
            .iter()
            .map(|&v| v.signum() * lq_prox(v.abs(), mu, q))
            .collect()
    };
    let mut hi = 1.0;
    let mut guard = 0;
    while linalg::lq_sum(&apply(hi), q) > r && guard < 200 {
        hi *= 2.0;
        guard += 1;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if linalg::lq_sum(&apply(mid), q) <= r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    apply(hi)
}
