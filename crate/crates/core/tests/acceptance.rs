//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand_distr::{ChiSquared, Distribution};

use lqminimax::ballgeom::{hamming_packing, hamming_packing_target, rescale_hypercube_packing, truncation_inequality};
use lqminimax::bounds::{minimax_rate, sup_correlation_exact, sup_correlation_pred_exact, RateParams, RateQuery, Theorem};
use lqminimax::conditions::{re_constant, sparse_spectrum, verify_prop1, REMode, REParams};
use lqminimax::estimators::{l0_least_squares, residual_sq};
use lqminimax::harness::{
    corollary1_experiment, counterexample_scenario, fit_rate_slope, run_risk_experiment, BetaSpec, DRule,
    DesignTemplate, EstimatorSpec, ExperimentConfig, Predictor, SequenceExperiment, TrialRecord,
};
use lqminimax::linalg::lq_sum;
use lqminimax::{BallSpec, DesignSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo && v <= hi
}

fn counterexample() -> Outcome {
    let t = Instant::now();
    let r = counterexample_scenario().expect("scenario runs");
    let secs = t.elapsed().as_secs_f64();
    let l1_ok = (r.interpolant_l1 - 2.0 / 3.0).abs() <= 1e-6;
    let pass = r.all_ok() && r.l0_error <= 1e-10 && l1_ok && secs < 1.0;
    outcome(
        pass,
        format!(
            "checks {}/{}/{}/{}, l0 error {:.1e}, interpolant {:?}, l1 {:.9}, {:.3}s",
            r.delta_in_kernel,
            r.delta_in_cone_not_sparse,
            r.l0_exact,
            r.interpolant_beats_truth,
            r.l0_error,
            r.interpolant,
            r.interpolant_l1,
            secs
        ),
    )
}

fn grid_config(ball: BallSpec, estimator: EstimatorSpec, beta: BetaSpec, seed_root: u64) -> ExperimentConfig {
    ExperimentConfig {
        design: DesignTemplate::StandardGaussian,
        ball,
        sigma: 1.0,
        n_grid: vec![100, 200, 400, 800, 1600],
        d_rule: DRule::Fixed { d: 32 },
        trials_per_cell: 50,
        estimator,
        losses: vec![],
        seed_root,
        beta,
        scaling_check: None,
        workers: None,
    }
}

fn hard_sparsity_records() -> Vec<TrialRecord> {
    let ball = BallSpec::l0(4).unwrap();
    let cfg = grid_config(ball, EstimatorSpec::L0 { s: None }, BetaSpec::default(), 20240101);
    let exp = run_risk_experiment(&cfg).expect("l0 sweep runs");
    assert!(exp.records.iter().all(|r| r.objective_ok));
    exp.records
}

fn slope_line(fit: &lqminimax::RateFitResult) -> String {
    let risks: Vec<String> = fit.cells.iter().map(|c| format!("{:.4}", c.trimmed_mean)).collect();
    format!(
        "slope {:.3} (theory {:.2}), r² {:.3}, cell risks [{}]",
        fit.slope,
        fit.theoretical_slope,
        fit.r_squared,
        risks.join(", ")
    )
}

fn l0_l2_rate(records: &[TrialRecord]) -> Outcome {
    let fit = fit_rate_slope(records, "l2", Predictor::N, &BallSpec::l0(4).unwrap()).unwrap();
    outcome(within(fit.slope, -1.15, -0.85) && fit.r_squared >= 0.95, slope_line(&fit))
}

fn l1_l2_rate() -> Outcome {
    let ball = BallSpec::new(1.0, 4.0).unwrap();
    let cfg = grid_config(ball, EstimatorSpec::l1(None), BetaSpec::default(), 20240102);
    let exp = run_risk_experiment(&cfg).expect("l1 sweep runs");
    let fit = fit_rate_slope(&exp.records, "l2", Predictor::N, &ball).unwrap();
    outcome(within(fit.slope, -0.65, -0.35) && fit.r_squared >= 0.9, slope_line(&fit))
}

fn prediction_rate(records: &[TrialRecord]) -> Outcome {
    let fit = fit_rate_slope(records, "pred", Predictor::N, &BallSpec::l0(4).unwrap()).unwrap();
    outcome(within(fit.slope, -1.15, -0.85), slope_line(&fit))
}

fn sequence_model() -> Outcome {
    let (fit, _) = corollary1_experiment(
        &[256, 512, 1024, 2048],
        1.0,
        &BallSpec::l0(5).unwrap(),
        &SequenceExperiment::default(),
    )
    .expect("sequence sweep runs");
    outcome((fit.slope - 1.0).abs() <= 0.2, slope_line(&fit))
}

fn hamming_packings() -> Outcome {
    let mut cases = 0;
    let mut failures = Vec::new();
    for s in [2usize, 4] {
        for d in s..=12 {
            cases += 1;
            let pack = hamming_packing(d, s).expect("packing builds");
            let pts: Vec<Vec<i64>> = pack.points.iter().map(|p| p.iter().map(|v| v.round() as i64).collect()).collect();
            let target = hamming_packing_target(d, s);
            let mut ok = pts.len() as f64 >= target;
            ok &= pts.iter().all(|p| p.iter().filter(|v| **v != 0).count() == s);
            ok &= pts.iter().all(|p| p.iter().all(|v| v.abs() <= 1));
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    let ham = pts[i].iter().zip(&pts[j]).filter(|(a, b)| a != b).count();
                    ok &= 2 * ham >= s;
                    // squared distance after scaling by √(2/s)·δ is (2/s)·sq·δ²
                    let sq: i64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    ok &= s as i64 <= 2 * sq && sq <= 4 * s as i64;
                }
            }
            let delta = 0.7;
            let scaled = rescale_hypercube_packing(&pack, delta, s).expect("certificate holds");
            for i in 0..scaled.points.len() {
                for j in i + 1..scaled.points.len() {
                    let dist2: f64 = scaled.points[i]
                        .iter()
                        .zip(&scaled.points[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    ok &= dist2 >= delta * delta * (1.0 - 1e-12) && dist2 <= 8.0 * delta * delta * (1.0 + 1e-12);
                }
            }
            if !ok {
                failures.push(format!("(d={d}, s={s}, |P|={}, target {target:.2})", pts.len()));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{cases} (d, s) pairs checked exhaustively; failures: {failures:?}"),
    )
}

fn truncation() -> Outcome {
    let mut rng = common::rng(77);
    let mut violations = 0;
    let mut total = 0;
    for q in [0.25, 0.5, 0.75, 1.0] {
        for _ in 0..10_000 {
            let d = rng_usize(&mut rng, 1, 40);
            let rq = common::uniform(&mut rng, 0.05, 10.0);
            let mut theta: Vec<f64> = common::gaussian_vector(&mut rng, d).iter().map(|v| v * v.abs()).collect();
            if rng_usize(&mut rng, 0, 3) == 0 {
                let keep = rng_usize(&mut rng, 1, d);
                for v in theta.iter_mut().skip(keep) {
                    *v = 0.0;
                }
            }
            let fill = common::uniform(&mut rng, 0.0, 1.0);
            let mass = lq_sum(&theta, q);
            if mass > 0.0 {
                let scale = (fill * 2.0 * rq / mass).powf(1.0 / q);
                theta.iter_mut().for_each(|v| *v *= scale);
            }
            let tau = 10f64.powf(common::uniform(&mut rng, -4.0, 3.0));
            let check = truncation_inequality(&theta, rq, q, tau).expect("feasible input");
            let l1: f64 = theta.iter().map(|v| v.abs()).sum();
            let l2 = theta.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rhs = (2.0 * rq).sqrt() * tau.powf(-q / 2.0) * l2 + 2.0 * rq * tau.powf(1.0 - q);
            total += 1;
            if !check.holds || l1 > rhs * (1.0 + 1e-12) + 1e-12 {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations in {total} draws"))
}

fn rng_usize(rng: &mut rand_chacha::ChaCha8Rng, lo: usize, hi: usize) -> usize {
    common::uniform(rng, lo as f64, hi as f64 + 1.0).floor() as usize
}

fn prop1() -> Outcome {
    let (n, d) = (200, 400);
    let mut diag = DMatrix::identity(d, d);
    diag[(0, 0)] = 4.0;
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, cov) in [("I", DMatrix::identity(d, d)), ("diag(4,1,..)", diag)] {
        let spec = DesignSpec::correlated_gaussian(n, &cov, 11);
        let rep = verify_prop1(&spec, 10, 1000, 12).expect("prop1 runs");
        pass &= rep.lower_violations == 0 && rep.upper_violations == 0 && rep.checks == 10_000;
        parts.push(format!(
            "{name}: {} checks, {} lower / {} upper violations",
            rep.checks, rep.lower_violations, rep.upper_violations
        ));
    }
    outcome(pass, parts.join("; "))
}

fn chi_square() -> Outcome {
    let draws = 100_000;
    let mut rng = common::rng(99);
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, x) in [(10usize, 1.0f64), (50, 2.0), (20, 1.0)] {
        let tails = lqminimax::bounds::chi_square_tails(m, x).unwrap();
        let mf = m as f64;
        let up_thr = 2.0 * (mf * x).sqrt() + 2.0 * x;
        let lo_thr = 2.0 * (mf * x).sqrt();
        pass &= (tails.upper_threshold - up_thr).abs() < 1e-12 && (tails.lower_threshold - lo_thr).abs() < 1e-12;
        let bound = (-x).exp();
        pass &= (tails.upper_dev_bound - bound).abs() < 1e-15 && (tails.lower_dev_bound - bound).abs() < 1e-15;
        let chi = ChiSquared::new(mf).unwrap();
        let (mut up, mut lo) = (0usize, 0usize);
        for _ in 0..draws {
            let z = chi.sample(&mut rng) - mf;
            up += (z >= up_thr) as usize;
            lo += (z <= -lo_thr) as usize;
        }
        let slack = 3.0 * common::binomial_se(bound, draws);
        let (fu, fl) = (up as f64 / draws as f64, lo as f64 / draws as f64);
        pass &= fu <= bound + slack && fl <= bound + slack;
        parts.push(format!("(m={m}, x={x}): upper {fu:.4}, lower {fl:.4} vs {bound:.4}"));
    }
    outcome(pass, parts.join("; "))
}

fn condition_ordering() -> Outcome {
    let (n, d, s) = (60, 10, 2);
    let mut runs = 0;
    let mut bad = 0;
    let mut worst_gap = f64::INFINITY;
    for seed in 0..20u64 {
        let x = lqminimax::linmodel::generate_design(&DesignSpec::standard_gaussian(n, d, 500 + seed)).unwrap();
        let (kappa_l, _) = sparse_spectrum(&x, s).unwrap();
        for c0 in [1.0, 3.0] {
            let re = re_constant(&x, &REParams { s, c0 }, &REMode::Sampled { n_samples: 20_000, seed }).unwrap();
            runs += 1;
            worst_gap = worst_gap.min(kappa_l - re.value);
            if re.value > kappa_l * (1.0 + 1e-12) {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("{bad} of {runs} runs with RE above κℓ; smallest gap κℓ − RE = {worst_gap:.4}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut rng = common::rng(2025);
    let mut worst_rel = 0.0f64;
    let mut instances = 0;
    while instances < 100 {
        let d = rng_usize(&mut rng, 4, 14);
        let s = rng_usize(&mut rng, 1, 3.min(d));
        if lqminimax::linalg::binomial(d, s) > 1e4 {
            continue;
        }
        let n = rng_usize(&mut rng, s + 2, 2 * d + 4);
        let x = common::gaussian_matrix(&mut rng, n, d);
        let mut beta = DVector::zeros(d);
        for j in 0..s {
            beta[(j * 7 + instances) % d] = common::uniform(&mut rng, -2.0, 2.0);
        }
        let y = &x * &beta + common::gaussian_vector(&mut rng, n);
        let est = l0_least_squares(&x, &y, s).unwrap();
        let got = residual_sq(&x, &y, &est.beta());
        let want = common::brute_force_l0(&x, &y, s);
        worst_rel = worst_rel.max((got - want).abs() / want.max(f64::MIN_POSITIVE));
        instances += 1;
    }
    let l0_ok = worst_rel <= 1e-10;

    // Dense sampling of the suprema from below on small instances.
    let mut sup_ok = true;
    let mut worst_ratio = f64::INFINITY;
    for seed in 0..6u64 {
        let mut rng = common::rng(300 + seed);
        let (n, d, s, r) = (8, 4 + (seed as usize % 3), 1, 1.5);
        let x = common::gaussian_matrix(&mut rng, n, d);
        let w = common::gaussian_vector(&mut rng, n);
        let exact = sup_correlation_exact(&x, &w, s, r).unwrap();
        let exact_pred = sup_correlation_pred_exact(&x, &w, s, r).unwrap();
        let nf = n as f64;
        let (mut best, mut best_pred) = (0.0f64, 0.0f64);
        let supports = common::subsets(d, 2 * s);
        for _ in 0..40_000 {
            let cols = &supports[rng_usize(&mut rng, 0, supports.len() - 1)];
            let dir = common::unit_vector(&mut rng, cols.len());
            let mut theta = DVector::zeros(d);
            for (k, &j) in cols.iter().enumerate() {
                theta[j] = dir[k];
            }
            let xt = &x * &theta;
            best = best.max((w.dot(&xt) / nf).abs() * r);
            let pred_norm = xt.norm() / nf.sqrt();
            if pred_norm > 1e-12 {
                best_pred = best_pred.max((w.dot(&xt) / nf).abs() * r / pred_norm);
            }
        }
        sup_ok &= best <= exact * (1.0 + 1e-10) && best >= 0.99 * exact;
        sup_ok &= best_pred <= exact_pred * (1.0 + 1e-10) && best_pred >= 0.99 * exact_pred;
        worst_ratio = worst_ratio.min(best / exact).min(best_pred / exact_pred);
    }
    outcome(
        l0_ok && sup_ok,
        format!(
            "l0 vs brute force on {instances} instances: max relative gap {worst_rel:.1e}; sampled/exact suprema ≥ {worst_ratio:.4}"
        ),
    )
}

fn explicit_constants() -> Outcome {
    let mut t2a = RateParams::new(100.0, E, 1.0, 1.0);
    t2a.sigma = 1.0;
    let v2a = minimax_rate(&RateQuery { theorem: Theorem::T2a, params: t2a }).unwrap();
    let v4b = minimax_rate(&RateQuery {
        theorem: Theorem::T4b,
        params: RateParams::new(100.0, 8.0, 0.0, 2.0),
    })
    .unwrap();
    let want4b = 81.0 * 2.0 * 4f64.ln() / 100.0;
    let r2a = (v2a - 2.4).abs() / 2.4;
    let r4b = (v4b - want4b).abs() / want4b;
    outcome(
        r2a <= 1e-12 && r4b <= 1e-12,
        format!("T2a {v2a:.15} (rel {r2a:.1e}), T4b {v4b:.15} (rel {r4b:.1e})"),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2} {name}: {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    };
    let records = std::cell::OnceCell::new();
    let l0_records = || records.get_or_init(hard_sparsity_records).clone();

    report(1, "counterexample exactness", &counterexample);
    report(2, "q=0 l2 rate", &|| l0_l2_rate(&l0_records()));
    report(3, "q=1 l2 rate", &l1_l2_rate);
    report(4, "q=0 prediction rate", &|| prediction_rate(&l0_records()));
    report(5, "sequence model", &sequence_model);
    report(6, "hamming packing", &hamming_packings);
    report(7, "truncation inequality", &truncation);
    report(8, "restricted curvature Monte Carlo", &prop1);
    report(9, "chi-square tails", &chi_square);
    report(10, "condition ordering", &condition_ordering);
    report(11, "oracle equivalence", &oracle_equivalence);
    report(12, "explicit-constant rates", &explicit_constants);

    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
