use nalgebra::DMatrix;
use proptest::prelude::*;

use lqminimax::ballgeom::{ball_contains, project_l1, project_lq_heuristic, truncation_inequality};
use lqminimax::bounds::{fano_error_bound, log_binomial, FanoParams};
use lqminimax::conditions::{column_norm_constant, in_re_cone, sparse_spectrum_at_level};
use lqminimax::linalg::lq_sum;
use lqminimax::BallSpec;

fn vector(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn l1_projection_is_feasible_and_idempotent(theta in vector(12), r in 0.1f64..4.0) {
        let p = project_l1(&theta, r);
        prop_assert!(p.iter().map(|v| v.abs()).sum::<f64>() <= r + 1e-10);
        let again = project_l1(&p, r);
        for (a, b) in p.iter().zip(&again) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn lq_projection_beats_both_fallbacks(theta in vector(8), q in 0.1f64..0.95, rq in 0.2f64..3.0) {
        let ball = BallSpec::new(q, rq).unwrap();
        let p = project_lq_heuristic(&theta, &ball);
        prop_assert!(ball_contains(&ball, &p, 1e-10));
        let dist = |v: &[f64]| theta.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let mass = lq_sum(&theta, q);
        if mass > rq {
            let scaled: Vec<f64> = theta.iter().map(|v| v * (rq / mass).powf(1.0 / q)).collect();
            prop_assert!(dist(&p) <= dist(&scaled) + 1e-9);
        }
    }

    #[test]
    fn truncation_holds(theta in vector(20), q in 0.05f64..=1.0, rq in 0.1f64..5.0, log_tau in -3.0f64..3.0, fill in 0.0f64..1.0) {
        let mass = lq_sum(&theta, q);
        let scaled: Vec<f64> = if mass > 0.0 {
            theta.iter().map(|v| v * (fill * 2.0 * rq / mass).powf(1.0 / q)).collect()
        } else {
            theta.clone()
        };
        let check = truncation_inequality(&scaled, rq, q, 10f64.powf(log_tau)).unwrap();
        prop_assert!(check.holds);
    }

    #[test]
    fn column_norm_is_homogeneous(entries in prop::collection::vec(-3.0f64..3.0, 12), c in -4.0f64..4.0) {
        let x = DMatrix::from_vec(4, 3, entries);
        let a = column_norm_constant(&x);
        prop_assert!((column_norm_constant(&(&x * c)) - c.abs() * a).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn sparse_spectrum_is_monotone(entries in prop::collection::vec(-3.0f64..3.0, 30)) {
        let x = DMatrix::from_vec(6, 5, entries);
        let mut prev = (f64::INFINITY, 0.0);
        for k in 1..=5 {
            let (lo, hi) = sparse_spectrum_at_level(&x, k).unwrap();
            prop_assert!(lo <= prev.0 + 1e-12 && hi >= prev.1 - 1e-12);
            prev = (lo, hi);
        }
    }

    #[test]
    fn sparse_vectors_lie_in_every_cone(theta in vector(10), s in 1usize..4, c0 in 0.0f64..5.0) {
        let mut v = theta.clone();
        for x in v.iter_mut().skip(s) {
            *x = 0.0;
        }
        prop_assert!(in_re_cone(&v, s, c0));
    }

    #[test]
    fn log_binomial_bracket_and_symmetry(d in 1u64..400, frac in 0.0f64..1.0) {
        let s = ((d as f64) * frac).floor() as u64;
        let lb = log_binomial(d, s).unwrap();
        prop_assert!((lb.value - log_binomial(d, d - s).unwrap().value).abs() <= 1e-9 * (1.0 + lb.value));
        if s > 0 {
            prop_assert!(lb.lower <= lb.value + 1e-9 && lb.value <= lb.upper + 1e-9);
        }
    }

    #[test]
    fn fano_bound_is_a_probability(log_pack in 0.01f64..50.0, log_cover in 0.0f64..50.0, eps in 0.0f64..2.0) {
        let v = fano_error_bound(&FanoParams {
            delta_n: 1.0, epsilon_n: eps, log_pack, log_cover, n: 100.0, sigma: 1.0, kappa_c: 1.0, c_route: 1.0,
        }).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
