use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqminimax"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn rates_t2a_and_t4b() {
    let out = run(&["rates", "--theorem", "T2a", "--params", "n=100,d=2.718281828459045,q=1,rq=1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 2.4).abs() < 1e-12);
    assert_eq!(v["constants_used"]["explicit"].as_f64(), Some(24.0));
    assert!(v["formula"].as_str().unwrap().starts_with("24"));

    let v = json(&run(&["rates", "--theorem", "T4b", "--params", "n=100,d=8,s=2"]));
    let want = 81.0 * 2.0 * 4f64.ln() / 100.0;
    assert!((v["value"].as_f64().unwrap() - want).abs() <= 1e-12 * want);
}

#[test]
fn rates_generic_constant_defaults_to_one() {
    let v = json(&run(&["rates", "--theorem", "T1a", "--params", "n=100,d=50,q=0.5,rq=1"]));
    assert_eq!(v["constants_used"]["c_qp"].as_f64(), Some(1.0));
    let v2 = json(&run(&["rates", "--theorem", "T1a", "--params", "n=100,d=50,q=0.5,rq=1,c_qp=3"]));
    let ratio = v2["value"].as_f64().unwrap() / v["value"].as_f64().unwrap();
    assert!((ratio - 3.0).abs() < 1e-12);
}

#[test]
fn rates_rejects_unknown_theorem() {
    let out = run(&["rates", "--theorem", "T9", "--params", "n=10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counterexample_succeeds() {
    let out = run(&["counterexample"]);
    assert!(out.status.success());
    let v = json(&out);
    for key in ["delta_in_kernel", "delta_in_cone_not_sparse", "l0_exact", "interpolant_beats_truth"] {
        assert_eq!(v[key].as_bool(), Some(true), "{key}");
    }
}

#[test]
fn simulate_each_estimator() {
    for (est, extra) in [
        ("l0", vec!["--s", "2"]),
        ("l1", vec!["--s", "2", "--radius", "2"]),
        ("lasso", vec!["--s", "2", "--lambda", "0.1"]),
    ] {
        let mut args = vec!["simulate", "--n", "40", "--d", "10", "--estimator", est, "--seed", "3"];
        args.extend(extra);
        let out = run(&args);
        assert!(out.status.success(), "{est}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["estimator"].as_str(), Some(est));
        assert!(v["losses"]["l2"].as_f64().unwrap().is_finite());
    }
    let a = run(&["simulate", "--n", "30", "--d", "8", "--s", "2", "--seed", "9"]);
    let b = run(&["simulate", "--n", "30", "--d", "8", "--s", "2", "--seed", "9"]);
    let strip = |o: &Output| {
        let mut v = json(o);
        v["estimate"].as_object_mut().unwrap().remove("iterations");
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn simulate_lq() {
    let out = run(&["simulate", "--n", "40", "--d", "10", "--q", "0.5", "--rq", "2", "--estimator", "lq"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn check_design_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("eye.json");
    write(&good, "[[2,0,0],[0,2,0],[0,0,2],[0,0,0]]");
    let out = run(&["check-design", good.to_str().unwrap(), "--s", "1", "--exact-re", "--min-kappa-l", "0.5", "--require-kernel-trivial"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!((v["diagnostics"]["kappa_c"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let bad = dir.path().join("dup.csv");
    write(&bad, "a,b,c\n1,1,0\n2,2,1\n");
    let out = run(&["check-design", bad.to_str().unwrap(), "--s", "1", "--require-kernel-trivial"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["assumptions"]["kernel_trivial"].as_bool(), Some(false));
}

#[test]
fn pack_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pack.csv");
    let out = run(&["pack", "--d", "8", "--s", "2", "--delta-n", "0.5", "--output", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["hamming_certified"].as_bool(), Some(true));
    assert_eq!(v["meets_target"].as_bool(), Some(true));
    assert!(csv.exists());
    assert!(csv.with_extension("json").exists());
}

#[test]
fn fit_rate_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    write(
        &cfg,
        r#"
sigma = 1.0
n_grid = [40, 80, 160]
trials_per_cell = 6
seed_root = 5

[design]
kind = "standard_gaussian"

[ball]
q = 0.0
radius = 2.0

[d_rule]
kind = "fixed"
d = 10

[estimator]
kind = "l0"
"#,
    );
    let records = dir.path().join("records.csv");
    let fit = dir.path().join("fit.json");
    let plot = dir.path().join("fit.svg");
    let out = run(&[
        "fit-rate",
        cfg.to_str().unwrap(),
        "--records",
        records.to_str().unwrap(),
        "--output",
        fit.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&records).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    assert_eq!(lines.next().unwrap(), "n,d,trial,seed,loss_l2,loss_pred,objective_ok,wall_ms");
    assert_eq!(lines.count(), 18);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&fit).unwrap()).unwrap();
    assert_eq!(v["data"]["n_points"].as_u64(), Some(3));
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}
