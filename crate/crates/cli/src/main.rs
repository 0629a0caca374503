use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;

use lqminimax::ballgeom::{hamming_packing, hamming_packing_target, rescale_hypercube_packing};
use lqminimax::bounds::{minimax_rate, ConstantKind, RateParams, RateQuery, Theorem};
use lqminimax::conditions::{self, DiagnoseOptions, REMode, ResidualDescriptor};
use lqminimax::harness::{
    self, persist, Artifact, EstimatorSpec, FileHeader, Format, Predictor, RateFitResult,
};
use lqminimax::linmodel::{self, BetaPattern};
use lqminimax::{BallSpec, DesignSpec, LossSpec};

#[derive(Parser)]
#[command(name = "lqminimax", version, about = "Sparse regression over lq-balls: estimators, diagnostics, rates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one instance, fit an estimator and report its losses.
    Simulate(SimulateArgs),
    /// Measure design constants and test the requested assumptions.
    CheckDesign(CheckDesignArgs),
    /// Run an experiment config and fit the log-log risk slope.
    FitRate(FitRateArgs),
    /// Build a Hamming packing and optionally rescale it.
    Pack(PackArgs),
    /// Evaluate a rate formula.
    Rates(RatesArgs),
    /// Run the two-observation ℓ0 vs ℓ1 scenario.
    Counterexample(CounterexampleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorKind {
    L0,
    L1,
    Lq,
    Lasso,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Gaussian,
    Identity,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    d: usize,
    /// Ball exponent; 0 means hard sparsity with level `--s`.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    /// Ball radius Rq when q > 0.
    #[arg(long)]
    rq: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value_t = DesignArg::Gaussian)]
    design: DesignArg,
    #[arg(long, default_value_t = 1.0)]
    magnitude: f64,
    #[arg(long, value_enum, default_value_t = EstimatorKind::L0)]
    estimator: EstimatorKind,
    /// Sparsity for the ℓ0 estimator and the q = 0 ball.
    #[arg(long)]
    s: Option<usize>,
    /// ℓ1 radius for the l1 estimator.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the instance as CSV.
    #[arg(long)]
    instance_out: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CheckDesignArgs {
    /// Design matrix as JSON (rows, or an object with `x`) or CSV rows.
    design: PathBuf,
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 3.0)]
    c0: f64,
    /// Ball exponent for the kernel diameter; q = 0 uses level `--s`.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long)]
    rq: Option<f64>,
    /// Use the exhaustive small-d RE mode (d ≤ 12).
    #[arg(long)]
    exact_re: bool,
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    /// Constant residual fℓ in the restricted curvature condition.
    #[arg(long, default_value_t = 0.0)]
    f_l: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_kappa_c: Option<f64>,
    /// Required lower level for the sparse-spectrum κℓ.
    #[arg(long)]
    min_kappa_l: Option<f64>,
    /// Required lower level for the RE estimate.
    #[arg(long)]
    min_re: Option<f64>,
    #[arg(long)]
    require_kernel_trivial: bool,
    /// Require diam₂ ≤ fℓ/κℓ.
    #[arg(long)]
    require_ident: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictorArg {
    N,
    SLogD,
    RqLogD,
    TwoLogN,
}

impl From<PredictorArg> for Predictor {
    fn from(p: PredictorArg) -> Self {
        match p {
            PredictorArg::N => Predictor::N,
            PredictorArg::SLogD => Predictor::SLogdOverN,
            PredictorArg::RqLogD => Predictor::RqLogdNPow,
            PredictorArg::TwoLogN => Predictor::TwoLogNOverN,
        }
    }
}

#[derive(clap::Args)]
struct FitRateArgs {
    /// TOML experiment config.
    config: PathBuf,
    /// Overrides the config's seed_root.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "l2")]
    loss: String,
    #[arg(long, value_enum, default_value_t = PredictorArg::N)]
    predictor: PredictorArg,
    #[arg(long)]
    workers: Option<usize>,
    /// Trial records, CSV or JSON by extension.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Fit summary, CSV or JSON by extension; stdout if absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Log-log plot of the fit.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PackArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    s: usize,
    /// Rescale the sign vectors so pairwise squared distances lie in [δ², 8δ²].
    #[arg(long)]
    delta_n: Option<f64>,
    /// CSV of packing points; a JSON sidecar is written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct RatesArgs {
    #[arg(long)]
    theorem: String,
    /// Comma-separated k=v pairs: n, d, q, rq (or s), sigma, kappa_c, kappa_u,
    /// kappa_l, p, diam_term, tau, or a constant name.
    #[arg(long, default_value = "")]
    params: String,
}

#[derive(clap::Args)]
struct CounterexampleArgs {
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

fn ball_from(q: f64, rq: Option<f64>, s: Option<usize>) -> Result<BallSpec> {
    if q == 0.0 {
        let s = s.or(rq.map(|r| r as usize)).context("q = 0 needs --s")?;
        Ok(BallSpec::l0(s)?)
    } else {
        Ok(BallSpec::new(q, rq.context("q > 0 needs --rq")?)?)
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let ball = ball_from(args.q, args.rq, args.s)?;
    ball.bind(args.d)?;
    let spec = match args.design {
        DesignArg::Gaussian => DesignSpec::standard_gaussian(args.n, args.d, args.seed),
        DesignArg::Identity => {
            if args.d != args.n {
                bail!("identity design needs d = n");
            }
            DesignSpec::identity(args.n)
        }
    };
    let x = linmodel::generate_design(&spec)?;
    let beta = linmodel::generate_sparse_beta(&ball, args.d, &BetaPattern::RandomSupport, args.magnitude, args.seed)?;
    let inst = linmodel::simulate(&x, &beta, args.sigma, args.seed)?.with_ball(ball);
    if let Some(p) = &args.instance_out {
        inst.write_csv(p)?;
    }
    let estimator = match args.estimator {
        EstimatorKind::L0 => EstimatorSpec::L0 { s: args.s },
        EstimatorKind::L1 => {
            if args.radius.is_none() && ball.q != 1.0 {
                bail!("l1 estimator needs --radius unless q = 1");
            }
            EstimatorSpec::l1(args.radius)
        }
        EstimatorKind::Lq => EstimatorSpec::Lq {
            max_iter: 100_000,
            tol: 1e-9,
            random_starts: 4,
            oracle_start: false,
        },
        EstimatorKind::Lasso => EstimatorSpec::Lasso {
            lambda: args.lambda.context("lasso needs --lambda")?,
            max_iter: 100_000,
            tol: 1e-9,
        },
    };
    let est = harness::run_estimator(&estimator, &ball, &inst)?;
    let check = lqminimax::estimators::check_basic_inequality(&inst, &est);
    let bh = est.beta();
    let mut losses = BTreeMap::new();
    for spec in [LossSpec::L2, LossSpec::Lp { p: 1.0 }, LossSpec::L2Prediction] {
        losses.insert(spec.name(), linmodel::loss(&spec, &inst.x, &bh, &inst.beta_star)?);
    }
    emit(
        &json!({
            "n": args.n,
            "d": args.d,
            "ball": ball,
            "sigma": args.sigma,
            "seed": args.seed,
            "estimator": estimator.name(),
            "beta_star": inst.beta_star.as_slice(),
            "estimate": est,
            "losses": losses,
            "objective_ok": check.objective_ok,
            "eqn_basic_ok": check.eqn_basic_ok,
        }),
        args.output.as_deref(),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if rows.is_empty() => continue,
            Err(e) => bail!("line {}: {e}", i + 1),
        }
    }
    Ok(rows)
}

fn load_design(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let rows: Vec<Vec<f64>> = if is_csv {
        parse_csv_rows(&text)?
    } else {
        let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let m = match v.get("x").or_else(|| v.get("rows")) {
            Some(inner) => inner.clone(),
            None => v,
        };
        serde_json::from_value(m).context("design must be an array of rows")?
    };
    Ok(linmodel::rows_to_matrix(&rows)?)
}

fn check_design(args: CheckDesignArgs) -> Result<ExitCode> {
    let x = load_design(&args.design)?;
    let ball = ball_from(args.q, args.rq, Some(args.s))?;
    let re_mode = if args.exact_re {
        REMode::ExactTiny
    } else {
        REMode::Sampled {
            n_samples: args.samples,
            seed: args.seed,
        }
    };
    let opts = DiagnoseOptions {
        ball,
        c0: args.c0,
        re_mode,
        f_l: if args.f_l == 0.0 {
            ResidualDescriptor::default()
        } else {
            ResidualDescriptor::constant(args.f_l)
        },
        diameter_samples: args.samples,
        seed: args.seed,
    };
    let diag = conditions::diagnose(&x, &opts)?;
    let mut checks = BTreeMap::new();
    checks.insert("re_ordering", diag.re_ordering_ok);
    if let Some(m) = args.max_kappa_c {
        checks.insert("column_normalization", diag.kappa_c <= m);
    }
    if let Some(m) = args.min_kappa_l {
        checks.insert("sparse_spectrum", diag.kappa_l >= m);
    }
    if let Some(m) = args.min_re {
        checks.insert("restricted_eigenvalue", diag.re_constant.value >= m);
    }
    if args.require_kernel_trivial {
        checks.insert("kernel_trivial", diag.kernel_trivial);
    }
    if args.require_ident {
        let ok = diag.kappa_l > 0.0 && conditions::ident_consistency(diag.kappa_l, args.f_l, diag.diam2_estimate)?;
        checks.insert("identifiability", ok);
    }
    let all = checks.values().all(|&b| b);
    emit(
        &json!({ "diagnostics": diag, "assumptions": checks, "all_hold": all }),
        args.output.as_deref(),
    )?;
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn fit_rate(args: FitRateArgs) -> Result<ExitCode> {
    let mut config = harness::ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed_root = seed;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    let exp = harness::run_risk_experiment(&config)?;
    let header = FileHeader {
        config_hash: config.hash(),
        seed_root: config.seed_root,
    };
    if let Some(p) = &args.records {
        persist(Artifact::Records(&exp.records), &header, p, Format::from_path(p))?;
    }
    let fit: RateFitResult = harness::fit_rate_slope(&exp.records, &args.loss, args.predictor.into(), &config.ball)?;
    if let Some(p) = &args.plot {
        harness::write_fit_svg(&fit, &format!("{} risk, {}", args.loss, config.estimator.name()), p)?;
    }
    match &args.output {
        Some(p) => persist(Artifact::Fit(&fit), &header, p, Format::from_path(p))?,
        None => emit(
            &json!({ "header": header, "fit": fit, "excluded_cells": exp.excluded }),
            None,
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn pack(args: PackArgs) -> Result<ExitCode> {
    let packing = hamming_packing(args.d, args.s)?;
    let target = hamming_packing_target(args.d, args.s);
    let hamming_ok = packing.certify();
    let out = match args.delta_n {
        Some(delta) => rescale_hypercube_packing(&packing, delta, args.s)?,
        None => packing.clone(),
    };
    if let Some(p) = &args.output {
        out.write(p)?;
    }
    emit(
        &json!({
            "d": args.d,
            "s": args.s,
            "cardinality": packing.cardinality(),
            "target": target,
            "meets_target": packing.cardinality() as f64 >= target,
            "hamming_certified": hamming_ok,
            "sidecar": out.sidecar(),
        }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn parse_params(text: &str) -> Result<Vec<(String, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').with_context(|| format!("expected k=v, got `{kv}`"))?;
            let v: f64 = v.trim().parse().with_context(|| format!("bad value in `{kv}`"))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn rates(args: RatesArgs) -> Result<ExitCode> {
    let theorem: Theorem = args.theorem.parse()?;
    let mut p = RateParams::new(f64::NAN, f64::NAN, 0.0, f64::NAN);
    let constant_name = match theorem.constant() {
        ConstantKind::Generic(name) => Some(name),
        ConstantKind::Explicit(_) => None,
    };
    for (k, v) in parse_params(&args.params)? {
        match k.as_str() {
            "n" => p.n = v,
            "d" => p.d = v,
            "q" => p.q = v,
            "rq" | "Rq" | "s" | "rq_or_s" | "Rq_or_s" => p.rq_or_s = v,
            "sigma" => p.sigma = v,
            "kappa_c" => p.kappa_c = v,
            "kappa_u" => p.kappa_u = v,
            "kappa_l" => p.kappa_l = v,
            "p" => p.p = v,
            "diam_term" => p.diam_term = v,
            "tau" => p.tau = Some(v),
            other if Some(other) == constant_name || other.starts_with('c') => {
                p.constants.insert(other.to_string(), v);
            }
            other => bail!("unknown parameter `{other}`"),
        }
    }
    if theorem == Theorem::Cor1 && p.d.is_nan() {
        p.d = p.n;
    }
    let constant_used = match theorem.constant() {
        ConstantKind::Explicit(c) => c,
        ConstantKind::Generic(name) => *p.constants.entry(name.to_string()).or_insert(1.0),
    };
    let value = minimax_rate(&RateQuery { theorem, params: p })?;
    let constants_used = match constant_name {
        Some(name) => json!({ name: constant_used }),
        None => json!({ "explicit": constant_used }),
    };
    emit(
        &json!({
            "theorem": theorem.name(),
            "value": value,
            "formula": theorem.formula(),
            "constants_used": constants_used,
        }),
        None,
    )?;
    Ok(ExitCode::SUCCESS)
}

fn counterexample(args: CounterexampleArgs) -> Result<ExitCode> {
    let report = harness::counterexample_scenario()?;
    emit(&report, args.output.as_deref())?;
    Ok(if report.all_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::CheckDesign(a) => check_design(a),
        Command::FitRate(a) => fit_rate(a),
        Command::Pack(a) => pack(a),
        Command::Rates(a) => rates(a),
        Command::Counterexample(a) => counterexample(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
