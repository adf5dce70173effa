//! Command-line front end: estimate on data files, run catalog simulation
//! scenarios, and evaluate the theory-side diagnostics.
//!
//! Exit codes: 0 on success, 2 on configuration/input errors, 3 when an
//! estimator fails at runtime.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hellest::baselines::BaselineKind;
use hellest::simlab::{
    self, run_mixture_sweep, run_risk_study, MixtureKind, Scenario, SearchConfig, SCENARIO_NAMES,
};
use hellest::*;

#[derive(Parser)]
#[command(
    name = "hellest",
    about = "Robust parametric density estimation via pairwise Hellinger tests",
    version
)]
struct Cli {
    /// Worker threads for simulation replications (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the parameter of a catalog model from a sample file
    /// (one observation per line).
    Estimate(EstimateArgs),
    /// Run a named simulation scenario (or a JSON run spec) and write CSV
    /// reports.
    Simulate(SimulateArgs),
    /// Evaluate the theory-side diagnostics for a model configuration.
    Theory(TheoryArgs),
    /// List the catalog models and scenario names.
    Models,
}

#[derive(Args)]
struct EstimateArgs {
    /// Catalog model identifier.
    #[arg(long)]
    model: String,
    /// Sample file, one plain-decimal observation per line.
    #[arg(long)]
    data: PathBuf,
    /// Shrink parameter; must lie in (0, kappa_bar).
    #[arg(long)]
    kappa: Option<f64>,
    /// Stopping width(s), comma-separated for multidimensional models.
    #[arg(long)]
    eta: Option<String>,
    /// Grid thinness parameter(s); 0 disables discretization.
    #[arg(long)]
    t: Option<String>,
    /// Radius rule: optimal | geometry | hellinger | parametric.
    #[arg(long)]
    radius_rule: Option<String>,
    /// Recorded in the output for provenance only; estimation itself is
    /// deterministic.
    #[arg(long, env = "HELLEST_SEED")]
    seed: Option<u64>,
    /// Write the full result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name (see `hellest models`), `mixture-uniform`,
    /// `mixture-gauss2d`, or a path to a JSON run spec.
    #[arg(long)]
    scenario: String,
    /// Sample sizes, comma-separated.
    #[arg(long)]
    n: Option<String>,
    /// Replications per sample size.
    #[arg(long)]
    reps: Option<usize>,
    /// Base seed; replication r uses seed base + r.
    #[arg(long, env = "HELLEST_SEED")]
    seed: Option<u64>,
    /// Output directory for CSV reports (created if needed).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid resolution for grid-backed baselines.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Mixture sweeps: number of weight steps between 0 and 1.
    #[arg(long, default_value_t = 20)]
    p_steps: usize,
}

#[derive(Args)]
struct TheoryArgs {
    /// Catalog model identifier.
    #[arg(long)]
    model: String,
    /// Grid thinness parameters (theory mode needs all positive).
    #[arg(long, default_value = "1")]
    t: String,
    #[arg(long)]
    kappa: Option<f64>,
    /// Stopping widths for the test-count bounds.
    #[arg(long)]
    eta: Option<String>,
    /// The unspecified constant inside the logarithms; diagnostic only.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

/// JSON run spec accepted by `simulate --scenario <file>`; command-line
/// flags override file values.
#[derive(Debug, Deserialize)]
struct RunSpec {
    scenario: String,
    n: Option<Vec<usize>>,
    reps: Option<usize>,
    seed: Option<u64>,
    grid_points: Option<usize>,
    kappa: Option<f64>,
    eta: Option<Vec<f64>>,
    t: Option<Vec<f64>>,
    radius_rule: Option<String>,
}

#[derive(Serialize)]
struct EstimateOutput {
    model: String,
    data: PathBuf,
    n: usize,
    seed: Option<u64>,
    theta_hat: Vec<f64>,
    interval_lower: Vec<f64>,
    interval_upper: Vec<f64>,
    test_count: usize,
    radius_rule_fallback: bool,
    config: serde_json::Value,
}

enum CliError {
    Config(String),
    Estimator(String),
}

type CliResult<T> = std::result::Result<T, CliError>;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IterationCapExceeded { .. } | Error::QuadratureNonConvergence { .. } => {
                CliError::Estimator(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

fn parse_f64_list(text: &str, d: usize, what: &str) -> CliResult<Vec<f64>> {
    let v: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let v = v.map_err(|_| CliError::Config(format!("{what}: `{text}` is not a number list")))?;
    if v.len() == 1 && d > 1 {
        return Ok(vec![v[0]; d]);
    }
    if v.len() != d {
        return Err(CliError::Config(format!("{what}: expected {d} comma-separated values")));
    }
    Ok(v)
}

fn apply_1d_overrides(
    c: &mut EstimatorConfig1D,
    kappa: Option<f64>,
    eta: Option<&Vec<f64>>,
    t: Option<&Vec<f64>>,
    rule: Option<&str>,
) -> CliResult<()> {
    if let Some(k) = kappa {
        c.kappa = k;
    }
    if let Some(e) = eta {
        c.eta = e[0];
    }
    if let Some(tv) = t {
        c.t = tv[0];
    }
    if let Some(r) = rule {
        c.radius_rule = match r {
            "optimal" | "geometry" => RadiusRule1D::Optimal,
            "hellinger" => RadiusRule1D::HellingerBased,
            "parametric" => RadiusRule1D::Parametric,
            other => return Err(CliError::Config(format!("unknown radius rule `{other}`"))),
        };
    }
    Ok(())
}

fn apply_md_overrides(
    c: &mut EstimatorConfigMD,
    kappa: Option<f64>,
    eta: Option<&Vec<f64>>,
    t: Option<&Vec<f64>>,
    rule: Option<&str>,
) -> CliResult<()> {
    if let Some(k) = kappa {
        c.kappa = k;
    }
    if let Some(e) = eta {
        c.eta = e.clone();
    }
    if let Some(tv) = t {
        c.t = tv.clone();
    }
    if let Some(r) = rule {
        c.radius_rule = match r {
            "geometry" | "optimal" => RadiusRuleMD::Geometry,
            "hellinger" => RadiusRuleMD::HellingerBased,
            "parametric" => RadiusRuleMD::Parametric,
            other => return Err(CliError::Config(format!("unknown radius rule `{other}`"))),
        };
    }
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult<()> {
    let model = catalog_lookup(&args.model)?;
    if !args.data.exists() {
        return Err(CliError::Config(format!("data file not found: {}", args.data.display())));
    }
    let sample = Sample::from_file(&args.data)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.data.display())))?;
    let d = model.dim();
    let eta = args.eta.as_deref().map(|s| parse_f64_list(s, d, "--eta")).transpose()?;
    let t = args.t.as_deref().map(|s| parse_f64_list(s, d, "--t")).transpose()?;

    let output = if d == 1 {
        let mut config = EstimatorConfig1D::defaults_for(&model);
        config.record_trace = false;
        apply_1d_overrides(&mut config, args.kappa, eta.as_ref(), t.as_ref(), args.radius_rule.as_deref())?;
        config.validate(&model)?;
        let est = estimate_1d(&model, &sample, &config).map_err(estimator_error)?;
        println!("model         {}", model.name());
        println!("n             {}", sample.n());
        println!("theta_hat     {:.10}", est.theta_hat);
        println!("interval      [{:.10}, {:.10}]", est.interval.0, est.interval.1);
        println!("tests         {}", est.trace.test_count);
        if est.radius_rule_fallback {
            println!("note          optimal radii unavailable; used the distance-based rule");
        }
        EstimateOutput {
            model: model.name().into(),
            data: args.data.clone(),
            n: sample.n(),
            seed: args.seed,
            theta_hat: vec![est.theta_hat],
            interval_lower: vec![est.interval.0],
            interval_upper: vec![est.interval.1],
            test_count: est.trace.test_count,
            radius_rule_fallback: est.radius_rule_fallback,
            config: serde_json::to_value(&est.config).expect("config serializes"),
        }
    } else {
        let mut config = EstimatorConfigMD::defaults_for(&model);
        config.record_trace = false;
        apply_md_overrides(&mut config, args.kappa, eta.as_ref(), t.as_ref(), args.radius_rule.as_deref())?;
        config.validate(&model)?;
        let est = estimate_md(&model, &sample, &config).map_err(estimator_error)?;
        println!("model         {}", model.name());
        println!("n             {}", sample.n());
        println!("theta_hat     {:?}", est.theta_hat);
        println!("rectangle     {:?} .. {:?}", est.lower, est.upper);
        println!("tests         {}", est.trace.test_count);
        EstimateOutput {
            model: model.name().into(),
            data: args.data.clone(),
            n: sample.n(),
            seed: args.seed,
            theta_hat: est.theta_hat.clone(),
            interval_lower: est.lower.clone(),
            interval_upper: est.upper.clone(),
            test_count: est.trace.test_count,
            radius_rule_fallback: false,
            config: serde_json::to_value(&est.config).expect("config serializes"),
        }
    };

    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&output).expect("output serializes");
        std::fs::write(path, json).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn estimator_error(e: Error) -> CliError {
    CliError::Estimator(e.to_string())
}

fn parse_usize_list(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("`{text}` is not a list of sample sizes")))
}

fn write_report(dir: Option<&PathBuf>, name: &str, contents: &str) -> CliResult<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{name}.csv"));
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    // Mixture sweeps have their own output shape.
    if args.scenario == "mixture-uniform" || args.scenario == "mixture-gauss2d" {
        let kind = if args.scenario == "mixture-uniform" {
            MixtureKind::Uniform1d
        } else {
            MixtureKind::Gaussian2d
        };
        let steps = args.p_steps.max(1);
        let p_grid: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
        let n = args.n.as_deref().map(parse_usize_list).transpose()?.map_or(100, |v| v[0]);
        let reps = args.reps.unwrap_or(200);
        let seed = args.seed.unwrap_or(1);
        let sweep = run_mixture_sweep(kind, &p_grid, n, reps, seed).map_err(estimator_error)?;
        println!("{:<8} {:>12} {:>12} {:>12}", "p", "risk_ours", "risk_mle", "h2_model");
        for r in &sweep.rows {
            println!("{:<8.3} {:>12.4e} {:>12.4e} {:>12.4e}", r.p, r.risk_ours, r.risk_mle, r.h2_model);
        }
        write_report(args.out.as_ref(), &args.scenario, &sweep.to_csv())?;
        return Ok(());
    }

    // Either a named scenario or a JSON run spec file.
    let spec: Option<RunSpec> = if Path::new(&args.scenario).is_file() {
        let text = std::fs::read_to_string(&args.scenario)
            .map_err(|e| CliError::Config(format!("{}: {e}", args.scenario)))?;
        Some(
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", args.scenario)))?,
        )
    } else {
        None
    };
    let name = spec.as_ref().map(|s| s.scenario.clone()).unwrap_or_else(|| args.scenario.clone());
    let mut scenario = Scenario::by_name(&name).map_err(|_| {
        CliError::Config(format!(
            "unknown scenario `{name}`; known: {}, mixture-uniform, mixture-gauss2d",
            SCENARIO_NAMES.join(", ")
        ))
    })?;

    if let Some(spec) = &spec {
        if let Some(n) = &spec.n {
            scenario.n_list = n.clone();
        }
        if let Some(reps) = spec.reps {
            scenario.replications = reps;
        }
        if let Some(seed) = spec.seed {
            scenario.base_seed = seed;
        }
        if let Some(g) = spec.grid_points {
            scenario.grid_points = g;
        }
        match &mut scenario.config {
            SearchConfig::OneD(c) => {
                apply_1d_overrides(c, spec.kappa, spec.eta.as_ref(), spec.t.as_ref(), spec.radius_rule.as_deref())?
            }
            SearchConfig::MultiD(c) => {
                apply_md_overrides(c, spec.kappa, spec.eta.as_ref(), spec.t.as_ref(), spec.radius_rule.as_deref())?
            }
        }
    }
    if let Some(n) = args.n.as_deref() {
        scenario.n_list = parse_usize_list(n)?;
    }
    if let Some(reps) = args.reps {
        scenario.replications = reps;
    }
    if let Some(seed) = args.seed {
        scenario.base_seed = seed;
    }
    if let Some(g) = args.grid_points {
        scenario.grid_points = g;
    }
    scenario.validate()?;

    let report = run_risk_study(&scenario).map_err(estimator_error)?;
    print!("{}", report.summary_table());
    write_report(args.out.as_ref(), &scenario.name, &report.to_csv())?;
    Ok(())
}

fn cmd_theory(args: &TheoryArgs) -> CliResult<()> {
    let model = catalog_lookup(&args.model)?;
    let d = model.dim();
    let t = parse_f64_list(&args.t, d, "--t")?;
    let kappa = args.kappa.unwrap_or_else(|| 0.5 * kappa_bar());
    let eta = match args.eta.as_deref() {
        Some(s) => parse_f64_list(s, d, "--eta")?,
        None => (0..d).map(|j| model.rect().width(j) * 1e-8).collect(),
    };
    let bundle = diagnostics::compute_theory_bundle(&model, &t, kappa, &eta, args.c)?;
    println!("model         {}", model.name());
    println!("alpha_bar     {:.12}", bundle.alpha_bar);
    println!("d_f           {:.6}  (c = {})", bundle.d_f, bundle.c);
    if let Some(v) = bundle.d_f_1d {
        println!("d_f (1-d form) {v:.6}");
    }
    if let Some(b) = bundle.bound_1d {
        println!("test bound 1d {b:.1}");
    }
    println!("test bound md {:.1}", bundle.bound_md);
    Ok(())
}

fn cmd_models() {
    println!("catalog models:");
    for name in CATALOG_NAMES {
        let m = catalog_lookup(name).expect("catalog builds");
        let rect: Vec<String> = (0..m.dim())
            .map(|j| format!("[{}, {}]", m.rect().lower(j), m.rect().upper(j)))
            .collect();
        println!("  {:<18} d={} theta in {}", name, m.dim(), rect.join(" x "));
    }
    println!("scenarios:");
    for s in SCENARIO_NAMES {
        println!("  {s}");
    }
    println!("  mixture-uniform");
    println!("  mixture-gauss2d");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Models => {
            cmd_models();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Estimator(msg)) => {
            eprintln!("estimator failure: {msg}");
            ExitCode::from(3)
        }
    }
}
