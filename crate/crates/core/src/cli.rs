//! The `esskit` command line.
//!
//! Exit status is 0 on success, 2 on usage errors (unknown command, flag or
//! method specifier) and 1 on domain errors, which print a one-line
//! `error: <Kind>: <message>` diagnostic to stderr.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::ess_metrics::EssMethod;
use crate::exec::{configure_threads_from_env, Execution};
use crate::io::{
    provenance_header, read_error_curve, read_sweep, read_weights, write_sweep, SUMMARY_HEADER,
};
use crate::is_harness::{
    arithmetic_grid, fit_linear_combo, optimal_beta, pair_collision_mean_trials, sweep_with,
    RateTable, SweepConfig, VarianceCenter, Vary,
};
use crate::model_select::{effective_components, env_index, Direction, ErrorCurve};
use crate::numeric::{fmt_sig, parse_extended};
use crate::properties::classify;

#[derive(Debug, Parser)]
#[command(name = "esskit", version, about = "Generalized effective sample size toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ESS table for a weights file.
    Compute {
        #[arg(long)]
        weights: PathBuf,
        /// Method specifier: hr:<beta|inf>, ts:<alpha>, lp:<p>, plus, q, gini, env, gol.
        #[arg(long = "method", required = true, value_parser = parse_method)]
        methods: Vec<EssMethod>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check conditions C1-C5 and classify.
    PropertyCheck {
        #[arg(long = "method", required = true, value_parser = parse_method)]
        methods: Vec<EssMethod>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write one CSV row per (method, condition).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Importance-sampling sweep over the proposal mean.
    SweepMean(SweepArgs),
    /// Importance-sampling sweep over the proposal standard deviation.
    SweepSigma(SweepArgs),
    /// Best beta from a sweep CSV.
    OptimalBeta {
        #[arg(long)]
        sweep: PathBuf,
    },
    /// Least-squares a1 ESS-H^(2) + a2 ESS-H^(inf) from a sweep CSV.
    FitCombo {
        #[arg(long)]
        sweep: PathBuf,
    },
    /// Simulated mean pair-collision trials against 1 / sum w^2.
    CollisionOracle {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
    },
    /// Effective number of components from a non-increasing error curve.
    ModelSelect {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "method", required = true, value_parser = parse_method)]
        methods: Vec<EssMethod>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Center {
    /// Sample variance around the empirical mean.
    Variance,
    /// Mean squared error around the true value 0.
    Mse,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// key=value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid_start: Option<f64>,
    #[arg(long)]
    grid_end: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    beta_start: Option<f64>,
    #[arg(long)]
    beta_end: Option<f64>,
    #[arg(long)]
    beta_step: Option<f64>,
    /// Leave beta = inf out of the grid.
    #[arg(long)]
    no_inf: bool,
    #[arg(long, value_enum)]
    center: Option<Center>,
    /// Long-format output CSV [default: sweep_<mean|sigma>.csv].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV [default: summary.csv next to --out].
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

fn parse_method(s: &str) -> std::result::Result<EssMethod, String> {
    s.parse::<EssMethod>().map_err(|e| e.to_string())
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit status.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    configure_threads_from_env();
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {}", e.kind(), e);
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Compute { weights, methods, out: path } => compute(&weights, &methods, path.as_deref(), out),
        Command::PropertyCheck { methods, n, trials, seed, csv, sequential } => {
            property_check(&methods, n, trials, seed, csv.as_deref(), exec_of(sequential), out)
        }
        Command::SweepMean(args) => run_sweep(Vary::Mean, args, out),
        Command::SweepSigma(args) => run_sweep(Vary::Sigma, args, out),
        Command::OptimalBeta { sweep } => {
            let table = load_sweep(&sweep)?;
            writeln!(out, "beta_star\n{}", fmt_sig(optimal_beta(&table)?))?;
            Ok(())
        }
        Command::FitCombo { sweep } => {
            let fit = fit_linear_combo(&load_sweep(&sweep)?)?;
            writeln!(out, "a1,a2,residual\n{},{},{}", fmt_sig(fit.a1), fmt_sig(fit.a2), fmt_sig(fit.residual_l2))?;
            Ok(())
        }
        Command::CollisionOracle { weights, r, seed, sequential } => {
            let w = read_weights(BufReader::new(File::open(&weights)?))?.into_normalized()?;
            let est = pair_collision_mean_trials(&w, r, seed, exec_of(sequential))?;
            writeln!(out, "{}", provenance_header(Some(seed), &format!("weights={};r={r}", weights.display())))?;
            writeln!(out, "mean,std_error,expected,z_score,experiments")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig(est.mean),
                fmt_sig(est.std_error),
                fmt_sig(est.expected),
                fmt_sig(est.z_score()),
                est.experiments
            )?;
            Ok(())
        }
        Command::ModelSelect { curve, methods } => {
            let values = read_error_curve(BufReader::new(File::open(&curve)?))?;
            let curve = ErrorCurve::new(values, Direction::NonIncreasing)?;
            writeln!(
                out,
                "# n={}, shift={}, env_index={}",
                curve.n(),
                fmt_sig(curve.anchor_shift()),
                fmt_sig(env_index(&curve)?)
            )?;
            writeln!(out, "method,raw,rounded")?;
            for m in methods {
                let ec = effective_components(&curve, m)?;
                writeln!(out, "{m},{},{}", fmt_sig(ec.raw), ec.rounded)?;
            }
            Ok(())
        }
    }
}

fn exec_of(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn compute(weights: &Path, methods: &[EssMethod], path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let w = read_weights(BufReader::new(File::open(weights)?))?.into_normalized()?;
    let mut table = String::from("method,value,rate\n");
    for m in methods {
        let v = m.evaluate(&w)?;
        table.push_str(&format!("{m},{},{}\n", fmt_sig(v.value), fmt_sig(v.rate)));
    }
    out.write_all(table.as_bytes())?;
    if let Some(p) = path {
        let mut f = create(p)?;
        writeln!(f, "{}", provenance_header(None, &format!("weights={};n={}", weights.display(), w.n())))?;
        f.write_all(table.as_bytes())?;
        f.flush()?;
    }
    Ok(())
}

fn property_check(
    methods: &[EssMethod],
    n: usize,
    trials: usize,
    seed: u64,
    csv: Option<&Path>,
    exec: Execution,
    out: &mut dyn Write,
) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSize("property checks need n >= 2".into()));
    }
    let mut rows = Vec::new();
    for (i, m) in methods.iter().enumerate() {
        let (_, report) = classify(m, n, trials, seed, exec);
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "{report}")?;
        rows.extend(report.csv_rows());
    }
    if let Some(p) = csv {
        let mut f = create(p)?;
        writeln!(f, "{}", provenance_header(Some(seed), &format!("n={n};trials={trials}")))?;
        writeln!(f, "method,n,condition,result,detail")?;
        for r in rows {
            writeln!(f, "{r}")?;
        }
        f.flush()?;
    }
    Ok(())
}

fn load_sweep(path: &Path) -> Result<RateTable> {
    read_sweep(BufReader::new(File::open(path)?))
}

/// Values read from a `key=value` config file. Unknown keys are errors.
#[derive(Debug, Default, Clone, PartialEq)]
struct FileConfig {
    n_samples: Option<usize>,
    replications: Option<usize>,
    seed: Option<u64>,
    grid_start: Option<f64>,
    grid_end: Option<f64>,
    grid_step: Option<f64>,
    beta_start: Option<f64>,
    beta_end: Option<f64>,
    beta_step: Option<f64>,
    include_inf: Option<bool>,
    center: Option<VarianceCenter>,
}

fn parse_config(text: &str) -> Result<FileConfig> {
    let mut c = FileConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::InvalidInput(format!("config line {}: {what}", lineno + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let (key, value) = (key.trim(), value.trim());
        let real = || parse_extended(value).ok_or_else(|| bad(&format!("bad number '{value}'")));
        let int = || value.parse::<u64>().map_err(|_| bad(&format!("bad integer '{value}'")));
        match key {
            "n_samples" => c.n_samples = Some(int()? as usize),
            "replications" => c.replications = Some(int()? as usize),
            "seed" => c.seed = Some(int()?),
            "grid_start" => c.grid_start = Some(real()?),
            "grid_end" => c.grid_end = Some(real()?),
            "grid_step" => c.grid_step = Some(real()?),
            "beta_start" => c.beta_start = Some(real()?),
            "beta_end" => c.beta_end = Some(real()?),
            "beta_step" => c.beta_step = Some(real()?),
            "include_inf" => {
                c.include_inf = Some(match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(bad(&format!("bad boolean '{value}'"))),
                })
            }
            "center" => {
                c.center = Some(match value {
                    "variance" => VarianceCenter::EmpiricalMean,
                    "mse" => VarianceCenter::TrueValue,
                    _ => return Err(bad(&format!("center must be variance or mse, got '{value}'"))),
                })
            }
            _ => return Err(bad(&format!("unknown key '{key}'"))),
        }
    }
    Ok(c)
}

fn positive_step(step: f64, what: &str) -> Result<f64> {
    if step > 0.0 && step.is_finite() {
        Ok(step)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {step}")))
    }
}

fn build_sweep_config(vary: Vary, args: &SweepArgs) -> Result<(SweepConfig, String)> {
    let file = match &args.config {
        Some(p) => parse_config(&std::fs::read_to_string(p)?)?,
        None => FileConfig::default(),
    };
    let (g0, g1, gs) = match vary {
        Vary::Mean => (0.0, 2.0, 0.1),
        Vary::Sigma => (0.5, 1.0, 0.025),
    };
    let grid_start = args.grid_start.or(file.grid_start).unwrap_or(g0);
    let grid_end = args.grid_end.or(file.grid_end).unwrap_or(g1);
    let grid_step = positive_step(args.grid_step.or(file.grid_step).unwrap_or(gs), "grid_step")?;
    let beta_start = args.beta_start.or(file.beta_start).unwrap_or(0.2);
    let beta_end = args.beta_end.or(file.beta_end).unwrap_or(50.0);
    let beta_step = positive_step(args.beta_step.or(file.beta_step).unwrap_or(0.01), "beta_step")?;
    let include_inf = !args.no_inf && file.include_inf.unwrap_or(true);
    if grid_end < grid_start || beta_end < beta_start {
        return Err(Error::InvalidParameter("grid end precedes grid start".into()));
    }

    let mut config = SweepConfig::default_for(vary);
    config.grid = arithmetic_grid(grid_start, grid_end, grid_step);
    config.beta_grid = arithmetic_grid(beta_start, beta_end, beta_step);
    // The combination fit needs the beta = 2 column.
    if !config.beta_grid.iter().any(|&b| (b - 2.0).abs() < 1e-9) {
        let at = config.beta_grid.partition_point(|&b| b < 2.0);
        config.beta_grid.insert(at, 2.0);
    }
    if include_inf {
        config.beta_grid.push(f64::INFINITY);
    }
    if let Some(n) = args.n_samples.or(file.n_samples) {
        config.n_samples = n;
    }
    if let Some(r) = args.replications.or(file.replications) {
        config.replications = r;
    }
    if let Some(s) = args.seed.or(file.seed) {
        config.seed = s;
    }
    config.center = match args.center {
        Some(Center::Variance) => VarianceCenter::EmpiricalMean,
        Some(Center::Mse) => VarianceCenter::TrueValue,
        None => file.center.unwrap_or_default(),
    };
    config.validate(vary)?;

    let center = match config.center {
        VarianceCenter::EmpiricalMean => "variance",
        VarianceCenter::TrueValue => "mse",
    };
    let summary = format!(
        "vary={};n_samples={};replications={};grid={}:{}:{};beta={}:{}:{}{};center={}",
        vary.name(),
        config.n_samples,
        config.replications,
        fmt_sig(grid_start),
        fmt_sig(grid_step),
        fmt_sig(grid_end),
        fmt_sig(beta_start),
        fmt_sig(beta_step),
        fmt_sig(beta_end),
        if include_inf { "+inf" } else { "" },
        center
    );
    Ok((config, summary))
}

fn run_sweep(vary: Vary, args: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let (config, description) = build_sweep_config(vary, &args)?;
    let out_path = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("sweep_{}.csv", vary.name())));
    let summary_path = args.summary.clone().unwrap_or_else(|| match out_path.parent() {
        Some(dir) => dir.join("summary.csv"),
        None => PathBuf::from("summary.csv"),
    });
    let result = sweep_with(&config, vary, exec_of(args.sequential))?;
    let header = provenance_header(Some(config.seed), &description);
    let mut f = create(&out_path)?;
    write_sweep(&mut f, &result, &header)?;
    f.flush()?;

    let beta_star = optimal_beta(&result.rates)?;
    let fit = fit_linear_combo(&result.rates)?;
    let row = format!(
        "{},{},{},{}",
        fmt_sig(beta_star),
        fmt_sig(fit.a1),
        fmt_sig(fit.a2),
        fmt_sig(fit.residual_l2)
    );
    let mut s = create(&summary_path)?;
    writeln!(s, "{header}\n{SUMMARY_HEADER}\n{row}")?;
    s.flush()?;
    writeln!(out, "{SUMMARY_HEADER}\n{row}")?;
    Ok(())
}
