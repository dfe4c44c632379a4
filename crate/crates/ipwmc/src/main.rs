//! Thin command-line front end over the benchmark harness. Each
//! subcommand resolves its settings from flags, an optional `key = value`
//! configuration file (flags win), and defaults, then delegates to
//! [`ipwmc::harness`].

use clap::{Args, Parser, Subcommand};
use ipwmc::harness::{
    basu, read_config_file, BenchConfig, EstimatorKind, Experiment, HarnessError,
};
use std::collections::HashMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "ipwmc",
    version,
    about = "Weighted-estimator and Monte Carlo integration benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Base seed for all random streams
    #[arg(long)]
    seed: Option<u64>,
    /// Number of replicates
    #[arg(long)]
    reps: Option<usize>,
    /// Output CSV path (companion files derive their names from it)
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` configuration file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = library default)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Clone)]
struct StudyArgs {
    /// Draws per replicate
    #[arg(long)]
    n: Option<usize>,
    /// Population cells
    #[arg(long = "B")]
    b: Option<usize>,
    /// Response probabilities live in [delta, 1 - delta]
    #[arg(long)]
    delta: Option<f64>,
    /// Lower edge of the outcome-probability support
    #[arg(long)]
    theta_lo: Option<f64>,
    /// Upper edge of the outcome-probability support
    #[arg(long)]
    theta_hi: Option<f64>,
    /// Beta hyperprior shape for the posterior-mean estimator
    #[arg(long)]
    alpha_f: Option<f64>,
    /// Bin count for the binned-smoothed estimators
    #[arg(long)]
    k_bins: Option<usize>,
    /// Comma-separated subset of ht,hajek,tt,an,bayes,bs_ht,bs_hajek
    #[arg(long)]
    estimators: Option<String>,
    /// Mixture weight for the tt estimator
    #[arg(long)]
    tt_lambda: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Replicate mean-squared-error study of the missing-data estimators
    SimulateWasserman {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        study: StudyArgs,
    },
    /// Variance-decay slopes for the quadrature schemes
    RateRiemann {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The skewed circus design and its ratio-estimator fix
    DemoBasu {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample-size sweep of empirical moments against predictions
    CheckConsistency {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        study: StudyArgs,
        /// Comma-separated sample sizes to sweep
        #[arg(long)]
        sweep: Option<String>,
        /// Upper-tail offset for the exceedance report
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Vertical-likelihood quadrature on a built-in problem
    Nested {
        #[command(flatten)]
        common: CommonArgs,
        /// Built-in problem name
        #[arg(long)]
        problem: Option<String>,
        /// Interval count of the shrinking grid
        #[arg(long)]
        m: Option<usize>,
        /// Grid scale: levels shrink as exp(-i/K)
        #[arg(long = "K")]
        k: Option<f64>,
    },
    /// Normalizing-constant estimation from a matrix instance
    Semiparam {
        #[command(flatten)]
        common: CommonArgs,
        /// Instance file: header `n k anchor`, then label + k values per row
        #[arg(long)]
        input: Option<PathBuf>,
        /// Built-in instance name (used when no input file is given)
        #[arg(long)]
        builtin: Option<String>,
        /// Convergence tolerance on the relative change per sweep
        #[arg(long)]
        tol: Option<f64>,
        /// Sweep limit before reporting non-convergence
        #[arg(long)]
        max_iter: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::SimulateWasserman { common, study } => {
            let mut cfg = common_config(Experiment::Wasserman, &common)?;
            apply_study_args(&mut cfg, &study, &file_map(&common)?)?;
            cfg.run()
        }
        Command::RateRiemann { common } => common_config(Experiment::RiemannRate, &common)?.run(),
        Command::DemoBasu { common } => {
            let cfg = common_config(Experiment::Basu, &common)?;
            let report = basu::run_basu_demo();
            let text = basu::format_report(&report);
            print!("{text}");
            if let Some(out) = &cfg.out {
                ipwmc::harness::write_lines(out, &[text.trim_end().to_string()])?;
                println!("report -> {}", out.display());
            }
            Ok(())
        }
        Command::CheckConsistency {
            common,
            study,
            sweep,
            eps,
        } => {
            let mut cfg = common_config(Experiment::Consistency, &common)?;
            let file = file_map(&common)?;
            apply_study_args(&mut cfg, &study, &file)?;
            if let Some(raw) = sweep.or_else(|| file.get("sweep").cloned()) {
                cfg.sweep = parse_usize_list(&raw)?;
            }
            cfg.eps = resolve(eps, &file, "eps", cfg.eps)?;
            cfg.run()
        }
        Command::Nested {
            common,
            problem,
            m,
            k,
        } => {
            let mut cfg = common_config(Experiment::Nested, &common)?;
            let file = file_map(&common)?;
            cfg.problem = resolve(problem, &file, "problem", cfg.problem.clone())?;
            cfg.quad_m = resolve(m, &file, "m", cfg.quad_m)?;
            cfg.quad_scale = resolve(k, &file, "k", cfg.quad_scale)?;
            cfg.run()
        }
        Command::Semiparam {
            common,
            input,
            builtin,
            tol,
            max_iter,
        } => {
            let mut cfg = common_config(Experiment::Semiparam, &common)?;
            let file = file_map(&common)?;
            cfg.input = resolve_opt(input, &file, "input")?;
            cfg.builtin = resolve_opt(builtin, &file, "builtin")?;
            cfg.tol = resolve(tol, &file, "tol", cfg.tol)?;
            cfg.max_iter = resolve(max_iter, &file, "max_iter", cfg.max_iter)?;
            cfg.run()
        }
    }
}

fn file_map(common: &CommonArgs) -> Result<HashMap<String, String>, HarnessError> {
    match &common.config {
        Some(path) => read_config_file(path),
        None => Ok(HashMap::new()),
    }
}

fn common_config(experiment: Experiment, common: &CommonArgs) -> Result<BenchConfig, HarnessError> {
    let file = file_map(common)?;
    let mut cfg = BenchConfig::new(experiment);
    cfg.seed = resolve(common.seed, &file, "seed", cfg.seed)?;
    cfg.reps = resolve(common.reps, &file, "reps", cfg.reps)?;
    cfg.threads = resolve(common.threads, &file, "threads", cfg.threads)?;
    cfg.out = resolve_opt(common.out.clone(), &file, "out")?;
    Ok(cfg)
}

fn apply_study_args(
    cfg: &mut BenchConfig,
    study: &StudyArgs,
    file: &HashMap<String, String>,
) -> Result<(), HarnessError> {
    let w = cfg.wasserman.as_mut().expect("study experiments carry settings");
    w.n = resolve(study.n, file, "n", w.n)?;
    w.b_count = resolve(study.b, file, "b", w.b_count)?;
    w.delta = resolve(study.delta, file, "delta", w.delta)?;
    w.theta_lo = resolve(study.theta_lo, file, "theta_lo", w.theta_lo)?;
    w.theta_hi = resolve(study.theta_hi, file, "theta_hi", w.theta_hi)?;
    w.alpha_f = resolve(study.alpha_f, file, "alpha_f", w.alpha_f)?;
    w.k_bins = resolve(study.k_bins, file, "k_bins", w.k_bins)?;
    cfg.tt_lambda = resolve(study.tt_lambda, file, "tt_lambda", cfg.tt_lambda)?;
    if let Some(list) = study
        .estimators
        .clone()
        .or_else(|| file.get("estimators").cloned())
    {
        cfg.estimators = EstimatorKind::parse_list(&list)?;
    }
    Ok(())
}

fn resolve<T>(
    cli: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, HarnessError>
where
    T: FromStr,
    T::Err: Display,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw.parse::<T>().map_err(|e| {
            HarnessError::Config(format!("config key `{key}`: {e} (value `{raw}`)"))
        }),
        None => Ok(default),
    }
}

fn resolve_opt<T>(
    cli: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, HarnessError>
where
    T: FromStr,
    T::Err: Display,
{
    if cli.is_some() {
        return Ok(cli);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| HarnessError::Config(format!("config key `{key}`: {e} (value `{raw}`)"))),
        None => Ok(None),
    }
}

fn parse_usize_list(raw: &str) -> Result<Vec<usize>, HarnessError> {
    raw.split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(|f| {
            f.parse::<usize>()
                .map_err(|e| HarnessError::Config(format!("sweep entry `{f}`: {e}")))
        })
        .collect()
}
