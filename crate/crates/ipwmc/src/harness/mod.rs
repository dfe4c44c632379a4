//! Experiment orchestration: configuration, replicate scheduling, CSV
//! emission, and the entry points behind the CLI subcommands.
//!
//! Every experiment is deterministic under `(seed, config)`: replicate `r`
//! always runs on stream id `r`, results are gathered in replicate order,
//! and output files are byte-identical across reruns and worker counts.

pub mod basu;
pub mod consistency;
pub mod nested_demo;
pub mod riemann_rate;
pub mod semiparam_demo;
pub mod wasserman_study;

use crate::evidence::EvidenceError;
use crate::ipw::IpwError;
use crate::semiparam::SemiparamError;
use crate::wasserman::{WassermanConfig, WassermanError};
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Wasserman(#[from] WassermanError),
    #[error(transparent)]
    Ipw(#[from] IpwError),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
    #[error(transparent)]
    Semiparam(#[from] SemiparamError),
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Which benchmark a [`BenchConfig`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Wasserman,
    RiemannRate,
    Basu,
    Consistency,
    Nested,
    Semiparam,
}

/// Estimators selectable for the replicate study.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    Ht,
    Hajek,
    Bayes,
    BsHt,
    BsHajek,
    Tt,
    An,
}

impl EstimatorKind {
    /// Canonical evaluation and output order.
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Ht,
        EstimatorKind::Hajek,
        EstimatorKind::Tt,
        EstimatorKind::An,
        EstimatorKind::Bayes,
        EstimatorKind::BsHt,
        EstimatorKind::BsHajek,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Ht => "ht",
            EstimatorKind::Hajek => "hajek",
            EstimatorKind::Bayes => "bayes",
            EstimatorKind::BsHt => "bs_ht",
            EstimatorKind::BsHajek => "bs_hajek",
            EstimatorKind::Tt => "tt",
            EstimatorKind::An => "an",
        }
    }

    pub fn parse(name: &str) -> Option<EstimatorKind> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Parses a comma-separated list into canonical order, rejecting
    /// unknown names.
    pub fn parse_list(list: &str) -> Result<Vec<EstimatorKind>, HarnessError> {
        let mut selected = Vec::new();
        for field in list.split(',') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let kind = Self::parse(field).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown estimator `{field}` (expected one of {})",
                    Self::ALL.map(|k| k.name()).join(",")
                ))
            })?;
            if !selected.contains(&kind) {
                selected.push(kind);
            }
        }
        if selected.is_empty() {
            return Err(HarnessError::Config("no estimators selected".into()));
        }
        let mut ordered: Vec<EstimatorKind> =
            Self::ALL.into_iter().filter(|k| selected.contains(k)).collect();
        ordered.dedup();
        Ok(ordered)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Resolved settings for one experiment run. Fields irrelevant to the
/// selected experiment keep their defaults.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub reps: usize,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub wasserman: Option<WassermanConfig>,
    pub estimators: Vec<EstimatorKind>,
    pub tt_lambda: f64,
    /// Sample sizes swept by the consistency check.
    pub sweep: Vec<usize>,
    /// Exceedance offset for the tail-bound report.
    pub eps: f64,
    /// Built-in problem name for the quadrature demo.
    pub problem: String,
    pub quad_m: usize,
    pub quad_scale: f64,
    /// Instance file for the normalizing-constant solver.
    pub input: Option<PathBuf>,
    /// Built-in instance name (used when no input file is given).
    pub builtin: Option<String>,
    pub tol: f64,
    pub max_iter: usize,
}

impl BenchConfig {
    pub fn new(experiment: Experiment) -> Self {
        BenchConfig {
            experiment,
            seed: 1,
            reps: match experiment {
                Experiment::RiemannRate => 200,
                Experiment::Consistency => 2000,
                _ => 100,
            },
            threads: 0,
            out: None,
            wasserman: Some(WassermanConfig::default()),
            estimators: vec![
                EstimatorKind::Ht,
                EstimatorKind::Hajek,
                EstimatorKind::Bayes,
                EstimatorKind::BsHajek,
            ],
            tt_lambda: 0.5,
            sweep: vec![100, 1000, 10_000],
            eps: 0.1,
            problem: "linear-uniform".into(),
            quad_m: 500,
            quad_scale: 50.0,
            input: None,
            builtin: None,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.reps == 0 {
            return Err(HarnessError::Config("reps must be at least 1".into()));
        }
        match self.experiment {
            Experiment::Wasserman | Experiment::Consistency => {
                let w = self
                    .wasserman
                    .as_ref()
                    .ok_or_else(|| HarnessError::Config("missing study settings".into()))?;
                w.validate()?;
                if self.estimators.is_empty() {
                    return Err(HarnessError::Config("no estimators selected".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Runs the configured experiment, printing a report to stdout and
    /// writing CSV files when an output path is set.
    pub fn run(&self) -> Result<(), HarnessError> {
        self.validate()?;
        match self.experiment {
            Experiment::Wasserman => self.run_wasserman(),
            Experiment::RiemannRate => self.run_rate(),
            Experiment::Basu => {
                let report = basu::run_basu_demo();
                print!("{}", basu::format_report(&report));
                Ok(())
            }
            Experiment::Consistency => self.run_consistency(),
            Experiment::Nested => self.run_nested(),
            Experiment::Semiparam => self.run_semiparam(),
        }
    }

    fn run_wasserman(&self) -> Result<(), HarnessError> {
        let cfg = wasserman_study::StudyConfig {
            wasserman: self.wasserman.expect("validated"),
            estimators: self.estimators.clone(),
            seed: self.seed,
            reps: self.reps,
            tt_lambda: self.tt_lambda,
            threads: self.threads,
        };
        let study = wasserman_study::run_wasserman_study(&cfg)?;
        println!("estimator  reps  mse_mean      mse_sd        mse_se");
        for s in &study.summaries {
            println!(
                "{:<9}  {:>4}  {:<12.6e}  {:<12.6e}  {:<12.6e}",
                s.estimator.name(),
                s.reps,
                s.mse_mean,
                s.mse_sd,
                s.mse_se
            );
        }
        if let Some(out) = &self.out {
            wasserman_study::write_raw_csv(&study, out)?;
            let summary = summary_path(out);
            wasserman_study::write_summary_csv(&study, &summary)?;
            println!("raw replicates -> {}", out.display());
            println!("summaries      -> {}", summary.display());
        }
        Ok(())
    }

    fn run_rate(&self) -> Result<(), HarnessError> {
        let cfg = riemann_rate::RateConfig {
            seed: self.seed,
            reps: self.reps,
            threads: self.threads,
        };
        let study = riemann_rate::run_riemann_rate_study(&cfg)?;
        println!("scheme             slope");
        for (scheme, slope) in &study.slopes {
            println!("{:<17}  {:+.4}", scheme.name(), slope);
        }
        if let Some(out) = &self.out {
            riemann_rate::write_points_csv(&study, out)?;
            let slopes = summary_path(out);
            riemann_rate::write_slopes_csv(&study, &slopes)?;
            println!("variance table -> {}", out.display());
            println!("fitted slopes  -> {}", slopes.display());
        }
        Ok(())
    }

    fn run_consistency(&self) -> Result<(), HarnessError> {
        let cfg = consistency::ConsistencyConfig {
            wasserman: self.wasserman.expect("validated"),
            sweep: self.sweep.clone(),
            seed: self.seed,
            reps: self.reps,
            eps: self.eps,
            threads: self.threads,
        };
        let rows = consistency::run_consistency_check(&cfg)?;
        println!("n      ht_var      bound(1/(n d^2))  bayes_var   eq17_pred   exceed  exceed_bound");
        for row in &rows {
            println!(
                "{:<6} {:<10.4e}  {:<16.4e}  {:<10.4e}  {:<10.4e}  {:<6.4}  {:<.4}",
                row.n,
                row.ht_var,
                row.ht_var_bound,
                row.bayes_var,
                row.bayes_var_pred,
                row.li_exceed_freq,
                row.li_exceed_bound
            );
        }
        if let Some(out) = &self.out {
            consistency::write_csv(&rows, out)?;
            println!("sweep table -> {}", out.display());
        }
        Ok(())
    }

    fn run_nested(&self) -> Result<(), HarnessError> {
        let cfg = nested_demo::NestedConfig {
            problem: self.problem.clone(),
            m: self.quad_m,
            k_scale: self.quad_scale,
        };
        let report = nested_demo::run_nested_demo(&cfg)?;
        println!(
            "problem {} (true value {})",
            report.problem, report.true_value
        );
        println!("m       estimate      abs_error");
        for row in &report.rows {
            println!("{:<7} {:<12.8}  {:<.3e}", row.m, row.estimate, row.abs_error);
        }
        if let Some(out) = &self.out {
            nested_demo::write_csv(&report, out)?;
            println!("refinement table -> {}", out.display());
        }
        Ok(())
    }

    fn run_semiparam(&self) -> Result<(), HarnessError> {
        let instance = match (&self.input, &self.builtin) {
            (Some(path), _) => crate::semiparam::load_instance(path)?,
            (None, Some(name)) => semiparam_demo::builtin_instance(name).ok_or_else(|| {
                HarnessError::Config(format!(
                    "unknown built-in instance `{name}` (expected one of {})",
                    semiparam_demo::BUILTIN_NAMES.join(",")
                ))
            })?,
            (None, None) => semiparam_demo::builtin_instance("hand-k2").expect("known name"),
        };
        let report = semiparam_demo::run_semiparam(&instance, self.tol, self.max_iter)?;
        println!(
            "converged in {} sweeps (residual {:.3e}, anchor {})",
            report.iterations, report.residual, report.anchor
        );
        println!("sampler  psi_hat");
        for (r, psi) in report.psi_hat.iter().enumerate() {
            println!("{:<7}  {}", r + 1, psi);
        }
        println!(
            "scaling totals off by {:.3e} (samplers), {:.3e} (points)",
            report.sampler_residual, report.point_residual
        );
        if let Some(out) = &self.out {
            semiparam_demo::write_csv(&report, out)?;
            println!("constants -> {}", out.display());
        }
        Ok(())
    }
}

/// Summary/companion file next to a raw output path: the extension is
/// replaced by `summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = the global
/// default pool).
pub fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> T + Send,
) -> Result<T, HarnessError> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Threads(e.to_string()))?;
    Ok(pool.install(f))
}

/// Writes lines with a trailing newline, surfacing the path on failure.
pub fn write_lines(path: &Path, lines: &[String]) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    for line in lines {
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Parses a `key = value` configuration file. Keys are lowercased and
/// dashes fold to underscores; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                idx + 1
            )));
        };
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_list_parsing_normalizes_order() {
        let list = EstimatorKind::parse_list("bayes, ht,bs_hajek").unwrap();
        assert_eq!(
            list,
            vec![EstimatorKind::Ht, EstimatorKind::Bayes, EstimatorKind::BsHajek]
        );
        assert!(EstimatorKind::parse_list("ht,bogus").is_err());
        assert!(EstimatorKind::parse_list("").is_err());
    }

    #[test]
    fn config_file_parsing() {
        let dir = std::env::temp_dir().join("ipwmc-config-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bench.conf");
        fs::write(
            &path,
            "# comment\nseed = 9\ntheta-lo = 0.1   # inline comment\nB = 500\n\n",
        )
        .unwrap();
        let map = read_config_file(&path).unwrap();
        assert_eq!(map.get("seed").map(String::as_str), Some("9"));
        assert_eq!(map.get("theta_lo").map(String::as_str), Some("0.1"));
        assert_eq!(map.get("b").map(String::as_str), Some("500"));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn summary_path_replaces_extension() {
        assert_eq!(
            summary_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.summary.csv")
        );
    }
}
