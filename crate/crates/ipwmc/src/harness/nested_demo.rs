//! Vertical-likelihood quadrature demo: refinement sweep of the
//! exponential-grid estimate toward a built-in problem's analytic value.

use super::{write_lines, HarnessError};
use crate::evidence::problems;
use crate::evidence::nested_quadrature;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct NestedConfig {
    /// Built-in problem name.
    pub problem: String,
    /// Final (largest) interval count.
    pub m: usize,
    /// Grid scale: levels shrink as `exp(-i / k_scale)`.
    pub k_scale: f64,
}

impl Default for NestedConfig {
    fn default() -> Self {
        NestedConfig {
            problem: "linear-uniform".into(),
            m: 500,
            k_scale: 50.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NestedRow {
    pub m: usize,
    pub estimate: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug)]
pub struct NestedReport {
    pub problem: String,
    pub true_value: f64,
    pub k_scale: f64,
    /// Refinement ladder ending at the configured `m`.
    pub rows: Vec<NestedRow>,
}

const LADDER: [usize; 10] = [10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10_000];

pub fn run_nested_demo(cfg: &NestedConfig) -> Result<NestedReport, HarnessError> {
    if cfg.m == 0 {
        return Err(HarnessError::Config("m must be positive".into()));
    }
    let tp = problems::by_name(&cfg.problem).ok_or_else(|| {
        HarnessError::Config(format!(
            "unknown problem `{}` (expected one of {})",
            cfg.problem,
            problems::NAMES.join(",")
        ))
    })?;
    let survival = tp.survival().ok_or_else(|| {
        HarnessError::Config(format!(
            "problem `{}` has no closed-form survival function",
            cfg.problem
        ))
    })?;

    let mut ms: Vec<usize> = LADDER.iter().copied().filter(|&m| m < cfg.m).collect();
    ms.push(cfg.m);
    let mut rows = Vec::with_capacity(ms.len());
    for m in ms {
        let estimate = nested_quadrature(survival, m, cfg.k_scale)?;
        rows.push(NestedRow {
            m,
            estimate,
            abs_error: (estimate - tp.true_value()).abs(),
        });
    }
    Ok(NestedReport {
        problem: tp.name().to_string(),
        true_value: tp.true_value(),
        k_scale: cfg.k_scale,
        rows,
    })
}

pub fn write_csv(report: &NestedReport, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(report.rows.len() + 1);
    lines.push("m,estimate,abs_error".to_string());
    for r in &report.rows {
        lines.push(format!("{},{},{}", r.m, r.estimate, r.abs_error));
    }
    write_lines(path, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_hits_the_linear_answer() {
        let report = run_nested_demo(&NestedConfig::default()).unwrap();
        let last = report.rows.last().unwrap();
        assert_eq!(last.m, 500);
        assert!(last.abs_error < 0.01, "error {}", last.abs_error);
    }

    #[test]
    fn unknown_problem_is_a_config_error() {
        let cfg = NestedConfig {
            problem: "no-such".into(),
            ..NestedConfig::default()
        };
        assert!(matches!(
            run_nested_demo(&cfg),
            Err(HarnessError::Config(_))
        ));
    }
}
