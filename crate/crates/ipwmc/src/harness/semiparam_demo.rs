//! Built-in instances for the normalizing-constant solver and the runner
//! behind the CLI subcommand.

use super::{write_lines, HarnessError};
use crate::semiparam::{
    deming_stephan_residuals, ips_solve, SemiparamData, SemiparamInstance,
};
use std::path::Path;

pub const BUILTIN_NAMES: [&str; 3] = ["hand-k2", "symmetric-pair", "three-sampler"];

/// Builds a named test instance.
pub fn builtin_instance(name: &str) -> Option<SemiparamInstance> {
    match name {
        // Small asymmetric two-sampler design with a nontrivial ratio.
        "hand-k2" => Some(SemiparamInstance {
            data: SemiparamData::new(
                vec![1, 1, 1, 2, 2, 2],
                vec![
                    vec![1.0, 0.2],
                    vec![2.0, 1.0],
                    vec![0.5, 1.5],
                    vec![1.0, 3.0],
                    vec![1.5, 0.5],
                    vec![0.8, 1.0],
                ],
                2,
            )
            .expect("valid built-in"),
            anchor: 1,
        }),
        // Identical functions and balanced counts: the ratio must be one.
        "symmetric-pair" => Some(SemiparamInstance {
            data: SemiparamData::new(
                vec![1, 1, 2, 2],
                vec![
                    vec![1.0, 1.0],
                    vec![0.25, 0.25],
                    vec![2.0, 2.0],
                    vec![0.7, 0.7],
                ],
                2,
            )
            .expect("valid built-in"),
            anchor: 1,
        }),
        // Three samplers over a shared grid of thirty points.
        "three-sampler" => {
            let n = 30;
            let mut labels = Vec::with_capacity(n);
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                labels.push(i / 10 + 1);
                let x = (i + 1) as f64 / n as f64;
                rows.push(vec![1.0, 2.0 * x, 3.0 * x * x]);
            }
            Some(SemiparamInstance {
                data: SemiparamData::new(labels, rows, 3).expect("valid built-in"),
                anchor: 1,
            })
        }
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct SemiparamReport {
    pub anchor: usize,
    pub psi_hat: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Largest deviation of the rescaled array's per-sampler totals.
    pub sampler_residual: f64,
    /// Largest deviation of the per-point totals from one.
    pub point_residual: f64,
}

pub fn run_semiparam(
    instance: &SemiparamInstance,
    tol: f64,
    max_iter: usize,
) -> Result<SemiparamReport, HarnessError> {
    let sol = ips_solve(&instance.data, instance.anchor, tol, max_iter)?;
    let (sampler_residual, point_residual) = deming_stephan_residuals(&instance.data, &sol);
    Ok(SemiparamReport {
        anchor: sol.anchor(),
        psi_hat: sol.psi_hat().to_vec(),
        iterations: sol.iterations(),
        residual: sol.residual(),
        sampler_residual,
        point_residual,
    })
}

pub fn write_csv(report: &SemiparamReport, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(report.psi_hat.len() + 1);
    lines.push("sampler,psi_hat".to_string());
    for (r, psi) in report.psi_hat.iter().enumerate() {
        lines.push(format!("{},{}", r + 1, psi));
    }
    write_lines(path, &lines)
}
