//! Variance-decay study for the quadrature estimators: how fast the
//! replicate variance shrinks with the number of points, per sampling
//! scheme, summarized as a fitted log-log slope.

use super::{with_threads, write_lines, HarnessError};
use crate::evidence::problems::{by_name, TestProblem};
use crate::evidence::{is_estimate, riemann_estimate, trapezoid_estimate, ISDraws};
use crate::stream::RandomStream;
use crate::summary::SummaryAccumulator;
use rayon::prelude::*;
use std::path::Path;

/// Doubling grid of point counts, `2^5 ..= 2^12`.
pub const SAMPLE_SIZES: [usize; 8] = [32, 64, 128, 256, 512, 1024, 2048, 4096];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateScheme {
    /// Trapezoidal weighted Monte Carlo on uniform points (the fast rate).
    UniformTrapezoid,
    /// Left Riemann sum on points drawn from the target density.
    DensityRiemann,
    /// Plain Monte Carlo average, the standard-rate control.
    PlainMonteCarlo,
}

impl RateScheme {
    pub const ALL: [RateScheme; 3] = [
        RateScheme::UniformTrapezoid,
        RateScheme::DensityRiemann,
        RateScheme::PlainMonteCarlo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RateScheme::UniformTrapezoid => "uniform-trapezoid",
            RateScheme::DensityRiemann => "iid-density",
            RateScheme::PlainMonteCarlo => "plain-mc",
        }
    }

    fn problem(&self) -> TestProblem {
        let name = match self {
            RateScheme::UniformTrapezoid | RateScheme::PlainMonteCarlo => "quadratic-uniform",
            RateScheme::DensityRiemann => "triangular-unnormalized",
        };
        by_name(name).expect("built-in problem")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RatePoint {
    pub scheme: RateScheme,
    pub n: usize,
    pub variance: f64,
}

#[derive(Clone, Debug)]
pub struct RateStudy {
    pub points: Vec<RatePoint>,
    /// Ordinary least-squares slope of `ln variance` against `ln n`.
    pub slopes: Vec<(RateScheme, f64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct RateConfig {
    pub seed: u64,
    /// Replicates per `(scheme, n)` cell.
    pub reps: usize,
    pub threads: usize,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            seed: 1,
            reps: 200,
            threads: 0,
        }
    }
}

fn one_estimate(
    scheme: RateScheme,
    problem: &TestProblem,
    n: usize,
    stream: &mut RandomStream,
) -> Result<f64, HarnessError> {
    match scheme {
        RateScheme::UniformTrapezoid => {
            let pts: Vec<f64> = (0..n).map(|_| stream.uniform01()).collect();
            Ok(trapezoid_estimate(&pts, problem.problem())?)
        }
        RateScheme::DensityRiemann => {
            let pts: Vec<f64> = (0..n)
                .map(|_| problem.sample_density(stream).expect("built-in has a sampler"))
                .collect();
            Ok(riemann_estimate(&pts, problem.problem())?)
        }
        RateScheme::PlainMonteCarlo => {
            let draws = ISDraws::sample(problem.problem(), n, stream)?;
            Ok(is_estimate(problem.problem(), &draws)?)
        }
    }
}

/// Runs every scheme over [`SAMPLE_SIZES`], estimating the replicate
/// variance per cell and fitting one slope per scheme. Cell `(scheme s,
/// size i, replicate r)` always uses stream id `(s * sizes + i) * reps + r`.
pub fn run_riemann_rate_study(cfg: &RateConfig) -> Result<RateStudy, HarnessError> {
    if cfg.reps < 2 {
        return Err(HarnessError::Config(
            "variance estimation needs at least 2 replicates".into(),
        ));
    }
    let cells: Vec<(usize, RateScheme, usize, usize)> = RateScheme::ALL
        .iter()
        .enumerate()
        .flat_map(|(si, &scheme)| {
            SAMPLE_SIZES
                .iter()
                .enumerate()
                .map(move |(ni, &n)| (si, scheme, ni, n))
        })
        .collect();

    let points: Vec<RatePoint> = with_threads(cfg.threads, || {
        cells
            .into_par_iter()
            .map(|(si, scheme, ni, n)| {
                let problem = scheme.problem();
                let mut acc = SummaryAccumulator::new();
                for rep in 0..cfg.reps {
                    let id = ((si * SAMPLE_SIZES.len() + ni) * cfg.reps + rep) as u64;
                    let mut stream = RandomStream::new(cfg.seed, id);
                    acc.push(one_estimate(scheme, &problem, n, &mut stream)?);
                }
                Ok(RatePoint {
                    scheme,
                    n,
                    variance: acc.variance(),
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    })??;

    let slopes = RateScheme::ALL
        .iter()
        .map(|&scheme| {
            let cells: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.scheme == scheme)
                .map(|p| ((p.n as f64).ln(), p.variance.ln()))
                .collect();
            (scheme, ols_slope(&cells))
        })
        .collect();
    Ok(RateStudy { points, slopes })
}

fn ols_slope(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    let x_bar = xy.iter().map(|(x, _)| x).sum::<f64>() / n;
    let y_bar = xy.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let sxx: f64 = xy.iter().map(|(x, _)| (x - x_bar) * (x - x_bar)).sum();
    sxy / sxx
}

pub fn write_points_csv(study: &RateStudy, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(study.points.len() + 1);
    lines.push("scheme,n,variance".to_string());
    for p in &study.points {
        lines.push(format!("{},{},{}", p.scheme.name(), p.n, p.variance));
    }
    write_lines(path, &lines)
}

pub fn write_slopes_csv(study: &RateStudy, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(study.slopes.len() + 1);
    lines.push("scheme,slope".to_string());
    for (scheme, slope) in &study.slopes {
        lines.push(format!("{},{}", scheme.name(), slope));
    }
    write_lines(path, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ols_slope_recovers_exact_lines() {
        let xy: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert_relative_eq!(ols_slope(&xy), -2.0, max_relative = 1e-12);
    }

    #[test]
    fn variances_shrink_with_sample_size() {
        let cfg = RateConfig {
            seed: 3,
            reps: 40,
            threads: 0,
        };
        let study = run_riemann_rate_study(&cfg).unwrap();
        for scheme in RateScheme::ALL {
            let vars: Vec<f64> = study
                .points
                .iter()
                .filter(|p| p.scheme == scheme)
                .map(|p| p.variance)
                .collect();
            assert_eq!(vars.len(), SAMPLE_SIZES.len());
            assert!(
                vars.first().unwrap() > vars.last().unwrap(),
                "{} variance did not shrink",
                scheme.name()
            );
        }
    }

    #[test]
    fn study_is_schedule_independent() {
        let a = run_riemann_rate_study(&RateConfig {
            seed: 5,
            reps: 10,
            threads: 1,
        })
        .unwrap();
        let b = run_riemann_rate_study(&RateConfig {
            seed: 5,
            reps: 10,
            threads: 3,
        })
        .unwrap();
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert_eq!(pa.scheme, pb.scheme);
            assert_eq!(pa.n, pb.n);
            assert_eq!(pa.variance.to_bits(), pb.variance.to_bits());
        }
    }
}
