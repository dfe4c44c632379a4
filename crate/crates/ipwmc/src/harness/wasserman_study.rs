//! Replicate study comparing the missing-data estimators on freshly drawn
//! populations, paired so every estimator sees the identical dataset.

use super::{with_threads, write_lines, EstimatorKind, HarnessError};
use crate::ipw::{self, Estimand};
use crate::stream::RandomStream;
use crate::summary::SummaryAccumulator;
use crate::wasserman::{
    bayes_li, bin_partition, bs_hajek, bs_ht, generate_population, ht_wasserman, induced_sample,
    simulate_draws, WassermanConfig,
};
use rayon::prelude::*;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub wasserman: WassermanConfig,
    pub estimators: Vec<EstimatorKind>,
    pub seed: u64,
    pub reps: usize,
    /// Fixed mixture weight used when the `tt` estimator is selected.
    pub tt_lambda: f64,
    pub threads: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            wasserman: WassermanConfig::default(),
            estimators: vec![
                EstimatorKind::Ht,
                EstimatorKind::Hajek,
                EstimatorKind::Bayes,
                EstimatorKind::BsHajek,
            ],
            seed: 1,
            reps: 100,
            tt_lambda: 0.5,
            threads: 0,
        }
    }
}

/// One estimator evaluation on one replicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub estimator: EstimatorKind,
    pub replicate: usize,
    pub estimate: f64,
    pub true_psi: f64,
    pub sq_error: f64,
}

impl ReplicateRecord {
    pub fn new(estimator: EstimatorKind, replicate: usize, estimate: f64, true_psi: f64) -> Self {
        let err = estimate - true_psi;
        ReplicateRecord {
            estimator,
            replicate,
            estimate,
            true_psi,
            sq_error: err * err,
        }
    }
}

/// Per-estimator squared-error aggregates. `mse_sd` is the standard
/// deviation of the per-replicate squared errors and `mse_se` its standard
/// error, so either reading of a reported spread can be compared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub reps: usize,
    pub mse_mean: f64,
    pub mse_sd: f64,
    pub mse_se: f64,
}

#[derive(Clone, Debug)]
pub struct WassermanStudy {
    pub records: Vec<ReplicateRecord>,
    pub summaries: Vec<EstimatorSummary>,
}

/// Runs the paired replicate study. Replicate `r` draws a fresh population
/// and dataset from stream id `r`; all selected estimators are evaluated on
/// that same dataset; records come back in `(replicate, estimator)` order
/// regardless of how many workers ran them.
pub fn run_wasserman_study(cfg: &StudyConfig) -> Result<WassermanStudy, HarnessError> {
    cfg.wasserman.validate()?;
    if cfg.reps == 0 {
        return Err(HarnessError::Config("reps must be at least 1".into()));
    }
    let estimators: Vec<EstimatorKind> = EstimatorKind::ALL
        .into_iter()
        .filter(|k| cfg.estimators.contains(k))
        .collect();
    if estimators.is_empty() {
        return Err(HarnessError::Config("no estimators selected".into()));
    }

    let per_replicate = |rep: usize| -> Result<Vec<ReplicateRecord>, HarnessError> {
        let mut stream = RandomStream::new(cfg.seed, rep as u64);
        let pop = generate_population(&cfg.wasserman, &mut stream)?;
        let draws = simulate_draws(&pop, cfg.wasserman.n, &mut stream)?;
        let psi = pop.psi();

        let needs_sample = estimators
            .iter()
            .any(|k| matches!(k, EstimatorKind::Hajek | EstimatorKind::Tt | EstimatorKind::An));
        let sample = if needs_sample {
            Some(induced_sample(&draws, &pop)?)
        } else {
            None
        };
        let needs_bins = estimators
            .iter()
            .any(|k| matches!(k, EstimatorKind::BsHt | EstimatorKind::BsHajek));
        let part = if needs_bins {
            Some(bin_partition(
                &draws,
                &pop,
                cfg.wasserman.k_bins,
                cfg.wasserman.delta,
            )?)
        } else {
            None
        };

        let mut records = Vec::with_capacity(estimators.len());
        for &kind in &estimators {
            let estimate = match kind {
                EstimatorKind::Ht => ht_wasserman(&draws, &pop)?,
                EstimatorKind::Hajek => {
                    ipw::hajek(sample.as_ref().expect("prepared"), Estimand::Mean)?.estimate
                }
                EstimatorKind::Tt => {
                    ipw::trotter_tukey(
                        sample.as_ref().expect("prepared"),
                        cfg.tt_lambda,
                        Estimand::Mean,
                    )?
                    .estimate
                }
                EstimatorKind::An => {
                    ipw::adaptive_normalization(sample.as_ref().expect("prepared"), Estimand::Mean)?
                        .estimate
                }
                EstimatorKind::Bayes => bayes_li(&draws, cfg.wasserman.alpha_f)?,
                EstimatorKind::BsHt => bs_ht(&draws, part.as_ref().expect("prepared"))?,
                EstimatorKind::BsHajek => bs_hajek(&draws, part.as_ref().expect("prepared"))?,
            };
            records.push(ReplicateRecord::new(kind, rep, estimate, psi));
        }
        Ok(records)
    };

    let nested: Vec<Vec<ReplicateRecord>> = with_threads(cfg.threads, || {
        (0..cfg.reps)
            .into_par_iter()
            .map(per_replicate)
            .collect::<Result<Vec<_>, _>>()
    })??;
    let records: Vec<ReplicateRecord> = nested.into_iter().flatten().collect();
    let summaries = summarize(&records, &estimators);
    Ok(WassermanStudy { records, summaries })
}

/// Aggregates per-replicate squared errors per estimator, in the given
/// estimator order.
pub fn summarize(
    records: &[ReplicateRecord],
    estimators: &[EstimatorKind],
) -> Vec<EstimatorSummary> {
    estimators
        .iter()
        .map(|&kind| {
            let acc: SummaryAccumulator = records
                .iter()
                .filter(|r| r.estimator == kind)
                .map(|r| r.sq_error)
                .collect();
            EstimatorSummary {
                estimator: kind,
                reps: acc.count() as usize,
                mse_mean: acc.mean(),
                mse_sd: acc.sd(),
                mse_se: acc.standard_error(),
            }
        })
        .collect()
}

pub fn write_raw_csv(study: &WassermanStudy, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(study.records.len() + 1);
    lines.push("estimator,replicate,estimate,true_psi,sq_error".to_string());
    for r in &study.records {
        lines.push(format!(
            "{},{},{},{},{}",
            r.estimator.name(),
            r.replicate,
            r.estimate,
            r.true_psi,
            r.sq_error
        ));
    }
    write_lines(path, &lines)
}

pub fn write_summary_csv(study: &WassermanStudy, path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(study.summaries.len() + 1);
    lines.push("estimator,reps,mse_mean,mse_sd,mse_se".to_string());
    for s in &study.summaries {
        lines.push(format!(
            "{},{},{},{},{}",
            s.estimator.name(),
            s.reps,
            s.mse_mean,
            s.mse_sd,
            s.mse_se
        ));
    }
    write_lines(path, &lines)
}
