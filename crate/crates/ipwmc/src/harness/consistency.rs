//! Sample-size sweep on one fixed population: empirical moments of the
//! plug-in and posterior-mean estimators against their predicted values,
//! the inverse-probability variance bound, and the reported tail
//! exceedance.

use super::{with_threads, write_lines, HarnessError};
use crate::stream::RandomStream;
use crate::summary::SummaryAccumulator;
use crate::wasserman::{
    bayes_li, delta_moments, generate_population, hoeffding_tail_bound, ht_wasserman,
    simulate_draws, WassermanConfig,
};
use rayon::prelude::*;
use std::path::Path;

#[derive(Clone, Debug)]
pub struct ConsistencyConfig {
    pub wasserman: WassermanConfig,
    /// Sample sizes to sweep at the fixed population.
    pub sweep: Vec<usize>,
    pub seed: u64,
    /// Replicates per sweep point.
    pub reps: usize,
    /// Offset for the upper-tail exceedance report.
    pub eps: f64,
    pub threads: usize,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        ConsistencyConfig {
            wasserman: WassermanConfig::default(),
            sweep: vec![100, 1000, 10_000],
            seed: 1,
            reps: 2000,
            eps: 0.1,
            threads: 0,
        }
    }
}

/// One sweep point. `*_pred` columns are the moment approximations,
/// `ht_var_bound` is `1/(n delta^2)`, and the exceedance pair reports the
/// upper-tail frequency of the posterior mean against its claimed bound.
#[derive(Clone, Copy, Debug)]
pub struct ConsistencyRow {
    pub n: usize,
    pub psi: f64,
    pub ht_bias: f64,
    pub ht_var: f64,
    pub ht_var_pred: f64,
    pub ht_var_bound: f64,
    pub bayes_bias: f64,
    pub bayes_var: f64,
    pub bayes_var_pred: f64,
    pub bayes_mean_pred: f64,
    pub li_exceed_freq: f64,
    pub li_exceed_bound: f64,
}

/// Runs the sweep. The population is drawn once from stream id 0; sweep
/// point `i`, replicate `r` uses stream id `1 + i * reps + r`.
pub fn run_consistency_check(
    cfg: &ConsistencyConfig,
) -> Result<Vec<ConsistencyRow>, HarnessError> {
    cfg.wasserman.validate()?;
    if cfg.reps < 2 {
        return Err(HarnessError::Config(
            "variance estimation needs at least 2 replicates".into(),
        ));
    }
    if cfg.sweep.is_empty() {
        return Err(HarnessError::Config("empty sample-size sweep".into()));
    }
    if cfg.eps <= 0.0 || cfg.eps.is_nan() {
        return Err(HarnessError::Config(format!(
            "eps must be positive, got {}",
            cfg.eps
        )));
    }

    let mut seed_stream = RandomStream::new(cfg.seed, 0);
    let pop = generate_population(&cfg.wasserman, &mut seed_stream)?;
    let psi = pop.psi();

    let mut rows = Vec::with_capacity(cfg.sweep.len());
    for (i, &n) in cfg.sweep.iter().enumerate() {
        if n == 0 {
            return Err(HarnessError::Config("sweep sizes must be positive".into()));
        }
        let estimates: Vec<(f64, f64)> = with_threads(cfg.threads, || {
            (0..cfg.reps)
                .into_par_iter()
                .map(|rep| {
                    let id = 1 + (i * cfg.reps + rep) as u64;
                    let mut stream = RandomStream::new(cfg.seed, id);
                    let draws = simulate_draws(&pop, n, &mut stream)?;
                    Ok((
                        ht_wasserman(&draws, &pop)?,
                        bayes_li(&draws, cfg.wasserman.alpha_f)?,
                    ))
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        })??;

        let mut ht_acc = SummaryAccumulator::new();
        let mut bayes_acc = SummaryAccumulator::new();
        let mut exceed = 0usize;
        for &(ht, bayes) in &estimates {
            ht_acc.push(ht);
            bayes_acc.push(bayes);
            if bayes >= psi + cfg.eps {
                exceed += 1;
            }
        }
        let pred = delta_moments(&pop, n);
        rows.push(ConsistencyRow {
            n,
            psi,
            ht_bias: ht_acc.mean() - psi,
            ht_var: ht_acc.variance(),
            ht_var_pred: pred.v_ht,
            ht_var_bound: 1.0 / (n as f64 * cfg.wasserman.delta * cfg.wasserman.delta),
            bayes_bias: bayes_acc.mean() - psi,
            bayes_var: bayes_acc.variance(),
            bayes_var_pred: pred.v_bayes,
            bayes_mean_pred: pred.e_bayes,
            li_exceed_freq: exceed as f64 / cfg.reps as f64,
            li_exceed_bound: hoeffding_tail_bound(n, cfg.wasserman.delta, psi, cfg.eps),
        });
    }
    Ok(rows)
}

pub fn write_csv(rows: &[ConsistencyRow], path: &Path) -> Result<(), HarnessError> {
    let mut lines = Vec::with_capacity(rows.len() + 1);
    lines.push(
        "n,psi,ht_bias,ht_var,ht_var_pred,ht_var_bound,bayes_bias,bayes_var,bayes_var_pred,\
         bayes_mean_pred,li_exceed_freq,li_exceed_bound"
            .to_string(),
    );
    for r in rows {
        lines.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.psi,
            r.ht_bias,
            r.ht_var,
            r.ht_var_pred,
            r.ht_var_bound,
            r.bayes_bias,
            r.bayes_var,
            r.bayes_var_pred,
            r.bayes_mean_pred,
            r.li_exceed_freq,
            r.li_exceed_bound
        ));
    }
    write_lines(path, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_rows_carry_predictions_and_bounds() {
        let cfg = ConsistencyConfig {
            wasserman: WassermanConfig {
                b_count: 200,
                ..WassermanConfig::default()
            },
            sweep: vec![50, 200],
            seed: 4,
            reps: 400,
            eps: 0.1,
            threads: 0,
        };
        let rows = run_consistency_check(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.ht_var <= row.ht_var_bound);
            assert!(row.bayes_var < row.ht_var);
            assert!(row.li_exceed_freq <= 1.0);
            assert!(row.bayes_var_pred > 0.0);
        }
        // Fixed population across the sweep.
        assert_eq!(rows[0].psi, rows[1].psi);
    }

    #[test]
    fn sweep_is_schedule_independent() {
        let base = ConsistencyConfig {
            wasserman: WassermanConfig {
                b_count: 100,
                ..WassermanConfig::default()
            },
            sweep: vec![60],
            seed: 9,
            reps: 100,
            eps: 0.05,
            threads: 1,
        };
        let mut wide = base.clone();
        wide.threads = 4;
        let a = run_consistency_check(&base).unwrap();
        let b = run_consistency_check(&wide).unwrap();
        assert_eq!(a[0].ht_var.to_bits(), b[0].ht_var.to_bits());
        assert_eq!(a[0].bayes_var.to_bits(), b[0].bayes_var.to_bits());
    }
}
