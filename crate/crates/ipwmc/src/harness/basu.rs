//! The circus-herd demonstration: a deliberately skewed one-draw design
//! where inverse-probability weighting produces absurd totals, and the
//! auxiliary ratio estimator does not.

use crate::ipw::{hajek_ratio_total, horvitz_thompson, Estimand, WeightedSample};
use std::fmt::Write;

/// Deterministic 50-elephant herd. One animal ("Sambo", the house pick) is
/// drawn with probability 99/100; each of the other 49, including the giant
/// "Jumbo", with probability 1/4900.
pub struct ElephantHerd {
    weights: Vec<f64>,
    aux: Vec<f64>,
    p: Vec<f64>,
    sambo: usize,
    jumbo: usize,
}

impl ElephantHerd {
    pub fn circus() -> Self {
        // 48 ordinary animals, the representative Sambo, and oversized
        // Jumbo. The auxiliary is exactly half of each weight, standing in
        // for a known prior measurement proportional to the outcome.
        let mut weights: Vec<f64> = (0..48).map(|i| 4000.0 + 25.0 * i as f64).collect();
        let sambo = weights.len();
        weights.push(4600.0);
        let jumbo = weights.len();
        weights.push(7000.0);

        let aux: Vec<f64> = weights.iter().map(|w| w / 2.0).collect();
        let mut p = vec![1.0 / 4900.0; weights.len()];
        p[sambo] = 99.0 / 100.0;
        ElephantHerd {
            weights,
            aux,
            p,
            sambo,
            jumbo,
        }
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn true_total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn sambo_weight(&self) -> f64 {
        self.weights[self.sambo]
    }

    pub fn jumbo_weight(&self) -> f64 {
        self.weights[self.jumbo]
    }

    /// The herd as a weighted sample in which only `drawn` responded.
    pub fn sample_with_draw(&self, drawn: usize) -> WeightedSample {
        let mut r = vec![false; self.size()];
        r[drawn] = true;
        WeightedSample::new(self.weights.clone(), self.p.clone(), r)
            .expect("herd data is valid")
            .with_aux(self.aux.clone())
            .expect("herd auxiliaries are valid")
    }

    pub fn sambo_index(&self) -> usize {
        self.sambo
    }

    pub fn jumbo_index(&self) -> usize {
        self.jumbo
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BasuReport {
    pub herd_size: usize,
    pub true_total: f64,
    pub sambo_weight: f64,
    pub jumbo_weight: f64,
    /// Inverse-probability total when the house pick is drawn
    /// (weight x 100/99, a serious underestimate).
    pub sambo_draw_ht_total: f64,
    /// Inverse-probability total when the giant is drawn (weight x 4900).
    pub jumbo_draw_ht_total: f64,
    /// Auxiliary ratio totals under the same two draws; exact under
    /// proportionality, whatever the design.
    pub sambo_draw_ratio_total: f64,
    pub jumbo_draw_ratio_total: f64,
}

pub fn run_basu_demo() -> BasuReport {
    let herd = ElephantHerd::circus();
    let sambo_sample = herd.sample_with_draw(herd.sambo_index());
    let jumbo_sample = herd.sample_with_draw(herd.jumbo_index());
    BasuReport {
        herd_size: herd.size(),
        true_total: herd.true_total(),
        sambo_weight: herd.sambo_weight(),
        jumbo_weight: herd.jumbo_weight(),
        sambo_draw_ht_total: horvitz_thompson(&sambo_sample, Estimand::Total)
            .expect("valid sample")
            .estimate,
        jumbo_draw_ht_total: horvitz_thompson(&jumbo_sample, Estimand::Total)
            .expect("valid sample")
            .estimate,
        sambo_draw_ratio_total: hajek_ratio_total(&sambo_sample).expect("valid sample"),
        jumbo_draw_ratio_total: hajek_ratio_total(&jumbo_sample).expect("valid sample"),
    }
}

pub fn format_report(r: &BasuReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "circus herd: {} elephants, true total weight {}", r.herd_size, r.true_total);
    let _ = writeln!(
        out,
        "design: house pick drawn with p = 99/100, every other animal with p = 1/4900"
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "inverse-probability total, house pick drawn:  {:>12.3}  (= {} x 100/99)",
        r.sambo_draw_ht_total, r.sambo_weight
    );
    let _ = writeln!(
        out,
        "inverse-probability total, giant drawn:       {:>12.3}  (= {} x 4900)",
        r.jumbo_draw_ht_total, r.jumbo_weight
    );
    let _ = writeln!(
        out,
        "auxiliary ratio total, house pick drawn:      {:>12.3}",
        r.sambo_draw_ratio_total
    );
    let _ = writeln!(
        out,
        "auxiliary ratio total, giant drawn:           {:>12.3}",
        r.jumbo_draw_ratio_total
    );
    out
}
