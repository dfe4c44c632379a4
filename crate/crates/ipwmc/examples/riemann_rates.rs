//! How fast the quadrature estimators' variance decays with the number of
//! points, against the plain Monte Carlo control.
//!
//! Trapezoidal weighting on uniform points decays around n^-5, the left
//! Riemann sum on density-drawn points around n^-3, and the plain average
//! at the standard n^-1: two and four orders of improvement from sorting
//! the draws before summing.

use ipwmc::harness::riemann_rate::{run_riemann_rate_study, RateConfig, RateScheme, SAMPLE_SIZES};

fn main() {
    let study = run_riemann_rate_study(&RateConfig::default()).expect("study runs");

    print!("{:<10}", "n");
    for scheme in RateScheme::ALL {
        print!(" {:>18}", scheme.name());
    }
    println!();
    for &n in &SAMPLE_SIZES {
        print!("{n:<10}");
        for scheme in RateScheme::ALL {
            let v = study
                .points
                .iter()
                .find(|p| p.scheme == scheme && p.n == n)
                .expect("cell present")
                .variance;
            print!(" {v:>18.3e}");
        }
        println!();
    }
    println!();
    for (scheme, slope) in &study.slopes {
        println!("fitted log-log slope, {:<18} {slope:+.3}", scheme.name());
    }
}
