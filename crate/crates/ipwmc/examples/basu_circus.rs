//! The circus herd: one draw from a deliberately skewed design.
//!
//! The house statistician picks the representative elephant with
//! probability 99/100 and every other animal with probability 1/4900.
//! Inverse-probability weighting then returns weight x 100/99 when the
//! house pick is drawn (a serious underestimate of the herd total) and
//! weight x 4900 when the giant is drawn (an absurdity). The ratio
//! estimator with a proportional auxiliary is immune to the design.

use ipwmc::harness::basu::{format_report, run_basu_demo};

fn main() {
    let report = run_basu_demo();
    print!("{}", format_report(&report));

    println!();
    println!(
        "house-pick draw misses the truth by {:.1}%",
        100.0 * (report.sambo_draw_ht_total - report.true_total) / report.true_total
    );
    println!(
        "giant draw overshoots by a factor of {:.0}",
        report.jumbo_draw_ht_total / report.true_total
    );
    println!(
        "ratio estimator error under either draw: {:.3e}",
        (report.sambo_draw_ratio_total - report.true_total).abs()
            + (report.jumbo_draw_ratio_total - report.true_total).abs()
    );
}
