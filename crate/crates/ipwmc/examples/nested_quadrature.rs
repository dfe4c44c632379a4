//! Vertical-likelihood integration: rewrite the integral through the
//! survival function of the integrand and apply quadrature on the
//! exponentially shrinking level grid a_i = exp(-i/K).

use ipwmc::evidence::problems::{by_name, NAMES};
use ipwmc::evidence::{lambda_inverse, nested_quadrature};

fn main() {
    println!("exponential-grid quadrature with m = 500 intervals, K = 50");
    println!();
    println!("{:<26} {:>10} {:>12} {:>10}", "problem", "true", "estimate", "error");
    for name in NAMES {
        let tp = by_name(name).expect("built-in problem");
        let z = tp.survival().expect("built-ins carry survival functions");
        let est = nested_quadrature(z, 500, 50.0).expect("valid grid");
        println!(
            "{:<26} {:>10.6} {:>12.6} {:>10.2e}",
            tp.name(),
            tp.true_value(),
            est,
            (est - tp.true_value()).abs()
        );
    }

    // The level inverse behind the quadrature, on the linear problem.
    let tp = by_name("linear-uniform").unwrap();
    let z = tp.survival().unwrap();
    println!();
    println!("level inverse on linear-uniform (analytically 1 - a):");
    for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
        println!(
            "  Lambda({a:.2}) = {:.12}",
            lambda_inverse(z, a).expect("valid level")
        );
    }

    println!();
    println!("refinement at fixed K = 50 on linear-uniform:");
    for m in [10, 50, 100, 200, 500, 1000] {
        let est = nested_quadrature(z, m, 50.0).unwrap();
        println!("  m = {m:<5} estimate {est:.6}  error {:.2e}", (est - 0.5).abs());
    }
}
