//! Named built-in test problems with known answers.
//!
//! Each entry bundles the integrand/density/proposal triple with the
//! analytic value of the integral, a sampler for the target density, and
//! the closed-form survival function where one exists. The harness and the
//! examples address these by name.

use super::{Domain, IntegrandProblem, Proposal, SampleFn, SurvivalFunction};
use crate::stream::RandomStream;

/// A registry entry: a problem plus its ground truth.
pub struct TestProblem {
    name: &'static str,
    summary: &'static str,
    problem: IntegrandProblem,
    true_value: f64,
    density_sampler: Option<SampleFn>,
    survival: Option<SurvivalFunction>,
}

impl TestProblem {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn summary(&self) -> &'static str {
        self.summary
    }

    pub fn problem(&self) -> &IntegrandProblem {
        &self.problem
    }

    /// Analytic value of `∫ l dF` with `F` the normalized target.
    pub fn true_value(&self) -> f64 {
        self.true_value
    }

    /// Draws one point from the normalized target density, when the
    /// problem ships a direct sampler for it.
    pub fn sample_density(&self, stream: &mut RandomStream) -> Option<f64> {
        self.density_sampler.as_ref().map(|s| s(stream))
    }

    pub fn has_density_sampler(&self) -> bool {
        self.density_sampler.is_some()
    }

    /// Closed-form survival function of the integrand under the target.
    pub fn survival(&self) -> Option<&SurvivalFunction> {
        self.survival.as_ref()
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 3] = [
    "linear-uniform",
    "quadratic-uniform",
    "triangular-unnormalized",
];

/// Builds a registry problem by name.
pub fn by_name(name: &str) -> Option<TestProblem> {
    let uniform_proposal = || Proposal::new(|_| 1.0, |s: &mut RandomStream| s.uniform01());
    let unit = Domain::Interval { lo: 0.0, hi: 1.0 };
    match name {
        "linear-uniform" => Some(TestProblem {
            name: "linear-uniform",
            summary: "l(x) = x under the uniform density on [0, 1]; value 1/2",
            problem: IntegrandProblem::new(|x| x, |_| 1.0, true, uniform_proposal(), unit)
                .expect("valid built-in"),
            true_value: 0.5,
            density_sampler: Some(Box::new(|s: &mut RandomStream| s.uniform01())),
            survival: Some(
                SurvivalFunction::new(|lam: f64| (1.0 - lam).clamp(0.0, 1.0), 1.0)
                    .expect("valid built-in"),
            ),
        }),
        "quadratic-uniform" => Some(TestProblem {
            name: "quadratic-uniform",
            summary: "l(x) = x^2 under the uniform density on [0, 1]; value 1/3",
            problem: IntegrandProblem::new(|x| x * x, |_| 1.0, true, uniform_proposal(), unit)
                .expect("valid built-in"),
            true_value: 1.0 / 3.0,
            density_sampler: Some(Box::new(|s: &mut RandomStream| s.uniform01())),
            survival: Some(
                SurvivalFunction::new(|lam: f64| (1.0 - lam.max(0.0).sqrt()).max(0.0), 1.0)
                    .expect("valid built-in"),
            ),
        }),
        "triangular-unnormalized" => Some(TestProblem {
            name: "triangular-unnormalized",
            summary: "l(x) = x with unnormalized density 2x on [0, 1], \
                      uniform proposal; value 2/3",
            problem: IntegrandProblem::new(
                |x| x,
                |x: f64| 2.0 * x,
                false,
                uniform_proposal(),
                unit,
            )
            .expect("valid built-in"),
            true_value: 2.0 / 3.0,
            density_sampler: Some(Box::new(|s: &mut RandomStream| s.uniform01().sqrt())),
            survival: Some(
                SurvivalFunction::new(|lam: f64| (1.0 - lam * lam).clamp(0.0, 1.0), 1.0)
                    .expect("valid built-in"),
            ),
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evidence::{is_estimate, riemann_estimate, snis_estimate, ISDraws};
    use approx::assert_abs_diff_eq;

    #[test]
    fn registry_knows_its_names() {
        for name in NAMES {
            assert!(by_name(name).is_some(), "missing {name}");
        }
        assert!(by_name("no-such-problem").is_none());
    }

    #[test]
    fn built_in_true_values_are_recovered() {
        for name in NAMES {
            let tp = by_name(name).unwrap();
            let mut s = RandomStream::new(60, 0);
            let draws = ISDraws::sample(tp.problem(), 40_000, &mut s).unwrap();
            let l_vals = draws.integrand_values(tp.problem());
            let est = if tp.problem().is_density_normalized() {
                is_estimate(tp.problem(), &draws).unwrap()
            } else {
                snis_estimate(&draws, &l_vals).unwrap()
            };
            assert_abs_diff_eq!(est, tp.true_value(), epsilon = 0.02);
        }
    }

    #[test]
    fn density_samplers_match_densities() {
        // Riemann sum over points drawn from the target density recovers
        // the integral of l * density.
        let tp = by_name("triangular-unnormalized").unwrap();
        let mut s = RandomStream::new(61, 0);
        let pts: Vec<f64> = (0..20_000)
            .map(|_| tp.sample_density(&mut s).unwrap())
            .collect();
        let est = riemann_estimate(&pts, tp.problem()).unwrap();
        assert_abs_diff_eq!(est, tp.true_value(), epsilon = 5e-3);
    }

    #[test]
    fn survival_functions_integrate_to_true_values() {
        for name in NAMES {
            let tp = by_name(name).unwrap();
            let z = tp.survival().unwrap();
            let est = crate::evidence::nested_quadrature(z, 2000, 200.0).unwrap();
            assert_abs_diff_eq!(est, tp.true_value(), epsilon = 5e-3);
        }
    }
}
