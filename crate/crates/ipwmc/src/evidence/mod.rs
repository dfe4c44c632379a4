//! Monte Carlo evidence estimation on one-dimensional problems: importance
//! sampling with self-normalized, regression, difference, and adaptively
//! normalized variants, Riemann-sum estimators over sorted points, and
//! vertical-likelihood quadrature through the survival function of the
//! integrand.
//!
//! See [`problems`] for the named built-in test problems the harness and
//! examples run against.

pub mod problems;

use crate::stream::RandomStream;
use thiserror::Error;

/// Boxed scalar function used for integrands, densities, and survival
/// functions.
pub type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;
/// Boxed sampler drawing one point from a stream.
pub type SampleFn = Box<dyn Fn(&mut RandomStream) -> f64 + Send + Sync>;

#[derive(Debug, Error, PartialEq)]
pub enum EvidenceError {
    #[error("at least one draw is required")]
    Empty,
    #[error("sequence lengths differ: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight {value} at index {index} must be non-negative and finite")]
    InvalidWeight { index: usize, value: f64 },
    #[error("importance weights sum to zero")]
    DegenerateWeights,
    #[error("mixture weight {lambda} makes the denominator vanish")]
    DegenerateMix { lambda: f64 },
    #[error("Riemann estimation needs a bounded domain")]
    UnboundedDomain,
    #[error("point {value} lies outside the problem domain")]
    PointOutsideDomain { value: f64 },
    #[error("grid has fewer than two distinct points")]
    DegenerateGrid,
    #[error("proposal density vanished at sampled point {point}")]
    SupportViolation { point: f64 },
    #[error("invalid survival function: {0}")]
    InvalidSurvival(String),
    #[error("quantile level {0} must lie strictly inside (0, 1)")]
    InvalidLevel(f64),
    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}

/// Integration region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Interval { lo: f64, hi: f64 },
    Unbounded,
}

/// Proposal distribution: a density evaluator paired with a sampler.
pub struct Proposal {
    density: RealFn,
    sampler: SampleFn,
}

impl Proposal {
    pub fn new<D, S>(density: D, sampler: S) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        S: Fn(&mut RandomStream) -> f64 + Send + Sync + 'static,
    {
        Proposal {
            density: Box::new(density),
            sampler: Box::new(sampler),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        (self.sampler)(stream)
    }
}

/// A target integral `∫ l(x) f(x) dx` together with the proposal used to
/// sample it.
///
/// `density_normalized = false` marks `f` as known only up to a constant;
/// only the self-normalizing estimators are meaningful then.
pub struct IntegrandProblem {
    integrand: RealFn,
    density: RealFn,
    density_normalized: bool,
    proposal: Proposal,
    domain: Domain,
}

impl IntegrandProblem {
    pub fn new<L, F>(
        integrand: L,
        density: F,
        density_normalized: bool,
        proposal: Proposal,
        domain: Domain,
    ) -> Result<Self, EvidenceError>
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if let Domain::Interval { lo, hi } = domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(EvidenceError::InvalidDomain(format!(
                    "interval [{lo}, {hi}] must be finite with lo < hi"
                )));
            }
        }
        Ok(IntegrandProblem {
            integrand: Box::new(integrand),
            density: Box::new(density),
            density_normalized,
            proposal,
            domain,
        })
    }

    pub fn integrand_at(&self, x: f64) -> f64 {
        (self.integrand)(x)
    }

    pub fn density_at(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn is_density_normalized(&self) -> bool {
        self.density_normalized
    }

    pub fn proposal(&self) -> &Proposal {
        &self.proposal
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
}

/// Points drawn from the proposal with their importance weights
/// `w_i = f(y_i) / g(y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ISDraws {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ISDraws {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self, EvidenceError> {
        if weights.len() != points.len() {
            return Err(EvidenceError::LengthMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(EvidenceError::InvalidWeight { index: i, value: w });
            }
        }
        Ok(ISDraws { points, weights })
    }

    /// Draws `n` points from the problem's proposal and attaches weights.
    pub fn sample(
        prob: &IntegrandProblem,
        n: usize,
        stream: &mut RandomStream,
    ) -> Result<Self, EvidenceError> {
        if n == 0 {
            return Err(EvidenceError::Empty);
        }
        let mut points = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            let y = prob.proposal().sample(stream);
            let g = prob.proposal().density(y);
            if g <= 0.0 || g.is_nan() {
                return Err(EvidenceError::SupportViolation { point: y });
            }
            points.push(y);
            weights.push(prob.density_at(y) / g);
        }
        Self::new(points, weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrand evaluated at every draw.
    pub fn integrand_values(&self, prob: &IntegrandProblem) -> Vec<f64> {
        self.points.iter().map(|&x| prob.integrand_at(x)).collect()
    }
}

/// Plain importance sampling: `(1/n) sum l(y_i) w_i`.
///
/// With `f = g` the weights are one and this is the empirical average of
/// the integrand.
pub fn is_estimate(prob: &IntegrandProblem, draws: &ISDraws) -> Result<f64, EvidenceError> {
    if draws.is_empty() {
        return Err(EvidenceError::Empty);
    }
    let total: f64 = draws
        .points()
        .iter()
        .zip(draws.weights())
        .map(|(&y, &w)| prob.integrand_at(y) * w)
        .sum();
    Ok(total / draws.len() as f64)
}

/// Self-normalized importance sampling: `sum l w / sum w`.
///
/// Invariant to positive rescaling of the density, so it works with
/// unnormalized targets.
pub fn snis_estimate(draws: &ISDraws, l_vals: &[f64]) -> Result<f64, EvidenceError> {
    check_values(draws, l_vals)?;
    let num: f64 = l_vals
        .iter()
        .zip(draws.weights())
        .map(|(&l, &w)| l * w)
        .sum();
    let den: f64 = draws.weights().iter().sum();
    if den == 0.0 {
        return Err(EvidenceError::DegenerateWeights);
    }
    Ok(num / den)
}

/// Regression estimator with the importance weights as control variates.
///
/// Uses `b = (1 - w_bar) / (n^{-1} sum (w_i - w_bar)^2)` and the weights
/// `V_i = w_i (1 + b (w_i - w_bar)) / n`. With zero weight variance `b` is
/// undefined and the self-normalized estimate is returned instead.
pub fn regression_estimate(draws: &ISDraws, l_vals: &[f64]) -> Result<f64, EvidenceError> {
    check_values(draws, l_vals)?;
    let n = draws.len() as f64;
    let w_bar: f64 = draws.weights().iter().sum::<f64>() / n;
    let ss: f64 = draws
        .weights()
        .iter()
        .map(|&w| (w - w_bar) * (w - w_bar))
        .sum();
    if ss == 0.0 {
        return snis_estimate(draws, l_vals);
    }
    let b = (1.0 - w_bar) / (ss / n);
    let total: f64 = draws
        .weights()
        .iter()
        .zip(l_vals)
        .map(|(&w, &l)| w * (1.0 + b * (w - w_bar)) / n * l)
        .sum();
    Ok(total)
}

/// Difference estimator: plain importance sampling plus
/// `gamma (1 - w_bar)`.
pub fn difference_estimate(
    draws: &ISDraws,
    l_vals: &[f64],
    gamma: f64,
) -> Result<f64, EvidenceError> {
    check_values(draws, l_vals)?;
    let n = draws.len() as f64;
    let is: f64 = l_vals
        .iter()
        .zip(draws.weights())
        .map(|(&l, &w)| l * w)
        .sum::<f64>()
        / n;
    let w_bar: f64 = draws.weights().iter().sum::<f64>() / n;
    Ok(is + gamma * (1.0 - w_bar))
}

/// Variance-minimizing plug-in coefficient for [`difference_estimate`]:
/// sample covariance of `l w` with `w` over the sample variance of `w`
/// (`n - 1` divisors).
pub fn plugin_gamma(draws: &ISDraws, l_vals: &[f64]) -> Result<f64, EvidenceError> {
    check_values(draws, l_vals)?;
    if draws.len() < 2 {
        return Err(EvidenceError::DegenerateWeights);
    }
    let n = draws.len() as f64;
    let w_bar: f64 = draws.weights().iter().sum::<f64>() / n;
    let lw: Vec<f64> = l_vals
        .iter()
        .zip(draws.weights())
        .map(|(&l, &w)| l * w)
        .collect();
    let lw_bar: f64 = lw.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&w, &p) in draws.weights().iter().zip(&lw) {
        cov += (p - lw_bar) * (w - w_bar);
        var += (w - w_bar) * (w - w_bar);
    }
    if var == 0.0 {
        return Err(EvidenceError::DegenerateWeights);
    }
    Ok(cov / var)
}

/// Adaptively normalized importance sampling:
/// `sum l w / (lambda n + (1 - lambda) sum w)`.
///
/// Note the mixing convention: `lambda` multiplies the raw count here, so
/// `lambda = 1` recovers plain importance sampling and `lambda = 0` the
/// self-normalized estimator. This mirrors the survey-side Trotter-Tukey
/// convention, where `lambda` multiplies the estimated count instead.
pub fn an_is_estimate(
    draws: &ISDraws,
    l_vals: &[f64],
    lambda: f64,
) -> Result<f64, EvidenceError> {
    check_values(draws, l_vals)?;
    let n = draws.len() as f64;
    let sum_w: f64 = draws.weights().iter().sum();
    let denom = lambda * n + (1.0 - lambda) * sum_w;
    if denom == 0.0 {
        return Err(EvidenceError::DegenerateMix { lambda });
    }
    let num: f64 = l_vals
        .iter()
        .zip(draws.weights())
        .map(|(&l, &w)| l * w)
        .sum();
    Ok(num / denom)
}

fn check_values(draws: &ISDraws, l_vals: &[f64]) -> Result<(), EvidenceError> {
    if draws.is_empty() {
        return Err(EvidenceError::Empty);
    }
    if l_vals.len() != draws.len() {
        return Err(EvidenceError::LengthMismatch {
            expected: draws.len(),
            got: l_vals.len(),
        });
    }
    Ok(())
}

/// Sorted grid over the problem domain with the endpoints guaranteed
/// present.
fn sorted_grid(points: &[f64], lo: f64, hi: f64) -> Result<Vec<f64>, EvidenceError> {
    for &u in points {
        if !(lo..=hi).contains(&u) {
            return Err(EvidenceError::PointOutsideDomain { value: u });
        }
    }
    let mut grid = Vec::with_capacity(points.len() + 2);
    grid.extend_from_slice(points);
    grid.push(lo);
    grid.push(hi);
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid points are finite"));
    Ok(grid)
}

/// Left Riemann sum of `l * f` over the sorted points.
///
/// The domain endpoints are inserted into the grid if absent, so the sum
/// always spans the whole interval. Duplicated points only add zero-width
/// terms.
pub fn riemann_estimate(points: &[f64], prob: &IntegrandProblem) -> Result<f64, EvidenceError> {
    let Domain::Interval { lo, hi } = prob.domain() else {
        return Err(EvidenceError::UnboundedDomain);
    };
    let grid = sorted_grid(points, lo, hi)?;
    let mut total = 0.0;
    for i in 0..grid.len() - 1 {
        let u = grid[i];
        total += (grid[i + 1] - u) * prob.integrand_at(u) * prob.density_at(u);
    }
    Ok(total)
}

/// Trapezoidal weighted Monte Carlo variant of [`riemann_estimate`]:
/// averages the integrand over both interval endpoints.
///
/// With points drawn uniformly this is the weighted-Monte-Carlo rule whose
/// variance decays two orders faster than the left sum's.
pub fn trapezoid_estimate(points: &[f64], prob: &IntegrandProblem) -> Result<f64, EvidenceError> {
    let Domain::Interval { lo, hi } = prob.domain() else {
        return Err(EvidenceError::UnboundedDomain);
    };
    let grid = sorted_grid(points, lo, hi)?;
    let h = |u: f64| prob.integrand_at(u) * prob.density_at(u);
    let mut total = 0.0;
    let mut left = h(grid[0]);
    for i in 0..grid.len() - 1 {
        let right = h(grid[i + 1]);
        total += (grid[i + 1] - grid[i]) * 0.5 * (left + right);
        left = right;
    }
    Ok(total)
}

/// Self-normalized Riemann estimator for a density known up to a constant:
/// the ratio of the Riemann sums of `l * f_tilde` and of `f_tilde` over the
/// given grid.
///
/// The caller supplies the full grid here (there is no domain to take
/// endpoints from); at least two distinct points are required.
pub fn riemann_snis_estimate<L, F>(
    points: &[f64],
    l: L,
    f_tilde: F,
) -> Result<f64, EvidenceError>
where
    L: Fn(f64) -> f64,
    F: Fn(f64) -> f64,
{
    let mut grid = points.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("grid points are finite"));
    if grid.len() < 2 || grid.first() == grid.last() {
        return Err(EvidenceError::DegenerateGrid);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..grid.len() - 1 {
        let u = grid[i];
        let width = grid[i + 1] - u;
        let ft = f_tilde(u);
        num += width * l(u) * ft;
        den += width * ft;
    }
    if den == 0.0 {
        return Err(EvidenceError::DegenerateWeights);
    }
    Ok(num / den)
}

/// Survival function of the integrand under the target density:
/// `Z(lambda) = P(lambda < l(X))`, non-increasing and vanishing at
/// `lambda_max`.
pub struct SurvivalFunction {
    z: RealFn,
    lambda_max: f64,
}

impl SurvivalFunction {
    /// Wraps `z`, checking non-increase and the `[0, 1]` range on a coarse
    /// grid and requiring `z(lambda_max) = 0`.
    pub fn new<Z>(z: Z, lambda_max: f64) -> Result<Self, EvidenceError>
    where
        Z: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(EvidenceError::InvalidSurvival(format!(
                "lambda_max must be positive and finite, got {lambda_max}"
            )));
        }
        const SCAN: usize = 64;
        const SLACK: f64 = 1e-9;
        let mut prev = f64::INFINITY;
        for i in 0..=SCAN {
            let lambda = lambda_max * i as f64 / SCAN as f64;
            let v = z(lambda);
            if !(-SLACK..=1.0 + SLACK).contains(&v) {
                return Err(EvidenceError::InvalidSurvival(format!(
                    "value {v} at {lambda} outside [0, 1]"
                )));
            }
            if v > prev + SLACK {
                return Err(EvidenceError::InvalidSurvival(format!(
                    "not non-increasing near {lambda}"
                )));
            }
            prev = v;
        }
        if z(lambda_max) > SLACK {
            return Err(EvidenceError::InvalidSurvival(
                "does not vanish at lambda_max".into(),
            ));
        }
        Ok(SurvivalFunction {
            z: Box::new(z),
            lambda_max,
        })
    }

    pub fn value(&self, lambda: f64) -> f64 {
        (self.z)(lambda)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }
}

/// Generalized inverse of the survival function:
/// `sup { lambda : Z(lambda) > a }`, by bisection on
/// `[0, lambda_max]` to absolute tolerance `1e-12` (at most 200 steps).
///
/// Returns `0` when no level exceeds `a`. Bisection only assumes
/// monotonicity, so step survival functions are handled exactly.
pub fn lambda_inverse(zfun: &SurvivalFunction, a: f64) -> Result<f64, EvidenceError> {
    if !(a > 0.0 && a < 1.0) {
        return Err(EvidenceError::InvalidLevel(a));
    }
    if zfun.value(0.0) <= a {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = zfun.lambda_max();
    if zfun.value(hi) > a {
        return Err(EvidenceError::InvalidSurvival(
            "positive beyond lambda_max".into(),
        ));
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if zfun.value(mid) > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Decreasing quadrature levels `1 = a_0 > a_1 > ... > a_m > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    levels: Vec<f64>,
}

impl QuadratureGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self, EvidenceError> {
        if levels.len() < 2 {
            return Err(EvidenceError::InvalidGrid(
                "need the unit level plus at least one interior level".into(),
            ));
        }
        if levels[0] != 1.0 {
            return Err(EvidenceError::InvalidGrid(format!(
                "levels must start at 1, got {}",
                levels[0]
            )));
        }
        for pair in levels.windows(2) {
            if !(pair[1] > 0.0 && pair[1] < pair[0]) {
                return Err(EvidenceError::InvalidGrid(format!(
                    "levels must strictly decrease inside (0, 1]: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(QuadratureGrid { levels })
    }

    /// The shrinking grid `a_i = exp(-i / k)`, `i = 0..=m`.
    pub fn exponential(m: usize, k: f64) -> Result<Self, EvidenceError> {
        if m == 0 {
            return Err(EvidenceError::InvalidGrid("need at least one level".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(EvidenceError::InvalidGrid(format!(
                "scale must be positive and finite, got {k}"
            )));
        }
        let levels: Vec<f64> = (0..=m).map(|i| (-(i as f64) / k).exp()).collect();
        Self::new(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Vertical-likelihood quadrature: `sum (a_{i-1} - a_i) Lambda(a_i)` over
/// the grid levels.
pub fn vertical_quadrature(
    zfun: &SurvivalFunction,
    grid: &QuadratureGrid,
) -> Result<f64, EvidenceError> {
    let levels = grid.levels();
    let mut total = 0.0;
    for i in 1..levels.len() {
        total += (levels[i - 1] - levels[i]) * lambda_inverse(zfun, levels[i])?;
    }
    Ok(total)
}

/// Vertical-likelihood quadrature on the exponentially shrinking grid
/// `a_i = exp(-i / k)` with `m` intervals.
pub fn nested_quadrature(
    zfun: &SurvivalFunction,
    m: usize,
    k: f64,
) -> Result<f64, EvidenceError> {
    vertical_quadrature(zfun, &QuadratureGrid::exponential(m, k)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn uniform_problem<L>(l: L) -> IntegrandProblem
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        IntegrandProblem::new(
            l,
            |_| 1.0,
            true,
            Proposal::new(|_| 1.0, |s: &mut RandomStream| s.uniform01()),
            Domain::Interval { lo: 0.0, hi: 1.0 },
        )
        .unwrap()
    }

    #[test]
    fn is_estimate_hand_case() {
        let prob = uniform_problem(|x| x * x);
        let draws = ISDraws::new(vec![0.25, 0.75], vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(is_estimate(&prob, &draws).unwrap(), 0.3125);
    }

    #[test]
    fn is_estimate_with_matched_proposal_is_plain_mean() {
        let prob = uniform_problem(|x| x.sin());
        let mut s = RandomStream::new(30, 0);
        let draws = ISDraws::sample(&prob, 500, &mut s).unwrap();
        assert!(draws.weights().iter().all(|&w| w == 1.0));
        let mean: f64 =
            draws.points().iter().map(|&x| x.sin()).sum::<f64>() / draws.len() as f64;
        assert_relative_eq!(is_estimate(&prob, &draws).unwrap(), mean);
    }

    #[test]
    fn is_estimate_constant_integrand() {
        let prob = uniform_problem(|_| 3.5);
        let draws = ISDraws::new(vec![0.2, 0.4, 0.9], vec![0.5, 1.5, 1.0]).unwrap();
        assert_relative_eq!(is_estimate(&prob, &draws).unwrap(), 3.5);
    }

    #[test]
    fn snis_hand_case_and_constants() {
        let draws = ISDraws::new(vec![0.0, 0.0], vec![1.0, 3.0]).unwrap();
        assert_relative_eq!(snis_estimate(&draws, &[0.0, 1.0]).unwrap(), 0.75);
        assert_relative_eq!(
            snis_estimate(&draws, &[2.5, 2.5]).unwrap(),
            2.5,
            max_relative = 1e-13
        );
        let zero = ISDraws::new(vec![0.1], vec![0.0]).unwrap();
        assert_eq!(
            snis_estimate(&zero, &[1.0]),
            Err(EvidenceError::DegenerateWeights)
        );
    }

    #[test]
    fn regression_hand_cases() {
        // Weight mean one makes the control coefficient vanish.
        let draws = ISDraws::new(vec![0.0, 0.0], vec![0.5, 1.5]).unwrap();
        let l = [1.0, 2.0];
        let is = (0.5 * 1.0 + 1.5 * 2.0) / 2.0;
        assert_relative_eq!(regression_estimate(&draws, &l).unwrap(), is);

        // Constant weights route through the self-normalized form.
        let flat = ISDraws::new(vec![0.0, 0.0, 0.0], vec![2.0, 2.0, 2.0]).unwrap();
        let l = [1.0, 5.0, 6.0];
        assert_relative_eq!(regression_estimate(&flat, &l).unwrap(), 4.0);
    }

    #[test]
    fn regression_matches_direct_formula() {
        let w = [0.5, 1.0, 2.5];
        let l = [1.0, 2.0, 3.0];
        let draws = ISDraws::new(vec![0.0; 3], w.to_vec()).unwrap();
        let got = regression_estimate(&draws, &l).unwrap();

        let n = 3.0;
        let w_bar: f64 = w.iter().sum::<f64>() / n;
        let ss: f64 = w.iter().map(|&x| (x - w_bar) * (x - w_bar)).sum();
        let b = (1.0 - w_bar) / (ss / n);
        let expected: f64 = w
            .iter()
            .zip(&l)
            .map(|(&wi, &li)| wi * (1.0 + b * (wi - w_bar)) / n * li)
            .sum();
        assert_relative_eq!(got, expected, max_relative = 1e-14);
    }

    #[test]
    fn difference_estimator_identities() {
        let draws = ISDraws::new(vec![0.0, 0.0], vec![0.5, 0.7]).unwrap();
        let l = [2.0, 3.0];
        let is = (0.5 * 2.0 + 0.7 * 3.0) / 2.0;
        assert_relative_eq!(difference_estimate(&draws, &l, 0.0).unwrap(), is);

        let unit = ISDraws::new(vec![0.0, 0.0], vec![0.5, 1.5]).unwrap();
        for gamma in [-2.0, 0.3, 10.0] {
            assert_relative_eq!(
                difference_estimate(&unit, &l, gamma).unwrap(),
                (0.5 * 2.0 + 1.5 * 3.0) / 2.0,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn an_is_endpoints_and_hand_case() {
        let draws = ISDraws::new(vec![0.0, 0.0], vec![1.0, 3.0]).unwrap();
        let l = [0.0, 1.0];
        assert_relative_eq!(an_is_estimate(&draws, &l, 0.5).unwrap(), 1.0);

        let is = (1.0 * 0.0 + 3.0 * 1.0) / 2.0;
        let snis = snis_estimate(&draws, &l).unwrap();
        assert_relative_eq!(
            an_is_estimate(&draws, &l, 1.0).unwrap(),
            is,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            an_is_estimate(&draws, &l, 0.0).unwrap(),
            snis,
            max_relative = 1e-12
        );

        // n = 2, sum w = 4: lambda = 2 zeroes the denominator.
        assert_eq!(
            an_is_estimate(&draws, &l, 2.0),
            Err(EvidenceError::DegenerateMix { lambda: 2.0 })
        );
    }

    #[test]
    fn riemann_hand_case_left_sum() {
        let prob = uniform_problem(|x| x);
        let est = riemann_estimate(&[0.0, 0.5, 1.0], &prob).unwrap();
        assert_relative_eq!(est, 0.25);
    }

    #[test]
    fn riemann_constant_telescopes() {
        let prob = IntegrandProblem::new(
            |_| 2.5,
            |_| 1.0,
            true,
            Proposal::new(|_| 1.0, |s: &mut RandomStream| s.uniform01()),
            Domain::Interval { lo: -1.0, hi: 3.0 },
        )
        .unwrap();
        let mut s = RandomStream::new(31, 0);
        for _ in 0..20 {
            let pts: Vec<f64> = (0..40).map(|_| -1.0 + 4.0 * s.uniform01()).collect();
            let est = riemann_estimate(&pts, &prob).unwrap();
            assert_relative_eq!(est, 2.5 * 4.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn riemann_converges_on_smooth_integrand() {
        let prob = uniform_problem(|x| x * x);
        let mut s = RandomStream::new(32, 0);
        let pts: Vec<f64> = (0..10_000).map(|_| s.uniform01()).collect();
        let est = riemann_estimate(&pts, &prob).unwrap();
        assert_abs_diff_eq!(est, 1.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn riemann_rejects_bad_input() {
        let prob = uniform_problem(|x| x);
        assert_eq!(
            riemann_estimate(&[0.2, 1.4], &prob),
            Err(EvidenceError::PointOutsideDomain { value: 1.4 })
        );
        let unbounded = IntegrandProblem::new(
            |x| x,
            |_| 1.0,
            true,
            Proposal::new(|_| 1.0, |s: &mut RandomStream| s.uniform01()),
            Domain::Unbounded,
        )
        .unwrap();
        assert_eq!(
            riemann_estimate(&[0.5], &unbounded),
            Err(EvidenceError::UnboundedDomain)
        );
    }

    #[test]
    fn trapezoid_is_exact_on_linear_integrands() {
        let prob = uniform_problem(|x| x);
        let mut s = RandomStream::new(33, 0);
        let pts: Vec<f64> = (0..50).map(|_| s.uniform01()).collect();
        let est = trapezoid_estimate(&pts, &prob).unwrap();
        assert_relative_eq!(est, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn riemann_snis_hand_case() {
        let grid: Vec<f64> = (0..=4000).map(|i| i as f64 / 4000.0).collect();
        let est = riemann_snis_estimate(&grid, |u| u, |u| 2.0 * u).unwrap();
        assert_abs_diff_eq!(est, 2.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn riemann_snis_constant_integrand_cancels() {
        let grid = [0.0, 0.13, 0.4, 0.62, 1.0];
        let est = riemann_snis_estimate(&grid, |_| 4.2, |u| 1.0 + u * u).unwrap();
        assert_relative_eq!(est, 4.2, max_relative = 1e-13);
    }

    #[test]
    fn riemann_snis_needs_two_distinct_points() {
        assert_eq!(
            riemann_snis_estimate(&[0.5, 0.5], |u| u, |_| 1.0),
            Err(EvidenceError::DegenerateGrid)
        );
        assert_eq!(
            riemann_snis_estimate(&[0.0, 1.0], |u| u, |_| 0.0),
            Err(EvidenceError::DegenerateWeights)
        );
    }

    #[test]
    fn lambda_inverse_linear_survival() {
        let z = SurvivalFunction::new(|lam: f64| (1.0 - lam).clamp(0.0, 1.0), 1.0).unwrap();
        for a in [0.05, 0.3, 0.5, 0.77, 0.95] {
            assert_abs_diff_eq!(lambda_inverse(&z, a).unwrap(), 1.0 - a, epsilon = 1e-10);
        }
    }

    #[test]
    fn lambda_inverse_step_survival() {
        let c = 0.35;
        let z = SurvivalFunction::new(move |lam: f64| if lam < c { 1.0 } else { 0.0 }, 1.0)
            .unwrap();
        for a in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(lambda_inverse(&z, a).unwrap(), c, epsilon = 1e-9);
        }
    }

    #[test]
    fn lambda_inverse_is_monotone_in_level() {
        let z = SurvivalFunction::new(|lam: f64| (1.0 - lam.sqrt()).max(0.0), 1.0).unwrap();
        let mut s = RandomStream::new(34, 0);
        let mut levels: Vec<f64> = (0..100).map(|_| 0.001 + 0.998 * s.uniform01()).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::INFINITY;
        for a in levels {
            let lam = lambda_inverse(&z, a).unwrap();
            assert!(lam <= prev + 1e-12);
            prev = lam;
        }
        assert!(lambda_inverse(&z, 0.0).is_err());
        assert!(lambda_inverse(&z, 1.0).is_err());
    }

    #[test]
    fn survival_validation_catches_increasing_functions() {
        assert!(matches!(
            SurvivalFunction::new(|lam: f64| lam, 1.0),
            Err(EvidenceError::InvalidSurvival(_))
        ));
        assert!(matches!(
            SurvivalFunction::new(|_| 0.5, 1.0),
            Err(EvidenceError::InvalidSurvival(_))
        ));
    }

    #[test]
    fn nested_quadrature_linear_problem() {
        let z = SurvivalFunction::new(|lam: f64| (1.0 - lam).clamp(0.0, 1.0), 1.0).unwrap();
        let est = nested_quadrature(&z, 500, 50.0).unwrap();
        assert!((est - 0.5).abs() < 0.01, "estimate {est}");
    }

    #[test]
    fn nested_quadrature_constant_integrand() {
        let c = 2.0;
        let z =
            SurvivalFunction::new(move |lam: f64| if lam < c { 1.0 } else { 0.0 }, c).unwrap();
        let m = 200;
        let k = 20.0;
        let est = nested_quadrature(&z, m, k).unwrap();
        let tail = (-(m as f64) / k).exp();
        assert_relative_eq!(est, c * (1.0 - tail), max_relative = 1e-8);
        assert!((est - c).abs() < 1e-3);
    }

    #[test]
    fn nested_quadrature_refines_monotonically() {
        let z = SurvivalFunction::new(|lam: f64| (1.0 - lam).clamp(0.0, 1.0), 1.0).unwrap();
        let mut prev_err = f64::INFINITY;
        for m in [10, 100, 1000] {
            let err = (nested_quadrature(&z, m, 50.0).unwrap() - 0.5).abs();
            assert!(err <= prev_err, "error grew at m = {m}");
            prev_err = err;
        }
    }

    #[test]
    fn quadrature_grid_validation() {
        assert!(QuadratureGrid::new(vec![1.0, 0.5, 0.2]).is_ok());
        assert!(QuadratureGrid::new(vec![0.9, 0.5]).is_err());
        assert!(QuadratureGrid::new(vec![1.0, 0.5, 0.5]).is_err());
        assert!(QuadratureGrid::new(vec![1.0, 0.0]).is_err());
        assert!(QuadratureGrid::exponential(0, 10.0).is_err());
        assert!(QuadratureGrid::exponential(10, 0.0).is_err());
        let g = QuadratureGrid::exponential(3, 2.0).unwrap();
        assert_relative_eq!(g.levels()[0], 1.0);
        assert_relative_eq!(g.levels()[1], (-0.5f64).exp());
    }
}
