//! The high-dimensional missing-data model behind the benchmark study: a
//! discrete label drawn uniformly from `1..=B`, a Bernoulli response with a
//! label-specific known probability, and a Bernoulli outcome observed only
//! on response.
//!
//! Alongside the generative machinery this module carries the estimators
//! compared in the study (plug-in Horvitz-Thompson, the beta-binomial
//! posterior mean, the binned-smoothed variants), the normal-model
//! counterparts, delta-method moment approximations for the posterior mean,
//! and the exponential tail bound used by the consistency checks.

use crate::ipw::WeightedSample;
use crate::stream::RandomStream;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WassermanError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("inconsistent inputs: {0}")]
    Mismatch(String),
    #[error("no responding draws")]
    NoResponders,
}

/// Generation and estimation settings for one study configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WassermanConfig {
    /// Number of population cells `B`.
    pub b_count: usize,
    /// Draws per replicate.
    pub n: usize,
    /// Response probabilities are generated inside `[delta, 1 - delta]`.
    pub delta: f64,
    /// Support of the outcome probabilities.
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// Shape of the symmetric Beta hyperprior behind the posterior mean.
    pub alpha_f: f64,
    /// Bin count for the binned-smoothed estimators.
    pub k_bins: usize,
}

impl Default for WassermanConfig {
    fn default() -> Self {
        WassermanConfig {
            b_count: 1000,
            n: 100,
            delta: 0.01,
            theta_lo: 0.6,
            theta_hi: 0.9,
            alpha_f: 1.0,
            k_bins: 6,
        }
    }
}

impl WassermanConfig {
    pub fn validate(&self) -> Result<(), WassermanError> {
        if self.b_count == 0 {
            return Err(WassermanError::Config("b_count must be positive".into()));
        }
        if self.n == 0 {
            return Err(WassermanError::Config("n must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(WassermanError::Config(format!(
                "delta must lie in (0, 0.5), got {}",
                self.delta
            )));
        }
        if !(0.0 <= self.theta_lo && self.theta_lo <= self.theta_hi && self.theta_hi <= 1.0) {
            return Err(WassermanError::Config(format!(
                "theta range [{}, {}] must satisfy 0 <= lo <= hi <= 1",
                self.theta_lo, self.theta_hi
            )));
        }
        if !(self.alpha_f > 0.0 && self.alpha_f.is_finite()) {
            return Err(WassermanError::Config(format!(
                "alpha_f must be positive, got {}",
                self.alpha_f
            )));
        }
        if self.k_bins < 2 {
            return Err(WassermanError::Config(format!(
                "k_bins must be at least 2, got {}",
                self.k_bins
            )));
        }
        Ok(())
    }
}

/// Fixed population: outcome probabilities `theta_b` and response
/// probabilities `p_b`, `b = 1..=B`.
#[derive(Clone, Debug)]
pub struct Population {
    theta: Vec<f64>,
    p: Vec<f64>,
}

impl Population {
    pub fn new(theta: Vec<f64>, p: Vec<f64>) -> Result<Self, WassermanError> {
        if theta.is_empty() {
            return Err(WassermanError::Config("population must be non-empty".into()));
        }
        if theta.len() != p.len() {
            return Err(WassermanError::Mismatch(format!(
                "theta has {} cells but p has {}",
                theta.len(),
                p.len()
            )));
        }
        if theta.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(WassermanError::Config("theta values must lie in [0, 1]".into()));
        }
        if p.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(WassermanError::Config(
                "response probabilities must lie in (0, 1)".into(),
            ));
        }
        Ok(Population { theta, p })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// True mean of `theta`, always recomputed from the cells.
    pub fn psi(&self) -> f64 {
        self.theta.iter().sum::<f64>() / self.theta.len() as f64
    }
}

/// Samples `theta_b ~ U(theta_lo, theta_hi)` and
/// `p_b ~ U(delta, 1 - delta)`, both iid over cells.
pub fn generate_population(
    cfg: &WassermanConfig,
    stream: &mut RandomStream,
) -> Result<Population, WassermanError> {
    cfg.validate()?;
    let theta: Vec<f64> = (0..cfg.b_count)
        .map(|_| stream.uniform_in(cfg.theta_lo, cfg.theta_hi))
        .collect();
    let p: Vec<f64> = (0..cfg.b_count)
        .map(|_| stream.uniform_in(cfg.delta, 1.0 - cfg.delta))
        .collect();
    Population::new(theta, p)
}

/// One simulated dataset: labels (1-based), response indicators, and
/// outcomes, with `y` forced to `false` wherever `r` is.
#[derive(Clone, Debug)]
pub struct Draws {
    x: Vec<usize>,
    r: Vec<bool>,
    y: Vec<bool>,
    b_count: usize,
}

impl Draws {
    pub fn new(
        x: Vec<usize>,
        r: Vec<bool>,
        y: Vec<bool>,
        b_count: usize,
    ) -> Result<Self, WassermanError> {
        if x.is_empty() {
            return Err(WassermanError::Config("draws must be non-empty".into()));
        }
        if x.len() != r.len() || x.len() != y.len() {
            return Err(WassermanError::Mismatch(
                "x, r, y must share one length".into(),
            ));
        }
        if x.iter().any(|&l| l == 0 || l > b_count) {
            return Err(WassermanError::Mismatch(format!(
                "labels must lie in 1..={b_count}"
            )));
        }
        if r.iter().zip(&y).any(|(&ri, &yi)| !ri && yi) {
            return Err(WassermanError::Mismatch(
                "outcome observed on a non-responding draw".into(),
            ));
        }
        Ok(Draws { x, r, y, b_count })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn r(&self) -> &[bool] {
        &self.r
    }

    pub fn y(&self) -> &[bool] {
        &self.y
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    fn check_population(&self, pop: &Population) -> Result<(), WassermanError> {
        if pop.len() != self.b_count {
            return Err(WassermanError::Mismatch(format!(
                "draws were generated over {} cells but population has {}",
                self.b_count,
                pop.len()
            )));
        }
        Ok(())
    }
}

/// Simulates `n` draws from the hierarchical model.
pub fn simulate_draws(
    pop: &Population,
    n: usize,
    stream: &mut RandomStream,
) -> Result<Draws, WassermanError> {
    if n == 0 {
        return Err(WassermanError::Config("n must be positive".into()));
    }
    let b = pop.len() as u64;
    let mut x = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let label = stream.discrete_uniform(b).expect("b >= 1") as usize;
        let responded = stream
            .bernoulli(pop.p()[label - 1])
            .expect("population probabilities are valid");
        let outcome = if responded {
            stream
                .bernoulli(pop.theta()[label - 1])
                .expect("population probabilities are valid")
        } else {
            false
        };
        x.push(label);
        r.push(responded);
        y.push(outcome);
    }
    Draws::new(x, r, y, pop.len())
}

/// The weighted-sample view of a simulated dataset, for feeding the generic
/// survey estimators.
pub fn induced_sample(draws: &Draws, pop: &Population) -> Result<WeightedSample, WassermanError> {
    draws.check_population(pop)?;
    let y: Vec<f64> = draws.y().iter().map(|&v| v as u8 as f64).collect();
    let p: Vec<f64> = draws.x().iter().map(|&l| pop.p()[l - 1]).collect();
    WeightedSample::new(y, p, draws.r().to_vec())
        .map_err(|e| WassermanError::Mismatch(e.to_string()))
}

/// Plug-in Horvitz-Thompson estimate of the mean: `(1/n) sum r y / p_x`.
pub fn ht_wasserman(draws: &Draws, pop: &Population) -> Result<f64, WassermanError> {
    draws.check_population(pop)?;
    let mut sum = 0.0;
    for i in 0..draws.len() {
        if draws.r()[i] && draws.y()[i] {
            sum += 1.0 / pop.p()[draws.x()[i] - 1];
        }
    }
    Ok(sum / draws.len() as f64)
}

/// Posterior mean under exchangeable Beta cells with a symmetric Beta
/// hyperprior: `(sum r y + alpha) / (sum r + 2 alpha)`.
///
/// With no responses this is the prior mean `1/2` for any `alpha > 0`.
pub fn bayes_li(draws: &Draws, alpha_f: f64) -> Result<f64, WassermanError> {
    if !(alpha_f > 0.0 && alpha_f.is_finite()) {
        return Err(WassermanError::Config(format!(
            "alpha_f must be positive, got {alpha_f}"
        )));
    }
    let sum_ry = draws.r().iter().zip(draws.y()).filter(|(&r, &y)| r && y).count() as f64;
    let sum_r = draws.r().iter().filter(|&&r| r).count() as f64;
    Ok((sum_ry + alpha_f) / (sum_r + 2.0 * alpha_f))
}

/// Equal-width partition of `[delta, 1 - delta]` with per-bin counts and
/// smoothed probabilities.
#[derive(Clone, Debug)]
pub struct BinPartition {
    k: usize,
    edges: Vec<f64>,
    counts: Vec<usize>,
    p_tilde: Vec<f64>,
    assignment: Vec<usize>,
}

impl BinPartition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Smoothed probability per bin: the mean of member values, or the bin
    /// midpoint when the bin is empty.
    pub fn p_tilde(&self) -> &[f64] {
        &self.p_tilde
    }

    /// Bin index of each draw, in draw order.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }
}

/// Bins the observed response probabilities `p_{x_i}` into `k` equal-width
/// intervals spanning `[delta, 1 - delta]`.
///
/// Intervals are half-open: a value on an interior edge belongs to the bin
/// on its right, and `1 - delta` belongs to the last bin. Values outside
/// the covered range (possible only for hand-built populations) clamp to
/// the nearest bin.
pub fn bin_partition(
    draws: &Draws,
    pop: &Population,
    k: usize,
    delta: f64,
) -> Result<BinPartition, WassermanError> {
    draws.check_population(pop)?;
    if k < 2 {
        return Err(WassermanError::Config(format!(
            "partition needs at least 2 bins, got {k}"
        )));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(WassermanError::Config(format!(
            "delta must lie in (0, 0.5), got {delta}"
        )));
    }
    let width = (1.0 - 2.0 * delta) / k as f64;
    let edges: Vec<f64> = (0..=k).map(|j| delta + j as f64 * width).collect();

    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0f64; k];
    let mut assignment = Vec::with_capacity(draws.len());
    for &label in draws.x() {
        let p = pop.p()[label - 1];
        let idx = (((p - delta) / width).floor() as isize).clamp(0, k as isize - 1) as usize;
        counts[idx] += 1;
        sums[idx] += p;
        assignment.push(idx);
    }
    let p_tilde: Vec<f64> = (0..k)
        .map(|j| {
            if counts[j] > 0 {
                sums[j] / counts[j] as f64
            } else {
                (edges[j] + edges[j + 1]) / 2.0
            }
        })
        .collect();
    Ok(BinPartition {
        k,
        edges,
        counts,
        p_tilde,
        assignment,
    })
}

fn binned_sums(draws: &Draws, part: &BinPartition) -> Result<(Vec<f64>, Vec<f64>), WassermanError> {
    if part.assignment.len() != draws.len() {
        return Err(WassermanError::Mismatch(
            "partition was built from a different number of draws".into(),
        ));
    }
    let mut ry = vec![0.0f64; part.k];
    let mut r = vec![0.0f64; part.k];
    for i in 0..draws.len() {
        let j = part.assignment[i];
        if draws.r()[i] {
            r[j] += 1.0;
            if draws.y()[i] {
                ry[j] += 1.0;
            }
        }
    }
    Ok((ry, r))
}

/// Binned-smoothed Horvitz-Thompson estimate: per-bin response-weighted
/// outcome sums inverse-weighted by the smoothed probabilities. Empty bins
/// contribute nothing.
pub fn bs_ht(draws: &Draws, part: &BinPartition) -> Result<f64, WassermanError> {
    let (ry, _) = binned_sums(draws, part)?;
    let total: f64 = ry
        .iter()
        .zip(part.p_tilde())
        .map(|(&s, &pt)| s / pt)
        .sum();
    Ok(total / draws.len() as f64)
}

/// Binned-smoothed Hajek estimate: ratio of the binned outcome sums to the
/// binned response counts, each inverse-weighted by the smoothed
/// probabilities.
pub fn bs_hajek(draws: &Draws, part: &BinPartition) -> Result<f64, WassermanError> {
    let (ry, r) = binned_sums(draws, part)?;
    let num: f64 = ry
        .iter()
        .zip(part.p_tilde())
        .map(|(&s, &pt)| s / pt)
        .sum();
    let den: f64 = r
        .iter()
        .zip(part.p_tilde())
        .map(|(&s, &pt)| s / pt)
        .sum();
    if den == 0.0 {
        return Err(WassermanError::NoResponders);
    }
    Ok(num / den)
}

/// Delta-method approximations for the posterior mean (with a uniform
/// hyperprior) and the exact plug-in variance of the Horvitz-Thompson
/// estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaMoments {
    /// Approximate expectation of the posterior mean.
    pub e_bayes: f64,
    /// Approximate variance of the posterior mean.
    pub v_bayes: f64,
    /// Variance of the plug-in Horvitz-Thompson estimator.
    pub v_ht: f64,
}

/// First-order moment approximations at sample size `n` for the given
/// population.
///
/// Writing `p_bar` for the mean response probability and `tp_bar` for the
/// mean of `theta_b p_b`, the numerator and denominator of the posterior
/// mean have means `n psi p_bar + 1` and `n p_bar + 2`, variances
/// `n (tp_bar - tp_bar^2)` and `n (p_bar - p_bar^2)`, and covariance
/// `n tp_bar (1 - p_bar)` (each response-outcome product is Bernoulli with
/// mean `tp_bar`, so the per-draw covariance is `tp_bar (1 - p_bar)`). The
/// ratio expansion of those five quantities gives `e_bayes` and `v_bayes`;
/// `v_ht` is `(1/n) (mean(theta_b / p_b) - psi^2)`.
pub fn delta_moments(pop: &Population, n: usize) -> DeltaMoments {
    let b = pop.len() as f64;
    let nf = n as f64;
    let psi = pop.psi();
    let p_bar = pop.p().iter().sum::<f64>() / b;
    let tp_bar = pop
        .theta()
        .iter()
        .zip(pop.p())
        .map(|(&t, &q)| t * q)
        .sum::<f64>()
        / b;

    let mu_num = nf * psi * p_bar + 1.0;
    let mu_den = nf * p_bar + 2.0;
    let v_num = nf * (tp_bar - tp_bar * tp_bar);
    let v_den = nf * (p_bar - p_bar * p_bar);
    let cov = nf * tp_bar * (1.0 - p_bar);

    let ratio = mu_num / mu_den;
    let v_bayes = ratio
        * ratio
        * (v_num / (mu_num * mu_num) + v_den / (mu_den * mu_den)
            - 2.0 * cov / (mu_num * mu_den));

    let theta_over_p = pop
        .theta()
        .iter()
        .zip(pop.p())
        .map(|(&t, &q)| t / q)
        .sum::<f64>()
        / b;
    let v_ht = (theta_over_p - psi * psi) / nf;

    DeltaMoments {
        e_bayes: ratio,
        v_bayes,
        v_ht,
    }
}

/// Maximum-likelihood and posterior-mean estimates for the normal-outcome
/// variant of the model (unit observation noise, zero-mean prior with
/// standard deviation `sigma`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmelingEstimates {
    /// `sum(r y) / sum(r)`; undefined without responders.
    pub mle: Option<f64>,
    /// `sum(r y) / (2 / sigma + sum(r))`; defined even with no data.
    pub bayes: f64,
}

pub fn harmeling_estimates(
    y: &[f64],
    r: &[bool],
    sigma: f64,
) -> Result<HarmelingEstimates, WassermanError> {
    if y.len() != r.len() {
        return Err(WassermanError::Mismatch(
            "y and r must share one length".into(),
        ));
    }
    if sigma <= 0.0 || sigma.is_nan() {
        return Err(WassermanError::Config(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let sum_ry: f64 = y.iter().zip(r).filter(|(_, &ri)| ri).map(|(&v, _)| v).sum();
    let n_resp = r.iter().filter(|&&ri| ri).count() as f64;
    let mle = (n_resp > 0.0).then(|| sum_ry / n_resp);
    let bayes = sum_ry / (2.0 / sigma + n_resp);
    Ok(HarmelingEstimates { mle, bayes })
}

/// Exponential tail bound `exp(-2 n delta^2 (psi + eps)^2)`.
///
/// This is the bound claimed for the upper tail of the posterior mean in
/// the consistency sketch; the harness reports the empirical exceedance
/// next to it rather than asserting it.
pub fn hoeffding_tail_bound(n: usize, delta: f64, psi: f64, eps: f64) -> f64 {
    let t = (psi + eps) * delta;
    (-2.0 * n as f64 * t * t).exp()
}
