//! Inverse-probability-weighted survey estimators over weighted samples:
//! Horvitz-Thompson, Hajek, the Trotter-Tukey mixture, adaptive
//! normalization, and the auxiliary-information Hajek ratio estimator.
//!
//! All estimators are pure functions of an immutable [`WeightedSample`] and
//! safe to call concurrently. Each returns [`IpwDiagnostics`] carrying the
//! weighted sums alongside the estimate, so callers can audit how the
//! normalization behaved on a given sample.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IpwError {
    #[error("weighted sample must contain at least one unit")]
    Empty,
    #[error("sequence lengths differ: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("inclusion probability {value} at index {index} outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("outcome {value} at index {index} is not finite")]
    InvalidOutcome { index: usize, value: f64 },
    #[error("auxiliary {value} at index {index} must be positive and finite")]
    InvalidAuxiliary { index: usize, value: f64 },
    #[error("responding unit {index} has zero inclusion probability")]
    DivisionHazard { index: usize },
    #[error("no responding units")]
    NoResponders,
    #[error("mixture weight {lambda} makes the denominator vanish")]
    DegenerateMix { lambda: f64 },
    #[error("estimator requires auxiliaries but the sample has none")]
    MissingAuxiliaries,
    #[error("weighted auxiliary mass is zero over responding units")]
    DegenerateAuxiliaryMass,
}

/// Whether an estimator targets the population mean or the population total.
///
/// The total is `n` times the mean form throughout, which for
/// Horvitz-Thompson reduces to the raw weighted sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimand {
    Mean,
    Total,
}

/// Survey data: outcomes `y`, inclusion/response probabilities `p`, response
/// indicators `r`, and optional positive auxiliaries.
///
/// Construction validates lengths and ranges. A probability of exactly zero
/// is accepted here (it can describe a unit that was never observable); the
/// estimators reject it only when that unit actually responded.
#[derive(Clone, Debug)]
pub struct WeightedSample {
    y: Vec<f64>,
    p: Vec<f64>,
    r: Vec<bool>,
    aux: Option<Vec<f64>>,
}

impl WeightedSample {
    pub fn new(y: Vec<f64>, p: Vec<f64>, r: Vec<bool>) -> Result<Self, IpwError> {
        if y.is_empty() {
            return Err(IpwError::Empty);
        }
        if p.len() != y.len() {
            return Err(IpwError::LengthMismatch {
                expected: y.len(),
                got: p.len(),
            });
        }
        if r.len() != y.len() {
            return Err(IpwError::LengthMismatch {
                expected: y.len(),
                got: r.len(),
            });
        }
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(IpwError::InvalidOutcome { index: i, value: v });
            }
        }
        for (i, &v) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(IpwError::InvalidProbability { index: i, value: v });
            }
        }
        Ok(WeightedSample {
            y,
            p,
            r,
            aux: None,
        })
    }

    /// Fully observed sample: every response indicator set.
    pub fn fully_observed(y: Vec<f64>, p: Vec<f64>) -> Result<Self, IpwError> {
        let n = y.len();
        Self::new(y, p, vec![true; n])
    }

    /// Attaches a positive auxiliary variable of known total.
    pub fn with_aux(mut self, aux: Vec<f64>) -> Result<Self, IpwError> {
        if aux.len() != self.y.len() {
            return Err(IpwError::LengthMismatch {
                expected: self.y.len(),
                got: aux.len(),
            });
        }
        for (i, &v) in aux.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(IpwError::InvalidAuxiliary { index: i, value: v });
            }
        }
        self.aux = Some(aux);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn r(&self) -> &[bool] {
        &self.r
    }

    pub fn aux(&self) -> Option<&[f64]> {
        self.aux.as_deref()
    }

    /// Weighted outcome sum and weighted count over responding units.
    fn weighted_sums(&self) -> Result<(f64, f64), IpwError> {
        let mut s_hat = 0.0;
        let mut n_hat = 0.0;
        for i in 0..self.len() {
            if !self.r[i] {
                continue;
            }
            if self.p[i] == 0.0 {
                return Err(IpwError::DivisionHazard { index: i });
            }
            s_hat += self.y[i] / self.p[i];
            n_hat += 1.0 / self.p[i];
        }
        Ok((s_hat, n_hat))
    }
}

/// Estimate plus the weighted sums and normalization mix behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IpwDiagnostics {
    /// Weighted outcome sum over responders.
    pub s_hat: f64,
    /// Weighted responder count.
    pub n_hat: f64,
    /// Mixture weight actually used for the denominator (0 for
    /// Horvitz-Thompson, 1 for Hajek, the implied value for adaptive
    /// normalization).
    pub lambda: f64,
    pub estimate: f64,
}

fn scale_for(estimand: Estimand, n: usize) -> f64 {
    match estimand {
        Estimand::Mean => 1.0,
        Estimand::Total => n as f64,
    }
}

/// Horvitz-Thompson estimator: weighted sum divided by the known size.
pub fn horvitz_thompson(s: &WeightedSample, estimand: Estimand) -> Result<IpwDiagnostics, IpwError> {
    let (s_hat, n_hat) = s.weighted_sums()?;
    Ok(IpwDiagnostics {
        s_hat,
        n_hat,
        lambda: 0.0,
        estimate: scale_for(estimand, s.len()) * s_hat / s.len() as f64,
    })
}

/// Hajek estimator: weighted sum divided by the estimated size.
pub fn hajek(s: &WeightedSample, estimand: Estimand) -> Result<IpwDiagnostics, IpwError> {
    let (s_hat, n_hat) = s.weighted_sums()?;
    if n_hat == 0.0 {
        return Err(IpwError::NoResponders);
    }
    Ok(IpwDiagnostics {
        s_hat,
        n_hat,
        lambda: 1.0,
        estimate: scale_for(estimand, s.len()) * s_hat / n_hat,
    })
}

/// Trotter-Tukey estimator: denominator `(1 - lambda) n + lambda n_hat`.
///
/// `lambda = 0` reproduces Horvitz-Thompson and `lambda = 1` reproduces
/// Hajek; any real mixture is accepted as long as the denominator is
/// nonzero.
pub fn trotter_tukey(
    s: &WeightedSample,
    lambda: f64,
    estimand: Estimand,
) -> Result<IpwDiagnostics, IpwError> {
    let (s_hat, n_hat) = s.weighted_sums()?;
    let denom = (1.0 - lambda) * s.len() as f64 + lambda * n_hat;
    if denom == 0.0 {
        return Err(IpwError::DegenerateMix { lambda });
    }
    Ok(IpwDiagnostics {
        s_hat,
        n_hat,
        lambda,
        estimate: scale_for(estimand, s.len()) * s_hat / denom,
    })
}

/// Adaptive normalization: lets the data pick the denominator mixture.
///
/// Computed in its difference-estimator form: the Horvitz-Thompson estimate
/// plus `gamma_hat * (1 - n_hat / n)`, where `gamma_hat` is the sample
/// covariance of `r y / p` with `r / p` over the sample variance of
/// `r / p` (both with the `n - 1` divisor). When the weights have zero
/// variance the correction is undefined and Hajek (which is exact there) is
/// returned instead. The reported `lambda` is the mixture that reproduces
/// the estimate through the Trotter-Tukey denominator.
pub fn adaptive_normalization(
    s: &WeightedSample,
    estimand: Estimand,
) -> Result<IpwDiagnostics, IpwError> {
    let (s_hat, n_hat) = s.weighted_sums()?;
    let n = s.len() as f64;
    if s.len() < 2 {
        return hajek(s, estimand);
    }

    let w_mean = n_hat / n;
    let wy_mean = s_hat / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for i in 0..s.len() {
        let w = if s.r()[i] { 1.0 / s.p()[i] } else { 0.0 };
        let wy = if s.r()[i] { s.y()[i] / s.p()[i] } else { 0.0 };
        cov += (wy - wy_mean) * (w - w_mean);
        var += (w - w_mean) * (w - w_mean);
    }
    if var == 0.0 {
        return hajek(s, estimand);
    }
    let gamma_hat = cov / var;

    let ht = s_hat / n;
    let estimate = ht + gamma_hat * (1.0 - n_hat / n);
    let lambda = if n_hat == n || estimate == 0.0 {
        0.0
    } else {
        (n - s_hat / estimate) / (n - n_hat)
    };
    Ok(IpwDiagnostics {
        s_hat,
        n_hat,
        lambda,
        estimate: scale_for(estimand, s.len()) * estimate,
    })
}

/// Hajek's ratio estimator of the population total using an auxiliary
/// variable of known total: `(sum a) * (sum y/p) / (sum a/p)` with the
/// weighted sums taken over responding units.
///
/// When the outcome is exactly proportional to the auxiliary this
/// reproduces the true total no matter how skewed the design is.
pub fn hajek_ratio_total(s: &WeightedSample) -> Result<f64, IpwError> {
    let aux = s.aux().ok_or(IpwError::MissingAuxiliaries)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, ((&y, &p), (&r, &a))) in s
        .y()
        .iter()
        .zip(s.p())
        .zip(s.r().iter().zip(aux))
        .enumerate()
    {
        if !r {
            continue;
        }
        if p == 0.0 {
            return Err(IpwError::DivisionHazard { index: i });
        }
        num += y / p;
        den += a / p;
    }
    if den <= 0.0 {
        return Err(IpwError::DegenerateAuxiliaryMass);
    }
    let aux_total: f64 = aux.iter().sum();
    Ok(aux_total * num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RandomStream;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn two_point() -> WeightedSample {
        WeightedSample::fully_observed(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn ht_hand_case() {
        let d = horvitz_thompson(&two_point(), Estimand::Mean).unwrap();
        assert_relative_eq!(d.s_hat, 2.0);
        assert_relative_eq!(d.estimate, 1.0);
    }

    #[test]
    fn ht_identity_under_unit_probabilities() {
        let s = WeightedSample::fully_observed(vec![3.0, 5.0, 7.0], vec![1.0, 1.0, 1.0]).unwrap();
        let d = horvitz_thompson(&s, Estimand::Mean).unwrap();
        assert_relative_eq!(d.estimate, 5.0);
        assert_relative_eq!(d.s_hat, 15.0);
        assert_relative_eq!(d.n_hat, 3.0);
    }

    #[test]
    fn ht_total_recovers_basu_blowup() {
        // One giant elephant drawn with tiny probability.
        let mut p = vec![1.0 / 4900.0; 50];
        p[0] = 99.0 / 100.0;
        let mut r = vec![false; 50];
        r[49] = true; // Jumbo drawn
        let y: Vec<f64> = (0..50).map(|i| 4000.0 + 60.0 * i as f64).collect();
        let jumbo = y[49];
        let s = WeightedSample::new(y, p, r).unwrap();
        let d = horvitz_thompson(&s, Estimand::Total).unwrap();
        assert_relative_eq!(d.estimate, jumbo * 4900.0, max_relative = 1e-12);
    }

    #[test]
    fn ht_rejects_zero_probability_responder() {
        let s = WeightedSample::new(vec![1.0, 2.0], vec![0.0, 0.5], vec![true, true]).unwrap();
        assert_eq!(
            horvitz_thompson(&s, Estimand::Mean),
            Err(IpwError::DivisionHazard { index: 0 })
        );
        // Harmless when the hazardous unit did not respond.
        let s = WeightedSample::new(vec![1.0, 2.0], vec![0.0, 0.5], vec![false, true]).unwrap();
        assert!(horvitz_thompson(&s, Estimand::Mean).is_ok());
    }

    #[test]
    fn hajek_hand_case() {
        let d = hajek(&two_point(), Estimand::Mean).unwrap();
        assert_relative_eq!(d.s_hat, 2.0);
        assert_relative_eq!(d.n_hat, 4.0);
        assert_relative_eq!(d.estimate, 0.5);
    }

    #[test]
    fn hajek_exact_on_constant_outcomes() {
        let s =
            WeightedSample::fully_observed(vec![2.5; 5], vec![0.9, 0.2, 0.4, 0.7, 0.05]).unwrap();
        let d = hajek(&s, Estimand::Mean).unwrap();
        assert_relative_eq!(d.estimate, 2.5, max_relative = 1e-12);
    }

    #[test]
    fn hajek_invariant_to_probability_rescaling() {
        let mut stream = RandomStream::new(21, 0);
        for _ in 0..100 {
            let n = 2 + (stream.uniform01() * 8.0) as usize;
            let y: Vec<f64> = (0..n).map(|_| stream.uniform01() * 10.0).collect();
            let p: Vec<f64> = (0..n).map(|_| 0.05 + 0.95 * stream.uniform01()).collect();
            let r: Vec<bool> = (0..n).map(|_| stream.bernoulli(0.8).unwrap()).collect();
            if !r.iter().any(|&b| b) {
                continue;
            }
            let base = WeightedSample::new(y.clone(), p.clone(), r.clone()).unwrap();
            let c = 0.05 + 0.95 * stream.uniform01();
            let scaled =
                WeightedSample::new(y, p.iter().map(|v| v * c).collect(), r).unwrap();
            let a = hajek(&base, Estimand::Mean).unwrap().estimate;
            let b = hajek(&scaled, Estimand::Mean).unwrap().estimate;
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn hajek_needs_a_responder() {
        let s = WeightedSample::new(vec![1.0], vec![0.5], vec![false]).unwrap();
        assert_eq!(hajek(&s, Estimand::Mean), Err(IpwError::NoResponders));
    }

    #[test]
    fn hajek_stays_in_responder_range_ht_need_not() {
        let s = WeightedSample::fully_observed(vec![1.0, 0.0], vec![0.1, 0.9]).unwrap();
        let hj = hajek(&s, Estimand::Mean).unwrap().estimate;
        assert!((0.0..=1.0).contains(&hj));
        // Witness: HT escapes the outcome range on the same sample.
        let ht = horvitz_thompson(&s, Estimand::Mean).unwrap().estimate;
        assert!(ht > 1.0);
    }

    #[test]
    fn trotter_tukey_hand_case_and_endpoints() {
        let s = two_point();
        let mid = trotter_tukey(&s, 0.5, Estimand::Mean).unwrap();
        assert_relative_eq!(mid.estimate, 2.0 / 3.0, max_relative = 1e-12);

        let ht = horvitz_thompson(&s, Estimand::Mean).unwrap().estimate;
        let hj = hajek(&s, Estimand::Mean).unwrap().estimate;
        assert_relative_eq!(
            trotter_tukey(&s, 0.0, Estimand::Mean).unwrap().estimate,
            ht,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            trotter_tukey(&s, 1.0, Estimand::Mean).unwrap().estimate,
            hj,
            max_relative = 1e-12
        );
    }

    #[test]
    fn trotter_tukey_degenerate_mix() {
        // n = 2, n_hat = 4: lambda = -1 zeroes the denominator.
        let s = two_point();
        assert_eq!(
            trotter_tukey(&s, -1.0, Estimand::Mean),
            Err(IpwError::DegenerateMix { lambda: -1.0 })
        );
    }

    #[test]
    fn an_matches_brute_force_difference_form() {
        let s = WeightedSample::fully_observed(
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.2, 0.8, 0.5, 0.5],
        )
        .unwrap();
        let d = adaptive_normalization(&s, Estimand::Mean).unwrap();

        // Independent direct evaluation of HT + gamma (1 - n_hat/n).
        let n = 4.0;
        let w = [5.0, 1.25, 2.0, 2.0];
        let wy = [5.0, 0.0, 2.0, 0.0];
        let w_mean: f64 = w.iter().sum::<f64>() / n;
        let wy_mean: f64 = wy.iter().sum::<f64>() / n;
        let cov: f64 = w
            .iter()
            .zip(&wy)
            .map(|(a, b)| (b - wy_mean) * (a - w_mean))
            .sum::<f64>()
            / (n - 1.0);
        let var: f64 = w.iter().map(|a| (a - w_mean) * (a - w_mean)).sum::<f64>() / (n - 1.0);
        let expected = wy_mean + cov / var * (1.0 - w_mean);
        assert_relative_eq!(d.estimate, expected, max_relative = 1e-12);
        assert_abs_diff_eq!(expected, -1.0 / 3.0, epsilon = 1e-12);

        // The recorded lambda reproduces the estimate via the mixture form.
        let back = trotter_tukey(&s, d.lambda, Estimand::Mean).unwrap();
        assert_relative_eq!(back.estimate, d.estimate, max_relative = 1e-10);
    }

    #[test]
    fn an_falls_back_to_hajek_on_constant_weights() {
        let s = WeightedSample::fully_observed(vec![1.0, 3.0, 7.0], vec![0.25, 0.25, 0.25]).unwrap();
        let an = adaptive_normalization(&s, Estimand::Mean).unwrap();
        let hj = hajek(&s, Estimand::Mean).unwrap();
        assert_eq!(an, hj);
    }

    #[test]
    fn an_reduces_to_ht_when_weighted_count_matches() {
        // p = 1 for all responders makes n_hat = n, so the correction
        // vanishes regardless of gamma.
        let s = WeightedSample::new(
            vec![2.0, 4.0, 9.0],
            vec![1.0, 1.0, 1.0],
            vec![true, true, true],
        )
        .unwrap();
        let an = adaptive_normalization(&s, Estimand::Mean).unwrap();
        let ht = horvitz_thompson(&s, Estimand::Mean).unwrap();
        assert_relative_eq!(an.estimate, ht.estimate, max_relative = 1e-12);
    }

    #[test]
    fn hajek_ratio_reduces_to_scaled_hajek_for_unit_aux() {
        let s = WeightedSample::fully_observed(vec![1.0, 0.0, 2.0], vec![0.5, 0.25, 0.8])
            .unwrap()
            .with_aux(vec![1.0, 1.0, 1.0])
            .unwrap();
        let ratio = hajek_ratio_total(&s).unwrap();
        let hj = hajek(&s, Estimand::Mean).unwrap().estimate;
        assert_relative_eq!(ratio, 3.0 * hj, max_relative = 1e-12);
    }

    #[test]
    fn hajek_ratio_exact_under_proportionality() {
        let aux = vec![10.0, 20.0, 30.0, 40.0];
        let c = 1.7;
        let y: Vec<f64> = aux.iter().map(|a| c * a).collect();
        let total: f64 = y.iter().sum();
        // Wildly skewed design; only one unit responds.
        let s = WeightedSample::new(y, vec![0.9, 0.001, 0.05, 0.049], vec![false, true, false, false])
            .unwrap()
            .with_aux(aux)
            .unwrap();
        assert_relative_eq!(hajek_ratio_total(&s).unwrap(), total, max_relative = 1e-12);
    }

    #[test]
    fn hajek_ratio_requires_auxiliaries() {
        let s = two_point();
        assert_eq!(hajek_ratio_total(&s), Err(IpwError::MissingAuxiliaries));
    }

    #[test]
    fn ht_is_unbiased_over_replicates() {
        // Fixed small population with known response probabilities.
        let y = vec![2.0, 7.0, 1.0, 9.0, 4.0, 6.0];
        let p = vec![0.3, 0.8, 0.5, 0.6, 0.9, 0.4];
        let truth = y.iter().sum::<f64>() / y.len() as f64;
        let reps = 10_000;
        let mut acc = crate::summary::SummaryAccumulator::new();
        for rep in 0..reps {
            let mut stream = RandomStream::new(99, rep);
            let r: Vec<bool> = p.iter().map(|&q| stream.bernoulli(q).unwrap()).collect();
            let s = WeightedSample::new(y.clone(), p.clone(), r).unwrap();
            acc.push(horvitz_thompson(&s, Estimand::Mean).unwrap().estimate);
        }
        let se = acc.standard_error();
        assert!(
            (acc.mean() - truth).abs() < 4.0 * se,
            "HT mean {} vs truth {} (se {})",
            acc.mean(),
            truth,
            se
        );
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            WeightedSample::new(vec![], vec![], vec![]),
            Err(IpwError::Empty)
        ));
        assert!(matches!(
            WeightedSample::new(vec![1.0], vec![0.5, 0.5], vec![true]),
            Err(IpwError::LengthMismatch { .. })
        ));
        assert!(matches!(
            WeightedSample::new(vec![1.0], vec![1.5], vec![true]),
            Err(IpwError::InvalidProbability { .. })
        ));
        assert!(matches!(
            WeightedSample::new(vec![f64::NAN], vec![0.5], vec![true]),
            Err(IpwError::InvalidOutcome { .. })
        ));
        assert!(matches!(
            WeightedSample::fully_observed(vec![1.0], vec![0.5])
                .unwrap()
                .with_aux(vec![0.0]),
            Err(IpwError::InvalidAuxiliary { .. })
        ));
    }
}
