//! Streaming mean/variance accumulation with a parallel merge.
//!
//! Uses Welford updates, so variance stays accurate even when values are
//! tightly clustered far from zero. Accumulators produced on worker threads
//! merge into the same result as single-pass accumulation up to float
//! associativity.

/// Running count, mean, and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SummaryAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl SummaryAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two accumulators as if their inputs had been concatenated.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let n1 = self.count as f64;
        let n2 = other.count as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        SummaryAccumulator {
            count: self.count + other.count,
            mean: self.mean + delta * n2 / n,
            m2: self.m2 + other.m2 + delta * delta * n1 * n2 / n,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean of the accumulated values; `0.0` when empty.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance `m2 / (count - 1)`; NaN below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Sample standard deviation; NaN below two observations.
    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean; NaN below two observations.
    pub fn standard_error(&self) -> f64 {
        self.sd() / (self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for SummaryAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = SummaryAccumulator::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}
