//! Compensated (Neumaier) summation for long block sums.

/// Running sum with an error-compensation term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value()
}

/// Mean and standard error accumulated in one pass (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanStd {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanStd {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; NaN with fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean; NaN with fewer than two observations.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for MeanStd {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Ratio of means `Σ y / Σ x` with its delta-method standard error.
///
/// Used for regenerative quantities such as `E Ξ(f̄)² / Eτ`. Returns
/// `(ratio, stderr)`; the error is NaN with fewer than two pairs.
pub fn ratio_estimate(numerators: &[f64], denominators: &[f64]) -> (f64, f64) {
    assert_eq!(numerators.len(), denominators.len(), "paired samples required");
    let n = numerators.len();
    let den_mean = compensated_sum(denominators) / n as f64;
    let ratio = compensated_sum(numerators) / (den_mean * n as f64);
    let resid: MeanStd = numerators
        .iter()
        .zip(denominators)
        .map(|(y, x)| y - ratio * x)
        .collect();
    (ratio, (resid.variance() / n as f64).sqrt() / den_mean)
}
