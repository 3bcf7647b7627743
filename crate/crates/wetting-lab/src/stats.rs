//! Small statistics helpers shared by the estimators: running moments,
//! empirical CDFs, and standard errors.

/// Accumulator for mean / variance / standard error of the mean.
#[derive(Debug, Clone, Default)]
pub struct RunningStats {
    n: u64,
    sum: f64,
    sumsq: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Standard error of a sample variance, from the fourth central moment
/// (valid without normality assumptions).
pub fn variance_std_error(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    if n < 4.0 {
        return f64::INFINITY;
    }
    let mean = samples.iter().sum::<f64>() / n;
    let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (((m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n).max(0.0)).sqrt()
}

/// Empirical distribution of a scalar observable.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        EmpiricalCdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples <= t.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.sorted.partition_point(|&x| x <= t);
        k as f64 / self.sorted.len() as f64
    }

    /// Binomial standard error of `eval(t)`.
    pub fn std_error_at(&self, t: f64) -> f64 {
        let p = self.eval(t);
        (p * (1.0 - p) / self.sorted.len() as f64).sqrt()
    }

    /// Kolmogorov-Smirnov distance to a reference CDF.
    pub fn ks_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len() as f64;
        let mut ks = 0.0_f64;
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = reference(x);
            ks = ks.max((f - i as f64 / n).abs());
            ks = ks.max(((i + 1) as f64 / n - f).abs());
        }
        ks
    }

    /// Largest pointwise gap to another empirical CDF over both sample sets.
    pub fn sup_distance(&self, other: &EmpiricalCdf) -> f64 {
        let mut sup = 0.0_f64;
        for &x in self.sorted.iter().chain(other.sorted.iter()) {
            sup = sup.max((self.eval(x) - other.eval(x)).abs());
        }
        sup
    }

    pub fn min(&self) -> f64 {
        *self.sorted.first().unwrap()
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().unwrap()
    }
}
