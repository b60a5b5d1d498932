//! Accumulators for rate estimates.
//!
//! Sums are kept in integers so that merging partial results in any order
//! gives bit-identical estimates.

use alloc::vec::Vec;

use crate::math::sqrt;

/// Order-insensitive reducer over independent trials.
///
/// Each trial contributes a duration `t` and an outcome `y` in `{0, 1}`
/// (whether it delivered a usable success).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialSums {
    pub trials: u64,
    pub successes: u64,
    pub truncated: u64,
    pub sum_t: u128,
    pub sum_t2: u128,
    pub sum_yt: u128,
}

impl TrialSums {
    pub fn push(&mut self, time: u64, success: bool, truncated: bool) {
        let t = time as u128;
        self.trials += 1;
        self.truncated += truncated as u64;
        self.sum_t += t;
        self.sum_t2 += t * t;
        if success {
            self.successes += 1;
            self.sum_yt += t;
        }
    }

    pub fn merge(mut self, other: TrialSums) -> TrialSums {
        self.trials += other.trials;
        self.successes += other.successes;
        self.truncated += other.truncated;
        self.sum_t += other.sum_t;
        self.sum_t2 += other.sum_t2;
        self.sum_yt += other.sum_yt;
        self
    }

    pub fn mean_time(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.sum_t as f64 / self.trials as f64
    }

    /// Standard error of the mean duration.
    pub fn time_std_error(&self) -> f64 {
        if self.trials < 2 {
            return f64::NAN;
        }
        let m = self.trials as f64;
        let mean = self.mean_time();
        let var = (self.sum_t2 as f64 - m * mean * mean) / (m - 1.0);
        sqrt(var.max(0.0) / m)
    }

    /// Ratio estimate `sum(y) / sum(t)` and its delta-method standard error.
    pub fn rate(&self) -> (f64, f64) {
        if self.trials == 0 || self.sum_t == 0 {
            return (0.0, 0.0);
        }
        let m = self.trials as f64;
        let xbar = self.sum_t as f64 / m;
        let ybar = self.successes as f64 / m;
        let r = ybar / xbar;
        if self.trials < 2 {
            return (r, f64::NAN);
        }
        // Var(y - r t) from raw sums; y^2 = y.
        let syy = self.successes as f64 - m * ybar * ybar;
        let stt = self.sum_t2 as f64 - m * xbar * xbar;
        let syt = self.sum_yt as f64 - m * xbar * ybar;
        let var = (syy + r * r * stt - 2.0 * r * syt) / (m - 1.0);
        (r, sqrt(var.max(0.0) / m) / xbar)
    }
}

/// Mean and standard error of equal-length batch rates.
pub fn batch_means(batch_counts: &[u64], batch_len: u64) -> (f64, f64) {
    let k = batch_counts.len();
    if k == 0 || batch_len == 0 {
        return (0.0, 0.0);
    }
    let rates: Vec<f64> = batch_counts
        .iter()
        .map(|&c| c as f64 / batch_len as f64)
        .collect();
    let mean = rates.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, f64::NAN);
    }
    let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k as f64 - 1.0);
    (mean, sqrt(var / k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_is_reciprocal_mean_without_failures() {
        let mut s = TrialSums::default();
        for t in [2u64, 4, 6, 8] {
            s.push(t, true, false);
        }
        let (r, se) = s.rate();
        assert!((r - 0.2).abs() < 1e-15);
        // delta method: se(1/xbar) = se(xbar)/xbar^2
        let expect = s.time_std_error() / 25.0;
        assert!((se - expect).abs() < 1e-12, "{se} {expect}");
    }

    #[test]
    fn merge_is_order_insensitive() {
        let mut a = TrialSums::default();
        let mut b = TrialSums::default();
        a.push(3, true, false);
        a.push(10, false, false);
        b.push(7, true, true);
        assert_eq!(a.merge(b), b.merge(a));
    }

    #[test]
    fn batch_means_basic() {
        let (m, se) = batch_means(&[10, 10, 10, 10], 100);
        assert!((m - 0.1).abs() < 1e-15);
        assert_eq!(se, 0.0);
        let (m, se) = batch_means(&[8, 12], 100);
        assert!((m - 0.1).abs() < 1e-15);
        assert!((se - 0.02).abs() < 1e-15);
    }
}
