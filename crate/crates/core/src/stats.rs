//! Logical error rates and their binomial confidence intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SampleBatch;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// `1 - (1 - e1)(1 - e2)`: the probability that at least one of two
/// independent logical errors occurs.
pub fn combine_rates(e1: f64, e2: f64) -> f64 {
    1.0 - (1.0 - e1) * (1.0 - e2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub failures: usize,
    pub shots: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateEstimate {
    pub fn new(failures: usize, shots: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, shots, Z95);
        let rate = if shots == 0 { 0.0 } else { failures as f64 / shots as f64 };
        RateEstimate { failures, shots, rate, ci_low, ci_high }
    }
}

/// Per-observable failure rates of decoder `corrections` (bit `k` = predicted
/// flip of observable `k`, one entry per shot) against the sampled flips.
pub fn logical_error_rates(batch: &SampleBatch, corrections: &[u64]) -> Result<Vec<RateEstimate>> {
    if corrections.len() != batch.shots {
        return Err(Error::ShotMismatch { expected: batch.shots, got: corrections.len() });
    }
    let no = batch.observables.cols();
    let mut fails = vec![0usize; no];
    for (r, &pred) in corrections.iter().enumerate() {
        for (k, f) in fails.iter_mut().enumerate() {
            if batch.observables.get(r, k) != (pred >> k & 1 == 1) {
                *f += 1;
            }
        }
    }
    Ok(fails.into_iter().map(|f| RateEstimate::new(f, batch.shots)).collect())
}
