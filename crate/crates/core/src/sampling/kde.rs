use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Target for `|F(q) - p|` in [`DensityProfile::invert_cdf`].
pub const CDF_TOLERANCE: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// Gaussian kernel density fitted to per-slice lung areas.
///
/// The density is `f(x) = 1/(s h) * sum_i phi((x - x_i) / h)` with `phi` the
/// unit normal density; its distribution function is the mean of the
/// shifted normal CDFs and is evaluated in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    areas: Vec<f64>,
    bandwidth: f64,
}

/// Sample standard deviation (n - 1 denominator), Welford's recurrence.
/// Zero for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    (m2 / (values.len() - 1) as f64).sqrt()
}

/// Scott's rule, `1.06 * sigma * s^(-1/5)`.
///
/// A zero-spread profile gets `max(1, 1e-6 * mean)` so the CDF stays
/// strictly increasing.
pub fn scott_bandwidth(areas: &[f64]) -> f64 {
    let sigma = sample_std(areas);
    if sigma > 0.0 {
        1.06 * sigma * (areas.len() as f64).powf(-0.2)
    } else {
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        (1e-6 * mean).max(1.0)
    }
}

/// Fits the density with a Scott's-rule bandwidth.
pub fn fit_kde(areas: &[f64]) -> Result<DensityProfile> {
    if areas.is_empty() {
        return Err(Error::EmptyProfile);
    }
    if let Some(&bad) = areas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::InvalidArea(bad));
    }
    Ok(DensityProfile {
        bandwidth: scott_bandwidth(areas),
        areas: areas.to_vec(),
    })
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

impl DensityProfile {
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .areas
            .iter()
            .map(|&xi| {
                let z = (x - xi) / h;
                FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
            })
            .sum();
        sum / (self.areas.len() as f64 * h)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self.areas.iter().map(|&xi| normal_cdf((x - xi) / h)).sum();
        (sum / self.areas.len() as f64).clamp(0.0, 1.0)
    }

    /// `[min - 10h, max + 10h]`, outside of which the density is negligible.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self
            .areas
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
                (lo.min(a), hi.max(a))
            });
        (lo - 10.0 * self.bandwidth, hi + 10.0 * self.bandwidth)
    }

    /// The `p`-quantile `q` with `F(q) = p`, found by bisection.
    pub fn invert_cdf(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let (mut lo, mut hi) = self.support();
        let step = 10.0 * self.bandwidth;
        // extreme p can sit outside the default bracket
        for _ in 0..1000 {
            if self.cdf(lo) <= p {
                break;
            }
            lo -= step;
        }
        for _ in 0..1000 {
            if self.cdf(hi) >= p {
                break;
            }
            hi += step;
        }

        let (mut best, mut best_err) = (lo, (self.cdf(lo) - p).abs());
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = self.cdf(mid);
            let err = (f - p).abs();
            if err < best_err {
                best = mid;
                best_err = err;
            }
            if err <= CDF_TOLERANCE {
                break;
            }
            if f < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let hi_err = (self.cdf(hi) - p).abs();
        if hi_err < best_err {
            best = hi;
        }
        Ok(best)
    }
}
