use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kde::DensityProfile;
use crate::error::{Error, Result};
use crate::spatial::LungMaskSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Kds,
    Uniform,
    Random,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Kds => "kds",
            Strategy::Uniform => "uniform",
            Strategy::Random => "random",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kds" => Ok(Strategy::Kds),
            "uniform" => Ok(Strategy::Uniform),
            "random" => Ok(Strategy::Random),
            other => Err(format!(
                "unknown strategy {other:?}; expected kds, uniform or random"
            )),
        }
    }
}

/// Slice indices picked by one strategy, ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSelection {
    pub indices: Vec<usize>,
    pub strategy: Strategy,
    /// Quantile levels used (kds only).
    pub percentiles: Vec<f64>,
    /// Generator seed (random only).
    pub seed: Option<u64>,
}

impl SliceSelection {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Foreground pixel count per slice.
pub fn lung_area_profile(masks: &LungMaskSet) -> Vec<u64> {
    masks.areas()
}

/// Midpoint levels `(2i - 1) / (2n)` for `i = 1..=n`.
pub fn kds_percentiles(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| (2 * i - 1) as f64 / (2 * n) as f64)
        .collect()
}

/// Density-quantile selection at the default midpoint levels.
pub fn select_kds(profile: &DensityProfile, count: usize) -> Result<SliceSelection> {
    if count == 0 {
        return Err(Error::ZeroCount);
    }
    select_kds_at(profile, &kds_percentiles(count))
}

/// Density-quantile selection at explicit levels, one slice per level.
///
/// Each level's quantile claims the unclaimed slice whose area is nearest,
/// ties going to the lower index. With fewer slices than levels every slice
/// is returned.
pub fn select_kds_at(profile: &DensityProfile, percentiles: &[f64]) -> Result<SliceSelection> {
    if percentiles.is_empty() {
        return Err(Error::ZeroCount);
    }
    let areas = profile.areas();
    let quantiles = percentiles
        .iter()
        .map(|&p| profile.invert_cdf(p))
        .collect::<Result<Vec<_>>>()?;

    let indices = if areas.len() <= percentiles.len() {
        (0..areas.len()).collect()
    } else {
        let mut taken = vec![false; areas.len()];
        let mut picked = Vec::with_capacity(quantiles.len());
        for q in quantiles {
            let mut best: Option<(usize, f64)> = None;
            for (i, &a) in areas.iter().enumerate() {
                if taken[i] {
                    continue;
                }
                let d = (a - q).abs();
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            let (i, _) = best.expect("more slices than levels");
            taken[i] = true;
            picked.push(i);
        }
        picked.sort_unstable();
        picked
    };

    Ok(SliceSelection {
        indices,
        strategy: Strategy::Kds,
        percentiles: percentiles.to_vec(),
        seed: None,
    })
}

/// Evenly spaced indices `floor((2i + 1) * s / (2n))`, `i = 0..n`.
pub fn select_uniform(slice_count: usize, count: usize) -> Result<SliceSelection> {
    check_counts(slice_count, count)?;
    let indices = if slice_count <= count {
        (0..slice_count).collect()
    } else {
        let mut out: Vec<usize> = Vec::with_capacity(count);
        for i in 0..count {
            let mut idx = ((2 * i + 1) * slice_count) / (2 * count);
            if let Some(&prev) = out.last() {
                idx = idx.max(prev + 1);
            }
            out.push(idx.min(slice_count - 1));
        }
        out
    };
    Ok(SliceSelection {
        indices,
        strategy: Strategy::Uniform,
        percentiles: Vec::new(),
        seed: None,
    })
}

/// `min(n, s)` distinct indices drawn without replacement, sorted.
pub fn select_random(slice_count: usize, count: usize, seed: u64) -> Result<SliceSelection> {
    check_counts(slice_count, count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices =
        rand::seq::index::sample(&mut rng, slice_count, count.min(slice_count)).into_vec();
    indices.sort_unstable();
    Ok(SliceSelection {
        indices,
        strategy: Strategy::Random,
        percentiles: Vec::new(),
        seed: Some(seed),
    })
}

fn check_counts(slice_count: usize, count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::ZeroCount);
    }
    if slice_count == 0 {
        return Err(Error::EmptyProfile);
    }
    Ok(())
}
