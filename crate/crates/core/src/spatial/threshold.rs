use super::filter::FilteredVolume;
use crate::error::{Error, Result};

/// Otsu threshold of a histogram, in the `value >= t` convention: the lower
/// class is `[0, t)` and the upper class `[t, len)`.
///
/// Between-class variance for a split is `(s0*n1 - s1*n0)^2 / (n0*n1)` up
/// to the constant factor `1/N^2`, where `n`/`s` are class counts and
/// intensity sums. Ties resolve to the smallest `t`.
pub fn otsu_threshold(hist: &[u64]) -> Result<u16> {
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let total_n: u64 = hist.iter().sum();
    let total_s: u128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    let mut best_t = 0usize;
    let mut best = f64::NEG_INFINITY;
    let (mut n0, mut s0) = (0u64, 0u128);
    for t in 1..hist.len() {
        n0 += hist[t - 1];
        s0 += (t - 1) as u128 * hist[t - 1] as u128;
        let n1 = total_n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let score = split_score(n0, s0, n1, total_s - s0);
        if score > best {
            best = score;
            best_t = t;
        }
    }
    Ok(best_t as u16)
}

/// Between-class variance (times `N^2`) of a two-class split.
pub fn split_score(n0: u64, s0: u128, n1: u64, s1: u128) -> f64 {
    let d = s0 as i128 * n1 as i128 - s1 as i128 * n0 as i128;
    let d = d as f64;
    d * d / (n0 as f64 * n1 as f64)
}

/// One threshold per scan from the histogram pooled over all filtered slices.
pub fn adaptive_threshold(filtered: &FilteredVolume) -> Result<u16> {
    otsu_threshold(&filtered.volume().histogram())
}
