use crate::error::{Error, Result};
use crate::volume::ScanVolume;

/// A volume that has passed through the smoothing filter, tagged with the
/// window half-width that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredVolume {
    volume: ScanVolume,
    radius: usize,
}

impl FilteredVolume {
    /// Wraps a volume that was smoothed elsewhere.
    pub fn new(volume: ScanVolume, radius: usize) -> Self {
        Self { volume, radius }
    }

    pub fn volume(&self) -> &ScanVolume {
        &self.volume
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Reflects intensities (`v -> max - v`) so that dark structures
    /// binarize as foreground.
    pub fn inverted(&self) -> FilteredVolume {
        let max = self.volume.bit_depth().max_value();
        let slices = self
            .volume
            .slices()
            .iter()
            .map(|s| s.iter().map(|&v| max - v).collect())
            .collect();
        FilteredVolume {
            volume: ScanVolume::from_parts_unchecked(
                &self.volume,
                self.volume.width(),
                self.volume.height(),
                slices,
            ),
            radius: self.radius,
        }
    }

    pub fn into_volume(self) -> ScanVolume {
        self.volume
    }
}

/// Mean of the `(2k+1)^2` neighbourhood of every pixel, borders handled by
/// edge replication. The integer result is rounded half up.
pub fn filter_slices(volume: &ScanVolume, radius: usize) -> Result<FilteredVolume> {
    let (w, h) = (volume.width(), volume.height());
    if radius == 0 || 2 * radius + 1 > w.min(h) {
        return Err(Error::RadiusTooLarge {
            radius,
            width: w,
            height: h,
        });
    }
    let slices = volume
        .slices()
        .iter()
        .map(|s| box_mean(s, w, h, radius))
        .collect();
    Ok(FilteredVolume {
        volume: ScanVolume::from_parts_unchecked(volume, w, h, slices),
        radius,
    })
}

/// Sliding window sums of half-width `radius` along `vals`, ends replicated.
fn window_sums(vals: &[u64], radius: usize, out: &mut Vec<u64>) {
    out.clear();
    let len = vals.len() as isize;
    let at = |i: isize| vals[i.clamp(0, len - 1) as usize];
    let r = radius as isize;
    let mut sum: u64 = (-r..=r).map(at).sum();
    out.push(sum);
    for c in 1..len {
        sum = sum + at(c + r) - at(c - r - 1);
        out.push(sum);
    }
}

fn box_mean(slice: &[u16], w: usize, h: usize, radius: usize) -> Vec<u16> {
    let mut rows = vec![0u64; w * h];
    let mut line = Vec::with_capacity(w.max(h));
    let mut sums = Vec::with_capacity(w.max(h));
    for r in 0..h {
        line.clear();
        line.extend(slice[r * w..(r + 1) * w].iter().map(|&v| v as u64));
        window_sums(&line, radius, &mut sums);
        rows[r * w..(r + 1) * w].copy_from_slice(&sums);
    }
    let n = ((2 * radius + 1) * (2 * radius + 1)) as u64;
    let mut out = vec![0u16; w * h];
    for c in 0..w {
        line.clear();
        line.extend((0..h).map(|r| rows[r * w + c]));
        window_sums(&line, radius, &mut sums);
        for (r, &sum) in sums.iter().enumerate() {
            out[r * w + c] = ((sum + n / 2) / n) as u16;
        }
    }
    out
}
