//! Lung-centric spatial standardization: smooth, threshold adaptively per
//! scan, clean the masks, and crop every slice to the union bounding box.

mod bbox;
mod filter;
pub mod morphology;
mod threshold;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::ScanVolume;

pub use bbox::{crop_volume, union_bounding_box, BoundingBox};
pub use filter::{filter_slices, FilteredVolume};
pub use threshold::{adaptive_threshold, otsu_threshold, split_score};

/// One 0/1 mask per slice, row-major.
pub type Mask = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LungMaskSet {
    width: usize,
    height: usize,
    masks: Vec<Mask>,
    threshold_t: u16,
    filter_radius: usize,
}

impl LungMaskSet {
    pub fn new(
        width: usize,
        height: usize,
        masks: Vec<Mask>,
        threshold_t: u16,
        filter_radius: usize,
    ) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::NoSlices);
        }
        if masks
            .iter()
            .any(|m| m.len() != width * height || m.iter().any(|&v| v > 1))
        {
            return Err(Error::MaskMismatch);
        }
        Ok(Self {
            width,
            height,
            masks,
            threshold_t,
            filter_radius,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn threshold_t(&self) -> u16 {
        self.threshold_t
    }

    pub fn filter_radius(&self) -> usize {
        self.filter_radius
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Foreground pixel count per slice.
    pub fn areas(&self) -> Vec<u64> {
        self.masks
            .iter()
            .map(|m| m.iter().map(|&v| v as u64).sum())
            .collect()
    }

    /// Cuts every mask down to `bbox`.
    pub fn crop(&self, bbox: &BoundingBox) -> Result<LungMaskSet> {
        if bbox.is_empty() {
            return Err(Error::EmptyBoundingBox);
        }
        if bbox.row_max >= self.height || bbox.col_max >= self.width {
            return Err(Error::MaskMismatch);
        }
        Ok(LungMaskSet {
            width: bbox.width(),
            height: bbox.height(),
            masks: self
                .masks
                .iter()
                .map(|m| bbox::crop_grid(m, self.width, bbox))
                .collect(),
            threshold_t: self.threshold_t,
            filter_radius: self.filter_radius,
        })
    }
}

/// `mask = 1` where the filtered intensity is at least `t`.
pub fn binarize(filtered: &FilteredVolume, t: u16) -> Result<LungMaskSet> {
    let v = filtered.volume();
    if t > v.bit_depth().max_value() {
        return Err(Error::ThresholdOutOfRange(t as u32));
    }
    let masks = v
        .slices()
        .iter()
        .map(|s| s.iter().map(|&p| u8::from(p >= t)).collect())
        .collect();
    Ok(LungMaskSet {
        width: v.width(),
        height: v.height(),
        masks,
        threshold_t: t,
        filter_radius: filtered.radius(),
    })
}

/// One 3x3 opening per slice, then removal of 4-connected components with
/// fewer than `min_component_fraction * width * height` pixels.
pub fn refine_masks(masks: &LungMaskSet, min_component_fraction: f64) -> Result<LungMaskSet> {
    if !(0.0..1.0).contains(&min_component_fraction) {
        return Err(Error::InvalidFraction(min_component_fraction));
    }
    let (w, h) = (masks.width, masks.height);
    let min_size = min_component_fraction * (w * h) as f64;
    let refined = masks
        .masks
        .iter()
        .map(|m| {
            let mut opened = morphology::open3x3(m, w, h);
            morphology::remove_small_components(&mut opened, w, h, min_size);
            opened
        })
        .collect();
    Ok(LungMaskSet {
        masks: refined,
        ..masks.clone()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialParams {
    /// Half-width `k` of the smoothing window.
    pub radius: usize,
    /// Treat dark structures as lung.
    pub invert: bool,
    pub min_component_fraction: f64,
}

impl Default for SpatialParams {
    fn default() -> Self {
        Self {
            radius: 1,
            invert: false,
            min_component_fraction: 0.001,
        }
    }
}

/// Everything one spatial pass produces for a scan.
#[derive(Debug, Clone)]
pub struct SpatialOutcome {
    pub threshold_t: u16,
    /// Refined masks at the input geometry.
    pub masks: LungMaskSet,
    pub bbox: BoundingBox,
    pub cropped: ScanVolume,
}

/// filter -> threshold -> binarize -> refine -> union box -> crop.
///
/// Fails with [`Error::EmptyBoundingBox`] when no lung pixel survives,
/// including the case of a single-intensity volume that cannot be split.
pub fn standardize(volume: &ScanVolume, params: &SpatialParams) -> Result<SpatialOutcome> {
    let mut filtered = filter_slices(volume, params.radius)?;
    if params.invert {
        filtered = filtered.inverted();
    }
    let t = match adaptive_threshold(&filtered) {
        Err(Error::DegenerateHistogram) => return Err(Error::EmptyBoundingBox),
        other => other?,
    };
    let raw = binarize(&filtered, t)?;
    drop(filtered);
    let masks = refine_masks(&raw, params.min_component_fraction)?;
    let bbox = union_bounding_box(&masks);
    let cropped = crop_volume(volume, &bbox)?;
    Ok(SpatialOutcome {
        threshold_t: t,
        masks,
        bbox,
        cropped,
    })
}
