//! Volumetric data model: an ordered stack of equally sized grayscale slices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample precision of a volume's pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u8 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// Largest representable intensity, `2^bits - 1`.
    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    /// Number of distinct intensities, i.e. histogram length.
    pub fn levels(self) -> usize {
        self.max_value() as usize + 1
    }
}

impl TryFrom<u8> for BitDepth {
    type Error = Error;

    fn try_from(bits: u8) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::UnsupportedBitDepth(other)),
        }
    }
}

impl From<BitDepth> for u8 {
    fn from(depth: BitDepth) -> u8 {
        depth.bits()
    }
}

/// One row-major intensity grid.
pub type Slice = Vec<u16>;

/// An ordered stack of grayscale slices with uniform dimensions.
///
/// Slice 0 is the first acquired slice. Every pixel lies in
/// `[0, bit_depth.max_value()]`; construction checks both invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanVolume {
    width: usize,
    height: usize,
    bit_depth: BitDepth,
    slices: Vec<Slice>,
    scan_id: String,
    source_id: u32,
}

impl ScanVolume {
    pub fn new(
        width: usize,
        height: usize,
        bit_depth: BitDepth,
        slices: Vec<Slice>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DegenerateDimensions { width, height });
        }
        if slices.is_empty() {
            return Err(Error::NoSlices);
        }
        let expected = width * height;
        let max = bit_depth.max_value();
        for (index, slice) in slices.iter().enumerate() {
            if slice.len() != expected {
                return Err(Error::SliceSizeMismatch {
                    index,
                    len: slice.len(),
                    expected,
                });
            }
            if let Some(&value) = slice.iter().find(|&&v| v > max) {
                return Err(Error::IntensityOutOfRange {
                    slice: index,
                    value,
                    bits: bit_depth.bits(),
                });
            }
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            slices,
            scan_id: String::new(),
            source_id: 0,
        })
    }

    pub fn with_scan_id(mut self, scan_id: impl Into<String>) -> Self {
        self.scan_id = scan_id.into();
        self
    }

    pub fn with_source_id(mut self, source_id: u32) -> Self {
        self.source_id = source_id;
        self
    }

    /// Builds a volume whose slices are already known to satisfy the
    /// invariants of `template` (same geometry, in-range values).
    pub(crate) fn from_parts_unchecked(
        template: &ScanVolume,
        width: usize,
        height: usize,
        slices: Vec<Slice>,
    ) -> Self {
        debug_assert!(!slices.is_empty());
        debug_assert!(slices.iter().all(|s| s.len() == width * height));
        Self {
            width,
            height,
            bit_depth: template.bit_depth,
            slices,
            scan_id: template.scan_id.clone(),
            source_id: template.source_id,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn slice(&self, index: usize) -> &[u16] {
        &self.slices[index]
    }

    pub fn n_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn scan_id(&self) -> &str {
        &self.scan_id
    }

    pub fn source_id(&self) -> u32 {
        self.source_id
    }

    pub fn pixel(&self, slice: usize, row: usize, col: usize) -> u16 {
        self.slices[slice][row * self.width + col]
    }

    pub fn into_slices(self) -> Vec<Slice> {
        self.slices
    }

    /// Keeps only the listed slices, in the given order.
    pub fn select_slices(&self, indices: &[usize]) -> Result<ScanVolume> {
        if indices.is_empty() {
            return Err(Error::NoSlices);
        }
        let slices = indices.iter().map(|&i| self.slices[i].clone()).collect();
        Ok(Self::from_parts_unchecked(
            self,
            self.width,
            self.height,
            slices,
        ))
    }

    /// Intensity histogram pooled over every slice.
    pub fn histogram(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.bit_depth.levels()];
        for slice in &self.slices {
            for &v in slice {
                hist[v as usize] += 1;
            }
        }
        hist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeStats {
    pub min: u16,
    pub max: u16,
    pub mean: f64,
    pub n_slices: usize,
}

/// Exact aggregate statistics over every pixel of the volume.
pub fn volume_stats(volume: &ScanVolume) -> VolumeStats {
    let mut min = u16::MAX;
    let mut max = 0u16;
    let mut sum: u128 = 0;
    for slice in volume.slices() {
        let mut slice_sum: u64 = 0;
        for &v in slice {
            min = min.min(v);
            max = max.max(v);
            slice_sum += v as u64;
        }
        sum += slice_sum as u128;
    }
    let count = (volume.n_slices() * volume.width() * volume.height()) as u128;
    VolumeStats {
        min,
        max,
        mean: sum as f64 / count as f64,
        n_slices: volume.n_slices(),
    }
}
