use serde::{Deserialize, Serialize};

use super::LungMaskSet;
use crate::error::{Error, Result};
use crate::volume::ScanVolume;

/// Inclusive pixel rectangle. The empty box has all coordinates zero and
/// `empty` set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub row_min: usize,
    pub row_max: usize,
    pub col_min: usize,
    pub col_max: usize,
    pub empty: bool,
}

impl BoundingBox {
    pub const fn empty() -> Self {
        Self {
            row_min: 0,
            row_max: 0,
            col_min: 0,
            col_max: 0,
            empty: true,
        }
    }

    pub const fn new(row_min: usize, row_max: usize, col_min: usize, col_max: usize) -> Self {
        Self {
            row_min,
            row_max,
            col_min,
            col_max,
            empty: false,
        }
    }

    /// The box covering a whole `width x height` slice.
    pub const fn full(width: usize, height: usize) -> Self {
        Self::new(0, height - 1, 0, width - 1)
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn width(&self) -> usize {
        if self.empty {
            0
        } else {
            self.col_max - self.col_min + 1
        }
    }

    pub fn height(&self) -> usize {
        if self.empty {
            0
        } else {
            self.row_max - self.row_min + 1
        }
    }

    /// Grows the box to cover `(row, col)`.
    pub fn include(&mut self, row: usize, col: usize) {
        if self.empty {
            *self = Self::new(row, row, col, col);
        } else {
            self.row_min = self.row_min.min(row);
            self.row_max = self.row_max.max(row);
            self.col_min = self.col_min.min(col);
            self.col_max = self.col_max.max(col);
        }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        !self.empty
            && (self.row_min..=self.row_max).contains(&row)
            && (self.col_min..=self.col_max).contains(&col)
    }

    /// Largest per-side displacement between two non-empty boxes.
    pub fn max_side_offset(&self, other: &BoundingBox) -> usize {
        [
            self.row_min.abs_diff(other.row_min),
            self.row_max.abs_diff(other.row_max),
            self.col_min.abs_diff(other.col_min),
            self.col_max.abs_diff(other.col_max),
        ]
        .into_iter()
        .max()
        .unwrap()
    }

    fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.empty {
            return Err(Error::EmptyBoundingBox);
        }
        if self.row_min > self.row_max
            || self.col_min > self.col_max
            || self.row_max >= height
            || self.col_max >= width
        {
            return Err(Error::BoxOutOfRange {
                row_min: self.row_min,
                row_max: self.row_max,
                col_min: self.col_min,
                col_max: self.col_max,
                width,
                height,
            });
        }
        Ok(())
    }
}

/// Tight box over the union of all masks; empty when no pixel is set.
pub fn union_bounding_box(masks: &LungMaskSet) -> BoundingBox {
    let w = masks.width();
    let mut union = vec![0u8; w * masks.height()];
    for m in masks.masks() {
        for (u, &v) in union.iter_mut().zip(m) {
            *u |= v;
        }
    }
    let mut bbox = BoundingBox::empty();
    for (row, line) in union.chunks(w).enumerate() {
        if let Some(first) = line.iter().position(|&v| v != 0) {
            let last = line.iter().rposition(|&v| v != 0).unwrap();
            bbox.include(row, first);
            bbox.include(row, last);
        }
    }
    bbox
}

/// Cuts every slice down to `bbox`.
pub fn crop_volume(volume: &ScanVolume, bbox: &BoundingBox) -> Result<ScanVolume> {
    let (w, h) = (volume.width(), volume.height());
    bbox.check_within(w, h)?;
    let slices = volume
        .slices()
        .iter()
        .map(|s| crop_grid(s, w, bbox))
        .collect();
    Ok(ScanVolume::from_parts_unchecked(
        volume,
        bbox.width(),
        bbox.height(),
        slices,
    ))
}

pub(crate) fn crop_grid<T: Copy>(grid: &[T], width: usize, bbox: &BoundingBox) -> Vec<T> {
    let mut out = Vec::with_capacity(bbox.width() * bbox.height());
    for r in bbox.row_min..=bbox.row_max {
        out.extend_from_slice(&grid[r * width + bbox.col_min..=r * width + bbox.col_max]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::BitDepth;

    #[test]
    fn include_grows_tightly() {
        let mut b = BoundingBox::empty();
        b.include(7, 11);
        assert_eq!(b, BoundingBox::new(7, 7, 11, 11));
        b.include(3, 12);
        assert_eq!(b, BoundingBox::new(3, 7, 11, 12));
        assert_eq!((b.height(), b.width()), (5, 2));
    }

    #[test]
    fn identity_crop() {
        let v = ScanVolume::new(4, 3, BitDepth::Eight, vec![(0..12).collect()]).unwrap();
        assert_eq!(crop_volume(&v, &BoundingBox::full(4, 3)).unwrap(), v);
    }

    #[test]
    fn inner_block() {
        let v = ScanVolume::new(4, 4, BitDepth::Eight, vec![(0..16).collect()]).unwrap();
        let c = crop_volume(&v, &BoundingBox::new(1, 2, 1, 2)).unwrap();
        assert_eq!((c.width(), c.height()), (2, 2));
        // value at (r, c) of the source is 4r + c
        assert_eq!(c.slice(0), &[5, 6, 9, 10]);
    }

    #[test]
    fn crop_errors() {
        let v = ScanVolume::new(4, 4, BitDepth::Eight, vec![vec![0; 16]]).unwrap();
        assert!(matches!(
            crop_volume(&v, &BoundingBox::empty()),
            Err(Error::EmptyBoundingBox)
        ));
        assert!(matches!(
            crop_volume(&v, &BoundingBox::new(0, 4, 0, 1)),
            Err(Error::BoxOutOfRange { .. })
        ));
    }
}
