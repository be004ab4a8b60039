//! Sidecar documents written next to every processed scan.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::json::Finite;
use crate::metrics::Class;
use crate::phantom::GroundTruth;
use crate::sampling::Strategy;
use crate::spatial::BoundingBox;
use crate::volume::BitDepth;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn all_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> bool {
    values.into_iter().all(|v| v.is_finite())
}

/// `volume.json`: identity and geometry of a saved slice directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeStub {
    pub format_version: u32,
    pub scan_id: String,
    pub source_id: u32,
    pub n_slices: usize,
    pub width: usize,
    pub height: usize,
    pub bit_depth: BitDepth,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Class>,
}

impl Finite for VolumeStub {
    fn non_finite_field(&self) -> Option<String> {
        None
    }
}

/// `ssfl.json`: what the spatial pass decided for one scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialSidecar {
    pub format_version: u32,
    pub scan_id: String,
    pub threshold_t: u16,
    pub filter_radius: usize,
    pub invert: bool,
    pub min_component_fraction: f64,
    pub bbox: BoundingBox,
    /// Refined-mask pixel count per input slice.
    pub mask_areas: Vec<u64>,
}

impl Finite for SpatialSidecar {
    fn non_finite_field(&self) -> Option<String> {
        (!self.min_component_fraction.is_finite()).then(|| "min_component_fraction".into())
    }
}

/// `selection.json`: one sampling decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionManifest {
    pub format_version: u32,
    pub scan_id: String,
    pub strategy: Strategy,
    pub n: usize,
    pub percentiles: Vec<f64>,
    pub bandwidth_h: Option<f64>,
    pub areas: Vec<u64>,
    pub selected_indices: Vec<usize>,
    pub seed: Option<u64>,
}

impl Finite for SelectionManifest {
    fn non_finite_field(&self) -> Option<String> {
        if !all_finite(&self.percentiles) {
            return Some("percentiles".into());
        }
        self.bandwidth_h
            .filter(|h| !h.is_finite())
            .map(|_| "bandwidth_h".into())
    }
}

/// `manifest.json`: the full record for one scan of a run. Paths are
/// relative to the directory holding the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanManifest {
    pub format_version: u32,
    pub tool_version: String,
    pub scan_id: String,
    pub source_id: u32,
    pub input_path: String,
    pub n_slices_in: usize,
    pub bbox: Option<BoundingBox>,
    pub threshold_t: Option<u16>,
    pub strategy: Option<Strategy>,
    pub selected_indices: Vec<usize>,
    pub bandwidth_h: Option<f64>,
    pub output_paths: Vec<String>,
    pub seed: Option<u64>,
    /// Effective configuration of the run that produced this scan.
    pub config: Value,
}

impl Finite for ScanManifest {
    fn non_finite_field(&self) -> Option<String> {
        self.bandwidth_h
            .filter(|h| !h.is_finite())
            .map(|_| "bandwidth_h".into())
    }
}

/// `ground_truth.json` next to a generated phantom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthSidecar {
    pub format_version: u32,
    pub scan_id: String,
    pub seed: u64,
    #[serde(flatten)]
    pub truth: GroundTruth,
}

impl Finite for GroundTruthSidecar {
    fn non_finite_field(&self) -> Option<String> {
        None
    }
}
