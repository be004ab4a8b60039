//! Persistence: slice directories, embedding CSV files and canonical JSON
//! sidecars.

mod embeddings;
pub mod json;
pub mod manifest;
mod volume_io;

pub use embeddings::{load_embeddings, read_embeddings, write_embeddings};
pub use json::{read_json, to_canonical_string, write_canonical, Finite};
pub use manifest::{
    GroundTruthSidecar, ScanManifest, SelectionManifest, SpatialSidecar, VolumeStub,
    FORMAT_VERSION, TOOL_VERSION,
};
pub use volume_io::{
    list_slices, load_volume, save_volume, save_volume_with_class, slice_file_name, VOLUME_STUB,
};

/// Writes a metrics report as canonical JSON.
pub fn write_report(
    report: &crate::metrics::MetricsReport,
    path: &std::path::Path,
) -> crate::Result<()> {
    write_canonical(report, path)
}

/// Writes any manifest as canonical JSON.
pub fn write_manifest<T: serde::Serialize + Finite>(
    manifest: &T,
    path: &std::path::Path,
) -> crate::Result<()> {
    write_canonical(manifest, path)
}
