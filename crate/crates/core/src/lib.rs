//! Input-space standardization for multi-source CT volumes.
//!
//! * [`spatial`] crops every slice of a scan to the union bounding box of
//!   adaptively thresholded lung masks.
//! * [`sampling`] picks a fixed number of slices at quantiles of a kernel
//!   density fitted to the per-slice lung areas, with uniform and random
//!   baselines.
//! * [`metrics`] measures class separation and cross-source consistency of
//!   embeddings, plus macro-F1 and ROC AUC.
//! * [`phantom`] renders synthetic lung volumes with exact ground truth.
//! * [`io`] reads and writes slice directories, embedding CSVs and
//!   canonical JSON sidecars.

pub mod error;
pub mod io;
pub mod metrics;
pub mod phantom;
pub mod sampling;
pub mod spatial;
pub mod volume;

pub use error::{Error, Result};
pub use metrics::{analyze, Class, EmbeddingSet, MetricsReport};
pub use phantom::{generate_phantom, CorpusSpec, GroundTruth, PhantomSpec};
pub use sampling::{fit_kde, DensityProfile, SliceSelection, Strategy};
pub use spatial::{standardize, BoundingBox, LungMaskSet, SpatialOutcome, SpatialParams};
pub use volume::{volume_stats, BitDepth, ScanVolume, VolumeStats};
