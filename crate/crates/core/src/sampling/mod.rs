//! Slice sampling along the scan axis: density-quantile selection over the
//! lung-area profile, plus evenly spaced and random baselines.

mod kde;
mod select;

pub use kde::{fit_kde, sample_std, scott_bandwidth, DensityProfile, CDF_TOLERANCE};
pub use select::{
    kds_percentiles, lung_area_profile, select_kds, select_kds_at, select_random, select_uniform,
    SliceSelection, Strategy,
};
