//! Batch front end: discovers scan directories, runs the spatial and
//! sampling stages per scan in parallel, and writes per-scan manifests.

pub mod analyze;
pub mod config;
pub mod discover;
pub mod phantom;
pub mod run;

pub use analyze::run_analyze;
pub use config::{CommonArgs, ConfigFile, RunConfig};
pub use discover::{discover_scans, ScanDir};
pub use phantom::{run_phantom, PhantomArgs};
pub use run::{run_stage, RunSummary, ScanStatus, Stage};
