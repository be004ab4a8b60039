use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ctstd_core::io::{
    load_volume, read_json, save_volume, write_manifest, ScanManifest, SelectionManifest,
    SpatialSidecar, FORMAT_VERSION, TOOL_VERSION,
};
use ctstd_core::sampling::{select_kds, select_kds_at, select_random, select_uniform};
use ctstd_core::{
    fit_kde, standardize, ScanVolume, SliceSelection, SpatialOutcome, SpatialParams, Strategy,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::discover::{discover_scans, relative_path, ScanDir};

pub const RUN_MANIFEST: &str = "run_manifest.json";
pub const SCAN_MANIFEST: &str = "manifest.json";
pub const SPATIAL_SIDECAR: &str = "ssfl.json";
pub const SELECTION_SIDECAR: &str = "selection.json";
pub const SLICES_DIR: &str = "slices";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Spatial standardization only.
    Crop,
    /// Slice sampling only.
    Sample,
    /// Both, back to back.
    Pipeline,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Crop => "crop",
            Stage::Sample => "sample",
            Stage::Pipeline => "pipeline",
        }
    }
}

/// Result for one scan of a run.
#[derive(Debug, Clone, Serialize)]
pub struct ScanStatus {
    pub path: String,
    pub scan_id: String,
    pub source_id: u32,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub format_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub n_scans: usize,
    pub n_failed: usize,
    /// Successful scan count per source id.
    pub ok_per_source: BTreeMap<String, usize>,
    pub scans: Vec<ScanStatus>,
}

impl RunSummary {
    pub fn failures(&self) -> impl Iterator<Item = &ScanStatus> {
        self.scans.iter().filter(|s| !s.ok)
    }
}

impl ctstd_core::io::Finite for RunSummary {
    fn non_finite_field(&self) -> Option<String> {
        None
    }
}

/// Runs `stage` over every scan under the input root, writing one output
/// directory per scan plus `run_manifest.json`. Per-scan failures are
/// recorded, not raised; only setup problems return `Err`.
pub fn run_stage(stage: Stage, cfg: &RunConfig) -> Result<RunSummary> {
    let input = cfg.require_input()?;
    let output = cfg.require_output()?;
    let scans = discover_scans(input, Some(output))?;
    anyhow::ensure!(
        !scans.is_empty(),
        "no PNG slice directories under {}",
        input.display()
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .context("building worker pool")?;
    let echo = cfg.echo();
    let statuses: Vec<ScanStatus> = pool.install(|| {
        scans
            .par_iter()
            .map(|scan| {
                let res = process_scan(stage, cfg, &echo, scan, output);
                match res {
                    Ok(m) => ScanStatus {
                        path: scan.key(),
                        scan_id: m.scan_id,
                        source_id: m.source_id,
                        ok: true,
                        error: None,
                    },
                    Err(e) => ScanStatus {
                        path: scan.key(),
                        scan_id: scan
                            .rel
                            .file_name()
                            .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
                        source_id: scan.source_hint().unwrap_or(0),
                        ok: false,
                        error: Some(format!("{e:#}")),
                    },
                }
            })
            .collect()
    });
    let mut ok_per_source = BTreeMap::new();
    for s in statuses.iter().filter(|s| s.ok) {
        *ok_per_source.entry(s.source_id.to_string()).or_insert(0) += 1;
    }
    let summary = RunSummary {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        command: stage.name().to_string(),
        config: echo,
        n_scans: statuses.len(),
        n_failed: statuses.iter().filter(|s| !s.ok).count(),
        ok_per_source,
        scans: statuses,
    };
    write_manifest(&summary, &output.join(RUN_MANIFEST))?;
    Ok(summary)
}

fn load_scan(scan: &ScanDir) -> Result<ScanVolume> {
    let vol = load_volume(&scan.slices_dir)?;
    // without a volume.json stub the directory layout names the scan
    let stub = scan.slices_dir.join(ctstd_core::io::VOLUME_STUB).is_file();
    Ok(if stub {
        vol
    } else {
        let id = scan
            .rel
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        vol.with_scan_id(id)
            .with_source_id(scan.source_hint().unwrap_or(0))
    })
}

fn spatial_params(cfg: &RunConfig) -> SpatialParams {
    SpatialParams {
        radius: cfg.radius,
        invert: cfg.invert,
        min_component_fraction: cfg.min_component_fraction,
    }
}

/// FNV-1a, used to give every scan its own random stream.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn scan_seed(base: u64, key: &str) -> u64 {
    base ^ fnv1a(key)
}

/// Picks slices from per-slice lung areas. Returns the bandwidth too for kds.
pub fn select(areas: &[u64], cfg: &RunConfig, seed: u64) -> Result<(SliceSelection, Option<f64>)> {
    Ok(match cfg.strategy {
        Strategy::Kds => {
            let a: Vec<f64> = areas.iter().map(|&x| x as f64).collect();
            let profile = fit_kde(&a)?;
            let sel = match &cfg.percentiles {
                Some(ps) => select_kds_at(&profile, ps)?,
                None => select_kds(&profile, cfg.n_slices)?,
            };
            (sel, Some(profile.bandwidth()))
        }
        Strategy::Uniform => (select_uniform(areas.len(), cfg.n_slices)?, None),
        Strategy::Random => (select_random(areas.len(), cfg.n_slices, seed)?, None),
    })
}

fn spatial_sidecar(vol: &ScanVolume, cfg: &RunConfig, out: &SpatialOutcome) -> SpatialSidecar {
    SpatialSidecar {
        format_version: FORMAT_VERSION,
        scan_id: vol.scan_id().to_string(),
        threshold_t: out.threshold_t,
        filter_radius: cfg.radius,
        invert: cfg.invert,
        min_component_fraction: cfg.min_component_fraction,
        bbox: out.bbox,
        mask_areas: out.masks.areas(),
    }
}

/// Areas for sampling: from an existing `ssfl.json` when it matches the
/// volume, otherwise recomputed from fresh masks.
fn areas_for(scan: &ScanDir, vol: &ScanVolume, cfg: &RunConfig) -> Result<Vec<u64>> {
    let sidecar = scan.root.join(SPATIAL_SIDECAR);
    if sidecar.is_file() {
        let s: SpatialSidecar = read_json(&sidecar)?;
        if s.mask_areas.len() == vol.n_slices() {
            return Ok(s.mask_areas);
        }
    }
    Ok(standardize(vol, &spatial_params(cfg))?.masks.areas())
}

fn process_scan(
    stage: Stage,
    cfg: &RunConfig,
    echo: &Value,
    scan: &ScanDir,
    output: &Path,
) -> Result<ScanManifest> {
    let vol = load_scan(scan)?;
    let out_dir: PathBuf = output.join(&scan.rel);
    let seed = scan_seed(cfg.seed, &scan.key());
    let mut manifest = ScanManifest {
        format_version: FORMAT_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        scan_id: vol.scan_id().to_string(),
        source_id: vol.source_id(),
        input_path: relative_path(&scan.slices_dir, &out_dir),
        n_slices_in: vol.n_slices(),
        bbox: None,
        threshold_t: None,
        strategy: None,
        selected_indices: Vec::new(),
        bandwidth_h: None,
        output_paths: Vec::new(),
        seed: None,
        config: echo.clone(),
    };

    let (to_write, spatial, selection) = match stage {
        Stage::Crop => {
            let out = standardize(&vol, &spatial_params(cfg))?;
            let side = spatial_sidecar(&vol, cfg, &out);
            (out.cropped, Some(side), None)
        }
        Stage::Sample => {
            let areas = areas_for(scan, &vol, cfg)?;
            let (sel, h) = select(&areas, cfg, seed)?;
            let picked = vol.select_slices(&sel.indices)?;
            (picked, None, Some((sel, h, areas)))
        }
        Stage::Pipeline => {
            let out = standardize(&vol, &spatial_params(cfg))?;
            let side = spatial_sidecar(&vol, cfg, &out);
            let (sel, h) = select(&side.mask_areas, cfg, seed)?;
            let picked = out.cropped.select_slices(&sel.indices)?;
            let areas = side.mask_areas.clone();
            (picked, Some(side), Some((sel, h, areas)))
        }
    };

    // a rerun replaces stale slices from an earlier, differently sized run
    let slices_out = out_dir.join(SLICES_DIR);
    if slices_out.is_dir() {
        for old in ctstd_core::io::list_slices(&slices_out).unwrap_or_default() {
            std::fs::remove_file(&old).with_context(|| format!("removing {}", old.display()))?;
        }
    }
    let names = save_volume(&to_write, &slices_out)?;
    manifest.output_paths = names.iter().map(|n| format!("{SLICES_DIR}/{n}")).collect();

    if let Some(side) = spatial {
        manifest.bbox = Some(side.bbox);
        manifest.threshold_t = Some(side.threshold_t);
        write_manifest(&side, &out_dir.join(SPATIAL_SIDECAR))?;
        manifest.output_paths.push(SPATIAL_SIDECAR.to_string());
    }
    if let Some((sel, h, areas)) = selection {
        let doc = SelectionManifest {
            format_version: FORMAT_VERSION,
            scan_id: vol.scan_id().to_string(),
            strategy: sel.strategy,
            n: sel.indices.len(),
            percentiles: sel.percentiles.clone(),
            bandwidth_h: h,
            areas,
            selected_indices: sel.indices.clone(),
            seed: sel.seed,
        };
        write_manifest(&doc, &out_dir.join(SELECTION_SIDECAR))?;
        manifest.output_paths.push(SELECTION_SIDECAR.to_string());
        manifest.strategy = Some(sel.strategy);
        manifest.selected_indices = sel.indices;
        manifest.bandwidth_h = h;
        manifest.seed = sel.seed;
    }
    write_manifest(&manifest, &out_dir.join(SCAN_MANIFEST))?;
    Ok(manifest)
}
