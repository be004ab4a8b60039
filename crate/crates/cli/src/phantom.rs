use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use ctstd_core::io::{
    read_json, save_volume_with_class, write_manifest, GroundTruthSidecar, FORMAT_VERSION,
};
use ctstd_core::metrics::Class;
use ctstd_core::{generate_phantom, CorpusSpec, PhantomSpec};
use rayon::prelude::*;
use serde::Serialize;

pub const GROUND_TRUTH: &str = "ground_truth.json";
pub const PHANTOM_INDEX: &str = "phantoms.json";

#[derive(Debug, Clone, Default, Args)]
pub struct PhantomArgs {
    /// Phantom spec JSON (a corpus spec with --corpus). Defaults are used
    /// when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides the spec seed (the base seed with --corpus).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of phantoms, at consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Generate a multi-source corpus laid out as source_<id>/<scan_id>.
    #[arg(long)]
    pub corpus: bool,
    #[arg(long)]
    pub jobs: Option<usize>,
}

struct Job {
    rel: PathBuf,
    scan_id: String,
    source_id: u32,
    class: Option<Class>,
    spec: PhantomSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhantomIndexEntry {
    pub path: String,
    pub scan_id: String,
    pub source_id: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<Class>,
    pub seed: u64,
    pub n_slices: usize,
}

#[derive(Debug, Clone, Serialize)]
struct PhantomIndex {
    format_version: u32,
    phantoms: Vec<PhantomIndexEntry>,
}

impl ctstd_core::io::Finite for PhantomIndex {
    fn non_finite_field(&self) -> Option<String> {
        None
    }
}

fn jobs_for(args: &PhantomArgs) -> Result<Vec<Job>> {
    if args.corpus {
        let mut corpus: CorpusSpec = match &args.input {
            Some(p) => read_json(p)?,
            None => CorpusSpec::default(),
        };
        if let Some(s) = args.seed {
            corpus.base.seed = s;
        }
        corpus.base.validate()?;
        return Ok(corpus
            .entries()
            .into_iter()
            .map(|e| Job {
                rel: PathBuf::from(format!("source_{}", e.source_id)).join(&e.scan_id),
                scan_id: e.scan_id,
                source_id: e.source_id,
                class: Some(e.class),
                spec: e.spec,
            })
            .collect());
    }
    anyhow::ensure!(args.count >= 1, "--count must be at least 1");
    let base: PhantomSpec = match &args.input {
        Some(p) => read_json(p)?,
        None => PhantomSpec::default(),
    };
    let first = args.seed.unwrap_or(base.seed);
    Ok((0..args.count as u64)
        .map(|i| {
            let mut spec = base.clone();
            spec.seed = first.wrapping_add(i);
            let scan_id = format!("phantom_{:06}", spec.seed);
            Job {
                rel: PathBuf::from(&scan_id),
                scan_id,
                source_id: 0,
                class: None,
                spec,
            }
        })
        .collect())
}

fn write_one(job: &Job, output: &Path) -> Result<PhantomIndexEntry> {
    let (vol, truth) =
        generate_phantom(&job.spec).with_context(|| format!("phantom {}", job.scan_id))?;
    let vol = vol
        .with_scan_id(job.scan_id.clone())
        .with_source_id(job.source_id);
    let dir = output.join(&job.rel);
    save_volume_with_class(&vol, &dir, job.class)?;
    let side = GroundTruthSidecar {
        format_version: FORMAT_VERSION,
        scan_id: job.scan_id.clone(),
        seed: job.spec.seed,
        truth,
    };
    write_manifest(&side, &dir.join(GROUND_TRUTH))?;
    Ok(PhantomIndexEntry {
        path: job.rel.to_string_lossy().replace('\\', "/"),
        scan_id: job.scan_id.clone(),
        source_id: job.source_id,
        class: job.class,
        seed: job.spec.seed,
        n_slices: job.spec.n_slices,
    })
}

/// Writes phantoms with ground truth under `args.output` and an index file.
pub fn run_phantom(args: &PhantomArgs) -> Result<Vec<PhantomIndexEntry>> {
    let jobs = jobs_for(args)?;
    let threads = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    anyhow::ensure!(threads >= 1, "--jobs must be at least 1");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let entries = pool.install(|| {
        jobs.par_iter()
            .map(|j| write_one(j, &args.output))
            .collect::<Result<Vec<_>>>()
    })?;
    let index = PhantomIndex {
        format_version: FORMAT_VERSION,
        phantoms: entries.clone(),
    };
    write_manifest(&index, &args.output.join(PHANTOM_INDEX))?;
    Ok(entries)
}
