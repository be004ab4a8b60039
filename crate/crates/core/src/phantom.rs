//! Synthetic lung phantoms with exactly known masks, areas and bounding box.
//!
//! Each slice holds two disjoint axis-aligned ellipses at `lung_level` over a
//! `background_level` field. Ellipse sizes are solved per slice so that the
//! combined pixel count tracks `lung_profile[i] * width * height`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Class;
use crate::spatial::BoundingBox;
use crate::volume::{BitDepth, ScanVolume};

/// Largest lung fraction the two-ellipse layout can render.
pub const MAX_LUNG_FRACTION: f64 = 0.30;

/// Smallest accepted slice edge.
pub const MIN_PHANTOM_EDGE: usize = 16;

// Ellipse layout at full scale, as fractions of width / height.
const LEFT_CX: f64 = 0.30;
const RIGHT_CX: f64 = 0.70;
const CENTER_CY: f64 = 0.50;
const MAX_RX: f64 = 0.17;
const MAX_RY: f64 = 0.32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhantomSpec {
    pub n_slices: usize,
    pub width: usize,
    pub height: usize,
    /// Intended lung-area fraction per slice.
    pub lung_profile: Vec<f64>,
    #[serde(default)]
    pub noise_sigma: f64,
    pub background_level: u16,
    pub lung_level: u16,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bit_depth")]
    pub bit_depth: BitDepth,
}

fn default_bit_depth() -> BitDepth {
    BitDepth::Eight
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self::with_bell_profile(64, 128, 128, 0.25, 0)
    }
}

impl PhantomSpec {
    /// A spec whose lung fraction rises from zero at the apex to `peak`
    /// mid-scan and falls back to zero at the base.
    pub fn with_bell_profile(
        n_slices: usize,
        width: usize,
        height: usize,
        peak: f64,
        seed: u64,
    ) -> Self {
        Self {
            n_slices,
            width,
            height,
            lung_profile: bell_profile(n_slices, peak),
            noise_sigma: 5.0,
            background_level: 30,
            lung_level: 220,
            seed,
            bit_depth: BitDepth::Eight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < MIN_PHANTOM_EDGE || self.height < MIN_PHANTOM_EDGE || self.n_slices == 0 {
            return Err(Error::DegenerateDimensions {
                width: self.width,
                height: self.height,
            });
        }
        if self.lung_profile.len() != self.n_slices {
            return Err(Error::ProfileLengthMismatch {
                expected: self.n_slices,
                got: self.lung_profile.len(),
            });
        }
        if let Some(bad) = self
            .lung_profile
            .iter()
            .find(|f| !(0.0..=MAX_LUNG_FRACTION).contains(*f))
        {
            return Err(Error::InvalidPhantom(format!(
                "lung fraction {bad} outside [0, {MAX_LUNG_FRACTION}]"
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidPhantom(format!(
                "noise_sigma {} must be finite and >= 0",
                self.noise_sigma
            )));
        }
        let max = self.bit_depth.max_value();
        if self.background_level > max || self.lung_level > max {
            return Err(Error::InvalidPhantom(format!(
                "intensity levels must not exceed {max}"
            )));
        }
        Ok(())
    }
}

/// Zero at both ends, `peak` in the middle.
pub fn bell_profile(n_slices: usize, peak: f64) -> Vec<f64> {
    (0..n_slices)
        .map(|i| {
            let t = (i as f64 + 0.5) / n_slices as f64;
            // the outer 5% on each side carries no lung
            let u = ((t - 0.05) / 0.90).clamp(0.0, 1.0);
            peak * (std::f64::consts::PI * u).sin().max(0.0)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub bbox: BoundingBox,
    pub area_per_slice: Vec<u64>,
}

#[derive(Debug, Clone, Copy)]
struct Ellipse {
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
}

impl Ellipse {
    /// Inclusive column span of the ellipse on `row`, sampled at pixel centers.
    fn row_span(&self, row: usize, width: usize) -> Option<(usize, usize)> {
        if self.rx <= 0.0 || self.ry <= 0.0 {
            return None;
        }
        let dy = (row as f64 + 0.5 - self.cy) / self.ry;
        let rem = 1.0 - dy * dy;
        if rem < 0.0 {
            return None;
        }
        let half = self.rx * rem.sqrt();
        let lo = (self.cx - half - 0.5).ceil().max(0.0);
        let hi = (self.cx + half - 0.5).floor().min(width as f64 - 1.0);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }
}

struct Layout {
    width: usize,
    height: usize,
}

impl Layout {
    fn lungs(&self, scale: f64) -> [Ellipse; 2] {
        let (w, h) = (self.width as f64, self.height as f64);
        let rx = MAX_RX * w * scale;
        let ry = MAX_RY * h * scale;
        [
            Ellipse {
                cx: LEFT_CX * w,
                cy: CENTER_CY * h,
                rx,
                ry,
            },
            Ellipse {
                cx: RIGHT_CX * w,
                cy: CENTER_CY * h,
                rx,
                ry,
            },
        ]
    }

    fn count(&self, scale: f64) -> u64 {
        self.lungs(scale)
            .iter()
            .map(|e| {
                (0..self.height)
                    .filter_map(|r| e.row_span(r, self.width))
                    .map(|(lo, hi)| (hi - lo + 1) as u64)
                    .sum::<u64>()
            })
            .sum()
    }

    /// Scale whose rendered pixel count is closest to `target`.
    fn solve_scale(&self, target: f64) -> f64 {
        if target <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if (self.count(mid) as f64) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let below = self.count(lo) as f64;
        let above = self.count(hi) as f64;
        if (target - below).abs() <= (above - target).abs() {
            lo
        } else {
            hi
        }
    }
}

/// Renders the phantom described by `spec`; deterministic in `spec.seed`.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<(ScanVolume, GroundTruth)> {
    spec.validate()?;
    let (width, height) = (spec.width, spec.height);
    let layout = Layout { width, height };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = if spec.noise_sigma > 0.0 {
        Some(Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidPhantom(e.to_string()))?)
    } else {
        None
    };
    let max = spec.bit_depth.max_value() as f64;

    let mut slices = Vec::with_capacity(spec.n_slices);
    let mut areas = Vec::with_capacity(spec.n_slices);
    let mut bbox = BoundingBox::empty();
    let mut lung = vec![false; width * height];

    for &fraction in &spec.lung_profile {
        let scale = layout.solve_scale(fraction * (width * height) as f64);
        lung.fill(false);
        let mut area = 0u64;
        for e in layout.lungs(scale) {
            for row in 0..height {
                if let Some((lo, hi)) = e.row_span(row, width) {
                    lung[row * width + lo..=row * width + hi].fill(true);
                    area += (hi - lo + 1) as u64;
                    bbox.include(row, lo);
                    bbox.include(row, hi);
                }
            }
        }
        areas.push(area);

        let slice = lung
            .iter()
            .map(|&is_lung| {
                let base = if is_lung {
                    spec.lung_level
                } else {
                    spec.background_level
                };
                match &noise {
                    Some(n) => (base as f64 + n.sample(&mut rng)).round().clamp(0.0, max) as u16,
                    None => base,
                }
            })
            .collect();
        slices.push(slice);
    }

    let volume = ScanVolume::new(width, height, spec.bit_depth, slices)?;
    Ok((
        volume,
        GroundTruth {
            bbox,
            area_per_slice: areas,
        },
    ))
}

/// Scan counts for one source of a phantom corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub source_id: u32,
    pub covid: usize,
    pub non_covid: usize,
}

/// A multi-source phantom corpus: per-source scan counts plus a base spec
/// that each source perturbs (slice count, background level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub sources: Vec<SourceCounts>,
    pub base: PhantomSpec,
    #[serde(default = "default_peak")]
    pub peak_fraction: f64,
}

fn default_peak() -> f64 {
    0.25
}

/// Four-source COVID / non-COVID scan counts of the reference challenge
/// data, divided by ten and rounded.
pub const DESK_SCALE_COUNTS: [SourceCounts; 4] = [
    SourceCounts {
        source_id: 0,
        covid: 22,
        non_covid: 21,
    },
    SourceCounts {
        source_id: 1,
        covid: 22,
        non_covid: 21,
    },
    SourceCounts {
        source_id: 2,
        covid: 4,
        non_covid: 21,
    },
    SourceCounts {
        source_id: 3,
        covid: 22,
        non_covid: 21,
    },
];

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            sources: DESK_SCALE_COUNTS.to_vec(),
            base: PhantomSpec::with_bell_profile(32, 64, 64, 0.25, 0),
            peak_fraction: default_peak(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub scan_id: String,
    pub source_id: u32,
    pub class: Class,
    pub spec: PhantomSpec,
}

impl CorpusSpec {
    /// Expands the corpus into one phantom spec per scan, in a fixed order.
    pub fn entries(&self) -> Vec<CorpusEntry> {
        let mut out = Vec::new();
        let mut k = 0u64;
        for counts in &self.sources {
            let s = counts.source_id;
            // sources differ in scan length and background offset
            let n_slices =
                ((self.base.n_slices as f64) * (1.0 + 0.25 * (s % 4) as f64)).round() as usize;
            let background = self
                .base
                .background_level
                .saturating_add(5 * (s % 4) as u16)
                .min(self.base.bit_depth.max_value());
            for (class, count) in [
                (Class::Covid, counts.covid),
                (Class::NonCovid, counts.non_covid),
            ] {
                for i in 0..count {
                    let mut spec = self.base.clone();
                    spec.n_slices = n_slices.max(1);
                    spec.lung_profile = bell_profile(spec.n_slices, self.peak_fraction);
                    spec.background_level = background;
                    spec.seed = self.base.seed.wrapping_add(k);
                    k += 1;
                    out.push(CorpusEntry {
                        scan_id: format!("{}_{:03}", class.as_str(), i),
                        source_id: s,
                        class,
                        spec,
                    });
                }
            }
        }
        out
    }
}
