use serde::{Deserialize, Serialize};

use super::embedding::{cell_error, centroid, intra_class_distance};
use super::{fisher_score, inter_source_variance, separability, Class, EmbeddingSet};
use crate::error::{Error, Result};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
/// One value per class; `None` where the class spans fewer than two sources.
pub struct PerClass {
    pub covid: Option<f64>,
    pub non_covid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellCentroid {
    pub source_id: u32,
    pub class: Class,
    pub count: usize,
    pub centroid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDistance {
    pub source_id: u32,
    pub class: Class,
    pub intra_class_distance: f64,
}

/// Discriminability and cross-source consistency of one embedding set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub format_version: u32,
    pub fisher_score: f64,
    pub separability: f64,
    pub inter_source_variance: PerClass,
    pub centroids: Vec<CellCentroid>,
    pub intra_class_distances: Vec<CellDistance>,
}

impl MetricsReport {
    /// Name of the first non-finite number in the report, if any.
    pub fn non_finite_field(&self) -> Option<String> {
        let isv = &self.inter_source_variance;
        let scalars = [
            ("fisher_score", self.fisher_score),
            ("separability", self.separability),
            ("inter_source_variance.covid", isv.covid.unwrap_or(0.0)),
            (
                "inter_source_variance.non_covid",
                isv.non_covid.unwrap_or(0.0),
            ),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return Some(name.to_string());
        }
        for c in &self.centroids {
            if c.centroid.iter().any(|v| !v.is_finite()) {
                return Some(format!("centroids[{}, {}]", c.source_id, c.class));
            }
        }
        self.intra_class_distances
            .iter()
            .find(|d| !d.intra_class_distance.is_finite())
            .map(|d| format!("intra_class_distances[{}, {}]", d.source_id, d.class))
    }

    /// Table-style summary: one header line, one value line.
    pub fn table(&self) -> String {
        let cell = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
        format!(
            "{:>14} {:>14} {:>18} {:>22}\n{:>14.6} {:>14.6} {:>18} {:>22}\n",
            "Fisher Score",
            "Separability",
            "Inter-src (COVID)",
            "Inter-src (non-COVID)",
            self.fisher_score,
            self.separability,
            cell(self.inter_source_variance.covid),
            cell(self.inter_source_variance.non_covid),
        )
    }
}

fn defined(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::TooFewSources { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Computes every metric for `set`. Every (source, class) cell must hold at
/// least two vectors; the first offending cell is named in the error. A
/// single-source set gets `null` inter-source variances.
pub fn analyze(set: &EmbeddingSet) -> Result<MetricsReport> {
    let mut centroids = Vec::new();
    let mut distances = Vec::new();
    for s in set.source_ids() {
        for class in Class::ALL {
            let size = set.cell(s, class).len();
            if size < 2 {
                return Err(cell_error(s, class, size, 2));
            }
            centroids.push(CellCentroid {
                source_id: s,
                class,
                count: size,
                centroid: centroid(set, s, class)?,
            });
            distances.push(CellDistance {
                source_id: s,
                class,
                intra_class_distance: intra_class_distance(set, s, class)?,
            });
        }
    }
    Ok(MetricsReport {
        format_version: REPORT_FORMAT_VERSION,
        fisher_score: fisher_score(set)?,
        separability: separability(set)?,
        inter_source_variance: PerClass {
            covid: defined(inter_source_variance(set, Class::Covid))?,
            non_covid: defined(inter_source_variance(set, Class::NonCovid))?,
        },
        centroids,
        intra_class_distances: distances,
    })
}
