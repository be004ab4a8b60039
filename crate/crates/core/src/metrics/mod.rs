//! Feature-space analysis over labelled, source-tagged embeddings, and the
//! binary classification scores used to evaluate them.

mod classification;
mod embedding;
mod report;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use classification::{auc_roc, macro_f1};
pub use embedding::{
    centroid, euclidean, fisher_score, inter_source_variance, intra_class_distance, pairwise_sum,
    separability, EmbeddingSet,
};
pub use report::{
    analyze, CellCentroid, CellDistance, MetricsReport, PerClass, REPORT_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Covid,
    NonCovid,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::Covid, Class::NonCovid];

    pub fn as_str(self) -> &'static str {
        match self {
            Class::Covid => "covid",
            Class::NonCovid => "non_covid",
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::Covid => Class::NonCovid,
            Class::NonCovid => Class::Covid,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "covid" => Ok(Class::Covid),
            "non_covid" => Ok(Class::NonCovid),
            other => Err(format!("unknown label {other:?}")),
        }
    }
}
