use super::Class;
use crate::error::{Error, Result};

/// Feature vectors tagged with a class label and an acquisition source.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    labels: Vec<Class>,
    sources: Vec<u32>,
    scan_ids: Vec<String>,
}

impl EmbeddingSet {
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<Class>, sources: Vec<u32>) -> Result<Self> {
        let ids = (0..vectors.len()).map(|i| i.to_string()).collect();
        Self::with_scan_ids(vectors, labels, sources, ids)
    }

    pub fn with_scan_ids(
        vectors: Vec<Vec<f64>>,
        labels: Vec<Class>,
        sources: Vec<u32>,
        scan_ids: Vec<String>,
    ) -> Result<Self> {
        let dim = vectors.first().ok_or(Error::EmptyEmbeddings)?.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                index: 0,
                got: 0,
                expected: 1,
            });
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    got: v.len(),
                    expected: dim,
                });
            }
        }
        let n = vectors.len();
        for len in [labels.len(), sources.len(), scan_ids.len()] {
            if len != n {
                return Err(Error::LengthMismatch(n, len));
            }
        }
        Ok(Self {
            dim,
            vectors,
            labels,
            sources,
            scan_ids,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    pub fn scan_ids(&self) -> &[String] {
        &self.scan_ids
    }

    /// Distinct source ids, ascending.
    pub fn source_ids(&self) -> Vec<u32> {
        let mut ids = self.sources.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Vectors of one (source, class) cell, in input order.
    pub fn cell(&self, source_id: u32, class: Class) -> Vec<&[f64]> {
        self.iter()
            .filter(|&(_, c, s)| c == class && s == source_id)
            .map(|(v, _, _)| v)
            .collect()
    }

    /// Vectors of one class pooled over every source.
    pub fn class(&self, class: Class) -> Vec<&[f64]> {
        self.iter()
            .filter(|&(_, c, _)| c == class)
            .map(|(v, _, _)| v)
            .collect()
    }

    /// Applies `f` to every vector, keeping labels and sources.
    pub fn map_vectors(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<EmbeddingSet> {
        EmbeddingSet::with_scan_ids(
            self.vectors.iter().map(|v| f(v)).collect(),
            self.labels.clone(),
            self.sources.clone(),
            self.scan_ids.clone(),
        )
    }

    fn iter(&self) -> impl Iterator<Item = (&[f64], Class, u32)> {
        self.vectors
            .iter()
            .zip(&self.labels)
            .zip(&self.sources)
            .map(|((v, &c), &s)| (v.as_slice(), c, s))
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (a, b) = values.split_at(values.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn mean_vector(vectors: &[&[f64]]) -> Vec<f64> {
    let dim = vectors[0].len();
    let n = vectors.len() as f64;
    let mut column = Vec::with_capacity(vectors.len());
    (0..dim)
        .map(|k| {
            column.clear();
            column.extend(vectors.iter().map(|v| v[k]));
            pairwise_sum(&column) / n
        })
        .collect()
}

/// Mean distance over all unordered pairs; callers guarantee `len >= 2`.
fn mean_pairwise_distance(vectors: &[&[f64]]) -> f64 {
    let n = vectors.len();
    let mut row = Vec::with_capacity(n);
    let row_sums: Vec<f64> = (0..n - 1)
        .map(|i| {
            row.clear();
            row.extend(vectors[i + 1..].iter().map(|v| euclidean(vectors[i], v)));
            pairwise_sum(&row)
        })
        .collect();
    let pairs = (n * (n - 1) / 2) as f64;
    pairwise_sum(&row_sums) / pairs
}

/// Mean feature vector of a (source, class) cell.
pub fn centroid(set: &EmbeddingSet, source_id: u32, class: Class) -> Result<Vec<f64>> {
    let cell = set.cell(source_id, class);
    if cell.is_empty() {
        return Err(Error::EmptyCell { source_id, class });
    }
    Ok(mean_vector(&cell))
}

/// Average Euclidean distance over all unordered pairs of a cell.
pub fn intra_class_distance(set: &EmbeddingSet, source_id: u32, class: Class) -> Result<f64> {
    let cell = set.cell(source_id, class);
    if cell.len() < 2 {
        return Err(cell_error(source_id, class, cell.len(), 2));
    }
    Ok(mean_pairwise_distance(&cell))
}

pub(crate) fn cell_error(source_id: u32, class: Class, size: usize, needed: usize) -> Error {
    if size == 0 {
        Error::EmptyCell { source_id, class }
    } else {
        Error::CellTooSmall {
            source_id,
            class,
            size,
            needed,
        }
    }
}

/// Global class separation: distance between the pooled class centroids
/// over half the sum of the pooled intra-class spreads.
pub fn fisher_score(set: &EmbeddingSet) -> Result<f64> {
    let covid = set.class(Class::Covid);
    let non = set.class(Class::NonCovid);
    for (class, v) in [(Class::Covid, &covid), (Class::NonCovid, &non)] {
        if v.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                size: v.len(),
            });
        }
    }
    let spread = 0.5 * (mean_pairwise_distance(&covid) + mean_pairwise_distance(&non));
    if spread == 0.0 {
        return Err(Error::DegenerateSpread);
    }
    Ok(euclidean(&mean_vector(&covid), &mean_vector(&non)) / spread)
}

/// Per-source class separation averaged over sources. The denominator is
/// the plain sum of the two spreads, unlike [`fisher_score`].
pub fn separability(set: &EmbeddingSet) -> Result<f64> {
    let sources = set.source_ids();
    let mut terms = Vec::with_capacity(sources.len());
    for &s in &sources {
        let covid = set.cell(s, Class::Covid);
        let non = set.cell(s, Class::NonCovid);
        for (class, v) in [(Class::Covid, &covid), (Class::NonCovid, &non)] {
            if v.len() < 2 {
                return Err(cell_error(s, class, v.len(), 2));
            }
        }
        let spread = mean_pairwise_distance(&covid) + mean_pairwise_distance(&non);
        if spread == 0.0 {
            return Err(Error::DegenerateSourceSpread { source_id: s });
        }
        terms.push(euclidean(&mean_vector(&covid), &mean_vector(&non)) / spread);
    }
    Ok(pairwise_sum(&terms) / terms.len() as f64)
}

/// Mean distance between the class centroids of every pair of sources that
/// hold the class.
pub fn inter_source_variance(set: &EmbeddingSet, class: Class) -> Result<f64> {
    let centroids: Vec<Vec<f64>> = set
        .source_ids()
        .into_iter()
        .filter_map(|s| {
            let cell = set.cell(s, class);
            (!cell.is_empty()).then(|| mean_vector(&cell))
        })
        .collect();
    if centroids.len() < 2 {
        return Err(Error::TooFewSources {
            class,
            found: centroids.len(),
        });
    }
    let refs: Vec<&[f64]> = centroids.iter().map(Vec::as_slice).collect();
    Ok(mean_pairwise_distance(&refs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fisher_example(sources: &[u32]) -> EmbeddingSet {
        let mut v = Vec::new();
        let mut l = Vec::new();
        let mut s = Vec::new();
        for &src in sources {
            for (p, c) in [
                ([0.0, 0.0], Class::Covid),
                ([0.0, 2.0], Class::Covid),
                ([10.0, 0.0], Class::NonCovid),
                ([10.0, 2.0], Class::NonCovid),
            ] {
                v.push(p.to_vec());
                l.push(c);
                s.push(src);
            }
        }
        EmbeddingSet::new(v, l, s).unwrap()
    }

    #[test]
    fn centroid_midpoint_and_singleton() {
        let e = EmbeddingSet::new(
            vec![vec![1.0, 1.0], vec![3.0, 3.0], vec![7.0, -1.0]],
            vec![Class::Covid, Class::Covid, Class::NonCovid],
            vec![0, 0, 0],
        )
        .unwrap();
        assert_eq!(centroid(&e, 0, Class::Covid).unwrap(), vec![2.0, 2.0]);
        assert_eq!(centroid(&e, 0, Class::NonCovid).unwrap(), vec![7.0, -1.0]);
        assert!(matches!(
            centroid(&e, 1, Class::Covid),
            Err(Error::EmptyCell {
                source_id: 1,
                class: Class::Covid
            })
        ));
    }

    #[test]
    fn intra_class_examples() {
        let e = EmbeddingSet::new(
            vec![vec![0.0, 0.0], vec![3.0, 4.0]],
            vec![Class::Covid; 2],
            vec![0; 2],
        )
        .unwrap();
        assert_eq!(intra_class_distance(&e, 0, Class::Covid).unwrap(), 5.0);
        let e = EmbeddingSet::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![Class::Covid; 3],
            vec![0; 3],
        )
        .unwrap();
        assert!((intra_class_distance(&e, 0, Class::Covid).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let single = EmbeddingSet::new(vec![vec![0.0]], vec![Class::Covid], vec![0]).unwrap();
        assert!(matches!(
            intra_class_distance(&single, 0, Class::Covid),
            Err(Error::CellTooSmall { size: 1, .. })
        ));
    }

    #[test]
    fn fisher_and_separability_hand_values() {
        let e = fisher_example(&[0]);
        assert_eq!(fisher_score(&e).unwrap(), 5.0);
        assert_eq!(separability(&e).unwrap(), 2.5);
        assert_eq!(separability(&fisher_example(&[0, 1])).unwrap(), 2.5);
    }

    #[test]
    fn coincident_centroids_score_zero() {
        let e = EmbeddingSet::new(
            vec![vec![0.0], vec![2.0], vec![-1.0], vec![3.0]],
            vec![Class::Covid, Class::Covid, Class::NonCovid, Class::NonCovid],
            vec![0; 4],
        )
        .unwrap();
        assert_eq!(fisher_score(&e).unwrap(), 0.0);
        assert_eq!(separability(&e).unwrap(), 0.0);
    }

    #[test]
    fn zero_spread_is_degenerate() {
        let e = EmbeddingSet::new(
            vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]],
            vec![Class::Covid, Class::Covid, Class::NonCovid, Class::NonCovid],
            vec![0; 4],
        )
        .unwrap();
        assert!(matches!(fisher_score(&e), Err(Error::DegenerateSpread)));
        assert!(matches!(
            separability(&e),
            Err(Error::DegenerateSourceSpread { source_id: 0 })
        ));
    }

    #[test]
    fn equilateral_sources() {
        let h = 3f64.sqrt() / 2.0;
        let e = EmbeddingSet::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]],
            vec![Class::Covid; 3],
            vec![0, 1, 2],
        )
        .unwrap();
        assert!((inter_source_variance(&e, Class::Covid).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            inter_source_variance(&e, Class::NonCovid),
            Err(Error::TooFewSources { found: 0, .. })
        ));
    }

    #[test]
    fn ragged_vectors_rejected() {
        assert!(matches!(
            EmbeddingSet::new(
                vec![vec![0.0, 1.0], vec![0.0]],
                vec![Class::Covid; 2],
                vec![0; 2]
            ),
            Err(Error::DimensionMismatch { index: 1, .. })
        ));
        assert!(matches!(
            EmbeddingSet::new(vec![], vec![], vec![]),
            Err(Error::EmptyEmbeddings)
        ));
    }
}
