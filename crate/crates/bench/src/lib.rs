//! Fixtures shared by the benchmarks.

use ctstd_core::{generate_phantom, Class, EmbeddingSet, PhantomSpec, ScanVolume};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Noisy bell-profile phantom of the given shape.
pub fn phantom_volume(n_slices: usize, width: usize, height: usize) -> ScanVolume {
    generate_phantom(&PhantomSpec::with_bell_profile(
        n_slices, width, height, 0.25, 1,
    ))
    .expect("valid phantom")
    .0
}

/// Per-slice lung areas of a bell-shaped scan with mild jitter.
pub fn area_profile(n_slices: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ctstd_core::phantom::bell_profile(n_slices, 30_000.0)
        .into_iter()
        .map(|a| (a + rng.random_range(0.0..500.0)).round())
        .collect()
}

/// Balanced embeddings: `per_cell` vectors for every (source, class).
pub fn embedding_set(n_sources: u32, per_cell: usize, dim: usize, seed: u64) -> EmbeddingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut v, mut l, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for src in 0..n_sources {
        for class in Class::ALL {
            let shift = if class == Class::Covid { 1.0 } else { -1.0 };
            for _ in 0..per_cell {
                v.push(
                    (0..dim)
                        .map(|_| shift + rng.random_range(-1.0..1.0))
                        .collect(),
                );
                l.push(class);
                s.push(src);
            }
        }
    }
    EmbeddingSet::new(v, l, s).expect("consistent set")
}
