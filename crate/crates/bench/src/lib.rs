//! Fixed inputs shared by the benchmarks in `benches/`.

use schottky_core::schottky::{enumerate_reduced_words, sample_interior_points};
use schottky_core::{nori_build, sampling, ProjMap, ProjPoint, ReducedWord, SchottkyData, SubspaceConfig, Tolerances};

pub const SEED: u64 = 17;

pub fn nori_group() -> SchottkyData {
    nori_build(3, 2, 0.2, &SubspaceConfig::CoordinateDefault).expect("valid Nori parameters")
}

/// Seeded maps on P^n with modulus gaps of at least `gap`.
pub fn random_maps(n: usize, count: usize, gap: f64) -> Vec<ProjMap> {
    let mut rng = sampling::seeded_rng(SEED);
    (0..count).map(|_| ProjMap::random_with_gap(&mut rng, n, gap)).collect()
}

pub struct WordWorkload {
    pub data: SchottkyData,
    pub words: Vec<ReducedWord>,
    pub points: Vec<ProjPoint>,
}

pub fn word_workload(max_len: usize, points: usize) -> WordWorkload {
    let data = nori_group();
    let words = enumerate_reduced_words(data.g(), max_len).collect();
    let points = sample_interior_points(&data, points, SEED, &Tolerances::default()).expect("interior points exist");
    WordWorkload { data, words, points }
}
