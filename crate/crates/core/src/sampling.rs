//! Seeded sampling on the unit sphere of C^{n+1}.
//!
//! All randomness in the library flows through [`seeded_rng`], so a seed fully
//! determines every sampled quantity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, vector_norm, CMatrix, CVector};

pub type SampleRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for task `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Seed for task `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, index).next_u64()
}

/// Complex Gaussian vector; normalized it is uniform on the sphere.
pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn sphere_point<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    loop {
        let v = gaussian_vector(rng, len);
        let norm = vector_norm(&v);
        if norm > 1e-8 {
            return v.unscale(norm);
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary matrix (QR of a Gaussian matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    num_complex::Complex64::from_polar(1.0, theta)
}
