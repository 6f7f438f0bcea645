//! Seeded randomness. Every random draw in the crate goes through
//! [`stream`], which derives an independent ChaCha stream per (seed, index)
//! pair so that batch jobs give the same answer serially or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, C64};

pub type SampleRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian (`E|z|² = 1`).
pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn unimodular(rng: &mut impl Rng) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary: Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(n, n, rng);
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut v: Vec<C64> = (0..n).map(|i| g.get(i, j)).collect();
        // Two passes of modified Gram-Schmidt keep the columns orthonormal to
        // machine precision.
        for _ in 0..2 {
            for k in 0..j {
                let dot: C64 = (0..n).map(|i| q.get(i, k).conj() * v[i]).sum();
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi -= dot * q.get(i, k);
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, vi) in v.iter().enumerate() {
            q.set(i, j, vi / norm);
        }
    }
    q
}
