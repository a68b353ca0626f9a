//! Seeded, reproducible randomness.
//!
//! Every consumer derives its own stream from `(seed, stream)` so that
//! restarts can run in any order and still draw identical numbers.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::CMatrix;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Complex number with independent standard normal real and imaginary parts.
pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

pub fn gaussian_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    CMatrix::from_vec(rows, cols, data).expect("sized by construction")
}

pub fn gaussian_vec(rng: &mut Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex_normal(rng)).collect()
}
