//! Seeded generators for Monte-Carlo trials and random test instances.
//!
//! Every trial draws from its own ChaCha stream keyed by `(seed,
//! trial index)`, so a batch gives the same numbers whatever order (or
//! however many workers) the trials run in.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CMatrix;
use crate::spectral::{HermitianOperator, QuantumState, SpaceLayout, Unitary};
use crate::Result;

pub type TrialRng = ChaCha8Rng;

/// Independent stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval (0, 1).
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard normal via Box–Muller.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1 = open_unit(rng);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

/// GUE-like Hermitian matrix with entries of typical size `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Result<HermitianOperator> {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(standard_normal(rng) * scale, 0.0);
        for j in (i + 1)..dim {
            let z = complex_normal(rng) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m)
}

/// Haar-random pure state on `layout`.
pub fn haar_state<R: Rng + ?Sized>(rng: &mut R, layout: SpaceLayout) -> Result<QuantumState> {
    let amps: Vec<Complex64> = (0..layout.total_dim()).map(|_| complex_normal(rng)).collect();
    QuantumState::normalized(layout, amps)
}

/// `exp(-i K)` for a random Hermitian `K` of entry scale `scale`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> Result<Unitary> {
    Unitary::exp_i(&random_hermitian(rng, dim, scale)?)
}
