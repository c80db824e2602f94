#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qpurify::qmath::{validate_density, ComplexMatrix, DensityMatrix, TOL_DENSITY};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    ComplexMatrix::new((&g + g.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

/// Full-rank with probability one.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim);
    let m = &g * g.adjoint();
    let tr = m.trace();
    validate_density(&ComplexMatrix::new(m / tr).unwrap(), TOL_DENSITY).unwrap()
}
