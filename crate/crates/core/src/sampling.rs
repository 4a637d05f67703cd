//! Seeded random inputs: targets, subspaces, operators and Jordan data.
//!
//! Every sampler draws from a caller-owned generator, and [`rng`] builds the
//! one generator type used across the crate from a 64-bit seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::matrix::{BlockSpec, Matrix};
use crate::subspace::Subspace;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Uniform point on the unit sphere of R^n.
pub fn unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `dim`-dimensional subspace of R^n spanned by a standard normal frame.
pub fn random_subspace<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Result<Subspace> {
    if dim == 0 || dim > n {
        return Err(invalid(format!("cannot draw a {dim}-dimensional subspace of R^{n}")));
    }
    loop {
        if let Ok(s) = Subspace::from_columns(&gaussian_matrix(rng, n, dim)) {
            return Ok(s);
        }
    }
}

/// Orthogonal `n x n` matrix (orthonormalized standard normal matrix).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    loop {
        if let Ok(s) = Subspace::from_columns(&gaussian_matrix(rng, n, n)) {
            return s.frame().clone();
        }
    }
}

/// `U diag(s) V^T` with orthogonal `U, V` and singular values log-uniform in
/// `[1, cond_max]`, so the 2-norm condition number is at most `cond_max`.
pub fn random_well_conditioned<R: Rng>(rng: &mut R, n: usize, cond_max: f64) -> Result<Matrix> {
    if n == 0 || !(cond_max >= 1.0) {
        return Err(invalid("need n >= 1 and a condition bound >= 1"));
    }
    let u = random_orthogonal(rng, n);
    let v = random_orthogonal(rng, n);
    let log_max = cond_max.ln();
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        (rng.random::<f64>() * log_max).exp()
    }));
    Matrix::from_dmatrix(u * s * v.transpose())
}

/// A block with modulus in `[0.5, 2]`, angle in `(0.1, pi - 0.1)` for real
/// blocks, and relative size in `1..=max_rho`.
pub fn random_block_spec<R: Rng>(rng: &mut R, max_rho: usize) -> Result<BlockSpec> {
    let rho = rng.random_range(1..=max_rho.max(1));
    let modulus = rng.random_range(0.5..2.0);
    if rng.random_bool(0.5) {
        BlockSpec::classical(if rng.random_bool(0.5) { modulus } else { -modulus }, rho)
    } else {
        let angle = rng.random_range(0.1..std::f64::consts::PI - 0.1);
        BlockSpec::real(modulus, angle, rho)
    }
}
