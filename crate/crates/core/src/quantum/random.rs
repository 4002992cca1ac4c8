//! Seeded random states, unitaries and Hermitian matrices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::games::PlayerId;
use crate::linalg::{c, Matrix, C64};
use crate::quantum::state::QuantumState;

pub fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn unit_vector(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub fn random_state(rng: &mut impl Rng, owners: Vec<PlayerId>) -> Result<QuantumState> {
    let amplitudes = unit_vector(rng, 1 << owners.len());
    QuantumState::new(amplitudes, owners)
}

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> Matrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
        for u in &cols {
            let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    Matrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// `(G + G^dagger)/2` for a complex Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> Matrix {
    let g = Matrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    (&g + &g.adjoint()).scale(0.5)
}

/// Random density matrix of rank at most `rank`.
pub fn random_density(rng: &mut impl Rng, dim: usize, rank: usize) -> Matrix {
    let mut out = Matrix::zeros(dim, dim);
    let weights: Vec<f64> = (0..rank.max(1)).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let v = unit_vector(rng, dim);
        out = &out + &Matrix::outer(&v, &v).scale(w / total);
    }
    out
}
