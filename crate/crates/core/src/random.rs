//! Seeded samplers for random symplectics, passive transformations and states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::symplectic::{
    symplectic_from_hamiltonian, CovarianceMatrix, QuadraticHamiltonian, SymplecticMatrix,
};

/// Symmetric `2n × 2n` matrix with independent entries uniform in `[-scale, scale]`.
pub fn hamiltonian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> QuadraticHamiltonian {
    let dim = 2 * n;
    let mut g = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = rng.random_range(-scale..=scale);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    QuadraticHamiltonian::new(g).expect("symmetric by construction")
}

/// `exp(2σg)` for a random `g` with entries in `[-scale, scale]`.
pub fn symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> SymplecticMatrix {
    symplectic_from_hamiltonian(&hamiltonian(rng, n, scale), 1.0)
}

/// Random `n × n` unitary from Gram-Schmidt on a Gaussian-like complex matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    m.qr().q()
}

pub fn passive<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymplecticMatrix {
    SymplecticMatrix::passive_from_unitary(&unitary(rng, n)).expect("QR factor is unitary")
}

/// `S (⊕ ν_k 𝟙) Sᵀ` with `ν_k ∈ [1, 1 + thermal]` and a random symplectic `S`.
pub fn covariance<R: Rng + ?Sized>(rng: &mut R, n: usize, thermal: f64, scale: f64) -> CovarianceMatrix {
    let nus: Vec<f64> = (0..n).map(|_| 1.0 + rng.random_range(0.0..=thermal)).collect();
    let core = CovarianceMatrix::thermal(&nus).expect("positive diagonal");
    let s = symplectic(rng, n, scale);
    let m = s.matrix() * core.matrix() * s.matrix().transpose();
    CovarianceMatrix::new(crate::linalg::symmetrize(&m)).expect("congruence of a valid matrix")
}
