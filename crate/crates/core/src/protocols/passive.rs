use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{symplectic_eigenvalues, CovarianceMatrix, SymplecticMatrix};

/// Largest log-negativity between two modes reachable from `γ` by a passive
/// transformation: `max(0, −log₂(λ₁λ₂)/2)` with `λ₁ ≤ λ₂` the two smallest
/// eigenvalues of `γ`.
pub fn passive_max_entanglement(gamma: &CovarianceMatrix) -> Result<f64> {
    gamma.require_valid()?;
    if gamma.modes() < 2 {
        return Err(Error::dim("at least two modes are needed"));
    }
    let mut ev: Vec<f64> = linalg::symmetric_eigen(gamma.matrix().clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok((-(ev[0] * ev[1]).log2() / 2.0).max(0.0))
}

#[derive(Debug, Clone)]
pub struct PassiveOptimum {
    pub transform: SymplecticMatrix,
    pub log_negativity: f64,
    /// Output modes carrying the entanglement.
    pub modes: (usize, usize),
}

/// `diag(e^{iψ}) Π_{i<j} G_ij(θ, φ)` from `n²` angles.
fn unitary_from_angles(n: usize, x: &[f64]) -> DMatrix<Complex64> {
    let mut u = DMatrix::<Complex64>::identity(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (theta, phi) = (x[k], x[k + 1]);
            k += 2;
            let (c, s) = (theta.cos(), theta.sin());
            let e = Complex64::from_polar(1.0, phi);
            let mut g = DMatrix::<Complex64>::identity(n, n);
            g[(i, i)] = Complex64::new(c, 0.0);
            g[(j, j)] = Complex64::new(c, 0.0);
            g[(i, j)] = -e * s;
            g[(j, i)] = e.conj() * s;
            u = g * u;
        }
    }
    for i in 0..n {
        let e = Complex64::from_polar(1.0, x[k + i]);
        for c in 0..n {
            u[(i, c)] *= e;
        }
    }
    u
}

/// `−log₂ ν̃` for the partially transposed two-mode reduction, maximised over
/// mode pairs; negative when no pair is entangled.
fn best_pair(gamma: &DMatrix<f64>) -> (f64, (usize, usize)) {
    let n = gamma.nrows() / 2;
    let mut best = (f64::NEG_INFINITY, (0, 1));
    for i in 0..n {
        for j in i + 1..n {
            let mut g = linalg::submatrix_modes(gamma, &[i, j]);
            for k in 0..4 {
                g[(3, k)] = -g[(3, k)];
                g[(k, 3)] = -g[(k, 3)];
            }
            let cov = CovarianceMatrix::new(linalg::symmetrize(&g)).expect("symmetric 4x4");
            let nu = symplectic_eigenvalues(&cov).last().copied().unwrap_or(1.0);
            let value = -nu.log2();
            if value > best.0 {
                best = (value, (i, j));
            }
        }
    }
    best
}

fn objective(gamma: &DMatrix<f64>, n: usize, x: &[f64]) -> (f64, (usize, usize)) {
    let k =
        SymplecticMatrix::passive_from_unitary(&unitary_from_angles(n, x)).expect("unitary by construction");
    best_pair(&(k.matrix() * gamma * k.matrix().transpose()))
}

fn coordinate_search(gamma: &DMatrix<f64>, n: usize, mut x: Vec<f64>) -> (f64, Vec<f64>) {
    let mut f = objective(gamma, n, &x).0;
    let mut step = 0.5;
    let mut sweeps = 0;
    while step > 1e-8 && sweeps < 5000 {
        sweeps += 1;
        let mut moved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let g = objective(gamma, n, &x).0;
                if g > f {
                    f = g;
                    moved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (f, x)
}

/// Searches the passive transformations for the largest two-mode
/// log-negativity. Restart `k` starts from angles drawn by `ChaCha8(seed)` on
/// stream `k`.
pub fn passive_optimizer(gamma: &CovarianceMatrix, restarts: usize, seed: u64) -> Result<PassiveOptimum> {
    gamma.require_valid()?;
    let n = gamma.modes();
    if n < 2 {
        return Err(Error::dim("at least two modes are needed"));
    }
    if restarts == 0 {
        return Err(Error::param("at least one restart is needed"));
    }
    let g = gamma.matrix();
    let runs: Vec<(f64, Vec<f64>)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let x0 = (0..n * n)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect();
            coordinate_search(g, n, x0)
        })
        .collect();
    let best = runs
        .iter()
        .fold(&runs[0], |acc, run| if run.0 > acc.0 { run } else { acc });
    let (value, modes) = objective(g, n, &best.1);
    Ok(PassiveOptimum {
        transform: SymplecticMatrix::passive_from_unitary(&unitary_from_angles(n, &best.1))?,
        log_negativity: value.max(0.0),
        modes,
    })
}
