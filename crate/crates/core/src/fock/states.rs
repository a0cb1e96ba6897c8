use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::gates::{apply_passive, apply_single_mode, displacement_matrix, squeezer_matrix};
use super::{FockBasis, FockDensity, FockOperator, FockVector, ZERO};
use crate::entanglement::PURITY_TOL;
use crate::error::{Error, Result};
use crate::symplectic::{self, GaussianState};

/// Largest truncated mass accepted when converting Gaussian states.
pub const FOCK_TAIL_LIMIT: f64 = 1e-4;

/// Extra levels per mode used while building states before cropping.
const MARGIN: usize = 12;

pub fn number_state(occ: &[usize], cutoff: usize) -> Result<FockVector> {
    if occ.iter().any(|&n| n >= cutoff) {
        return Err(Error::param("occupation exceeds the cutoff"));
    }
    let basis = FockBasis::new(occ.len(), cutoff)?;
    let mut amps = DVector::from_element(basis.dim(), ZERO);
    amps[basis.index(occ)] = Complex64::new(1.0, 0.0);
    FockVector::new(occ.len(), cutoff, amps)
}

/// Single-mode thermal state with mean photon number `nbar`, renormalised
/// after truncation.
pub fn thermal_fock(nbar: f64, cutoff: usize) -> Result<FockDensity> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::param("mean photon number must be finite and ≥ 0"));
    }
    let q = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = (0..cutoff).map(|n| q.powi(n as i32) / (nbar + 1.0)).collect();
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    let m = DMatrix::from_diagonal(&DVector::from_iterator(
        cutoff,
        p.into_iter().map(|x| Complex64::new(x, 0.0)),
    ));
    FockDensity::new(1, cutoff, m)
}

/// `√(1 − λ²) Σ_n λⁿ |n, n⟩` with `λ = tanh r`, truncated at `cutoff` levels
/// and renormalised; the discarded mass `λ^{2D}` is recorded as the tail.
pub fn two_mode_squeezed_fock(r: f64, cutoff: usize) -> Result<FockVector> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::param("squeezing must be finite and ≥ 0"));
    }
    if cutoff < 2 {
        return Err(Error::param("cutoff must be at least 2"));
    }
    let basis = FockBasis::new(2, cutoff)?;
    let lambda = r.tanh();
    let tail = lambda.powi(2 * cutoff as i32);
    let scale = ((1.0 - lambda * lambda) / (1.0 - tail)).sqrt();
    let mut amps = DVector::from_element(basis.dim(), ZERO);
    for n in 0..cutoff {
        amps[basis.index(&[n, n])] = Complex64::new(scale * lambda.powi(n as i32), 0.0);
    }
    Ok(FockVector::new(2, cutoff, amps)?.with_tail(tail))
}

struct Factorization {
    /// Thermal occupations of the Williamson modes.
    nbar: Vec<f64>,
    right: DMatrix<Complex64>,
    squeezing: Vec<f64>,
    left: DMatrix<Complex64>,
}

/// `γ = K D L (⊕ ν) Lᵀ D Kᵀ` with passive `K`, `L` given as mode unitaries.
fn factorize(state: &GaussianState) -> Result<Factorization> {
    let w = symplectic::williamson(state.covariance())?;
    let e = symplectic::euler_decomposition(&w.transform.inverse())?;
    let left = e
        .left
        .to_unitary()
        .ok_or_else(|| Error::Decomposition("left Euler factor is not passive".into()))?;
    let right = e
        .right
        .to_unitary()
        .ok_or_else(|| Error::Decomposition("right Euler factor is not passive".into()))?;
    Ok(Factorization {
        nbar: w
            .symplectic_eigenvalues
            .iter()
            .map(|&nu| ((nu - 1.0) / 2.0).max(0.0))
            .collect(),
        right,
        squeezing: e.squeezing.iter().map(|d| d.ln()).collect(),
        left,
    })
}

/// Pure Gaussian state in the number basis, built from squeezed vacua, a
/// passive network and a displacement.
pub fn gaussian_to_fock(state: &GaussianState, cutoff: usize) -> Result<FockVector> {
    let nus = symplectic::symplectic_eigenvalues(state.covariance());
    let impurity = nus.iter().fold(0.0_f64, |a, &v| a.max((v - 1.0).abs()));
    if impurity > PURITY_TOL {
        return Err(Error::NotPure(impurity));
    }
    let f = factorize(state)?;
    let n = state.modes();
    let big = cutoff + MARGIN;
    let mut psi = FockVector::vacuum(n, big)?;
    for (k, &r) in f.squeezing.iter().enumerate() {
        psi = apply_single_mode(&psi, k, &squeezer_matrix(r, big));
    }
    psi = apply_passive(&f.left, &psi)?;
    let d = state.displacement();
    for k in 0..n {
        if d[2 * k] != 0.0 || d[2 * k + 1] != 0.0 {
            psi = apply_single_mode(&psi, k, &displacement_matrix(d[2 * k], d[2 * k + 1], big));
        }
    }
    // mass lost at the enlarged cutoff counts as well as the cropped part
    let built = psi.norm().powi(2);
    let cropped = psi.truncate(cutoff)?;
    let tail = 1.0 - (1.0 - cropped.tail()) * built.min(1.0);
    if tail > FOCK_TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            limit: FOCK_TAIL_LIMIT,
        });
    }
    Ok(cropped.with_tail(tail))
}

fn kron_all(ops: Vec<DMatrix<Complex64>>) -> DMatrix<Complex64> {
    ops.into_iter()
        .reduce(|a, b| a.kronecker(&b))
        .expect("at least one factor")
}

/// Mixed Gaussian state in the number basis, built from a thermal product
/// under passive, squeezing and displacement unitaries, then cropped.
pub fn gaussian_density_to_fock(state: &GaussianState, cutoff: usize) -> Result<FockDensity> {
    let f = factorize(state)?;
    let n = state.modes();
    let big = cutoff + MARGIN;
    let thermal = kron_all(
        f.nbar
            .iter()
            .map(|&nb| thermal_fock(nb, big).map(|t| t.matrix().clone()))
            .collect::<Result<Vec<_>>>()?,
    );
    let basis = FockBasis::new(n, big)?;
    let mut rho = FockDensity::from_parts(basis, thermal);
    rho = rho.conjugate_by(&super::passive_fock(&f.right, big)?)?;
    let sq = kron_all(f.squeezing.iter().map(|&r| squeezer_matrix(r, big)).collect());
    rho = rho.conjugate_by(&FockOperator::new(n, big, sq)?)?;
    rho = rho.conjugate_by(&super::passive_fock(&f.left, big)?)?;
    let d = state.displacement();
    if d.iter().any(|&x| x != 0.0) {
        let disp = kron_all(
            (0..n)
                .map(|k| displacement_matrix(d[2 * k], d[2 * k + 1], big))
                .collect(),
        );
        rho = rho.conjugate_by(&FockOperator::new(n, big, disp)?)?;
    }
    let built = rho.trace();
    let (cropped, lost) = rho.truncate(cutoff)?;
    let tail = 1.0 - (1.0 - lost) * built.min(1.0);
    if tail > FOCK_TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            limit: FOCK_TAIL_LIMIT,
        });
    }
    Ok(cropped)
}
