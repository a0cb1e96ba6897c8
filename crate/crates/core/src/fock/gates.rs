use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{FockBasis, FockOperator, FockVector, ONE, ZERO};
use crate::error::{Error, Result};

fn annihilation_matrix(d: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::from_element(d, d, ZERO);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn annihilation(cutoff: usize) -> Result<FockOperator> {
    FockOperator::new(1, cutoff, annihilation_matrix(cutoff))
}

/// `exp(generator)` built on an enlarged space and cropped back to `cutoff`,
/// so that the boundary of the truncated generator does not leak into the
/// low-photon block.
fn cropped_exp(cutoff: usize, generator: impl Fn(usize) -> DMatrix<Complex64>) -> DMatrix<Complex64> {
    let big = cutoff + cutoff.max(40);
    let e = generator(big).exp();
    e.view((0, 0), (cutoff, cutoff)).into_owned()
}

/// `exp(r/2 (a†² − a²))`, mapping the vacuum onto covariance
/// `diag(e^{2r}, e^{−2r})`.
pub fn squeezer_fock(r: f64, cutoff: usize) -> Result<FockOperator> {
    if !r.is_finite() {
        return Err(Error::param("squeezing must be finite"));
    }
    FockOperator::new(1, cutoff, squeezer_matrix(r, cutoff))
}

fn single_displacement(alpha: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    cropped_exp(cutoff, |d| {
        let a = annihilation_matrix(d);
        a.adjoint() * alpha - a * alpha.conj()
    })
}

/// Displacement that moves the vacuum to first moments `ξ`, i.e.
/// `⊗_k exp(α_k a_k† − α_k* a_k)` with `α_k = (ξ_{x_k} + iξ_{p_k})/√2`.
pub fn displacement_fock(xi: &DVector<f64>, cutoff: usize) -> Result<FockOperator> {
    if xi.is_empty() || !xi.len().is_multiple_of(2) {
        return Err(Error::dim("ξ must have even nonzero length"));
    }
    if xi.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("ξ must be finite"));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = (0..xi.len() / 2)
        .map(|k| single_displacement(Complex64::new(xi[2 * k] * s, xi[2 * k + 1] * s), cutoff))
        .reduce(|acc, b| acc.kronecker(&b))
        .expect("at least one mode");
    FockOperator::new(xi.len() / 2, cutoff, m)
}

/// Weyl operator `W_ξ = exp(i ξᵀσO)`, equal to the displacement by `−ξ`.
pub fn weyl_fock(xi: &DVector<f64>, cutoff: usize) -> Result<FockOperator> {
    displacement_fock(&(-xi), cutoff)
}

/// Number-conserving unitary with `U a_k† U† = Σ_j u_jk a_j†`; on coherent
/// amplitudes it acts as `α ↦ uα`. Exact on every state with at most
/// `cutoff − 1` photons in total.
pub fn passive_fock(u: &DMatrix<Complex64>, cutoff: usize) -> Result<FockOperator> {
    check_unitary(u)?;
    let m = u.nrows();
    let basis = FockBasis::new(m, cutoff)?;
    let mut out = DMatrix::from_element(basis.dim(), basis.dim(), ZERO);
    for col in 0..basis.dim() {
        for (e, c) in passive_column(u, &basis.occupations(col)) {
            if e.iter().all(|&n| n < cutoff) {
                out[(basis.index(&e), col)] = c;
            }
        }
    }
    FockOperator::new(m, cutoff, out)
}

fn check_unitary(u: &DMatrix<Complex64>) -> Result<()> {
    let m = u.nrows();
    if u.ncols() != m || m == 0 {
        return Err(Error::dim("mode transformation must be square"));
    }
    let dev = (u.adjoint() * u - DMatrix::identity(m, m)).camax();
    if dev > 1e-9 {
        return Err(Error::param(format!(
            "mode transformation is not unitary (deviation {dev:e})"
        )));
    }
    Ok(())
}

/// `U|occ⟩` as amplitudes over occupation vectors (untruncated).
fn passive_column(u: &DMatrix<Complex64>, occ: &[usize]) -> HashMap<Vec<usize>, Complex64> {
    let m = u.nrows();
    let mut state: HashMap<Vec<usize>, Complex64> = HashMap::from([(vec![0; m], ONE)]);
    for (k, &nk) in occ.iter().enumerate() {
        for t in 1..=nk {
            let norm = 1.0 / (t as f64).sqrt();
            let mut next: HashMap<Vec<usize>, Complex64> = HashMap::with_capacity(state.len() * m);
            for (e, c) in &state {
                for j in 0..m {
                    let ujk = u[(j, k)];
                    if ujk == ZERO {
                        continue;
                    }
                    let mut f = e.clone();
                    f[j] += 1;
                    let amp = c * ujk * ((f[j] as f64).sqrt() * norm);
                    *next.entry(f).or_insert(ZERO) += amp;
                }
            }
            state = next;
        }
    }
    state
}

/// Applies the passive unitary of `u` to a pure state without forming the
/// full operator; components leaving the truncated space are dropped.
pub(crate) fn apply_passive(u: &DMatrix<Complex64>, psi: &FockVector) -> Result<FockVector> {
    check_unitary(u)?;
    let basis = psi.basis();
    if u.nrows() != basis.modes {
        return Err(Error::dim("mode transformation does not match the state"));
    }
    let mut out = DVector::from_element(basis.dim(), ZERO);
    for (i, &a) in psi.amplitudes().iter().enumerate() {
        if a == ZERO {
            continue;
        }
        for (e, c) in passive_column(u, &basis.occupations(i)) {
            if e.iter().all(|&n| n < basis.cutoff) {
                out[basis.index(&e)] += a * c;
            }
        }
    }
    Ok(FockVector::new(basis.modes, basis.cutoff, out)?.with_tail(psi.tail()))
}

/// Applies a single-mode matrix to `mode` of a pure state.
pub(crate) fn apply_single_mode(psi: &FockVector, mode: usize, op: &DMatrix<Complex64>) -> FockVector {
    let basis = psi.basis();
    let d = basis.cutoff;
    let stride = d.pow((basis.modes - 1 - mode) as u32);
    let amps = psi.amplitudes();
    let mut out = DVector::from_element(basis.dim(), ZERO);
    for i in 0..basis.dim() {
        let n = (i / stride) % d;
        let base = i - n * stride;
        let mut acc = ZERO;
        for k in 0..d {
            acc += op[(n, k)] * amps[base + k * stride];
        }
        out[i] = acc;
    }
    FockVector::new(basis.modes, d, out)
        .expect("same basis")
        .with_tail(psi.tail())
}

pub(crate) fn squeezer_matrix(r: f64, cutoff: usize) -> DMatrix<Complex64> {
    cropped_exp(cutoff, |d| {
        let a = annihilation_matrix(d);
        let ad = a.adjoint();
        (&ad * &ad - &a * &a) * Complex64::new(r / 2.0, 0.0)
    })
}

pub(crate) fn displacement_matrix(x: f64, p: f64, cutoff: usize) -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    single_displacement(Complex64::new(x * s, p * s), cutoff)
}

/// Two-mode beam splitter with amplitudes `T`, `R` (`|T|² + |R|² = 1`):
/// `U a₁† U† = T a₁† − R* a₂†`, `U a₂† U† = R a₁† + T* a₂†`.
pub fn beam_splitter_fock(t: Complex64, r: Complex64, cutoff: usize) -> Result<FockOperator> {
    let norm = t.norm_sqr() + r.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::param(format!("|T|² + |R|² = {norm}, expected 1")));
    }
    let u = DMatrix::from_row_slice(2, 2, &[t, r, -r.conj(), t.conj()]);
    passive_fock(&u, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{moments, FockVector};
    use crate::symplectic::{
        apply_symplectic, symplectic_from_hamiltonian, GaussianState, QuadraticHamiltonian, SymplecticMatrix,
    };
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn trivial_parameters_give_identity() {
        let id = DMatrix::<Complex64>::identity(8, 8);
        assert!((squeezer_fock(0.0, 8).unwrap().matrix() - &id).camax() < 1e-15);
        assert!((displacement_fock(&DVector::zeros(2), 8).unwrap().matrix() - &id).camax() < 1e-15);
        let bs = beam_splitter_fock(ONE, ZERO, 5).unwrap();
        assert!((bs.matrix() - DMatrix::<Complex64>::identity(25, 25)).camax() < 1e-15);
    }

    #[test]
    fn balanced_beam_splitter_on_single_photon() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = beam_splitter_fock(c(s), c(s), 4).unwrap();
        let one = super::super::number_state(&[1, 0], 4).unwrap();
        let out = one.apply(&bs).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, -s, epsilon = 1e-14);
        let vac = FockVector::vacuum(2, 4).unwrap();
        assert!((vac.apply(&bs).unwrap().amplitudes() - vac.amplitudes()).camax() < 1e-15);
    }

    #[test]
    fn beam_splitter_is_unitary_and_number_conserving() {
        let t = Complex64::from_polar(0.6, 0.3);
        let r = Complex64::from_polar(0.8, -1.1);
        let d = 8;
        let bs = beam_splitter_fock(t, r, d).unwrap();
        assert!(bs.unitarity_defect(d - 2) < 1e-8);
        let b = bs.basis();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                if bs.matrix()[(i, j)].norm() > 1e-14 {
                    assert_eq!(b.total(i), b.total(j));
                }
            }
        }
        assert!(beam_splitter_fock(c(0.9), c(0.9), 4).is_err());
    }

    #[test]
    fn beam_splitter_matches_generator_flow() {
        // coherent input: first moments move as the symplectic flow predicts
        let theta: f64 = 0.7;
        let d = 30;
        let xi = DVector::from_vec(vec![0.8, -0.3, 0.2, 0.5]);
        let input = FockVector::vacuum(2, d)
            .unwrap()
            .apply(&displacement_fock(&xi, d).unwrap())
            .unwrap();
        let out = input
            .apply(&beam_splitter_fock(c(theta.cos()), c(theta.sin()), d).unwrap())
            .unwrap();
        let (_, moved) = moments(&out.to_density());
        let s = symplectic_from_hamiltonian(&QuadraticHamiltonian::beam_splitter(theta), 1.0);
        let expected = s.matrix() * &xi;
        assert!((moved - expected).amax() < 1e-8);
    }

    #[test]
    fn squeezed_vacuum_moments() {
        let d = 60;
        for &r in &[0.3, 1.0, -0.5] {
            let v = FockVector::vacuum(1, d)
                .unwrap()
                .apply(&squeezer_fock(r, d).unwrap())
                .unwrap();
            let (g, mean) = moments(&v.to_density());
            let expected =
                apply_symplectic(&GaussianState::vacuum(1), &SymplecticMatrix::squeezer(r)).unwrap();
            let err = (g - expected.covariance().matrix()).amax();
            assert!(err < 1e-4, "r={r} err={err:e}");
            assert!(mean.amax() < 1e-12);
            // only even photon numbers are populated
            for n in (1..d).step_by(2) {
                assert!(v.amplitude(&[n]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn displaced_vacuum_moments() {
        let d = 40;
        let xi = DVector::from_vec(vec![0.6, -0.7]);
        let v = FockVector::vacuum(1, d)
            .unwrap()
            .apply(&displacement_fock(&xi, d).unwrap())
            .unwrap();
        let (g, mean) = moments(&v.to_density());
        assert!((mean - &xi).amax() < 1e-4);
        assert!((g - DMatrix::<f64>::identity(2, 2)).amax() < 1e-4);
    }
}
