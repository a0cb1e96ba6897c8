//! Builds a few covariance matrices, checks the uncertainty relation and
//! evolves the vacuum under a quadratic Hamiltonian.

use gaussent::symplectic::{apply_symplectic, symplectic_from_hamiltonian, validate_covariance};
use gaussent::{CovarianceMatrix, GaussianState, QuadraticHamiltonian};
use nalgebra::DMatrix;

fn main() -> gaussent::Result<()> {
    let thermal = CovarianceMatrix::thermal(&[1.0, 2.5])?;
    let squeezed_too_far = DMatrix::from_row_slice(2, 2, &[0.3, 0.0, 0.0, 2.0]);
    for (name, m) in [
        ("thermal", thermal.matrix().clone()),
        ("sub-vacuum", squeezed_too_far),
    ] {
        let report = validate_covariance(&m)?;
        println!(
            "{name:>10}: valid {} min eig {:+.4} nu {:?}",
            report.valid, report.min_uncertainty_eigenvalue, report.symplectic_eigenvalues
        );
    }

    // H = x1 p2 + p1 x2 type coupling, symmetric g
    let g = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0,
        ],
    );
    let h = QuadraticHamiltonian::new(g)?;
    for t in [0.0, 0.25, 0.5] {
        let s = symplectic_from_hamiltonian(&h, t);
        let out = apply_symplectic(&GaussianState::vacuum(2), &s)?;
        println!(
            "t = {t:.2}: gamma_11 = {:.4}, still valid {}",
            out.covariance().matrix()[(0, 0)],
            out.covariance().is_valid()
        );
    }
    Ok(())
}
