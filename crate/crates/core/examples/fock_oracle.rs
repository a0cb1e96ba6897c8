//! Cross-checks phase-space quantities against the truncated number basis.

use gaussent::entanglement::{log_negativity_gaussian, ModePartition};
use gaussent::fock::{gaussian_to_fock, log_negativity_fock, moments, two_mode_squeezed_fock};
use gaussent::linalg::max_abs;
use gaussent::symplectic::apply_symplectic;
use gaussent::{CovarianceMatrix, GaussianState, SymplecticMatrix};

fn main() -> gaussent::Result<()> {
    let p = ModePartition::split(1, 1);
    let cutoff = 30;
    println!("   r   phase space    number basis");
    for r in [0.2, 0.5, 0.8] {
        let g = log_negativity_gaussian(&CovarianceMatrix::two_mode_squeezed(&[r]), &p)?;
        let f = log_negativity_fock(&two_mode_squeezed_fock(r, cutoff)?.to_density(), &p)?;
        println!("{r:.2}   {g:.8}     {f:.8}");
    }

    let s = SymplecticMatrix::beam_splitter(0.3)
        .compose(&SymplecticMatrix::squeezer(0.4).direct_sum(&SymplecticMatrix::squeezer(-0.2)));
    let state = apply_symplectic(&GaussianState::vacuum(2), &s)?;
    let psi = gaussian_to_fock(&state, cutoff)?;
    let (gamma, _) = moments(&psi.to_density());
    println!(
        "tail {:.1e}, covariance mismatch {:.1e}",
        psi.tail(),
        max_abs(&(gamma - state.covariance().matrix()))
    );
    Ok(())
}
