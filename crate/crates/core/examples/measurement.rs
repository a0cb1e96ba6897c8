use gaussent::channels::{homodyne_condition, vacuum_project, Quadrature};
use gaussent::{CovarianceMatrix, GaussianState};

fn main() -> gaussent::Result<()> {
    let r = 0.5;
    let tms = GaussianState::centered(CovarianceMatrix::two_mode_squeezed(&[r]))?;

    let x = homodyne_condition(&tms, 1, Quadrature::X)?;
    println!("after homodyne X on mode 1:\n{:.6}", x.covariance().matrix());
    println!(
        "expected diag({:.6}, {:.6})",
        1.0 / (2.0 * r).cosh(),
        (2.0 * r).cosh()
    );

    let v = vacuum_project(&tms, 1)?;
    println!(
        "vacuum click probability {:.6} (1/cosh^2 r = {:.6})",
        v.probability,
        1.0 / r.cosh().powi(2)
    );
    println!("conditional state:\n{:.6}", v.state.covariance().matrix());
    Ok(())
}
