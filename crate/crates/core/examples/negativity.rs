//! Entanglement of two-mode states: PPT verdict, logarithmic negativity,
//! separability certificates and normal forms.

use gaussent::entanglement::{
    log_negativity_gaussian, ppt_verdict, schmidt_normal_form, separability_witness_verify,
    simon_normal_form, ModePartition,
};
use gaussent::CovarianceMatrix;

fn main() -> gaussent::Result<()> {
    let p = ModePartition::split(1, 1);
    for r in [0.0, 0.25, 0.5, 1.0] {
        let tms = CovarianceMatrix::two_mode_squeezed(&[r]);
        let report = ppt_verdict(&tms, &p)?;
        println!(
            "r = {r:.2}: E_N = {:.6}  {}",
            log_negativity_gaussian(&tms, &p)?,
            report.note()
        );
    }

    let product = CovarianceMatrix::thermal(&[2.0, 3.0])?;
    let (a, b) = (product.reduced(&[0])?, product.reduced(&[1])?);
    println!(
        "thermal product certified separable: {}",
        separability_witness_verify(&product, &a, &b, &p)?
    );

    let tms = CovarianceMatrix::two_mode_squeezed(&[0.7]);
    println!("Schmidt parameters {:?}", schmidt_normal_form(&tms, &p)?.r);
    println!("standard form {:.4?}", simon_normal_form(&product)?.x);
    Ok(())
}
