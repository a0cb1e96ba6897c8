use gaussent::protocols::{passive_max_entanglement, passive_optimizer};
use gaussent::CovarianceMatrix;

fn main() -> gaussent::Result<()> {
    // three modes: two squeezed, one thermal
    let (a, b) = (0.8f64, 0.3f64);
    let cov = CovarianceMatrix::from_diagonal(&[
        (-2.0 * a).exp(),
        (2.0 * a).exp(),
        (2.0 * b).exp(),
        (-2.0 * b).exp(),
        1.5,
        1.5,
    ])?;
    let bound = passive_max_entanglement(&cov)?;
    let best = passive_optimizer(&cov, 4, 3)?;
    println!("closed form {bound:.6}");
    println!("optimizer   {:.6} on modes {:?}", best.log_negativity, best.modes);
    println!("network is passive: {}", best.transform.is_passive());
    Ok(())
}
