use gaussent::linalg::max_abs;
use gaussent::random;
use gaussent::symplectic::{euler_decomposition, williamson};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gaussent::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let s = random::symplectic(&mut rng, 3, 0.4);
    let e = euler_decomposition(&s)?;
    println!("Euler squeezing factors {:.4?}", e.squeezing);
    println!(
        "  passive outer factors: {} {}",
        e.left.is_passive(),
        e.right.is_passive()
    );
    println!(
        "  reconstruction error {:.2e}",
        max_abs(&(e.reconstruct() - s.matrix()))
    );

    let cov = random::covariance(&mut rng, 3, 2.0, 0.3);
    let w = williamson(&cov)?;
    let t = w.transform.matrix();
    println!("Williamson spectrum {:.4?}", w.symplectic_eigenvalues);
    println!(
        "  residual {:.2e}",
        max_abs(&(t * cov.matrix() * t.transpose() - w.normal_form()))
    );
    Ok(())
}
