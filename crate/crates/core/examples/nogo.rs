//! Random Gaussian local protocols on two copies never increase the
//! logarithmic negativity.

use gaussent::protocols::no_go_monte_carlo;
use gaussent::CovarianceMatrix;

fn main() -> gaussent::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(500);
    let report = no_go_monte_carlo(&CovarianceMatrix::two_mode_squeezed(&[0.5]), trials, 1)?;
    let mut gains = report.gains.clone();
    gains.sort_by(f64::total_cmp);
    println!("{trials} trials");
    println!(
        "max gain    {:+.3e} (trial {})",
        report.max_gain, report.argmax_trial
    );
    println!("median gain {:+.3e}", gains[gains.len() / 2]);
    Ok(())
}
