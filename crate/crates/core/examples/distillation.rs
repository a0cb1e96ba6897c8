//! Non-Gaussian distillation: a photon-detection step followed by rounds of
//! Gaussification, traced in the number basis.
//!
//! `cargo run --release --example distillation -- 0.3 0.9 2 12`

use gaussent::protocols::distill_pipeline;

fn main() -> gaussent::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let r = args.first().copied().unwrap_or(0.3);
    let v = args.get(1).copied().unwrap_or(0.9);
    let iterations = args.get(2).copied().unwrap_or(1.0) as usize;
    let cutoff = args.get(3).copied().unwrap_or(8.0) as usize;

    let trace = distill_pipeline(r, v, iterations, cutoff)?;
    println!("input E_N {:.4}", trace.initial_log_negativity);
    println!("step  E_N     p_step  p_total  distance");
    for rec in &trace.records {
        println!(
            "{:>4}  {:.4}  {:.4}  {:.2e} {:.4}",
            rec.iteration,
            rec.log_negativity,
            rec.probability,
            rec.cumulative_probability,
            rec.gaussianity_distance
        );
    }
    println!(
        "improves {}, distance decreasing {}",
        trace.improves(),
        trace.distances_decreasing()
    );
    Ok(())
}
