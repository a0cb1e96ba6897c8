use gaussent::fock::continuity_demo;

fn main() -> gaussent::Result<()> {
    println!("{:>8} {:>10} {:>10} {:>10}", "k", "distance", "E", "energy");
    for e in 1..=8 {
        let pt = continuity_demo(10u64.pow(e))?;
        println!(
            "{:>8.0e} {:>10.4} {:>10.4} {:>10.1}",
            pt.k as f64, pt.trace_distance, pt.entanglement, pt.mean_energy
        );
    }
    Ok(())
}
