//! Pure-state conversion: two copies of a two-mode squeezed state into one
//! more strongly squeezed copy. Gaussian operations cannot do it, general
//! local operations can.

use gaussent::entanglement::{find_locc_gap, glocc_vs_locc_gap};

fn main() -> gaussent::Result<()> {
    let r = 0.5;
    for rp in [0.45, 0.5, 0.505, 0.6, 0.8] {
        let gap = glocc_vs_locc_gap(r, rp, 60)?;
        println!("r' = {rp:.3}: gaussian {:5} general {:5}", gap.glocc, gap.locc);
    }
    let grid: Vec<f64> = (1..=200).map(|k| r + 0.005 * k as f64).collect();
    println!("first gap on the grid: {:?}", find_locc_gap(r, &grid, 60)?);
    Ok(())
}
