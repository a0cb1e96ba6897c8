use crate::error::{Error, Result};

/// Closed-form figures for `|ψ_k⟩ = √(1 − ε)|0,0⟩ + Σ_{n=1..k} √(ε/k)|n,n⟩`
/// with `ε = 1/ln(k)²`, compared against `|ψ₀⟩ = |0,0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityPoint {
    pub k: u64,
    pub epsilon: f64,
    /// `‖ψ_k − ψ₀‖₁ = 2√ε`.
    pub trace_distance: f64,
    /// Entropy of entanglement in bits.
    pub entanglement: f64,
    /// `Σ_n n ε/k = ε(k + 1)/2` photons per mode.
    pub mean_energy: f64,
}

/// Requires `k ≥ 3`: at `k = 2` the weight `ε = 1/ln(2)² > 1`.
pub fn continuity_demo(k: u64) -> Result<ContinuityPoint> {
    if k < 3 {
        return Err(Error::param(format!("k must be at least 3, got {k}")));
    }
    let kf = k as f64;
    let eps = 1.0 / kf.ln().powi(2);
    let entanglement = -(1.0 - eps) * (1.0 - eps).log2() - eps * (eps / kf).log2();
    Ok(ContinuityPoint {
        k,
        epsilon: eps,
        trace_distance: 2.0 * eps.sqrt(),
        entanglement,
        mean_energy: eps * (kf + 1.0) / 2.0,
    })
}
