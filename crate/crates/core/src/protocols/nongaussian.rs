use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::ModePartition;
use crate::error::{Error, Result};
use crate::fock::{
    gaussian_density_to_fock, log_negativity_fock, moment_matched_gaussian, trace_distance, FockBasis,
    FockDensity, FOCK_TAIL_LIMIT,
};

/// Largest truncated mass accepted from the first, non-Gaussian step.
pub const FIRST_STEP_TAIL_LIMIT: f64 = 1e-6;

/// Transmissivities searched when tuning the first step.
pub const V_GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85,
    0.90, 0.95,
];

/// What enters the second port of each local beam splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstStepInput {
    /// A vacuum ancilla per mode: photons are tapped off the shared state.
    #[default]
    VacuumAncilla,
    /// The matching mode of a second copy of the two-mode squeezed state.
    SecondCopy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstStepOptions {
    pub input: FirstStepInput,
    /// Detector efficiency `η`: the click effect is `1 − (1 − η)^N`.
    pub efficiency: f64,
}

impl Default for FirstStepOptions {
    fn default() -> Self {
        Self {
            input: FirstStepInput::VacuumAncilla,
            efficiency: 1.0,
        }
    }
}

/// Renormalised two-mode state kept after a successful conditioning event.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub state: FockDensity,
    pub probability: f64,
    /// Fraction of the conditional mass lost to the cutoff.
    pub tail: f64,
}

/// Amplitudes `(a1, a2, b1, b2) ↦ ψ` of a real four-mode pure state.
type Sparse4 = BTreeMap<[usize; 4], f64>;

struct LnFact(Vec<f64>);

impl LnFact {
    fn new(n: usize) -> Self {
        let mut v = vec![0.0; n + 1];
        for k in 1..=n {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        Self(v)
    }

    fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}

/// `U|n, m⟩ = Σ_k c_k |n + m − k, k⟩` for the real two-mode unitary with
/// `U a_j† U† = Σ_i u_ij a_i†`.
fn beam_splitter_row(u: &[[f64; 2]; 2], n: usize, m: usize, lf: &LnFact) -> Vec<f64> {
    let mut out = vec![0.0; n + m + 1];
    let norm = -0.5 * (lf.get(n) + lf.get(m));
    for i in 0..=n {
        let ci = (lf.get(n) - lf.get(i) - lf.get(n - i)).exp()
            * u[0][0].powi(i as i32)
            * u[1][0].powi((n - i) as i32);
        if ci == 0.0 {
            continue;
        }
        for j in 0..=m {
            let cj = (lf.get(m) - lf.get(j) - lf.get(m - j)).exp()
                * u[0][1].powi(j as i32)
                * u[1][1].powi((m - j) as i32);
            if cj == 0.0 {
                continue;
            }
            let k = n + m - i - j;
            out[k] += ci * cj * (norm + 0.5 * (lf.get(i + j) + lf.get(k))).exp();
        }
    }
    out
}

/// Applies `u` to the modes `(x1, x2)` of one side; `side` 0 is `(a1, a2)`.
fn mix_side(psi: &Sparse4, u: &[[f64; 2]; 2], side: usize, lf: &LnFact) -> Sparse4 {
    let (p, q) = (2 * side, 2 * side + 1);
    let mut out = Sparse4::new();
    for (idx, &amp) in psi {
        let (n, m) = (idx[p], idx[q]);
        for (k, c) in beam_splitter_row(u, n, m, lf).into_iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut key = *idx;
            key[p] = n + m - k;
            key[q] = k;
            *out.entry(key).or_insert(0.0) += amp * c;
        }
    }
    out
}

fn check_transmissivity(v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::param(format!(
            "transmissivity must lie in (0, 1), got {v}"
        )));
    }
    Ok(())
}

/// Yes/no de-Gaussification of the two-mode squeezed state: each side mixes
/// its mode at transmissivity `v`, the second output port goes to an on/off
/// detector, and the state is kept when both detectors click.
pub fn nongaussian_first_step(r: f64, v: f64, cutoff: usize) -> Result<ConditionalState> {
    nongaussian_first_step_with(r, v, cutoff, &FirstStepOptions::default())
}

pub fn nongaussian_first_step_with(
    r: f64,
    v: f64,
    cutoff: usize,
    opts: &FirstStepOptions,
) -> Result<ConditionalState> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("squeezing must be finite and > 0"));
    }
    check_transmissivity(v)?;
    let eta = opts.efficiency;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("detector efficiency must lie in (0, 1]"));
    }
    if cutoff < 2 {
        return Err(Error::param("cutoff must be at least 2"));
    }
    let lambda = r.tanh();
    let mut amps = Vec::new();
    let mut weight = 1.0 - lambda * lambda;
    while weight > 1e-20 && amps.len() < cutoff + 120 {
        amps.push(weight.sqrt());
        weight *= lambda * lambda;
    }
    // mass of the dropped terms, per copy
    let mut source_tail = weight / (1.0 - lambda * lambda);
    if opts.input == FirstStepInput::SecondCopy {
        source_tail *= 2.0;
    }
    let nmax = amps.len();
    let mut psi = Sparse4::new();
    match opts.input {
        FirstStepInput::VacuumAncilla => {
            for (n, &c) in amps.iter().enumerate() {
                psi.insert([n, 0, n, 0], c);
            }
        }
        FirstStepInput::SecondCopy => {
            for (n, &c) in amps.iter().enumerate() {
                for (m, &d) in amps.iter().enumerate() {
                    psi.insert([n, m, n, m], c * d);
                }
            }
        }
    }
    let lf = LnFact::new(4 * nmax + 2);
    let (t, s) = (v.sqrt(), (1.0 - v).sqrt());
    let u = [[t, s], [-s, t]];
    let psi = mix_side(&mix_side(&psi, &u, 0, &lf), &u, 1, &lf);

    let click = |k: usize| 1.0 - (1.0 - eta).powi(k as i32);
    let basis = FockBasis::new(2, cutoff)?;
    let mut branches: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    let mut total = 0.0;
    let mut kept = 0.0;
    for (&[a1, a2, b1, b2], &amp) in &psi {
        let w = click(a2) * click(b2);
        if w == 0.0 {
            continue;
        }
        total += w * amp * amp;
        if a1 < cutoff && b1 < cutoff {
            kept += w * amp * amp;
            branches
                .entry((a2, b2))
                .or_default()
                .push((basis.index(&[a1, b1]), w.sqrt() * amp));
        }
    }
    if total <= 0.0 {
        return Err(Error::param("the conditioning event has zero probability"));
    }
    let tail = (total - kept + source_tail) / (total + source_tail);
    if tail > FIRST_STEP_TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            limit: FIRST_STEP_TAIL_LIMIT,
        });
    }
    let mut rho = DMatrix::<f64>::zeros(basis.dim(), basis.dim());
    for phi in branches.values() {
        for &(i, x) in phi {
            for &(j, y) in phi {
                rho[(i, j)] += x * y;
            }
        }
    }
    rho /= kept;
    let state = FockDensity::new(2, cutoff, rho.map(|x| Complex64::new(x, 0.0)))?;
    Ok(ConditionalState {
        state,
        probability: total,
        tail,
    })
}

/// One Gaussification round: two copies of `rho` are mixed on balanced beam
/// splitters side by side, and the state is kept when the second output port
/// on both sides is found empty.
pub fn gaussify_step(rho: &FockDensity, cutoff: usize) -> Result<ConditionalState> {
    if rho.modes() != 2 {
        return Err(Error::dim("Gaussification acts on two-mode states"));
    }
    if !rho.is_valid() {
        return Err(Error::Unphysical {
            min_eigenvalue: rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min),
        });
    }
    let rho = rho.normalized()?;
    let d = rho.cutoff();
    let big = 2 * d - 1;
    let lf = LnFact::new(big);
    // ⟨m, 0|U|x1, x2⟩ for the balanced splitter, m = x1 + x2
    let kraus = |x1: usize, x2: usize| {
        let m = x1 + x2;
        (0.5 * (lf.get(m) - lf.get(x1) - lf.get(x2)) - 0.5 * m as f64 * std::f64::consts::LN_2).exp()
    };
    let in_basis = rho.basis();
    let out_basis = FockBasis::new(2, big)?;
    // each output level pair collects (index in copy 1, index in copy 2, weight)
    let mut terms: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); out_basis.dim()];
    for a1 in 0..d {
        for a2 in 0..d {
            for b1 in 0..d {
                for b2 in 0..d {
                    let o = out_basis.index(&[a1 + a2, b1 + b2]);
                    terms[o].push((
                        in_basis.index(&[a1, b1]),
                        in_basis.index(&[a2, b2]),
                        kraus(a1, a2) * kraus(b1, b2),
                    ));
                }
            }
        }
    }
    let m = rho.matrix();
    let dim = out_basis.dim();
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|o| {
            let mut row = vec![Complex64::new(0.0, 0.0); dim];
            for (op, cell) in row.iter_mut().enumerate().skip(o) {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(i1, i2, k) in &terms[o] {
                    for &(j1, j2, kp) in &terms[op] {
                        acc += m[(i1, j1)] * m[(i2, j2)] * (k * kp);
                    }
                }
                *cell = acc;
            }
            row
        })
        .collect();
    let full = DMatrix::from_fn(
        dim,
        dim,
        |i, j| if j >= i { rows[i][j] } else { rows[j][i].conj() },
    );
    let out = FockDensity::new(2, big, full)?;
    let probability = out.trace();
    if probability <= 0.0 {
        return Err(Error::param("the vacuum outcome has zero probability"));
    }
    let (state, tail) = out.truncate(cutoff.min(big))?;
    if tail > FOCK_TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            limit: FOCK_TAIL_LIMIT,
        });
    }
    Ok(ConditionalState {
        state: state.normalized()?,
        probability,
        tail,
    })
}

/// Trace norm `‖ρ − σ_G‖₁` to the Gaussian state with the same first and
/// second moments, evaluated at the cutoff of `rho`.
pub fn gaussianity_distance(rho: &FockDensity) -> Result<f64> {
    let rho = rho.normalized()?;
    let g = moment_matched_gaussian(&rho)?;
    let sigma = gaussian_density_to_fock(&g, rho.cutoff())?;
    trace_distance(&rho, &sigma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 0 for the first, non-Gaussian step.
    pub iteration: usize,
    pub log_negativity: f64,
    pub probability: f64,
    pub cumulative_probability: f64,
    pub gaussianity_distance: f64,
    pub tail: f64,
}

#[derive(Debug, Clone)]
pub struct DistillationTrace {
    pub r: f64,
    pub v: f64,
    /// `E_N` of the two-mode squeezed input.
    pub initial_log_negativity: f64,
    pub records: Vec<TraceRecord>,
    pub state: FockDensity,
}

impl DistillationTrace {
    pub fn final_log_negativity(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_log_negativity, |r| r.log_negativity)
    }

    pub fn distances_decreasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].gaussianity_distance < w[0].gaussianity_distance)
    }

    pub fn improves(&self) -> bool {
        self.final_log_negativity() > self.initial_log_negativity
    }
}

/// First step followed by `iterations` Gaussification rounds.
pub fn distill_pipeline(r: f64, v: f64, iterations: usize, cutoff: usize) -> Result<DistillationTrace> {
    let p = ModePartition::split(1, 1);
    let first = nongaussian_first_step(r, v, cutoff)?;
    let mut records = Vec::with_capacity(iterations + 1);
    let mut cumulative = first.probability;
    records.push(TraceRecord {
        iteration: 0,
        log_negativity: log_negativity_fock(&first.state, &p)?,
        probability: first.probability,
        cumulative_probability: cumulative,
        gaussianity_distance: gaussianity_distance(&first.state)?,
        tail: first.tail,
    });
    let mut state = first.state;
    for it in 1..=iterations {
        let step = gaussify_step(&state, cutoff)?;
        cumulative *= step.probability;
        records.push(TraceRecord {
            iteration: it,
            log_negativity: log_negativity_fock(&step.state, &p)?,
            probability: step.probability,
            cumulative_probability: cumulative,
            gaussianity_distance: gaussianity_distance(&step.state)?,
            tail: step.tail,
        });
        state = step.state;
    }
    Ok(DistillationTrace {
        r,
        v,
        initial_log_negativity: 2.0 * r * std::f64::consts::LOG2_E,
        records,
        state,
    })
}

/// Runs the pipeline for every transmissivity in `grid`.
pub fn distill_grid(
    r: f64,
    grid: &[f64],
    iterations: usize,
    cutoff: usize,
) -> Result<Vec<DistillationTrace>> {
    grid.par_iter()
        .map(|&v| distill_pipeline(r, v, iterations, cutoff))
        .collect()
}
