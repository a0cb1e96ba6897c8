//! Truncated number-basis backend.
//!
//! Every mode is cut off at `D` levels and multi-mode basis states are
//! flattened with mode 0 as the most significant digit. Truncation is always
//! explicit: constructors renormalise and report the discarded mass.

mod continuity;
pub(crate) mod gates;
mod states;

pub use continuity::{continuity_demo, ContinuityPoint};
pub use gates::{
    annihilation, beam_splitter_fock, displacement_fock, passive_fock, squeezer_fock, weyl_fock,
};
pub use states::{
    gaussian_density_to_fock, gaussian_to_fock, number_state, thermal_fock, two_mode_squeezed_fock,
    FOCK_TAIL_LIMIT,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::entanglement::ModePartition;
use crate::error::{Error, Result};
use crate::linalg;
use crate::symplectic::{CovarianceMatrix, GaussianState};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance for Hermiticity and positivity checks on densities.
pub const DENSITY_TOL: f64 = 1e-9;

/// Flattened index ↔ occupation numbers for `modes` modes of `cutoff` levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    pub modes: usize,
    pub cutoff: usize,
}

impl FockBasis {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 || cutoff < 1 {
            return Err(Error::param("Fock basis needs ≥ 1 mode and cutoff ≥ 1"));
        }
        let dim = cutoff
            .checked_pow(modes as u32)
            .filter(|&d| d <= 1 << 24)
            .ok_or_else(|| Error::param("Fock space dimension too large"))?;
        let _ = dim;
        Ok(Self { modes, cutoff })
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * self.cutoff + n)
    }

    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes];
        for k in (0..self.modes).rev() {
            occ[k] = idx % self.cutoff;
            idx /= self.cutoff;
        }
        occ
    }

    pub fn total(&self, idx: usize) -> usize {
        self.occupations(idx).iter().sum()
    }
}

/// Pure state as a flattened amplitude tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    basis: FockBasis,
    amps: DVector<Complex64>,
    tail: f64,
}

impl FockVector {
    pub fn new(modes: usize, cutoff: usize, amps: DVector<Complex64>) -> Result<Self> {
        let basis = FockBasis::new(modes, cutoff)?;
        if amps.len() != basis.dim() {
            return Err(Error::dim(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                basis.dim()
            )));
        }
        Ok(Self {
            basis,
            amps,
            tail: 0.0,
        })
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Result<Self> {
        let basis = FockBasis::new(modes, cutoff)?;
        let mut amps = DVector::from_element(basis.dim(), ZERO);
        amps[0] = ONE;
        Ok(Self {
            basis,
            amps,
            tail: 0.0,
        })
    }

    pub(crate) fn with_tail(mut self, tail: f64) -> Self {
        self.tail = tail;
        self
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn modes(&self) -> usize {
        self.basis.modes
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, occ: &[usize]) -> Complex64 {
        self.amps[self.basis.index(occ)]
    }

    /// Probability mass discarded by truncation when the state was built.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::dim("fidelity between different Fock spaces"));
        }
        Ok(self.amps.dotc(&other.amps).norm_sqr())
    }

    pub fn apply(&self, op: &FockOperator) -> Result<Self> {
        if op.basis != self.basis {
            return Err(Error::dim("operator and state live in different Fock spaces"));
        }
        Ok(Self {
            basis: self.basis,
            amps: &op.matrix * &self.amps,
            tail: self.tail,
        })
    }

    pub fn to_density(&self) -> FockDensity {
        FockDensity {
            basis: self.basis,
            matrix: &self.amps * self.amps.adjoint(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff() != other.cutoff() {
            return Err(Error::dim("tensor product needs equal cutoffs"));
        }
        let basis = FockBasis::new(self.modes() + other.modes(), self.cutoff())?;
        Ok(Self {
            basis,
            amps: self.amps.kronecker(&other.amps),
            tail: 1.0 - (1.0 - self.tail) * (1.0 - other.tail),
        })
    }

    /// Keeps the first `cutoff` levels of every mode, renormalises and adds
    /// the discarded mass to the tail.
    pub fn truncate(&self, cutoff: usize) -> Result<Self> {
        let basis = FockBasis::new(self.modes(), cutoff)?;
        if cutoff > self.cutoff() {
            return Err(Error::param("truncation cannot raise the cutoff"));
        }
        let before = self.amps.norm_squared();
        let amps = DVector::from_fn(basis.dim(), |i, _| {
            self.amps[self.basis.index(&basis.occupations(i))]
        });
        let kept = amps.norm_squared();
        if kept <= 0.0 {
            return Err(Error::Truncation {
                tail: 1.0,
                limit: 0.0,
            });
        }
        let lost = ((before - kept) / before).max(0.0);
        Ok(Self {
            basis,
            amps: amps / Complex64::new(kept.sqrt(), 0.0),
            tail: 1.0 - (1.0 - self.tail) * (1.0 - lost),
        })
    }
}

/// Density matrix over a truncated multi-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    basis: FockBasis,
    matrix: DMatrix<Complex64>,
}

impl FockDensity {
    /// Rejects non-Hermitian input; positivity is not checked here.
    pub fn new(modes: usize, cutoff: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let basis = FockBasis::new(modes, cutoff)?;
        if matrix.shape() != (basis.dim(), basis.dim()) {
            return Err(Error::dim("density shape does not match the Fock space"));
        }
        let dev = hermiticity_defect(&matrix);
        if dev > DENSITY_TOL {
            return Err(Error::param(format!("density is not Hermitian (defect {dev:e})")));
        }
        Ok(Self {
            basis,
            matrix: hermitian_part(&matrix),
        })
    }

    pub(crate) fn from_parts(basis: FockBasis, matrix: DMatrix<Complex64>) -> Self {
        Self { basis, matrix }
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn modes(&self) -> usize {
        self.basis.modes
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::param("cannot normalise a density with zero trace"));
        }
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix / Complex64::new(t, 0.0),
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn is_valid(&self) -> bool {
        hermiticity_defect(&self.matrix) <= DENSITY_TOL
            && self.eigenvalues().iter().all(|&l| l >= -DENSITY_TOL)
            && self.trace() <= 1.0 + DENSITY_TOL
    }

    /// Keeps the first `cutoff` levels of every mode. Returns the renormalised
    /// density and the discarded fraction of the trace.
    pub fn truncate(&self, cutoff: usize) -> Result<(Self, f64)> {
        if cutoff > self.cutoff() {
            return Err(Error::param("truncation cannot raise the cutoff"));
        }
        let basis = FockBasis::new(self.modes(), cutoff)?;
        let map: Vec<usize> = (0..basis.dim())
            .map(|i| self.basis.index(&basis.occupations(i)))
            .collect();
        let m = DMatrix::from_fn(basis.dim(), basis.dim(), |i, j| self.matrix[(map[i], map[j])]);
        let before = self.trace();
        let out = Self { basis, matrix: m };
        let kept = out.trace();
        let tail = if before > 0.0 {
            ((before - kept) / before).max(0.0)
        } else {
            0.0
        };
        Ok((out.normalized()?, tail))
    }

    /// `tr[ρ A]` for an operator on the same space.
    pub fn expectation(&self, op: &FockOperator) -> Result<Complex64> {
        if op.basis != self.basis {
            return Err(Error::dim("operator and density live in different Fock spaces"));
        }
        Ok((&self.matrix * &op.matrix).trace())
    }

    pub fn conjugate_by(&self, op: &FockOperator) -> Result<Self> {
        if op.basis != self.basis {
            return Err(Error::dim("operator and density live in different Fock spaces"));
        }
        let m = &op.matrix * &self.matrix * op.matrix.adjoint();
        Ok(Self {
            basis: self.basis,
            matrix: hermitian_part(&m),
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff() != other.cutoff() {
            return Err(Error::dim("tensor product needs equal cutoffs"));
        }
        let basis = FockBasis::new(self.modes() + other.modes(), self.cutoff())?;
        Ok(Self {
            basis,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }
}

/// General operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    basis: FockBasis,
    matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn new(modes: usize, cutoff: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let basis = FockBasis::new(modes, cutoff)?;
        if matrix.shape() != (basis.dim(), basis.dim()) {
            return Err(Error::dim("operator shape does not match the Fock space"));
        }
        Ok(Self { basis, matrix })
    }

    pub fn identity(modes: usize, cutoff: usize) -> Result<Self> {
        let basis = FockBasis::new(modes, cutoff)?;
        Ok(Self {
            basis,
            matrix: DMatrix::identity(basis.dim(), basis.dim()),
        })
    }

    pub fn basis(&self) -> FockBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.basis.modes
    }

    pub fn cutoff(&self) -> usize {
        self.basis.cutoff
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::dim("composing operators on different Fock spaces"));
        }
        Ok(Self {
            basis: self.basis,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff() != other.cutoff() {
            return Err(Error::dim("tensor product needs equal cutoffs"));
        }
        let basis = FockBasis::new(self.modes() + other.modes(), self.cutoff())?;
        Ok(Self {
            basis,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Acts as `self` on `modes` (in that order) of an `m`-mode space.
    pub fn embed(&self, modes: &[usize], m: usize) -> Result<Self> {
        if modes.len() != self.modes() || modes.iter().any(|&k| k >= m) {
            return Err(Error::dim("embedding modes do not match the operator"));
        }
        let big = FockBasis::new(m, self.cutoff())?;
        let rest: Vec<usize> = (0..m).filter(|k| !modes.contains(k)).collect();
        let small = self.basis;
        let rest_basis = FockBasis {
            modes: rest.len(),
            cutoff: self.cutoff(),
        };
        let mut out = DMatrix::from_element(big.dim(), big.dim(), ZERO);
        let rest_dim = if rest.is_empty() { 1 } else { rest_basis.dim() };
        let mut occ = vec![0; m];
        for r in 0..rest_dim {
            let rocc = if rest.is_empty() {
                vec![]
            } else {
                rest_basis.occupations(r)
            };
            for (k, &mode) in rest.iter().enumerate() {
                occ[mode] = rocc[k];
            }
            for i in 0..small.dim() {
                let iocc = small.occupations(i);
                for (k, &mode) in modes.iter().enumerate() {
                    occ[mode] = iocc[k];
                }
                let row = big.index(&occ);
                for j in 0..small.dim() {
                    let v = self.matrix[(i, j)];
                    if v == ZERO {
                        continue;
                    }
                    let jocc = small.occupations(j);
                    for (k, &mode) in modes.iter().enumerate() {
                        occ[mode] = jocc[k];
                    }
                    let col = big.index(&occ);
                    out[(row, col)] = v;
                }
                for (k, &mode) in modes.iter().enumerate() {
                    occ[mode] = iocc[k];
                }
            }
        }
        Ok(Self {
            basis: big,
            matrix: out,
        })
    }

    /// Largest deviation of `⟨i|U†U|j⟩` from `δ_ij` over basis states with at
    /// most `max_photons` photons in total.
    pub fn unitarity_defect(&self, max_photons: usize) -> f64 {
        let safe: Vec<usize> = (0..self.basis.dim())
            .filter(|&i| self.basis.total(i) <= max_photons)
            .collect();
        let gram = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0_f64;
        for &i in &safe {
            for &j in &safe {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Reduced density of the listed modes (in that order).
pub fn partial_trace(rho: &FockDensity, keep: &[usize]) -> Result<FockDensity> {
    let m = rho.modes();
    if keep.is_empty() || keep.iter().any(|&k| k >= m) {
        return Err(Error::dim("partial trace needs a nonempty set of existing modes"));
    }
    let mut seen = vec![false; m];
    for &k in keep {
        if std::mem::replace(&mut seen[k], true) {
            return Err(Error::dim("repeated mode in partial trace"));
        }
    }
    let d = rho.cutoff();
    let traced: Vec<usize> = (0..m).filter(|k| !keep.contains(k)).collect();
    let kb = FockBasis {
        modes: keep.len(),
        cutoff: d,
    };
    let tb = FockBasis {
        modes: traced.len(),
        cutoff: d,
    };
    let tdim = if traced.is_empty() { 1 } else { tb.dim() };
    let full = rho.basis;
    let index = |k_occ: &[usize], t_occ: &[usize]| {
        let mut occ = vec![0; m];
        for (a, &mode) in keep.iter().enumerate() {
            occ[mode] = k_occ[a];
        }
        for (a, &mode) in traced.iter().enumerate() {
            occ[mode] = t_occ[a];
        }
        full.index(&occ)
    };
    let t_occs: Vec<Vec<usize>> = (0..tdim)
        .map(|t| {
            if traced.is_empty() {
                vec![]
            } else {
                tb.occupations(t)
            }
        })
        .collect();
    let rows: Vec<Vec<usize>> = (0..kb.dim())
        .map(|i| {
            let occ = kb.occupations(i);
            t_occs.iter().map(|t| index(&occ, t)).collect()
        })
        .collect();
    let out = DMatrix::from_fn(kb.dim(), kb.dim(), |i, j| {
        rows[i]
            .iter()
            .zip(&rows[j])
            .map(|(&a, &b)| rho.matrix[(a, b)])
            .sum()
    });
    Ok(FockDensity {
        basis: kb,
        matrix: out,
    })
}

/// Transposes the B-mode indices: `⟨a, b|ρ^Γ|a′, b′⟩ = ⟨a, b′|ρ|a′, b⟩`.
pub fn partial_transpose_fock(rho: &FockDensity, p: &ModePartition) -> Result<FockOperator> {
    if p.modes() != rho.modes() {
        return Err(Error::dim("partition does not match the Fock state"));
    }
    let b = rho.basis;
    let b_modes = p.b_modes();
    let occs: Vec<Vec<usize>> = (0..b.dim()).map(|i| b.occupations(i)).collect();
    let mut out = DMatrix::from_element(b.dim(), b.dim(), ZERO);
    let mut oi = vec![0; b.modes];
    let mut oj = vec![0; b.modes];
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let v = rho.matrix[(i, j)];
            if v == ZERO {
                continue;
            }
            oi.copy_from_slice(&occs[i]);
            oj.copy_from_slice(&occs[j]);
            for &k in &b_modes {
                std::mem::swap(&mut oi[k], &mut oj[k]);
            }
            out[(b.index(&oi), b.index(&oj))] = v;
        }
    }
    Ok(FockOperator {
        basis: b,
        matrix: out,
    })
}

/// `‖M‖₁ = tr|M|`; Hermitian input uses the block-split eigensolver,
/// anything else the singular values.
pub fn trace_norm(op: &FockOperator) -> f64 {
    if hermiticity_defect(&op.matrix) <= DENSITY_TOL {
        linalg::hermitian_eigenvalues(&hermitian_part(&op.matrix))
            .iter()
            .map(|l| l.abs())
            .sum()
    } else {
        op.matrix.singular_values().iter().sum()
    }
}

/// `‖ρ − σ‖₁`.
pub fn trace_distance(rho: &FockDensity, sigma: &FockDensity) -> Result<f64> {
    if rho.basis != sigma.basis {
        return Err(Error::dim("trace distance between different Fock spaces"));
    }
    Ok(trace_norm(&FockOperator {
        basis: rho.basis,
        matrix: &rho.matrix - &sigma.matrix,
    }))
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²` of two normalised densities.
pub fn fidelity(rho: &FockDensity, sigma: &FockDensity) -> Result<f64> {
    if rho.basis != sigma.basis {
        return Err(Error::dim("fidelity between different Fock spaces"));
    }
    // eigenvalues at rounding level would otherwise add ~√ε each
    let root = |x: f64| if x > 1e-13 { x.sqrt() } else { 0.0 };
    let sqrt_rho = linalg::hermitian_function(&rho.normalized()?.matrix, root);
    let m = &sqrt_rho * sigma.normalized()?.matrix * &sqrt_rho;
    let s: f64 = linalg::hermitian_eigenvalues(&m).into_iter().map(root).sum();
    Ok(s * s)
}

/// `−tr[ρ log₂ ρ]`.
pub fn von_neumann_entropy(rho: &FockDensity) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// `log₂ ‖ρ^Γ‖₁` of the normalised density.
pub fn log_negativity_fock(rho: &FockDensity, p: &ModePartition) -> Result<f64> {
    let t = rho.trace();
    if t <= 0.0 {
        return Err(Error::param("density has zero trace"));
    }
    let pt = partial_transpose_fock(rho, p)?;
    Ok((trace_norm(&pt) / t).log2().max(0.0))
}

/// `Σ_k w_k ⟨n_k⟩`.
pub fn mean_energy_fock(rho: &FockDensity, weights: &[f64]) -> Result<f64> {
    if weights.len() != rho.modes() {
        return Err(Error::dim("one weight per mode required"));
    }
    Ok((0..rho.basis.dim())
        .map(|i| {
            let occ = rho.basis.occupations(i);
            let e: f64 = occ.iter().zip(weights).map(|(&n, w)| n as f64 * w).sum();
            e * rho.matrix[(i, i)].re
        })
        .sum())
}

/// Ladder operator acting on one mode.
#[derive(Debug, Clone, Copy)]
struct Ladder {
    mode: usize,
    dagger: bool,
}

/// Applies a product of ladder operators (rightmost first) to basis state
/// `idx`; `None` when the result leaves the truncated space or vanishes.
fn ladder_action(basis: FockBasis, idx: usize, ops: &[Ladder]) -> Option<(usize, f64)> {
    let mut occ = basis.occupations(idx);
    let mut coeff = 1.0;
    for op in ops.iter().rev() {
        let n = occ[op.mode];
        if op.dagger {
            if n + 1 >= basis.cutoff {
                return None;
            }
            coeff *= ((n + 1) as f64).sqrt();
            occ[op.mode] = n + 1;
        } else {
            if n == 0 {
                return None;
            }
            coeff *= (n as f64).sqrt();
            occ[op.mode] = n - 1;
        }
    }
    Some((basis.index(&occ), coeff))
}

fn ladder_expectation(rho: &FockDensity, ops: &[Ladder]) -> Complex64 {
    (0..rho.basis.dim())
        .filter_map(|n| ladder_action(rho.basis, n, ops).map(|(m, c)| rho.matrix[(n, m)] * c))
        .sum()
}

/// Quadrature `O_j` as `Σ c · L` over the two ladder operators of its mode.
fn quadrature_terms(j: usize) -> [(Complex64, Ladder); 2] {
    let mode = j / 2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if j.is_multiple_of(2) {
        [
            (Complex64::new(s, 0.0), Ladder { mode, dagger: false }),
            (Complex64::new(s, 0.0), Ladder { mode, dagger: true }),
        ]
    } else {
        [
            (Complex64::new(0.0, -s), Ladder { mode, dagger: false }),
            (Complex64::new(0.0, s), Ladder { mode, dagger: true }),
        ]
    }
}

/// First and second moments of a density, in the convention where the
/// vacuum covariance is the identity. No validity check is applied to the
/// resulting covariance, since truncation can break it slightly.
pub fn moments(rho: &FockDensity) -> (DMatrix<f64>, DVector<f64>) {
    let dim = 2 * rho.modes();
    let t = rho.trace();
    let d = DVector::from_fn(dim, |j, _| {
        quadrature_terms(j)
            .iter()
            .map(|(c, l)| c * ladder_expectation(rho, std::slice::from_ref(l)))
            .sum::<Complex64>()
            .re
            / t
    });
    let mut g = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for k in j..dim {
            let mut acc = ZERO;
            for (cj, lj) in quadrature_terms(j) {
                for (ck, lk) in quadrature_terms(k) {
                    acc +=
                        cj * ck * (ladder_expectation(rho, &[lj, lk]) + ladder_expectation(rho, &[lk, lj]));
                }
            }
            let v = acc.re / t - 2.0 * d[j] * d[k];
            g[(j, k)] = v;
            g[(k, j)] = v;
        }
    }
    (g, d)
}

/// Gaussian state with the moments of `rho`.
pub fn moment_matched_gaussian(rho: &FockDensity) -> Result<GaussianState> {
    let (g, d) = moments(rho);
    GaussianState::new(CovarianceMatrix::new(g)?, d)
}
