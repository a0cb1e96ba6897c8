//! Gaussian channels `γ ↦ AγAᵀ + G`, conditional Gaussian measurements and
//! Gaussian completely positive maps given by a bipartite matrix `Γ`.
//!
//! Conditional maps track the covariance exactly. For vacuum projection the
//! outcome is unique, so the conditional mean is exact as well; homodyne
//! conditioning keeps the outcome-averaged mean of the unmeasured modes.

use nalgebra::{DMatrix, DVector};

use crate::entanglement::ModePartition;
use crate::error::{Error, Result};
use crate::linalg::{self, TOL_PSD};
use crate::symplectic::{sigma, CovarianceMatrix, GaussianState, SymplecticMatrix};

/// Pseudo-inverse cutoff relative to the largest singular value.
pub const PINV_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    a: DMatrix<f64>,
    g: DMatrix<f64>,
    shift: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelValidity {
    pub valid: bool,
    /// Minimum eigenvalue of `G + iσ − iAσAᵀ`.
    pub min_eigenvalue: f64,
}

impl GaussianChannel {
    /// Structural checks only; complete positivity is reported by
    /// [`channel_valid`].
    pub fn new(a: DMatrix<f64>, g: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        if rows == 0 || cols == 0 || rows % 2 != 0 || cols % 2 != 0 {
            return Err(Error::dim(format!("A must be 2n_out × 2n_in, got {rows}×{cols}")));
        }
        if g.shape() != (rows, rows) {
            return Err(Error::dim("G must be square with the output dimension of A"));
        }
        if shift.len() != rows {
            return Err(Error::dim("shift length differs from the output dimension"));
        }
        if a.iter()
            .chain(g.iter())
            .chain(shift.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::param("channel has non-finite entries"));
        }
        let asym = linalg::asymmetry(&g);
        if asym > 1e-9 * linalg::max_abs(&g).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            a,
            g: linalg::symmetrize(&g),
            shift,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: DMatrix::identity(2 * n, 2 * n),
            g: DMatrix::zeros(2 * n, 2 * n),
            shift: DVector::zeros(2 * n),
        }
    }

    /// Unitary channel `γ ↦ SγSᵀ`.
    pub fn from_symplectic(s: &SymplecticMatrix) -> Self {
        let dim = s.matrix().nrows();
        Self {
            a: s.matrix().clone(),
            g: DMatrix::zeros(dim, dim),
            shift: DVector::zeros(dim),
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn input_modes(&self) -> usize {
        self.a.ncols() / 2
    }

    pub fn output_modes(&self) -> usize {
        self.a.nrows() / 2
    }

    pub fn with_shift(mut self, shift: DVector<f64>) -> Result<Self> {
        if shift.len() != self.a.nrows() {
            return Err(Error::dim("shift length differs from the output dimension"));
        }
        self.shift = shift;
        Ok(self)
    }

    /// Acts as `self` on the listed modes of an `n`-mode system and as the
    /// identity elsewhere; requires a mode-preserving channel.
    pub fn on_modes(&self, modes: &[usize], n: usize) -> Result<Self> {
        if self.input_modes() != self.output_modes() || modes.len() != self.input_modes() {
            return Err(Error::dim(
                "embedding needs a mode-preserving channel of matching size",
            ));
        }
        if modes.iter().any(|&m| m >= n) {
            return Err(Error::dim("embedding mode out of range"));
        }
        let a = linalg::embed_modes(&self.a, modes, n);
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        let mut shift = DVector::zeros(2 * n);
        for (i, &mi) in modes.iter().enumerate() {
            for q in 0..2 {
                shift[2 * mi + q] = self.shift[2 * i + q];
                for (j, &mj) in modes.iter().enumerate() {
                    for r in 0..2 {
                        g[(2 * mi + q, 2 * mj + r)] = self.g[(2 * i + q, 2 * j + r)];
                    }
                }
            }
        }
        Ok(Self { a, g, shift })
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if other.input_modes() != self.output_modes() {
            return Err(Error::dim("channel composition dimension mismatch"));
        }
        Ok(Self {
            a: &other.a * &self.a,
            g: linalg::symmetrize(&(&other.a * &self.g * other.a.transpose() + &other.g)),
            shift: &other.a * &self.shift + &other.shift,
        })
    }

    /// Block-diagonal `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            a: linalg::direct_sum(&self.a, &other.a),
            g: linalg::direct_sum(&self.g, &other.g),
            shift: linalg::direct_sum_vec(&self.shift, &other.shift),
        }
    }
}

pub fn channel_valid(ch: &GaussianChannel) -> ChannelValidity {
    let s_out = sigma(ch.output_modes());
    let s_in = sigma(ch.input_modes());
    let y = &s_out - &ch.a * s_in * ch.a.transpose();
    let min_eig = linalg::hermitian_min_eigenvalue(&ch.g, &y);
    ChannelValidity {
        valid: min_eig >= -TOL_PSD,
        min_eigenvalue: min_eig,
    }
}

fn require_valid_channel(ch: &GaussianChannel) -> Result<()> {
    let v = channel_valid(ch);
    if v.valid {
        Ok(())
    } else {
        Err(Error::NotCompletelyPositive {
            min_eigenvalue: v.min_eigenvalue,
        })
    }
}

pub fn apply_channel(state: &GaussianState, ch: &GaussianChannel) -> Result<GaussianState> {
    if ch.input_modes() != state.modes() {
        return Err(Error::dim(format!(
            "{}-mode channel on a {}-mode state",
            ch.input_modes(),
            state.modes()
        )));
    }
    require_valid_channel(ch)?;
    let cov = &ch.a * state.covariance().matrix() * ch.a.transpose() + &ch.g;
    let disp = &ch.a * state.displacement() + &ch.shift;
    GaussianState::new(CovarianceMatrix::new(linalg::symmetrize(&cov))?, disp)
}

/// `A = √η 𝟙`, `G = (1 − η) 𝟙` on `n` modes.
pub fn attenuation_channel(eta: f64, n: usize) -> Result<GaussianChannel> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param(format!(
            "transmissivity must lie in [0, 1], got {eta}"
        )));
    }
    if n == 0 {
        return Err(Error::param("channel needs at least one mode"));
    }
    let dim = 2 * n;
    Ok(GaussianChannel {
        a: DMatrix::identity(dim, dim) * eta.sqrt(),
        g: DMatrix::identity(dim, dim) * (1.0 - eta),
        shift: DVector::zeros(dim),
    })
}

/// Beam splitter of transmissivity `η` whose second input carries the
/// environment vacuum; tracing out its second output realises
/// [`attenuation_channel`].
pub fn attenuation_dilation(eta: f64) -> Result<SymplecticMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::param(format!(
            "transmissivity must lie in [0, 1], got {eta}"
        )));
    }
    Ok(SymplecticMatrix::beam_splitter(eta.sqrt().acos()))
}

/// Sub-normalised conditional state: the renormalised state and the
/// probability of the conditioning outcome.
#[derive(Debug, Clone)]
pub struct Conditioned {
    pub state: GaussianState,
    pub probability: f64,
}

struct Split {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d_a: DVector<f64>,
    d_b: DVector<f64>,
}

fn split_mode(state: &GaussianState, mode: usize) -> Result<Split> {
    let n = state.modes();
    if mode >= n {
        return Err(Error::dim(format!("mode {mode} out of range for {n} modes")));
    }
    if n < 2 {
        return Err(Error::dim("conditioning needs at least one unmeasured mode"));
    }
    let rest: Vec<usize> = (0..n).filter(|&k| k != mode).collect();
    let mut order = rest.clone();
    order.push(mode);
    let perm = linalg::mode_permutation(&order);
    let g = &perm * state.covariance().matrix() * perm.transpose();
    let d = &perm * state.displacement();
    let da = 2 * rest.len();
    Ok(Split {
        a: g.view((0, 0), (da, da)).into_owned(),
        b: g.view((da, da), (2, 2)).into_owned(),
        c: g.view((0, da), (da, 2)).into_owned(),
        d_a: d.rows(0, da).into_owned(),
        d_b: d.rows(da, 2).into_owned(),
    })
}

/// Projects `mode` onto the vacuum: `A − C(B + 𝟙)⁻¹Cᵀ` on the remaining modes.
pub fn vacuum_project(state: &GaussianState, mode: usize) -> Result<Conditioned> {
    let s = split_mode(state, mode)?;
    let bp = &s.b + DMatrix::identity(2, 2);
    let det = bp.determinant();
    let inv = bp
        .try_inverse()
        .ok_or_else(|| Error::Singular("B + 1 is singular".into()))?;
    let cov = &s.a - &s.c * &inv * s.c.transpose();
    let disp = &s.d_a - &s.c * &inv * &s.d_b;
    let probability = 2.0 / det.sqrt() * (-s.d_b.dot(&(&inv * &s.d_b))).exp();
    let state = GaussianState::new(CovarianceMatrix::new(linalg::symmetrize(&cov))?, disp)?;
    Ok(Conditioned { state, probability })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

impl std::str::FromStr for Quadrature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "X" => Ok(Self::X),
            "P" => Ok(Self::P),
            _ => Err(Error::Parse(format!("quadrature must be X or P, got {s:?}"))),
        }
    }
}

/// Ideal homodyne detection of `quadrature` on `mode`:
/// `A − C(πBπ)⁺Cᵀ`. The update carries no outcome, so the covariance is
/// outcome independent by construction.
pub fn homodyne_condition(
    state: &GaussianState,
    mode: usize,
    quadrature: Quadrature,
) -> Result<GaussianState> {
    let s = split_mode(state, mode)?;
    let pi = match quadrature {
        Quadrature::X => DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])),
        Quadrature::P => DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])),
    };
    let pinv = linalg::pinv(&(&pi * &s.b * &pi), PINV_CUTOFF);
    let cov = &s.a - &s.c * pinv * s.c.transpose();
    GaussianState::new(CovarianceMatrix::new(linalg::symmetrize(&cov))?, s.d_a)
}

/// Completely positive map represented by a bipartite matrix
/// `Γ = [[Γ₁, Γ₁₂], [Γ₁₂ᵀ, Γ₂]]`, output modes first, input modes second.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCpMap {
    gamma: DMatrix<f64>,
    displacement: DVector<f64>,
    n_out: usize,
}

impl GaussianCpMap {
    /// Rejects `Γ` violating `Γ + iσ ⪰ 0`; the tolerance scales with the
    /// largest entry of `Γ`.
    pub fn new(gamma: DMatrix<f64>, displacement: DVector<f64>, n_out: usize) -> Result<Self> {
        let cov = CovarianceMatrix::new(gamma)?;
        let n = cov.modes();
        if n_out == 0 || n_out >= n {
            return Err(Error::dim("Γ must split into nonempty output and input parts"));
        }
        if displacement.len() != 2 * n {
            return Err(Error::dim("Γ displacement length mismatch"));
        }
        let scale = linalg::max_abs(cov.matrix()).max(1.0);
        let min_eig = linalg::hermitian_min_eigenvalue(cov.matrix(), &sigma(n));
        if min_eig < -TOL_PSD * scale {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self {
            gamma: cov.into_inner(),
            displacement,
            n_out,
        })
    }

    /// Choi-type `Γ` of `ch` built from a two-mode squeezed resource with
    /// `cosh 2r = a`; converges to `ch` as `a → ∞` with error `O(1/a)`.
    pub fn from_channel(ch: &GaussianChannel, a: f64) -> Result<Self> {
        if ch.input_modes() != ch.output_modes() {
            return Err(Error::dim("Choi-type Γ needs a mode-preserving channel"));
        }
        if a < 1.0 {
            return Err(Error::param("resource parameter must satisfy a ≥ 1"));
        }
        let n = ch.input_modes();
        let dim = 2 * n;
        let s = (a * a - 1.0).sqrt();
        let z = DMatrix::from_diagonal(&DVector::from_fn(dim, |i, _| if i % 2 == 0 { 1.0 } else { -1.0 }));
        let g1 = &ch.a * ch.a.transpose() * a + &ch.g;
        let g12 = &ch.a * z * s;
        let mut gamma = DMatrix::zeros(2 * dim, 2 * dim);
        gamma.view_mut((0, 0), (dim, dim)).copy_from(&g1);
        gamma.view_mut((0, dim), (dim, dim)).copy_from(&g12);
        gamma.view_mut((dim, 0), (dim, dim)).copy_from(&g12.transpose());
        gamma
            .view_mut((dim, dim), (dim, dim))
            .copy_from(&(DMatrix::identity(dim, dim) * a));
        let disp = linalg::direct_sum_vec(&ch.shift, &DVector::zeros(dim));
        Self::new(linalg::symmetrize(&gamma), disp, n)
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn output_modes(&self) -> usize {
        self.n_out
    }

    pub fn input_modes(&self) -> usize {
        self.gamma.nrows() / 2 - self.n_out
    }
}

/// `γ ↦ Γ̃₁ − Γ̃₁₂(Γ̃₂ + γ)⁻¹Γ̃₁₂ᵀ` with `Γ̃ = FΓF` flipping the input momenta.
pub fn apply_cp_map(state: &GaussianState, m: &GaussianCpMap) -> Result<GaussianState> {
    let (n_out, n_in) = (m.output_modes(), m.input_modes());
    if state.modes() != n_in {
        return Err(Error::dim(format!(
            "{n_in}-mode map on a {}-mode state",
            state.modes()
        )));
    }
    let (o, i) = (2 * n_out, 2 * n_in);
    let mut f = DMatrix::identity(o + i, o + i);
    for k in 0..n_in {
        f[(o + 2 * k + 1, o + 2 * k + 1)] = -1.0;
    }
    let gt = &f * &m.gamma * &f;
    let g1 = gt.view((0, 0), (o, o));
    let g12 = gt.view((0, o), (o, i));
    let g2 = gt.view((o, o), (i, i));
    let denom = g2 + state.covariance().matrix();
    let inv = denom
        .clone()
        .try_inverse()
        .unwrap_or_else(|| linalg::pinv(&denom, PINV_CUTOFF));
    let cov = g1 - g12 * &inv * g12.transpose();
    let fd = &f * &m.displacement;
    let d1 = fd.rows(0, o);
    let d2 = fd.rows(o, i);
    let disp = d1 + g12 * &inv * (state.displacement() - d2);
    GaussianState::new(CovarianceMatrix::new(linalg::symmetrize(&cov))?, disp)
}

/// Certificate check: `(ch_A ⊗ ch_B)` maps `γ` onto `γ′` within `1e-8`.
pub fn log_channel_verify(
    cov: &CovarianceMatrix,
    target: &CovarianceMatrix,
    ch_a: &GaussianChannel,
    ch_b: &GaussianChannel,
    p: &ModePartition,
) -> Result<bool> {
    let n = cov.modes();
    if p.modes() != n || target.modes() != n {
        return Err(Error::dim("state, target and partition disagree on mode count"));
    }
    let local = ch_a
        .on_modes(&p.a_modes(), n)?
        .then(&ch_b.on_modes(&p.b_modes(), n)?)?;
    require_valid_channel(ch_a)?;
    require_valid_channel(ch_b)?;
    let out = &local.a * cov.matrix() * local.a.transpose() + &local.g;
    Ok(linalg::max_abs(&(out - target.matrix())) <= 1e-8)
}
