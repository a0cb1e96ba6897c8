//! Phase-space data model: covariance matrices, displacements, the symplectic
//! form, symplectic transformations and their decompositions.
//!
//! Canonical coordinates are ordered `(x₁, p₁, …, x_n, p_n)` with `[x, p] = i`
//! and the covariance matrix normalised so that the vacuum is the identity.
//! A quadratic Hamiltonian `H = Oᵀ g O` generates the state-space flow
//! `S(t) = exp(2 t σ g)`; the factor 2 is pinned by the Fock beam-splitter and
//! squeezer checks in the test suite.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, TOL_PSD};

/// Scale between the quadratic form `g` and the generator of the flow.
pub const GENERATOR_SCALE: f64 = 2.0;

const SYMMETRY_TOL: f64 = 1e-9;
const SYMPLECTIC_TOL: f64 = 1e-9;

/// The block-diagonal symplectic form `⊕ [[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("symplectic form needs at least one mode"));
        }
        Ok(Self { n, matrix: sigma(n) })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

pub fn symplectic_form(n: usize) -> Result<SymplecticForm> {
    SymplecticForm::new(n)
}

pub(crate) fn sigma(n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        s[(2 * k, 2 * k + 1)] = 1.0;
        s[(2 * k + 1, 2 * k)] = -1.0;
    }
    s
}

fn check_even_square(m: &DMatrix<f64>) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::dim(format!("expected a square matrix, got {r}×{c}")));
    }
    if r == 0 || r % 2 != 0 {
        return Err(Error::dim(format!("expected a nonzero even dimension, got {r}")));
    }
    Ok(r / 2)
}

/// Real symmetric `2n × 2n` matrix of second moments.
///
/// Construction only checks structure (shape and symmetry); physical validity
/// is reported by [`CovarianceMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

impl CovarianceMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_even_square(&m)?;
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("covariance matrix has non-finite entries"));
        }
        let asym = linalg::asymmetry(&m);
        if asym > SYMMETRY_TOL * linalg::max_abs(&m).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(linalg::symmetrize(&m)))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::dim(format!(
                "{} entries for a {dim}×{dim} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn vacuum(n: usize) -> Self {
        Self(DMatrix::identity(2 * n, 2 * n))
    }

    /// Product of thermal states with the given symplectic eigenvalues.
    pub fn thermal(nus: &[f64]) -> Result<Self> {
        let diag: Vec<f64> = nus.iter().flat_map(|&v| [v, v]).collect();
        Self::from_diagonal(&diag)
    }

    /// Covariance of `⊕_k` two-mode squeezed blocks, modes ordered
    /// `(A₁, B₁, A₂, B₂, …)`.
    pub fn two_mode_squeezed(rs: &[f64]) -> Self {
        let blocks = rs.iter().map(|&r| {
            let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    c, 0.0, s, 0.0, //
                    0.0, c, 0.0, -s, //
                    s, 0.0, c, 0.0, //
                    0.0, -s, 0.0, c,
                ],
            )
        });
        Self(blocks.fold(DMatrix::zeros(0, 0), |acc, b| linalg::direct_sum(&acc, &b)))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn validate(&self) -> ValidityReport {
        validity_of(&self.0)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().valid
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            Ok(())
        } else {
            Err(Error::Unphysical {
                min_eigenvalue: report.min_uncertainty_eigenvalue,
            })
        }
    }

    /// Squeezed iff some eigenvalue of γ lies below the vacuum level.
    pub fn is_squeezed(&self) -> bool {
        linalg::min_eigenvalue(&self.0) < 1.0 - TOL_PSD
    }

    /// Covariance of the listed modes (in that order).
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let n = self.modes();
        if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
            return Err(Error::dim(format!("mode {bad} out of range for {n} modes")));
        }
        Ok(Self(linalg::submatrix_modes(&self.0, modes)))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self(linalg::direct_sum(&self.0, &other.0))
    }
}

/// Outcome of [`validate_covariance`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub valid: bool,
    /// Minimum eigenvalue of the Hermitian matrix `γ + iσ`.
    pub min_uncertainty_eigenvalue: f64,
    /// Symplectic eigenvalues, descending.
    pub symplectic_eigenvalues: Vec<f64>,
}

/// Checks the uncertainty relation `γ + iσ ⪰ 0`.
///
/// A non-symmetric or badly shaped input is a structural error, distinct from
/// a report with `valid == false`.
pub fn validate_covariance(m: &DMatrix<f64>) -> Result<ValidityReport> {
    Ok(CovarianceMatrix::new(m.clone())?.validate())
}

fn validity_of(g: &DMatrix<f64>) -> ValidityReport {
    let n = g.nrows() / 2;
    let min_eig = linalg::hermitian_min_eigenvalue(g, &sigma(n));
    ValidityReport {
        valid: min_eig >= -TOL_PSD,
        min_uncertainty_eigenvalue: min_eig,
        symplectic_eigenvalues: symplectic_spectrum(g),
    }
}

/// Moduli of the eigenvalues of `iσγ`, one per mode, descending.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Vec<f64> {
    symplectic_spectrum(cov.matrix())
}

fn symplectic_spectrum(g: &DMatrix<f64>) -> Vec<f64> {
    let n = g.nrows() / 2;
    let mut nus: Vec<f64> = if let Some((half, _)) = linalg::sqrt_and_inv_sqrt(g) {
        // γ^{1/2} σ γ^{1/2} is antisymmetric with eigenvalues ±iν
        let a = &half * sigma(n) * &half;
        let ata = linalg::symmetrize(&(a.transpose() * &a));
        let mut ev: Vec<f64> = linalg::symmetric_eigen(ata)
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev.into_iter().step_by(2).collect()
    } else {
        let mut ev: Vec<f64> = (sigma(n) * g)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev.into_iter().step_by(2).collect()
    };
    nus.truncate(n);
    nus
}

/// First and second moments of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: CovarianceMatrix,
    disp: DVector<f64>,
}

impl GaussianState {
    pub fn new(cov: CovarianceMatrix, disp: DVector<f64>) -> Result<Self> {
        if disp.len() != 2 * cov.modes() {
            return Err(Error::dim(format!(
                "displacement of length {} for {} modes",
                disp.len(),
                cov.modes()
            )));
        }
        if disp.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("displacement has non-finite entries"));
        }
        cov.require_valid()?;
        Ok(Self { cov, disp })
    }

    /// Centred state with the given covariance.
    pub fn centered(cov: CovarianceMatrix) -> Result<Self> {
        let n = cov.modes();
        Self::new(cov, DVector::zeros(2 * n))
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            cov: CovarianceMatrix::vacuum(n),
            disp: DVector::zeros(2 * n),
        }
    }

    pub(crate) fn from_parts_unchecked(cov: CovarianceMatrix, disp: DVector<f64>) -> Self {
        Self { cov, disp }
    }

    pub fn modes(&self) -> usize {
        self.cov.modes()
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.disp
    }

    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let cov = self.cov.reduced(modes)?;
        let disp = linalg::subvector_modes(&self.disp, modes);
        Ok(Self { cov, disp })
    }

    pub fn displaced(mut self, shift: &DVector<f64>) -> Result<Self> {
        if shift.len() != self.disp.len() {
            return Err(Error::dim("displacement length mismatch"));
        }
        self.disp += shift;
        Ok(self)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        symplectic_eigenvalues(&self.cov)
            .iter()
            .all(|&nu| (nu - 1.0).abs() <= tol)
    }
}

/// Real `2n × 2n` matrix with `S σ Sᵀ = σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let residual = symplectic_residual(&m)?;
        if residual > symplectic_tol(&m) {
            return Err(Error::NotSymplectic(residual));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > 1e-8 * linalg::max_abs(&m).max(1.0).powi(2) {
            return Err(Error::NotSymplectic((det - 1.0).abs()));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(2 * n, 2 * n))
    }

    /// Phase rotation of a single mode.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self(DMatrix::from_row_slice(2, 2, &[c, s, -s, c]))
    }

    /// Single-mode squeezer `diag(e^r, e^{-r})`.
    pub fn squeezer(r: f64) -> Self {
        Self(DMatrix::from_row_slice(2, 2, &[r.exp(), 0.0, 0.0, (-r).exp()]))
    }

    /// Two-mode beam splitter with transmission amplitude `cos θ`; matches the
    /// Fock-space beam splitter with `T = cos θ`, `R = sin θ`.
    pub fn beam_splitter(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
                Complex64::new(c, 0.0),
            ],
        );
        Self::passive_from_unitary(&u).expect("real rotation is unitary")
    }

    /// Two-mode squeezer mapping the vacuum onto the `cosh 2r / sinh 2r` block.
    pub fn two_mode_squeezer(r: f64) -> Self {
        let (c, s) = (r.cosh(), r.sinh());
        Self(DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        ))
    }

    /// Passive symplectic of a unitary mode transformation `α ↦ u α`.
    pub fn passive_from_unitary(u: &DMatrix<Complex64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || n == 0 {
            return Err(Error::dim("unitary must be square and nonempty"));
        }
        let dev = (u.adjoint() * u - DMatrix::identity(n, n))
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        if dev > 1e-9 {
            return Err(Error::param(format!("matrix is not unitary (deviation {dev:e})")));
        }
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let z = u[(j, k)];
                s[(2 * j, 2 * k)] = z.re;
                s[(2 * j, 2 * k + 1)] = -z.im;
                s[(2 * j + 1, 2 * k)] = z.im;
                s[(2 * j + 1, 2 * k + 1)] = z.re;
            }
        }
        Ok(Self(s))
    }

    /// Inverse of [`passive_from_unitary`](Self::passive_from_unitary);
    /// `None` unless the matrix is passive.
    pub fn to_unitary(&self) -> Option<DMatrix<Complex64>> {
        if !is_passive(self) {
            return None;
        }
        let n = self.modes();
        Some(DMatrix::from_fn(n, n, |j, k| {
            Complex64::new(self.0[(2 * j, 2 * k)], self.0[(2 * j + 1, 2 * k)])
        }))
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn inverse(&self) -> Self {
        let s = sigma(self.modes());
        Self(-(&s * self.0.transpose() * &s))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self(linalg::direct_sum(&self.0, &other.0))
    }

    /// Embeds this transformation on `modes` of an `n`-mode system.
    pub fn embed(&self, modes: &[usize], n: usize) -> Result<Self> {
        if modes.len() != self.modes() || modes.iter().any(|&m| m >= n) {
            return Err(Error::dim("embedding modes do not match"));
        }
        Ok(Self(linalg::embed_modes(&self.0, modes, n)))
    }

    pub fn is_passive(&self) -> bool {
        is_passive(self)
    }
}

impl std::ops::Mul for &SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: Self) -> SymplecticMatrix {
        self.compose(rhs)
    }
}

fn symplectic_residual(m: &DMatrix<f64>) -> Result<f64> {
    let n = check_even_square(m)?;
    let s = sigma(n);
    Ok(linalg::max_abs(&(m * &s * m.transpose() - &s)))
}

fn symplectic_tol(m: &DMatrix<f64>) -> f64 {
    SYMPLECTIC_TOL * linalg::max_abs(m).max(1.0).powi(2)
}

/// `S σ Sᵀ = σ` (and `det S = 1`) within tolerance.
pub fn is_symplectic(m: &DMatrix<f64>) -> Result<bool> {
    let residual = symplectic_residual(m)?;
    if residual > symplectic_tol(m) {
        return Ok(false);
    }
    Ok((m.determinant() - 1.0).abs() <= 1e-8 * linalg::max_abs(m).max(1.0).powi(2))
}

/// Symplectic and orthogonal.
pub fn is_passive(s: &SymplecticMatrix) -> bool {
    let m = s.matrix();
    let id = DMatrix::identity(m.nrows(), m.ncols());
    linalg::max_abs(&(m * m.transpose() - id)) <= 1e-9
}

pub fn apply_symplectic(state: &GaussianState, s: &SymplecticMatrix) -> Result<GaussianState> {
    if s.modes() != state.modes() {
        return Err(Error::dim(format!(
            "{}-mode transformation on a {}-mode state",
            s.modes(),
            state.modes()
        )));
    }
    let m = s.matrix();
    let cov = CovarianceMatrix::new(linalg::symmetrize(&(m * state.cov.matrix() * m.transpose())))?;
    let disp = m * &state.disp;
    Ok(GaussianState::from_parts_unchecked(cov, disp))
}

/// Coefficients `g` of `H = Σ g_jk (O_j O_k + O_k O_j)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian(DMatrix<f64>);

impl QuadraticHamiltonian {
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        check_even_square(&g)?;
        let asym = linalg::asymmetry(&g);
        if asym > SYMMETRY_TOL * linalg::max_abs(&g).max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(linalg::symmetrize(&g)))
    }

    /// `θ (p₁x₂ − x₁p₂)`, the generator of [`SymplecticMatrix::beam_splitter`].
    pub fn beam_splitter(theta: f64) -> Self {
        let mut g = DMatrix::zeros(4, 4);
        g[(1, 2)] = theta / 2.0;
        g[(2, 1)] = theta / 2.0;
        g[(0, 3)] = -theta / 2.0;
        g[(3, 0)] = -theta / 2.0;
        Self(g)
    }

    pub fn modes(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// `S = exp(2 t σ g)`.
pub fn symplectic_from_hamiltonian(g: &QuadraticHamiltonian, t: f64) -> SymplecticMatrix {
    let n = g.modes();
    let generator = sigma(n) * g.matrix() * (GENERATOR_SCALE * t);
    SymplecticMatrix::from_unchecked(generator.exp())
}

/// `S = K · ⊕ diag(d_j, 1/d_j) · L` with passive `K`, `L`.
#[derive(Debug, Clone)]
pub struct EulerDecomposition {
    pub left: SymplecticMatrix,
    pub squeezing: Vec<f64>,
    pub right: SymplecticMatrix,
}

impl EulerDecomposition {
    pub fn middle(&self) -> DMatrix<f64> {
        let diag: Vec<f64> = self.squeezing.iter().flat_map(|&d| [d, 1.0 / d]).collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.left.matrix() * self.middle() * self.right.matrix()
    }
}

/// Greedily extracts an orthonormal family of `count` vectors from
/// `candidates` (already ordered by preference), each completed by
/// `partner(v)`, which must be orthogonal to `v` and to the family span.
fn paired_basis(
    candidates: &[DVector<f64>],
    count: usize,
    mut partner: impl FnMut(&DVector<f64>, &[DVector<f64>]) -> DVector<f64>,
) -> Result<Vec<DVector<f64>>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2 * count);
    let mut used = vec![false; candidates.len()];
    while basis.len() < 2 * count {
        let residuals: Vec<DVector<f64>> = candidates
            .iter()
            .map(|c| orthogonalize(c.clone(), &basis))
            .collect();
        let best = residuals
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(_, r)| r.norm())
            .fold(0.0_f64, f64::max);
        if best < 1e-6 {
            return Err(Error::Decomposition("could not complete symplectic basis".into()));
        }
        let pick = residuals
            .iter()
            .enumerate()
            .position(|(i, r)| !used[i] && r.norm() >= 0.7 * best)
            .expect("best residual exists");
        used[pick] = true;
        let v = residuals[pick].normalize();
        let w = orthogonalize(partner(&v, &basis), &basis);
        let w = orthogonalize(w, std::slice::from_ref(&v)).normalize();
        basis.push(v);
        basis.push(w);
    }
    Ok(basis)
}

fn orthogonalize(mut v: DVector<f64>, basis: &[DVector<f64>]) -> DVector<f64> {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
    }
    v
}

pub fn euler_decomposition(s: &SymplecticMatrix) -> Result<EulerDecomposition> {
    let m = s.matrix();
    if !is_symplectic(m)? {
        return Err(Error::NotSymplectic(symplectic_residual(m)?));
    }
    let n = s.modes();
    let sig = sigma(n);
    let gram = linalg::symmetrize(&(m * m.transpose()));
    let eig = linalg::symmetric_eigen(gram.clone());
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let candidates: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let basis = paired_basis(&candidates, n, |v, _| -(&sig * v))?;
    let k = DMatrix::from_columns(&basis);
    let squeezing: Vec<f64> = (0..n)
        .map(|j| {
            let v = &basis[2 * j];
            v.dot(&(&gram * v)).sqrt()
        })
        .collect();
    let inv_mid: Vec<f64> = squeezing.iter().flat_map(|&d| [1.0 / d, d]).collect();
    let l = DMatrix::from_diagonal(&DVector::from_vec(inv_mid)) * k.transpose() * m;
    Ok(EulerDecomposition {
        left: SymplecticMatrix::from_unchecked(k),
        squeezing,
        right: SymplecticMatrix::from_unchecked(l),
    })
}

/// `S γ Sᵀ = ⊕ ν_k 𝟙₂` with `ν` descending.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub transform: SymplecticMatrix,
    pub symplectic_eigenvalues: Vec<f64>,
}

impl WilliamsonDecomposition {
    pub fn normal_form(&self) -> DMatrix<f64> {
        let diag: Vec<f64> = self.symplectic_eigenvalues.iter().flat_map(|&v| [v, v]).collect();
        DMatrix::from_diagonal(&DVector::from_vec(diag))
    }
}

fn paired_diagonal(g: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = g.nrows() / 2;
    let scale = linalg::max_abs(g).max(1.0) * 1e-14;
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i != j && g[(i, j)].abs() > scale {
                return None;
            }
        }
    }
    let nus: Vec<f64> = (0..n).map(|k| g[(2 * k, 2 * k)]).collect();
    if (0..n).any(|k| (g[(2 * k + 1, 2 * k + 1)] - nus[k]).abs() > scale) {
        return None;
    }
    Some(nus)
}

pub fn williamson(cov: &CovarianceMatrix) -> Result<WilliamsonDecomposition> {
    let g = cov.matrix();
    let n = cov.modes();
    if let Some(nus) = paired_diagonal(g) {
        if nus.iter().any(|&v| v <= 0.0) {
            return Err(Error::Singular(
                "covariance matrix is not positive definite".into(),
            ));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| nus[b].total_cmp(&nus[a]));
        let p = linalg::mode_permutation(&order);
        return Ok(WilliamsonDecomposition {
            transform: SymplecticMatrix::from_unchecked(p),
            symplectic_eigenvalues: order.iter().map(|&i| nus[i]).collect(),
        });
    }
    let (_, inv_half) = linalg::sqrt_and_inv_sqrt(g)
        .ok_or_else(|| Error::Singular("covariance matrix is not positive definite".into()))?;
    let b = &inv_half * sigma(n) * &inv_half;
    let btb = linalg::symmetrize(&(b.transpose() * &b));
    let eig = linalg::symmetric_eigen(btb);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let candidates: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let basis = paired_basis(&candidates, n, |u, _| -(&b * u))?;
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let mu = basis[2 * j].dot(&(&b * &basis[2 * j + 1]));
            (1.0 / mu, j)
        })
        .collect();
    if pairs.iter().any(|(nu, _)| !(nu.is_finite() && *nu > 0.0)) {
        return Err(Error::Decomposition("non-positive symplectic eigenvalue".into()));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let cols: Vec<DVector<f64>> = pairs
        .iter()
        .flat_map(|&(_, j)| [basis[2 * j].clone(), basis[2 * j + 1].clone()])
        .collect();
    let o = DMatrix::from_columns(&cols);
    let root: Vec<f64> = pairs.iter().flat_map(|&(nu, _)| [nu.sqrt(), nu.sqrt()]).collect();
    let s = DMatrix::from_diagonal(&DVector::from_vec(root)) * o.transpose() * inv_half;
    Ok(WilliamsonDecomposition {
        transform: SymplecticMatrix::from_unchecked(s),
        symplectic_eigenvalues: pairs.iter().map(|p| p.0).collect(),
    })
}

/// `χ(ξ) = exp(−¼ ξᵀ Γ ξ + i ξᵀ σ d)` with `Γ = σᵀ γ σ`.
///
/// The first-moment term is imaginary for the Weyl operator
/// `W_ξ = exp(i ξᵀ σ O)`.
pub fn characteristic_function(state: &GaussianState, xi: &DVector<f64>) -> Result<Complex64> {
    let n = state.modes();
    if xi.len() != 2 * n {
        return Err(Error::dim("ξ has the wrong length"));
    }
    let s = sigma(n);
    let big_gamma = s.transpose() * state.cov.matrix() * &s;
    let quad = xi.dot(&(&big_gamma * xi));
    let phase = xi.dot(&(&s * &state.disp));
    Ok(Complex64::new(-0.25 * quad, phase).exp())
}

/// `W(ξ) = exp(−(ξ−d)ᵀ γ⁻¹ (ξ−d)) / (πⁿ √det γ)`.
pub fn wigner_at(state: &GaussianState, xi: &DVector<f64>) -> Result<f64> {
    let n = state.modes();
    if xi.len() != 2 * n {
        return Err(Error::dim("ξ has the wrong length"));
    }
    let g = state.cov.matrix();
    let det = g.determinant();
    let inv = g
        .clone()
        .try_inverse()
        .filter(|_| det > 0.0)
        .ok_or_else(|| Error::Singular("covariance matrix is singular".into()))?;
    let delta = xi - &state.disp;
    let quad = delta.dot(&(&inv * &delta));
    Ok((-quad).exp() / (std::f64::consts::PI.powi(n as i32) * det.sqrt()))
}

/// `Σ_k [(γ_xx + γ_pp)/4 + (d_x² + d_p²)/2 − 1/2]`.
pub fn mean_photon_number(state: &GaussianState) -> f64 {
    let g = state.cov.matrix();
    let d = &state.disp;
    (0..state.modes())
        .map(|k| {
            let (x, p) = (2 * k, 2 * k + 1);
            (g[(x, x)] + g[(p, p)]) / 4.0 + (d[x] * d[x] + d[p] * d[p]) / 2.0 - 0.5
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn form_blocks() {
        let s1 = symplectic_form(1).unwrap();
        assert_eq!(
            s1.matrix(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
        );
        let s2 = symplectic_form(2).unwrap();
        assert_eq!(s2.matrix()[(2, 3)], 1.0);
        assert_eq!(s2.matrix()[(0, 3)], 0.0);
        let s3 = sigma(3);
        assert_eq!(&s3 * &s3, -DMatrix::identity(6, 6));
        assert!(symplectic_form(0).is_err());
    }

    #[test]
    fn validity_examples() {
        let vac = validate_covariance(&DMatrix::identity(2, 2)).unwrap();
        assert!(vac.valid);
        assert_abs_diff_eq!(vac.min_uncertainty_eigenvalue, 0.0, epsilon = 1e-12);

        let bad = validate_covariance(&DMatrix::from_diagonal_element(2, 2, 0.5)).unwrap();
        assert!(!bad.valid);
        assert_abs_diff_eq!(bad.min_uncertainty_eigenvalue, -0.5, epsilon = 1e-12);

        // (a+b)/2 − √(((a−b)/2)² + 1) with a = 2, b = 0.5
        let sq = validate_covariance(&DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]))).unwrap();
        let closed = 1.25 - (0.75_f64.powi(2) + 1.0).sqrt();
        assert!(sq.valid);
        assert_abs_diff_eq!(sq.min_uncertainty_eigenvalue, closed, epsilon = 1e-12);
        assert_abs_diff_eq!(closed, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn asymmetric_input_is_structural_error() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 1.0]);
        assert!(matches!(validate_covariance(&m), Err(Error::NotSymmetric(_))));
        assert!(matches!(
            validate_covariance(&DMatrix::identity(3, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn symplectic_examples() {
        assert!(is_symplectic(&DMatrix::identity(4, 4)).unwrap());
        assert!(is_symplectic(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0 / 3.0]))).unwrap());
        assert!(!is_symplectic(&DMatrix::from_diagonal_element(2, 2, 2.0)).unwrap());
        assert!(is_symplectic(&DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn passive_examples() {
        assert!(is_passive(&SymplecticMatrix::rotation(0.7)));
        assert!(!is_passive(&SymplecticMatrix::squeezer(2.0_f64.ln())));
        let bs = symplectic_from_hamiltonian(
            &QuadraticHamiltonian::beam_splitter(std::f64::consts::FRAC_PI_4),
            1.0,
        );
        assert!(is_symplectic(bs.matrix()).unwrap());
        assert!(is_passive(&bs));
    }

    #[test]
    fn beam_splitter_generator_matches_constructor() {
        for &theta in &[0.1, 0.6, 1.3] {
            let flow = symplectic_from_hamiltonian(&QuadraticHamiltonian::beam_splitter(theta), 1.0);
            let direct = SymplecticMatrix::beam_splitter(theta);
            assert!(linalg::max_abs(&(flow.matrix() - direct.matrix())) < 1e-12);
        }
    }

    #[test]
    fn harmonic_oscillator_flow_is_rotation() {
        let g = QuadraticHamiltonian::new(DMatrix::identity(2, 2)).unwrap();
        for &t in &[0.0, 0.3, 1.1, 2.5] {
            let s = symplectic_from_hamiltonian(&g, t);
            assert!(is_passive(&s));
            let rot = SymplecticMatrix::rotation(2.0 * t);
            assert!(linalg::max_abs(&(s.matrix() - rot.matrix())) < 1e-12);
        }
        let zero = QuadraticHamiltonian::new(DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(
            symplectic_from_hamiltonian(&zero, 1.0).matrix(),
            &DMatrix::identity(4, 4)
        );
    }

    #[test]
    fn congruence_examples() {
        let vac = GaussianState::vacuum(1);
        let r = 0.4;
        let sq = apply_symplectic(&vac, &SymplecticMatrix::squeezer(r)).unwrap();
        assert_abs_diff_eq!(sq.covariance().matrix()[(0, 0)], (2.0 * r).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            sq.covariance().matrix()[(1, 1)],
            (-2.0 * r).exp(),
            epsilon = 1e-12
        );
        assert!(sq.covariance().is_squeezed());

        let rot = apply_symplectic(&vac, &SymplecticMatrix::rotation(1.2)).unwrap();
        assert!(linalg::max_abs(&(rot.covariance().matrix() - DMatrix::identity(2, 2))) < 1e-14);

        let tms = apply_symplectic(
            &GaussianState::vacuum(2),
            &SymplecticMatrix::two_mode_squeezer(0.5),
        )
        .unwrap();
        let expected = CovarianceMatrix::two_mode_squeezed(&[0.5]);
        assert!(linalg::max_abs(&(tms.covariance().matrix() - expected.matrix())) < 1e-12);
        assert!(apply_symplectic(&vac, &SymplecticMatrix::identity(2)).is_err());
    }

    #[test]
    fn williamson_examples() {
        let w = williamson(&CovarianceMatrix::vacuum(1)).unwrap();
        assert_abs_diff_eq!(w.symplectic_eigenvalues[0], 1.0, epsilon = 1e-12);
        let w = williamson(&CovarianceMatrix::thermal(&[2.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(w.symplectic_eigenvalues[0], 2.0, epsilon = 1e-12);
        let tms = CovarianceMatrix::two_mode_squeezed(&[0.5]);
        let w = williamson(&tms).unwrap();
        for nu in &w.symplectic_eigenvalues {
            assert_abs_diff_eq!(*nu, 1.0, epsilon = 1e-9);
        }
        let s = w.transform.matrix();
        assert!(is_symplectic(s).unwrap());
        assert!(linalg::max_abs(&(s * tms.matrix() * s.transpose() - w.normal_form())) < 1e-8);
        let singular = CovarianceMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(williamson(&singular).is_err());
    }

    #[test]
    fn williamson_degenerate_spectrum() {
        // two equal thermal modes mixed by a squeezer and a beam splitter
        let core = CovarianceMatrix::thermal(&[1.7, 1.7, 1.2]).unwrap();
        let s = SymplecticMatrix::squeezer(0.3)
            .direct_sum(&SymplecticMatrix::beam_splitter(0.4))
            .compose(&SymplecticMatrix::rotation(0.2).direct_sum(&SymplecticMatrix::two_mode_squeezer(0.6)));
        let g = CovarianceMatrix::new(s.matrix() * core.matrix() * s.matrix().transpose()).unwrap();
        let w = williamson(&g).unwrap();
        assert_abs_diff_eq!(w.symplectic_eigenvalues[0], 1.7, epsilon = 1e-9);
        assert_abs_diff_eq!(w.symplectic_eigenvalues[1], 1.7, epsilon = 1e-9);
        assert_abs_diff_eq!(w.symplectic_eigenvalues[2], 1.2, epsilon = 1e-9);
        let t = w.transform.matrix();
        assert!(linalg::max_abs(&(t * g.matrix() * t.transpose() - w.normal_form())) < 1e-8);
        assert!(is_symplectic(t).unwrap());
    }

    #[test]
    fn euler_examples() {
        let passive = SymplecticMatrix::beam_splitter(0.3)
            .compose(&SymplecticMatrix::rotation(1.0).direct_sum(&SymplecticMatrix::rotation(-0.4)));
        let e = euler_decomposition(&passive).unwrap();
        for d in &e.squeezing {
            assert_abs_diff_eq!(*d, 1.0, epsilon = 1e-9);
        }
        assert!(linalg::max_abs(&(e.reconstruct() - passive.matrix())) < 1e-10);

        let r = 0.8;
        let sq = SymplecticMatrix::squeezer(r);
        let e = euler_decomposition(&sq).unwrap();
        assert_abs_diff_eq!(e.squeezing[0], r.exp(), epsilon = 1e-10);
        assert!(is_passive(&e.left) && is_passive(&e.right));
        assert!(linalg::max_abs(&(e.reconstruct() - sq.matrix())) < 1e-10);
    }

    #[test]
    fn unitary_round_trip() {
        let s = SymplecticMatrix::beam_splitter(0.3)
            .compose(&SymplecticMatrix::rotation(0.5).direct_sum(&SymplecticMatrix::identity(1)));
        let u = s.to_unitary().unwrap();
        let back = SymplecticMatrix::passive_from_unitary(&u).unwrap();
        assert!(linalg::max_abs(&(back.matrix() - s.matrix())) < 1e-14);
        assert!(SymplecticMatrix::squeezer(0.2).to_unitary().is_none());
    }

    #[test]
    fn characteristic_and_wigner_examples() {
        let vac = GaussianState::vacuum(1);
        let xi = DVector::from_vec(vec![0.7, -1.1]);
        assert_abs_diff_eq!(characteristic_function(&vac, &DVector::zeros(2)).unwrap().re, 1.0);
        let chi = characteristic_function(&vac, &xi).unwrap();
        assert_abs_diff_eq!(chi.re, (-xi.norm_squared() / 4.0).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(chi.im, 0.0);

        let shifted = GaussianState::vacuum(1)
            .displaced(&DVector::from_vec(vec![0.4, 0.9]))
            .unwrap();
        let chi_d = characteristic_function(&shifted, &xi).unwrap();
        assert_abs_diff_eq!(chi_d.norm(), chi.norm(), epsilon = 1e-14);

        assert_abs_diff_eq!(
            wigner_at(&vac, &DVector::zeros(2)).unwrap(),
            1.0 / std::f64::consts::PI,
            epsilon = 1e-15
        );
        let th = GaussianState::centered(CovarianceMatrix::thermal(&[3.0]).unwrap()).unwrap();
        let a = DVector::from_vec(vec![0.3, 0.2]);
        assert_abs_diff_eq!(
            wigner_at(&th, &a).unwrap(),
            wigner_at(&th, &(-&a)).unwrap(),
            epsilon = 1e-16
        );
    }

    #[test]
    fn wigner_integrates_to_one() {
        // composite Simpson rule on [−8, 8]²
        let th = GaussianState::centered(CovarianceMatrix::thermal(&[3.0]).unwrap()).unwrap();
        let m = 400;
        let h = 16.0 / m as f64;
        let weight = |i: usize| {
            if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut total = 0.0;
        for i in 0..=m {
            for j in 0..=m {
                let xi = DVector::from_vec(vec![-8.0 + i as f64 * h, -8.0 + j as f64 * h]);
                total += weight(i) * weight(j) * wigner_at(&th, &xi).unwrap();
            }
        }
        total *= h * h / 9.0;
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn photon_number_examples() {
        assert_abs_diff_eq!(mean_photon_number(&GaussianState::vacuum(3)), 0.0);
        let th = GaussianState::centered(CovarianceMatrix::thermal(&[3.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(mean_photon_number(&th), 1.0, epsilon = 1e-15);
        let r = 0.7;
        let tms = GaussianState::centered(CovarianceMatrix::two_mode_squeezed(&[r])).unwrap();
        assert_abs_diff_eq!(mean_photon_number(&tms), 2.0 * r.sinh().powi(2), epsilon = 1e-12);
    }
}
