//! Entanglement criteria and measures on covariance matrices, pure-state
//! normal forms, and the GLOCC / LOCC convertibility orders.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, TOL_PSD};
use crate::symplectic::{self, sigma, CovarianceMatrix, SymplecticMatrix};

/// Purity threshold on the symplectic eigenvalues for the pure-state normal form.
pub const PURITY_TOL: f64 = 1e-6;
/// Admissible truncated Schmidt mass in [`glocc_vs_locc_gap`].
pub const SCHMIDT_TAIL_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

/// Assignment of every mode to party A or B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModePartition(Vec<Party>);

impl ModePartition {
    pub fn new(parties: Vec<Party>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::dim("partition of zero modes"));
        }
        Ok(Self(parties))
    }

    /// First `n_a` modes to A, the next `n_b` to B.
    pub fn split(n_a: usize, n_b: usize) -> Self {
        let mut v = vec![Party::A; n_a];
        v.extend(std::iter::repeat_n(Party::B, n_b));
        Self(v)
    }

    /// `A, B, A, B, …` over `2k` modes, the layout of
    /// [`CovarianceMatrix::two_mode_squeezed`].
    pub fn interleaved(k: usize) -> Self {
        Self(
            (0..2 * k)
                .map(|i| if i % 2 == 0 { Party::A } else { Party::B })
                .collect(),
        )
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn parties(&self) -> &[Party] {
        &self.0
    }

    pub fn a_modes(&self) -> Vec<usize> {
        self.modes_of(Party::A)
    }

    pub fn b_modes(&self) -> Vec<usize> {
        self.modes_of(Party::B)
    }

    pub fn n_a(&self) -> usize {
        self.a_modes().len()
    }

    pub fn n_b(&self) -> usize {
        self.b_modes().len()
    }

    fn modes_of(&self, p: Party) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == p).collect()
    }

    /// Mode order `(A₁, …, A_{n_A}, B₁, …, B_{n_B})`.
    pub fn grouped_order(&self) -> Vec<usize> {
        let mut v = self.a_modes();
        v.extend(self.b_modes());
        v
    }

    /// Mode order `(A₁, B₁, A₂, B₂, …)`; requires `n_A = n_B`.
    pub fn paired_order(&self) -> Result<Vec<usize>> {
        let (a, b) = (self.a_modes(), self.b_modes());
        if a.len() != b.len() {
            return Err(Error::dim("paired order needs n_A = n_B"));
        }
        Ok(a.into_iter().zip(b).flat_map(|(x, y)| [x, y]).collect())
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.modes() != n {
            return Err(Error::dim(format!(
                "partition covers {} modes, state has {n}",
                self.modes()
            )));
        }
        Ok(())
    }
}

impl FromStr for ModePartition {
    type Err = Error;

    /// Parses labels such as `"AB"`, `"AABB"` or `"A,B,A"`.
    fn from_str(s: &str) -> Result<Self> {
        let parties = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(Party::A),
                'B' => Ok(Party::B),
                other => Err(Error::Parse(format!("unknown party label {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parties)
    }
}

impl fmt::Display for ModePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Party::A => "A",
                Party::B => "B",
            })?;
        }
        Ok(())
    }
}

fn flip(p: &ModePartition) -> DMatrix<f64> {
    let n = p.modes();
    let mut f = DMatrix::identity(2 * n, 2 * n);
    for k in p.b_modes() {
        f[(2 * k + 1, 2 * k + 1)] = -1.0;
    }
    f
}

/// `F γ F`, reversing the momenta of every B mode.
pub fn partial_transpose_cov(cov: &CovarianceMatrix, p: &ModePartition) -> Result<CovarianceMatrix> {
    p.check(cov.modes())?;
    let f = flip(p);
    CovarianceMatrix::new(&f * cov.matrix() * &f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PptVerdict {
    NptEntangled,
    Ppt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PptReport {
    pub verdict: PptVerdict,
    /// Minimum eigenvalue of `γ̃ + iσ`.
    pub min_eigenvalue: f64,
    /// PPT implies separability (one party holds a single mode).
    pub conclusive: bool,
}

impl PptReport {
    pub fn is_entangled(&self) -> bool {
        self.verdict == PptVerdict::NptEntangled
    }

    pub fn note(&self) -> &'static str {
        match (self.verdict, self.conclusive) {
            (PptVerdict::NptEntangled, _) => "entangled",
            (PptVerdict::Ppt, true) => "separable",
            (PptVerdict::Ppt, false) => "inconclusive (bound entanglement possible)",
        }
    }
}

pub fn ppt_verdict(cov: &CovarianceMatrix, p: &ModePartition) -> Result<PptReport> {
    cov.require_valid()?;
    let pt = partial_transpose_cov(cov, p)?;
    let min_eig = linalg::hermitian_min_eigenvalue(pt.matrix(), &sigma(cov.modes()));
    Ok(PptReport {
        verdict: if min_eig < -TOL_PSD {
            PptVerdict::NptEntangled
        } else {
            PptVerdict::Ppt
        },
        min_eigenvalue: min_eig,
        conclusive: p.n_a().min(p.n_b()) <= 1,
    })
}

/// `Σ_k max(0, −log₂ ν̃_k)` over the symplectic eigenvalues of `γ̃`.
pub fn log_negativity_gaussian(cov: &CovarianceMatrix, p: &ModePartition) -> Result<f64> {
    cov.require_valid()?;
    let pt = partial_transpose_cov(cov, p)?;
    Ok(symplectic::symplectic_eigenvalues(&pt)
        .iter()
        .map(|&nu| (-nu.log2()).max(0.0))
        .sum())
}

/// Checks the certificate `γ ⪰ γ_A ⊕ γ_B` with valid `γ_A`, `γ_B`.
pub fn separability_witness_verify(
    cov: &CovarianceMatrix,
    gamma_a: &CovarianceMatrix,
    gamma_b: &CovarianceMatrix,
    p: &ModePartition,
) -> Result<bool> {
    p.check(cov.modes())?;
    if gamma_a.modes() != p.n_a() || gamma_b.modes() != p.n_b() {
        return Err(Error::dim("witness blocks do not match the partition"));
    }
    if !gamma_a.is_valid() || !gamma_b.is_valid() {
        return Ok(false);
    }
    let perm = linalg::mode_permutation(&p.grouped_order());
    let grouped = &perm * cov.matrix() * perm.transpose();
    let gap = grouped - linalg::direct_sum(gamma_a.matrix(), gamma_b.matrix());
    Ok(linalg::min_eigenvalue(&gap) >= -TOL_PSD)
}

/// Local transformations bringing a pure state into a direct sum of
/// two-mode squeezed blocks.
#[derive(Debug, Clone)]
pub struct SchmidtNormalForm {
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    /// Squeezing parameters, descending.
    pub r: Vec<f64>,
}

impl SchmidtNormalForm {
    /// `S_A ⊕ S_B` acting in the original mode order.
    pub fn local_transform(&self, p: &ModePartition) -> SymplecticMatrix {
        let n = p.modes();
        let mut m = linalg::embed_modes(self.s_a.matrix(), &p.a_modes(), n);
        m = linalg::embed_modes(self.s_b.matrix(), &p.b_modes(), n) * m;
        SymplecticMatrix::from_unchecked(m)
    }

    /// Target covariance in the paired order `(A₁, B₁, A₂, B₂, …)`.
    pub fn normal_form(&self) -> CovarianceMatrix {
        CovarianceMatrix::two_mode_squeezed(&self.r)
    }

    pub fn log_negativity(&self) -> f64 {
        self.r.iter().map(|r| 2.0 * r * std::f64::consts::LOG2_E).sum()
    }
}

fn blocks_ab(cov: &CovarianceMatrix, p: &ModePartition) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (a, b) = (p.a_modes(), p.b_modes());
    let perm = linalg::mode_permutation(&p.grouped_order());
    let g = &perm * cov.matrix() * perm.transpose();
    let (da, db) = (2 * a.len(), 2 * b.len());
    (
        g.view((0, 0), (da, da)).into_owned(),
        g.view((da, da), (db, db)).into_owned(),
        g.view((0, da), (da, db)).into_owned(),
    )
}

/// Nearest passive matrix to a near-passive `m`, via the polar factor of its
/// complex representation.
fn nearest_passive(m: &DMatrix<f64>) -> DMatrix<f64> {
    let k = m.nrows() / 2;
    let u = DMatrix::from_fn(k, k, |j, l| {
        let (a, b) = (2 * j, 2 * l);
        Complex64::new(
            0.5 * (m[(a, b)] + m[(a + 1, b + 1)]),
            0.5 * (m[(a + 1, b)] - m[(a, b + 1)]),
        )
    });
    let svd = u.svd(true, true);
    let polar = svd.u.expect("requested") * svd.v_t.expect("requested");
    SymplecticMatrix::passive_from_unitary(&polar)
        .expect("polar factor is unitary")
        .into_inner()
}

pub fn schmidt_normal_form(cov: &CovarianceMatrix, p: &ModePartition) -> Result<SchmidtNormalForm> {
    p.check(cov.modes())?;
    if p.n_a() != p.n_b() || p.n_a() == 0 {
        return Err(Error::dim("normal form needs n_A = n_B ≥ 1"));
    }
    cov.require_valid()?;
    let nus = symplectic::symplectic_eigenvalues(cov);
    let impurity = nus.iter().fold(0.0_f64, |a, &v| a.max((v - 1.0).abs()));
    if impurity > PURITY_TOL {
        return Err(Error::NotPure(impurity));
    }
    let k = p.n_a();
    let (ga, gb, c) = blocks_ab(cov, p);
    let wa = symplectic::williamson(&CovarianceMatrix::new(ga)?)?;
    let wb = symplectic::williamson(&CovarianceMatrix::new(gb)?)?;
    let s_a = wa.transform.into_inner();
    let mut s_b = wb.transform.into_inner();
    let nu = wa.symplectic_eigenvalues;
    let cp = &s_a * &c * s_b.transpose();

    let z = DMatrix::from_diagonal(&DVector::from_fn(
        2 * k,
        |i, _| if i % 2 == 0 { 1.0 } else { -1.0 },
    ));
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && (nu[end] - nu[start]).abs() <= 1e-6 * nu[start] {
            end += 1;
        }
        let s = (nu[start] * nu[start] - 1.0).max(0.0).sqrt();
        if s > 1e-7 {
            let len = 2 * (end - start);
            let q = cp.view((2 * start, 2 * start), (len, len)) / s;
            let zg = z.view((0, 0), (len, len)).into_owned();
            let r = nearest_passive(&(&zg * q));
            let mut emb = DMatrix::identity(2 * k, 2 * k);
            emb.view_mut((2 * start, 2 * start), (len, len)).copy_from(&r);
            s_b = emb * s_b;
        }
        start = end;
    }
    let r = nu.iter().map(|&v| 0.5 * v.max(1.0).acosh()).collect();
    Ok(SchmidtNormalForm {
        s_a: SymplecticMatrix::from_unchecked(s_a),
        s_b: SymplecticMatrix::from_unchecked(s_b),
        r,
    })
}

/// Local transforms and parameters of the two-mode standard form
/// `[[x₁𝟙, diag(x₃, x₄)], [diag(x₃, x₄), x₂𝟙]]`.
#[derive(Debug, Clone)]
pub struct SimonNormalForm {
    pub s_a: SymplecticMatrix,
    pub s_b: SymplecticMatrix,
    pub x: [f64; 4],
}

impl SimonNormalForm {
    pub fn matrix(&self) -> DMatrix<f64> {
        let [x1, x2, x3, x4] = self.x;
        DMatrix::from_row_slice(
            4,
            4,
            &[
                x1, 0.0, x3, 0.0, //
                0.0, x1, 0.0, x4, //
                x3, 0.0, x2, 0.0, //
                0.0, x4, 0.0, x2,
            ],
        )
    }

    pub fn local_transform(&self) -> SymplecticMatrix {
        self.s_a.direct_sum(&self.s_b)
    }
}

/// Two-mode standard form with `x₃ ≥ |x₄|`; mode 0 is A, mode 1 is B.
pub fn simon_normal_form(cov: &CovarianceMatrix) -> Result<SimonNormalForm> {
    if cov.modes() != 2 {
        return Err(Error::dim(format!(
            "two-mode state required, got {} modes",
            cov.modes()
        )));
    }
    cov.require_valid()?;
    let g = cov.matrix();
    let wa = symplectic::williamson(&CovarianceMatrix::new(g.view((0, 0), (2, 2)).into_owned())?)?;
    let wb = symplectic::williamson(&CovarianceMatrix::new(g.view((2, 2), (2, 2)).into_owned())?)?;
    let mut s_a = wa.transform.into_inner();
    let mut s_b = wb.transform.into_inner();
    let c = &s_a * g.view((0, 2), (2, 2)) * s_b.transpose();
    let off_diag = c[(0, 1)].abs().max(c[(1, 0)].abs());
    let normal = off_diag <= 1e-14 * linalg::max_abs(&c).max(1.0) && c[(0, 0)] >= c[(1, 1)].abs();
    if !normal {
        let svd = c.svd(true, true);
        let mut u = svd.u.expect("requested");
        let mut v = svd.v_t.expect("requested").transpose();
        if u.determinant() < 0.0 {
            u.column_mut(1).neg_mut();
        }
        if v.determinant() < 0.0 {
            v.column_mut(1).neg_mut();
        }
        s_a = u.transpose() * s_a;
        s_b = v.transpose() * s_b;
    }
    let full = linalg::direct_sum(&s_a, &s_b);
    let out = &full * g * full.transpose();
    let mut x = [
        0.5 * (out[(0, 0)] + out[(1, 1)]),
        0.5 * (out[(2, 2)] + out[(3, 3)]),
        out[(0, 2)],
        out[(1, 3)],
    ];
    if x[2] < x[3].abs() {
        // swap the roles of x and p on both sides
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        s_a = &swap * s_a;
        s_b = &swap * s_b;
        x.swap(2, 3);
    }
    if x[2] < 0.0 {
        s_a = -s_a;
        x[2] = -x[2];
        x[3] = -x[3];
    }
    Ok(SimonNormalForm {
        s_a: SymplecticMatrix::from_unchecked(s_a),
        s_b: SymplecticMatrix::from_unchecked(s_b),
        x,
    })
}

/// Local symplectic invariants `(det A, det B, det C, det γ)` of a two-mode state.
pub fn local_invariants(cov: &CovarianceMatrix) -> Result<[f64; 4]> {
    if cov.modes() != 2 {
        return Err(Error::dim("two-mode state required"));
    }
    let g = cov.matrix();
    Ok([
        g.view((0, 0), (2, 2)).determinant(),
        g.view((2, 2), (2, 2)).determinant(),
        g.view((0, 2), (2, 2)).determinant(),
        g.determinant(),
    ])
}

/// Geometric Schmidt coefficients `(1 − λ²) λ^{2n}`, `λ = tanh r`, for
/// `n < cutoff`, together with the truncated mass.
pub fn two_mode_squeezed_schmidt(r: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let l2 = r.tanh().powi(2);
    let mut coeffs = Vec::with_capacity(cutoff);
    let mut term = 1.0 - l2;
    for _ in 0..cutoff {
        coeffs.push(term);
        term *= l2;
    }
    (coeffs, l2.powi(cutoff as i32))
}

fn entropy_one(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let (c2, s2) = (r.cosh().powi(2), r.sinh().powi(2));
    c2 * c2.log2() - s2 * s2.log2()
}

/// Entropy of entanglement of `⊗_k` two-mode squeezed states, in bits.
pub fn entropy_of_entanglement_pure(r: &[f64]) -> Result<f64> {
    if let Some(bad) = r.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::param(format!(
            "squeezing parameters must be finite and ≥ 0, got {bad}"
        )));
    }
    Ok(r.iter().map(|&x| entropy_one(x)).sum())
}

fn padded_desc(v: &[f64], len: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(len, 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `r ≥ r′` componentwise after sorting and zero-padding.
pub fn glocc_convertible(r: &[f64], r_prime: &[f64]) -> bool {
    let len = r.len().max(r_prime.len());
    let (a, b) = (padded_desc(r, len), padded_desc(r_prime, len));
    a.iter().zip(&b).all(|(x, y)| *x >= *y - 1e-12)
}

fn check_spectrum(a: &[f64]) -> Result<()> {
    let total: f64 = a.iter().sum();
    if a.iter().any(|&x| !(x.is_finite() && x >= -1e-12)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!(
            "Schmidt spectrum must be a probability vector (sum {total})"
        )));
    }
    Ok(())
}

/// Majorisation test: `α` converts to `α′` iff every partial sum of `α` is
/// bounded by that of `α′`.
pub fn locc_convertible_pure(alpha: &[f64], alpha_prime: &[f64]) -> Result<bool> {
    check_spectrum(alpha)?;
    check_spectrum(alpha_prime)?;
    let len = alpha.len().max(alpha_prime.len());
    let (a, b) = (padded_desc(alpha, len), padded_desc(alpha_prime, len));
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        if sa > sb + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvertibilityGap {
    pub glocc: bool,
    pub locc: bool,
}

/// Compares `ρ(r)^{⊗2} → ρ(r′) ⊗ ρ(0)` under GLOCC and under LOCC, the
/// latter on Schmidt spectra truncated at `cutoff` photons per mode.
pub fn glocc_vs_locc_gap(r: f64, r_prime: f64, cutoff: usize) -> Result<ConvertibilityGap> {
    if !(r >= 0.0 && r_prime >= 0.0) {
        return Err(Error::param("squeezing parameters must be ≥ 0"));
    }
    if cutoff == 0 {
        return Err(Error::param("cutoff must be positive"));
    }
    let (one, tail_one) = two_mode_squeezed_schmidt(r, cutoff);
    let (target, tail_target) = two_mode_squeezed_schmidt(r_prime, cutoff);
    let tail_source = 1.0 - (1.0 - tail_one).powi(2);
    let tail = tail_source.max(tail_target);
    if tail > SCHMIDT_TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            limit: SCHMIDT_TAIL_LIMIT,
        });
    }
    let mut source: Vec<f64> = one.iter().flat_map(|a| one.iter().map(move |b| a * b)).collect();
    let norm: f64 = source.iter().sum();
    source.iter_mut().for_each(|x| *x /= norm);
    let norm: f64 = target.iter().sum();
    let target: Vec<f64> = target.iter().map(|x| x / norm).collect();
    Ok(ConvertibilityGap {
        glocc: glocc_convertible(&[r, r], &[r_prime, 0.0]),
        locc: locc_convertible_pure(&source, &target)?,
    })
}

/// First `r′` on `grid` with `glocc = false` and `locc = true`.
pub fn find_locc_gap(r: f64, grid: &[f64], cutoff: usize) -> Result<Option<f64>> {
    for &rp in grid {
        let gap = glocc_vs_locc_gap(r, rp, cutoff)?;
        if !gap.glocc && gap.locc {
            return Ok(Some(rp));
        }
    }
    Ok(None)
}
