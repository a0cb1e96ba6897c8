//! Small dense helpers shared by the phase-space and Fock modules.

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

/// Tolerance on the minimum eigenvalue for every `X + iY ⪰ 0` test.
pub const TOL_PSD: f64 = 1e-9;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Symmetric eigen-decomposition. Matrices whose tridiagonal form splits
/// into exactly zero blocks can make the QR iteration return NaN; those are
/// retried after shifting the spectrum away from zero.
pub fn symmetric_eigen(m: DMatrix<f64>) -> SymmetricEigen<f64, Dyn> {
    let finite = |e: &SymmetricEigen<f64, Dyn>| {
        e.eigenvalues
            .iter()
            .chain(e.eigenvectors.iter())
            .all(|x| x.is_finite())
    };
    let e = SymmetricEigen::new(m.clone());
    if finite(&e) || m.is_empty() {
        return e;
    }
    let n = m.nrows();
    let scale = max_abs(&m).max(f64::MIN_POSITIVE);
    for c in [1.0, std::f64::consts::E, 10.0] {
        let shift = c * scale;
        let mut e = SymmetricEigen::new(&m + DMatrix::identity(n, n) * shift);
        if finite(&e) {
            e.eigenvalues.add_scalar_mut(-shift);
            return e;
        }
    }
    panic!("symmetric eigensolver did not produce finite output");
}

/// Minimum eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    symmetric_eigen(symmetrize(m))
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &x| acc.min(x))
}

/// Minimum eigenvalue of the Hermitian matrix `x + i y` (x symmetric, y
/// antisymmetric), evaluated on the real symmetric embedding
/// `[[x, -y], [y, x]]`, whose spectrum is that of `x + i y` doubled.
pub fn hermitian_min_eigenvalue(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(x);
    big.view_mut((n, n), (n, n)).copy_from(x);
    big.view_mut((0, n), (n, n)).copy_from(&(-y));
    big.view_mut((n, 0), (n, n)).copy_from(y);
    min_eigenvalue(&big)
}

pub fn direct_sum(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = DMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn direct_sum_vec(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(a.len() + b.len());
    out.rows_mut(0, a.len()).copy_from(a);
    out.rows_mut(a.len(), b.len()).copy_from(b);
    out
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `rel_cutoff * s_max` treated as zero.
pub fn pinv(m: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let s_max = svd.singular_values.iter().fold(0.0_f64, |a, &b| a.max(b));
    let eps = (rel_cutoff * s_max).max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps)
        .expect("svd was computed with both singular-vector sets")
}

/// `(m^{1/2}, m^{-1/2})` of a symmetric positive definite matrix.
pub fn sqrt_and_inv_sqrt(m: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = symmetric_eigen(symmetrize(m));
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return None;
    }
    let q = &eig.eigenvectors;
    let sq = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let isq = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Some((q * sq * q.transpose(), q * isq * q.transpose()))
}

/// Mode permutation on the (x, p) ordering: mode `i` of the result is mode
/// `order[i]` of the input, i.e. `γ_new = P γ Pᵀ`.
pub fn mode_permutation(order: &[usize]) -> DMatrix<f64> {
    let n = order.len();
    let mut p = DMatrix::zeros(2 * n, 2 * n);
    for (new, &old) in order.iter().enumerate() {
        p[(2 * new, 2 * old)] = 1.0;
        p[(2 * new + 1, 2 * old + 1)] = 1.0;
    }
    p
}

/// Embeds a matrix acting on `modes` (in that order) into an `n`-mode identity.
pub fn embed_modes(local: &DMatrix<f64>, modes: &[usize], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(2 * n, 2 * n);
    for (a, &ma) in modes.iter().enumerate() {
        for (b, &mb) in modes.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    out[(2 * ma + i, 2 * mb + j)] = local[(2 * a + i, 2 * b + j)];
                }
            }
        }
    }
    out
}

/// Rows/columns of the listed modes.
pub fn submatrix_modes(m: &DMatrix<f64>, modes: &[usize]) -> DMatrix<f64> {
    let k = modes.len();
    DMatrix::from_fn(2 * k, 2 * k, |r, c| {
        m[(2 * modes[r / 2] + r % 2, 2 * modes[c / 2] + c % 2)]
    })
}

pub fn subvector_modes(v: &DVector<f64>, modes: &[usize]) -> DVector<f64> {
    DVector::from_fn(2 * modes.len(), |r, _| v[2 * modes[r / 2] + r % 2])
}

/// Eigenvalues of a Hermitian matrix, computed block by block over the
/// connected components of its nonzero pattern.
///
/// Fock-space matrices built from number-conserving operations decouple
/// into many small blocks; each block is still diagonalised densely.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = Vec::with_capacity(n);
    for idx in groups.values() {
        if idx.len() == 1 {
            out.push(m[(idx[0], idx[0])].re);
            continue;
        }
        let block = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
        out.extend(hermitian_eigen_dense(&block).0);
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix in real arithmetic: a real
/// matrix is diagonalised directly, a complex one through the embedding
/// `[[X, −Y], [Y, X]]`, whose spectrum is that of `X + iY` doubled.
fn hermitian_eigen_dense(m: &DMatrix<Complex64>) -> (Vec<f64>, SymmetricEigen<f64, nalgebra::Dyn>) {
    let n = m.nrows();
    let x = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let y = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].im - m[(j, i)].im));
    if y.iter().all(|&v| v == 0.0) {
        let e = symmetric_eigen(x);
        return (e.eigenvalues.iter().copied().collect(), e);
    }
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&x);
    big.view_mut((n, n), (n, n)).copy_from(&x);
    big.view_mut((0, n), (n, n)).copy_from(&(-&y));
    big.view_mut((n, 0), (n, n)).copy_from(&y);
    let e = symmetric_eigen(big);
    let mut ev: Vec<f64> = e.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    (ev.into_iter().step_by(2).collect(), e)
}

/// `f(H)` for Hermitian `H`, applied through its spectral decomposition.
pub fn hermitian_function(m: &DMatrix<Complex64>, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
    let n = m.nrows();
    let (_, e) = hermitian_eigen_dense(m);
    let fx = e.eigenvalues.map(&f);
    let r = &e.eigenvectors * DMatrix::from_diagonal(&fx) * e.eigenvectors.transpose();
    if r.nrows() == n {
        r.map(|v| Complex64::new(v, 0.0))
    } else {
        DMatrix::from_fn(n, n, |i, j| Complex64::new(r[(i, j)], r[(i + n, j)]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_doubles_hermitian_spectrum() {
        // diag(a, a) + iσ has eigenvalues a ± 1
        let x = DMatrix::from_diagonal_element(2, 2, 0.5);
        let y = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!((hermitian_min_eigenvalue(&x, &y) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigen_of_split_tridiagonal_is_finite() {
        // outer product of a geometric vector, padded with zero rows
        let n = 100;
        let v = DVector::from_fn(n, |i, _| {
            if i % 11 == 0 {
                0.46f64.powi((i / 11) as i32)
            } else {
                0.0
            }
        });
        let m = &v * v.transpose();
        let e = symmetric_eigen(m.clone());
        assert!(e.eigenvalues.iter().all(|x| x.is_finite()));
        let top = e.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        assert!((top - v.norm_squared()).abs() < 1e-12);
        let back = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues) * e.eigenvectors.transpose();
        assert!((back - m).amax() < 1e-12);
    }

    #[test]
    fn complex_spectral_function() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 0.0),
            ],
        );
        let mut ev = hermitian_eigenvalues(&m);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        let root = hermitian_function(&m, f64::sqrt);
        assert!((&root * &root - &m).camax() < 1e-12);
    }

    #[test]
    fn blocked_eigenvalues_match_dense() {
        let m = DMatrix::from_fn(6, 6, |i, j| {
            if (i % 3) == (j % 3) {
                Complex64::new(
                    1.0 + (i + j) as f64,
                    if i < j {
                        0.3
                    } else if i > j {
                        -0.3
                    } else {
                        0.0
                    },
                )
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut a = hermitian_eigenvalues(&m);
        let mut b: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn pinv_of_rank_deficient_projector() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 0.0]));
        let p = pinv(&m, 1e-12);
        assert!((p[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p[(1, 1)], 0.0);
    }

    #[test]
    fn permutation_reorders_modes() {
        let p = mode_permutation(&[1, 0]);
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]));
        let h = &p * g * p.transpose();
        assert_eq!(h[(0, 0)], 3.0);
        assert_eq!(h[(3, 3)], 2.0);
    }
}
