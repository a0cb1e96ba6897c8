use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{Quadrature, PINV_CUTOFF};
use crate::entanglement::{log_negativity_gaussian, ModePartition};
use crate::error::{Error, Result};
use crate::linalg;
use crate::random;
use crate::symplectic::{CovarianceMatrix, SymplecticMatrix};

/// Local Gaussian operations on two copies of a two-mode state: a
/// two-mode symplectic on each side, homodyne detection of the second mode
/// on each side, and single-mode corrections on the kept modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLoccProtocol {
    /// Acts on `(A1, A2)`.
    pub s_a: SymplecticMatrix,
    /// Acts on `(B1, B2)`.
    pub s_b: SymplecticMatrix,
    pub measure_a: Quadrature,
    pub measure_b: Quadrature,
    pub post_a: SymplecticMatrix,
    pub post_b: SymplecticMatrix,
}

impl GaussianLoccProtocol {
    /// Measures the untouched second copy and does nothing else.
    pub fn identity() -> Self {
        Self {
            s_a: SymplecticMatrix::identity(2),
            s_b: SymplecticMatrix::identity(2),
            measure_a: Quadrature::X,
            measure_b: Quadrature::X,
            post_a: SymplecticMatrix::identity(1),
            post_b: SymplecticMatrix::identity(1),
        }
    }

    /// Random local symplectics `exp(2σg)` with `g` entries uniform in
    /// `[-1, 1]`, a random quadrature behind a random phase rotation, and
    /// random single-mode corrections.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let side = |rng: &mut R| {
            let s = random::symplectic(rng, 2, 1.0);
            let pre = SymplecticMatrix::identity(1)
                .direct_sum(&SymplecticMatrix::rotation(rng.random_range(0.0..TAU)));
            let q = if rng.random_bool(0.5) {
                Quadrature::X
            } else {
                Quadrature::P
            };
            (pre.compose(&s), q)
        };
        let (s_a, measure_a) = side(rng);
        let (s_b, measure_b) = side(rng);
        Self {
            s_a,
            s_b,
            measure_a,
            measure_b,
            post_a: random::symplectic(rng, 1, 1.0),
            post_b: random::symplectic(rng, 1, 1.0),
        }
    }

    fn check(&self) -> Result<()> {
        if self.s_a.modes() != 2 || self.s_b.modes() != 2 {
            return Err(Error::dim("local transformations must act on two modes"));
        }
        if self.post_a.modes() != 1 || self.post_b.modes() != 1 {
            return Err(Error::dim("corrections must act on one mode"));
        }
        Ok(())
    }
}

/// `A − C(πBπ)⁺Cᵀ` for the last mode of `g`, without validating the
/// intermediate state.
fn homodyne_last(g: &DMatrix<f64>, q: Quadrature) -> DMatrix<f64> {
    let k = g.nrows() - 2;
    let a = g.view((0, 0), (k, k));
    let b = g.view((k, k), (2, 2));
    let c = g.view((0, k), (k, 2));
    let pi = match q {
        Quadrature::X => DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0])),
        Quadrature::P => DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 1.0])),
    };
    let inv = linalg::pinv(&(&pi * b * &pi), PINV_CUTOFF);
    linalg::symmetrize(&(a - c * inv * c.transpose()))
}

/// One round of the protocol on `ρ ⊗ ρ`, returning the covariance of
/// `(A1, B1)`.
pub fn gaussian_locc_step(
    gamma: &CovarianceMatrix,
    proto: &GaussianLoccProtocol,
) -> Result<CovarianceMatrix> {
    if gamma.modes() != 2 {
        return Err(Error::dim("input must be a two-mode covariance"));
    }
    gamma.require_valid()?;
    proto.check()?;
    // γ ⊕ γ is ordered (A1, B1, A2, B2); local blocks want (A1, A2, B1, B2)
    let four = linalg::direct_sum(gamma.matrix(), gamma.matrix());
    let perm = linalg::mode_permutation(&[0, 2, 1, 3]);
    let s = proto.s_a.direct_sum(&proto.s_b);
    let g = s.matrix() * (&perm * four * perm.transpose()) * s.matrix().transpose();
    // move A2 last, measure, then B2 is last
    let to_end = linalg::mode_permutation(&[0, 2, 3, 1]);
    let g = homodyne_last(&(&to_end * g * to_end.transpose()), proto.measure_a);
    let g = homodyne_last(&g, proto.measure_b);
    let post = proto.post_a.direct_sum(&proto.post_b);
    let out = CovarianceMatrix::new(linalg::symmetrize(
        &(post.matrix() * g * post.matrix().transpose()),
    ))?;
    out.require_valid()?;
    Ok(out)
}

/// Outcome of [`no_go_monte_carlo`].
#[derive(Debug, Clone)]
pub struct NoGoReport {
    pub max_gain: f64,
    pub argmax: GaussianLoccProtocol,
    pub argmax_trial: usize,
    /// `E_N(out) − E_N(in)` per trial, in trial order.
    pub gains: Vec<f64>,
}

/// Trial `t` draws its protocol from `ChaCha8(seed)` on stream `t`, so the
/// report does not depend on scheduling.
pub fn no_go_monte_carlo(gamma: &CovarianceMatrix, trials: usize, seed: u64) -> Result<NoGoReport> {
    if trials == 0 {
        return Err(Error::param("at least one trial is needed"));
    }
    let p = ModePartition::split(1, 1);
    let e_in = log_negativity_gaussian(gamma, &p)?;
    let sample = |t: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        GaussianLoccProtocol::sample(&mut rng)
    };
    let gains = (0..trials)
        .into_par_iter()
        .map(|t| {
            let out = gaussian_locc_step(gamma, &sample(t))?;
            Ok(log_negativity_gaussian(&out, &p)? - e_in)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (argmax_trial, max_gain) =
        gains
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |best, (t, g)| if g > best.1 { (t, g) } else { best },
            );
    Ok(NoGoReport {
        max_gain,
        argmax: sample(argmax_trial),
        argmax_trial,
        gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::gates::apply_passive;
    use crate::fock::{moments, FockBasis, FockDensity, FockVector};
    use num_complex::Complex64;

    #[test]
    fn identity_protocol_returns_input_exactly() {
        let g = CovarianceMatrix::two_mode_squeezed(&[0.7]);
        let out = gaussian_locc_step(&g, &GaussianLoccProtocol::identity()).unwrap();
        assert_eq!(out.matrix(), g.matrix());
    }

    #[test]
    fn rejects_malformed_protocols() {
        let g = CovarianceMatrix::two_mode_squeezed(&[0.7]);
        let mut p = GaussianLoccProtocol::identity();
        p.post_a = SymplecticMatrix::identity(2);
        assert!(gaussian_locc_step(&g, &p).is_err());
        assert!(gaussian_locc_step(&CovarianceMatrix::vacuum(3), &GaussianLoccProtocol::identity()).is_err());
    }

    /// `⟨x = 0|n⟩` up to a common factor; `⟨p = 0|n⟩` carries an extra `(−i)ⁿ`.
    fn origin_overlap(n: usize, q: Quadrature) -> Complex64 {
        if n % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let h = n / 2;
        let ln = (1..=n).map(|k| (k as f64).ln()).sum::<f64>() * 0.5
            - (1..=h).map(|k| (k as f64).ln()).sum::<f64>()
            - h as f64 * 2f64.ln();
        let sign = if h.is_multiple_of(2) { 1.0 } else { -1.0 };
        let v = Complex64::new(sign * ln.exp(), 0.0);
        match q {
            Quadrature::X => v,
            Quadrature::P => v * Complex64::new(0.0, -1.0).powu(n as u32),
        }
    }

    #[test]
    fn balanced_mixing_matches_fock_homodyne() {
        let r: f64 = 0.5;
        let keep = 12;
        let big = 2 * keep - 1;
        let lambda = r.tanh();
        // (A1, B1, A2, B2)
        let basis = FockBasis::new(4, big).unwrap();
        let mut amps = nalgebra::DVector::from_element(basis.dim(), Complex64::new(0.0, 0.0));
        for n in 0..keep {
            for m in 0..keep {
                amps[basis.index(&[n, n, m, m])] = Complex64::new(lambda.powi((n + m) as i32), 0.0);
            }
        }
        let norm = amps.norm();
        let psi = FockVector::new(4, big, amps / Complex64::new(norm, 0.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let side = nalgebra::DMatrix::from_row_slice(2, 2, &[s, s, -s, s]).map(|x| Complex64::new(x, 0.0));
        let mut u = nalgebra::DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            u[(2 * i, 2 * j)] = side[(i, j)];
            u[(2 * i + 1, 2 * j + 1)] = side[(i, j)];
        }
        let mixed = apply_passive(&u, &psi).unwrap();

        let (qa, qb) = (Quadrature::X, Quadrature::P);
        let out_basis = FockBasis::new(2, big).unwrap();
        let mut cond = nalgebra::DVector::from_element(out_basis.dim(), Complex64::new(0.0, 0.0));
        for (i, a) in mixed.amplitudes().iter().enumerate() {
            let occ = basis.occupations(i);
            cond[out_basis.index(&[occ[0], occ[1]])] +=
                origin_overlap(occ[2], qa) * origin_overlap(occ[3], qb) * a;
        }
        let rho = FockDensity::new(2, big, &cond * cond.adjoint())
            .unwrap()
            .normalized()
            .unwrap();
        let (fock_cov, _) = moments(&rho);

        let k = SymplecticMatrix::passive_from_unitary(&side).unwrap();
        let proto = GaussianLoccProtocol {
            s_a: k.clone(),
            s_b: k,
            measure_a: qa,
            measure_b: qb,
            post_a: SymplecticMatrix::identity(1),
            post_b: SymplecticMatrix::identity(1),
        };
        let g = gaussian_locc_step(&CovarianceMatrix::two_mode_squeezed(&[r]), &proto).unwrap();
        let err = (fock_cov - g.matrix()).amax();
        assert!(err < 1e-6, "covariance mismatch {err:e}");
    }
}
