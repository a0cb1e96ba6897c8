use gaussent::entanglement::{log_negativity_gaussian, ppt_verdict, ModePartition};
use gaussent::io::StateFile;
use gaussent::linalg::max_abs;
use gaussent::protocols::{gaussian_locc_step, GaussianLoccProtocol};
use gaussent::symplectic::{
    apply_symplectic, euler_decomposition, is_symplectic, symplectic_eigenvalues, williamson,
};
use gaussent::{random, CovarianceMatrix, GaussianState};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_symplectics_preserve_the_form(seed in any::<u64>(), n in 1usize..5, scale in 0.01f64..0.5) {
        let s = random::symplectic(&mut rng(seed), n, scale);
        prop_assert!(is_symplectic(s.matrix()).unwrap());
        let p = random::passive(&mut rng(seed), n);
        prop_assert!(p.is_passive());
    }

    #[test]
    fn euler_reconstructs(seed in any::<u64>(), n in 1usize..5) {
        let s = random::symplectic(&mut rng(seed), n, 0.4);
        let e = euler_decomposition(&s).unwrap();
        prop_assert!(e.left.is_passive() && e.right.is_passive());
        prop_assert!(e.squeezing.iter().all(|&d| d >= 1.0 - 1e-12));
        prop_assert!(max_abs(&(e.reconstruct() - s.matrix())) < 1e-8);
    }

    #[test]
    fn williamson_diagonalises(seed in any::<u64>(), n in 1usize..5) {
        let cov = random::covariance(&mut rng(seed), n, 3.0, 0.3);
        let w = williamson(&cov).unwrap();
        let t = w.transform.matrix();
        prop_assert!(max_abs(&(t * cov.matrix() * t.transpose() - w.normal_form())) < 1e-8);
        prop_assert!(w.symplectic_eigenvalues.iter().all(|&v| v >= 1.0 - 1e-9));
    }

    #[test]
    fn symplectics_keep_states_valid(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let st = GaussianState::centered(random::covariance(&mut r, n, 1.0, 0.3)).unwrap();
        let out = apply_symplectic(&st, &random::symplectic(&mut r, n, 0.3)).unwrap();
        prop_assert!(out.covariance().is_valid());
        let before = symplectic_eigenvalues(st.covariance());
        let after = symplectic_eigenvalues(out.covariance());
        for (a, b) in before.iter().zip(&after) {
            prop_assert!((a - b).abs() < 1e-8 * a.max(1.0));
        }
    }

    #[test]
    fn negativity_ignores_local_symplectics(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cov = random::covariance(&mut r, 2, 1.0, 0.4);
        let p = ModePartition::split(1, 1);
        let local = random::symplectic(&mut r, 1, 0.4).direct_sum(&random::symplectic(&mut r, 1, 0.4));
        let moved = apply_symplectic(&GaussianState::centered(cov.clone()).unwrap(), &local).unwrap();
        let e0 = log_negativity_gaussian(&cov, &p).unwrap();
        let e1 = log_negativity_gaussian(moved.covariance(), &p).unwrap();
        prop_assert!((e0 - e1).abs() < 1e-8);
    }

    #[test]
    fn gaussian_locc_keeps_separable_states_ppt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random::covariance(&mut r, 1, 1.0, 0.4);
        let b = random::covariance(&mut r, 1, 1.0, 0.4);
        let input = a.direct_sum(&b);
        let out = gaussian_locc_step(&input, &GaussianLoccProtocol::sample(&mut r)).unwrap();
        let report = ppt_verdict(&out, &ModePartition::split(1, 1)).unwrap();
        prop_assert!(!report.is_entangled(), "min eigenvalue {}", report.min_eigenvalue);
    }

    #[test]
    fn state_files_round_trip_bit_exact(seed in any::<u64>(), n in 1usize..4, shift in -1e6f64..1e6) {
        let mut r = rng(seed);
        let cov = random::covariance(&mut r, n, 5.0, 0.8);
        let d = DVector::from_fn(2 * n, |i, _| shift / (i as f64 + 1.0));
        let file = StateFile::from_state(&GaussianState::new(cov, d).unwrap());
        let back = StateFile::parse(&file.to_text()).unwrap();
        prop_assert_eq!(back.gamma, file.gamma);
        prop_assert_eq!(back.d, file.d);
    }

    #[test]
    fn validity_matches_symplectic_spectrum(diag in prop::collection::vec(0.2f64..3.0, 2..7)) {
        let n = diag.len() / 2;
        let m = DMatrix::from_diagonal(&DVector::from_vec(diag[..2 * n].to_vec()));
        let cov = CovarianceMatrix::new(m).unwrap();
        let min_nu = symplectic_eigenvalues(&cov).into_iter().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(cov.is_valid(), min_nu >= 1.0 - 1e-9);
    }
}
