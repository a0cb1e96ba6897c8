//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::LOG2_E;
use std::time::{Duration, Instant};

use gaussent::channels::{homodyne_condition, vacuum_project, Quadrature};
use gaussent::entanglement::{
    find_locc_gap, log_negativity_gaussian, ppt_verdict, separability_witness_verify, ModePartition,
};
use gaussent::fock::{
    continuity_demo, gaussian_to_fock, log_negativity_fock, moments, two_mode_squeezed_fock, FockVector,
};
use gaussent::linalg::max_abs;
use gaussent::protocols::{
    distill_grid, no_go_monte_carlo, passive_max_entanglement, passive_optimizer, V_GRID,
};
use gaussent::symplectic::{apply_symplectic, euler_decomposition, symplectic_eigenvalues, williamson};
use gaussent::{random, CovarianceMatrix, GaussianState, SymplecticMatrix};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ab() -> ModePartition {
    ModePartition::split(1, 1)
}

fn ac1() -> Outcome {
    let mut worst = 0.0f64;
    let mut at_half = f64::NAN;
    for r in [0.2, 0.5, 0.8, 1.0] {
        let g = log_negativity_gaussian(&CovarianceMatrix::two_mode_squeezed(&[r]), &ab())
            .map_err(|e| e.to_string())?;
        let rho = two_mode_squeezed_fock(r, 40)
            .map_err(|e| e.to_string())?
            .to_density();
        let f = log_negativity_fock(&rho, &ab()).map_err(|e| e.to_string())?;
        worst = worst.max((g - f).abs());
        if r == 0.5 {
            at_half = f;
        }
    }
    let msg = format!("max |gaussian - fock| = {worst:.2e}, fock E_N(0.5) = {at_half:.6}");
    if worst <= 1e-3 && (at_half - LOG2_E).abs() <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn single_mode(rng: &mut ChaCha8Rng) -> CovarianceMatrix {
    random::covariance(rng, 1, 1.5, 0.6)
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = ab();
    let mut contradictions = 0;
    let mut npt = 0;
    for _ in 0..500 {
        let cov = random::covariance(&mut rng, 2, 2.0, 0.4);
        let report = ppt_verdict(&cov, &p).map_err(|e| e.to_string())?;
        if report.is_entangled() {
            npt += 1;
            for _ in 0..200 {
                let (a, b) = (single_mode(&mut rng), single_mode(&mut rng));
                if separability_witness_verify(&cov, &a, &b, &p).map_err(|e| e.to_string())? {
                    contradictions += 1;
                }
            }
        }
    }
    for _ in 0..500 {
        let (a, b) = (single_mode(&mut rng), single_mode(&mut rng));
        let m = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-0.5..0.5));
        let cov = CovarianceMatrix::new(a.direct_sum(&b).matrix() + &m * m.transpose())
            .map_err(|e| e.to_string())?;
        let separable = !ppt_verdict(&cov, &p).map_err(|e| e.to_string())?.is_entangled()
            && separability_witness_verify(&cov, &a, &b, &p).map_err(|e| e.to_string())?;
        if !separable {
            contradictions += 1;
        }
    }
    let msg = format!("{npt} NPT of 500 random, 500 constructed separable, {contradictions} contradictions");
    if contradictions == 0 && npt > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac3() -> Outcome {
    let report = no_go_monte_carlo(&CovarianceMatrix::two_mode_squeezed(&[0.5]), 1000, 7)
        .map_err(|e| e.to_string())?;
    let msg = format!(
        "max gain over {} trials = {:.3e}",
        report.gains.len(),
        report.max_gain
    );
    if report.gains.len() == 1000 && report.max_gain <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac4() -> Outcome {
    let traces = distill_grid(0.3, &V_GRID, 2, 12).map_err(|e| e.to_string())?;
    let best = traces
        .iter()
        .filter(|t| t.improves() && t.distances_decreasing())
        .max_by(|a, b| a.final_log_negativity().total_cmp(&b.final_log_negativity()));
    match best {
        Some(t) => {
            let d: Vec<String> = t
                .records
                .iter()
                .map(|r| format!("{:.3}", r.gaussianity_distance))
                .collect();
            Ok(format!(
                "V = {:.2}: E_N {:.4} -> {:.4}, distances {}",
                t.v,
                t.initial_log_negativity,
                t.final_log_negativity(),
                d.join(" > ")
            ))
        }
        None => Err("no transmissivity on the grid improves E_N with decreasing distance".into()),
    }
}

fn ac5() -> Outcome {
    let grid: Vec<f64> = (1..=100).map(|k| 0.5 + 0.005 * k as f64).collect();
    match find_locc_gap(0.5, &grid, 60).map_err(|e| e.to_string())? {
        Some(rp) if rp > 0.5 => Ok(format!("r' = {rp:.3} reachable by LOCC, not by GLOCC")),
        other => Err(format!("no gap found ({other:?})")),
    }
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut euler = 0.0f64;
    for i in 0..100 {
        let s = random::symplectic(&mut rng, 1 + i % 4, 0.3);
        let e = euler_decomposition(&s).map_err(|e| e.to_string())?;
        euler = euler.max(max_abs(&(e.reconstruct() - s.matrix())));
    }
    let mut will = 0.0f64;
    let mut mismatches = 0;
    for i in 0..100 {
        let n = 1 + i % 4;
        let cov = random::covariance(&mut rng, n, 2.0, 0.3);
        let w = williamson(&cov).map_err(|e| e.to_string())?;
        let t = w.transform.matrix();
        will = will.max(max_abs(&(t * cov.matrix() * t.transpose() - w.normal_form())));
        // rescaled copies straddle the uncertainty boundary
        let c = rng.random_range(0.6..1.1);
        for m in [
            cov.clone(),
            CovarianceMatrix::new(cov.matrix() * c).map_err(|e| e.to_string())?,
        ] {
            let min_nu = symplectic_eigenvalues(&m)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if m.is_valid() != (min_nu >= 1.0 - 1e-9) {
                mismatches += 1;
            }
        }
    }
    let msg = format!("euler {euler:.2e}, williamson {will:.2e}, validity mismatches {mismatches}");
    if euler <= 1e-8 && will <= 1e-8 && mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn squeezed_pair(r1: f64, r2: f64, phi1: f64, phi2: f64) -> CovarianceMatrix {
    let local = SymplecticMatrix::rotation(phi1)
        .compose(&SymplecticMatrix::squeezer(r1))
        .direct_sum(&SymplecticMatrix::rotation(phi2).compose(&SymplecticMatrix::squeezer(r2)));
    apply_symplectic(&GaussianState::vacuum(2), &local)
        .unwrap()
        .covariance()
        .clone()
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let cov = squeezed_pair(
            rng.random_range(0.05..1.0),
            rng.random_range(0.05..1.0),
            rng.random_range(0.0..std::f64::consts::PI),
            rng.random_range(0.0..std::f64::consts::PI),
        );
        let bound = passive_max_entanglement(&cov).map_err(|e| e.to_string())?;
        let got = passive_optimizer(&cov, 4, i)
            .map_err(|e| e.to_string())?
            .log_negativity;
        worst = worst.max((bound - got).abs());
    }
    let half = squeezed_pair(0.5, -0.5, 0.0, 0.0);
    let got = passive_optimizer(&half, 4, 0)
        .map_err(|e| e.to_string())?
        .log_negativity;
    let msg = format!("max |bound - achieved| = {worst:.2e}, r = 0.5 achieves {got:.6}");
    if worst <= 1e-3 && (got - LOG2_E).abs() <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac8() -> Outcome {
    let dist: Vec<f64> = (8..=100_000)
        .map(|k| continuity_demo(k).map(|p| p.trace_distance))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    let points: Vec<_> = (1..=6)
        .map(|e| continuity_demo(10u64.pow(e)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let energy_up = points.windows(2).all(|w| w[1].mean_energy > w[0].mean_energy);
    let ent: Vec<String> = points.iter().map(|p| format!("{:.3}", p.entanglement)).collect();
    let msg = format!(
        "distance decreasing {decreasing}, energy increasing {energy_up}, entanglement [{}]",
        ent.join(", ")
    );
    if decreasing && energy_up {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac9() -> Outcome {
    let mut homodyne = 0.0f64;
    for r in [0.1, 0.5, 1.0, 2.0] {
        let tms =
            GaussianState::centered(CovarianceMatrix::two_mode_squeezed(&[r])).map_err(|e| e.to_string())?;
        let out = homodyne_condition(&tms, 1, Quadrature::X).map_err(|e| e.to_string())?;
        let c = (2.0 * r).cosh();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / c, c]));
        homodyne = homodyne.max(max_abs(&(out.covariance().matrix() - expect)));
    }
    let s = SymplecticMatrix::beam_splitter(0.4)
        .compose(&SymplecticMatrix::squeezer(0.3).direct_sum(&SymplecticMatrix::rotation(0.7)))
        .compose(&SymplecticMatrix::two_mode_squeezer(0.5));
    let state = apply_symplectic(&GaussianState::vacuum(2), &s)
        .and_then(|st| st.displaced(&DVector::from_vec(vec![0.3, -0.2, 0.1, 0.4])))
        .map_err(|e| e.to_string())?;
    let cond = vacuum_project(&state, 1).map_err(|e| e.to_string())?;
    let d = 40;
    let psi = gaussian_to_fock(&state, d).map_err(|e| e.to_string())?;
    let amps = DVector::from_fn(d, |n, _| psi.amplitude(&[n, 0]));
    let prob = amps.norm_squared();
    let single = FockVector::new(1, d, amps)
        .map_err(|e| e.to_string())?
        .to_density();
    let (g, mean) = moments(&single);
    let cov_err = max_abs(&(g - cond.state.covariance().matrix()));
    let mean_err = (mean - cond.state.displacement()).amax();
    let prob_err = (prob - cond.probability).abs();
    let msg = format!(
        "homodyne {homodyne:.2e}, vacuum projection covariance {cov_err:.2e}, mean {mean_err:.2e}, probability {prob_err:.2e}"
    );
    if homodyne <= 1e-10 && cov_err <= 1e-3 && mean_err <= 1e-3 && prob_err <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("AC-1 negativity oracle", ac1, 30),
        ("AC-2 PPT soundness", ac2, 60),
        ("AC-3 Gaussian no-go", ac3, 120),
        ("AC-4 non-Gaussian distillation", ac4, 600),
        ("AC-5 GLOCC/LOCC gap", ac5, 30),
        ("AC-6 decompositions", ac6, 10),
        ("AC-7 passive bound", ac7, 120),
        ("AC-8 continuity", ac8, 5),
        ("AC-9 conditional measurement", ac9, 20),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|pat| name.contains(pat.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(budget);
        let (tag, detail) = match (&outcome, slow) {
            (Ok(m), false) => ("PASS", m.clone()),
            (Ok(m), true) => ("FAIL", format!("{m}; over the {budget} s budget")),
            (Err(m), _) => ("FAIL", m.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} {name}: {detail} ({:.2} s)", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
