//! Contract tests for the LP solver: oracle equivalence on tiny instances,
//! certificate soundness, duality and symmetry properties, and the
//! PhaseLamp behaviors that define its fixed points.

use approx::assert_abs_diff_eq;
use ndarray::Array1;
use phaselp::solver::certificate_residuals;
use phaselp::{
    generate_instance, nmse, phasemax, phaselamp, rho_critical, vertex_oracle, Alpha, LampConfig,
    ModelParams, RunConfig, SolverConfig,
};

fn instance(n: usize, alpha: f64, rho: f64, seed: u64) -> phaselp::ProblemInstance {
    generate_instance(&ModelParams {
        n,
        alpha,
        rho_init: rho,
        seed,
    })
    .unwrap()
}

/// 100 random tiny instances: the iterative solver must match brute-force
/// vertex enumeration in objective and carry full certificates.
#[test]
fn phasemax_matches_vertex_oracle_on_tiny_instances() {
    let cfg = SolverConfig::default();
    let mut done = 0;
    let mut seed = 0u64;
    while done < 100 {
        seed += 1;
        let n = if seed % 2 == 0 { 2 } else { 3 };
        let m = 5 + (seed % 8) as usize; // 5..=12
        if m <= 2 * n {
            continue; // alpha must exceed 2
        }
        let inst = instance(n, m as f64 / n as f64, 0.5, seed);
        let report = phasemax(&inst, None, &cfg).unwrap();
        let oracle = vertex_oracle(&inst, inst.anchor()).unwrap();
        let oracle_obj = inst.anchor().dot(&oracle);
        assert!(report.converged, "instance {done} (seed {seed}) did not converge");
        assert!(
            (report.objective - oracle_obj).abs() <= 1e-6,
            "objective {} vs oracle {} on instance {done}",
            report.objective,
            oracle_obj
        );
        assert!(report.feasibility_residual <= 1e-8);
        assert!(report.gap <= 1e-8);
        assert!(report.dual_residual <= 1e-8);
        done += 1;
    }
}

/// Recomputing the certificate from the reported (solution, dual) pair
/// reproduces the reported residuals exactly.
#[test]
fn certificate_is_sound() {
    let inst = instance(60, 3.0, 0.4, 11);
    let report = phasemax(&inst, None, &SolverConfig::default()).unwrap();
    let (f, g, d) = certificate_residuals(
        inst.sensing(),
        inst.magnitudes(),
        inst.anchor(),
        &Array1::from(report.solution.clone()),
        &Array1::from(report.dual.clone()),
    );
    assert_eq!(f, report.feasibility_residual);
    assert_eq!(g, report.gap);
    assert_eq!(d, report.dual_residual);
}

/// Weak duality holds for every returned report, converged or not.
#[test]
fn weak_duality_even_without_convergence() {
    let inst = instance(80, 4.0, 0.3, 21);
    for budget in [1, 2, 3, 5, 8, 50_000] {
        let cfg = SolverConfig {
            max_iterations: budget,
            ..SolverConfig::default()
        };
        let report = phasemax(&inst, None, &cfg).unwrap();
        assert!(
            report.gap >= -1e-9,
            "weak duality violated at budget {budget}: gap = {}",
            report.gap
        );
    }
}

/// The LP argmax is invariant to positive rescaling of the objective
/// vector.
#[test]
fn anchor_scale_invariance() {
    let inst = instance(60, 3.0, 0.4, 33);
    let cfg = SolverConfig::default();
    let base = phasemax(&inst, None, &cfg).unwrap();
    for scale in [0.1, 10.0] {
        let scaled = inst.anchor() * scale;
        let report = phasemax(&inst, Some(&scaled), &cfg).unwrap();
        assert!(report.converged);
        let dist: f64 = base
            .solution
            .iter()
            .zip(report.solution.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-6, "solutions drifted {dist} at scale {scale}");
        assert_abs_diff_eq!(report.objective, base.objective * scale, epsilon = 1e-6 * scale);
    }
}

/// The polytope is symmetric, so negating the anchor negates the solution.
#[test]
fn sign_symmetry() {
    let inst = instance(60, 3.0, 0.4, 44);
    let cfg = SolverConfig::default();
    let plus = phasemax(&inst, None, &cfg).unwrap();
    let neg = inst.anchor() * -1.0;
    let minus = phasemax(&inst, Some(&neg), &cfg).unwrap();
    let dist: f64 = plus
        .solution
        .iter()
        .zip(minus.solution.iter())
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt();
    assert!(dist < 1e-6, "negated solve drifted {dist}");
}

/// Converged output is feasible at the configured tolerance.
#[test]
fn converged_output_is_feasible() {
    for seed in [1, 2, 3] {
        let inst = instance(80, 5.0, 0.3, seed);
        let report = phasemax(&inst, None, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let ax = inst.sensing().dot(&Array1::from(report.solution.clone()));
        let y_inf = inst.magnitudes().iter().fold(1.0_f64, |a, &v| a.max(v));
        let worst = ax
            .iter()
            .zip(inst.magnitudes().iter())
            .map(|(axi, yi)| axi.abs() - yi)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-8 * y_inf, "violation {worst}");
    }
}

/// Far above the recovery threshold the LP reproduces the signal to solver
/// precision.
#[test]
fn phasemax_recovers_above_threshold() {
    assert!(0.6 > rho_critical(Alpha::new(5.0).unwrap()));
    for seed in [5, 6, 7] {
        let inst = instance(200, 5.0, 0.6, seed);
        let report = phasemax(&inst, None, &SolverConfig::default()).unwrap();
        assert!(report.converged);
        let e = nmse(&report.solution, inst.truth().as_slice().unwrap()).unwrap();
        assert!(e < 1e-6, "nmse {e} at seed {seed}");
    }
}

/// On an instance PhaseMax already solves, PhaseLamp is a fixed point after
/// the first step: at most two inner solves, same solution.
#[test]
fn phaselamp_fixed_point_on_recoverable_instance() {
    let inst = instance(120, 5.0, 0.6, 9);
    let cfg = RunConfig::default();
    let (report, traj) = phaselamp(&inst, &cfg.lamp, &cfg.lamp_inner).unwrap();
    assert!(traj.len() <= 2, "trajectory length {}", traj.len());
    assert!(report.converged);
    let e = nmse(&report.solution, inst.truth().as_slice().unwrap()).unwrap();
    assert!(e < 1e-6, "nmse {e}");
    let pm = phasemax(&inst, None, &cfg.phasemax).unwrap();
    let dist: f64 = pm
        .solution
        .iter()
        .zip(report.solution.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(dist < 1e-6, "lamp and single solve drifted {dist}");
}

/// The regime where the iteration matters: PhaseLamp recovers while a
/// single anchored solve fails badly.
#[test]
fn phaselamp_outperforms_single_solve_at_low_similarity() {
    let inst = instance(200, 4.0, 0.1, 17);
    let cfg = RunConfig::default();
    let pm = phasemax(&inst, None, &cfg.phasemax).unwrap();
    let pm_nmse = nmse(&pm.solution, inst.truth().as_slice().unwrap()).unwrap();
    assert!(pm_nmse > 0.1, "single solve unexpectedly good: {pm_nmse}");
    let (lamp, traj) = phaselamp(&inst, &cfg.lamp, &cfg.lamp_inner).unwrap();
    let lamp_nmse = nmse(&lamp.solution, inst.truth().as_slice().unwrap()).unwrap();
    assert!(lamp_nmse < 1e-4, "lamp nmse {lamp_nmse}");
    // norm monotonicity along the trajectory, at solver precision
    for pair in traj.windows(2) {
        let margin = pair[1].norm * pair[1].norm - pair[0].norm * pair[0].norm;
        assert!(margin >= -1e-8, "norm decreased by {margin}");
    }
    // the first inner solve is exactly a PhaseMax solve, so the iteration
    // can never end below the single solve's norm
    let pm_norm: f64 = pm.solution.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lamp_norm: f64 = lamp.solution.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(lamp_norm >= pm_norm - 1e-8);
}

/// A converged fixed point sits on the boundary of the polytope: at least
/// n constraints are active to within 1e-6 of the magnitude scale.
#[test]
fn phaselamp_fixed_point_is_an_extreme_point() {
    let inst = instance(200, 4.0, 0.1, 17);
    let cfg = RunConfig::default();
    let (report, traj) = phaselamp(&inst, &cfg.lamp, &cfg.lamp_inner).unwrap();
    assert!(traj.last().unwrap().delta <= cfg.lamp.tol, "did not reach a fixed point");
    let ax = inst.sensing().dot(&Array1::from(report.solution.clone()));
    let y_inf = inst.magnitudes().iter().fold(1.0_f64, |a, &v| a.max(v));
    let active = ax
        .iter()
        .zip(inst.magnitudes().iter())
        .filter(|(axi, yi)| (axi.abs() - **yi).abs() <= 1e-6 * y_inf)
        .count();
    let (_, n) = inst.dims();
    assert!(active >= n, "only {active} active constraints, need {n}");
}

/// Inner budget exhaustion is recorded per step and the outer loop keeps
/// going with the best-effort iterate.
#[test]
fn phaselamp_records_unconverged_inner_steps() {
    let inst = instance(60, 3.0, 0.3, 3);
    let lamp = LampConfig {
        max_outer: 3,
        tol: 1e-4,
    };
    let starved = SolverConfig {
        max_iterations: 2,
        ..SolverConfig::default()
    };
    let (report, traj) = phaselamp(&inst, &lamp, &starved).unwrap();
    assert!(!report.converged);
    assert_eq!(traj.len(), 3);
    assert!(traj.iter().all(|s| !s.inner_converged));
    assert!(traj.iter().all(|s| s.inner_iterations <= 2));
}
