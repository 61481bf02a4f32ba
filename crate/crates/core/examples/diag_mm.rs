use phaselp::harness::{cell_seed, trial_seed};
use phaselp::{generate_instance, phaselamp, Method, ModelParams, RunConfig};

fn main() {
    let seed = 20260810u64;
    let a = 2.9;
    let cell = cell_seed(seed, a, 0.1, 200);
    let cfg = RunConfig::default();
    for t in 0..10u64 {
        let params = ModelParams { n: 200, alpha: a, rho_init: 0.1, seed: trial_seed(cell, t) };
        let inst = generate_instance(&params).unwrap();
        let (_rep, traj) = phaselamp(&inst, &cfg.lamp, &cfg.lamp_inner).unwrap();
        let mut worst = f64::INFINITY;
        for p in traj.windows(2) {
            worst = worst.min(p[1].norm * p[1].norm - p[0].norm * p[0].norm);
        }
        if worst < -1e-8 {
            println!("trial {t}: worst margin {worst:.3e}");
            for s in &traj {
                println!(
                    "  step {}: norm={:.12} delta={:.3e} inner_its={} conv={} nmse={:.3e}",
                    s.outer, s.norm, s.delta, s.inner_iterations, s.inner_converged, s.nmse
                );
            }
        }
    }
    let _ = Method::PhaseLamp;
}
