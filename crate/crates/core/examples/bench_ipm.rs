use std::time::Instant;
use phaselp::{generate_instance, nmse, phasemax, ModelParams, SolverConfig};

fn main() {
    for (alpha, rho) in [(3.0, 0.2), (4.0, 0.1), (5.0, 0.6), (5.0, 0.2)] {
        let params = ModelParams { n: 200, alpha, rho_init: rho, seed: 11 };
        let inst = generate_instance(&params).unwrap();
        let t0 = Instant::now();
        let rep = phasemax(&inst, None, &SolverConfig::default()).unwrap();
        let dt = t0.elapsed();
        let e = nmse(&rep.solution, inst.truth().as_slice().unwrap()).unwrap();
        println!(
            "alpha={alpha} rho={rho}: iters={} conv={} t={:.0?} nmse={e:.3e} res=({:.1e},{:.1e},{:.1e})",
            rep.iterations, rep.converged, dt, rep.feasibility_residual, rep.gap, rep.dual_residual
        );
    }
}
