//! Phase retrieval via anchored linear programming.
//!
//! The crate has three layers:
//!
//! * [`theory`] — closed-form and fixed-point quantities of the asymptotic
//!   analysis: the recovery threshold `rho_c(alpha)`, the limiting NMSE of
//!   PhaseMax, and the PhaseLamp sufficient-recovery certificate `rho_s(alpha)`.
//! * [`solver`] — the PhaseMax linear program with a verifiable optimality
//!   certificate (primal feasibility, duality gap, dual residual), the
//!   PhaseLamp outer iteration on top of it, and a brute-force vertex oracle
//!   for tiny instances.
//! * [`harness`] — seeded random instance generation under the Gaussian
//!   measurement model, NMSE measurement, and deterministic Monte Carlo
//!   sweeps over `(alpha, rho_init)` grids.
//!
//! Theory functions take the oversampling ratio as a plain real so that
//! theory and simulation stay decoupled; the harness ties them together.

pub mod harness;
pub mod solver;
pub mod theory;

pub use harness::{generate_instance, nmse, run_cell, run_sweep, Method, ModelParams, RunConfig, SweepGrid, SweepRecord};
pub use solver::{phasemax, phaselamp, vertex_oracle, LampConfig, LampStep, ProblemInstance, SolverConfig, SolverReport};
pub use theory::{
    c_d, g_alpha, lamp_certificate, lamp_theta, r_alpha, r_star_of_s, rho_critical, spo_solve,
    Alpha, CosineSimilarity, LampCertificate, TheoryPrediction,
};
