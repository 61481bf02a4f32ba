//! PhaseLamp: successive linearization and maximization over the
//! measurement polytope.
//!
//! Norm maximization over `{ x : |a_i . x| <= y_i }` is nonconvex; PhaseLamp
//! attacks it by maximizing the linear minorant `x_k . x` at each step —
//! i.e. a PhaseMax solve anchored at the previous iterate, starting from the
//! instance anchor. Because each iterate maximizes the previous one's
//! linearization over a set containing it, `||x_{k+1}|| >= ||x_k||` for
//! every pair of solver outputs; the trajectory records the norms so callers
//! can audit that monotonicity at solver precision.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{phasemax, ProblemInstance, SolverConfig, SolverError, SolverReport};
use crate::harness::nmse;

/// Outer-loop controls: iteration cap and the stationarity threshold on
/// `||x_{k+1} - x_k||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LampConfig {
    pub max_outer: usize,
    pub tol: f64,
}

impl Default for LampConfig {
    fn default() -> Self {
        Self {
            max_outer: 20,
            tol: 1e-4,
        }
    }
}

/// One outer step of the iteration, as recorded in the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LampStep {
    /// 1-based outer iteration index.
    pub outer: usize,
    /// Euclidean norm of the iterate produced by this step.
    pub norm: f64,
    /// Inner LP iterations spent on this step.
    pub inner_iterations: usize,
    /// Whether the inner solve met its certificate tolerances.
    pub inner_converged: bool,
    /// NMSE of this iterate against the instance ground truth.
    pub nmse: f64,
    /// `||x_k - x_{k-1}||`, the stationarity measure used for stopping.
    pub delta: f64,
}

/// Run PhaseLamp on an instance. Returns the final inner report together
/// with the per-step trajectory.
///
/// Stops when `||x_{k+1} - x_k|| <= tol` or after `max_outer` inner solves.
/// An inner solve that exhausts its budget is recorded in the trajectory
/// (`inner_converged = false`) and the loop continues from its best-effort
/// iterate.
pub fn phaselamp(
    instance: &ProblemInstance,
    lamp: &LampConfig,
    inner: &SolverConfig,
) -> Result<(SolverReport, Vec<LampStep>), SolverError> {
    if lamp.max_outer == 0 {
        return Err(SolverError::InvalidConfig(
            "max_outer must be at least 1".into(),
        ));
    }
    if !(lamp.tol > 0.0) {
        return Err(SolverError::InvalidConfig(
            "lamp tol must be positive".into(),
        ));
    }
    let mut current = instance.anchor().clone();
    let mut trajectory = Vec::new();
    let mut last_report: Option<SolverReport> = None;
    for outer in 1..=lamp.max_outer {
        let report = phasemax(instance, Some(&current), inner)?;
        let next = Array1::from(report.solution.clone());
        let delta = (&next - &current).mapv(|v| v * v).sum().sqrt();
        trajectory.push(LampStep {
            outer,
            norm: next.mapv(|v| v * v).sum().sqrt(),
            inner_iterations: report.iterations,
            inner_converged: report.converged,
            nmse: nmse(
                next.as_slice().unwrap(),
                instance.truth().as_slice().unwrap(),
            )
            .expect("iterate and truth share the instance dimension"),
            delta,
        });
        current = next;
        last_report = Some(report);
        if delta <= lamp.tol {
            break;
        }
    }
    Ok((
        last_report.expect("at least one outer iteration ran"),
        trajectory,
    ))
}
