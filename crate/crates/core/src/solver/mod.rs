//! The PhaseMax linear program and the PhaseLamp iteration on top of it.
//!
//! `phasemax` maximizes `anchor . x` over the polytope `|a_i . x| <= y_i`
//! and returns a [`SolverReport`] carrying a verifiable optimality
//! certificate: primal feasibility, the signed-dual duality gap, and the
//! dual-constraint residual, all relative. A report is `converged` exactly
//! when all three are below their configured tolerances; budget exhaustion
//! is a report state, not an error, so sweeps can log partial results.
//!
//! `phaselamp` re-solves the same program with the previous solution as the
//! objective direction until the iterate stalls; each outer step can only
//! grow `||x||` (minorize-maximize), which the per-step trajectory records.
//!
//! `vertex_oracle` solves tiny instances exactly by enumerating vertices of
//! the constraint polytope; it exists to cross-check the iterative path.

mod ipm;
mod lamp;
mod vertex;

pub use lamp::{phaselamp, LampConfig, LampStep};
pub use vertex::vertex_oracle;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from instance construction and solving. Note that failing to
/// converge within budget is deliberately *not* here.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("anchor vector is numerically zero or non-finite")]
    DegenerateAnchor,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("constraint polytope is unbounded in the objective direction")]
    Unbounded,
    #[error("vertex oracle limited to n <= 3, m <= 12; got n = {n}, m = {m}")]
    OracleLimit { n: usize, m: usize },
}

/// One realization of the random measurement model: sensing rows `a_i`,
/// magnitudes `y_i = |a_i . truth|`, the unit-norm ground truth, and a
/// unit-norm anchor positively correlated with it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    sensing: Array2<f64>,
    magnitudes: Array1<f64>,
    truth: Array1<f64>,
    anchor: Array1<f64>,
}

impl ProblemInstance {
    /// Build an instance from a sensing matrix, ground truth, and anchor;
    /// the magnitudes are computed as `|A . truth|`, which makes the
    /// measurement-consistency invariant exact by construction.
    pub fn new(
        sensing: Array2<f64>,
        truth: Array1<f64>,
        anchor: Array1<f64>,
    ) -> Result<Self, SolverError> {
        if truth.len() != sensing.ncols() {
            return Err(SolverError::DimensionMismatch {
                expected: sensing.ncols(),
                got: truth.len(),
            });
        }
        let magnitudes = sensing.dot(&truth).mapv(f64::abs);
        Self::from_parts(sensing, magnitudes, truth, anchor)
    }

    /// Build an instance from all four parts, validating every invariant:
    /// consistent shapes, `y_i = |a_i . truth|` to 1e-12, unit norms, and
    /// positive anchor-truth correlation.
    pub fn from_parts(
        sensing: Array2<f64>,
        magnitudes: Array1<f64>,
        truth: Array1<f64>,
        anchor: Array1<f64>,
    ) -> Result<Self, SolverError> {
        let (m, n) = sensing.dim();
        if m == 0 || n == 0 {
            return Err(SolverError::InvalidInstance("empty sensing matrix".into()));
        }
        if truth.len() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: truth.len(),
            });
        }
        if anchor.len() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: anchor.len(),
            });
        }
        if magnitudes.len() != m {
            return Err(SolverError::DimensionMismatch {
                expected: m,
                got: magnitudes.len(),
            });
        }
        let norm_t = norm2(truth.as_slice().unwrap());
        let norm_a = norm2(anchor.as_slice().unwrap());
        if (norm_t - 1.0).abs() > 1e-12 {
            return Err(SolverError::InvalidInstance(format!(
                "truth must have unit norm, got {norm_t}"
            )));
        }
        if (norm_a - 1.0).abs() > 1e-12 {
            return Err(SolverError::InvalidInstance(format!(
                "anchor must have unit norm, got {norm_a}"
            )));
        }
        if anchor.dot(&truth) <= 0.0 {
            return Err(SolverError::InvalidInstance(
                "anchor must be positively correlated with truth".into(),
            ));
        }
        let expected = sensing.dot(&truth);
        for (i, (&y, &e)) in magnitudes.iter().zip(expected.iter()).enumerate() {
            if !y.is_finite() || y < 0.0 || (y - e.abs()).abs() > 1e-12 {
                return Err(SolverError::InvalidInstance(format!(
                    "magnitude {i} = {y} inconsistent with |a_i . truth| = {}",
                    e.abs()
                )));
            }
        }
        Ok(Self {
            sensing,
            magnitudes,
            truth,
            anchor,
        })
    }

    pub fn sensing(&self) -> &Array2<f64> {
        &self.sensing
    }

    pub fn magnitudes(&self) -> &Array1<f64> {
        &self.magnitudes
    }

    pub fn truth(&self) -> &Array1<f64> {
        &self.truth
    }

    pub fn anchor(&self) -> &Array1<f64> {
        &self.anchor
    }

    /// (rows, columns) = (measurements m, dimension n).
    pub fn dims(&self) -> (usize, usize) {
        self.sensing.dim()
    }
}

/// Tolerances and budget for a single LP solve. All residuals are relative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on the relative primal feasibility residual.
    pub eps_feasibility: f64,
    /// Bound on the relative duality gap and on the dual residual.
    pub eps_gap: f64,
    /// Iteration budget; exceeding it yields a report with `converged = false`.
    pub max_iterations: usize,
    /// Primal/dual step balance knob for first-order engines. The
    /// interior-point engine used here chooses both step lengths from the
    /// iterate and does not consult it.
    pub step_ratio: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_feasibility: 1e-8,
            eps_gap: 1e-8,
            max_iterations: 50_000,
            step_ratio: 1.0,
        }
    }
}

impl SolverConfig {
    /// Same tolerances with a different gap/dual bound.
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps_feasibility: eps,
            eps_gap: eps,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.eps_feasibility > 0.0) || !(self.eps_gap > 0.0) {
            return Err(SolverError::InvalidConfig(
                "tolerances must be positive".into(),
            ));
        }
        if !(self.step_ratio > 0.0) {
            return Err(SolverError::InvalidConfig(
                "step_ratio must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one LP solve: the primal solution, signed dual multipliers
/// (positive part = upper-constraint multipliers, negative part = lower),
/// the certificate residuals, and the iteration count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub solution: Vec<f64>,
    pub dual: Vec<f64>,
    /// Objective value `anchor . solution` (the override anchor if one was
    /// passed). The solution is reported at whatever scale the LP yields.
    pub objective: f64,
    /// `max_i (|a_i . x| - y_i)_+ / max(1, ||y||_inf)`.
    pub feasibility_residual: f64,
    /// `(y . |dual| - objective) / max(1, |objective|)`.
    pub gap: f64,
    /// `||A^T dual - anchor||_2 / max(1, ||anchor||_2)`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Recompute the three certificate residuals of a report from scratch.
/// The solver builds its reports through this same function, so a sound
/// report reproduces its own numbers exactly.
pub fn certificate_residuals(
    sensing: &Array2<f64>,
    magnitudes: &Array1<f64>,
    anchor: &Array1<f64>,
    solution: &Array1<f64>,
    dual: &Array1<f64>,
) -> (f64, f64, f64) {
    let ax = sensing.dot(solution);
    let y_inf = magnitudes.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
    let mut worst = 0.0_f64;
    for (axi, yi) in ax.iter().zip(magnitudes.iter()) {
        worst = worst.max(axi.abs() - yi);
    }
    let feasibility = worst.max(0.0) / y_inf;

    let objective = anchor.dot(solution);
    let dual_cost: f64 = magnitudes
        .iter()
        .zip(dual.iter())
        .map(|(&y, &u)| y * u.abs())
        .sum();
    let gap = (dual_cost - objective) / objective.abs().max(1.0);

    let atu = sensing.t().dot(dual);
    let mut diff2 = 0.0;
    for (a, b) in atu.iter().zip(anchor.iter()) {
        diff2 += (a - b) * (a - b);
    }
    let anchor_norm = norm2(anchor.as_slice().unwrap());
    let dual_residual = diff2.sqrt() / anchor_norm.max(1.0);

    (feasibility, gap, dual_residual)
}

/// Solve the PhaseMax linear program for an instance: maximize
/// `anchor . x` subject to `|a_i . x| <= y_i`.
///
/// `anchor_override` substitutes the objective direction (the PhaseLamp
/// outer loop passes its current iterate here); it must be nonzero but need
/// not be normalized — the report's objective and certificate are stated
/// against the vector actually passed.
pub fn phasemax(
    instance: &ProblemInstance,
    anchor_override: Option<&Array1<f64>>,
    config: &SolverConfig,
) -> Result<SolverReport, SolverError> {
    config.validate()?;
    let anchor = match anchor_override {
        Some(v) => {
            if v.len() != instance.truth.len() {
                return Err(SolverError::DimensionMismatch {
                    expected: instance.truth.len(),
                    got: v.len(),
                });
            }
            v
        }
        None => &instance.anchor,
    };
    let anchor_norm = norm2(anchor.as_slice().unwrap());
    if !anchor_norm.is_finite() || anchor_norm < 1e-150 {
        return Err(SolverError::DegenerateAnchor);
    }
    let outcome = ipm::solve(&instance.sensing, &instance.magnitudes, anchor, config);
    let dual = outcome.dual;

    let (feasibility_residual, gap, dual_residual) = certificate_residuals(
        &instance.sensing,
        &instance.magnitudes,
        anchor,
        &outcome.solution,
        &dual,
    );
    let converged = feasibility_residual <= config.eps_feasibility
        && gap <= config.eps_gap
        && dual_residual <= config.eps_gap;
    Ok(SolverReport {
        objective: anchor.dot(&outcome.solution),
        solution: outcome.solution.to_vec(),
        dual: dual.to_vec(),
        feasibility_residual,
        gap,
        dual_residual,
        iterations: outcome.iterations,
        converged,
    })
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
