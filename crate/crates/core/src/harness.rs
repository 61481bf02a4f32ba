//! Seeded random instances, NMSE measurement, and Monte Carlo sweeps.
//!
//! Reproducibility is a hard contract here: every random draw flows from a
//! counter-based generator keyed by `(seed, trial)` through a fixed mixing
//! function, cells of a sweep derive their seeds from the grid coordinates,
//! and results are gathered by index. The numbers a sweep produces are
//! therefore a pure function of `(seed, grid, configs)`, independent of how
//! many worker threads execute it.
//!
//! Cell seeds deliberately ignore the method, so PhaseMax and PhaseLamp
//! cells at the same grid point solve identical instances — the method
//! comparisons in the sweep outputs are paired.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::{
    phasemax, phaselamp, LampConfig, ProblemInstance, SolverConfig, SolverError,
};
use crate::theory::{lamp_certificate, spo_solve, Alpha, CosineSimilarity, TheoryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("degenerate draw: could not orthogonalize after {attempts} attempts")]
    DegenerateDraw { attempts: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Parameters of one random instance of the measurement model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Signal dimension.
    pub n: usize,
    /// Oversampling ratio; the row count is `m = round(alpha * n)`.
    pub alpha: f64,
    /// Cosine similarity between the generated anchor and the truth.
    pub rho_init: f64,
    /// Seed of the counter-based generator for this instance.
    pub seed: u64,
}

impl ModelParams {
    pub fn m(&self) -> usize {
        (self.alpha * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < 2 {
            return Err(HarnessError::InvalidParams(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(HarnessError::InvalidParams(format!(
                "alpha must be a finite real > 2, got {}",
                self.alpha
            )));
        }
        if !(self.rho_init > 0.0 && self.rho_init <= 1.0) {
            return Err(HarnessError::InvalidParams(format!(
                "rho_init must lie in (0, 1], got {}",
                self.rho_init
            )));
        }
        if self.m() <= self.n {
            return Err(HarnessError::InvalidParams(format!(
                "m = round(alpha n) = {} must exceed n = {}",
                self.m(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Which solver a sweep cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    PhaseMax,
    PhaseLamp,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::PhaseMax => write!(f, "phasemax"),
            Method::PhaseLamp => write!(f, "phaselamp"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phasemax" => Ok(Method::PhaseMax),
            "phaselamp" => Ok(Method::PhaseLamp),
            other => Err(format!(
                "unknown method '{other}' (expected phasemax or phaselamp)"
            )),
        }
    }
}

/// Solver configurations shared by all cells of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Inner LP tolerances for standalone PhaseMax solves.
    pub phasemax: SolverConfig,
    /// Outer-loop controls for PhaseLamp.
    pub lamp: LampConfig,
    /// Inner LP tolerances for PhaseLamp steps. Tighter than the PhaseMax
    /// default so the norm-monotonicity margin stays measurable at 1e-8:
    /// consecutive iterates differ by solver position error, which enters
    /// the recorded `||x_k||^2` differences.
    pub lamp_inner: SolverConfig,
    /// NMSE below which a trial counts as a successful recovery.
    pub success_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            phasemax: SolverConfig::default(),
            lamp: LampConfig::default(),
            lamp_inner: SolverConfig::with_eps(1e-10),
            success_threshold: 1e-5,
        }
    }
}

/// One Monte Carlo cell: the parameter point, per-trial outcomes, summary
/// statistics, and the matching theory columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub params: ModelParams,
    pub method: Method,
    /// Per-trial NMSE, in trial order; NaN marks a failed trial.
    pub trial_nmse: Vec<f64>,
    pub median_nmse: f64,
    pub mean_nmse: f64,
    /// Fraction of trials with NMSE below the success threshold.
    pub success_rate: f64,
    /// Asymptotic NMSE prediction for this `(rho, alpha)`.
    pub theory_nmse: f64,
    pub rho_c: f64,
    pub rho_s: f64,
    pub wall_time: Duration,
    /// Minimum of `||x_{k+1}||^2 - ||x_k||^2` over consecutive PhaseLamp
    /// iterates across the cell's trials; None for PhaseMax cells and for
    /// runs that stopped after a single step.
    pub mm_min_margin: Option<f64>,
    /// Trials whose final report missed the certificate tolerances.
    pub unconverged_trials: usize,
    /// Trials that errored outright (NaN in `trial_nmse`).
    pub failed_trials: usize,
}

/// Grid of a sweep: the cartesian product of ratios, similarities, and
/// methods at fixed dimension and trial count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
}

/// SplitMix64 finalizer; the statistical mixing step behind all derived
/// seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: a keyed hash of `(seed, trial)`. Distinct trials get
/// independent counter-based streams regardless of execution order.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    mix64(seed ^ mix64(trial ^ 0xA076_1D64_78BD_642F))
}

/// Per-cell seed for a sweep: keyed by the grid coordinates but not the
/// method, so methods are compared on identical instances.
pub fn cell_seed(seed: u64, alpha: f64, rho: f64, n: usize) -> u64 {
    let mut h = seed;
    h = mix64(h ^ mix64(alpha.to_bits()));
    h = mix64(h ^ mix64(rho.to_bits()));
    mix64(h ^ n as u64)
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw_normals(rng: &mut ChaCha8Rng, len: usize) -> Array1<f64> {
    Array1::from_iter((0..len).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Draw one instance: sensing rows i.i.d. standard normal, truth uniform on
/// the unit sphere, anchor `rho * truth + sqrt(1 - rho^2) * w` with `w`
/// uniform on the sphere orthogonal to the truth (Gram-Schmidt and
/// renormalize), magnitudes `|A . truth|`.
pub fn generate_instance(params: &ModelParams) -> Result<ProblemInstance, HarnessError> {
    params.validate()?;
    let n = params.n;
    let m = params.m();
    let mut rng = rng_for(params.seed);

    let truth = {
        let raw = draw_normals(&mut rng, n);
        let norm = raw.dot(&raw).sqrt();
        if norm < 1e-12 {
            return Err(HarnessError::DegenerateDraw { attempts: 1 });
        }
        raw / norm
    };

    let mut attempts = 0usize;
    let w = loop {
        attempts += 1;
        if attempts > 16 {
            return Err(HarnessError::DegenerateDraw { attempts: attempts - 1 });
        }
        let raw = draw_normals(&mut rng, n);
        let ortho = &raw - &(&truth * raw.dot(&truth));
        let norm = ortho.dot(&ortho).sqrt();
        if norm > 1e-8 {
            break ortho / norm;
        }
    };

    let rho = params.rho_init;
    let anchor = &(&truth * rho) + &(&w * (1.0 - rho * rho).sqrt());

    let entries: Vec<f64> = (0..m * n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let sensing =
        Array2::from_shape_vec((m, n), entries).expect("row-major buffer matches (m, n)");

    ProblemInstance::new(sensing, truth, anchor).map_err(Into::into)
}

/// Sign-resolved normalized squared error:
/// `min(||truth - x||^2, ||truth + x||^2) / ||truth||^2`.
pub fn nmse(solution: &[f64], truth: &[f64]) -> Result<f64, HarnessError> {
    if solution.len() != truth.len() {
        return Err(HarnessError::DimensionMismatch {
            expected: truth.len(),
            got: solution.len(),
        });
    }
    let mut minus = 0.0_f64;
    let mut plus = 0.0_f64;
    let mut denom = 0.0_f64;
    for (&s, &t) in solution.iter().zip(truth.iter()) {
        minus += (t - s) * (t - s);
        plus += (t + s) * (t + s);
        denom += t * t;
    }
    if denom == 0.0 {
        return Err(HarnessError::InvalidParams(
            "truth vector must be nonzero".into(),
        ));
    }
    Ok(minus.min(plus) / denom)
}

struct TrialOutcome {
    nmse: f64,
    converged: bool,
    failed: bool,
    mm_margin: Option<f64>,
}

fn run_trial(params: &ModelParams, method: Method, trial: u64, cfg: &RunConfig) -> TrialOutcome {
    let trial_params = ModelParams {
        seed: trial_seed(params.seed, trial),
        ..*params
    };
    let failed = TrialOutcome {
        nmse: f64::NAN,
        converged: false,
        failed: true,
        mm_margin: None,
    };
    let Ok(instance) = generate_instance(&trial_params) else {
        return failed;
    };
    match method {
        Method::PhaseMax => match phasemax(&instance, None, &cfg.phasemax) {
            Ok(report) => TrialOutcome {
                nmse: nmse(&report.solution, instance.truth().as_slice().unwrap())
                    .unwrap_or(f64::NAN),
                converged: report.converged,
                failed: false,
                mm_margin: None,
            },
            Err(_) => failed,
        },
        Method::PhaseLamp => match phaselamp(&instance, &cfg.lamp, &cfg.lamp_inner) {
            Ok((report, trajectory)) => {
                let mm_margin = trajectory
                    .windows(2)
                    .map(|pair| pair[1].norm * pair[1].norm - pair[0].norm * pair[0].norm)
                    .fold(None, |acc: Option<f64>, margin| {
                        Some(acc.map_or(margin, |best| best.min(margin)))
                    });
                TrialOutcome {
                    nmse: nmse(&report.solution, instance.truth().as_slice().unwrap())
                        .unwrap_or(f64::NAN),
                    converged: report.converged,
                    failed: false,
                    mm_margin,
                }
            }
            Err(_) => failed,
        },
    }
}

/// Run `trials` independent instances of one parameter point and aggregate.
/// Per-trial solver failures are folded into the record (NaN entries and
/// the `failed_trials` counter); the cell itself never aborts on them.
pub fn run_cell(
    params: &ModelParams,
    method: Method,
    trials: usize,
    cfg: &RunConfig,
) -> Result<SweepRecord, HarnessError> {
    params.validate()?;
    if trials == 0 {
        return Err(HarnessError::InvalidParams(
            "trials must be at least 1".into(),
        ));
    }
    let alpha = Alpha::new(params.alpha)?;
    let rho = CosineSimilarity::new(params.rho_init)?;
    let theory = spo_solve(rho, alpha)?;
    let rho_s = lamp_certificate(alpha)?.rho_s;

    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(params, method, t, cfg))
        .collect();
    let wall_time = start.elapsed();

    let trial_nmse: Vec<f64> = outcomes.iter().map(|o| o.nmse).collect();
    let finite: Vec<f64> = trial_nmse.iter().copied().filter(|v| v.is_finite()).collect();
    let median_nmse = median(&finite);
    let mean_nmse = if finite.is_empty() {
        f64::NAN
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let success_rate = trial_nmse
        .iter()
        .filter(|v| v.is_finite() && **v < cfg.success_threshold)
        .count() as f64
        / trials as f64;
    let mm_min_margin = outcomes
        .iter()
        .filter_map(|o| o.mm_margin)
        .fold(None, |acc: Option<f64>, m| {
            Some(acc.map_or(m, |best| best.min(m)))
        });

    Ok(SweepRecord {
        params: *params,
        method,
        unconverged_trials: outcomes.iter().filter(|o| !o.failed && !o.converged).count(),
        failed_trials: outcomes.iter().filter(|o| o.failed).count(),
        trial_nmse,
        median_nmse,
        mean_nmse,
        success_rate,
        theory_nmse: theory.nmse,
        rho_c: theory.rho_c,
        rho_s,
        wall_time,
        mm_min_margin,
    })
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Run every cell of a grid. Cells are independent and may execute on any
/// number of workers; the output order is the grid order (`alpha` major,
/// then `rho`, then method) regardless of scheduling.
pub fn run_sweep(grid: &SweepGrid, cfg: &RunConfig) -> Result<Vec<SweepRecord>, HarnessError> {
    if grid.alphas.is_empty() || grid.rhos.is_empty() || grid.methods.is_empty() {
        return Err(HarnessError::EmptyGrid);
    }
    if grid.trials == 0 {
        return Err(HarnessError::InvalidParams(
            "trials must be at least 1".into(),
        ));
    }
    let mut cells = Vec::new();
    for &alpha in &grid.alphas {
        for &rho in &grid.rhos {
            for &method in &grid.methods {
                let params = ModelParams {
                    n: grid.n,
                    alpha,
                    rho_init: rho,
                    seed: cell_seed(grid.seed, alpha, rho, grid.n),
                };
                params.validate()?;
                cells.push((params, method));
            }
        }
    }
    cells
        .par_iter()
        .map(|(params, method)| run_cell(params, *method, grid.trials, cfg))
        .collect()
}
