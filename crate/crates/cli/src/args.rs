//! Command-line surface: subcommands, flags, and grid-expression parsing.

use clap::{Args, Parser, Subcommand};
use phaselp::Method;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "phaselp",
    version,
    about = "Anchored phase retrieval: theory curves, single solves, Monte Carlo sweeps",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the asymptotic predictions on an (alpha, rho) grid and
    /// write them as CSV.
    Theory(TheoryArgs),
    /// Generate one seeded instance, solve it, and write a JSON report.
    Solve(SolveArgs),
    /// Run a Monte Carlo sweep over an (alpha, rho, method) grid and write
    /// a CSV of per-cell summaries.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Oversampling ratios: comma-separated values and lo:hi:count ranges.
    #[arg(long, value_name = "GRID")]
    pub alpha: String,
    /// Cosine similarities: comma-separated values and lo:hi:count ranges.
    #[arg(long, value_name = "GRID")]
    pub rho: String,
    /// Output CSV path; a manifest is written alongside.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub rho: f64,
    /// Signal dimension.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_method, default_value = "phasemax")]
    pub method: Method,
    /// Output JSON path; a manifest is written alongside.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Oversampling ratios (flags form of the grid).
    #[arg(long, value_name = "GRID")]
    pub alpha: Option<String>,
    /// Cosine similarities (flags form of the grid).
    #[arg(long, value_name = "GRID")]
    pub rho: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated methods (phasemax, phaselamp).
    #[arg(long, value_name = "LIST")]
    pub method: Option<String>,
    /// JSON grid spec (a recipe, or a previously written manifest).
    /// Fields set here win over flags, with a warning.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output CSV path; a manifest (and a failure sidecar when needed) is
    /// written alongside.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
}

/// Solver tolerance flags shared by `solve` and `sweep`.
#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Relative primal feasibility tolerance.
    #[arg(long = "eps-feas", value_name = "EPS")]
    pub eps_feas: Option<f64>,
    /// Relative duality-gap / dual-residual tolerance.
    #[arg(long = "eps-gap", value_name = "EPS")]
    pub eps_gap: Option<f64>,
    /// PhaseLamp outer-iteration cap.
    #[arg(long, value_name = "COUNT")]
    pub imax: Option<usize>,
    /// PhaseLamp stationarity threshold on consecutive iterates.
    #[arg(long = "lamp-tol", value_name = "TOL")]
    pub lamp_tol: Option<f64>,
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

pub fn parse_method_list(s: &str) -> Result<Vec<Method>, String> {
    s.split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(parse_method)
        .collect()
}

/// Parse a grid expression: comma-separated tokens, each either a number or
/// a `lo:hi:count` inclusive linear range.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((lo, rest)) = tok.split_once(':') {
            let (hi, count) = rest
                .split_once(':')
                .ok_or_else(|| format!("range '{tok}' must be lo:hi:count"))?;
            let lo: f64 = lo.trim().parse().map_err(|e| format!("bad '{tok}': {e}"))?;
            let hi: f64 = hi.trim().parse().map_err(|e| format!("bad '{tok}': {e}"))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|e| format!("bad '{tok}': {e}"))?;
            if count == 0 {
                return Err(format!("range '{tok}' has zero points"));
            }
            if count == 1 {
                out.push(lo);
            } else {
                for k in 0..count {
                    out.push(lo + (hi - lo) * k as f64 / (count - 1) as f64);
                }
            }
        } else {
            out.push(tok.parse().map_err(|e| format!("bad number '{tok}': {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty grid expression".into());
    }
    Ok(out)
}
