//! Implementations of the three subcommands.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use phaselp::solver::LampStep;
use phaselp::{
    generate_instance, lamp_certificate, nmse, phasemax, phaselamp, rho_critical, run_sweep,
    spo_solve, Alpha, CosineSimilarity, LampConfig, Method, ModelParams, RunConfig, SolverConfig,
    SolverReport, SweepGrid, SweepRecord, TheoryPrediction,
};

use crate::args::{parse_grid, parse_method_list, SolveArgs, SolverFlags, SweepArgs, TheoryArgs};
use crate::output::{fmt_f64, write_manifest, write_text, RunManifest};

/// Process outcome distinguishable from hard errors: a written report whose
/// solver missed its tolerances maps to exit code 2.
pub enum ExitOutcome {
    Success,
    NotConverged,
}

#[derive(Debug, Serialize)]
struct TheorySpec {
    alphas: Vec<f64>,
    rhos: Vec<f64>,
}

pub fn cmd_theory(args: &TheoryArgs) -> Result<ExitOutcome> {
    let alphas = parse_grid(&args.alpha).map_err(|e| anyhow!(e))?;
    let rhos = parse_grid(&args.rho).map_err(|e| anyhow!(e))?;
    let mut csv = String::from(
        "alpha,rho_init,s_star,r_star,nmse_theory,rho_c,theta_star,s_hat,ell,rho_s\n",
    );
    for &a in &alphas {
        let alpha = Alpha::new(a).context("alpha grid")?;
        let cert = lamp_certificate(alpha)?;
        let rho_c = rho_critical(alpha);
        for &r in &rhos {
            let rho = CosineSimilarity::new(r).context("rho grid")?;
            let p = spo_solve(rho, alpha)?;
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt_f64(a),
                fmt_f64(r),
                fmt_f64(p.s_star),
                fmt_f64(p.r_star),
                fmt_f64(p.nmse),
                fmt_f64(rho_c),
                fmt_f64(cert.theta_star),
                fmt_f64(cert.s_hat),
                fmt_f64(cert.ell),
                fmt_f64(cert.rho_s),
            ));
        }
    }
    write_text(&args.out, &csv)?;
    let manifest = RunManifest::new(
        "theory",
        TheorySpec { alphas, rhos },
        None,
        vec![args.out.clone()],
    );
    write_manifest(&args.out, &manifest)?;
    Ok(ExitOutcome::Success)
}

#[derive(Debug, Serialize)]
struct SolveSpec {
    alpha: f64,
    rho: f64,
    n: usize,
    seed: u64,
    method: Method,
    eps_feasibility: f64,
    eps_gap: f64,
    imax: usize,
    lamp_tol: f64,
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    params: ModelParams,
    method: Method,
    report: SolverReport,
    nmse: f64,
    theory: TheoryPrediction,
    rho_s: f64,
    trajectory: Option<Vec<LampStep>>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<ExitOutcome> {
    let params = ModelParams {
        n: args.n,
        alpha: args.alpha,
        rho_init: args.rho,
        seed: args.seed,
    };
    params.validate()?;
    let alpha = Alpha::new(args.alpha)?;
    let rho = CosineSimilarity::new(args.rho)?;
    let instance = generate_instance(&params)?;

    let defaults = RunConfig::default();
    let (report, trajectory) = match args.method {
        Method::PhaseMax => {
            let cfg = solver_config(&args.solver, &defaults.phasemax);
            (phasemax(&instance, None, &cfg)?, None)
        }
        Method::PhaseLamp => {
            let inner = solver_config(&args.solver, &defaults.lamp_inner);
            let lamp = lamp_config(&args.solver, &defaults.lamp);
            let (report, traj) = phaselamp(&instance, &lamp, &inner)?;
            (report, Some(traj))
        }
    };

    let theory = spo_solve(rho, alpha)?;
    let rho_s = lamp_certificate(alpha)?.rho_s;
    let output = SolveOutput {
        params,
        method: args.method,
        nmse: nmse(&report.solution, instance.truth().as_slice().unwrap())?,
        theory,
        rho_s,
        trajectory,
        report,
    };
    let body = serde_json::to_string_pretty(&output)? + "\n";
    write_text(&args.out, &body)?;

    let lamp_defaults = LampConfig::default();
    let spec = SolveSpec {
        alpha: args.alpha,
        rho: args.rho,
        n: args.n,
        seed: args.seed,
        method: args.method,
        eps_feasibility: args.solver.eps_feas.unwrap_or(match args.method {
            Method::PhaseMax => defaults.phasemax.eps_feasibility,
            Method::PhaseLamp => defaults.lamp_inner.eps_feasibility,
        }),
        eps_gap: args.solver.eps_gap.unwrap_or(match args.method {
            Method::PhaseMax => defaults.phasemax.eps_gap,
            Method::PhaseLamp => defaults.lamp_inner.eps_gap,
        }),
        imax: args.solver.imax.unwrap_or(lamp_defaults.max_outer),
        lamp_tol: args.solver.lamp_tol.unwrap_or(lamp_defaults.tol),
    };
    let manifest = RunManifest::new("solve", spec, Some(args.seed), vec![args.out.clone()]);
    write_manifest(&args.out, &manifest)?;

    if output.report.converged {
        Ok(ExitOutcome::Success)
    } else {
        Ok(ExitOutcome::NotConverged)
    }
}

fn solver_config(flags: &SolverFlags, base: &SolverConfig) -> SolverConfig {
    SolverConfig {
        eps_feasibility: flags.eps_feas.unwrap_or(base.eps_feasibility),
        eps_gap: flags.eps_gap.unwrap_or(base.eps_gap),
        ..base.clone()
    }
}

fn lamp_config(flags: &SolverFlags, base: &LampConfig) -> LampConfig {
    LampConfig {
        max_outer: flags.imax.unwrap_or(base.max_outer),
        tol: flags.lamp_tol.unwrap_or(base.tol),
    }
}

/// Fully resolved sweep parameters; this is what the manifest records and
/// what `--config` files contain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub rhos: Vec<f64>,
    pub n: usize,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub eps_feasibility: f64,
    pub eps_gap: f64,
    pub max_iterations: usize,
    pub lamp_inner_eps: f64,
    pub imax: usize,
    pub lamp_tol: f64,
    pub success_threshold: f64,
}

/// The file form of a sweep spec: everything optional so recipes can state
/// only what they pin down.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSpecFile {
    alphas: Option<Vec<f64>>,
    rhos: Option<Vec<f64>>,
    n: Option<usize>,
    trials: Option<usize>,
    methods: Option<Vec<Method>>,
    seed: Option<u64>,
    eps_feasibility: Option<f64>,
    eps_gap: Option<f64>,
    max_iterations: Option<usize>,
    lamp_inner_eps: Option<f64>,
    imax: Option<usize>,
    lamp_tol: Option<f64>,
    success_threshold: Option<f64>,
}

fn load_spec_file(path: &PathBuf) -> Result<SweepSpecFile> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))?;
    // a manifest wraps the spec under "parameters"; accept both forms
    let spec_value = match value.get("parameters") {
        Some(inner) => inner.clone(),
        None => value,
    };
    serde_json::from_value(spec_value).with_context(|| format!("interpreting {}", path.display()))
}

fn resolve_sweep_spec(args: &SweepArgs) -> Result<SweepSpec> {
    let file = match &args.config {
        Some(path) => Some(load_spec_file(path)?),
        None => None,
    };
    let file = file.unwrap_or_default();

    fn pick<T: Clone>(
        name: &str,
        from_file: Option<T>,
        from_flag: Option<T>,
        default: Option<T>,
    ) -> Result<T> {
        match (from_file, from_flag) {
            (Some(f), Some(_)) => {
                eprintln!("warning: --config overrides --{name}");
                Ok(f)
            }
            (Some(f), None) => Ok(f),
            (None, Some(v)) => Ok(v),
            (None, None) => {
                default.ok_or_else(|| anyhow!("sweep needs --{name} (flag or config file)"))
            }
        }
    }

    let flag_alphas = args.alpha.as_deref().map(parse_grid).transpose().map_err(|e| anyhow!(e))?;
    let flag_rhos = args.rho.as_deref().map(parse_grid).transpose().map_err(|e| anyhow!(e))?;
    let flag_methods = args
        .method
        .as_deref()
        .map(parse_method_list)
        .transpose()
        .map_err(|e| anyhow!(e))?;

    let defaults = RunConfig::default();
    Ok(SweepSpec {
        alphas: pick("alpha", file.alphas, flag_alphas, None)?,
        rhos: pick("rho", file.rhos, flag_rhos, None)?,
        n: pick("n", file.n, args.n, Some(200))?,
        trials: pick("trials", file.trials, args.trials, Some(10))?,
        methods: pick(
            "method",
            file.methods,
            flag_methods,
            Some(vec![Method::PhaseMax]),
        )?,
        seed: pick("seed", file.seed, args.seed, Some(0))?,
        eps_feasibility: pick(
            "eps-feas",
            file.eps_feasibility,
            args.solver.eps_feas,
            Some(defaults.phasemax.eps_feasibility),
        )?,
        eps_gap: pick(
            "eps-gap",
            file.eps_gap,
            args.solver.eps_gap,
            Some(defaults.phasemax.eps_gap),
        )?,
        max_iterations: pick(
            "max-iterations",
            file.max_iterations,
            None,
            Some(defaults.phasemax.max_iterations),
        )?,
        lamp_inner_eps: pick(
            "lamp-inner-eps",
            file.lamp_inner_eps,
            None,
            Some(defaults.lamp_inner.eps_gap),
        )?,
        imax: pick("imax", file.imax, args.solver.imax, Some(defaults.lamp.max_outer))?,
        lamp_tol: pick(
            "lamp-tol",
            file.lamp_tol,
            args.solver.lamp_tol,
            Some(defaults.lamp.tol),
        )?,
        success_threshold: pick(
            "success-threshold",
            file.success_threshold,
            None,
            Some(defaults.success_threshold),
        )?,
    })
}

fn run_config_of(spec: &SweepSpec) -> RunConfig {
    RunConfig {
        phasemax: SolverConfig {
            eps_feasibility: spec.eps_feasibility,
            eps_gap: spec.eps_gap,
            max_iterations: spec.max_iterations,
            step_ratio: 1.0,
        },
        lamp: LampConfig {
            max_outer: spec.imax,
            tol: spec.lamp_tol,
        },
        lamp_inner: SolverConfig {
            eps_feasibility: spec.lamp_inner_eps,
            eps_gap: spec.lamp_inner_eps,
            max_iterations: spec.max_iterations,
            step_ratio: 1.0,
        },
        success_threshold: spec.success_threshold,
    }
}

pub fn sweep_csv(records: &[SweepRecord], trials: usize) -> String {
    let mut csv = String::from(
        "alpha,rho_init,n,trials,method,median_nmse,mean_nmse,success_rate,theory_nmse,rho_c,rho_s,seed\n",
    );
    for r in records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.params.alpha),
            fmt_f64(r.params.rho_init),
            r.params.n,
            trials,
            r.method,
            fmt_f64(r.median_nmse),
            fmt_f64(r.mean_nmse),
            fmt_f64(r.success_rate),
            fmt_f64(r.theory_nmse),
            fmt_f64(r.rho_c),
            fmt_f64(r.rho_s),
            r.params.seed,
        ));
    }
    csv
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<ExitOutcome> {
    let spec = resolve_sweep_spec(args)?;
    let grid = SweepGrid {
        alphas: spec.alphas.clone(),
        rhos: spec.rhos.clone(),
        n: spec.n,
        trials: spec.trials,
        methods: spec.methods.clone(),
        seed: spec.seed,
    };
    if grid.alphas.is_empty() || grid.rhos.is_empty() || grid.methods.is_empty() {
        bail!("sweep grid is empty; nothing to run");
    }
    let cfg = run_config_of(&spec);
    let records = run_sweep(&grid, &cfg)?;

    let csv = sweep_csv(&records, spec.trials);
    write_text(&args.out, &csv)?;
    let mut artifacts = vec![args.out.clone()];

    // sidecar for cells with trial-level trouble
    let mut sidecar_lines = String::new();
    for r in &records {
        if r.failed_trials > 0 || r.unconverged_trials > 0 {
            sidecar_lines.push_str(&format!(
                "alpha={} rho={} method={} failed_trials={} unconverged_trials={}\n",
                r.params.alpha, r.params.rho_init, r.method, r.failed_trials, r.unconverged_trials
            ));
        }
    }
    if !sidecar_lines.is_empty() {
        let mut name = args
            .out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string());
        name.push_str(".failures.log");
        let sidecar = args.out.with_file_name(name);
        write_text(&sidecar, &sidecar_lines)?;
        artifacts.push(sidecar);
    }

    let manifest = RunManifest::new("sweep", spec.clone(), Some(spec.seed), artifacts);
    write_manifest(&args.out, &manifest)?;
    Ok(ExitOutcome::Success)
}
