//! Multi-seed benchmark trials: one synthetic problem per (case, seed),
//! every selected solver run on the same instance, results aggregated into
//! mean and standard deviation per (solver, case).
//!
//! Trials are independent; a bounded worker pool may run them concurrently.
//! Each trial derives everything from its own (case, seed) pair and results
//! are merged by trial index, so the output bytes do not depend on the pool
//! size.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use l0recov_core::metrics::{psnr, rel_err, MetricsReport};
use l0recov_core::problem::{generate_problem, GeneratedProblem, ProblemSpec};
use l0recov_core::solvers::{
    cosamp_solve, direct_recover, iht_solve, iiht_solve, ist_solve, SolveResult, SolverConfig,
    StepRule, StopReason,
};
use l0recov_core::SignalVector;

use crate::config::{Case, RunConfig, SolverKind};
use crate::error::CliError;
use crate::fmt::sig6;

/// One (solver, case, seed) cell. Solver errors are recorded, not fatal.
#[derive(Debug, Clone)]
pub struct TrialCell {
    pub solver: SolverKind,
    pub outcome: Result<MetricsReport, String>,
}

/// All cells of one (case, seed) trial, in the configured solver order.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub case: Case,
    pub seed: u64,
    pub cells: Vec<TrialCell>,
}

/// Aggregated row of the benchmark table.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub solver: SolverKind,
    pub case: Case,
    pub rel_err_mean: f64,
    pub rel_err_std: f64,
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub iters_mean: f64,
    pub time_mean_s: f64,
    /// Seeds whose solver run errored, with messages.
    pub errors: Vec<(u64, String)>,
}

fn solver_config(cfg: &RunConfig, case: Case, spec: &ProblemSpec) -> SolverConfig {
    SolverConfig {
        mu: case.mu,
        sparsity_k: spec.k(),
        tol: cfg.tol,
        max_iters: cfg.max_iters,
        init_mode: cfg.iiht_init,
        step_rule: cfg.iiht_step_rule,
    }
}

fn measure<F>(timing: bool, f: F) -> Result<(SignalVector, usize, StopReason, f64), String>
where
    F: FnOnce() -> Result<SolveResult, l0recov_core::CoreError>,
{
    let start = Instant::now();
    let result = f().map_err(|e| e.to_string())?;
    let elapsed = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok((result.x_final, result.iterations, result.stop_reason, elapsed))
}

/// Runs one solver on a generated problem, returning its metrics row and the
/// reconstruction itself (the phantom command renders the latter as images).
pub fn run_solver_on_problem(
    solver: SolverKind,
    problem: &GeneratedProblem,
    cfg: &RunConfig,
    base: &SolverConfig,
) -> Result<(MetricsReport, SignalVector), String> {
    let a = &problem.a;
    let y = &problem.y;
    let outcome = match solver {
        SolverKind::Direct => {
            let start = Instant::now();
            let x = direct_recover(a, y).map_err(|e| e.to_string())?;
            let t = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            Ok((x, 0, StopReason::Tolerance, t))
        }
        SolverKind::Iiht => measure(cfg.timing, || iiht_solve(a, y, base)),
        SolverKind::Iht => {
            let c = SolverConfig { step_rule: StepRule::FixedTau(cfg.iht_tau), ..base.clone() };
            measure(cfg.timing, || iht_solve(a, y, &c))
        }
        SolverKind::Ist => {
            let c = SolverConfig { step_rule: StepRule::FixedTau(cfg.ist_tau), ..base.clone() };
            let l1_target = problem.x_true.l1_norm();
            measure(cfg.timing, || ist_solve(a, y, &c, l1_target))
        }
        SolverKind::Cosamp => measure(cfg.timing, || cosamp_solve(a, y, base)),
    }?;
    let (x, iterations, stop_reason, wall) = outcome;
    let rel = rel_err(&x, &problem.x_true).map_err(|e| e.to_string())?;
    let p = psnr(&x, &problem.x_true).map_err(|e| e.to_string())?;
    let report = MetricsReport {
        rel_err_percent: rel,
        psnr_db: p,
        iterations,
        stop_reason,
        wall_time_seconds: wall,
    };
    Ok((report, x))
}

/// Generates the (case, seed) problem and runs every configured solver on it.
pub fn run_trial(cfg: &RunConfig, case: Case, seed: u64) -> Result<TrialResult, CliError> {
    let spec = ProblemSpec {
        n: cfg.n,
        sampling_ratio: cfg.sampling_ratio,
        sparsity_level: cfg.sparsity_level,
        noise_sigma: case.sigma,
        seed,
        scale: cfg.matrix_scale,
    };
    spec.validate()?;
    let problem = generate_problem(&spec)?;
    let base = solver_config(cfg, case, &spec);
    let cells = cfg
        .solvers
        .iter()
        .map(|&solver| TrialCell {
            solver,
            outcome: run_solver_on_problem(solver, &problem, cfg, &base).map(|(m, _)| m),
        })
        .collect();
    Ok(TrialResult { case, seed, cells })
}

/// Runs the full (case x seed) grid, fanning out to `cfg.parallel` workers,
/// and returns results ordered by trial index (case-major, then seed).
pub fn run_all_trials(cfg: &RunConfig) -> Result<Vec<TrialResult>, CliError> {
    cfg.validate()?;
    let jobs: Vec<(Case, u64)> = cfg
        .cases
        .iter()
        .flat_map(|&c| cfg.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let workers = cfg.parallel.min(jobs.len().max(1));
    if workers <= 1 {
        return jobs.into_iter().map(|(c, s)| run_trial(cfg, c, s)).collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<TrialResult, CliError>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (case, seed) = jobs[i];
                let result = run_trial(cfg, case, seed);
                slots.lock().expect("trial result mutex")[i] = Some(result);
            });
        }
    });
    let slots = slots.into_inner().expect("trial result mutex");
    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| slot.unwrap_or_else(|| panic!("trial {i} produced no result")))
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aggregates trial results into one summary row per (solver, case),
/// averaging over seeds. Errored cells are excluded from the averages and
/// listed on the row.
pub fn aggregate(cfg: &RunConfig, trials: &[TrialResult]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &case in &cfg.cases {
        for &solver in &cfg.solvers {
            let mut rel = Vec::new();
            let mut psnrs = Vec::new();
            let mut iters = Vec::new();
            let mut times = Vec::new();
            let mut errors = Vec::new();
            for t in trials.iter().filter(|t| t.case == case) {
                for cell in t.cells.iter().filter(|c| c.solver == solver) {
                    match &cell.outcome {
                        Ok(m) => {
                            rel.push(m.rel_err_percent);
                            psnrs.push(m.psnr_db);
                            iters.push(m.iterations as f64);
                            times.push(m.wall_time_seconds);
                        }
                        Err(msg) => errors.push((t.seed, msg.clone())),
                    }
                }
            }
            let (rel_err_mean, rel_err_std) = mean_std(&rel);
            let (psnr_mean, psnr_std) = mean_std(&psnrs);
            let (iters_mean, _) = mean_std(&iters);
            let (time_mean_s, _) = mean_std(&times);
            rows.push(SummaryRow {
                solver,
                case,
                rel_err_mean,
                rel_err_std,
                psnr_mean,
                psnr_std,
                iters_mean,
                time_mean_s,
                errors,
            });
        }
    }
    rows
}

/// Renders the summary table in the benchmark CSV schema.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(
        "solver,sigma,mu,rel_err_mean,rel_err_std,psnr_mean,psnr_std,iters_mean,time_mean_s\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.solver.name(),
            sig6(r.case.sigma),
            sig6(r.case.mu),
            sig6(r.rel_err_mean),
            sig6(r.rel_err_std),
            sig6(r.psnr_mean),
            sig6(r.psnr_std),
            sig6(r.iters_mean),
            sig6(r.time_mean_s),
        ));
    }
    out
}
