//! Implementations behind the `l0recov` subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use l0recov_core::matrix::{
    gaussian_matrix, spectral_norm_sq, DenseMatrix, SPECTRAL_DEFAULT_MAX_ITERS,
    SPECTRAL_DEFAULT_TOL,
};
use l0recov_core::problem::{
    ellipse_phantom, gen_noise, generate_problem, GeneratedProblem, MatrixScale, ProblemSpec,
};
use l0recov_core::rng::RngStream;
use l0recov_core::solvers::{
    cosamp_solve, direct_recover, iht_solve, iiht_solve, verify_theorems, CheckKind, CheckStatus,
    InitMode, SolveResult, SolveTrace, SolverConfig, StepRule,
};
use l0recov_core::SignalVector;

use crate::config::{RunConfig, SolverKind};
use crate::error::CliError;
use crate::fmt::sig6;
use crate::io;
use crate::trial::{aggregate, run_all_trials, run_solver_on_problem, summary_csv, TrialCell, TrialResult};

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("{}: cannot create output directory: {e}", dir.display())))
}

fn print_summary(rows: &[crate::trial::SummaryRow]) {
    println!(
        "{:<12} {:>6} {:>8} {:>14} {:>12} {:>10}",
        "solver", "sigma", "mu", "rel_err (%)", "psnr (dB)", "iters"
    );
    for r in rows {
        println!(
            "{:<12} {:>6} {:>8} {:>7} ± {:>5} {:>12} {:>10}",
            r.solver.name(),
            sig6(r.case.sigma),
            sig6(r.case.mu),
            sig6(r.rel_err_mean),
            sig6(r.rel_err_std),
            sig6(r.psnr_mean),
            sig6(r.iters_mean),
        );
        for (seed, msg) in &r.errors {
            println!("    seed {seed}: solver error: {msg}");
        }
    }
}

/// `bench`: the vector benchmark. Runs every configured solver over the
/// (case x seed) grid and writes `bench.csv`.
pub fn cmd_bench(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out_dir)?;
    let trials = run_all_trials(cfg)?;
    let rows = aggregate(cfg, &trials);
    let csv = summary_csv(&rows);
    let path = cfg.out_dir.join("bench.csv");
    std::fs::write(&path, &csv).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    print_summary(&rows);
    println!("wrote {}", path.display());
    Ok(())
}

/// One phantom trial: shared phantom image, per-seed matrix and noise.
fn phantom_problem(
    cfg: &RunConfig,
    x_true: &SignalVector,
    sigma: f64,
    seed: u64,
) -> Result<GeneratedProblem, CliError> {
    let n = cfg.side * cfg.side;
    let m = (cfg.sampling_ratio * n as f64 + 0.5).floor() as usize;
    if m == 0 {
        return Err(CliError::usage("phantom sampling ratio yields zero measurements"));
    }
    let mut rng = RngStream::derive(seed, 1);
    let a = gaussian_matrix(m, n, &mut rng)?;
    let a = match cfg.matrix_scale {
        MatrixScale::RawGaussian => a,
        MatrixScale::InverseSqrtM => {
            let factor = 1.0 / (m as f64).sqrt();
            let entries: Vec<f64> = a.entries().iter().map(|v| factor * v).collect();
            DenseMatrix::from_entries(m, n, entries)?
        }
    };
    let y_clean = a.apply(x_true)?;
    let noise = gen_noise(&y_clean, sigma, &mut RngStream::derive(seed, 2));
    let y: Vec<f64> = y_clean.iter().zip(&noise).map(|(c, e)| c + e).collect();
    Ok(GeneratedProblem { a, x_true: x_true.clone(), y_clean, noise, y })
}

/// `phantom`: sparse-image recovery study. Emits the phantom, one
/// reconstruction and one absolute-difference image per solver, and a
/// metrics CSV.
pub fn cmd_phantom(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out_dir)?;
    let first_seed = cfg.seeds[0];
    let x_true = ellipse_phantom(cfg.side, cfg.target_nnz, &mut RngStream::derive(first_seed, 0))?;
    io::write_pgm(&cfg.out_dir.join("phantom.pgm"), x_true.as_slice(), cfg.side)?;

    let mut trials = Vec::new();
    for &case in &cfg.cases {
        for (si, &seed) in cfg.seeds.iter().enumerate() {
            let problem = phantom_problem(cfg, &x_true, case.sigma, seed)?;
            let base = SolverConfig {
                mu: case.mu,
                sparsity_k: cfg.target_nnz,
                tol: cfg.tol,
                max_iters: cfg.max_iters,
                init_mode: cfg.iiht_init,
                step_rule: cfg.iiht_step_rule,
            };
            let mut cells = Vec::new();
            for &solver in &cfg.solvers {
                let outcome = run_solver_on_problem(solver, &problem, cfg, &base);
                if si == 0 {
                    if let Ok((_, x)) = &outcome {
                        let name = solver.name();
                        io::write_pgm(
                            &cfg.out_dir.join(format!("recon_{name}.pgm")),
                            x.as_slice(),
                            cfg.side,
                        )?;
                        let diff: Vec<f64> = x
                            .as_slice()
                            .iter()
                            .zip(x_true.as_slice())
                            .map(|(a, b)| (a - b).abs())
                            .collect();
                        io::write_pgm(
                            &cfg.out_dir.join(format!("diff_{name}.pgm")),
                            &diff,
                            cfg.side,
                        )?;
                    }
                }
                cells.push(TrialCell { solver, outcome: outcome.map(|(m, _)| m) });
            }
            trials.push(TrialResult { case, seed, cells });
        }
    }
    let rows = aggregate(cfg, &trials);
    let csv = summary_csv(&rows);
    let path = cfg.out_dir.join("phantom.csv");
    std::fs::write(&path, &csv).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    print_summary(&rows);
    println!("wrote {} and {} images", path.display(), 1 + 2 * cfg.solvers.len());
    Ok(())
}

fn check_kind_name(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::SurrogateDescent => "surrogate-descent",
        CheckKind::ObjectiveDescent => "objective-descent",
        CheckKind::StepSumBound => "step-sum-bound",
        CheckKind::StepDecay => "step-decay",
        CheckKind::SurrogateIdentity => "surrogate-identity",
    }
}

/// `verify`: evaluates every convergence guarantee on a grid of random
/// instances and both init modes. Any failed check exits with status 3.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let sizes = [256usize, cfg.n];
    let mut failures = 0usize;
    let mut checks_run = 0usize;
    for &n in &sizes {
        for &case in &cfg.cases {
            for &seed in &cfg.seeds {
                let spec = ProblemSpec {
                    n,
                    sampling_ratio: cfg.sampling_ratio,
                    sparsity_level: cfg.sparsity_level,
                    noise_sigma: case.sigma,
                    seed,
                    scale: cfg.matrix_scale,
                };
                let problem = generate_problem(&spec)?;
                let step_rule = match cfg.iiht_step_rule {
                    // The adaptive rule carries no guarantees; verification
                    // substitutes the safe bound unless the config explicitly
                    // pins a step.
                    StepRule::PaperAdaptive => {
                        let s = spectral_norm_sq(
                            &problem.a,
                            SPECTRAL_DEFAULT_MAX_ITERS,
                            SPECTRAL_DEFAULT_TOL,
                        )?
                        .value;
                        StepRule::SafeBound { delta: 0.01 * s }
                    }
                    other => other,
                };
                for init in [InitMode::Zero, InitMode::AdjointMeasurement] {
                    let config = SolverConfig {
                        mu: case.mu,
                        sparsity_k: spec.k(),
                        tol: cfg.tol,
                        max_iters: cfg.max_iters,
                        init_mode: init,
                        step_rule,
                    };
                    let report = verify_theorems(&problem.a, &problem.y, &config)?;
                    let init_name = match init {
                        InitMode::Zero => "zero",
                        InitMode::AdjointMeasurement => "adjoint",
                    };
                    for check in &report.checks {
                        checks_run += 1;
                        let (status, detail) = match check.status {
                            CheckStatus::Pass => ("pass", String::new()),
                            CheckStatus::NotApplicable => ("n/a", String::new()),
                            CheckStatus::Fail { iteration } => {
                                failures += 1;
                                ("FAIL", format!(" at iteration {iteration}"))
                            }
                        };
                        println!(
                            "n={n} sigma={} seed={seed} init={init_name} {:<20} {status}{detail} (margin {})",
                            sig6(case.sigma),
                            check_kind_name(check.kind),
                            sig6(check.margin),
                        );
                    }
                }
            }
        }
    }
    println!("{checks_run} checks, {failures} failures");
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{failures} theorem check(s) failed"
        )));
    }
    Ok(())
}

fn trace_csv(trace: &SolveTrace) -> String {
    let mut out =
        String::from("k,tau_k,objective_l1,step_norm_sq,cum_step_sum,residual_norm_sq,nnz\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e},{}",
            r.k, r.tau_k, r.objective_l1, r.step_norm_sq, r.cum_step_sum, r.residual_norm_sq, r.nnz
        );
    }
    out
}

fn log_trace(trace: &SolveTrace) {
    for r in trace.records.iter().filter(|r| r.k % 10 == 0) {
        println!(
            "k={:<5} L1={} residual^2={}",
            r.k,
            sig6(r.objective_l1),
            sig6(r.residual_norm_sq)
        );
    }
}

/// `solve`: applies one solver to user-supplied A and y files and writes the
/// reconstruction plus a full trace CSV.
pub fn cmd_solve_file(
    cfg: &RunConfig,
    a_path: &Path,
    y_path: &Path,
    solver: SolverKind,
) -> Result<(), CliError> {
    let a = io::read_matrix_auto(a_path)?;
    let y = io::read_vector_auto(y_path)?;
    if y.len() != a.rows() {
        return Err(CliError::usage(format!(
            "{} is {}x{} but {} has {} entries",
            a_path.display(),
            a.rows(),
            a.cols(),
            y_path.display(),
            y.len()
        )));
    }
    ensure_out_dir(&cfg.out_dir)?;
    let case = cfg.cases[0];
    let k = (cfg.sparsity_level * a.cols() as f64 + 0.5).floor() as usize;
    let base = SolverConfig {
        mu: case.mu,
        sparsity_k: k.max(1),
        tol: cfg.tol,
        max_iters: cfg.max_iters,
        init_mode: cfg.iiht_init,
        step_rule: cfg.iiht_step_rule,
    };
    let result: SolveResult = match solver {
        SolverKind::Direct => {
            let x = direct_recover(&a, &y)?;
            io::write_signal_bin(&cfg.out_dir.join("x.bin"), &x)?;
            println!("wrote {}", cfg.out_dir.join("x.bin").display());
            return Ok(());
        }
        SolverKind::Iiht => iiht_solve(&a, &y, &base)?,
        SolverKind::Iht => {
            let c = SolverConfig { step_rule: StepRule::FixedTau(cfg.iht_tau), ..base };
            iht_solve(&a, &y, &c)?
        }
        SolverKind::Cosamp => cosamp_solve(&a, &y, &base)?,
        SolverKind::Ist => {
            return Err(CliError::usage(
                "ist needs the ground-truth l1 norm as an oracle and cannot run on external files",
            ))
        }
    };
    log_trace(&result.trace);
    io::write_signal_bin(&cfg.out_dir.join("x.bin"), &result.x_final)?;
    let trace_path = cfg.out_dir.join("trace.csv");
    std::fs::write(&trace_path, trace_csv(&result.trace))
        .map_err(|e| CliError::io(format!("{}: {e}", trace_path.display())))?;
    println!(
        "{} iterations, wrote {} and {}",
        result.iterations,
        cfg.out_dir.join("x.bin").display(),
        trace_path.display()
    );
    Ok(())
}

/// `gen`: generates one synthetic problem and persists every component.
pub fn cmd_gen(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    ensure_out_dir(&cfg.out_dir)?;
    let case = cfg.cases[0];
    let spec = ProblemSpec {
        n: cfg.n,
        sampling_ratio: cfg.sampling_ratio,
        sparsity_level: cfg.sparsity_level,
        noise_sigma: case.sigma,
        seed: cfg.seeds[0],
        scale: cfg.matrix_scale,
    };
    let problem = generate_problem(&spec)?;
    let files: [(&str, PathBuf); 4] = [
        ("a", cfg.out_dir.join("a.bin")),
        ("y", cfg.out_dir.join("y.bin")),
        ("y_clean", cfg.out_dir.join("y_clean.bin")),
        ("x_true", cfg.out_dir.join("x_true.bin")),
    ];
    io::write_matrix_bin(&files[0].1, &problem.a)?;
    io::write_vector_bin(&files[1].1, &problem.y)?;
    io::write_vector_bin(&files[2].1, &problem.y_clean)?;
    io::write_signal_bin(&files[3].1, &problem.x_true)?;
    for (_, path) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}
