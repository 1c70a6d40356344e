//! Run configuration: defaults, config-file parsing and flag overrides.
//!
//! The config file is a flat `key = value` format with one optional section
//! per solver, chosen so experiment configs diff cleanly in logs:
//!
//! ```text
//! # global problem and protocol keys
//! n = 4096
//! sigma = 0.1, 0.2        # one benchmark case per entry
//! mu = 350, 170           # paired with sigma, same length
//! seeds = 0,1,2,3,4,5,6,7,8,9
//! parallel = 1
//!
//! [iiht]
//! step_rule = adaptive    # adaptive | fixed:<tau> | safe:<delta>
//! init = adjoint          # zero | adjoint
//!
//! [iht]
//! tau = 0.5
//!
//! [ist]
//! tau = 0.3
//! ```
//!
//! Unknown keys and sections are errors, not warnings. Command-line flags
//! override file values.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use l0recov_core::problem::MatrixScale;
use l0recov_core::solvers::{InitMode, StepRule};

use crate::error::CliError;

/// The five benchmarked methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Direct,
    Iiht,
    Iht,
    Ist,
    Cosamp,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Direct,
        SolverKind::Ist,
        SolverKind::Cosamp,
        SolverKind::Iht,
        SolverKind::Iiht,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Direct => "measurement",
            SolverKind::Iiht => "iiht",
            SolverKind::Iht => "iht",
            SolverKind::Ist => "ist",
            SolverKind::Cosamp => "cosamp",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "measurement" | "direct" => Ok(SolverKind::Direct),
            "iiht" => Ok(SolverKind::Iiht),
            "iht" => Ok(SolverKind::Iht),
            "ist" => Ok(SolverKind::Ist),
            "cosamp" => Ok(SolverKind::Cosamp),
            other => Err(CliError::usage(format!(
                "unknown solver '{other}' (expected measurement, iiht, iht, ist or cosamp)"
            ))),
        }
    }
}

/// One benchmark case: a noise level and its penalty weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Case {
    pub sigma: f64,
    pub mu: f64,
}

/// Full configuration of a command run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub sampling_ratio: f64,
    pub sparsity_level: f64,
    pub cases: Vec<Case>,
    pub tol: f64,
    pub max_iters: usize,
    pub seeds: Vec<u64>,
    pub parallel: usize,
    pub out_dir: PathBuf,
    pub solvers: Vec<SolverKind>,
    /// When false, wall times are reported as 0 so output files are
    /// byte-reproducible.
    pub timing: bool,
    pub matrix_scale: MatrixScale,
    pub iiht_step_rule: StepRule,
    pub iiht_init: InitMode,
    pub iht_tau: f64,
    pub ist_tau: f64,
    /// Phantom image side length and exact pixel sparsity.
    pub side: usize,
    pub target_nnz: usize,
}

impl RunConfig {
    /// Benchmark defaults: the vector experiment protocol.
    pub fn default_bench() -> Self {
        RunConfig {
            n: 1024,
            sampling_ratio: 0.35,
            sparsity_level: 0.05,
            cases: vec![Case { sigma: 0.1, mu: 350.0 }],
            tol: 1e-5,
            max_iters: 100,
            seeds: (0..10).collect(),
            parallel: 1,
            out_dir: PathBuf::from("out"),
            solvers: SolverKind::ALL.to_vec(),
            timing: true,
            matrix_scale: MatrixScale::InverseSqrtM,
            iiht_step_rule: StepRule::PaperAdaptive,
            iiht_init: InitMode::AdjointMeasurement,
            iht_tau: 0.5,
            ist_tau: 0.3,
            side: 128,
            target_nnz: 1282,
        }
    }

    /// Phantom study defaults: mu = 2^8, sigma = 8%, 800 iterations.
    pub fn default_phantom() -> Self {
        RunConfig {
            cases: vec![Case { sigma: 0.08, mu: 256.0 }],
            max_iters: 800,
            seeds: vec![0],
            ..RunConfig::default_bench()
        }
    }

    /// Theorem verification defaults: x0 = 0 and a guaranteed-regime step.
    pub fn default_verify() -> Self {
        RunConfig {
            cases: vec![Case { sigma: 0.0, mu: 150.0 }, Case { sigma: 0.1, mu: 150.0 }],
            max_iters: 300,
            seeds: (0..5).collect(),
            iiht_init: InitMode::Zero,
            ..RunConfig::default_bench()
        }
    }

    /// Applies a config file on top of the defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        self.apply_config_text(&text, &path.display().to_string())
    }

    /// Parses the flat key = value format described in the module docs.
    pub fn apply_config_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        let mut section = String::new();
        let known_sections: BTreeSet<&str> = ["", "iiht", "iht", "ist", "cosamp"].into();
        let mut sigmas: Option<Vec<f64>> = None;
        let mut mus: Option<Vec<f64>> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| {
                CliError::usage(format!("{origin}:{}: {msg}", lineno + 1))
            };
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                if !known_sections.contains(section.as_str()) {
                    return Err(err(format!("unknown section [{section}]")));
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            let full_key = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            match full_key.as_str() {
                "n" => self.n = parse_num(value).map_err(err)?,
                "sr" => self.sampling_ratio = parse_num(value).map_err(err)?,
                "sl" => self.sparsity_level = parse_num(value).map_err(err)?,
                "sigma" => sigmas = Some(parse_list(value).map_err(err)?),
                "mu" => mus = Some(parse_list(value).map_err(err)?),
                "tol" => self.tol = parse_num(value).map_err(err)?,
                "max_iters" => self.max_iters = parse_num(value).map_err(err)?,
                "seeds" => {
                    self.seeds = parse_list::<u64>(value).map_err(err)?;
                }
                "parallel" => self.parallel = parse_num(value).map_err(err)?,
                "out" => self.out_dir = PathBuf::from(value),
                "solvers" => {
                    self.solvers = value
                        .split(',')
                        .map(SolverKind::parse)
                        .collect::<Result<_, _>>()?;
                }
                "timing" => {
                    self.timing = parse_on_off(value).map_err(err)?;
                }
                "matrix_scale" => {
                    self.matrix_scale = match value {
                        "unit_columns" => MatrixScale::InverseSqrtM,
                        "raw" => MatrixScale::RawGaussian,
                        other => {
                            return Err(err(format!(
                                "matrix_scale must be unit_columns or raw, got '{other}'"
                            )))
                        }
                    };
                }
                "side" => self.side = parse_num(value).map_err(err)?,
                "target_nnz" => self.target_nnz = parse_num(value).map_err(err)?,
                "iiht.step_rule" => self.iiht_step_rule = parse_step_rule(value).map_err(err)?,
                "iiht.init" => {
                    self.iiht_init = match value {
                        "zero" => InitMode::Zero,
                        "adjoint" => InitMode::AdjointMeasurement,
                        other => {
                            return Err(err(format!(
                                "init must be zero or adjoint, got '{other}'"
                            )))
                        }
                    };
                }
                "iht.tau" => self.iht_tau = parse_num(value).map_err(err)?,
                "ist.tau" => self.ist_tau = parse_num(value).map_err(err)?,
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }

        self.merge_cases(sigmas, mus)?;
        Ok(())
    }

    /// Pairs up sigma and mu lists into benchmark cases.
    pub fn merge_cases(
        &mut self,
        sigmas: Option<Vec<f64>>,
        mus: Option<Vec<f64>>,
    ) -> Result<(), CliError> {
        match (sigmas, mus) {
            (None, None) => Ok(()),
            (Some(s), Some(m)) => {
                if s.len() != m.len() {
                    return Err(CliError::usage(format!(
                        "sigma list has {} entries but mu list has {}; they pair up one case each",
                        s.len(),
                        m.len()
                    )));
                }
                self.cases = s
                    .into_iter()
                    .zip(m)
                    .map(|(sigma, mu)| Case { sigma, mu })
                    .collect();
                Ok(())
            }
            (Some(s), None) => {
                if s.len() == 1 && self.cases.len() == 1 {
                    self.cases[0].sigma = s[0];
                    return Ok(());
                }
                Err(CliError::usage(
                    "a sigma list needs a matching mu list".to_string(),
                ))
            }
            (None, Some(m)) => {
                if m.len() == 1 && self.cases.len() == 1 {
                    self.cases[0].mu = m[0];
                    return Ok(());
                }
                Err(CliError::usage(
                    "a mu list needs a matching sigma list".to_string(),
                ))
            }
        }
    }

    /// Validates cross-field constraints before a run.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.seeds.is_empty() {
            return Err(CliError::usage("no seeds: the seed list is empty"));
        }
        if self.cases.is_empty() {
            return Err(CliError::usage("no benchmark cases configured"));
        }
        if self.solvers.is_empty() {
            return Err(CliError::usage("no solvers selected"));
        }
        if self.parallel == 0 {
            return Err(CliError::usage("parallel must be at least 1"));
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("unparseable value '{value}'"))
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, String> {
    value.split(',').map(|v| parse_num(v)).collect()
}

fn parse_on_off(value: &str) -> Result<bool, String> {
    match value {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        other => Err(format!("expected on or off, got '{other}'")),
    }
}

fn parse_step_rule(value: &str) -> Result<StepRule, String> {
    if value == "adaptive" {
        return Ok(StepRule::PaperAdaptive);
    }
    if let Some(tau) = value.strip_prefix("fixed:") {
        return Ok(StepRule::FixedTau(parse_num(tau)?));
    }
    if let Some(delta) = value.strip_prefix("safe:") {
        return Ok(StepRule::SafeBound {
            delta: parse_num(delta)?,
        });
    }
    Err(format!(
        "step_rule must be adaptive, fixed:<tau> or safe:<delta>, got '{value}'"
    ))
}
