//! Run configuration: a JSON document that flags can override.
//!
//! ```json
//! {
//!   "command": "bench",
//!   "problem": { "preset": "robust_pca", "n": 200 },
//!   "solver": { "c_lambda": 0.4, "max_outer": 60 },
//!   "seeds": [1, 2, 3],
//!   "output": "out/rpca200",
//!   "format": "csv",
//!   "trials": 10
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use falc::problems::{InstanceMeta, InstanceParams, NoiseModel};
use falc::{Schedule, SolverParams};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Generate,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn default_frac() -> f64 {
    0.05
}

fn default_rho() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// D = X₀ + S₀ from the random generator, μ2 = 1/√n unless given.
    RobustPca {
        n: usize,
        #[serde(default = "default_frac")]
        rank_frac: f64,
        #[serde(default = "default_frac")]
        sparse_frac: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu2: Option<f64>,
    },
    /// D = X₀ + S₀ + Y₀ with ‖Y₀‖∞ ≤ ρ; the solve uses the same ρ.
    StablePcp {
        n: usize,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_frac")]
        rank_frac: f64,
        #[serde(default = "default_frac")]
        sparse_frac: f64,
        #[serde(default)]
        noise: NoiseModel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu2: Option<f64>,
    },
    /// Planted rank-r m×n matrix observed on a random fraction of entries.
    MatrixCompletion {
        m: usize,
        n: usize,
        rank: usize,
        sample_frac: f64,
    },
    /// Planted s-sparse signal of length n with q Gaussian measurements.
    BasisPursuit {
        n: usize,
        sparsity: usize,
        measurements: usize,
    },
    /// An instance directory written by `generate`.
    Instance {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu2: Option<f64>,
    },
    /// A serialized problem specification (JSON).
    Spec { path: PathBuf },
}

impl ProblemConfig {
    pub fn preset(name: &str, n: usize) -> Result<Self, CliError> {
        Ok(match name {
            "robust_pca" => Self::RobustPca {
                n,
                rank_frac: default_frac(),
                sparse_frac: default_frac(),
                mu2: None,
            },
            "stable_pcp" => Self::StablePcp {
                n,
                rho: default_rho(),
                rank_frac: default_frac(),
                sparse_frac: default_frac(),
                noise: NoiseModel::Uniform,
                mu2: None,
            },
            "matrix_completion" => Self::MatrixCompletion {
                m: n,
                n,
                rank: (n / 10).max(1),
                sample_frac: 0.6,
            },
            "basis_pursuit" => Self::BasisPursuit {
                n,
                sparsity: (n / 32).max(1),
                measurements: (n * 5 / 16).max(1),
            },
            other => {
                return Err(CliError::Config(format!(
                    "unknown preset '{other}' (expected robust_pca, stable_pcp, matrix_completion or basis_pursuit)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RobustPca { .. } => "robust_pca",
            Self::StablePcp { .. } => "stable_pcp",
            Self::MatrixCompletion { .. } => "matrix_completion",
            Self::BasisPursuit { .. } => "basis_pursuit",
            Self::Instance { .. } => "instance",
            Self::Spec { .. } => "spec",
        }
    }

    fn set_n(&mut self, value: usize) -> Result<(), CliError> {
        match self {
            Self::RobustPca { n, .. } | Self::StablePcp { n, .. } | Self::BasisPursuit { n, .. } => *n = value,
            Self::MatrixCompletion { m, n, .. } => {
                *m = value;
                *n = value;
            }
            _ => return Err(CliError::Config(format!("--n does not apply to preset {}", self.name()))),
        }
        Ok(())
    }

    /// Generator parameters for the decomposition presets.
    pub fn instance_params(&self, seed: u64) -> Option<InstanceParams> {
        match *self {
            Self::RobustPca {
                n,
                rank_frac,
                sparse_frac,
                ..
            } => Some(InstanceParams {
                n,
                rank_frac,
                sparse_frac,
                rho_noise: 0.0,
                seed,
                noise: NoiseModel::Uniform,
            }),
            Self::StablePcp {
                n,
                rho,
                rank_frac,
                sparse_frac,
                noise,
                ..
            } => Some(InstanceParams {
                n,
                rank_frac,
                sparse_frac,
                rho_noise: rho,
                seed,
                noise,
            }),
            _ => None,
        }
    }

    /// Solver settings the preset starts from before overrides.
    pub fn base_params(&self) -> Result<SolverParams, CliError> {
        Ok(match self {
            Self::StablePcp { .. } => SolverParams::stable_pcp(),
            Self::Instance { path, .. } => {
                let meta = fs::read_to_string(path.join("meta.json"))
                    .map_err(|e| CliError::io("cannot read instance meta.json", e))?;
                let meta: InstanceMeta =
                    serde_json::from_str(&meta).map_err(|e| CliError::io("bad instance meta.json", e))?;
                if meta.rho_noise > 0.0 {
                    SolverParams::stable_pcp()
                } else {
                    SolverParams::default()
                }
            }
            Self::MatrixCompletion { .. } => SolverParams::matrix_completion(),
            Self::BasisPursuit { .. } => SolverParams::basis_pursuit(),
            _ => SolverParams::default(),
        })
    }
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

fn default_output() -> PathBuf {
    PathBuf::from("falc-out")
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemConfig,
    /// Field overrides applied on top of the preset's solver settings.
    #[serde(default)]
    pub solver: Map<String, Value>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub problem: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub trials: Option<usize>,
    pub schedule: Option<ScheduleFlag>,
    pub nu: Option<f64>,
    pub c_lambda: Option<f64>,
    pub max_outer: Option<usize>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScheduleFlag {
    Adaptive,
    Geometric,
}

const DEFAULT_NU: f64 = 0.4;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds a config from a file (if any) and flags; `command` wins over
    /// the file's command.
    pub fn resolve(command: Command, file: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match file {
            Some(p) => Self::load(p)?,
            None => {
                let name = o.problem.as_deref().ok_or_else(|| {
                    CliError::Config("either --config or --problem is required".into())
                })?;
                let n = o
                    .n
                    .ok_or_else(|| CliError::Config("--n is required with --problem".into()))?;
                Self {
                    command,
                    problem: ProblemConfig::preset(name, n)?,
                    solver: Map::new(),
                    seeds: default_seeds(),
                    output: default_output(),
                    format: Format::default(),
                    trials: default_trials(),
                }
            }
        };
        cfg.command = command;
        if file.is_some() {
            if let Some(name) = &o.problem {
                let n = match (o.n, &cfg.problem) {
                    (Some(n), _) => n,
                    (None, ProblemConfig::RobustPca { n, .. })
                    | (None, ProblemConfig::StablePcp { n, .. })
                    | (None, ProblemConfig::BasisPursuit { n, .. })
                    | (None, ProblemConfig::MatrixCompletion { n, .. }) => *n,
                    (None, _) => return Err(CliError::Config("--n is required with --problem".into())),
                };
                cfg.problem = ProblemConfig::preset(name, n)?;
            } else if let Some(n) = o.n {
                cfg.problem.set_n(n)?;
            }
        }
        if let Some(seed) = o.seed {
            cfg.seeds = vec![seed];
        }
        if let Some(out) = &o.output {
            cfg.output = out.clone();
        }
        if let Some(t) = o.trials {
            cfg.trials = t;
        }
        if let Some(f) = o.format {
            cfg.format = f;
        }
        if let Some(c) = o.c_lambda {
            cfg.solver.insert("c_lambda".into(), c.into());
        }
        if let Some(k) = o.max_outer {
            cfg.solver.insert("max_outer".into(), k.into());
        }
        match (o.schedule, o.nu) {
            (Some(ScheduleFlag::Adaptive), Some(_)) => {
                return Err(CliError::Config("--nu only applies to --schedule geometric".into()))
            }
            (Some(ScheduleFlag::Adaptive), None) => {
                cfg.solver.insert("schedule".into(), serde_json::to_value(Schedule::Adaptive).unwrap());
            }
            (Some(ScheduleFlag::Geometric), nu) | (None, nu @ Some(_)) => {
                let s = Schedule::Geometric {
                    nu: nu.unwrap_or(DEFAULT_NU),
                    b_x: None,
                };
                cfg.solver.insert("schedule".into(), serde_json::to_value(s).unwrap());
            }
            (None, None) => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("seeds must not be empty".into()));
        }
        match &self.problem {
            ProblemConfig::Instance { path, .. } | ProblemConfig::Spec { path } => {
                if !path.exists() {
                    return Err(CliError::Config(format!("{} does not exist", path.display())));
                }
            }
            _ => {}
        }
        self.solver_params()?;
        Ok(())
    }

    /// Preset settings with the `solver` overrides applied.
    pub fn solver_params(&self) -> Result<SolverParams, CliError> {
        let mut base = match serde_json::to_value(self.problem.base_params()?).unwrap() {
            Value::Object(m) => m,
            _ => unreachable!("solver params serialize to an object"),
        };
        for (k, v) in &self.solver {
            if !base.contains_key(k) {
                return Err(CliError::Config(format!("unknown solver setting '{k}'")));
            }
            base.insert(k.clone(), v.clone());
        }
        let p: SolverParams = serde_json::from_value(Value::Object(base))
            .map_err(|e| CliError::Config(format!("bad solver settings: {e}")))?;
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// One seed per trial: the listed seeds first, then consecutive values
    /// after the last one listed.
    pub fn trial_seeds(&self) -> Vec<u64> {
        let last = *self.seeds.last().unwrap_or(&0);
        (0..self.trials)
            .map(|i| match self.seeds.get(i) {
                Some(&s) => s,
                None => last.wrapping_add((i + 1 - self.seeds.len()) as u64),
            })
            .collect()
    }
}
