//! Turns a problem config into a specification plus whatever ground truth
//! the generator planted, and scores a report against that truth.

use std::fs;

use falc::linalg::DenseMatrix;
use falc::problems::{
    compute_metrics, estimate_rank, generate_instance, load_instance, planted_completion, planted_sparse,
    presets, GroundTruth, MetricsRow, PlantedCompletion, PlantedSparse,
};
use falc::{ProblemSpec, SolveReport};

use crate::config::ProblemConfig;
use crate::error::CliError;

pub enum Truth {
    Decomposition(GroundTruth),
    Completion(PlantedCompletion),
    Sparse(PlantedSparse),
    Unknown,
}

pub struct Built {
    pub spec: ProblemSpec,
    pub truth: Truth,
}

fn bad(e: falc::FalcError) -> CliError {
    CliError::Config(e.to_string())
}

fn default_mu2(d: &DenseMatrix, mu2: Option<f64>) -> f64 {
    mu2.unwrap_or_else(|| 1.0 / (d.rows().max(d.cols()) as f64).sqrt())
}

pub fn build(problem: &ProblemConfig, seed: u64) -> Result<Built, CliError> {
    match problem {
        ProblemConfig::RobustPca { mu2, .. } | ProblemConfig::StablePcp { mu2, .. } => {
            let params = problem.instance_params(seed).expect("decomposition preset");
            let (truth, d) = generate_instance(&params).map_err(bad)?;
            let mu2 = default_mu2(&d, *mu2);
            let spec = if params.rho_noise > 0.0 {
                presets::stable_pcp(&d, mu2, params.rho_noise)
            } else {
                presets::robust_pca(&d, mu2)
            }
            .map_err(bad)?;
            Ok(Built {
                spec,
                truth: Truth::Decomposition(truth),
            })
        }
        &ProblemConfig::MatrixCompletion {
            m,
            n,
            rank,
            sample_frac,
        } => {
            let pc = planted_completion(m, n, rank, sample_frac, seed).map_err(bad)?;
            let spec = presets::matrix_completion(&pc.omega, &pc.values, m, n).map_err(bad)?;
            Ok(Built {
                spec,
                truth: Truth::Completion(pc),
            })
        }
        &ProblemConfig::BasisPursuit {
            n,
            sparsity,
            measurements,
        } => {
            let ps = planted_sparse(n, sparsity, measurements, seed).map_err(bad)?;
            let spec = presets::basis_pursuit(&ps.a, &ps.b).map_err(bad)?;
            Ok(Built {
                spec,
                truth: Truth::Sparse(ps),
            })
        }
        ProblemConfig::Instance { path, mu2 } => {
            let (meta, truth, d) = load_instance(path).map_err(bad)?;
            let mu2 = default_mu2(&d, *mu2);
            let spec = if meta.rho_noise > 0.0 {
                presets::stable_pcp(&d, mu2, meta.rho_noise)
            } else {
                presets::robust_pca(&d, mu2)
            }
            .map_err(bad)?;
            Ok(Built {
                spec,
                truth: Truth::Decomposition(truth),
            })
        }
        ProblemConfig::Spec { path } => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io("cannot read spec", e))?;
            let spec: ProblemSpec =
                serde_json::from_str(&text).map_err(|e| CliError::io("bad problem spec", e))?;
            spec.validate().map_err(bad)?;
            Ok(Built {
                spec,
                truth: Truth::Unknown,
            })
        }
    }
}

/// Named recovery statistics; empty when nothing was planted.
pub fn score(built: &Built, report: &SolveReport) -> Result<Vec<(String, f64)>, CliError> {
    let spec = &built.spec;
    let named = |names: &[&str], vals: &[f64]| names.iter().map(|s| s.to_string()).zip(vals.iter().copied()).collect();
    Ok(match &built.truth {
        Truth::Decomposition(t) => {
            let row = compute_metrics(report, t, spec).map_err(CliError::Solver)?;
            named(&MetricsRow::FIELDS, &row.values())
        }
        Truth::Completion(pc) => {
            let diff = report.x.sub(&pc.x0);
            let rank = estimate_rank(&report.x).map_err(CliError::Solver)?;
            named(
                &["svd_count", "rel_err_x", "rank_est", "rel_infeasibility", "cpu_seconds"],
                &[
                    report.svd_count as f64,
                    diff.frobenius_norm() / pc.x0.frobenius_norm(),
                    rank as f64,
                    report.residual_2 / pc.values.norm2(),
                    report.wall_time,
                ],
            )
        }
        Truth::Sparse(ps) => {
            let x = report
                .basis_pursuit_estimate(spec)
                .ok_or_else(|| CliError::Config("basis pursuit spec without an l1 slack".into()))?;
            let err = x.sub(&ps.x0).norm2() / ps.x0.norm2();
            let nonzero: Vec<usize> = (0..x.len()).filter(|&j| x.as_slice()[j] != 0.0).collect();
            named(
                &["rel_err_x", "support_exact", "nnz", "rel_infeasibility", "svd_count", "cpu_seconds"],
                &[
                    err,
                    if nonzero == ps.support { 1.0 } else { 0.0 },
                    nonzero.len() as f64,
                    report.residual_2 / ps.b.norm2(),
                    report.svd_count as f64,
                    report.wall_time,
                ],
            )
        }
        Truth::Unknown => Vec::new(),
    })
}
