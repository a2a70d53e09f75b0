use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::linalg::{svd_full, DenseMatrix};
use crate::outer::SolveReport;

use super::generator::GroundTruth;
use super::spec::ProblemSpec;

/// Recovery statistics of a low-rank plus sparse decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub svd_count: f64,
    /// ‖X − X₀‖_F/‖X₀‖_F
    pub rel_err_x: f64,
    /// ‖S − S₀‖_F/‖S₀‖_F
    pub rel_err_s: f64,
    /// |‖X‖_* − ‖X₀‖_*|/‖X₀‖_*
    pub rel_nuclear_gap: f64,
    /// max |σ_i − σ⁰_i| over σ⁰_i > 0
    pub max_sv_err_on_support: f64,
    /// max σ_i over σ⁰_i = 0
    pub max_sv_on_zero_svs: f64,
    /// |‖vec S‖₁ − ‖vec S₀‖₁|/‖vec S₀‖₁
    pub rel_l1_gap: f64,
    /// max |S_ij − (S₀)_ij| over (S₀)_ij ≠ 0
    pub max_s_err_on_support: f64,
    /// max |S_ij| over (S₀)_ij = 0
    pub max_s_on_zero_set: f64,
    pub rank_est: f64,
    /// ‖X + S − D‖_F/‖D‖_F
    pub rel_infeasibility: f64,
    pub cpu_seconds: f64,
}

impl MetricsRow {
    pub const FIELDS: [&'static str; 12] = [
        "svd_count",
        "rel_err_x",
        "rel_err_s",
        "rel_nuclear_gap",
        "max_sv_err_on_support",
        "max_sv_on_zero_svs",
        "rel_l1_gap",
        "max_s_err_on_support",
        "max_s_on_zero_set",
        "rank_est",
        "rel_infeasibility",
        "cpu_seconds",
    ];

    pub fn values(&self) -> [f64; 12] {
        [
            self.svd_count,
            self.rel_err_x,
            self.rel_err_s,
            self.rel_nuclear_gap,
            self.max_sv_err_on_support,
            self.max_sv_on_zero_svs,
            self.rel_l1_gap,
            self.max_s_err_on_support,
            self.max_s_on_zero_set,
            self.rank_est,
            self.rel_infeasibility,
            self.cpu_seconds,
        ]
    }

    pub fn from_values(v: [f64; 12]) -> Self {
        Self {
            svd_count: v[0],
            rel_err_x: v[1],
            rel_err_s: v[2],
            rel_nuclear_gap: v[3],
            max_sv_err_on_support: v[4],
            max_sv_on_zero_svs: v[5],
            rel_l1_gap: v[6],
            max_s_err_on_support: v[7],
            max_s_on_zero_set: v[8],
            rank_est: v[9],
            rel_infeasibility: v[10],
            cpu_seconds: v[11],
        }
    }
}

fn rel(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Metrics for an (X, S) pair against the planted decomposition; `d` is the
/// data matrix the pair should reproduce.
pub fn decomposition_metrics(
    x: &DenseMatrix,
    s: &DenseMatrix,
    d: &DenseMatrix,
    truth: &GroundTruth,
    svd_count: usize,
    cpu_seconds: f64,
) -> Result<MetricsRow> {
    for (name, a) in [("X", x), ("S", s), ("X0", &truth.x0), ("S0", &truth.s0)] {
        if a.shape() != d.shape() {
            return Err(FalcError::Shape(format!("{name} is {:?}, D is {:?}", a.shape(), d.shape())));
        }
    }
    let sv = svd_full(x)?.singular_values.into_vec();
    let sv0 = svd_full(&truth.x0)?.singular_values.into_vec();
    let r0 = truth.rank_true.min(sv0.len());
    let nuc: f64 = sv.iter().sum();
    let nuc0: f64 = sv0.iter().sum();
    let max_sv_err = sv[..r0]
        .iter()
        .zip(&sv0[..r0])
        .fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
    let max_sv_zero = sv[r0..].iter().fold(0.0f64, |a, v| a.max(*v));

    let (mut l1, mut l10, mut err_on, mut on_zero) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (&v, &v0) in s.as_slice().iter().zip(truth.s0.as_slice()) {
        l1 += v.abs();
        l10 += v0.abs();
        if v0 != 0.0 {
            err_on = err_on.max((v - v0).abs());
        } else {
            on_zero = on_zero.max(v.abs());
        }
    }

    Ok(MetricsRow {
        svd_count: svd_count as f64,
        rel_err_x: rel(x.sub(&truth.x0).frobenius_norm(), truth.x0.frobenius_norm()),
        rel_err_s: rel(s.sub(&truth.s0).frobenius_norm(), truth.s0.frobenius_norm()),
        rel_nuclear_gap: rel((nuc - nuc0).abs(), nuc0),
        max_sv_err_on_support: max_sv_err,
        max_sv_on_zero_svs: max_sv_zero,
        rel_l1_gap: rel((l1 - l10).abs(), l10),
        max_s_err_on_support: err_on,
        max_s_on_zero_set: on_zero,
        rank_est: rank_from_spectrum(&sv, x.rows().max(x.cols())) as f64,
        rel_infeasibility: rel(x.add(s).sub(d).frobenius_norm(), d.frobenius_norm()),
        cpu_seconds,
    })
}

/// Metrics of a robust PCA or stable PCP solve; S is the first block's slack.
pub fn compute_metrics(report: &SolveReport, truth: &GroundTruth, spec: &ProblemSpec) -> Result<MetricsRow> {
    let block = spec
        .blocks
        .first()
        .ok_or_else(|| FalcError::InvalidSpec("no blocks".into()))?;
    let s = report
        .block_s(spec, 0)
        .ok_or_else(|| FalcError::InvalidSpec("first block carries no sparse slack".into()))?
        .to_matrix(spec.m, spec.n)?;
    let d = block.rhs.to_matrix(spec.m, spec.n)?;
    decomposition_metrics(&report.x, &s, &d, truth, report.svd_count, report.wall_time)
}

/// Numerical rank: σ_i > max(m, n)·ε·σ_max, cut further at the last
/// relative gap σ_{i+1}/σ_i < 1e-3 inside that range. A heuristic.
pub fn estimate_rank(x: &DenseMatrix) -> Result<usize> {
    if x.as_slice().iter().all(|v| *v == 0.0) {
        return Ok(0);
    }
    let sv = svd_full(x)?.singular_values.into_vec();
    Ok(rank_from_spectrum(&sv, x.rows().max(x.cols())))
}

fn rank_from_spectrum(sv: &[f64], dim: usize) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return 0;
    }
    let tol = dim as f64 * f64::EPSILON * top;
    let count = sv.iter().take_while(|v| **v > tol).count();
    (1..count)
        .rev()
        .find(|&i| sv[i] / sv[i - 1] < 1e-3)
        .unwrap_or(count)
}
