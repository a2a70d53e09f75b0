use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::linalg::io::{load_fmat, save_fmat};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Y₀ entries ρ·U[−1, 1].
    #[default]
    Uniform,
    /// Y₀ entries ρ·N(0, 1).
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n: usize,
    pub rank_frac: f64,
    pub sparse_frac: f64,
    pub rho_noise: f64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
}

impl InstanceParams {
    /// r = 0.05n, |Λ| = 0.05n², noiseless.
    pub fn standard(n: usize, seed: u64) -> Self {
        Self {
            n,
            rank_frac: 0.05,
            sparse_frac: 0.05,
            rho_noise: 0.0,
            seed,
            noise: NoiseModel::Uniform,
        }
    }

    pub fn rank(&self) -> usize {
        frac_count(self.n, self.rank_frac)
    }

    pub fn support_size(&self) -> usize {
        frac_count(self.n * self.n, self.sparse_frac)
    }
}

// ⌊total·frac⌋ with a little slack so that 0.05·200 counts as 10
fn frac_count(total: usize, frac: f64) -> usize {
    (total as f64 * frac * (1.0 + 1e-12)).floor() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub x0: DenseMatrix,
    pub s0: DenseMatrix,
    pub y0: DenseMatrix,
    /// Nonzero pattern of S₀ as (row, col) pairs, in draw order.
    pub support: Vec<(usize, usize)>,
    pub rank_true: usize,
}

/// D = X₀ + S₀ + Y₀ with X₀ = UVᵀ (Gaussian n×r factors), S₀ uniform on a
/// random support of exact size, Y₀ dense noise of scale ρ.
pub fn generate_instance(p: &InstanceParams) -> Result<(GroundTruth, DenseMatrix)> {
    let n = p.n;
    if !(p.rank_frac > 0.0 && p.rank_frac < 1.0) || !(p.sparse_frac > 0.0 && p.sparse_frac < 1.0) {
        return Err(FalcError::InvalidArgument("fractions must lie in (0, 1)".into()));
    }
    let r = p.rank();
    if r == 0 {
        return Err(FalcError::InvalidArgument(format!(
            "n·rank_frac = {} is below 1",
            n as f64 * p.rank_frac
        )));
    }
    if !(p.rho_noise >= 0.0) || !p.rho_noise.is_finite() {
        return Err(FalcError::InvalidArgument("noise level must be finite and nonnegative".into()));
    }
    let mut rng = SplitMix64::new(p.seed);
    let mut draw = |len: usize| (0..len).map(|_| rng.gaussian()).collect::<Vec<_>>();
    let u = DenseMatrix::from_col_major(n, r, draw(n * r))?;
    let v = DenseMatrix::from_col_major(n, r, draw(n * r))?;
    let x0 = u.matmul(&v.transpose())?;

    let mut cells: Vec<usize> = (0..n * n).collect();
    rng.shuffle(&mut cells);
    let mut s0 = DenseMatrix::zeros(n, n);
    let mut support = Vec::with_capacity(p.support_size());
    for &c in &cells[..p.support_size()] {
        let val = rng.uniform(-1.0, 1.0);
        s0.as_mut_slice()[c] = val;
        support.push((c % n, c / n));
    }

    let mut y0 = DenseMatrix::zeros(n, n);
    if p.rho_noise > 0.0 {
        for e in y0.as_mut_slice() {
            *e = p.rho_noise
                * match p.noise {
                    NoiseModel::Uniform => rng.uniform(-1.0, 1.0),
                    NoiseModel::Gaussian => rng.gaussian(),
                };
        }
    }
    let d = x0.add(&s0).add(&y0);
    Ok((
        GroundTruth {
            x0,
            s0,
            y0,
            support,
            rank_true: r,
        },
        d,
    ))
}

/// Rank-r X₀ = UVᵀ (Gaussian factors, m×n) observed on a uniformly random
/// set of ⌊frac·mn⌋ entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCompletion {
    pub x0: DenseMatrix,
    pub omega: Vec<(usize, usize)>,
    pub values: DenseVector,
}

pub fn planted_completion(
    m: usize,
    n: usize,
    rank: usize,
    sample_frac: f64,
    seed: u64,
) -> Result<PlantedCompletion> {
    if rank == 0 || rank > m.min(n) {
        return Err(FalcError::InvalidArgument(format!("rank {rank} for a {m}x{n} matrix")));
    }
    if !(sample_frac > 0.0 && sample_frac <= 1.0) {
        return Err(FalcError::InvalidArgument("sample fraction must lie in (0, 1]".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut draw = |len: usize| (0..len).map(|_| rng.gaussian()).collect::<Vec<_>>();
    let u = DenseMatrix::from_col_major(m, rank, draw(m * rank))?;
    let v = DenseMatrix::from_col_major(n, rank, draw(n * rank))?;
    let x0 = u.matmul(&v.transpose())?;
    let mut cells: Vec<usize> = (0..m * n).collect();
    rng.shuffle(&mut cells);
    let count = frac_count(m * n, sample_frac).max(1);
    let mut picked = cells[..count].to_vec();
    picked.sort_unstable();
    let omega: Vec<(usize, usize)> = picked.iter().map(|&c| (c % m, c / m)).collect();
    let values = DenseVector::from_vec(picked.iter().map(|&c| x0.as_slice()[c]).collect())?;
    Ok(PlantedCompletion { x0, omega, values })
}

/// An s-sparse x₀ ∈ ℝⁿ with Gaussian nonzeros measured by a q×n Gaussian
/// matrix with N(0, 1/q) entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedSparse {
    pub a: DenseMatrix,
    pub b: DenseVector,
    pub x0: DenseVector,
    /// Sorted support of x₀.
    pub support: Vec<usize>,
}

pub fn planted_sparse(n: usize, sparsity: usize, measurements: usize, seed: u64) -> Result<PlantedSparse> {
    if sparsity == 0 || sparsity > n || measurements == 0 {
        return Err(FalcError::InvalidArgument(format!(
            "sparsity {sparsity}, length {n}, measurements {measurements}"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let scale = 1.0 / (measurements as f64).sqrt();
    let a_data: Vec<f64> = (0..measurements * n).map(|_| scale * rng.gaussian()).collect();
    let a = DenseMatrix::from_col_major(measurements, n, a_data)?;
    let mut idx: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut idx);
    let mut support = idx[..sparsity].to_vec();
    support.sort_unstable();
    let mut x = vec![0.0; n];
    for &j in &support {
        x[j] = rng.gaussian();
    }
    let b = DenseVector::from_vec(a.matvec(&x)?)?;
    Ok(PlantedSparse {
        a,
        b,
        x0: DenseVector::from_vec(x)?,
        support,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: usize,
    pub r: usize,
    pub support_size: usize,
    pub rho_noise: f64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseModel,
    pub support: Vec<(usize, usize)>,
}

/// Writes D.fmat, X0.fmat, S0.fmat, Y0.fmat and meta.json into `dir`.
pub fn save_instance(
    dir: impl AsRef<Path>,
    params: &InstanceParams,
    truth: &GroundTruth,
    d: &DenseMatrix,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    save_fmat(dir.join("D.fmat"), d)?;
    save_fmat(dir.join("X0.fmat"), &truth.x0)?;
    save_fmat(dir.join("S0.fmat"), &truth.s0)?;
    save_fmat(dir.join("Y0.fmat"), &truth.y0)?;
    let meta = InstanceMeta {
        n: params.n,
        r: truth.rank_true,
        support_size: truth.support.len(),
        rho_noise: params.rho_noise,
        seed: params.seed,
        noise: params.noise,
        support: truth.support.clone(),
    };
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load_instance(dir: impl AsRef<Path>) -> Result<(InstanceMeta, GroundTruth, DenseMatrix)> {
    let dir = dir.as_ref();
    let meta: InstanceMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    let d = load_fmat(dir.join("D.fmat"))?;
    let truth = GroundTruth {
        x0: load_fmat(dir.join("X0.fmat"))?,
        s0: load_fmat(dir.join("S0.fmat"))?,
        y0: load_fmat(dir.join("Y0.fmat"))?,
        support: meta.support.clone(),
        rank_true: meta.r,
    };
    for (name, a) in [("X0", &truth.x0), ("S0", &truth.s0), ("Y0", &truth.y0)] {
        if a.shape() != d.shape() {
            return Err(FalcError::Format(format!(
                "{name} is {:?} but D is {:?}",
                a.shape(),
                d.shape()
            )));
        }
    }
    if meta.support.len() != meta.support_size {
        return Err(FalcError::Format("support list length disagrees with support_size".into()));
    }
    Ok((meta, truth, d))
}
