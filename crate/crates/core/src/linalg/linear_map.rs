use serde::{Deserialize, Serialize};

use super::matrix::{axpy, dot, norm2, DenseMatrix, DenseVector};
use crate::error::{FalcError, Result};
use crate::rng::SplitMix64;

/// Linear operator from m×n matrices to vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearMap {
    Zero {
        in_shape: (usize, usize),
    },
    /// X ↦ vec(X), columns stacked.
    Vectorize {
        in_shape: (usize, usize),
    },
    /// X ↦ (X_ij) for (i, j) in the index list, in list order.
    Sampling {
        in_shape: (usize, usize),
        indices: Vec<(usize, usize)>,
    },
    /// X ↦ A vec(X) for an explicit q × mn matrix.
    Dense {
        in_shape: (usize, usize),
        matrix: DenseMatrix,
    },
    Scaled {
        inner: Box<LinearMap>,
        factor: f64,
    },
}

impl LinearMap {
    pub fn zero(m: usize, n: usize) -> Self {
        LinearMap::Zero { in_shape: (m, n) }
    }

    pub fn vectorize(m: usize, n: usize) -> Self {
        LinearMap::Vectorize { in_shape: (m, n) }
    }

    pub fn sampling(m: usize, n: usize, indices: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(i, j)) = indices.iter().find(|&&(i, j)| i >= m || j >= n) {
            return Err(FalcError::Shape(format!(
                "sample index ({i}, {j}) outside {m}x{n}"
            )));
        }
        Ok(LinearMap::Sampling {
            in_shape: (m, n),
            indices,
        })
    }

    pub fn dense(m: usize, n: usize, matrix: DenseMatrix) -> Result<Self> {
        if matrix.cols() != m * n {
            return Err(FalcError::Shape(format!(
                "operator matrix has {} columns, expected {}",
                matrix.cols(),
                m * n
            )));
        }
        if !matrix.is_finite() {
            return Err(FalcError::NonFinite("operator matrix".into()));
        }
        Ok(LinearMap::Dense {
            in_shape: (m, n),
            matrix,
        })
    }

    pub fn scaled(inner: LinearMap, factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(FalcError::NonFinite("operator scale".into()));
        }
        Ok(LinearMap::Scaled {
            inner: Box::new(inner),
            factor,
        })
    }

    pub fn in_shape(&self) -> (usize, usize) {
        match self {
            LinearMap::Zero { in_shape }
            | LinearMap::Vectorize { in_shape }
            | LinearMap::Sampling { in_shape, .. }
            | LinearMap::Dense { in_shape, .. } => *in_shape,
            LinearMap::Scaled { inner, .. } => inner.in_shape(),
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            LinearMap::Zero { .. } => 0,
            LinearMap::Vectorize { in_shape } => in_shape.0 * in_shape.1,
            LinearMap::Sampling { indices, .. } => indices.len(),
            LinearMap::Dense { matrix, .. } => matrix.rows(),
            LinearMap::Scaled { inner, .. } => inner.out_dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            LinearMap::Zero { .. } => true,
            LinearMap::Scaled { inner, factor } => *factor == 0.0 || inner.is_zero(),
            _ => false,
        }
    }

    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseVector> {
        if x.shape() != self.in_shape() {
            return Err(FalcError::Shape(format!(
                "operator expects {:?}, got {:?}",
                self.in_shape(),
                x.shape()
            )));
        }
        Ok(DenseVector::from_vec_unchecked(self.apply_slice(x.as_slice())))
    }

    pub fn adjoint(&self, z: &DenseVector) -> Result<DenseMatrix> {
        if z.len() != self.out_dim() {
            return Err(FalcError::Shape(format!(
                "adjoint expects length {}, got {}",
                self.out_dim(),
                z.len()
            )));
        }
        let (m, n) = self.in_shape();
        let mut out = vec![0.0; m * n];
        self.adjoint_add(z.as_slice(), 1.0, &mut out);
        Ok(DenseMatrix::from_col_major_unchecked(m, n, out))
    }

    /// L(x) on column-major data; no shape checks.
    pub(crate) fn apply_slice(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Zero { .. } => Vec::new(),
            LinearMap::Vectorize { .. } => x.to_vec(),
            LinearMap::Sampling { in_shape, indices } => {
                indices.iter().map(|&(i, j)| x[j * in_shape.0 + i]).collect()
            }
            LinearMap::Dense { matrix, .. } => {
                let mut out = vec![0.0; matrix.rows()];
                for (k, &xk) in x.iter().enumerate() {
                    if xk != 0.0 {
                        axpy(&mut out, xk, matrix.col(k));
                    }
                }
                out
            }
            LinearMap::Scaled { inner, factor } => {
                let mut v = inner.apply_slice(x);
                v.iter_mut().for_each(|e| *e *= factor);
                v
            }
        }
    }

    /// out += c · L*(z); no shape checks.
    pub(crate) fn adjoint_add(&self, z: &[f64], c: f64, out: &mut [f64]) {
        match self {
            LinearMap::Zero { .. } => {}
            LinearMap::Vectorize { .. } => axpy(out, c, z),
            LinearMap::Sampling { in_shape, indices } => {
                for (&(i, j), &zk) in indices.iter().zip(z) {
                    out[j * in_shape.0 + i] += c * zk;
                }
            }
            LinearMap::Dense { matrix, .. } => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * dot(matrix.col(k), z);
                }
            }
            LinearMap::Scaled { inner, factor } => inner.adjoint_add(z, c * factor, out),
        }
    }

    /// Explicit q × mn matrix of the operator.
    pub fn to_dense(&self) -> DenseMatrix {
        let (m, n) = self.in_shape();
        let mut e = vec![0.0; m * n];
        let mut out = DenseMatrix::zeros(self.out_dim(), m * n);
        for k in 0..m * n {
            e[k] = 1.0;
            let col = self.apply_slice(&e);
            out.col_mut(k).copy_from_slice(&col);
            e[k] = 0.0;
        }
        out
    }
}

/// One block row of the stacked operator M: `[I_s | I_y | L]`, where the
/// identity columns are present only for the slacks the block carries.
#[derive(Debug, Clone, Copy)]
pub struct StackedRow<'a> {
    pub map: &'a LinearMap,
    pub beta_slack: bool,
    pub gamma_slack: bool,
}

const POWER_TOL: f64 = 1e-8;
const POWER_MAX_ITERS: usize = 20_000;

/// σ_max of the stacked matrix M by power iteration on MᵀM.
pub fn sigma_max_stacked(rows: &[StackedRow<'_>]) -> Result<f64> {
    let Some(first) = rows.first() else {
        return Err(FalcError::InvalidArgument("no operator rows".into()));
    };
    let (m, n) = first.map.in_shape();
    if rows.iter().any(|r| r.map.in_shape() != (m, n)) {
        return Err(FalcError::Shape("operator rows disagree on input shape".into()));
    }
    // z = (x, then per row: s part, y part)
    let mut offsets = Vec::with_capacity(rows.len());
    let mut len = m * n;
    for r in rows {
        let q = r.map.out_dim();
        let s_off = len;
        if r.beta_slack {
            len += q;
        }
        let y_off = len;
        if r.gamma_slack {
            len += q;
        }
        offsets.push((s_off, y_off));
    }
    if len == 0 {
        return Ok(0.0);
    }

    let mtm = |z: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (r, &(s_off, y_off)) in rows.iter().zip(&offsets) {
            let q = r.map.out_dim();
            let mut mz = r.map.apply_slice(&z[..m * n]);
            if r.beta_slack {
                axpy(&mut mz, 1.0, &z[s_off..s_off + q]);
            }
            if r.gamma_slack {
                axpy(&mut mz, 1.0, &z[y_off..y_off + q]);
            }
            r.map.adjoint_add(&mz, 1.0, &mut out[..m * n]);
            if r.beta_slack {
                out[s_off..s_off + q].copy_from_slice(&mz);
            }
            if r.gamma_slack {
                out[y_off..y_off + q].copy_from_slice(&mz);
            }
        }
    };

    let mut rng = SplitMix64::new(0x9a11_0c0d);
    let mut z: Vec<f64> = (0..len).map(|_| rng.gaussian()).collect();
    let nz = norm2(&z);
    z.iter_mut().for_each(|v| *v /= nz);
    let mut w = vec![0.0; len];
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        mtm(&z, &mut w);
        lambda = dot(&z, &w);
        let resid = w
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        if resid <= POWER_TOL * lambda {
            break;
        }
        for (zi, wi) in z.iter_mut().zip(&w) {
            *zi = wi / nw;
        }
    }
    Ok(lambda.max(0.0).sqrt())
}
