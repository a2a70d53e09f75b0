//! One-sided Jacobi (Hestenes) SVD.

use super::matrix::{axpy, dot, norm2, DenseMatrix, DenseVector};
use crate::error::{FalcError, Result};
use crate::rng::SplitMix64;

pub const MAX_SWEEPS: usize = 60;
pub const JACOBI_TOL: f64 = 1e-14;

/// Above this dimension `svd_truncated` switches to randomized subspace iteration.
pub const TRUNCATION_CUTOFF: usize = 500;
const OVERSAMPLING: usize = 8;
const SUBSPACE_ITERS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    /// m × r, orthonormal columns.
    pub u: DenseMatrix,
    /// Length r, nonincreasing.
    pub singular_values: DenseVector,
    /// r × n, orthonormal rows.
    pub vt: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// U · diag(d) · Vᵀ for a replacement spectrum `d`.
    pub fn recompose_with(&self, d: &[f64]) -> DenseMatrix {
        assert_eq!(d.len(), self.rank());
        let (m, n) = (self.u.rows(), self.vt.cols());
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &dk) in d.iter().enumerate() {
            if dk == 0.0 {
                continue;
            }
            let uk = self.u.col(k);
            for j in 0..n {
                let c = dk * self.vt[(k, j)];
                if c != 0.0 {
                    axpy(out.col_mut(j), c, uk);
                }
            }
        }
        out
    }

    pub fn recompose(&self) -> DenseMatrix {
        self.recompose_with(self.singular_values.as_slice())
    }
}

/// Full thin SVD, r = min(m, n).
pub fn svd_full(a: &DenseMatrix) -> Result<SvdResult> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(FalcError::Shape(format!(
            "SVD of empty {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(FalcError::NonFinite("SVD input".into()));
    }
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose())?;
        Ok(SvdResult {
            u: t.vt.transpose(),
            singular_values: t.singular_values,
            vt: t.u.transpose(),
        })
    }
}

/// Top-k singular triplets.
pub fn svd_truncated(a: &DenseMatrix, k: usize) -> Result<SvdResult> {
    let r = a.rows().min(a.cols());
    if k == 0 || k > r {
        return Err(FalcError::InvalidArgument(format!(
            "truncation rank {k} outside 1..={r}"
        )));
    }
    if a.rows().max(a.cols()) < TRUNCATION_CUTOFF || k + OVERSAMPLING >= r {
        return svd_full(a).map(|s| truncate(s, k));
    }
    randomized(a, k)
}

fn truncate(s: SvdResult, k: usize) -> SvdResult {
    let m = s.u.rows();
    let n = s.vt.cols();
    let u = DenseMatrix::from_col_major_unchecked(m, k, s.u.as_slice()[..m * k].to_vec());
    let sv = DenseVector::from_vec_unchecked(s.singular_values.as_slice()[..k].to_vec());
    let mut vt = DenseMatrix::zeros(k, n);
    for j in 0..n {
        for i in 0..k {
            vt[(i, j)] = s.vt[(i, j)];
        }
    }
    SvdResult {
        u,
        singular_values: sv,
        vt,
    }
}

fn randomized(a: &DenseMatrix, k: usize) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let l = k + OVERSAMPLING;
    // fixed seed keeps the result a deterministic function of `a`
    let mut rng = SplitMix64::new(0x5eed_0f_5bd);
    let omega_data: Vec<f64> = (0..n * l).map(|_| rng.gaussian()).collect();
    let omega = DenseMatrix::from_col_major_unchecked(n, l, omega_data);
    let at = a.transpose();
    let mut q = a.matmul(&omega)?;
    orthonormalize(&mut q);
    for _ in 0..SUBSPACE_ITERS {
        let mut z = at.matmul(&q)?;
        orthonormalize(&mut z);
        q = a.matmul(&z)?;
        orthonormalize(&mut q);
    }
    // B = Qᵀ A is l × n
    let b = q.transpose().matmul(a)?;
    let sb = svd_full(&b)?;
    let u = q.matmul(&sb.u)?;
    Ok(truncate(
        SvdResult {
            u,
            singular_values: sb.singular_values,
            vt: sb.vt,
        },
        k.min(m),
    ))
}

/// Modified Gram–Schmidt with one reorthogonalization pass. Columns that
/// collapse numerically are replaced by completions of the basis.
fn orthonormalize(q: &mut DenseMatrix) {
    let (m, cols) = q.shape();
    let data = q.as_mut_slice();
    for j in 0..cols {
        let (done, rest) = data.split_at_mut(j * m);
        let qj = &mut rest[..m];
        let start = norm2(qj);
        for _ in 0..2 {
            for i in 0..j {
                let qi = &done[i * m..(i + 1) * m];
                let c = dot(qi, qj);
                axpy(qj, -c, qi);
            }
        }
        let nrm = norm2(qj);
        if nrm > 1e-10 * start.max(f64::MIN_POSITIVE) && nrm > 0.0 {
            qj.iter_mut().for_each(|v| *v /= nrm);
        } else {
            complete_column(done, qj, m, j);
        }
    }
}

/// Fills `qj` with a unit vector orthogonal to the `j` columns in `done`,
/// starting from the coordinate vector that keeps the most of its length.
fn complete_column(done: &[f64], qj: &mut [f64], m: usize, j: usize) {
    let project_out = |v: &mut [f64]| {
        for _ in 0..2 {
            for i in 0..j {
                let qi = &done[i * m..(i + 1) * m];
                let c = dot(qi, v);
                axpy(v, -c, qi);
            }
        }
    };
    let mut best = (0.0, 0);
    let mut e_vec = vec![0.0; m];
    for e in 0..m {
        e_vec.iter_mut().for_each(|v| *v = 0.0);
        e_vec[e] = 1.0;
        project_out(&mut e_vec);
        let nrm = norm2(&e_vec);
        if nrm > best.0 {
            best = (nrm, e);
        }
    }
    qj.iter_mut().for_each(|v| *v = 0.0);
    if best.0 < 1e-8 {
        // j >= m: no room left; leave the zero column (callers never hit this)
        return;
    }
    qj[best.1] = 1.0;
    project_out(qj);
    let nrm = norm2(qj);
    qj.iter_mut().for_each(|v| *v /= nrm);
}

/// Jacobi on a tall (m >= n) matrix.
fn jacobi_tall(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = a.shape();
    let mut w = a.as_slice().to_vec();
    let mut v = DenseMatrix::identity(n).into_vec();
    let mut sq = vec![0.0; n];

    let frob = a.frobenius_norm();
    if frob == 0.0 {
        return Ok(zero_result(m, n));
    }
    // columns below this are numerically zero and are left alone
    let negligible = (f64::EPSILON * 1e-2 * frob).powi(2);

    let mut converged = false;
    let mut last_ratio = 0.0;
    for _sweep in 0..MAX_SWEEPS {
        for (j, s) in sq.iter_mut().enumerate() {
            *s = dot(&w[j * m..(j + 1) * m], &w[j * m..(j + 1) * m]);
        }
        let mut max_ratio: f64 = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let alpha = sq[p];
                let beta = sq[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let (lo, hi) = w.split_at_mut(q * m);
                let wp = &mut lo[p * m..(p + 1) * m];
                let wq = &mut hi[..m];
                let gamma = dot(wp, wq);
                let ratio = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                max_ratio = max_ratio.max(ratio);
                if ratio <= JACOBI_TOL {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1f64.hypot(zeta));
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(wp, wq, c, s);
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
                let (vlo, vhi) = v.split_at_mut(q * n);
                rotate(&mut vlo[p * n..(p + 1) * n], &mut vhi[..n], c, s);
            }
        }
        last_ratio = max_ratio;
        if max_ratio <= JACOBI_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(FalcError::SvdNoConvergence {
            sweeps: MAX_SWEEPS,
            residual: last_ratio,
        });
    }

    let sigma: Vec<f64> = (0..n).map(|j| norm2(&w[j * m..(j + 1) * m])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ties in column order, so output is deterministic
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let mut u = vec![0.0; m * n];
    let mut vt = DenseMatrix::zeros(n, n);
    let mut sv = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sj = sigma[j];
        sv.push(sj);
        let uk = &mut u[k * m..(k + 1) * m];
        if sj * sj > negligible {
            for (dst, src) in uk.iter_mut().zip(&w[j * m..(j + 1) * m]) {
                *dst = src / sj;
            }
        } else {
            deficient.push(k);
        }
        for i in 0..n {
            vt[(k, i)] = v[j * n + i];
        }
    }
    // numerically-zero columns sort last, so every earlier column is final
    for &k in &deficient {
        let (done, rest) = u.split_at_mut(k * m);
        complete_column(done, &mut rest[..m], m, k);
    }
    Ok(SvdResult {
        u: DenseMatrix::from_col_major_unchecked(m, n, u),
        singular_values: DenseVector::from_vec_unchecked(sv),
        vt,
    })
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let xa = *a;
        let yb = *b;
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

fn zero_result(m: usize, n: usize) -> SvdResult {
    let mut u = DenseMatrix::zeros(m, n);
    for k in 0..n {
        u[(k, k)] = 1.0;
    }
    SvdResult {
        u,
        singular_values: DenseVector::zeros(n),
        vt: DenseMatrix::identity(n),
    }
}
