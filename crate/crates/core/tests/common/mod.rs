#![allow(dead_code)]

use falc::inner::{InnerState, Point, Subproblem};
use falc::linalg::{slice_norm, svd_full, DenseMatrix, DenseVector, LinearMap, NormIndex};
use falc::problems::{generate_instance, presets, ConstraintBlock, GroundTruth, InstanceParams, ProblemSpec};
use falc::rng::SplitMix64;

pub const NORMS: [NormIndex; 3] = [NormIndex::One, NormIndex::Two, NormIndex::Inf];

pub fn gaussian_vec(rng: &mut SplitMix64, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gaussian()).collect()
}

pub fn gaussian_matrix(rng: &mut SplitMix64, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_col_major(m, n, gaussian_vec(rng, m * n)).unwrap()
}

pub fn dense_vec(v: Vec<f64>) -> DenseVector {
    DenseVector::from_vec(v).unwrap()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Singular values from the eigenvalues of AᵀA (or AAᵀ, whichever is smaller).
pub fn singular_values_oracle(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = a.shape();
    let b = if m >= n { a.clone() } else { a.transpose() };
    let k = b.cols();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| b.col(i).iter().zip(b.col(j)).map(|(x, y)| x * y).sum()).collect())
        .collect();
    jacobi_eigenvalues(gram).into_iter().map(|e| e.max(0.0).sqrt()).collect()
}

// Independent pieces for the prox oracles.

fn l1_projection_bisect(y: &[f64], r: f64) -> Vec<f64> {
    if slice_norm(y, NormIndex::One) <= r {
        return y.to_vec();
    }
    let (mut lo, mut hi) = (0.0, slice_norm(y, NormIndex::Inf));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let mass: f64 = y.iter().map(|v| (v.abs() - mid).max(0.0)).sum();
        if mass > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y.iter().map(|v| (v.abs() - hi).max(0.0).copysign(*v)).collect()
}

pub fn ball_projection_oracle(y: &[f64], p: NormIndex, r: f64) -> Vec<f64> {
    match p {
        NormIndex::One => l1_projection_bisect(y, r),
        NormIndex::Two => {
            let nrm = slice_norm(y, NormIndex::Two);
            if nrm <= r {
                y.to_vec()
            } else {
                y.iter().map(|v| v * r / nrm).collect()
            }
        }
        NormIndex::Inf => y.iter().map(|v| v.clamp(-r, r)).collect(),
    }
}

pub fn norm_subgradient(x: &[f64], p: NormIndex) -> Vec<f64> {
    match p {
        NormIndex::One => x.iter().map(|v| if *v == 0.0 { 0.0 } else { v.signum() }).collect(),
        NormIndex::Two => {
            let nrm = slice_norm(x, NormIndex::Two);
            if nrm == 0.0 {
                vec![0.0; x.len()]
            } else {
                x.iter().map(|v| v / nrm).collect()
            }
        }
        NormIndex::Inf => {
            let mut g = vec![0.0; x.len()];
            let (mut best, mut at) = (0.0, None);
            for (j, v) in x.iter().enumerate() {
                if v.abs() > best {
                    best = v.abs();
                    at = Some(j);
                }
            }
            if let Some(j) = at {
                g[j] = x[j].signum();
            }
            g
        }
    }
}

/// ½‖x − y‖² + δ‖x‖_p
pub fn prox_objective(x: &[f64], y: &[f64], delta: f64, p: NormIndex) -> f64 {
    let d: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * d + delta * slice_norm(x, p)
}

/// Projected subgradient for min ½‖x − y‖² + δ‖x‖_p over ‖x‖_p ≤ η, with
/// step 1/(k+1); returns the best iterate seen.
pub fn vector_prox_oracle(y: &[f64], delta: f64, p: NormIndex, eta: f64, iters: usize) -> Vec<f64> {
    let mut x = ball_projection_oracle(y, p, eta);
    let mut best = x.clone();
    let mut best_val = prox_objective(&x, y, delta, p);
    for k in 0..iters {
        let u = norm_subgradient(&x, p);
        let t = 1.0 / (k as f64 + 1.0);
        let step: Vec<f64> = x
            .iter()
            .zip(y)
            .zip(&u)
            .map(|((xi, yi), ui)| xi - t * (xi - yi + delta * ui))
            .collect();
        x = ball_projection_oracle(&step, p, eta);
        let val = prox_objective(&x, y, delta, p);
        if val < best_val {
            best_val = val;
            best = x.clone();
        }
    }
    best
}

pub fn schatten(x: &DenseMatrix, p: NormIndex) -> f64 {
    falc::linalg::schatten_norm(x, p).unwrap()
}

/// ½‖X − Y‖_F² + δ‖σ(X)‖_α
pub fn matrix_prox_objective(x: &DenseMatrix, y: &DenseMatrix, delta: f64, alpha: NormIndex) -> f64 {
    let d = x.sub(y).frobenius_norm();
    0.5 * d * d + delta * schatten(x, alpha)
}

fn spectral_map(x: &DenseMatrix, f: impl Fn(&[f64]) -> Vec<f64>) -> DenseMatrix {
    let svd = svd_full(x).unwrap();
    svd.recompose_with(&f(svd.singular_values.as_slice()))
}

/// Matrix version of [`vector_prox_oracle`]; subgradients and projections
/// act on the spectrum.
pub fn matrix_prox_oracle(y: &DenseMatrix, delta: f64, alpha: NormIndex, eta: f64, iters: usize) -> DenseMatrix {
    let project = |x: &DenseMatrix| spectral_map(x, |s| ball_projection_oracle(s, alpha, eta));
    let mut x = project(y);
    let mut best = x.clone();
    let mut best_val = matrix_prox_objective(&x, y, delta, alpha);
    for k in 0..iters {
        let u = spectral_map(&x, |s| norm_subgradient(s, alpha));
        let t = 1.0 / (k as f64 + 1.0);
        let mut step = x.clone();
        step.axpy(-t, &x.sub(y));
        step.axpy(-t * delta, &u);
        x = project(&step);
        let val = matrix_prox_objective(&x, y, delta, alpha);
        if val < best_val {
            best_val = val;
            best = x.clone();
        }
    }
    best
}

/// Planted robust PCA instance with μ2 = 1/√n.
pub fn robust_pca_instance(params: &InstanceParams) -> (GroundTruth, ProblemSpec) {
    let (truth, d) = generate_instance(params).unwrap();
    let mu2 = 1.0 / (params.n as f64).sqrt();
    let spec = if params.rho_noise > 0.0 {
        presets::stable_pcp(&d, mu2, params.rho_noise).unwrap()
    } else {
        presets::robust_pca(&d, mu2).unwrap()
    };
    (truth, spec)
}

/// Subproblem instances with a closed-form optimum: one X + s = D block,
/// θ = 0, nuclear norm on X and ℓ1 on s. With μ2 < 1 and diagonal D the
/// optimum is X = 0, s = soft(D, λμ2); with μ2 > 1 it is X = SVT(D, λ),
/// s = 0 (every entry of D − X is bounded by λ < λμ2).
pub struct RateInstance {
    pub spec: ProblemSpec,
    pub lambda: f64,
    pub optimum: Point,
}

pub fn rate_instance(seed: u64) -> RateInstance {
    let mut rng = SplitMix64::new(seed);
    let (m, n) = (4 + rng.below(3), 3 + rng.below(3));
    let lambda = rng.uniform(0.3, 1.0);
    let diagonal_case = seed % 2 == 0;
    let (d, mu2, x_opt, s_opt) = if diagonal_case {
        let mut d = DenseMatrix::zeros(m, n);
        for i in 0..m.min(n) {
            d[(i, i)] = 3.0 * rng.gaussian();
        }
        let mu2 = rng.uniform(0.3, 0.8);
        let s: Vec<f64> = d
            .as_slice()
            .iter()
            .map(|v| (v.abs() - lambda * mu2).max(0.0).copysign(*v))
            .collect();
        (d.clone(), mu2, DenseMatrix::zeros(m, n), s)
    } else {
        let d = gaussian_matrix(&mut rng, m, n).scaled(1.5);
        let mu2 = rng.uniform(1.3, 2.0);
        let svd = svd_full(&d).unwrap();
        let shrunk: Vec<f64> = svd.singular_values.as_slice().iter().map(|v| (v - lambda).max(0.0)).collect();
        (d, mu2, svd.recompose_with(&shrunk), vec![0.0; m * n])
    };
    let block = ConstraintBlock::new(LinearMap::vectorize(m, n), d.vec(), true, false);
    let spec = ProblemSpec {
        m,
        n,
        alpha: NormIndex::One,
        beta: NormIndex::One,
        gamma: NormIndex::Two,
        mu1: 1.0,
        mu2,
        rho: 0.0,
        blocks: vec![block],
        label: "rate".into(),
    };
    RateInstance {
        spec,
        lambda,
        optimum: Point {
            x: x_opt,
            s: dense_vec(s_opt),
            y: DenseVector::zeros(0),
        },
    }
}

/// Largest violation of P(x1_ℓ) − P* ≤ 4L·h(opt)/(ℓ+1)² over ℓ = 1..=steps,
/// with h the squared distance from the start over two. Negative means
/// every step satisfied the bound.
pub fn rate_violation(inst: &RateInstance, steps: usize) -> f64 {
    let spec = &inst.spec;
    let layout = spec.layout();
    let theta: Vec<DenseVector> = spec.blocks.iter().map(|b| DenseVector::zeros(b.dim())).collect();
    let lipschitz = 2.0;
    let sub = Subproblem::new(spec, &layout, &theta, inst.lambda, 1e6, lipschitz).unwrap();
    let start = Point::zeros(spec.m, spec.n, layout.s_len, layout.y_len);
    let h = 0.5 * inst.optimum.sub(&start).norm().powi(2);
    let p_star = sub.objective(&inst.optimum).unwrap();
    let mut st = InnerState::new(start);
    let mut worst = f64::NEG_INFINITY;
    for ell in 1..=steps {
        falc::inner::inner_step(&sub, &mut st).unwrap();
        let gap = sub.objective(&st.p1).unwrap() - p_star;
        let bound = 4.0 * lipschitz * h / ((ell + 1) as f64).powi(2);
        worst = worst.max(gap - bound - 1e-12 * p_star.abs());
    }
    worst
}
