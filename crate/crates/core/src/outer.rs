//! Outer augmented Lagrangian loop: initialization, multiplier updates,
//! penalty/tolerance schedules and global stopping.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::inner::{
    finish_inner, inner_step, probe_certificate, Branch, Budget, InnerOptions, InnerState, Point,
    StagnationExit, StagnationNorm, StopThresholds, Subproblem,
};
use crate::linalg::matrix::{axpy, dot, norm2};
use crate::linalg::{
    norm_factor_i, norm_factor_j, schatten_norm, sigma_max_stacked, slice_norm, svd_full,
    DenseMatrix, DenseVector, NormIndex,
};
use crate::problems::spec::{ConstraintBlock, ProblemSpec, SlackLayout};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Schedule {
    /// Tolerances driven by a prox-gradient probe at each outer iteration;
    /// λ ← c_λ·λ, ε ← c_λ²·ε.
    Adaptive,
    /// λ ← ν·λ, ε ← ν²·ε, ξ = ε/2, τ = ε/(4(B_X + ρ)).
    Geometric {
        nu: f64,
        /// Bound on ‖X‖_F; defaults to 2‖X⁰‖_F and grows when exceeded.
        #[serde(default)]
        b_x: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub c_lambda: f64,
    pub c_tau: f64,
    pub c_xi: f64,
    pub cbar_lambda: f64,
    pub cbar_tau: f64,
    pub cbar_xi: f64,
    /// Inner iterate-stagnation threshold ϱ; triggers the global stop.
    pub stagnation: f64,
    pub stagnation_norm: StagnationNorm,
    pub stagnation_exit: StagnationExit,
    /// Subgradient thresholds ς for the global stop; `None` disables.
    pub global_stop: Option<StopThresholds>,
    pub max_outer: usize,
    pub max_inner: usize,
    pub eps_init_factor: f64,
    pub schedule: Schedule,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            c_lambda: 0.4,
            c_tau: 0.4,
            c_xi: 0.4,
            cbar_lambda: 2.0,
            cbar_tau: 0.999,
            cbar_xi: 0.999,
            stagnation: 1e-5,
            stagnation_norm: StagnationNorm::Euclidean,
            stagnation_exit: StagnationExit::Prox,
            global_stop: None,
            max_outer: 60,
            max_inner: 5000,
            eps_init_factor: 0.99,
            schedule: Schedule::Adaptive,
        }
    }
}

impl SolverParams {
    /// Settings of the robust PCA experiments.
    pub fn robust_pca() -> Self {
        Self::default()
    }

    /// Settings of the stable PCP experiments: c̄_λ = 1.5, entrywise
    /// stagnation and a subgradient stop with ς = 1e-3.
    pub fn stable_pcp() -> Self {
        let varsigma = 1e-3;
        Self {
            cbar_lambda: 1.5,
            stagnation_norm: StagnationNorm::MaxEntry,
            global_stop: Some(StopThresholds {
                x: varsigma / 2.0,
                s: varsigma,
                y: varsigma,
            }),
            ..Self::default()
        }
    }

    /// Equality-constrained presets (matrix completion, basis pursuit). The
    /// adaptive schedule shrinks τ_X at the same rate as λ, which leaves the
    /// unscaled dual error ‖G‖/λ roughly constant; that is harmless for
    /// robust PCA but stalls these problems short of the optimum. The
    /// geometric schedule has ε ∝ λ², so ‖G‖/λ → 0.
    pub fn equality_constrained(stagnation: f64) -> Self {
        Self {
            stagnation,
            schedule: Schedule::Geometric { nu: 0.4, b_x: None },
            ..Self::default()
        }
    }

    pub fn matrix_completion() -> Self {
        Self::equality_constrained(1e-8)
    }

    pub fn basis_pursuit() -> Self {
        Self::equality_constrained(1e-10)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(FalcError::InvalidArgument(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("c_lambda", self.c_lambda)?;
        unit("c_tau", self.c_tau)?;
        unit("c_xi", self.c_xi)?;
        unit("cbar_tau", self.cbar_tau)?;
        unit("cbar_xi", self.cbar_xi)?;
        if !(self.cbar_lambda > 0.0) || !self.cbar_lambda.is_finite() {
            return Err(FalcError::InvalidArgument("cbar_lambda must be positive".into()));
        }
        if !(self.stagnation > 0.0) {
            return Err(FalcError::InvalidArgument("stagnation threshold must be positive".into()));
        }
        if let Some(t) = self.global_stop {
            if !(t.x > 0.0 && t.s > 0.0 && t.y > 0.0) {
                return Err(FalcError::InvalidArgument("stop thresholds must be positive".into()));
            }
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(FalcError::InvalidArgument("iteration limits must be positive".into()));
        }
        if !(self.eps_init_factor > 0.0) || !self.eps_init_factor.is_finite() {
            return Err(FalcError::InvalidArgument("eps_init_factor must be positive".into()));
        }
        if let Schedule::Geometric { nu, b_x } = &self.schedule {
            unit("nu", *nu)?;
            if let Some(b) = b_x {
                if !(*b > 0.0) {
                    return Err(FalcError::InvalidArgument("b_x must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Inner iterates stopped moving.
    Stagnation,
    /// Subgradient norms fell below ς.
    SubgradientThreshold,
    MaxOuter,
}

/// Measured left-hand sides and theoretical right-hand sides of the
/// gradient/feasibility bounds for an ε-optimal subproblem solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub grad_x_norm: f64,
    pub grad_x_bound: f64,
    /// ‖∇_s f‖₂, i.e. the shifted residual of the β-blocks.
    pub slack_residual_norm: f64,
    pub slack_residual_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub lambda: f64,
    pub eps: f64,
    pub tau_x: f64,
    pub tau_s: f64,
    pub xi: f64,
    pub eta_k: f64,
    /// ‖L(X) + s + y − r‖₂ over all blocks, before the multiplier update.
    pub residual_2: f64,
    pub block_residuals: Vec<f64>,
    pub objective: f64,
    pub multiplier_norms: Vec<f64>,
    pub budget: usize,
    pub inner_iterations: usize,
    /// Cumulative over the solve.
    pub svd_count: usize,
    pub branch: Branch,
    pub g_matrix_norm: f64,
    pub g_vec_norm: f64,
    pub phi: f64,
    pub bounds: Option<BoundReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: DenseMatrix,
    /// Stacked β-slacks.
    pub s: DenseVector,
    /// Stacked γ-slacks.
    pub y: DenseVector,
    /// Per-block multipliers after the final update.
    pub multipliers: Vec<DenseVector>,
    /// μ1‖σ(X)‖_α + μ2‖s‖_β.
    pub objective: f64,
    /// Per-block ‖L_i(X) + s_i + y_i − r_i‖₂.
    pub residuals: Vec<f64>,
    pub residual_2: f64,
    pub outer_iterations: usize,
    pub total_inner_iterations: usize,
    pub svd_count: usize,
    pub lipschitz: f64,
    pub wall_time: f64,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
}

impl SolveReport {
    /// The β-slack of block `i`, if it has one.
    pub fn block_s(&self, spec: &ProblemSpec, i: usize) -> Option<DenseVector> {
        let layout = spec.layout();
        layout.s_ranges[i]
            .clone()
            .map(|r| DenseVector::from_vec_unchecked(self.s.as_slice()[r].to_vec()))
    }

    /// The γ-slack of block `i`, if it has one.
    pub fn block_y(&self, spec: &ProblemSpec, i: usize) -> Option<DenseVector> {
        let layout = spec.layout();
        layout.y_ranges[i]
            .clone()
            .map(|r| DenseVector::from_vec_unchecked(self.y.as_slice()[r].to_vec()))
    }

    /// Sparse estimate for the basis pursuit preset. The ℓ1 slack of block 0
    /// equals −x at feasibility and carries the exact zeros of the shrinkage
    /// step, whereas X itself is only feasible to within the residual.
    pub fn basis_pursuit_estimate(&self, spec: &ProblemSpec) -> Option<DenseVector> {
        self.block_s(spec, 0).map(|s| s.scaled(-1.0))
    }
}

/// θ − residual/λ
pub fn update_multiplier(theta: &DenseVector, residual: &DenseVector, lambda: f64) -> DenseVector {
    let mut t = theta.clone();
    t.axpy(-1.0 / lambda, residual);
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tau_x: f64,
    pub tau_s: f64,
    pub xi: f64,
}

/// Tolerances from the probe norms (‖G‖_F, ‖g‖₂, φ): the first outer
/// iteration scales the probe by c̄, later ones take the smaller of the
/// decayed previous value and the probe.
///
/// A probe component that is exactly zero says the probe step is already
/// optimal in that block and carries no scale. It then does not tighten
/// the tolerance: later iterations just decay the previous value, and the
/// first one borrows the scale of ‖G‖ (times ρ for φ).
pub fn schedule_adaptive(
    prev: Option<Tolerances>,
    probe: (f64, f64, f64),
    params: &SolverParams,
    rho: f64,
) -> Tolerances {
    let (gx, gs, phi) = probe;
    let pick = |probe: f64, fallback: f64| if probe > 0.0 { probe } else { fallback };
    match prev {
        None => Tolerances {
            tau_x: params.cbar_tau * gx,
            tau_s: params.cbar_tau * pick(gs, gx),
            xi: params.cbar_xi * pick(phi, rho * gx),
        },
        Some(p) => {
            let decay = |prev: f64, c: f64, cap: f64| {
                if cap > 0.0 {
                    (c * prev).min(cap)
                } else {
                    c * prev
                }
            };
            Tolerances {
                tau_x: decay(p.tau_x, params.c_tau, params.cbar_tau * gx),
                tau_s: decay(p.tau_s, params.c_tau, params.cbar_tau * gs),
                xi: decay(p.xi, params.c_xi, phi),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricStep {
    pub lambda: f64,
    pub eps: f64,
    pub tau: f64,
    pub xi: f64,
}

/// Advances (λ, ε) by one geometric step and returns the tolerances that
/// go with the new ε.
pub fn schedule_geometric(lambda: f64, eps: f64, nu: f64, b_x: f64, rho: f64) -> GeometricStep {
    let lambda = nu * lambda;
    let eps = nu * nu * eps;
    let (tau, xi) = geometric_tolerances(eps, b_x, rho);
    GeometricStep {
        lambda,
        eps,
        tau,
        xi,
    }
}

/// τ = ε/(4(B_X + ρ)), ξ = ε/2.
pub fn geometric_tolerances(eps: f64, b_x: f64, rho: f64) -> (f64, f64) {
    (eps / (4.0 * (b_x + rho)), eps / 2.0)
}

const CG_TOL: f64 = 1e-12;

/// Minimum-Frobenius-norm X with L_i(X) = r_i for every given block, by
/// conjugate gradient on the normal equations.
pub fn least_norm_init(m: usize, n: usize, blocks: &[&ConstraintBlock]) -> Result<DenseMatrix> {
    let dims: Vec<usize> = blocks.iter().map(|b| b.dim()).collect();
    let total: usize = dims.iter().sum();
    if total == 0 {
        return Ok(DenseMatrix::zeros(m, n));
    }
    let mut rhs = Vec::with_capacity(total);
    for b in blocks {
        rhs.extend_from_slice(b.rhs.as_slice());
    }
    let bnorm = norm2(&rhs);
    if bnorm == 0.0 {
        return Ok(DenseMatrix::zeros(m, n));
    }
    let adjoint = |w: &[f64]| {
        let mut x = vec![0.0; m * n];
        let mut off = 0;
        for (b, &d) in blocks.iter().zip(&dims) {
            b.map.adjoint_add(&w[off..off + d], 1.0, &mut x);
            off += d;
        }
        x
    };
    let forward = |x: &[f64]| {
        let mut out = Vec::with_capacity(total);
        for b in blocks {
            out.extend(b.map.apply_slice(x));
        }
        out
    };
    let label = || {
        blocks
            .iter()
            .map(|b| format!("{:?}", std::mem::discriminant(&b.map)))
            .collect::<Vec<_>>()
            .join("+")
    };

    let mut w = vec![0.0; total];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = 2 * total + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= CG_TOL * bnorm {
            break;
        }
        let ap = forward(&adjoint(&p));
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let a = rr / pap;
        axpy(&mut w, a, &p);
        axpy(&mut r, -a, &ap);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    let x = adjoint(&w);
    let mut check = forward(&x);
    axpy(&mut check, -1.0, &rhs);
    let rel = norm2(&check) / bnorm;
    if !(rel <= 1e3 * CG_TOL) {
        return Err(FalcError::LeastNormFailed {
            block: label(),
            residual: rel,
        });
    }
    Ok(DenseMatrix::from_col_major_unchecked(m, n, x))
}

/// X⁰ from the blocks without a β-slack (all blocks if every block has
/// one), s⁰ = r − L(X⁰) on β-blocks, y⁰ = 0.
pub fn initial_point(spec: &ProblemSpec, layout: &SlackLayout) -> Result<Point> {
    let eq: Vec<&ConstraintBlock> = spec.blocks.iter().filter(|b| !b.beta_slack).collect();
    let basis: Vec<&ConstraintBlock> = if eq.iter().any(|b| b.dim() > 0) {
        eq
    } else {
        spec.blocks.iter().collect()
    };
    let x = least_norm_init(spec.m, spec.n, &basis)?;
    let mut s = DenseVector::zeros(layout.s_len);
    for (b, rg) in spec.blocks.iter().zip(&layout.s_ranges) {
        if let Some(rg) = rg {
            let mut v = b.rhs.as_slice().to_vec();
            axpy(&mut v, -1.0, &b.map.apply_slice(x.as_slice()));
            s.as_mut_slice()[rg.clone()].copy_from_slice(&v);
        }
    }
    Ok(Point {
        x,
        s,
        y: DenseVector::zeros(layout.y_len),
    })
}

/// Per-block residuals L_i(X) + s_i + y_i − r_i against the true rhs.
pub fn block_residuals(spec: &ProblemSpec, layout: &SlackLayout, p: &Point) -> Vec<DenseVector> {
    spec.blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut r = b.map.apply_slice(p.x.as_slice());
            if let Some(rg) = &layout.s_ranges[i] {
                axpy(&mut r, 1.0, &p.s.as_slice()[rg.clone()]);
            }
            if let Some(rg) = &layout.y_ranges[i] {
                axpy(&mut r, 1.0, &p.y.as_slice()[rg.clone()]);
            }
            axpy(&mut r, -1.0, b.rhs.as_slice());
            DenseVector::from_vec_unchecked(r)
        })
        .collect()
}

/// μ1‖σ(X)‖_α + μ2‖s‖_β
pub fn primal_objective(spec: &ProblemSpec, p: &Point) -> Result<f64> {
    let mut v = spec.mu2 * slice_norm(p.s.as_slice(), spec.beta);
    if spec.mu1 > 0.0 {
        v += spec.mu1 * schatten_norm(&p.x, spec.alpha)?;
    }
    Ok(v)
}

/// Evaluates the gradient and β-residual bounds that hold for any
/// ε-optimal point of the subproblem:
/// ‖∇_X f‖_F ≤ √(2Lε) + I(α*)λμ1 and ‖∇_s f‖₂ ≤ √(2Lε) + J(β*)λμ2.
pub fn diagnostic_bounds(sub: &Subproblem<'_>, p: &Point, eps: f64) -> BoundReport {
    let spec = sub.spec;
    let (_, g) = sub.smooth(p);
    let root = (2.0 * sub.lipschitz * eps).sqrt();
    let grad_x_norm = g.x.frobenius_norm();
    let grad_x_bound = root + norm_factor_i(spec.alpha.dual(), spec.m, spec.n) * sub.lambda * spec.mu1;
    let slack_residual_norm = g.s.norm2();
    let slack_residual_bound =
        root + norm_factor_j(spec.beta.dual(), g.s.len().max(1)) * sub.lambda * spec.mu2;
    // relative slack for rounding in the measured quantities
    let fuzz = 1e-9;
    BoundReport {
        grad_x_norm,
        grad_x_bound,
        slack_residual_norm,
        slack_residual_bound,
        holds: grad_x_norm <= grad_x_bound * (1.0 + fuzz) + fuzz
            && slack_residual_norm <= slack_residual_bound * (1.0 + fuzz) + fuzz,
    }
}

pub fn solve(spec: &ProblemSpec, params: &SolverParams) -> Result<SolveReport> {
    solve_with_progress(spec, params, |_| {})
}

/// Runs the outer loop; `progress` sees every iteration record as it is
/// appended to the history.
pub fn solve_with_progress<F>(
    spec: &ProblemSpec,
    params: &SolverParams,
    mut progress: F,
) -> Result<SolveReport>
where
    F: FnMut(&IterationRecord),
{
    spec.validate()?;
    params.validate()?;
    let started = Instant::now();
    let layout = spec.layout();

    let sigma_m = sigma_max_stacked(&spec.stacked_rows())?;
    let lipschitz = sigma_m * sigma_m;
    if !(lipschitz > 0.0) {
        return Err(FalcError::InvalidSpec("constraint operator is identically empty".into()));
    }

    let start = initial_point(spec, &layout)?;
    let x0_svd = svd_full(&start.x)?;
    let mut svd_count = 1;
    let sv0 = x0_svd.singular_values.as_slice();
    let x0_spectral = sv0.first().copied().unwrap_or(0.0);
    let x0_nuclear: f64 = sv0.iter().sum();
    let x0_alpha = slice_norm(sv0, spec.alpha);
    let eta_base = spec.mu1 * x0_alpha + spec.mu2 * slice_norm(start.s.as_slice(), spec.beta);
    // the β^(k) term of the budget uses the ℓ1/nuclear surrogates
    let budget_base = spec.mu1 * x0_nuclear + spec.mu2 * slice_norm(start.s.as_slice(), NormIndex::One);

    let mut theta: Vec<DenseVector> = spec.blocks.iter().map(|b| b.multiplier.clone()).collect();
    let theta_sq = |th: &[DenseVector]| th.iter().map(|t| t.dot(t)).sum::<f64>();

    let mut lambda = params.cbar_lambda * if x0_spectral > 0.0 { x0_spectral } else { 1.0 };
    let mut eta_k = eta_base + 0.5 * lambda * theta_sq(&theta);
    let mut eps = params.eps_init_factor * lambda * eta_k;
    if !(eps > 0.0) {
        eps = f64::MIN_POSITIVE;
    }
    let mut b_x = match &params.schedule {
        Schedule::Geometric { b_x: Some(b), .. } => *b,
        _ => 2.0 * start.x.frobenius_norm(),
    }
    .max(f64::MIN_POSITIVE);

    let mut point = start;
    let mut x_nuclear = x0_nuclear;
    let mut tolerances: Option<Tolerances> = None;
    let mut history = Vec::new();
    let mut total_inner = 0;
    let mut termination = Termination::MaxOuter;

    for k in 1..=params.max_outer {
        let sub = Subproblem::new(spec, &layout, &theta, lambda, eta_k, lipschitz)?;
        let budget = inner_budget(spec, sigma_m, budget_base, lambda, &theta, x_nuclear, &point, eps, params.max_inner);

        let mut st = InnerState::with_norm(point.clone(), params.stagnation_norm, x_nuclear);
        inner_step(&sub, &mut st)?;
        let tol = match &params.schedule {
            Schedule::Adaptive => {
                let probe = probe_certificate(&sub, &st)?.norms();
                schedule_adaptive(tolerances, probe, params, spec.rho)
            }
            Schedule::Geometric { .. } => {
                let (tau, xi) = geometric_tolerances(eps, b_x, spec.rho);
                let split = tau / std::f64::consts::SQRT_2;
                Tolerances {
                    tau_x: split,
                    tau_s: split,
                    xi,
                }
            }
        };
        tolerances = Some(tol);
        let opts = InnerOptions {
            tau_x: tol.tau_x,
            tau_s: tol.tau_s,
            xi: tol.xi,
            stagnation: params.stagnation,
            stagnation_norm: params.stagnation_norm,
            global_stop: params.global_stop,
            stagnation_exit: params.stagnation_exit,
        };
        let outcome = finish_inner(&sub, st, &opts, budget)?;
        let cert = &outcome.certificate;
        svd_count += cert.svd_count;
        total_inner += cert.iterations;
        point = outcome.point;
        x_nuclear = outcome.x_nuclear_bound;
        if !point.x.is_finite() || !point.s.is_finite() || !point.y.is_finite() {
            return Err(FalcError::NonFinite(format!("iterate at outer iteration {k}")));
        }

        let res = block_residuals(spec, &layout, &point);
        let block_norms: Vec<f64> = res.iter().map(|r| r.norm2()).collect();
        let residual_2 = block_norms.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bounds = (cert.branch == Branch::GapBound).then(|| diagnostic_bounds(&sub, &point, eps));
        let record = IterationRecord {
            k,
            lambda,
            eps,
            tau_x: tol.tau_x,
            tau_s: tol.tau_s,
            xi: tol.xi,
            eta_k,
            residual_2,
            block_residuals: block_norms,
            objective: primal_objective(spec, &point)?,
            multiplier_norms: theta.iter().map(|t| t.norm2()).collect(),
            budget: budget.steps,
            inner_iterations: cert.iterations,
            svd_count,
            branch: cert.branch,
            g_matrix_norm: cert.g_matrix_norm,
            g_vec_norm: cert.g_vec_norm,
            phi: cert.phi,
            bounds,
        };
        progress(&record);
        history.push(record);

        // updated even on the last iteration so that θ is a dual candidate
        for (th, r) in theta.iter_mut().zip(&res) {
            *th = update_multiplier(th, r, lambda);
        }
        if outcome.global_stop {
            termination = if cert.branch == Branch::StationaryIterates {
                Termination::Stagnation
            } else {
                Termination::SubgradientThreshold
            };
            break;
        }
        match &params.schedule {
            Schedule::Adaptive => {
                lambda *= params.c_lambda;
                eps *= params.c_lambda * params.c_lambda;
            }
            Schedule::Geometric { nu, .. } => {
                let step = schedule_geometric(lambda, eps, *nu, b_x, spec.rho);
                lambda = step.lambda;
                eps = step.eps;
                let xf = point.x.frobenius_norm();
                if xf > b_x {
                    b_x = 2.0 * xf;
                }
            }
        }
        eta_k = eta_base + 0.5 * lambda * theta_sq(&theta);
    }

    let res = block_residuals(spec, &layout, &point);
    let residuals: Vec<f64> = res.iter().map(|r| r.norm2()).collect();
    let residual_2 = residuals.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SolveReport {
        objective: primal_objective(spec, &point)?,
        x: point.x,
        s: point.s,
        y: point.y,
        multipliers: theta,
        residuals,
        residual_2,
        outer_iterations: history.len(),
        total_inner_iterations: total_inner,
        svd_count,
        lipschitz,
        wall_time: started.elapsed().as_secs_f64(),
        termination,
        history,
    })
}

/// ⌊σ_max(M)·√(1/μ1² + 1/μ2²)·(β^(k) + μ1‖X‖_* + μ2‖s‖₁)·√(2/ε)⌋, with
/// zero-weight terms dropped and the result capped at `max_inner`.
#[allow(clippy::too_many_arguments)]
fn inner_budget(
    spec: &ProblemSpec,
    sigma_m: f64,
    budget_base: f64,
    lambda: f64,
    theta: &[DenseVector],
    x_nuclear: f64,
    point: &Point,
    eps: f64,
    max_inner: usize,
) -> Budget {
    let inv = |mu: f64| if mu > 0.0 { 1.0 / (mu * mu) } else { 0.0 };
    let beta_k = budget_base + 0.5 * lambda * theta.iter().map(|t| t.dot(t)).sum::<f64>();
    let mut radius = beta_k + spec.mu2 * slice_norm(point.s.as_slice(), NormIndex::One);
    if spec.mu1 > 0.0 {
        radius += spec.mu1 * x_nuclear;
    }
    let n = sigma_m * (inv(spec.mu1) + inv(spec.mu2)).sqrt() * radius * (2.0 / eps).sqrt();
    if n.is_finite() && n < max_inner as f64 {
        Budget {
            steps: (n.floor() as usize).max(1),
            capped: false,
        }
    } else {
        Budget {
            steps: max_inner,
            capped: true,
        }
    }
}
