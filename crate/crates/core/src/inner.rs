//! Accelerated proximal-gradient solver for the augmented Lagrangian
//! subproblem
//!
//! ```text
//! min  λ(μ1‖σ(X)‖_α + μ2‖s‖_β) + f(X, s, y)   s.t.  μ1‖σ(X)‖_α ≤ η,  ‖y‖_γ ≤ ρ
//! f = ½ Σ_i ‖L_i(X) + s_i + y_i − (r_i + λθ_i)‖²
//! ```
//!
//! Three interleaved sequences (x1, x2, x3) with gradient accumulators
//! anchored at the starting point; each step costs one matrix shrinkage.

use serde::{Deserialize, Serialize};

use crate::error::{FalcError, Result};
use crate::linalg::matrix::{axpy, dot};
use crate::linalg::{schatten_norm, slice_norm, DenseMatrix, DenseVector, NormIndex};
use crate::problems::spec::{ProblemSpec, SlackLayout};
use crate::prox::{project_slice, shrink_matrix, shrink_slice};

/// A primal triple (X, s, y); s and y stack the per-block slacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: DenseMatrix,
    pub s: DenseVector,
    pub y: DenseVector,
}

impl Point {
    pub fn zeros(m: usize, n: usize, s_len: usize, y_len: usize) -> Self {
        Self {
            x: DenseMatrix::zeros(m, n),
            s: DenseVector::zeros(s_len),
            y: DenseVector::zeros(y_len),
        }
    }

    /// `(1 − t)·a + t·b`
    pub fn lerp(a: &Point, b: &Point, t: f64) -> Self {
        Self {
            x: DenseMatrix::lerp(&a.x, &b.x, t),
            s: DenseVector::lerp(&a.s, &b.s, t),
            y: DenseVector::lerp(&a.y, &b.y, t),
        }
    }

    pub fn axpy(&mut self, a: f64, other: &Point) {
        self.x.axpy(a, &other.x);
        self.s.axpy(a, &other.s);
        self.y.axpy(a, &other.y);
    }

    /// Euclidean norm of the triple.
    pub fn norm(&self) -> f64 {
        (self.x.inner(&self.x) + self.s.dot(&self.s) + self.y.dot(&self.y)).sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut d = self.clone();
        d.axpy(-1.0, other);
        d
    }
}

/// The k-th subproblem: problem data, penalty λ, shifted right-hand sides
/// r_i + λθ_i, ball radius η and Lipschitz constant of ∇f.
#[derive(Debug, Clone)]
pub struct Subproblem<'a> {
    pub spec: &'a ProblemSpec,
    pub layout: &'a SlackLayout,
    pub lambda: f64,
    pub eta_k: f64,
    pub lipschitz: f64,
    pub shifted_rhs: Vec<DenseVector>,
}

impl<'a> Subproblem<'a> {
    pub fn new(
        spec: &'a ProblemSpec,
        layout: &'a SlackLayout,
        multipliers: &[DenseVector],
        lambda: f64,
        eta_k: f64,
        lipschitz: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0) || !(lipschitz > 0.0) || !(eta_k >= 0.0) {
            return Err(FalcError::InvalidArgument(format!(
                "subproblem needs λ > 0, L > 0, η ≥ 0 (got {lambda}, {lipschitz}, {eta_k})"
            )));
        }
        if multipliers.len() != spec.blocks.len() {
            return Err(FalcError::Shape("one multiplier per block required".into()));
        }
        let shifted_rhs = spec
            .blocks
            .iter()
            .zip(multipliers)
            .map(|(b, th)| {
                if th.len() != b.dim() {
                    return Err(FalcError::Shape("multiplier length".into()));
                }
                let mut r = b.rhs.clone();
                r.axpy(lambda, th);
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            layout,
            lambda,
            eta_k,
            lipschitz,
            shifted_rhs,
        })
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.x.shape() != (self.spec.m, self.spec.n)
            || p.s.len() != self.layout.s_len
            || p.y.len() != self.layout.y_len
        {
            return Err(FalcError::Shape(format!(
                "point shapes {:?}/{}/{} do not match subproblem",
                p.x.shape(),
                p.s.len(),
                p.y.len()
            )));
        }
        Ok(())
    }

    /// Per-block residuals L_i(X) + s_i + y_i − (r_i + λθ_i).
    pub fn residuals(&self, p: &Point) -> Vec<Vec<f64>> {
        self.spec
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut r = b.map.apply_slice(p.x.as_slice());
                if let Some(rg) = &self.layout.s_ranges[i] {
                    axpy(&mut r, 1.0, &p.s.as_slice()[rg.clone()]);
                }
                if let Some(rg) = &self.layout.y_ranges[i] {
                    axpy(&mut r, 1.0, &p.y.as_slice()[rg.clone()]);
                }
                axpy(&mut r, -1.0, self.shifted_rhs[i].as_slice());
                r
            })
            .collect()
    }

    /// f and ∇f at `p`.
    pub fn smooth(&self, p: &Point) -> (f64, Point) {
        let res = self.residuals(p);
        let (m, n) = (self.spec.m, self.spec.n);
        let mut g = Point::zeros(m, n, self.layout.s_len, self.layout.y_len);
        let mut f = 0.0;
        for (i, (b, r)) in self.spec.blocks.iter().zip(&res).enumerate() {
            f += 0.5 * dot(r, r);
            b.map.adjoint_add(r, 1.0, g.x.as_mut_slice());
            if let Some(rg) = &self.layout.s_ranges[i] {
                g.s.as_mut_slice()[rg.clone()].copy_from_slice(r);
            }
            if let Some(rg) = &self.layout.y_ranges[i] {
                g.y.as_mut_slice()[rg.clone()].copy_from_slice(r);
            }
        }
        (f, g)
    }

    /// P = λ(μ1‖σ(X)‖_α + μ2‖s‖_β) + f. Costs an SVD unless α = 2.
    pub fn objective(&self, p: &Point) -> Result<f64> {
        self.check_point(p)?;
        let spec = self.spec;
        let mut reg = spec.mu2 * slice_norm(p.s.as_slice(), spec.beta);
        if spec.mu1 > 0.0 {
            reg += spec.mu1 * schatten_norm(&p.x, spec.alpha)?;
        }
        Ok(self.lambda * reg + self.smooth(p).0)
    }
}

/// ∇f at (x, s, y).
pub fn gradient(sub: &Subproblem<'_>, p: &Point) -> Result<Point> {
    sub.check_point(p)?;
    Ok(sub.smooth(p).1)
}

/// Next weight of the accelerated sequence, the root in (0, ϑ) of
/// (1 − ϑ')/ϑ'² = 1/ϑ².
pub fn theta_next(theta: f64) -> f64 {
    // (√(ϑ⁴ + 4ϑ²) − ϑ²)/2 rewritten without cancellation
    2.0 * theta / ((theta * theta + 4.0).sqrt() + theta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerState {
    /// Starting point; also the center of the prox function.
    pub anchor: Point,
    pub p1: Point,
    pub p2: Point,
    pub p3: Point,
    /// Σ ∇f(p3_i)/ϑ_i
    pub sigma: Point,
    /// Shrinkage of the X-center without the η-ball.
    pub x2_breve: DenseMatrix,
    pub theta: f64,
    /// Σ 1/ϑ_i, equal to 1/ϑ² of the last weight used.
    pub weight_sum: f64,
    pub ell: usize,
    pub svd_count: usize,
    /// ‖Δx1‖ and ‖Δs1‖ of the last step, in the norm chosen for stagnation.
    pub last_delta: Option<(f64, f64)>,
    /// Upper bound on ‖x1‖_* by convexity of the combinations.
    pub x1_nuclear_bound: f64,
    /// ‖x2‖_* (exact when an SVD was taken, otherwise an upper bound).
    pub x2_nuclear: f64,
    stagnation_norm: StagnationNorm,
}

impl InnerState {
    pub fn new(start: Point) -> Self {
        Self::with_norm(start, StagnationNorm::Euclidean, f64::INFINITY)
    }

    /// `start_nuclear` is ‖X_start‖_* or an upper bound for it.
    pub fn with_norm(start: Point, stagnation_norm: StagnationNorm, start_nuclear: f64) -> Self {
        let sigma = Point::zeros(
            start.x.rows(),
            start.x.cols(),
            start.s.len(),
            start.y.len(),
        );
        Self {
            x2_breve: start.x.clone(),
            p1: start.clone(),
            p2: start.clone(),
            p3: start.clone(),
            anchor: start,
            sigma,
            theta: 1.0,
            weight_sum: 0.0,
            ell: 0,
            svd_count: 0,
            last_delta: None,
            x1_nuclear_bound: start_nuclear,
            x2_nuclear: start_nuclear,
            stagnation_norm,
        }
    }

    fn x_center(&self, l: f64) -> DenseMatrix {
        let mut c = self.anchor.x.clone();
        c.axpy(-1.0 / l, &self.sigma.x);
        c
    }
}

/// One accelerated step.
pub fn inner_step(sub: &Subproblem<'_>, st: &mut InnerState) -> Result<()> {
    sub.check_point(&st.anchor)?;
    let spec = sub.spec;
    let l = sub.lipschitz;
    let t = st.theta;

    st.p3 = Point::lerp(&st.p1, &st.p2, t);
    let (_, g) = sub.smooth(&st.p3);
    st.sigma.axpy(1.0 / t, &g);
    st.weight_sum += 1.0 / t;
    let w = st.weight_sum;

    let cx = st.x_center(l);
    let x2_nuclear;
    if spec.mu1 > 0.0 {
        let sh = shrink_matrix(
            &cx,
            sub.lambda * spec.mu1 * w / l,
            spec.alpha,
            sub.eta_k / spec.mu1,
        )?;
        st.svd_count += usize::from(sh.used_svd);
        x2_nuclear = match &sh.spectrum {
            Some(d) => d.iter().sum(),
            None => {
                let r = spec.m.min(spec.n) as f64;
                r.sqrt() * sh.constrained.frobenius_norm()
            }
        };
        st.p2.x = sh.constrained;
        st.x2_breve = sh.unconstrained;
    } else {
        x2_nuclear = f64::INFINITY;
        st.p2.x = cx.clone();
        st.x2_breve = cx;
    }

    let mut cs = st.anchor.s.clone();
    cs.axpy(-1.0 / l, &st.sigma.s);
    st.p2.s = DenseVector::from_vec_unchecked(shrink_slice(
        cs.as_slice(),
        sub.lambda * spec.mu2 * w / l,
        spec.beta,
    ));

    let mut cy = st.anchor.y.clone();
    cy.axpy(-1.0 / l, &st.sigma.y);
    st.p2.y = DenseVector::from_vec_unchecked(project_slice(cy.as_slice(), spec.gamma, spec.rho));

    let new_p1 = Point::lerp(&st.p1, &st.p2, t);
    let dx = new_p1.x.sub(&st.p1.x);
    let ds = new_p1.s.sub(&st.p1.s);
    st.last_delta = Some(match st.stagnation_norm {
        StagnationNorm::Euclidean => (dx.frobenius_norm(), ds.norm2()),
        StagnationNorm::MaxEntry => (dx.max_abs(), slice_norm(ds.as_slice(), NormIndex::Inf)),
    });
    st.p1 = new_p1;
    // the first step has t = 1 and discards the start entirely
    st.x1_nuclear_bound = if t >= 1.0 {
        x2_nuclear
    } else {
        (1.0 - t) * st.x1_nuclear_bound + t * x2_nuclear
    };
    st.x2_nuclear = x2_nuclear;

    st.theta = theta_next(t);
    st.ell += 1;
    debug_assert!(
        (st.weight_sum * t * t - 1.0).abs() < 1e-9,
        "weight identity broken: {} vs {}",
        st.weight_sum,
        1.0 / (t * t)
    );
    Ok(())
}

/// Subgradient evidence (G, g, φ) for the current x2 iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub g_matrix: DenseMatrix,
    pub g_vec: DenseVector,
    pub phi: f64,
}

impl Certificate {
    pub fn norms(&self) -> (f64, f64, f64) {
        (self.g_matrix.frobenius_norm(), self.g_vec.norm2(), self.phi)
    }
}

/// G = λμ1·Q + ∇_X f(x2, s2, y2) with λμ1·Q = (L/W)(X_center − X̆2);
/// g = least-norm element of λμ2·∂‖s2‖_β + ∇_s f;
/// φ = ρ‖∇_y f‖_{γ*} + ∇_y fᵀ y2.
pub fn certificate(sub: &Subproblem<'_>, st: &InnerState) -> Result<Certificate> {
    certificate_at(sub, st, false)
}

/// Same as [`certificate`] but with ∇f taken at (X̆2, s2, y2): the
/// certificate of a plain prox-gradient step, used by the adaptive schedule.
pub fn probe_certificate(sub: &Subproblem<'_>, st: &InnerState) -> Result<Certificate> {
    certificate_at(sub, st, true)
}

fn certificate_at(sub: &Subproblem<'_>, st: &InnerState, at_breve: bool) -> Result<Certificate> {
    if st.ell == 0 {
        return Err(FalcError::InvalidArgument("certificate before first step".into()));
    }
    let spec = sub.spec;
    let l = sub.lipschitz;
    let grad = if at_breve {
        let p = Point {
            x: st.x2_breve.clone(),
            s: st.p2.s.clone(),
            y: st.p2.y.clone(),
        };
        sub.smooth(&p).1
    } else {
        sub.smooth(&st.p2).1
    };

    let mut g_matrix = st.x_center(l);
    g_matrix.axpy(-1.0, &st.x2_breve);
    g_matrix.scale(l / st.weight_sum);
    g_matrix.axpy(1.0, &grad.x);

    let g_vec = DenseVector::from_vec_unchecked(least_norm_subgradient(
        st.p2.s.as_slice(),
        grad.s.as_slice(),
        sub.lambda * spec.mu2,
        spec.beta,
    ));

    let phi = if grad.y.is_empty() {
        0.0
    } else {
        let gy = grad.y.as_slice();
        let support = spec.rho * slice_norm(gy, spec.gamma.dual());
        let inner = dot(gy, st.p2.y.as_slice());
        let phi = support + inner;
        // both terms cancel exactly when y sits on the face the gradient
        // points away from; anything at rounding level is that case
        if phi <= 64.0 * f64::EPSILON * (support + inner.abs()) {
            0.0
        } else {
            phi
        }
    };
    Ok(Certificate {
        g_matrix,
        g_vec,
        phi,
    })
}

/// argmin { ‖w·p + grad‖₂ : p ∈ ∂‖·‖_β at s }.
pub fn least_norm_subgradient(s: &[f64], grad: &[f64], w: f64, beta: NormIndex) -> Vec<f64> {
    if w == 0.0 {
        return grad.to_vec();
    }
    match beta {
        NormIndex::One => s
            .iter()
            .zip(grad)
            .map(|(&sj, &gj)| {
                if sj != 0.0 {
                    w.copysign(sj) + gj
                } else {
                    // clip −grad into [−w, w]
                    let a = gj.abs() - w;
                    if a > 0.0 {
                        a.copysign(gj)
                    } else {
                        0.0
                    }
                }
            })
            .collect(),
        NormIndex::Two => {
            let ns = slice_norm(s, NormIndex::Two);
            if ns > 0.0 {
                s.iter().zip(grad).map(|(sj, gj)| w * sj / ns + gj).collect()
            } else {
                shrink_slice(grad, w, NormIndex::Two)
            }
        }
        NormIndex::Inf => {
            let ns = slice_norm(s, NormIndex::Inf);
            if ns == 0.0 {
                // ∂‖0‖_∞ is the unit ℓ1 ball
                return shrink_slice(grad, w, NormIndex::Inf);
            }
            // active coordinates carry w·sign(s_j)·c_j with c on the simplex;
            // minimizing Σ(w·sign_j·c_j + g_j)² puts c = Π_simplex(−sign_j g_j / w)
            let active: Vec<usize> = (0..s.len()).filter(|&j| s[j].abs() == ns).collect();
            let target: Vec<f64> = active
                .iter()
                .map(|&j| -s[j].signum() * grad[j] / w)
                .collect();
            let c = project_simplex(&target);
            let mut out = grad.to_vec();
            for (&j, cj) in active.iter().zip(c) {
                out[j] += w * s[j].signum() * cj;
            }
            out
        }
    }
}

/// Euclidean projection onto {c ≥ 0, Σc = 1}.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let cand = (cum - 1.0) / (k + 1) as f64;
        if uk > cand {
            tau = cand;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// How iterate stagnation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StagnationNorm {
    /// ‖ΔX‖_F and ‖Δs‖₂.
    #[default]
    Euclidean,
    /// Largest entry of |ΔX| and |Δs|.
    MaxEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopThresholds {
    pub x: f64,
    pub s: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    pub tau_x: f64,
    pub tau_s: f64,
    pub xi: f64,
    /// Iterate-stagnation threshold ϱ.
    pub stagnation: f64,
    pub stagnation_norm: StagnationNorm,
    /// Global subgradient stop ς, if enabled.
    pub global_stop: Option<StopThresholds>,
    pub stagnation_exit: StagnationExit,
}

/// Which iterate a stagnation stop hands back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StagnationExit {
    /// The last prox output (x2, s2, y2). Its zero pattern is exact and it
    /// is the point the certificate was evaluated at.
    #[default]
    Prox,
    /// The averaged sequence (x1, s1, y1), which mixes every prox output of
    /// the current inner loop.
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Iteration budget from the complexity bound reached: the iterate is
    /// ε-optimal by construction.
    GapBound,
    /// (G, g, φ) below (τ_X, τ_s, ξ).
    SubgradientBound,
    /// Budget cap hit before the complexity bound.
    BudgetExhausted,
    /// Successive x1 iterates stopped moving.
    StationaryIterates,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::GapBound => "gap_bound",
            Branch::SubgradientBound => "subgradient_bound",
            Branch::BudgetExhausted => "budget_exhausted",
            Branch::StationaryIterates => "stationary_iterates",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerCertificate {
    pub branch: Branch,
    pub g_matrix_norm: f64,
    pub g_vec_norm: f64,
    pub phi: f64,
    pub iterations: usize,
    pub svd_count: usize,
}

/// Iteration budget; `capped` marks a budget cut below the complexity bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub steps: usize,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome {
    pub point: Point,
    pub certificate: InnerCertificate,
    /// Stagnation or the ς test fired: the outer loop should stop.
    pub global_stop: bool,
    /// Upper bound on ‖X‖_* of the returned point.
    pub x_nuclear_bound: f64,
}

/// Runs inner steps from `start` until a stopping rule fires.
pub fn run_inner(
    sub: &Subproblem<'_>,
    start: Point,
    opts: &InnerOptions,
    budget: Budget,
) -> Result<InnerOutcome> {
    let mut st = InnerState::with_norm(start, opts.stagnation_norm, f64::INFINITY);
    inner_step(sub, &mut st)?;
    finish_inner(sub, st, opts, budget)
}

/// Continues a state that has taken at least one step, testing the
/// stopping rules after every step.
pub fn finish_inner(
    sub: &Subproblem<'_>,
    mut st: InnerState,
    opts: &InnerOptions,
    budget: Budget,
) -> Result<InnerOutcome> {
    if budget.steps == 0 {
        return Err(FalcError::InvalidArgument("inner budget is zero".into()));
    }
    if st.ell == 0 {
        inner_step(sub, &mut st)?;
    }
    loop {
        let cert = certificate(sub, &st)?;
        let (gx, gs, phi) = cert.norms();
        let record = |branch| InnerCertificate {
            branch,
            g_matrix_norm: gx,
            g_vec_norm: gs,
            phi,
            iterations: st.ell,
            svd_count: st.svd_count,
        };

        if let Some((dx, ds)) = st.last_delta {
            if dx <= opts.stagnation && ds <= opts.stagnation {
                let (point, x_nuclear_bound) = match opts.stagnation_exit {
                    StagnationExit::Prox => (st.p2, st.x2_nuclear),
                    StagnationExit::Averaged => (st.p1, st.x1_nuclear_bound),
                };
                return Ok(InnerOutcome {
                    certificate: record(Branch::StationaryIterates),
                    point,
                    global_stop: true,
                    x_nuclear_bound,
                });
            }
        }
        if let Some(th) = opts.global_stop {
            if gx <= th.x && gs <= th.s && phi <= th.y {
                return Ok(InnerOutcome {
                    certificate: record(Branch::SubgradientBound),
                    point: st.p2,
                    global_stop: true,
                    x_nuclear_bound: st.x2_nuclear,
                });
            }
        }
        if gx <= opts.tau_x && gs <= opts.tau_s && phi <= opts.xi {
            return Ok(InnerOutcome {
                certificate: record(Branch::SubgradientBound),
                point: st.p2,
                global_stop: false,
                x_nuclear_bound: st.x2_nuclear,
            });
        }
        if st.ell >= budget.steps {
            let branch = if budget.capped {
                Branch::BudgetExhausted
            } else {
                Branch::GapBound
            };
            return Ok(InnerOutcome {
                certificate: record(branch),
                point: st.p1,
                global_stop: false,
                x_nuclear_bound: st.x1_nuclear_bound,
            });
        }
        inner_step(sub, &mut st)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_first_value_and_identity() {
        let t1 = theta_next(1.0);
        assert!((t1 - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let mut t = 1.0;
        for _ in 0..50 {
            let n = theta_next(t);
            assert!(n > 0.0 && n < t);
            assert!(((1.0 - n) / (n * n) - 1.0 / (t * t)).abs() <= 1e-12 * (1.0 / (t * t)));
            t = n;
        }
    }

    #[test]
    fn least_norm_l1() {
        let g = least_norm_subgradient(&[0.0, 0.0, 2.0], &[0.3, -2.0, 0.1], 1.0, NormIndex::One);
        assert_eq!(g, vec![0.0, -1.0, 1.1]);
    }

    #[test]
    fn least_norm_inf_active_set() {
        // s = (1, −1, 0.5): active {0, 1}; grad (−0.2, −0.2, 0.3), w = 1
        let g = least_norm_subgradient(&[1.0, -1.0, 0.5], &[-0.2, -0.2, 0.3], 1.0, NormIndex::Inf);
        // c = Π_simplex(0.2, −0.2) = (0.7, 0.3)
        assert!((g[0] - 0.5).abs() < 1e-15);
        assert!((g[1] - (-0.5)).abs() < 1e-15);
        assert_eq!(g[2], 0.3);
    }

    #[test]
    fn simplex_projection() {
        let c = project_simplex(&[0.2, -0.2]);
        assert!((c[0] - 0.7).abs() < 1e-15 && (c[1] - 0.3).abs() < 1e-15);
        let c = project_simplex(&[5.0, 0.0, 0.0]);
        assert_eq!(c, vec![1.0, 0.0, 0.0]);
    }
}
