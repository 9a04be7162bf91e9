//! Hildreth's dual coordinate-ascent method for strictly convex QPs.
//!
//! Solves `min ½ xᵀ H x + fᵀ x` subject to `M x ≤ γ`. The unconstrained minimiser
//! is returned directly when it is feasible; otherwise the dual
//! `min_{λ ≥ 0} ½ λᵀ P λ + λᵀ d` with `P = M H⁻¹ Mᵀ`, `d = γ + M H⁻¹ f` is solved
//! one multiplier at a time and the primal is recovered as `x = -H⁻¹ (f + Mᵀ λ)`.

use nalgebra::{DMatrix, DVector};

use crate::error::MpcError;
use crate::scalar::{lit, Real};

/// `min ½ xᵀ H x + fᵀ x` s.t. `M x ≤ γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem<T: Real> {
    pub h: DMatrix<T>,
    pub f: DVector<T>,
    pub m: DMatrix<T>,
    pub gamma: DVector<T>,
}

impl<T: Real> QpProblem<T> {
    pub fn objective(&self, x: &DVector<T>) -> T {
        (x.transpose() * &self.h * x)[(0, 0)] * lit(0.5) + self.f.dot(x)
    }

    /// Largest constraint violation `max(M x - γ)`, zero if feasible.
    pub fn max_violation(&self, x: &DVector<T>) -> T {
        (&self.m * x - &self.gamma).iter().fold(T::zero(), |acc, &v| acc.max(v))
    }

    /// Two-sided bounds `lo ≤ x ≤ hi` as `[I; -I] x ≤ [hi; -lo]`.
    pub fn box_constrained(h: DMatrix<T>, f: DVector<T>, lo: &DVector<T>, hi: &DVector<T>) -> Self {
        let n = f.len();
        let mut m = DMatrix::zeros(2 * n, n);
        let mut gamma = DVector::zeros(2 * n);
        for i in 0..n {
            m[(i, i)] = T::one();
            m[(n + i, i)] = -T::one();
            gamma[i] = hi[i];
            gamma[n + i] = -lo[i];
        }
        Self { h, f, m, gamma }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HildrethOptions {
    /// Stop when the largest multiplier change in a sweep falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Record the dual objective after every sweep.
    #[serde(default)]
    pub trace: bool,
}

impl Default for HildrethOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 500, trace: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum HildrethStatus {
    /// The unconstrained minimiser already satisfies every constraint.
    Unconstrained,
    Converged,
    /// Iteration cap reached; `x` is the last iterate.
    MaxIterations,
    /// Multipliers keep growing while the primal stays infeasible.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HildrethSolution<T: Real> {
    pub x: DVector<T>,
    pub lambda: DVector<T>,
    pub iterations: usize,
    pub status: HildrethStatus,
    /// Dual objective `½ λᵀ P λ + λᵀ d` after each sweep (only with `trace`).
    pub dual_trace: Vec<T>,
}

impl<T: Real> HildrethSolution<T> {
    pub fn active_constraints(&self) -> usize {
        self.lambda.iter().filter(|&&l| l > T::zero()).count()
    }
}

pub fn hildreth_solve<T: Real>(problem: &QpProblem<T>, opts: &HildrethOptions) -> Result<HildrethSolution<T>, MpcError> {
    let n = problem.f.len();
    let nc = problem.gamma.len();
    if problem.h.shape() != (n, n) || problem.m.shape() != (nc, n) {
        return Err(MpcError::Dimension(format!(
            "H {:?}, f {}, M {:?}, γ {}",
            problem.h.shape(),
            n,
            problem.m.shape(),
            nc
        )));
    }
    let chol = problem.h.clone().cholesky().ok_or(MpcError::NotPositiveDefinite)?;
    let x_unc = -chol.solve(&problem.f);
    if nc == 0 || (&problem.m * &x_unc - &problem.gamma).iter().all(|&v| v <= T::zero()) {
        return Ok(HildrethSolution {
            x: x_unc,
            lambda: DVector::zeros(nc),
            iterations: 0,
            status: HildrethStatus::Unconstrained,
            dual_trace: Vec::new(),
        });
    }

    // Z = H⁻¹ Mᵀ, P = M Z, d = γ - M x_unc
    let z = chol.solve(&problem.m.transpose());
    let p = &problem.m * &z;
    let d = &problem.gamma - &problem.m * &x_unc;
    let tol = lit::<T>(opts.tol);

    let dual = |lambda: &DVector<T>| (lambda.transpose() * &p * lambda)[(0, 0)] * lit(0.5) + lambda.dot(&d);
    let mut lambda = DVector::<T>::zeros(nc);
    let mut trace = Vec::new();
    let mut status = HildrethStatus::MaxIterations;
    let mut iterations = 0;
    let mut norm_at_half = T::zero();
    for iter in 1..=opts.max_iter {
        iterations = iter;
        let mut change = T::zero();
        for i in 0..nc {
            let pii = p[(i, i)];
            if pii <= T::zero() {
                continue;
            }
            // P is symmetric: column access is contiguous
            let w = -(d[i] + p.column(i).dot(&lambda) - pii * lambda[i]) / pii;
            let next = w.max(T::zero());
            change = change.max((next - lambda[i]).abs());
            lambda[i] = next;
        }
        if opts.trace {
            trace.push(dual(&lambda));
        }
        if iter == opts.max_iter / 2 {
            norm_at_half = lambda.norm();
        }
        if change < tol {
            status = HildrethStatus::Converged;
            break;
        }
    }
    let x = &x_unc - &z * &lambda;
    if status == HildrethStatus::MaxIterations {
        let scale = T::one() + problem.gamma.amax();
        let violated = problem.max_violation(&x) > scale * lit(1e-6);
        let growing = lambda.norm() > norm_at_half * lit(1.5) && norm_at_half > T::zero();
        if violated && growing {
            status = HildrethStatus::Infeasible;
        }
    }
    Ok(HildrethSolution { x, lambda, iterations, status, dual_trace: trace })
}
