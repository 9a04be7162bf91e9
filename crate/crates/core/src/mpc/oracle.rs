//! Reference solvers for box-constrained QPs, used to cross-check Hildreth.
//!
//! Both minimise `½ xᵀHx + fᵀx` subject to `lo ≤ x ≤ hi` with `H` positive definite.

use nalgebra::{DMatrix, DVector};

use crate::error::MpcError;

/// Bound status of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Free,
    Lower,
    Upper,
}

fn check(h: &DMatrix<f64>, f: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> Result<usize, MpcError> {
    let n = f.len();
    if h.shape() != (n, n) || lo.len() != n || hi.len() != n {
        return Err(MpcError::Dimension("box QP dimensions disagree".into()));
    }
    if (0..n).any(|i| !(lo[i] <= hi[i])) {
        return Err(MpcError::Config("empty box".into()));
    }
    Ok(n)
}

/// Minimiser over the free variables with the others pinned to their bounds.
fn solve_with(h: &DMatrix<f64>, f: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>, set: &[Bound]) -> Option<DVector<f64>> {
    let n = f.len();
    let mut x = DVector::from_fn(n, |i, _| match set[i] {
        Bound::Lower => lo[i],
        Bound::Upper => hi[i],
        Bound::Free => 0.0,
    });
    let free: Vec<usize> = (0..n).filter(|&i| set[i] == Bound::Free).collect();
    if free.is_empty() {
        return Some(x);
    }
    let hff = DMatrix::from_fn(free.len(), free.len(), |a, b| h[(free[a], free[b])]);
    let g = h * &x + f;
    let rhs = DVector::from_fn(free.len(), |a, _| -g[free[a]]);
    let sol = hff.cholesky()?.solve(&rhs);
    for (a, &i) in free.iter().enumerate() {
        x[i] = sol[a];
    }
    Some(x)
}

/// Projected-gradient residual `‖x − clip(x − ∇q(x))‖∞` plus bound violation; zero exactly at the optimum.
pub fn box_kkt_residual(h: &DMatrix<f64>, f: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let g = h * x + f;
    (0..x.len())
        .map(|i| {
            let infeas = (lo[i] - x[i]).max(x[i] - hi[i]).max(0.0);
            let projected = x[i] - (x[i] - g[i]).max(lo[i]).min(hi[i]);
            infeas.max(projected.abs())
        })
        .fold(0.0, f64::max)
}

/// Enumerates all `3ⁿ` bound patterns and keeps the feasible KKT point.
///
/// Only practical for small `n`; refuses `n > 12`.
pub fn box_qp_exhaustive(h: &DMatrix<f64>, f: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> Result<DVector<f64>, MpcError> {
    let n = check(h, f, lo, hi)?;
    if n > 12 {
        return Err(MpcError::Dimension(format!("exhaustive enumeration refused for n = {n}")));
    }
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut set = vec![Bound::Free; n];
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        for s in set.iter_mut() {
            *s = [Bound::Free, Bound::Lower, Bound::Upper][c % 3];
            c /= 3;
        }
        let Some(x) = solve_with(h, f, lo, hi, &set) else { continue };
        if (0..n).any(|i| x[i] < lo[i] - 1e-12 || x[i] > hi[i] + 1e-12) {
            continue;
        }
        let obj = 0.5 * x.dot(&(h * &x)) + f.dot(&x);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    best.map(|(_, x)| x).ok_or(MpcError::NotPositiveDefinite)
}

/// Primal active-set method with exact line search to the first blocking bound.
pub fn box_qp_active_set(h: &DMatrix<f64>, f: &DVector<f64>, lo: &DVector<f64>, hi: &DVector<f64>) -> Result<DVector<f64>, MpcError> {
    let n = check(h, f, lo, hi)?;
    let mut x = DVector::from_fn(n, |i, _| 0.0f64.max(lo[i]).min(hi[i]));
    let mut set: Vec<Bound> = (0..n)
        .map(|i| if x[i] == lo[i] { Bound::Lower } else if x[i] == hi[i] { Bound::Upper } else { Bound::Free })
        .collect();
    for _ in 0..(50 * n + 100) {
        let target = solve_with(h, f, lo, hi, &set).ok_or(MpcError::NotPositiveDefinite)?;
        let step = &target - &x;
        if step.amax() <= 1e-14 * (1.0 + x.amax()) {
            let g = h * &x + f;
            // multiplier of a pinned bound: g for lower, -g for upper
            let worst = (0..n)
                .filter_map(|i| match set[i] {
                    Bound::Lower => Some((i, g[i])),
                    Bound::Upper => Some((i, -g[i])),
                    Bound::Free => None,
                })
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((i, mult)) if mult < -1e-13 * (1.0 + g.amax()) => set[i] = Bound::Free,
                _ => return Ok(x),
            }
            continue;
        }
        let mut alpha = 1.0;
        let mut blocking = None;
        for i in 0..n {
            if set[i] != Bound::Free {
                continue;
            }
            if step[i] > 0.0 && x[i] + step[i] > hi[i] {
                let a = (hi[i] - x[i]) / step[i];
                if a < alpha {
                    alpha = a;
                    blocking = Some((i, Bound::Upper));
                }
            } else if step[i] < 0.0 && x[i] + step[i] < lo[i] {
                let a = (lo[i] - x[i]) / step[i];
                if a < alpha {
                    alpha = a;
                    blocking = Some((i, Bound::Lower));
                }
            }
        }
        x += step * alpha;
        if let Some((i, b)) = blocking {
            x[i] = if b == Bound::Upper { hi[i] } else { lo[i] };
            set[i] = b;
        }
    }
    Err(MpcError::Config("active-set oracle did not terminate".into()))
}
