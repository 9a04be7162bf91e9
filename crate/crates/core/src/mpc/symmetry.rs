use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::MpcError;
use crate::scalar::Real;

use super::hildreth::QpProblem;

/// Heater pairs forced to share the same command, 1-based.
pub const MOLD_SYMMETRY_PAIRS: [(usize, usize); 10] = [
    (1, 8),
    (2, 7),
    (3, 6),
    (4, 5),
    (9, 16),
    (10, 15),
    (11, 14),
    (12, 13),
    (17, 18),
    (19, 20),
];

/// Maps each input to a free variable; paired inputs share one.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryMap {
    /// `input -> free variable`.
    slot: Vec<usize>,
    free: usize,
}

impl SymmetryMap {
    /// `pairs` are 1-based input numbers and must be disjoint.
    pub fn new(inputs: usize, pairs: &[(usize, usize)]) -> Result<Self, MpcError> {
        let mut partner: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in pairs {
            if a == 0 || b == 0 || a > inputs || b > inputs || a == b {
                return Err(MpcError::Config(format!("invalid symmetry pair ({a}, {b}) for {inputs} inputs")));
            }
            for (x, y) in [(a - 1, b - 1), (b - 1, a - 1)] {
                if partner.insert(x, y).is_some() {
                    return Err(MpcError::Config(format!("input U{} appears in more than one symmetry pair", x + 1)));
                }
            }
        }
        let mut slot = vec![usize::MAX; inputs];
        let mut free = 0;
        for i in 0..inputs {
            if slot[i] != usize::MAX {
                continue;
            }
            slot[i] = free;
            if let Some(&j) = partner.get(&i) {
                slot[j] = free;
            }
            free += 1;
        }
        Ok(Self { slot, free })
    }

    pub fn identity(inputs: usize) -> Self {
        Self { slot: (0..inputs).collect(), free: inputs }
    }

    pub fn inputs(&self) -> usize {
        self.slot.len()
    }

    pub fn free_variables(&self) -> usize {
        self.free
    }

    pub fn is_identity(&self) -> bool {
        self.free == self.slot.len()
    }

    /// `inputs × free` matrix with a single unit entry per row.
    pub fn expansion<T: Real>(&self) -> DMatrix<T> {
        let mut e = DMatrix::zeros(self.inputs(), self.free);
        for (i, &s) in self.slot.iter().enumerate() {
            e[(i, s)] = T::one();
        }
        e
    }

    /// Copies reduced values into every input of their group (exact copies).
    pub fn expand<T: Real>(&self, reduced: &DVector<T>, horizon: usize) -> DVector<T> {
        let (nu, nf) = (self.inputs(), self.free);
        DVector::from_fn(nu * horizon, |k, _| {
            let (step, i) = (k / nu, k % nu);
            reduced[step * nf + self.slot[i]]
        })
    }

    /// Block-diagonal expansion over the horizon.
    pub fn horizon_expansion<T: Real>(&self, horizon: usize) -> DMatrix<T> {
        let e = self.expansion::<T>();
        let (nu, nf) = (self.inputs(), self.free);
        let mut full = DMatrix::zeros(nu * horizon, nf * horizon);
        for k in 0..horizon {
            full.view_mut((k * nu, k * nf), (nu, nf)).copy_from(&e);
        }
        full
    }
}

/// Substitutes `x = E x_r` into `problem`; duplicate constraint rows are dropped.
pub fn apply_symmetry<T: Real>(problem: &QpProblem<T>, map: &SymmetryMap, horizon: usize) -> QpProblem<T> {
    if map.is_identity() {
        return problem.clone();
    }
    let e = map.horizon_expansion::<T>(horizon);
    let h = e.transpose() * &problem.h * &e;
    let f = e.transpose() * &problem.f;
    let m_full = &problem.m * &e;
    let mut keep: Vec<usize> = Vec::with_capacity(m_full.nrows());
    for i in 0..m_full.nrows() {
        let dup = keep.iter().any(|&k| problem.gamma[k] == problem.gamma[i] && m_full.row(k) == m_full.row(i));
        if !dup {
            keep.push(i);
        }
    }
    let m = DMatrix::from_fn(keep.len(), m_full.ncols(), |i, j| m_full[(keep[i], j)]);
    let gamma = DVector::from_fn(keep.len(), |i, _| problem.gamma[keep[i]]);
    QpProblem { h, f, m, gamma }
}
