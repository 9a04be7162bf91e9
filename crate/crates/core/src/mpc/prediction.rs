use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

use super::extended::ExtendedSS;

/// Stacked predictions `Y = F X + G ΔU` over `horizon` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrices<T: Real> {
    /// `(m·Np) × n_e`, block `i` is `C_e A_e^{i+1}`.
    pub f: DMatrix<T>,
    /// `(m·Np) × (nu·Np)`, block `(i, j)` is `C_e A_e^{i-j} B_e` for `i >= j`.
    pub g: DMatrix<T>,
    pub horizon: usize,
    pub outputs: usize,
    pub inputs: usize,
}

impl<T: Real> PredictionMatrices<T> {
    pub fn predict(&self, x: &DVector<T>, du: &DVector<T>) -> DVector<T> {
        &self.f * x + &self.g * du
    }
}

pub fn build_prediction<T: Real>(ss: &ExtendedSS<T>, horizon: usize) -> PredictionMatrices<T> {
    assert!(horizon >= 1, "horizon must be >= 1");
    let (m, nu, ne) = (ss.outputs(), ss.inputs(), ss.states());
    let mut f = DMatrix::zeros(m * horizon, ne);
    let mut g = DMatrix::zeros(m * horizon, nu * horizon);
    // markov[k] = C_e A_e^k B_e
    let mut markov = Vec::with_capacity(horizon);
    let mut ca = ss.c_e.clone();
    for i in 0..horizon {
        markov.push(&ca * &ss.b_e);
        ca = &ca * &ss.a_e;
        f.view_mut((i * m, 0), (m, ne)).copy_from(&ca);
    }
    for i in 0..horizon {
        for j in 0..=i {
            g.view_mut((i * m, j * nu), (m, nu)).copy_from(&markov[i - j]);
        }
    }
    PredictionMatrices { f, g, horizon, outputs: m, inputs: nu }
}
