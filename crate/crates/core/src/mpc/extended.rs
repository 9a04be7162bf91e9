use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;
use crate::sysid::AugmentedModel;

/// Incremental form `X_e = [ΔX_m; Y_m]` driven by `ΔU`.
///
/// `A_e = [[A_m, 0], [C_m A_m, I]]`, `B_e = [[B_m], [C_m B_m]]`, `C_e = [0, I]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSS<T: Real> {
    pub a_e: DMatrix<T>,
    pub b_e: DMatrix<T>,
    pub c_e: DMatrix<T>,
    /// Augmented state size `n_m`.
    pub inner_states: usize,
}

impl<T: Real> ExtendedSS<T> {
    pub fn states(&self) -> usize {
        self.a_e.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b_e.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c_e.nrows()
    }

    /// `[x̂_t - x̂_{t-1}; C_m x̂_t]`.
    pub fn state_from(&self, c_m: &DMatrix<T>, x_hat: &DVector<T>, x_hat_prev: &DVector<T>) -> DVector<T> {
        let n = self.inner_states;
        let mut xe = DVector::zeros(self.states());
        xe.rows_mut(0, n).copy_from(&(x_hat - x_hat_prev));
        xe.rows_mut(n, self.outputs()).copy_from(&(c_m * x_hat));
        xe
    }
}

pub fn build_extended_ss<T: Real>(model: &AugmentedModel<T>) -> ExtendedSS<T> {
    let (n, m, nu) = (model.states(), model.outputs(), model.inputs());
    let mut a_e = DMatrix::zeros(n + m, n + m);
    a_e.view_mut((0, 0), (n, n)).copy_from(&model.a_m);
    a_e.view_mut((n, 0), (m, n)).copy_from(&(&model.c_m * &model.a_m));
    a_e.view_mut((n, n), (m, m)).fill_with_identity();
    let mut b_e = DMatrix::zeros(n + m, nu);
    b_e.view_mut((0, 0), (n, nu)).copy_from(&model.b_m);
    b_e.view_mut((n, 0), (m, nu)).copy_from(&(&model.c_m * &model.b_m));
    let mut c_e = DMatrix::zeros(m, n + m);
    c_e.view_mut((0, n), (m, m)).fill_with_identity();
    ExtendedSS { a_e, b_e, c_e, inner_states: n }
}
