use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

use super::arx::ArxModel;

/// Ordering of the ARX state `[Y_t; Y_{t-1}; …; U_{t-1}; U_{t-2}; …]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLayout {
    pub outputs: usize,
    pub output_lags: usize,
    pub inputs: usize,
    pub input_lags: usize,
}

impl StateLayout {
    pub fn dim(&self) -> usize {
        self.outputs * self.output_lags + self.inputs * self.input_lags
    }

    /// Offset of `Y_{t-lag}`.
    pub fn output_offset(&self, lag: usize) -> usize {
        lag * self.outputs
    }

    /// Offset of `U_{t-lag}`, `lag >= 1`.
    pub fn input_offset(&self, lag: usize) -> usize {
        self.outputs * self.output_lags + (lag - 1) * self.inputs
    }
}

/// `X[t+1] = A X[t] + B U[t]`, `Y[t] = C X[t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
    pub layout: StateLayout,
}

impl<T: Real> StateSpaceModel<T> {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn step(&self, x: &DVector<T>, u: &DVector<T>) -> DVector<T> {
        &self.a * x + &self.b * u
    }

    /// Stacks an output/input history into a state vector.
    ///
    /// `y_hist[i]` is `Y_{t-i}` for `i < r`; `u_hist[i]` is `U_{t-1-i}` for `i < s`.
    pub fn pack_state(&self, y_hist: &[DVector<T>], u_hist: &[DVector<T>]) -> DVector<T> {
        let l = self.layout;
        let mut x = DVector::zeros(l.dim());
        for (lag, y) in y_hist.iter().take(l.output_lags).enumerate() {
            x.rows_mut(l.output_offset(lag), l.outputs).copy_from(y);
        }
        for (i, u) in u_hist.iter().take(l.input_lags).enumerate() {
            x.rows_mut(l.input_offset(i + 1), l.inputs).copy_from(u);
        }
        x
    }
}

/// Realises an ARX model as a non-minimal state space with the lagged layout.
pub fn arx_to_statespace<T: Real>(model: &ArxModel<T>) -> StateSpaceModel<T> {
    let layout = StateLayout {
        outputs: model.outputs(),
        output_lags: model.r,
        inputs: model.inputs(),
        input_lags: model.s,
    };
    let (m, nu, n) = (layout.outputs, layout.inputs, layout.dim());
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, nu);
    let mut c = DMatrix::zeros(m, n);

    for (lag, ai) in model.a.iter().enumerate() {
        a.view_mut((0, layout.output_offset(lag)), (m, m)).copy_from(ai);
    }
    for lag in 1..=model.s {
        a.view_mut((0, layout.input_offset(lag)), (m, nu)).copy_from(&model.b[lag]);
    }
    for lag in 1..model.r {
        a.view_mut((layout.output_offset(lag), layout.output_offset(lag - 1)), (m, m))
            .fill_with_identity();
    }
    for lag in 2..=model.s {
        a.view_mut((layout.input_offset(lag), layout.input_offset(lag - 1)), (nu, nu))
            .fill_with_identity();
    }
    b.view_mut((0, 0), (m, nu)).copy_from(&model.b[0]);
    if model.s >= 1 {
        b.view_mut((layout.input_offset(1), 0), (nu, nu)).fill_with_identity();
    }
    c.view_mut((0, 0), (m, m)).fill_with_identity();
    StateSpaceModel { a, b, c, layout }
}

/// State space extended with random-walk perturbation states.
///
/// `A_m = [[A, B_p], [0, I]]`, `B_m = [[B], [0]]`, `C_m = [C, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedModel<T: Real> {
    pub a_m: DMatrix<T>,
    pub b_m: DMatrix<T>,
    pub c_m: DMatrix<T>,
    pub b_p: DMatrix<T>,
    pub base: StateSpaceModel<T>,
}

impl<T: Real> AugmentedModel<T> {
    pub fn states(&self) -> usize {
        self.a_m.nrows()
    }

    pub fn perturbations(&self) -> usize {
        self.b_p.ncols()
    }

    pub fn inputs(&self) -> usize {
        self.b_m.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c_m.nrows()
    }

    /// Offset of the perturbation block in the augmented state.
    pub fn perturbation_offset(&self) -> usize {
        self.base.states()
    }

    pub fn augment_state(&self, x: &DVector<T>, p: &DVector<T>) -> DVector<T> {
        let mut xm = DVector::zeros(self.states());
        xm.rows_mut(0, x.len()).copy_from(x);
        xm.rows_mut(x.len(), p.len()).copy_from(p);
        xm
    }
}

/// Adds `p` additive disturbances entering the `Y_t` block of the state.
///
/// Perturbation `j` feeds output slot `j`, so `p` may not exceed the output count.
pub fn augment_with_perturbations<T: Real>(ss: &StateSpaceModel<T>, p: usize) -> AugmentedModel<T> {
    assert!(p >= 1 && p <= ss.outputs(), "perturbation count must be in 1..=outputs");
    let mut b_p = DMatrix::zeros(ss.states(), p);
    for j in 0..p {
        b_p[(j, j)] = T::one();
    }
    augment_with_matrix(ss, b_p)
}

/// Augmentation with an arbitrary disturbance input matrix.
pub fn augment_with_matrix<T: Real>(ss: &StateSpaceModel<T>, b_p: DMatrix<T>) -> AugmentedModel<T> {
    let (n, nu, m, p) = (ss.states(), ss.inputs(), ss.outputs(), b_p.ncols());
    assert_eq!(b_p.nrows(), n, "B_p must have one row per state");
    let mut a_m = DMatrix::zeros(n + p, n + p);
    a_m.view_mut((0, 0), (n, n)).copy_from(&ss.a);
    a_m.view_mut((0, n), (n, p)).copy_from(&b_p);
    a_m.view_mut((n, n), (p, p)).fill_with_identity();
    let mut b_m = DMatrix::zeros(n + p, nu);
    b_m.view_mut((0, 0), (n, nu)).copy_from(&ss.b);
    let mut c_m = DMatrix::zeros(m, n + p);
    c_m.view_mut((0, 0), (m, n)).copy_from(&ss.c);
    AugmentedModel { a_m, b_m, c_m, b_p, base: ss.clone() }
}
