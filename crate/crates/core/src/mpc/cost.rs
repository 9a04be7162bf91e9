use nalgebra::{DMatrix, DVector};

use crate::error::MpcError;
use crate::scalar::Real;

use super::prediction::PredictionMatrices;

/// `(Ref - Y)ᵀ Q (Ref - Y) + ΔUᵀ R ΔU` with diagonal weights.
pub fn cost<T: Real>(reference: &DVector<T>, y: &DVector<T>, q: &DVector<T>, du: &DVector<T>, r: &DVector<T>) -> T {
    let tracking = reference.zip_zip_map(y, q, |rf, yy, w| w * (rf - yy) * (rf - yy)).sum();
    let effort = du.zip_map(r, |d, w| w * d * d).sum();
    tracking + effort
}

/// Adds the virtual-node term `(Ref - T̂)ᵀ Q_v (Ref - T̂)` to [`cost`].
pub fn cost_extended<T: Real>(
    reference: &DVector<T>,
    y: &DVector<T>,
    q: &DVector<T>,
    node_reference: &DVector<T>,
    nodes: &DVector<T>,
    q_nodes: &DVector<T>,
    du: &DVector<T>,
    r: &DVector<T>,
) -> T {
    cost(reference, y, q, du, r) + node_reference.zip_zip_map(nodes, q_nodes, |rf, t, w| w * (rf - t) * (rf - t)).sum()
}

/// `ΔU = (Gᵀ Q G + R)⁻¹ Gᵀ Q (Ref - F X)`.
pub fn unconstrained_solution<T: Real>(
    pred: &PredictionMatrices<T>,
    reference: &DVector<T>,
    x: &DVector<T>,
    q: &DVector<T>,
    r: &DVector<T>,
) -> Result<DVector<T>, MpcError> {
    let (h, rhs) = normal_form(&pred.g, &(reference - &pred.f * x), q, r);
    let chol = h.cholesky().ok_or(MpcError::NotPositiveDefinite)?;
    Ok(chol.solve(&rhs))
}

/// `(Gᵀ Q G + R, Gᵀ Q e)`.
pub(crate) fn normal_form<T: Real>(g: &DMatrix<T>, e: &DVector<T>, q: &DVector<T>, r: &DVector<T>) -> (DMatrix<T>, DVector<T>) {
    let mut qg = g.clone();
    for (i, mut row) in qg.row_iter_mut().enumerate() {
        row *= q[i];
    }
    let mut h = g.transpose() * &qg;
    for i in 0..h.nrows() {
        h[(i, i)] += r[i];
    }
    let rhs = qg.transpose() * e;
    (h, rhs)
}
