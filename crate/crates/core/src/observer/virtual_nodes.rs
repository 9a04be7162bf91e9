use nalgebra::{DMatrix, DVector};

use crate::error::ObserverError;
use crate::scalar::Real;
use crate::sysid::{AugmentedModel, Baseline};

use super::kalman::{predict, update, KalmanConfig, ObserverState};

/// Kalman observer over an augmented ARX model whose first `measured` outputs are sensed.
///
/// With `measured == outputs` this is the plain perturbation observer; with more
/// model outputs than sensors the remaining rows are virtual nodes estimated
/// from the shared state. Inputs and outputs are in physical units (W, °C); the
/// baseline is removed internally.
#[derive(Debug, Clone)]
pub struct VirtualNodeEstimator<T: Real> {
    model: AugmentedModel<T>,
    config: KalmanConfig<T>,
    baseline: Baseline<T>,
    measured_rows: Vec<usize>,
    c_measured: DMatrix<T>,
    state: ObserverState<T>,
    previous_x_hat: DVector<T>,
}

impl<T: Real> VirtualNodeEstimator<T> {
    pub fn new(
        model: AugmentedModel<T>,
        config: KalmanConfig<T>,
        baseline: Baseline<T>,
        measured_rows: Vec<usize>,
    ) -> Result<Self, ObserverError> {
        let m = model.outputs();
        if measured_rows.is_empty() || measured_rows.iter().any(|&r| r >= m) {
            return Err(ObserverError::Config("measured rows must be a non-empty subset of the outputs".into()));
        }
        let mut sorted = measured_rows.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != measured_rows.len() {
            return Err(ObserverError::Config("measured rows repeat".into()));
        }
        if baseline.y.len() != m || baseline.u.len() != model.inputs() {
            return Err(ObserverError::Dimension("baseline does not match the model".into()));
        }
        config.validate(model.states(), measured_rows.len())?;
        let c_measured = DMatrix::from_fn(measured_rows.len(), model.states(), |i, j| model.c_m[(measured_rows[i], j)]);
        // x̂ at the baseline operating point: all deviations zero
        let x0 = DVector::zeros(model.states());
        let state = ObserverState::new(x0.clone(), config.p0.clone());
        Ok(Self { model, config, baseline, measured_rows, c_measured, state, previous_x_hat: x0 })
    }

    pub fn model(&self) -> &AugmentedModel<T> {
        &self.model
    }

    pub fn state(&self) -> &ObserverState<T> {
        &self.state
    }

    pub fn baseline(&self) -> &Baseline<T> {
        &self.baseline
    }

    pub fn measured_rows(&self) -> &[usize] {
        &self.measured_rows
    }

    /// Model output rows that are not measured.
    pub fn virtual_rows(&self) -> Vec<usize> {
        (0..self.model.outputs()).filter(|r| !self.measured_rows.contains(r)).collect()
    }

    /// Overwrites the estimate, e.g. to start from a known operating point.
    pub fn reset(&mut self, x_hat: DVector<T>) {
        self.previous_x_hat = x_hat.clone();
        self.state = ObserverState::new(x_hat, self.config.p0.clone());
    }

    /// Estimate in deviation coordinates and the one before the last step.
    pub fn x_hat(&self) -> &DVector<T> {
        &self.state.x_hat
    }

    pub fn previous_x_hat(&self) -> &DVector<T> {
        &self.previous_x_hat
    }

    fn deviation_u(&self, u: &DVector<T>) -> DVector<T> {
        u - &self.baseline.u
    }

    /// Time update with the input applied over the last period (W).
    pub fn predict(&mut self, u: &DVector<T>) {
        self.previous_x_hat = self.state.x_hat.clone();
        self.state = predict(&self.state, &self.model, &self.config.cq, &self.deviation_u(u));
    }

    /// Measurement update with the measured temperatures (°C).
    pub fn update(&mut self, z: &DVector<T>) -> Result<(), ObserverError> {
        if z.len() != self.measured_rows.len() {
            return Err(ObserverError::Dimension(format!("expected {} measurements, got {}", self.measured_rows.len(), z.len())));
        }
        let z_dev = DVector::from_fn(z.len(), |i, _| z[i] - self.baseline.y[self.measured_rows[i]]);
        self.state = update(&self.state, &self.c_measured, &self.config.cs, &z_dev)?;
        Ok(())
    }

    /// One-step output prediction `C_m x̃` (°C) for the input `u` without touching the estimate.
    pub fn predicted_outputs(&self, u: &DVector<T>) -> DVector<T> {
        let x = &self.model.a_m * &self.state.x_hat + &self.model.b_m * self.deviation_u(u);
        &self.model.c_m * x + &self.baseline.y
    }

    /// All model outputs `C_m x̂` (°C).
    pub fn outputs(&self) -> DVector<T> {
        &self.model.c_m * &self.state.x_hat + &self.baseline.y
    }

    /// Perturbation block of `x̂`.
    pub fn perturbations(&self) -> DVector<T> {
        let off = self.model.perturbation_offset();
        self.state.x_hat.rows(off, self.model.perturbations()).into_owned()
    }

    /// Unmeasured outputs of `C_m x̂` (°C).
    pub fn virtual_nodes(&self) -> DVector<T> {
        let y = self.outputs();
        DVector::from_iterator(self.model.outputs() - self.measured_rows.len(), self.virtual_rows().into_iter().map(|r| y[r]))
    }
}

/// Predict with `u`, update with `z`, and return the virtual-node temperatures (°C).
pub fn estimate_virtual_nodes<T: Real>(
    est: &mut VirtualNodeEstimator<T>,
    u: &DVector<T>,
    z: &DVector<T>,
) -> Result<DVector<T>, ObserverError> {
    est.predict(u);
    est.update(z)?;
    Ok(est.virtual_nodes())
}
