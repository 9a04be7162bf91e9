use nalgebra::{DMatrix, DVector};

use crate::error::ObserverError;
use crate::scalar::{lit, Real};
use crate::sysid::AugmentedModel;

/// Noise model of the perturbation observer.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanConfig<T: Real> {
    /// Process noise covariance, augmented-state sized.
    pub cq: DMatrix<T>,
    /// Measurement noise covariance, one row per measured output.
    pub cs: DMatrix<T>,
    /// Initial estimate covariance.
    pub p0: DMatrix<T>,
}

/// Scalar tuning knobs used to build a diagonal [`KalmanConfig`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KalmanTuning {
    /// Measurement standard deviation, °C.
    pub sensor_std: f64,
    /// Process noise variance on the ROM states.
    pub state_noise: f64,
    /// Process noise variance on the perturbation states.
    pub perturbation_noise: f64,
    /// Initial covariance scale.
    pub initial_covariance: f64,
}

impl Default for KalmanTuning {
    fn default() -> Self {
        Self { sensor_std: 0.1, state_noise: 1e-6, perturbation_noise: 1e-2, initial_covariance: 1.0 }
    }
}

impl<T: Real> KalmanConfig<T> {
    /// Block-diagonal config for `model` with `measured` sensor rows.
    pub fn from_tuning(model: &AugmentedModel<T>, measured: usize, tuning: &KalmanTuning) -> Self {
        let n = model.states();
        let off = model.perturbation_offset();
        let cq = DMatrix::from_fn(n, n, |i, j| {
            if i != j {
                T::zero()
            } else if i >= off {
                lit(tuning.perturbation_noise)
            } else {
                lit(tuning.state_noise)
            }
        });
        Self {
            cq,
            cs: DMatrix::identity(measured, measured) * lit::<T>(tuning.sensor_std * tuning.sensor_std),
            p0: DMatrix::identity(n, n) * lit::<T>(tuning.initial_covariance),
        }
    }

    pub fn validate(&self, states: usize, measured: usize) -> Result<(), ObserverError> {
        if self.cq.shape() != (states, states) || self.p0.shape() != (states, states) {
            return Err(ObserverError::Dimension(format!("Cq and P0 must be {states}x{states}")));
        }
        if self.cs.shape() != (measured, measured) {
            return Err(ObserverError::Dimension(format!("Cs must be {measured}x{measured}")));
        }
        for (name, m) in [("Cq", &self.cq), ("P0", &self.p0)] {
            if !is_symmetric_psd(m) {
                return Err(ObserverError::Config(format!("{name} must be symmetric positive semidefinite")));
            }
        }
        if !is_symmetric_psd(&self.cs) || self.cs.clone().cholesky().is_none() {
            return Err(ObserverError::Config("Cs must be symmetric positive definite".into()));
        }
        Ok(())
    }
}

fn is_symmetric_psd<T: Real>(m: &DMatrix<T>) -> bool {
    let scale = m.amax().max(T::one());
    let tol = scale * lit(1e-9);
    if (m - m.transpose()).amax() > tol {
        return false;
    }
    m.clone().symmetric_eigen().eigenvalues.iter().all(|&e| e >= -tol)
}

/// Estimate of the augmented state and its covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState<T: Real> {
    pub x_hat: DVector<T>,
    pub p_k: DMatrix<T>,
    pub gain_last: Option<DMatrix<T>>,
    pub innovation_last: Option<DVector<T>>,
}

impl<T: Real> ObserverState<T> {
    pub fn new(x_hat: DVector<T>, p_k: DMatrix<T>) -> Self {
        Self { x_hat, p_k, gain_last: None, innovation_last: None }
    }
}

/// Time update: `x̃ = A_m x̂ + B_m u`, `P̃ = A_m P A_mᵀ + C_q`.
pub fn predict<T: Real>(
    obs: &ObserverState<T>,
    model: &AugmentedModel<T>,
    cq: &DMatrix<T>,
    u: &DVector<T>,
) -> ObserverState<T> {
    let x = &model.a_m * &obs.x_hat + &model.b_m * u;
    let p = &model.a_m * &obs.p_k * model.a_m.transpose() + cq;
    ObserverState { x_hat: x, p_k: symmetrize(p), gain_last: obs.gain_last.clone(), innovation_last: None }
}

/// Measurement update with output matrix `c` (all of `C_m` or a row selection of it).
///
/// `K = P̃ Cᵀ (C P̃ Cᵀ + C_s)⁻¹`, `x̂ = x̃ + K (z - C x̃)`, `P = (I - K C) P̃`.
pub fn update<T: Real>(
    obs: &ObserverState<T>,
    c: &DMatrix<T>,
    cs: &DMatrix<T>,
    z: &DVector<T>,
) -> Result<ObserverState<T>, ObserverError> {
    if c.ncols() != obs.x_hat.len() || c.nrows() != z.len() || cs.shape() != (z.len(), z.len()) {
        return Err(ObserverError::Dimension(format!(
            "C is {}x{}, state {}, z {}, Cs {}x{}",
            c.nrows(),
            c.ncols(),
            obs.x_hat.len(),
            z.len(),
            cs.nrows(),
            cs.ncols()
        )));
    }
    let pct = &obs.p_k * c.transpose();
    let s = c * &pct + cs;
    let chol = s.cholesky().ok_or(ObserverError::SingularInnovation)?;
    // K = P̃Cᵀ S⁻¹  ⇔  Kᵀ = S⁻¹ (C P̃)
    let gain = chol.solve(&pct.transpose()).transpose();
    let innovation = z - c * &obs.x_hat;
    let x_hat = &obs.x_hat + &gain * &innovation;
    let n = obs.x_hat.len();
    let p_k = (DMatrix::identity(n, n) - &gain * c) * &obs.p_k;
    Ok(ObserverState { x_hat, p_k: symmetrize(p_k), gain_last: Some(gain), innovation_last: Some(innovation) })
}

/// Joseph-stabilised covariance update, used as a cross-check.
pub fn joseph_covariance<T: Real>(p_pred: &DMatrix<T>, gain: &DMatrix<T>, c: &DMatrix<T>, cs: &DMatrix<T>) -> DMatrix<T> {
    let n = p_pred.nrows();
    let ikc = DMatrix::identity(n, n) - gain * c;
    &ikc * p_pred * ikc.transpose() + gain * cs * gain.transpose()
}

pub(crate) fn symmetrize<T: Real>(p: DMatrix<T>) -> DMatrix<T> {
    let half = lit::<T>(0.5);
    (&p + p.transpose()) * half
}
