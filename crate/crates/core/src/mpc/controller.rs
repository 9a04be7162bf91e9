use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::MpcError;
use crate::scalar::{lit, to_f64, Real};
use crate::sysid::AugmentedModel;

use super::extended::{build_extended_ss, ExtendedSS};
use super::hildreth::{hildreth_solve, HildrethOptions, HildrethStatus, QpProblem};
use super::prediction::{build_prediction, PredictionMatrices};
use super::symmetry::{apply_symmetry, SymmetryMap};

/// Controller tuning. Powers are in W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MpcConfig {
    pub horizon: usize,
    /// Weight on measured outputs.
    pub q: f64,
    /// Optional per-output override of `q`, one entry per model output.
    pub q_per_output: Option<Vec<f64>>,
    /// Weight on input increments, expressed per `input_scale_w`.
    pub r: f64,
    /// Unit of the increments seen by `r` (1000 W means `r` is per kW²).
    pub input_scale_w: f64,
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    /// 1-based heater pairs forced to equal power.
    pub symmetry_pairs: Vec<(usize, usize)>,
    /// Penalise the unmeasured model outputs as well.
    pub extended_domain: bool,
    /// Weight on unmeasured outputs; `q` when absent.
    pub virtual_weight: Option<f64>,
    pub hildreth: HildrethOptions,
}

impl Default for MpcConfig {
    fn default() -> Self {
        Self {
            horizon: 6,
            q: 1.0,
            q_per_output: None,
            r: 0.01,
            input_scale_w: 1000.0,
            u_min: Vec::new(),
            u_max: Vec::new(),
            symmetry_pairs: Vec::new(),
            extended_domain: false,
            virtual_weight: None,
            hildreth: HildrethOptions::default(),
        }
    }
}

impl MpcConfig {
    pub fn validate(&self, inputs: usize, outputs: usize) -> Result<(), MpcError> {
        if self.horizon == 0 {
            return Err(MpcError::Config("horizon must be at least 1".into()));
        }
        if !(self.q >= 0.0) || !(self.r > 0.0) || !(self.input_scale_w > 0.0) {
            return Err(MpcError::Config("need q >= 0, r > 0 and a positive input scale".into()));
        }
        if let Some(w) = self.virtual_weight {
            if !(w >= 0.0) {
                return Err(MpcError::Config("virtual weight must be >= 0".into()));
            }
        }
        if let Some(q) = &self.q_per_output {
            if q.len() != outputs || q.iter().any(|w| !(*w >= 0.0)) {
                return Err(MpcError::Config(format!("q_per_output needs {outputs} non-negative entries")));
            }
        }
        if self.u_min.len() != inputs || self.u_max.len() != inputs {
            return Err(MpcError::Config(format!("u_min and u_max need {inputs} entries")));
        }
        if let Some(i) = (0..inputs).find(|&i| !(self.u_min[i] <= self.u_max[i])) {
            return Err(MpcError::Config(format!("u_min > u_max for input U{}", i + 1)));
        }
        for &(a, b) in &self.symmetry_pairs {
            if a >= 1 && b >= 1 && a <= inputs && b <= inputs {
                let (i, j) = (a - 1, b - 1);
                if self.u_min[i] != self.u_min[j] || self.u_max[i] != self.u_max[j] {
                    return Err(MpcError::Config(format!("paired inputs U{a} and U{b} have different limits")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlCommand<T: Real> {
    /// Absolute powers for the next period, W.
    pub u: DVector<T>,
    /// Optimised increments over the horizon, W.
    pub delta_u_horizon: DVector<T>,
    pub cost_value: T,
    pub hildreth_iterations: usize,
    pub active_constraints: usize,
    pub status: HildrethStatus,
}

/// Receding-horizon controller over an augmented ROM.
///
/// Holds the precomputed prediction matrices and the last applied input.
#[derive(Debug, Clone)]
pub struct MpcController<T: Real> {
    config: MpcConfig,
    c_m: DMatrix<T>,
    extended: ExtendedSS<T>,
    prediction: PredictionMatrices<T>,
    /// Per stacked output weight.
    q_stack: DVector<T>,
    /// `G` in degrees per input-scale unit.
    g_scaled: DMatrix<T>,
    /// `2 (Gᵀ Q G + r I)` in scaled units.
    hessian: DMatrix<T>,
    symmetry: SymmetryMap,
    u_prev: DVector<T>,
}

impl<T: Real> MpcController<T> {
    /// `measured_rows` are the sensed outputs; the remaining ones are virtual nodes.
    pub fn new(model: &AugmentedModel<T>, measured_rows: &[usize], config: MpcConfig) -> Result<Self, MpcError> {
        let (m, nu) = (model.outputs(), model.inputs());
        config.validate(nu, m)?;
        if measured_rows.iter().any(|&r| r >= m) {
            return Err(MpcError::Dimension(format!("measured row out of range for {m} outputs")));
        }
        let symmetry = if config.symmetry_pairs.is_empty() {
            SymmetryMap::identity(nu)
        } else {
            SymmetryMap::new(nu, &config.symmetry_pairs)?
        };
        let weights: Vec<f64> = (0..m)
            .map(|j| {
                if let Some(q) = &config.q_per_output {
                    q[j]
                } else if measured_rows.contains(&j) {
                    config.q
                } else if config.extended_domain {
                    config.virtual_weight.unwrap_or(config.q)
                } else {
                    0.0
                }
            })
            .collect();
        let np = config.horizon;
        let q_stack = DVector::from_fn(m * np, |k, _| lit::<T>(weights[k % m]));
        let extended = build_extended_ss(model);
        let prediction = build_prediction(&extended, np);
        let g_scaled = &prediction.g * lit::<T>(config.input_scale_w);
        let mut hessian = g_scaled.transpose() * DMatrix::from_diagonal(&q_stack) * &g_scaled;
        for i in 0..hessian.nrows() {
            hessian[(i, i)] += lit::<T>(config.r);
        }
        hessian *= lit::<T>(2.0);
        let hessian = hessian.clone() * lit::<T>(0.5) + hessian.transpose() * lit::<T>(0.5);
        Ok(Self {
            config,
            c_m: model.c_m.clone(),
            extended,
            prediction,
            q_stack,
            g_scaled,
            hessian,
            symmetry,
            u_prev: DVector::zeros(nu),
        })
    }

    pub fn config(&self) -> &MpcConfig {
        &self.config
    }

    pub fn extended(&self) -> &ExtendedSS<T> {
        &self.extended
    }

    pub fn prediction(&self) -> &PredictionMatrices<T> {
        &self.prediction
    }

    pub fn output_weights(&self) -> &DVector<T> {
        &self.q_stack
    }

    pub fn last_input(&self) -> &DVector<T> {
        &self.u_prev
    }

    pub fn set_last_input(&mut self, u: DVector<T>) {
        self.u_prev = u;
    }

    /// The QP in scaled increments for a given extended state and stacked reference.
    ///
    /// `reference` holds deviation-coordinate targets for every output at every step.
    pub fn build_qp(&self, x_e: &DVector<T>, reference: &DVector<T>) -> QpProblem<T> {
        let np = self.config.horizon;
        let nu = self.u_prev.len();
        let scale = lit::<T>(self.config.input_scale_w);
        let err = reference - &self.prediction.f * x_e;
        let weighted = err.component_mul(&self.q_stack);
        let f = -(self.g_scaled.transpose() * weighted) * lit::<T>(2.0);
        // cumulative sums of the increments bounded on both sides
        let n = nu * np;
        let mut m = DMatrix::zeros(2 * n, n);
        let mut gamma = DVector::zeros(2 * n);
        for i in 0..np {
            for j in 0..=i {
                for k in 0..nu {
                    m[(i * nu + k, j * nu + k)] = T::one();
                    m[(n + i * nu + k, j * nu + k)] = -T::one();
                }
            }
            for k in 0..nu {
                gamma[i * nu + k] = (lit::<T>(self.config.u_max[k]) - self.u_prev[k]) / scale;
                gamma[n + i * nu + k] = (self.u_prev[k] - lit::<T>(self.config.u_min[k])) / scale;
            }
        }
        QpProblem { h: self.hessian.clone(), f, m, gamma }
    }

    /// Stacks a scalar per-step reference (°C) into deviation targets for every output.
    pub fn stack_reference(&self, reference: &[T], baseline_y: &DVector<T>) -> Result<DVector<T>, MpcError> {
        let (np, m) = (self.config.horizon, self.prediction.outputs);
        if reference.len() != np || baseline_y.len() != m {
            return Err(MpcError::Dimension(format!(
                "need {np} reference values and {m} baseline outputs, got {} and {}",
                reference.len(),
                baseline_y.len()
            )));
        }
        Ok(DVector::from_fn(m * np, |k, _| reference[k / m] - baseline_y[k % m]))
    }

    /// Solves one receding-horizon step and stores the applied input.
    ///
    /// `x_hat` and `x_hat_prev` are consecutive observer estimates in deviation
    /// coordinates; `reference` is the set-point (°C) at each of the next `horizon` periods.
    pub fn compute_command(
        &mut self,
        x_hat: &DVector<T>,
        x_hat_prev: &DVector<T>,
        reference: &[T],
        baseline_y: &DVector<T>,
    ) -> Result<ControlCommand<T>, MpcError> {
        if x_hat.len() != self.extended.inner_states || x_hat_prev.len() != x_hat.len() {
            return Err(MpcError::Dimension(format!("state estimate must have {} entries", self.extended.inner_states)));
        }
        let stacked = self.stack_reference(reference, baseline_y)?;
        let x_e = self.extended.state_from(&self.c_m, x_hat, x_hat_prev);
        let full = self.build_qp(&x_e, &stacked);
        let np = self.config.horizon;
        let reduced = apply_symmetry(&full, &self.symmetry, np);
        let sol = hildreth_solve(&reduced, &self.config.hildreth)?;
        let x = if self.symmetry.is_identity() { sol.x.clone() } else { self.symmetry.expand(&sol.x, np) };

        let scale = lit::<T>(self.config.input_scale_w);
        let nu = self.u_prev.len();
        let u = DVector::from_fn(nu, |k, _| {
            let v = self.u_prev[k] + x[k] * scale;
            v.max(lit(self.config.u_min[k])).min(lit(self.config.u_max[k]))
        });
        let delta_u_horizon = &x * scale;
        let y = self.prediction.f.clone() * &x_e + &self.g_scaled * &x;
        let err = &stacked - y;
        let tracking = err.component_mul(&err).dot(&self.q_stack);
        let cost_value = tracking + x.dot(&x) * lit::<T>(self.config.r);
        self.u_prev = u.clone();
        Ok(ControlCommand {
            u,
            delta_u_horizon,
            cost_value,
            hildreth_iterations: sol.iterations,
            active_constraints: sol.active_constraints(),
            status: sol.status,
        })
    }
}

/// Largest `|u_i - u_j|` over 1-based pairs.
pub fn max_pair_mismatch<T: Real>(u: &DVector<T>, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(a, b)| to_f64((u[a - 1] - u[b - 1]).abs())).fold(0.0, f64::max)
}
