//! Kalman perturbation observer over the augmented ROM.

mod kalman;
mod virtual_nodes;

pub use kalman::{joseph_covariance, predict, update, KalmanConfig, KalmanTuning, ObserverState};
pub use virtual_nodes::{estimate_virtual_nodes, VirtualNodeEstimator};
