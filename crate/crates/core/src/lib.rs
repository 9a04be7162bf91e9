//! Model predictive control of a resistively heated two-block mold.
//!
//! The crate bundles a finite-volume plant simulator, ARX identification,
//! a Kalman perturbation observer, an incremental-input MPC with a Hildreth QP
//! solver, and a closed-loop experiment harness.

pub mod error;
pub mod harness;
pub mod mpc;
pub mod observer;
pub mod plant;
pub mod scalar;
pub mod sysid;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{HarnessError, IdentError, MpcError, ObserverError, PlantError};
pub use scalar::Real;

pub type ArxModelF64 = sysid::ArxModel<f64>;
pub type AugmentedModelF64 = sysid::AugmentedModel<f64>;
pub type MpcControllerF64 = mpc::MpcController<f64>;
pub type EstimatorF64 = observer::VirtualNodeEstimator<f64>;
