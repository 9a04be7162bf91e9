//! Incremental-input MPC: prediction, cost, Hildreth QP and symmetric actuation.

mod controller;
mod cost;
mod extended;
mod hildreth;
mod oracle;
mod prediction;
mod symmetry;

pub use controller::{max_pair_mismatch, ControlCommand, MpcConfig, MpcController};
pub use cost::{cost, cost_extended, unconstrained_solution};
pub use extended::{build_extended_ss, ExtendedSS};
pub use hildreth::{hildreth_solve, HildrethOptions, HildrethSolution, HildrethStatus, QpProblem};
pub use oracle::{box_kkt_residual, box_qp_active_set, box_qp_exhaustive};
pub use prediction::{build_prediction, PredictionMatrices};
pub use symmetry::{apply_symmetry, SymmetryMap, MOLD_SYMMETRY_PAIRS};
