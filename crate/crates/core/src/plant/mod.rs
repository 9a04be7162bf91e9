//! Finite-volume thermal simulator of the two-block heated mold.

mod config;
mod convection;
mod curing;
mod model;
mod schedule;

pub use config::{
    CavityConfig, CellIndex, ConvectionConfig, GridConfig, HeaterSpec, InsulationConfig, MaterialProps,
    PlantConfig, SensorLayout, KELVIN,
};
pub use convection::{convection_h, ConvectionFit, ConvectionKind};
pub use curing::{curing_rate, CuringModel, GAS_CONSTANT};
pub use model::{build_plant, FaceKind, PlantModel, PlantState, SensorNoise, StepEnergy};
pub use schedule::{run_open_loop, PowerSchedule};

#[cfg(test)]
mod tests;
