//! ARX reduced-order model identification and its state-space forms.

mod arx;
mod dataset;
mod excitation;
mod model_file;
mod statespace;
mod validate;

pub use arx::{fit_arx, residual_sum_of_squares, spectral_radius, ArxModel, Baseline, FitResidual};
pub use dataset::IoDataset;
pub use excitation::{staircase_prbs, Prbs};
pub use model_file::{ModelFile, RowMajor, MODEL_FORMAT, MODEL_VERSION};
pub use statespace::{
    arx_to_statespace, augment_with_matrix, augment_with_perturbations, AugmentedModel, StateLayout,
    StateSpaceModel,
};
pub use validate::{validate_rom, RomErrorReport, RomValidation};

#[cfg(test)]
mod tests;
