//! Closed-loop experiments: reference profiles, identification, runs, indicators and export.

mod closed_loop;
mod compare;
mod export;
mod identify;
mod indicators;
mod profile;
mod scenario;

pub use closed_loop::{run_closed_loop, LoopSetup, RunRecord, RunRow};
pub use compare::{compare_controllers, run_variant, Comparison, VariantResult};
pub use export::{
    format_table, read_run_csv, read_run_file, run_file_name, write_plot_data, write_run_csv, write_run_file,
    write_table_csv,
};
pub use identify::{fit_rom, identification_data, identify_roms, IdentifiedRoms};
pub use indicators::{indicators, IndicatorReport};
pub use profile::{ReferenceProfile, Segment};
pub use scenario::{
    ControllerTuning, IdentificationConfig, IndicatorWindow, PerturbationMode, ProfileSpec, Scenario, SensorSet, Variant,
};
