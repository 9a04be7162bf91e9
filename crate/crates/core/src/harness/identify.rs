use crate::error::HarnessError;
use crate::plant::{build_plant, run_open_loop, PlantConfig, PowerSchedule};
use crate::sysid::{fit_arx, staircase_prbs, ArxModel, Baseline, IoDataset};

use super::scenario::IdentificationConfig;

/// ROMs over the control sensors only and over control plus auxiliary sensors.
#[derive(Debug, Clone)]
pub struct IdentifiedRoms {
    pub control: ArxModel<f64>,
    pub extended: ArxModel<f64>,
}

impl IdentifiedRoms {
    pub fn for_outputs(&self, m: usize) -> &ArxModel<f64> {
        if m == self.control.outputs() {
            &self.control
        } else {
            &self.extended
        }
    }
}

/// Staircase-PRBS excitation of the constant-convection plant, all 14 sensors.
pub fn identification_data(
    plant: &PlantConfig,
    ident: &IdentificationConfig,
    sample_period: f64,
) -> Result<IoDataset<f64>, HarnessError> {
    let mut cfg = plant.clone().with_constant_h(ident.constant_h);
    cfg.curing.enabled = false;
    let model = build_plant(cfg)?;
    let rows = staircase_prbs(model.max_power(), ident.samples, ident.stair_len, ident.bit_len, ident.seed);
    let schedule = PowerSchedule { sample_period, rows };
    let duration = schedule.duration();
    let (data, _) = run_open_loop(&model, &model.ambient_state(), &schedule, duration)?;
    Ok(data)
}

/// Fits an ARX model on the first `m` outputs with the ambient baseline.
pub fn fit_rom(data: &IoDataset<f64>, m: usize, ambient_c: f64, ident: &IdentificationConfig) -> Result<ArxModel<f64>, HarnessError> {
    let sub = data.select_outputs(m);
    let baseline = Baseline::ambient(ambient_c, m, data.inputs());
    Ok(fit_arx(&sub, ident.r, ident.s, &baseline)?)
}

pub fn identify_roms(
    plant: &PlantConfig,
    ident: &IdentificationConfig,
    sample_period: f64,
) -> Result<(IdentifiedRoms, IoDataset<f64>), HarnessError> {
    let data = identification_data(plant, ident, sample_period)?;
    let nc = plant.sensors.control.len();
    let control = fit_rom(&data, nc, plant.ambient_c, ident)?;
    let extended = fit_rom(&data, data.outputs(), plant.ambient_c, ident)?;
    Ok((IdentifiedRoms { control, extended }, data))
}
