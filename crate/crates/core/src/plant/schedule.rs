use crate::error::PlantError;
use crate::sysid::IoDataset;

use super::config::KELVIN;
use super::model::{PlantModel, PlantState};

/// Heater powers held constant over each sample period (zero-order hold).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSchedule {
    pub sample_period: f64,
    pub rows: Vec<Vec<f64>>,
}

impl PowerSchedule {
    pub fn constant(powers: Vec<f64>, sample_period: f64, len: usize) -> Self {
        Self { sample_period, rows: vec![powers; len] }
    }

    pub fn zero(heaters: usize, sample_period: f64, len: usize) -> Self {
        Self::constant(vec![0.0; heaters], sample_period, len)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.sample_period * self.rows.len() as f64
    }
}

/// Runs the plant open loop under `schedule` and samples the sensors every period.
///
/// Row `k` holds the sensor temperatures (°C) at `k·Ts` and the powers applied over
/// `[k·Ts, (k+1)·Ts)`. Outputs are the control sensors followed by the auxiliaries.
pub fn run_open_loop(
    plant: &PlantModel,
    initial: &PlantState,
    schedule: &PowerSchedule,
    duration: f64,
) -> Result<(IoDataset<f64>, PlantState), PlantError> {
    let ts = schedule.sample_period;
    if !(ts > 0.0) {
        return Err(PlantError::Input("sample period must be > 0".into()));
    }
    let rows = (duration / ts).round() as usize;
    if schedule.len() < rows {
        return Err(PlantError::Input(format!(
            "schedule covers {} s, duration is {duration} s",
            schedule.duration()
        )));
    }
    let (nc, na) = plant.sensor_count();
    let mut y = Vec::with_capacity(rows);
    let mut u = Vec::with_capacity(rows);
    let mut state = initial.clone();
    for powers in schedule.rows.iter().take(rows) {
        let (control, aux) = plant.read_sensors(&state, None);
        y.push(control.iter().chain(&aux).map(|t| t - KELVIN).collect::<Vec<_>>());
        u.push(powers.clone());
        state = plant.advance(&state, powers, ts)?;
    }
    let dataset = IoDataset::from_rows(ts, &u, &y, plant.heater_count(), nc + na)
        .map_err(|e| PlantError::Input(e.to_string()))?;
    Ok((dataset, state))
}
