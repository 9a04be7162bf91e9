use nalgebra::DVector;
use serde::Serialize;

use crate::error::HarnessError;
use crate::observer::{KalmanConfig, KalmanTuning, VirtualNodeEstimator};
use crate::plant::{run_open_loop, PlantModel, PowerSchedule};

use super::arx::ArxModel;
use super::statespace::{arx_to_statespace, augment_with_perturbations};

/// Prediction error of a ROM against the nonlinear plant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RomErrorReport {
    /// Per-sensor RMS error, °C.
    pub rms_per_sensor: Vec<f64>,
    /// Per-sensor maximum absolute error as a percentage of the temperature span.
    pub max_pct_per_sensor: Vec<f64>,
    pub rms: f64,
    pub max_pct: f64,
    /// Span of the plant outputs over the scenario, °C.
    pub span: f64,
}

impl RomErrorReport {
    fn from_errors(errors: &[Vec<f64>], span: f64) -> Self {
        let m = errors.first().map_or(0, Vec::len);
        let n = errors.len().max(1) as f64;
        let span = if span > 0.0 { span } else { 1.0 };
        let rms_per_sensor: Vec<f64> = (0..m)
            .map(|j| (errors.iter().map(|e| e[j] * e[j]).sum::<f64>() / n).sqrt())
            .collect();
        let max_pct_per_sensor: Vec<f64> = (0..m)
            .map(|j| errors.iter().map(|e| e[j].abs()).fold(0.0, f64::max) / span * 100.0)
            .collect();
        let rms = (errors.iter().flatten().map(|e| e * e).sum::<f64>() / (n * m.max(1) as f64)).sqrt();
        let max_pct = max_pct_per_sensor.iter().copied().fold(0.0, f64::max);
        Self { rms_per_sensor, max_pct_per_sensor, rms, max_pct, span }
    }
}

/// Open-loop ROM simulation error, and optionally the one-step prediction error
/// of the ROM corrected by a perturbation observer fed with the plant outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RomValidation {
    pub open_loop: RomErrorReport,
    pub with_observer: Option<RomErrorReport>,
}

/// Compares the ROM against the plant on `schedule` starting from ambient.
pub fn validate_rom(
    rom: &ArxModel<f64>,
    plant: &PlantModel,
    schedule: &PowerSchedule,
    duration: f64,
    observer: Option<&KalmanTuning>,
) -> Result<RomValidation, HarnessError> {
    let m = rom.outputs();
    let (data, _) = run_open_loop(plant, &plant.ambient_state(), schedule, duration)?;
    if data.outputs() < m {
        return Err(HarnessError::Scenario(format!("ROM has {m} outputs, plant only {}", data.outputs())));
    }
    let y_plant = |k: usize| DVector::from_fn(m, |j, _| data.y[(k, j)]);
    let u_at = |k: usize| data.u.row(k).transpose();
    let span = {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..data.len() {
            for j in 0..m {
                lo = lo.min(data.y[(k, j)]);
                hi = hi.max(data.y[(k, j)]);
            }
        }
        hi - lo
    };

    let ss = arx_to_statespace(rom);
    let y0 = y_plant(0) - &rom.baseline.y;
    let y_hist = vec![y0; rom.r];
    let u_hist = vec![DVector::zeros(rom.inputs()); rom.s];
    let mut x = ss.pack_state(&y_hist, &u_hist);
    let mut open_errors = Vec::with_capacity(data.len());
    for k in 1..data.len() {
        x = ss.step(&x, &(u_at(k - 1) - &rom.baseline.u));
        let y = &ss.c * &x + &rom.baseline.y;
        open_errors.push((y - y_plant(k)).iter().copied().collect::<Vec<_>>());
    }
    let open_loop = RomErrorReport::from_errors(&open_errors, span);

    let with_observer = match observer {
        None => None,
        Some(tuning) => {
            let aug = augment_with_perturbations(&ss, m);
            let cfg = KalmanConfig::from_tuning(&aug, m, tuning);
            let mut est = VirtualNodeEstimator::new(aug, cfg, rom.baseline.clone(), (0..m).collect())?;
            est.update(&y_plant(0))?;
            let mut errors = Vec::with_capacity(data.len());
            for k in 1..data.len() {
                let u = u_at(k - 1);
                let predicted = est.predicted_outputs(&u);
                errors.push((predicted - y_plant(k)).iter().copied().collect::<Vec<_>>());
                est.predict(&u);
                est.update(&y_plant(k))?;
            }
            Some(RomErrorReport::from_errors(&errors, span))
        }
    };
    Ok(RomValidation { open_loop, with_observer })
}
