use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::HarnessError;
use crate::mpc::{ControlCommand, MpcController};
use crate::observer::{KalmanConfig, KalmanTuning, VirtualNodeEstimator};
use crate::plant::{PlantModel, SensorNoise, KELVIN};
use crate::sysid::{arx_to_statespace, augment_with_perturbations, ArxModel};

use super::profile::ReferenceProfile;
use super::scenario::{PerturbationMode, Scenario, Variant};

/// One controller period.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub time_s: f64,
    pub reference_c: f64,
    /// True plant temperatures at the control sensors.
    pub control_c: Vec<f64>,
    /// True plant temperatures at the auxiliary sensors.
    pub auxiliary_c: Vec<f64>,
    /// Observer estimates of the auxiliary locations; empty without virtual nodes.
    pub virtual_c: Vec<f64>,
    /// Command issued at `time_s` and held for the next period, W.
    pub powers_w: Vec<f64>,
    /// Perturbation estimates on the control outputs.
    pub perturbations: Vec<f64>,
    pub cost: f64,
    pub qp_iterations: usize,
    pub active_constraints: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunRecord {
    pub variant: Option<Variant>,
    pub period_s: f64,
    pub rows: Vec<RunRow>,
    /// Smallest final degree of cure over the resin cells, when curing is enabled.
    pub final_min_cure: Option<f64>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Everything a closed-loop run needs besides the plant.
#[derive(Debug, Clone)]
pub struct LoopSetup<'a> {
    pub rom: &'a ArxModel<f64>,
    pub variant: Variant,
    pub profile: &'a ReferenceProfile,
    pub observer: KalmanTuning,
    pub perturbations: PerturbationMode,
    pub mpc: crate::mpc::MpcConfig,
    pub period_s: f64,
    pub sensor_noise_std: f64,
    pub seed: u64,
}

impl<'a> LoopSetup<'a> {
    pub fn from_scenario(scenario: &Scenario, plant: &PlantModel, rom: &'a ArxModel<f64>, profile: &'a ReferenceProfile, variant: Variant, seed: u64) -> Self {
        Self {
            rom,
            variant,
            profile,
            observer: scenario.observer,
            perturbations: scenario.perturbations,
            mpc: scenario.mpc_config(variant, plant.max_power()),
            period_s: scenario.controller_period_s,
            sensor_noise_std: scenario.sensor_noise_std,
            seed,
        }
    }
}

fn check_finite(row: usize, what: &str, v: &[f64]) -> Result<(), HarnessError> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(HarnessError::NonFinite { row, what: format!("{what}[{i}]") });
    }
    Ok(())
}

/// Observer predict/update, MPC solve, then plant integration over one period, repeated
/// until the end of the profile. Row `k` is taken at `k·period` for `k = 1..=N`.
pub fn run_closed_loop(plant: &PlantModel, setup: &LoopSetup<'_>) -> Result<RunRecord, HarnessError> {
    let rom = setup.rom;
    let (nc, _) = plant.sensor_count();
    let m = rom.outputs();
    if m < nc || rom.inputs() != plant.heater_count() {
        return Err(HarnessError::Scenario(format!(
            "ROM with {m} outputs and {} inputs does not fit a plant with {nc} control sensors and {} heaters",
            rom.inputs(),
            plant.heater_count()
        )));
    }
    let period = setup.period_s;
    let steps = (setup.profile.end_time() / period).round() as usize;
    let measured: Vec<usize> = (0..nc).collect();

    let ss = arx_to_statespace(rom);
    let p = match setup.perturbations {
        PerturbationMode::Measured => nc,
        PerturbationMode::AllOutputs => m,
    };
    let aug = augment_with_perturbations(&ss, p);
    let kalman = KalmanConfig::from_tuning(&aug, nc, &setup.observer);
    let mut est = VirtualNodeEstimator::new(aug.clone(), kalman, rom.baseline.clone(), measured.clone())?;
    let mut mpc = MpcController::new(&aug, &measured, setup.mpc.clone())?;
    let mut noise = SensorNoise::new(setup.sensor_noise_std, ChaCha8Rng::seed_from_u64(setup.seed));

    let horizon = setup.mpc.horizon;
    let reference_at = |t: f64| -> Vec<f64> { (1..=horizon).map(|i| setup.profile.at(t + i as f64 * period)).collect() };
    let measure = |state: &crate::plant::PlantState, noise: &mut SensorNoise| -> DVector<f64> {
        let (z, _) = plant.read_sensors(state, Some(noise));
        DVector::from_iterator(nc, z.into_iter().map(|k| k - KELVIN))
    };
    let solve = |mpc: &mut MpcController<f64>, est: &VirtualNodeEstimator<f64>, t: f64| -> Result<ControlCommand<f64>, HarnessError> {
        Ok(mpc.compute_command(est.x_hat(), est.previous_x_hat(), &reference_at(t), &est.baseline().y)?)
    };

    let mut state = plant.ambient_state();
    let z0 = measure(&state, &mut noise);
    est.update(&z0)?;
    let mut command = solve(&mut mpc, &est, 0.0)?;
    check_finite(0, "u", command.u.as_slice())?;

    let mut rows = Vec::with_capacity(steps);
    for k in 1..=steps {
        let t = k as f64 * period;
        let u_prev = command.u.clone();
        state = plant.advance(&state, u_prev.as_slice(), period)?;
        check_finite(k, "plant temperature", &state.temperatures)?;
        let z = measure(&state, &mut noise);
        est.predict(&u_prev);
        est.update(&z)?;
        check_finite(k, "state estimate", est.x_hat().as_slice())?;
        command = solve(&mut mpc, &est, t)?;
        check_finite(k, "u", command.u.as_slice())?;

        let (control, aux) = plant.read_sensors(&state, None);
        let virtual_c = if setup.variant.uses_virtual_nodes() {
            est.virtual_nodes().iter().copied().collect()
        } else {
            Vec::new()
        };
        rows.push(RunRow {
            time_s: t,
            reference_c: setup.profile.at(t),
            control_c: control.iter().map(|v| v - KELVIN).collect(),
            auxiliary_c: aux.iter().map(|v| v - KELVIN).collect(),
            virtual_c,
            powers_w: command.u.iter().copied().collect(),
            perturbations: est.perturbations().iter().take(nc).copied().collect(),
            cost: command.cost_value,
            qp_iterations: command.hildreth_iterations,
            active_constraints: command.active_constraints,
        });
    }
    let final_min_cure = if plant.config().curing.enabled {
        plant.cure_by_cell(&state).map(|(_, a)| a).reduce(f64::min)
    } else {
        None
    };
    Ok(RunRecord { variant: Some(setup.variant), period_s: period, rows, final_min_cure })
}
