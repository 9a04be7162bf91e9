mod common;

use nalgebra::DVector;
use thermal_mpc::harness::{fit_rom, identification_data, IdentificationConfig, Scenario};
use thermal_mpc::observer::KalmanTuning;
use thermal_mpc::plant::{build_plant, PowerSchedule};
use thermal_mpc::sysid::{staircase_prbs, validate_rom};

fn fresh_schedule(plant: &thermal_mpc::plant::PlantModel, samples: usize, seed: u64) -> PowerSchedule {
    PowerSchedule { sample_period: 200.0, rows: staircase_prbs(plant.max_power(), samples, 30, 4, seed) }
}

#[test]
fn held_out_one_step_error_is_small() {
    let s = Scenario::empty_mold();
    let rom = &common::roms().control;
    let held_out = identification_data(&s.plant_config(), &IdentificationConfig { samples: 400, seed: 77, ..s.identification.clone() }, 200.0).unwrap();
    let m = rom.outputs();
    let dev_y = |k: usize| DVector::from_fn(m, |j, _| held_out.y[(k, j)]) - &rom.baseline.y;
    let dev_u = |k: usize| held_out.u.row(k).transpose() - &rom.baseline.u;
    let (mut lo, mut hi, mut worst) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for k in 0..held_out.len() {
        for j in 0..m {
            lo = lo.min(held_out.y[(k, j)]);
            hi = hi.max(held_out.y[(k, j)]);
        }
    }
    for t in 2..held_out.len() - 1 {
        let y_hist = [dev_y(t), dev_y(t - 1)];
        let u_hist = [dev_u(t), dev_u(t - 1)];
        let pred = rom.predict_deviation(&y_hist, &u_hist);
        worst = worst.max((pred - dev_y(t + 1)).amax());
    }
    let pct = 100.0 * worst / (hi - lo);
    assert!(pct < 1.0, "held-out one-step error {pct:.3}% of range");
}

#[test]
fn in_distribution_rom_error_is_below_one_percent() {
    // a second-order ARX leaves about 2% open-loop error on this plant; one more lag closes it
    let s = Scenario::empty_mold();
    let ident = IdentificationConfig { r: 3, s: 2, ..s.identification.clone() };
    let data = identification_data(&s.plant_config(), &ident, 200.0).unwrap();
    let rom = fit_rom(&data, 6, s.plant_config().ambient_c, &ident).unwrap();
    let mut cfg = s.plant_config().with_constant_h(ident.constant_h);
    cfg.curing.enabled = false;
    let plant = build_plant(cfg).unwrap();
    let sched = fresh_schedule(&plant, 300, 99);
    let v = validate_rom(&rom, &plant, &sched, 60000.0, None).unwrap();
    assert!(v.open_loop.max_pct < 1.0, "in-distribution error {:.3}% of span", v.open_loop.max_pct);
}

#[test]
fn observer_cuts_error_on_variable_h_plant() {
    let s = Scenario::empty_mold();
    let rom = &common::roms().control;
    let variable = build_plant(s.plant_config()).unwrap();
    let sched = fresh_schedule(&variable, 300, 99);
    let v = validate_rom(rom, &variable, &sched, 60000.0, Some(&KalmanTuning::default())).unwrap();
    let mut cfg = s.plant_config().with_constant_h(s.identification.constant_h);
    cfg.curing.enabled = false;
    let constant = build_plant(cfg).unwrap();
    let base = validate_rom(rom, &constant, &sched, 60000.0, None).unwrap();
    assert!(v.open_loop.rms > base.open_loop.rms, "{} vs {}", v.open_loop.rms, base.open_loop.rms);
    let observed = v.with_observer.unwrap().rms;
    assert!(observed <= 0.6 * v.open_loop.rms, "observer RMS {observed} vs open loop {}", v.open_loop.rms);
}
