use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn mold() -> PlantModel {
    build_plant(PlantConfig::default_mold()).unwrap()
}

fn adiabatic_lumped() -> PlantModel {
    build_plant(PlantConfig::lumped(0.01, 500.0).with_constant_h(0.0)).unwrap()
}

#[test]
fn default_mold_dimensions() {
    let p = mold();
    assert_eq!(p.cell_count(), 640);
    assert_eq!(p.heater_count(), 20);
    assert_eq!(p.sensor_count(), (6, 8));
    let limits = p.max_power();
    assert!(limits[..16].iter().all(|&w| w == 500.0));
    assert_eq!(&limits[16..], &[750.0, 750.0, 550.0, 550.0]);
}

#[test]
fn lumped_single_cell_is_valid() {
    let p = build_plant(PlantConfig::lumped(0.01, 500.0)).unwrap();
    assert_eq!(p.cell_count(), 1);
    assert_eq!(p.heater_count(), 1);
}

#[test]
fn heater_outside_grid_is_rejected() {
    let mut cfg = PlantConfig::default_mold();
    cfg.heaters[0].footprint.push([10, 0, 0]);
    assert!(matches!(build_plant(cfg), Err(crate::PlantError::Config(_))));
}

#[test]
fn overlapping_heaters_are_rejected() {
    let mut cfg = PlantConfig::default_mold();
    let cell = cfg.heaters[1].footprint[0];
    cfg.heaters[0].footprint.push(cell);
    assert!(matches!(build_plant(cfg), Err(crate::PlantError::Config(_))));
}

#[test]
fn sensor_outside_grid_is_rejected() {
    let mut cfg = PlantConfig::default_mold();
    cfg.sensors.auxiliary[0] = [3, 99, 4];
    assert!(matches!(build_plant(cfg), Err(crate::PlantError::Config(_))));
}

#[test]
fn conductivity_outside_band_is_rejected() {
    let mut cfg = PlantConfig::default_mold();
    cfg.material.conductivity = 50.0;
    assert!(build_plant(cfg).is_err());
}

#[test]
fn config_toml_round_trip() {
    let cfg = PlantConfig::default_mold();
    let back = PlantConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(cfg, back);
}

#[test]
fn shipped_plant_config_matches_default() {
    let text = include_str!("../../../../configs/plant_default.toml");
    assert_eq!(PlantConfig::from_toml_str(text).unwrap(), PlantConfig::default_mold());
}

#[test]
fn adiabatic_lumped_heating_one_kelvin() {
    // ρ c V = 7850 · 520 · 0.01 = 40820 J/K; 500 W · 81.64 s = 40820 J
    let p = adiabatic_lumped();
    let s0 = p.ambient_state();
    let s1 = p.step(&s0, &[500.0], 81.64).unwrap();
    let dt = s1.temperatures[0] - s0.temperatures[0];
    assert!((dt - 1.0).abs() < 1e-3, "ΔT = {dt}");
}

#[test]
fn zero_power_at_ambient_is_equilibrium() {
    let p = mold();
    let s0 = p.ambient_state();
    let s1 = p.advance(&s0, &[0.0; 20], 2000.0).unwrap();
    for (a, b) in s0.temperatures.iter().zip(&s1.temperatures) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn passive_cooling_is_monotone() {
    let p = mold();
    let mut s = p.advance(&p.ambient_state(), &[400.0; 20], 4000.0).unwrap();
    let mut prev_max = s.temperatures.iter().copied().fold(f64::MIN, f64::max);
    let ambient = p.ambient_k();
    for _ in 0..30 {
        let next = p.step(&s, &[0.0; 20], 200.0).unwrap();
        let m = next.temperatures.iter().copied().fold(f64::MIN, f64::max);
        assert!(m <= prev_max + 1e-9);
        assert!(next.temperatures.iter().all(|&t| t >= ambient - 1.0));
        prev_max = m;
        s = next;
    }
}

#[test]
fn power_out_of_bounds_is_an_input_error() {
    let p = mold();
    let mut u = vec![0.0; 20];
    u[3] = 501.0;
    assert!(matches!(p.step(&p.ambient_state(), &u, 20.0), Err(crate::PlantError::Input(_))));
    u[3] = -1.0;
    assert!(p.step(&p.ambient_state(), &u, 20.0).is_err());
    assert!(p.step(&p.ambient_state(), &[0.0; 19], 20.0).is_err());
    assert!(p.step(&p.ambient_state(), &[0.0; 20], 0.0).is_err());
}

#[test]
fn energy_balance_per_step_with_convection() {
    let p = mold();
    let mut s = p.ambient_state();
    let u: Vec<f64> = (0..20).map(|i| 100.0 + 17.0 * i as f64).collect();
    for _ in 0..20 {
        let (next, e) = p.step_detailed(&s, &u, 20.0).unwrap();
        let d_e = p.internal_energy(&next) - p.internal_energy(&s);
        let budget = e.heater_input + e.curing_release - e.convective_loss;
        assert!((d_e - budget).abs() <= 1e-3 * budget.abs().max(1.0), "{d_e} vs {budget}");
        s = next;
    }
}

#[test]
fn adiabatic_mold_conserves_energy() {
    let p = build_plant(PlantConfig::default_mold().with_constant_h(0.0)).unwrap();
    let s0 = p.ambient_state();
    let u: Vec<f64> = p.max_power().iter().map(|w| 0.3 * w).collect();
    let total = u.iter().sum::<f64>() * 4000.0;
    let s1 = p.advance(&s0, &u, 4000.0).unwrap();
    let gained = p.internal_energy(&s1) - p.internal_energy(&s0);
    assert!((gained - total).abs() < 1e-3 * total);
}

#[test]
fn symmetric_powers_give_mirror_field() {
    let p = mold();
    let cfg = p.config().clone();
    let mut u = vec![0.0; 20];
    for (k, &(a, b)) in crate::mpc::MOLD_SYMMETRY_PAIRS.iter().enumerate() {
        let w = 40.0 + 23.0 * k as f64;
        u[a - 1] = w;
        u[b - 1] = w;
    }
    let s = p.advance(&p.ambient_state(), &u, 6000.0).unwrap();
    for x in 0..cfg.grid.nx {
        for y in 0..cfg.grid.ny {
            for z in 0..cfg.nz() {
                let here = s.temperatures[p.cell_index([x, y, z])];
                let there = s.temperatures[p.cell_index(cfg.half_turn([x, y, z]))];
                assert!((here - there).abs() < 1e-9, "({x},{y},{z}): {here} vs {there}");
            }
        }
    }
}

#[test]
fn uniform_state_reads_uniformly() {
    let p = mold();
    let s = p.uniform_state(393.15);
    let (c, a) = p.read_sensors(&s, None);
    assert!(c.iter().chain(&a).all(|&t| t == 393.15));
}

#[test]
fn control_readings_are_index_lookups() {
    let p = mold();
    let mut s = p.ambient_state();
    for (i, t) in s.temperatures.iter_mut().enumerate() {
        *t = 300.0 + i as f64;
    }
    let (c, a) = p.read_sensors(&s, None);
    for (k, cell) in p.config().sensors.control.iter().enumerate() {
        assert_eq!(c[k], s.temperatures[p.cell_index(*cell)]);
    }
    for (k, cell) in p.config().sensors.auxiliary.iter().enumerate() {
        assert_eq!(a[k], s.temperatures[p.cell_index(*cell)]);
    }
}

#[test]
fn sensor_noise_standard_deviation() {
    let mut noise = SensorNoise::new(0.1, ChaCha8Rng::seed_from_u64(5));
    let xs: Vec<f64> = (0..10_000).map(|_| noise.sample()).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
    assert!((0.09..=0.11).contains(&sd), "σ = {sd}");
}

#[test]
fn zero_schedule_keeps_ambient_outputs() {
    let p = mold();
    let sched = PowerSchedule::zero(20, 200.0, 20);
    let (data, _) = run_open_loop(&p, &p.ambient_state(), &sched, 4000.0).unwrap();
    assert_eq!(data.len(), 20);
    assert_eq!(data.outputs(), 14);
    assert!(data.y.iter().all(|&t| (t - 23.0).abs() < 1e-9));
}

#[test]
fn step_on_first_heater_warms_every_sensor_most_near_it() {
    let p = mold();
    let mut u = vec![0.0; 20];
    u[0] = 500.0;
    let sched = PowerSchedule::constant(u, 200.0, 40);
    let (data, _) = run_open_loop(&p, &p.ambient_state(), &sched, 8000.0).unwrap();
    for j in 0..data.outputs() {
        for k in 1..data.len() {
            assert!(data.y[(k, j)] >= data.y[(k - 1, j)] - 1e-9);
        }
        assert!(data.y[(data.len() - 1, j)] > 23.0);
    }
    // nearest sensor to U1 (x 1..2, y 2, upper block)
    let last = data.len() - 1;
    let nearest = (0..data.outputs())
        .max_by(|&a, &b| data.y[(last, a)].total_cmp(&data.y[(last, b)]))
        .unwrap();
    let cells: Vec<CellIndex> = p.config().sensors.all().copied().collect();
    let heater = &p.config().heaters[0].footprint;
    let dist = |c: CellIndex| {
        heater
            .iter()
            .map(|h| {
                let d = |a: usize, b: usize| (a as f64 - b as f64).powi(2);
                d(c[0], h[0]) + d(c[1], h[1]) + d(c[2], h[2])
            })
            .fold(f64::INFINITY, f64::min)
    };
    let closest = (0..cells.len()).min_by(|&a, &b| dist(cells[a]).total_cmp(&dist(cells[b]))).unwrap();
    assert_eq!(nearest, closest);
}

#[test]
fn prbs_schedule_row_count() {
    let p = mold();
    let rows = crate::sysid::staircase_prbs(p.max_power(), 100, 10, 2, 3);
    let sched = PowerSchedule { sample_period: 200.0, rows };
    let (data, _) = run_open_loop(&p, &p.ambient_state(), &sched, 20000.0).unwrap();
    assert_eq!(data.len(), 100);
}

#[test]
fn short_schedule_is_rejected() {
    let p = mold();
    let sched = PowerSchedule::zero(20, 200.0, 5);
    assert!(run_open_loop(&p, &p.ambient_state(), &sched, 2000.0).is_err());
}

#[test]
fn full_cure_releases_total_heat() {
    let mut cfg = PlantConfig::default_mold();
    cfg.curing.enabled = true;
    cfg.curing.injection_time_s = 0.0;
    let p = build_plant(cfg).unwrap();
    let mut s = p.uniform_state(185.0 + KELVIN);
    let mut released = 0.0;
    let u: Vec<f64> = p.max_power().iter().map(|w| 0.2 * w).collect();
    for _ in 0..400 {
        let (next, e) = p.step_detailed(&s, &u, 20.0).unwrap();
        released += e.curing_release;
        s = next;
    }
    let min_cure = s.cure_degree.iter().copied().fold(1.0, f64::min);
    assert!(min_cure > 0.999, "cure {min_cure}");
    let expected = p.resin_mass() * p.config().curing.total_heat_of_reaction;
    let cured_fraction = s.cure_degree.iter().sum::<f64>() / s.cure_degree.len() as f64;
    assert!((released - expected * cured_fraction).abs() < 0.01 * expected);
}

#[test]
fn curing_waits_for_injection() {
    let mut cfg = PlantConfig::default_mold();
    cfg.curing.enabled = true;
    cfg.curing.injection_time_s = 1000.0;
    let p = build_plant(cfg).unwrap();
    let s = p.advance(&p.uniform_state(185.0 + KELVIN), &[0.0; 20], 800.0).unwrap();
    assert!(s.cure_degree.iter().all(|&a| a == 0.0));
    let s = p.advance(&s, &[0.0; 20], 400.0).unwrap();
    assert!(s.cure_degree.iter().all(|&a| a > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cure_is_monotone_and_bounded(temp_c in 100.0f64..220.0, steps in 1usize..30) {
        let mut cfg = PlantConfig::default_mold();
        cfg.curing.enabled = true;
        cfg.curing.injection_time_s = 0.0;
        let p = build_plant(cfg).unwrap();
        let mut s = p.uniform_state(temp_c + KELVIN);
        for _ in 0..steps {
            let next = p.step(&s, &[0.0; 20], 100.0).unwrap();
            for (a, b) in s.cure_degree.iter().zip(&next.cure_degree) {
                prop_assert!(b >= a && *b <= 1.0);
            }
            s = next;
        }
    }

    #[test]
    fn adiabatic_lumped_energy(p_w in 0.0f64..500.0, dt in 1.0f64..400.0) {
        let p = adiabatic_lumped();
        let s0 = p.ambient_state();
        let s1 = p.step(&s0, &[p_w], dt).unwrap();
        let gained = p.internal_energy(&s1) - p.internal_energy(&s0);
        prop_assert!((gained - p_w * dt).abs() <= 1e-3 * (p_w * dt).max(1.0));
    }
}
