mod common;

use std::path::Path;

use common::{comparison, roms};
use thermal_mpc::harness::{
    indicators, read_run_csv, read_run_file, run_variant, write_plot_data, write_run_csv, write_run_file, RunRecord, Scenario, SensorSet,
    Variant,
};
use thermal_mpc::plant::{build_plant, PlantConfig};

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn empty_mold_runs_have_one_row_per_period() {
    for r in &comparison().results {
        assert_eq!(r.record.len(), 100, "{}", r.variant);
        for (k, row) in r.record.rows.iter().enumerate() {
            assert_eq!(row.time_s, 200.0 * (k + 1) as f64);
            assert_eq!(row.powers_w.len(), 20);
            assert_eq!((row.control_c.len(), row.auxiliary_c.len()), (6, 8));
            assert_eq!(row.virtual_c.len(), if r.variant.uses_virtual_nodes() { 8 } else { 0 });
        }
    }
    assert_eq!(comparison().molding.as_ref().unwrap().record.len(), 76);
}

#[test]
fn run_csv_has_full_schema_and_round_trips() {
    let rec = &comparison().get(Variant::Extended).unwrap().record;
    let mut buf = Vec::new();
    write_run_csv(rec, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text.lines().count(), 101);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let expected: Vec<String> = ["time_s", "ref_C"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..=6).map(|i| format!("y{i}_C")))
        .chain((1..=8).map(|i| format!("aux{i}_C")))
        .chain((1..=8).map(|i| format!("vhat{i}_C")))
        .chain((1..=20).map(|i| format!("u{i}_W")))
        .chain((1..=6).map(|i| format!("p{i}_hat")))
        .chain(["cost".to_string()])
        .collect();
    assert_eq!(&header[..expected.len()], expected.iter().map(String::as_str).collect::<Vec<_>>().as_slice());
    let back = read_run_csv(buf.as_slice()).unwrap();
    assert_eq!(back.rows, rec.rows);
    let (t_i, t_f) = Scenario::empty_mold().indicator_window();
    assert_eq!(indicators(&back, t_i, t_f, SensorSet::All).unwrap(), indicators(rec, t_i, t_f, SensorSet::All).unwrap());
}

#[test]
fn run_files_and_plot_data_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let rec = &comparison().get(Variant::Symmetric).unwrap().record;
    let path = dir.path().join("run.csv");
    write_run_file(rec, &path).unwrap();
    assert_eq!(&read_run_file(&path).unwrap().rows, &rec.rows);
    let files = write_plot_data(rec, dir.path(), "symmetric", 20000.0).unwrap();
    assert!(files.iter().all(|f| f.exists()));
}

#[test]
fn identical_seeds_give_identical_runs() {
    let s = Scenario::empty_mold();
    let plant = build_plant(s.plant_config()).unwrap();
    let again = run_variant(&s, &plant, roms(), Variant::Standard).unwrap();
    let first = comparison().get(Variant::Standard).unwrap();
    assert_eq!(again.record, first.record);
    assert_eq!(again.report, first.report);
}

#[test]
fn different_seeds_change_the_noise() {
    let s = Scenario { seed: 2, ..Scenario::empty_mold() };
    let plant = build_plant(s.plant_config()).unwrap();
    let other = run_variant(&s, &plant, roms(), Variant::Standard).unwrap();
    assert_ne!(other.record, comparison().get(Variant::Standard).unwrap().record);
}

#[test]
fn exotherm_reduces_supplied_heat() {
    let cured = comparison().molding.as_ref().unwrap();
    let dry = Scenario { curing: false, ..Scenario::molding() };
    let plant = build_plant(dry.plant_config()).unwrap();
    let without = run_variant(&dry, &plant, roms(), Variant::Symmetric).unwrap();
    let energy = |r: &RunRecord, from: f64| r.rows.iter().filter(|x| x.time_s > from).map(|x| x.powers_w.iter().sum::<f64>() * r.period_s).sum::<f64>();
    let cure_plant = build_plant(Scenario::molding().plant_config()).unwrap();
    let released = cure_plant.resin_mass() * cure_plant.config().curing.total_heat_of_reaction;
    let injection = 6050.0;
    // the transient saving right after the ramp starts
    let early = energy(&without.record, injection) - energy(&without.record, injection + 3000.0);
    let early_cured = energy(&cured.record, injection) - energy(&cured.record, injection + 3000.0);
    assert!(early_cured < early, "{early_cured} vs {early}");
    let saved = energy(&without.record, injection) - energy(&cured.record, injection);
    assert!(saved > 0.5 * released && saved < 1.5 * released, "saved {saved:.0} J, released {released:.0} J");
    assert!(without.record.final_min_cure.is_none());
}

#[test]
fn heavy_move_penalty_leaves_the_mold_cold() {
    let mut s = Scenario::empty_mold();
    s.controller.r = 1e12;
    let plant = build_plant(s.plant_config()).unwrap();
    let run = run_variant(&s, &plant, roms(), Variant::Standard).unwrap();
    let first = &run.record.rows[0].powers_w;
    for row in &run.record.rows {
        for (u, u0) in row.powers_w.iter().zip(first) {
            assert!((u - u0).abs() < 1.0);
        }
    }
    let last = run.record.rows.last().unwrap();
    assert!(last.control_c.iter().all(|&t| t < last.reference_c - 50.0));
}

#[test]
fn shipped_scenarios_match_defaults() {
    let plant = PlantConfig::default_mold();
    for (file, default) in [("empty_mold.toml", Scenario::empty_mold()), ("molding.toml", Scenario::molding())] {
        let loaded = Scenario::from_file(&configs_dir().join(file)).unwrap();
        assert_eq!(loaded.plant.as_ref(), Some(&plant), "{file}");
        assert_eq!(Scenario { plant: None, ..loaded.clone() }, default, "{file}");
        assert_eq!(loaded.plant_config(), default.plant_config());
    }
}

#[test]
fn missing_plant_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "plant_file = \"nope.toml\"\n").unwrap();
    assert!(Scenario::from_file(&path).is_err());
}
