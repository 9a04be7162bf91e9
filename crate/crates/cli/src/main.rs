use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thermal_mpc::harness::{
    compare_controllers, fit_rom, format_table, identification_data, indicators, read_run_file, run_file_name, run_variant,
    write_plot_data, write_run_file, write_table_csv, IdentifiedRoms, Scenario, SensorSet, Variant,
};
use thermal_mpc::plant::{build_plant, PowerSchedule};
use thermal_mpc::sysid::{staircase_prbs, validate_rom, ArxModel, IoDataset, ModelFile};

/// Thermal MPC experiments on a simulated two-block heated mold.
#[derive(Parser, Debug)]
#[command(name = "thermal-mpc", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario TOML; the built-in empty-mold scenario when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Controller variant for `run`.
    #[arg(long, global = true, default_value = "symmetric", value_parser = parse_variant)]
    variant: Variant,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Open-loop PRBS dataset on the linearised identification plant.
    Simulate {
        /// Number of samples; the scenario value when omitted.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Fits the control and extended ROMs and checks them against the plant.
    Identify {
        /// Dataset CSV from `simulate`; generated when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Closed loop with one controller variant.
    Run {
        /// Directory holding `rom_control.json` and `rom_extended.json` from `identify`.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// All variants on one plant and seed, plus an optional molding run.
    Compare {
        /// Molding scenario TOML; `builtin` for the default molding scenario.
        #[arg(long)]
        molding: Option<String>,
    },
    /// Recomputes indicators from a run CSV.
    Indicators {
        run: PathBuf,
        #[arg(long)]
        t_i: Option<f64>,
        #[arg(long)]
        t_f: Option<f64>,
        #[arg(long, value_enum, default_value = "all")]
        sensors: Sensors,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sensors {
    All,
    Control,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: thermal_mpc::HarnessError| e.to_string())
}

fn load_scenario(common: &Common) -> Result<Scenario> {
    let mut s = match &common.config {
        Some(p) => Scenario::from_file(p).with_context(|| format!("reading scenario {}", p.display()))?,
        None => Scenario::empty_mold(),
    };
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn out_dir(common: &Common) -> Result<&Path> {
    fs::create_dir_all(&common.out).with_context(|| format!("creating {}", common.out.display()))?;
    Ok(&common.out)
}

fn write_model(rom: &ArxModel<f64>, path: &Path) -> Result<()> {
    fs::write(path, ModelFile::from_model(rom).to_json()).with_context(|| format!("writing {}", path.display()))
}

fn read_model(path: &Path) -> Result<ArxModel<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ModelFile::from_json(&text)?.into_model()?)
}

fn simulate(common: &Common, samples: Option<usize>) -> Result<()> {
    let s = load_scenario(common)?;
    let mut ident = s.identification.clone();
    if let Some(n) = samples {
        ident.samples = n;
    }
    if let Some(seed) = common.seed {
        ident.seed = seed;
    }
    let cfg = s.plant_config();
    let data = identification_data(&cfg, &ident, s.controller_period_s)?;
    let path = out_dir(common)?.join("dataset.csv");
    data.write_csv(File::create(&path)?, cfg.sensors.control.len())?;
    println!("wrote {} samples to {}", data.len(), path.display());
    Ok(())
}

fn identify(common: &Common, data: Option<&Path>) -> Result<()> {
    let s = load_scenario(common)?;
    let cfg = s.plant_config();
    let data = match data {
        Some(p) => IoDataset::read_csv(File::open(p).with_context(|| format!("opening {}", p.display()))?)?,
        None => identification_data(&cfg, &s.identification, s.controller_period_s)?,
    };
    let nc = cfg.sensors.control.len();
    let roms = IdentifiedRoms {
        control: fit_rom(&data, nc, cfg.ambient_c, &s.identification)?,
        extended: fit_rom(&data, data.outputs(), cfg.ambient_c, &s.identification)?,
    };
    let dir = out_dir(common)?;
    write_model(&roms.control, &dir.join("rom_control.json"))?;
    write_model(&roms.extended, &dir.join("rom_extended.json"))?;

    let plant = build_plant(cfg)?;
    let schedule = PowerSchedule {
        sample_period: s.controller_period_s,
        rows: staircase_prbs(plant.max_power(), 300, s.identification.stair_len, s.identification.bit_len, s.seed.wrapping_add(1000)),
    };
    let report = validate_rom(&roms.control, &plant, &schedule, schedule.duration(), Some(&s.observer))?;
    fs::write(dir.join("validation.json"), serde_json::to_string_pretty(&report)?)?;
    println!(
        "control ROM: residual RMS {:.4} °C, spectral radius {:.4}",
        roms.control.residual.rms,
        roms.control.spectral_radius()
    );
    println!(
        "extended ROM: residual RMS {:.4} °C, spectral radius {:.4}",
        roms.extended.residual.rms,
        roms.extended.spectral_radius()
    );
    let with = report.with_observer.as_ref().map_or(f64::NAN, |r| r.rms);
    println!("plant check: open-loop RMS {:.3} °C, with observer {:.3} °C", report.open_loop.rms, with);
    println!("wrote models and validation.json to {}", dir.display());
    Ok(())
}

fn obtain_roms(s: &Scenario, models: Option<&Path>) -> Result<IdentifiedRoms> {
    if let Some(dir) = models {
        return Ok(IdentifiedRoms {
            control: read_model(&dir.join("rom_control.json"))?,
            extended: read_model(&dir.join("rom_extended.json"))?,
        });
    }
    let cfg = s.plant_config();
    let data = identification_data(&cfg, &s.identification, s.controller_period_s)?;
    Ok(IdentifiedRoms {
        control: fit_rom(&data, cfg.sensors.control.len(), cfg.ambient_c, &s.identification)?,
        extended: fit_rom(&data, data.outputs(), cfg.ambient_c, &s.identification)?,
    })
}

fn run(common: &Common, models: Option<&Path>) -> Result<()> {
    let s = load_scenario(common)?;
    let roms = obtain_roms(&s, models)?;
    let plant = build_plant(s.plant_config())?;
    let start = Instant::now();
    let result = run_variant(&s, &plant, &roms, common.variant)?;
    let dir = out_dir(common)?;
    let path = dir.join(run_file_name(common.variant));
    write_run_file(&result.record, &path)?;
    let (_, t_f) = s.indicator_window();
    write_plot_data(&result.record, dir, common.variant.name(), t_f)?;
    print!("{}", format_table(&[(common.variant.name().to_string(), result.report)]));
    if let Some(cure) = result.record.final_min_cure {
        println!("minimum degree of cure: {cure:.5}");
    }
    println!("{} steps in {:.1} s, wrote {}", result.record.len(), start.elapsed().as_secs_f64(), path.display());
    Ok(())
}

fn compare(common: &Common, molding: Option<&str>) -> Result<()> {
    let s = load_scenario(common)?;
    let molding = match molding {
        None => None,
        Some("builtin") => Some(Scenario { seed: s.seed, ..Scenario::molding() }),
        Some(p) => Some(Scenario::from_file(Path::new(p)).with_context(|| format!("reading molding scenario {p}"))?),
    };
    let start = Instant::now();
    let cmp = compare_controllers(&s, molding.as_ref())?;
    let dir = out_dir(common)?;
    let (_, t_f) = s.indicator_window();
    for r in &cmp.results {
        write_run_file(&r.record, &dir.join(run_file_name(r.variant)))?;
        write_plot_data(&r.record, dir, r.variant.name(), t_f)?;
    }
    if let (Some(m), Some(ms)) = (&cmp.molding, &molding) {
        write_run_file(&m.record, &dir.join("run_molding.csv"))?;
        write_plot_data(&m.record, dir, "molding", ms.indicator_window().1)?;
        if let Some(cure) = m.record.final_min_cure {
            println!("molding minimum degree of cure: {cure:.5}");
        }
    }
    let table = cmp.table();
    write_table_csv(&table, File::create(dir.join("comparison.csv"))?)?;
    print!("{}", format_table(&table));
    println!("compared in {:.1} s, results in {}", start.elapsed().as_secs_f64(), dir.display());
    Ok(())
}

fn recompute(run: &Path, t_i: Option<f64>, t_f: Option<f64>, sensors: Sensors) -> Result<()> {
    let record = read_run_file(run).with_context(|| format!("reading {}", run.display()))?;
    let (Some(first), Some(last)) = (record.rows.first(), record.rows.last()) else {
        bail!("{} has no rows", run.display());
    };
    let set = match sensors {
        Sensors::All => SensorSet::All,
        Sensors::Control => SensorSet::Control,
    };
    let rep = indicators(&record, t_i.unwrap_or(first.time_s), t_f.unwrap_or(last.time_s), set)?;
    let name = run.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
    print!("{}", format_table(&[(name, rep)]));
    println!("window [{}, {}] s, {} samples, {} sensors", rep.t_i, rep.t_f, rep.samples, rep.sensors);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate { samples } => simulate(&cli.common, *samples),
        Command::Identify { data } => identify(&cli.common, data.as_deref()),
        Command::Run { models } => run(&cli.common, models.as_deref()),
        Command::Compare { molding } => compare(&cli.common, molding.as_deref()),
        Command::Indicators { run, t_i, t_f, sensors } => recompute(run, *t_i, *t_f, *sensors),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
