use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::HarnessError;

use super::closed_loop::{RunRecord, RunRow};
use super::indicators::IndicatorReport;
use super::scenario::Variant;

/// Column counts used when a record is empty.
const DEFAULT_SHAPE: RunShape = RunShape { control: 6, auxiliary: 8, inputs: 20, perturbations: 6 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct RunShape {
    control: usize,
    auxiliary: usize,
    inputs: usize,
    perturbations: usize,
}

impl RunShape {
    fn of(record: &RunRecord) -> Self {
        record.rows.first().map_or(DEFAULT_SHAPE, |r| RunShape {
            control: r.control_c.len(),
            auxiliary: r.auxiliary_c.len(),
            inputs: r.powers_w.len(),
            perturbations: r.perturbations.len(),
        })
    }
}

fn run_header(shape: RunShape) -> Vec<String> {
    let mut h = vec!["time_s".to_string(), "ref_C".to_string()];
    h.extend((1..=shape.control).map(|i| format!("y{i}_C")));
    h.extend((1..=shape.auxiliary).map(|i| format!("aux{i}_C")));
    h.extend((1..=shape.auxiliary).map(|i| format!("vhat{i}_C")));
    h.extend((1..=shape.inputs).map(|i| format!("u{i}_W")));
    h.extend((1..=shape.perturbations).map(|i| format!("p{i}_hat")));
    h.extend(["cost", "qp_iterations", "active_constraints"].map(String::from));
    h
}

/// Run CSV: one row per controller period; `vhat` columns are blank without virtual nodes.
pub fn write_run_csv<W: Write>(record: &RunRecord, writer: W) -> Result<(), HarnessError> {
    let shape = RunShape::of(record);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(run_header(shape))?;
    for row in &record.rows {
        let mut fields: Vec<String> = vec![row.time_s.to_string(), row.reference_c.to_string()];
        fields.extend(row.control_c.iter().map(f64::to_string));
        fields.extend(row.auxiliary_c.iter().map(f64::to_string));
        if row.virtual_c.is_empty() {
            fields.extend(std::iter::repeat_n(String::new(), shape.auxiliary));
        } else {
            fields.extend(row.virtual_c.iter().map(f64::to_string));
        }
        fields.extend(row.powers_w.iter().map(f64::to_string));
        fields.extend(row.perturbations.iter().map(f64::to_string));
        fields.push(row.cost.to_string());
        fields.push(row.qp_iterations.to_string());
        fields.push(row.active_constraints.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a run CSV written by [`write_run_csv`].
pub fn read_run_csv<R: Read>(reader: R) -> Result<RunRecord, HarnessError> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let cols = |prefix: &str, suffix: &str| -> Vec<usize> {
        header
            .iter()
            .enumerate()
            .filter(|(_, h)| {
                h.strip_prefix(prefix)
                    .and_then(|rest| rest.strip_suffix(suffix))
                    .is_some_and(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_digit()))
            })
            .map(|(i, _)| i)
            .collect()
    };
    let find = |name: &str| -> Result<usize, HarnessError> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| HarnessError::Scenario(format!("run CSV lacks column '{name}'")))
    };
    let (t_col, ref_col, cost_col) = (find("time_s")?, find("ref_C")?, find("cost")?);
    let (y, aux, vhat, u, p) = (cols("y", "_C"), cols("aux", "_C"), cols("vhat", "_C"), cols("u", "_W"), cols("p", "_hat"));
    let iter_col = header.iter().position(|h| h == "qp_iterations");
    let active_col = header.iter().position(|h| h == "active_constraints");

    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64, HarnessError> {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|e| HarnessError::Scenario(format!("row {}: column '{}': {e}", line + 1, header[i])))
        };
        let many = |idx: &[usize]| -> Result<Vec<f64>, HarnessError> { idx.iter().map(|&i| num(i)).collect() };
        let virtual_c = if vhat.iter().all(|&i| rec.get(i).unwrap_or("").trim().is_empty()) { Vec::new() } else { many(&vhat)? };
        let count = |c: Option<usize>| -> Result<usize, HarnessError> { Ok(c.map(|i| num(i)).transpose()?.unwrap_or(0.0) as usize) };
        rows.push(RunRow {
            time_s: num(t_col)?,
            reference_c: num(ref_col)?,
            control_c: many(&y)?,
            auxiliary_c: many(&aux)?,
            virtual_c,
            powers_w: many(&u)?,
            perturbations: many(&p)?,
            cost: num(cost_col)?,
            qp_iterations: count(iter_col)?,
            active_constraints: count(active_col)?,
        });
    }
    let period_s = if rows.len() >= 2 { rows[1].time_s - rows[0].time_s } else { 0.0 };
    Ok(RunRecord { variant: None, period_s, rows, final_min_cure: None })
}

pub fn write_run_file(record: &RunRecord, path: &Path) -> Result<(), HarnessError> {
    write_run_csv(record, File::create(path)?)
}

pub fn read_run_file(path: &Path) -> Result<RunRecord, HarnessError> {
    read_run_csv(File::open(path)?)
}

/// Tracking, sensor spread at `t_hold`, and power command files for plotting.
pub fn write_plot_data(record: &RunRecord, dir: &Path, prefix: &str, t_hold: f64) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let tracking = dir.join(format!("{prefix}_tracking.csv"));
    let mut w = csv::Writer::from_path(&tracking)?;
    w.write_record(["time_s", "ref_C", "control_mean_C", "all_min_C", "all_max_C", "all_mean_C"])?;
    for row in &record.rows {
        let all: Vec<f64> = row.control_c.iter().chain(&row.auxiliary_c).copied().collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        w.write_record([row.time_s, row.reference_c, mean(&row.control_c), lo, hi, mean(&all)].map(|v| v.to_string()))?;
    }
    w.flush()?;

    let spread = dir.join(format!("{prefix}_spread.csv"));
    let mut w = csv::Writer::from_path(&spread)?;
    w.write_record(["sensor", "kind", "temperature_C", "deviation_from_ref_C", "estimate_C"])?;
    if let Some(row) = record.rows.iter().filter(|r| r.time_s <= t_hold + 1e-9).last() {
        for (i, t) in row.control_c.iter().enumerate() {
            w.write_record([format!("y{}", i + 1), "control".into(), t.to_string(), (t - row.reference_c).to_string(), String::new()])?;
        }
        for (i, t) in row.auxiliary_c.iter().enumerate() {
            let est = row.virtual_c.get(i).map(f64::to_string).unwrap_or_default();
            w.write_record([format!("aux{}", i + 1), "auxiliary".into(), t.to_string(), (t - row.reference_c).to_string(), est])?;
        }
    }
    w.flush()?;

    let powers = dir.join(format!("{prefix}_powers.csv"));
    let mut w = csv::Writer::from_path(&powers)?;
    let nu = record.rows.first().map_or(DEFAULT_SHAPE.inputs, |r| r.powers_w.len());
    let mut header = vec!["time_s".to_string()];
    header.extend((1..=nu).map(|i| format!("u{i}_W")));
    w.write_record(&header)?;
    for row in &record.rows {
        let mut f = vec![row.time_s.to_string()];
        f.extend(row.powers_w.iter().map(f64::to_string));
        w.write_record(&f)?;
    }
    w.flush()?;
    Ok(vec![tracking, spread, powers])
}

/// Comparison table as CSV: one row per run.
pub fn write_table_csv<W: Write>(rows: &[(String, IndicatorReport)], writer: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["run", "rmse_avg_stat", "rmse_ref_stat", "rmse_avg_global", "rmse_ref_global", "t_i", "t_f", "sensors"])?;
    for (name, r) in rows {
        w.write_record([
            name.clone(),
            r.rmse_avg_stat.to_string(),
            r.rmse_ref_stat.to_string(),
            r.rmse_avg_global.to_string(),
            r.rmse_ref_global.to_string(),
            r.t_i.to_string(),
            r.t_f.to_string(),
            r.sensors.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text rendering of a comparison table.
pub fn format_table(rows: &[(String, IndicatorReport)]) -> String {
    let mut s = format!(
        "{:<20} {:>14} {:>14} {:>16} {:>16}\n",
        "run", "RMSE_avg,stat", "RMSE_ref,stat", "RMSE_avg,global", "RMSE_ref,global"
    );
    for (name, r) in rows {
        s.push_str(&format!(
            "{:<20} {:>14.3} {:>14.3} {:>16.3} {:>16.3}\n",
            name, r.rmse_avg_stat, r.rmse_ref_stat, r.rmse_avg_global, r.rmse_ref_global
        ));
    }
    s
}

pub fn run_file_name(variant: Variant) -> String {
    format!("run_{}.csv", variant.name())
}
