use serde::Serialize;

use crate::error::HarnessError;

use super::closed_loop::RunRecord;
use super::scenario::SensorSet;

/// Homogeneity and tracking RMSE at the final instant and over a window, °C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorReport {
    pub rmse_avg_stat: f64,
    pub rmse_ref_stat: f64,
    pub rmse_avg_global: f64,
    pub rmse_ref_global: f64,
    pub t_i: f64,
    pub t_f: f64,
    /// Number of sensors `n`.
    pub sensors: usize,
    /// Number of samples in `[t_i, t_f]`.
    pub samples: usize,
}

/// `(Σ (T_j - T̄)², Σ (T_j - T_ref)²)` over one instant.
fn instant_sums(temps: &[f64], reference: f64) -> (f64, f64) {
    let mean = temps.iter().sum::<f64>() / temps.len() as f64;
    temps.iter().fold((0.0, 0.0), |(a, r), &t| (a + (t - mean).powi(2), r + (t - reference).powi(2)))
}

fn sensor_values(row: &super::closed_loop::RunRow, set: SensorSet) -> Vec<f64> {
    match set {
        SensorSet::Control => row.control_c.clone(),
        SensorSet::All => row.control_c.iter().chain(&row.auxiliary_c).copied().collect(),
    }
}

/// Stationary indicators use the last sample at or before `t_f`; global ones
/// average the squared deviations over every sample in `[t_i, t_f]` and all sensors.
pub fn indicators(record: &RunRecord, t_i: f64, t_f: f64, set: SensorSet) -> Result<IndicatorReport, HarnessError> {
    let tol = 1e-9 * t_f.abs().max(1.0);
    let window: Vec<_> = record.rows.iter().filter(|r| r.time_s >= t_i - tol && r.time_s <= t_f + tol).collect();
    if !(t_i < t_f) || window.is_empty() {
        return Err(HarnessError::EmptyWindow { t_i, t_f });
    }
    let last = window[window.len() - 1];
    let final_temps = sensor_values(last, set);
    let n = final_temps.len();
    if n == 0 {
        return Err(HarnessError::Scenario("record has no sensor values".into()));
    }
    let (avg_f, ref_f) = instant_sums(&final_temps, last.reference_c);
    let (mut avg_g, mut ref_g) = (0.0, 0.0);
    for row in &window {
        let (a, r) = instant_sums(&sensor_values(row, set), row.reference_c);
        avg_g += a;
        ref_g += r;
    }
    let count = (n * window.len()) as f64;
    Ok(IndicatorReport {
        rmse_avg_stat: (avg_f / n as f64).sqrt(),
        rmse_ref_stat: (ref_f / n as f64).sqrt(),
        rmse_avg_global: (avg_g / count).sqrt(),
        rmse_ref_global: (ref_g / count).sqrt(),
        t_i,
        t_f,
        sensors: n,
        samples: window.len(),
    })
}
