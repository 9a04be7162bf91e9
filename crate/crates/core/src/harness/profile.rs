use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Segment {
    /// Linear ramp to `target_c` at `rate_c_per_min`.
    Ramp { target_c: f64, rate_c_per_min: f64 },
    /// Constant temperature until the absolute time `until_s`.
    Hold { until_s: f64 },
}

/// Piecewise-linear set-point schedule starting at `start_c` at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub start_c: f64,
    pub segments: Vec<Segment>,
}

impl ReferenceProfile {
    /// 23 → 120 °C at 2 °C/min, hold to 10000 s, → 180 °C at 2 °C/min, hold to 20000 s.
    pub fn empty_mold() -> Self {
        Self {
            start_c: 23.0,
            segments: vec![
                Segment::Ramp { target_c: 120.0, rate_c_per_min: 2.0 },
                Segment::Hold { until_s: 10000.0 },
                Segment::Ramp { target_c: 180.0, rate_c_per_min: 2.0 },
                Segment::Hold { until_s: 20000.0 },
            ],
        }
    }

    /// Heat to 120 °C, hold until `injection_s`, ramp to 185 °C and hold for two hours.
    pub fn molding(injection_s: f64) -> Self {
        let ramp_s = (185.0 - 120.0) / 2.0 * 60.0;
        Self {
            start_c: 23.0,
            segments: vec![
                Segment::Ramp { target_c: 120.0, rate_c_per_min: 2.0 },
                Segment::Hold { until_s: injection_s },
                Segment::Ramp { target_c: 185.0, rate_c_per_min: 2.0 },
                Segment::Hold { until_s: injection_s + ramp_s + 7200.0 },
            ],
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.segments.is_empty() {
            return Err(HarnessError::Scenario("profile has no segments".into()));
        }
        let mut t = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            match *seg {
                Segment::Ramp { target_c, rate_c_per_min } => {
                    if !(rate_c_per_min > 0.0) || !target_c.is_finite() {
                        return Err(HarnessError::Scenario(format!("segment {i}: ramp rate must be > 0")));
                    }
                }
                Segment::Hold { until_s } => {
                    if !(until_s >= t) {
                        return Err(HarnessError::Scenario(format!("segment {i}: hold ends before it starts ({until_s} < {t})")));
                    }
                }
            }
            t = self.knots()[i + 1].0;
        }
        Ok(())
    }

    /// `(time, temperature)` at every segment boundary.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, self.start_c)];
        let (mut t, mut temp) = (0.0, self.start_c);
        for seg in &self.segments {
            match *seg {
                Segment::Ramp { target_c, rate_c_per_min } => {
                    t += (target_c - temp).abs() / rate_c_per_min * 60.0;
                    temp = target_c;
                }
                Segment::Hold { until_s } => t = t.max(until_s),
            }
            out.push((t, temp));
        }
        out
    }

    pub fn end_time(&self) -> f64 {
        self.knots().last().map_or(0.0, |k| k.0)
    }

    /// Start time of the last ramp.
    pub fn last_ramp_start(&self) -> f64 {
        let knots = self.knots();
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s, Segment::Ramp { .. }))
            .last()
            .map_or(0.0, |(i, _)| knots[i].0)
    }

    /// Set-point at `t`; held at the final value past the end.
    pub fn at(&self, t: f64) -> f64 {
        let knots = self.knots();
        if t <= 0.0 {
            return self.start_c;
        }
        for w in knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if t <= t1 {
                return if t1 > t0 { v0 + (v1 - v0) * (t - t0) / (t1 - t0) } else { v1 };
            }
        }
        knots.last().map_or(self.start_c, |k| k.1)
    }
}
