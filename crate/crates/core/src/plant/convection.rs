use serde::{Deserialize, Serialize};

/// Functional form of a fitted convection law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvectionKind {
    /// `h = a (ΔT - b)^c`
    PowerLaw,
    /// `h = a (b - exp(-c ΔT))`
    SaturatingExponential,
}

/// Temperature-dependent convection coefficient fitted on the mold faces.
///
/// `ΔT` is the surface-to-ambient difference in K and `h` is in W/(m²·K).
/// Outside `[dt_min, dt_max]` the coefficient is frozen at the boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvectionFit {
    pub kind: ConvectionKind,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl ConvectionFit {
    pub const DEFAULT_DT_MIN: f64 = 2.0;
    pub const DEFAULT_DT_MAX: f64 = 157.0;

    pub fn power_law(a: f64, b: f64, c: f64) -> Self {
        Self {
            kind: ConvectionKind::PowerLaw,
            a,
            b,
            c,
            dt_min: Self::DEFAULT_DT_MIN,
            dt_max: Self::DEFAULT_DT_MAX,
        }
    }

    pub fn saturating_exponential(a: f64, b: f64, c: f64) -> Self {
        Self {
            kind: ConvectionKind::SaturatingExponential,
            a,
            b,
            c,
            dt_min: Self::DEFAULT_DT_MIN,
            dt_max: Self::DEFAULT_DT_MAX,
        }
    }

    /// Upper face of the mold.
    pub fn upper_face() -> Self {
        Self::power_law(4.120, 23.567, 0.317)
    }

    /// Lower face of the mold.
    pub fn lower_face() -> Self {
        Self::power_law(0.942, 22.937, 0.533)
    }

    /// Lateral faces of the mold.
    pub fn lateral_face() -> Self {
        Self::saturating_exponential(20.160, 0.395, 0.041)
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(format!("convection fit coefficient a must be > 0, got {}", self.a));
        }
        if !self.b.is_finite() || !self.c.is_finite() {
            return Err("convection fit coefficients must be finite".into());
        }
        if !(self.dt_min <= self.dt_max) {
            return Err(format!(
                "convection clamp bounds inverted: [{}, {}]",
                self.dt_min, self.dt_max
            ));
        }
        Ok(())
    }
}

/// Evaluates the convection coefficient for a surface-to-ambient difference `dt` (K).
///
/// The result is clamped below at zero: both printed fits go negative (or undefined)
/// for small `ΔT`.
pub fn convection_h(fit: &ConvectionFit, dt: f64) -> f64 {
    let dt = if dt.is_nan() { fit.dt_min } else { dt.clamp(fit.dt_min, fit.dt_max) };
    let h = match fit.kind {
        ConvectionKind::PowerLaw => {
            let base = dt - fit.b;
            if base <= 0.0 {
                0.0
            } else {
                fit.a * base.powf(fit.c)
            }
        }
        ConvectionKind::SaturatingExponential => fit.a * (fit.b - (-fit.c * dt).exp()),
    };
    if h.is_finite() {
        h.max(0.0)
    } else {
        0.0
    }
}
