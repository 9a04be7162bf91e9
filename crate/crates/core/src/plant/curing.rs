use serde::{Deserialize, Serialize};

use crate::error::PlantError;

use super::config::CellIndex;

/// Universal gas constant, J/(mol·K).
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Autocatalytic cure kinetics of the resin panel.
///
/// `dα/dt = (k1 + k2 α^m) (1 - α)^n` with Arrhenius rates `k_i = A_i exp(-E_i / (R T))`.
/// The default parameters are synthetic: they keep the resin dormant at the 120 °C
/// injection plateau and put the exotherm peak around 180-185 °C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuringModel {
    pub enabled: bool,
    /// Cells that carry a resin slab (cavity surface cells).
    pub resin_cells: Vec<CellIndex>,
    /// Thickness of the resin slab attached to each resin cell, m.
    pub resin_thickness_m: f64,
    /// Simulation time at which the resin is present and starts reacting, s.
    pub injection_time_s: f64,
    pub pre_exponential_1: f64,
    pub activation_energy_1: f64,
    pub pre_exponential_2: f64,
    pub activation_energy_2: f64,
    /// Autocatalytic exponent `m`.
    pub autocatalytic_order: f64,
    /// Reaction order `n`.
    pub reaction_order: f64,
    /// J/kg
    pub total_heat_of_reaction: f64,
    /// kg/m³
    pub resin_density: f64,
}

impl CuringModel {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            resin_cells: Vec::new(),
            ..Self::synthetic_epoxy(Vec::new())
        }
    }

    /// Default synthetic epoxy on the given cells, enabled, injected at t = 0.
    pub fn synthetic_epoxy(resin_cells: Vec<CellIndex>) -> Self {
        Self {
            enabled: true,
            resin_cells,
            resin_thickness_m: 0.0015,
            injection_time_s: 0.0,
            pre_exponential_1: 3.0e9,
            activation_energy_1: 120.0e3,
            pre_exponential_2: 3.0e10,
            activation_energy_2: 115.0e3,
            autocatalytic_order: 0.5,
            reaction_order: 1.0,
            total_heat_of_reaction: 500.0e3,
            resin_density: 1200.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        let positive = [
            ("resin_thickness_m", self.resin_thickness_m),
            ("pre_exponential_1", self.pre_exponential_1),
            ("pre_exponential_2", self.pre_exponential_2),
            ("total_heat_of_reaction", self.total_heat_of_reaction),
            ("resin_density", self.resin_density),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("curing parameter {name} must be > 0, got {v}"));
            }
        }
        if self.autocatalytic_order < 0.0 || self.reaction_order <= 0.0 {
            return Err("curing reaction orders must be non-negative (n > 0)".into());
        }
        Ok(())
    }

    fn rate_constants(&self, temperature_k: f64) -> (f64, f64) {
        let rt = GAS_CONSTANT * temperature_k;
        (
            self.pre_exponential_1 * (-self.activation_energy_1 / rt).exp(),
            self.pre_exponential_2 * (-self.activation_energy_2 / rt).exp(),
        )
    }

    /// Cure rate without domain checks; `alpha` is clamped into `[0, 1]`.
    pub(crate) fn rate_unchecked(&self, alpha: f64, temperature_k: f64) -> f64 {
        let alpha = alpha.clamp(0.0, 1.0);
        if alpha >= 1.0 {
            return 0.0;
        }
        let (k1, k2) = self.rate_constants(temperature_k);
        let r = (k1 + k2 * alpha.powf(self.autocatalytic_order))
            * (1.0 - alpha).powf(self.reaction_order);
        r.max(0.0)
    }

    /// Advances `alpha` over `dt` at fixed temperature with classic RK4 sub-steps.
    pub(crate) fn integrate(&self, alpha: f64, temperature_k: f64, dt: f64) -> f64 {
        if alpha >= 1.0 || dt <= 0.0 {
            return alpha.min(1.0);
        }
        let substeps = (dt / 0.5).ceil().max(1.0) as usize;
        let h = dt / substeps as f64;
        let mut a = alpha;
        for _ in 0..substeps {
            let k1 = self.rate_unchecked(a, temperature_k);
            let k2 = self.rate_unchecked(a + 0.5 * h * k1, temperature_k);
            let k3 = self.rate_unchecked(a + 0.5 * h * k2, temperature_k);
            let k4 = self.rate_unchecked(a + h * k3, temperature_k);
            let next = a + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            a = next.clamp(a, 1.0);
        }
        a
    }
}

/// Cure rate `dα/dt` (1/s) and volumetric heat release `q` (W/m³ of resin).
pub fn curing_rate(model: &CuringModel, alpha: f64, temperature_k: f64) -> Result<(f64, f64), PlantError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(PlantError::CureDomain(alpha));
    }
    let rate = model.rate_unchecked(alpha, temperature_k);
    Ok((rate, rate * model.resin_density * model.total_heat_of_reaction))
}
