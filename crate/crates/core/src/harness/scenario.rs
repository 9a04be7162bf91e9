use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::mpc::{HildrethOptions, MpcConfig, MOLD_SYMMETRY_PAIRS};
use crate::observer::KalmanTuning;
use crate::plant::PlantConfig;

use super::profile::ReferenceProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Six-output ROM, cost on the control sensors.
    Standard,
    /// Fourteen-output ROM, cost on control sensors and virtual nodes.
    Extended,
    /// `Extended` with paired heaters forced to equal power.
    Symmetric,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Standard, Variant::Extended, Variant::Symmetric];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Extended => "extended",
            Variant::Symmetric => "symmetric",
        }
    }

    pub fn uses_virtual_nodes(self) -> bool {
        !matches!(self, Variant::Standard)
    }
}

impl FromStr for Variant {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Variant::Standard),
            "extended" => Ok(Variant::Extended),
            "symmetric" => Ok(Variant::Symmetric),
            other => Err(HarnessError::Scenario(format!("unknown variant '{other}' (standard, extended, symmetric)"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSpec {
    EmptyMold,
    /// Hold at 120 °C until `injection_s`, then cure at 185 °C for two hours.
    Molding { injection_s: f64 },
    Custom(ReferenceProfile),
}

impl ProfileSpec {
    pub fn build(&self) -> ReferenceProfile {
        match self {
            ProfileSpec::EmptyMold => ReferenceProfile::empty_mold(),
            ProfileSpec::Molding { injection_s } => ReferenceProfile::molding(*injection_s),
            ProfileSpec::Custom(p) => p.clone(),
        }
    }
}

/// Excitation and model orders for identification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdentificationConfig {
    pub samples: usize,
    /// Samples per staircase level.
    pub stair_len: usize,
    /// Samples per PRBS bit.
    pub bit_len: usize,
    pub seed: u64,
    /// Convection coefficient of the linearised identification plant, W/(m²·K).
    pub constant_h: f64,
    pub r: usize,
    pub s: usize,
}

impl Default for IdentificationConfig {
    fn default() -> Self {
        Self { samples: 1600, stair_len: 30, bit_len: 4, seed: 11, constant_h: 15.0, r: 2, s: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerTuning {
    pub horizon: usize,
    pub q: f64,
    pub r: f64,
    pub input_scale_w: f64,
    pub virtual_weight: Option<f64>,
    pub hildreth: HildrethOptions,
}

impl Default for ControllerTuning {
    fn default() -> Self {
        let d = MpcConfig::default();
        Self {
            horizon: d.horizon,
            q: d.q,
            r: d.r,
            input_scale_w: d.input_scale_w,
            virtual_weight: None,
            hildreth: HildrethOptions::default(),
        }
    }
}

/// Which model outputs carry a random-walk perturbation state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// One per measured output.
    Measured,
    /// One per model output, virtual nodes included.
    AllOutputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensorSet {
    /// Control and auxiliary sensors.
    All,
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndicatorWindow {
    /// Defaults to the start of the last ramp.
    pub t_i: Option<f64>,
    /// Defaults to the end of the profile.
    pub t_f: Option<f64>,
    pub sensors: SensorSet,
}

impl Default for IndicatorWindow {
    fn default() -> Self {
        Self { t_i: None, t_f: None, sensors: SensorSet::All }
    }
}

/// Closed-loop experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub controller_period_s: f64,
    /// Thermocouple noise standard deviation, °C.
    pub sensor_noise_std: f64,
    /// Plant description file, relative to the scenario file.
    pub plant_file: Option<String>,
    /// Inline plant description; the default mold when both are absent.
    pub plant: Option<PlantConfig>,
    /// Enables the resin cure source.
    pub curing: bool,
    pub profile: ProfileSpec,
    pub identification: IdentificationConfig,
    pub observer: KalmanTuning,
    pub perturbations: PerturbationMode,
    pub controller: ControllerTuning,
    pub indicators: IndicatorWindow,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::empty_mold()
    }
}

impl Scenario {
    pub fn empty_mold() -> Self {
        Self {
            name: "empty-mold".into(),
            seed: 1,
            controller_period_s: 200.0,
            sensor_noise_std: 0.1,
            plant_file: None,
            plant: None,
            curing: false,
            profile: ProfileSpec::EmptyMold,
            identification: IdentificationConfig::default(),
            observer: KalmanTuning::default(),
            perturbations: PerturbationMode::Measured,
            controller: ControllerTuning::default(),
            indicators: IndicatorWindow::default(),
        }
    }

    pub fn molding() -> Self {
        Self {
            name: "molding".into(),
            curing: true,
            profile: ProfileSpec::Molding { injection_s: 6050.0 },
            indicators: IndicatorWindow { sensors: SensorSet::Control, ..IndicatorWindow::default() },
            ..Self::empty_mold()
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        let scenario: Scenario = toml::from_str(s)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Reads a scenario and resolves `plant_file` next to it.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let mut scenario = Self::from_toml_str(&std::fs::read_to_string(path)?)?;
        if let Some(file) = scenario.plant_file.take() {
            let plant_path = path.parent().unwrap_or(Path::new(".")).join(file);
            scenario.plant = Some(PlantConfig::from_toml_str(&std::fs::read_to_string(plant_path)?)?);
        }
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.controller_period_s > 0.0) {
            return Err(HarnessError::Scenario("controller period must be > 0".into()));
        }
        if !(self.sensor_noise_std >= 0.0) {
            return Err(HarnessError::Scenario("sensor noise must be >= 0".into()));
        }
        if self.controller.horizon == 0 {
            return Err(HarnessError::Scenario("horizon must be >= 1".into()));
        }
        self.profile.build().validate()
    }

    /// Plant description with the scenario's curing switch applied.
    pub fn plant_config(&self) -> PlantConfig {
        let mut cfg = self.plant.clone().unwrap_or_else(PlantConfig::default_mold);
        cfg.curing.enabled = self.curing;
        if let ProfileSpec::Molding { injection_s } = self.profile {
            cfg.curing.injection_time_s = injection_s;
        }
        cfg
    }

    /// Controller settings for `variant` on a plant with the given heater limits.
    pub fn mpc_config(&self, variant: Variant, u_max: &[f64]) -> MpcConfig {
        let t = &self.controller;
        MpcConfig {
            horizon: t.horizon,
            q: t.q,
            q_per_output: None,
            r: t.r,
            input_scale_w: t.input_scale_w,
            u_min: vec![0.0; u_max.len()],
            u_max: u_max.to_vec(),
            symmetry_pairs: if variant == Variant::Symmetric && u_max.len() == 20 {
                MOLD_SYMMETRY_PAIRS.to_vec()
            } else {
                Vec::new()
            },
            extended_domain: variant.uses_virtual_nodes(),
            virtual_weight: t.virtual_weight,
            hildreth: t.hildreth,
        }
    }

    /// `(t_i, t_f)` for the indicators.
    pub fn indicator_window(&self) -> (f64, f64) {
        let profile = self.profile.build();
        (
            self.indicators.t_i.unwrap_or_else(|| profile.last_ramp_start()),
            self.indicators.t_f.unwrap_or_else(|| profile.end_time()),
        )
    }
}
