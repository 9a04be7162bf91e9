use rayon::prelude::*;

use crate::error::HarnessError;
use crate::plant::{build_plant, PlantModel};

use super::closed_loop::{run_closed_loop, LoopSetup, RunRecord};
use super::identify::{identify_roms, IdentifiedRoms};
use super::indicators::{indicators, IndicatorReport};
use super::scenario::{Scenario, SensorSet, Variant};

/// Closed-loop run plus its indicators.
#[derive(Debug, Clone)]
pub struct VariantResult {
    pub variant: Variant,
    pub record: RunRecord,
    pub report: IndicatorReport,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub results: Vec<VariantResult>,
    /// Symmetric controller on the molding profile, when requested.
    pub molding: Option<VariantResult>,
}

impl Comparison {
    pub fn get(&self, variant: Variant) -> Option<&VariantResult> {
        self.results.iter().find(|r| r.variant == variant)
    }

    /// `(label, report)` rows, molding last.
    pub fn table(&self) -> Vec<(String, IndicatorReport)> {
        let mut rows: Vec<_> = self.results.iter().map(|r| (r.variant.name().to_string(), r.report)).collect();
        if let Some(m) = &self.molding {
            rows.push((format!("molding-{}", m.variant.name()), m.report));
        }
        rows
    }
}

/// Plant plus the ROM matching `variant`.
pub fn run_variant(scenario: &Scenario, plant: &PlantModel, roms: &IdentifiedRoms, variant: Variant) -> Result<VariantResult, HarnessError> {
    let rom = if variant.uses_virtual_nodes() { &roms.extended } else { &roms.control };
    let profile = scenario.profile.build();
    let setup = LoopSetup::from_scenario(scenario, plant, rom, &profile, variant, scenario.seed);
    let record = run_closed_loop(plant, &setup)?;
    let (t_i, t_f) = scenario.indicator_window();
    let report = indicators(&record, t_i, t_f, scenario.indicators.sensors)?;
    Ok(VariantResult { variant, record, report })
}

/// Identifies once, then runs every variant on the same plant and noise seed.
pub fn compare_controllers(scenario: &Scenario, molding: Option<&Scenario>) -> Result<Comparison, HarnessError> {
    scenario.validate()?;
    let plant_cfg = scenario.plant_config();
    let (roms, _) = identify_roms(&plant_cfg, &scenario.identification, scenario.controller_period_s)?;
    let plant = build_plant(plant_cfg)?;
    let results = Variant::ALL
        .par_iter()
        .map(|&v| run_variant(scenario, &plant, &roms, v))
        .collect::<Result<Vec<_>, _>>()?;
    let molding = match molding {
        None => None,
        Some(ms) => {
            let mut ms = ms.clone();
            ms.indicators.sensors = SensorSet::Control;
            let plant = build_plant(ms.plant_config())?;
            Some(run_variant(&ms, &plant, &roms, Variant::Symmetric)?)
        }
    };
    Ok(Comparison { results, molding })
}
