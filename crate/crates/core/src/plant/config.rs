use serde::{Deserialize, Serialize};

use super::convection::ConvectionFit;
use super::curing::CuringModel;

/// `[ix, iy, iz]` grid coordinates; `iz` runs through the stacked blocks bottom to top.
pub type CellIndex = [usize; 3];

/// Celsius to kelvin offset.
pub const KELVIN: f64 = 273.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialProps {
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    /// W/(m·K)
    pub conductivity: f64,
    /// Admissible conductivity band, W/(m·K).
    pub conductivity_band: [f64; 2],
}

impl Default for MaterialProps {
    fn default() -> Self {
        Self {
            density: 7850.0,
            specific_heat: 520.0,
            conductivity: 34.0,
            conductivity_band: [33.0, 35.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Number of stacked steel blocks (1 or 2).
    pub blocks: usize,
    pub nx: usize,
    pub ny: usize,
    /// Cells through the thickness of one block.
    pub nz_per_block: usize,
    pub size_x_m: f64,
    pub size_y_m: f64,
    pub block_thickness_m: f64,
}

/// Thin layer between the two blocks: the cavity inside its footprint, the spacer frame outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityConfig {
    /// Inclusive cell range along x covered by the cavity.
    pub x_range: [usize; 2],
    /// Inclusive cell range along y covered by the cavity.
    pub y_range: [usize; 2],
    pub gap_m: f64,
    /// Effective conductivity of the cavity content, W/(m·K).
    pub conductivity: f64,
    /// Conductivity of the spacer frame around the cavity, W/(m·K).
    pub frame_conductivity: f64,
}

/// Insulation panels in series with the exterior convection.
///
/// Panel 1 (0.53 W/(m·K)) is mapped to the upper/lower faces and panel 2
/// (0.26 W/(m·K)) to the lateral faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsulationConfig {
    pub upper_lower_thickness_m: f64,
    pub upper_lower_conductivity: f64,
    pub lateral_thickness_m: f64,
    pub lateral_conductivity: f64,
}

impl Default for InsulationConfig {
    fn default() -> Self {
        Self {
            upper_lower_thickness_m: 0.006,
            upper_lower_conductivity: 0.53,
            lateral_thickness_m: 0.007,
            lateral_conductivity: 0.26,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvectionConfig {
    pub upper: ConvectionFit,
    pub lower: ConvectionFit,
    pub lateral: ConvectionFit,
    /// When set, every exterior face uses this constant coefficient instead of the fits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_h: Option<f64>,
}

impl Default for ConvectionConfig {
    fn default() -> Self {
        Self {
            upper: ConvectionFit::upper_face(),
            lower: ConvectionFit::lower_face(),
            lateral: ConvectionFit::lateral_face(),
            constant_h: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaterSpec {
    /// 1-based heater number.
    pub id: usize,
    pub max_power: f64,
    pub footprint: Vec<CellIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub control: Vec<CellIndex>,
    pub auxiliary: Vec<CellIndex>,
}

impl SensorLayout {
    pub fn len(&self) -> usize {
        self.control.len() + self.auxiliary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn all(&self) -> impl Iterator<Item = &CellIndex> {
        self.control.iter().chain(self.auxiliary.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantConfig {
    pub ambient_c: f64,
    /// Internal implicit integration step, s.
    pub dt_s: f64,
    pub grid: GridConfig,
    pub material: MaterialProps,
    pub cavity: CavityConfig,
    pub insulation: InsulationConfig,
    pub convection: ConvectionConfig,
    pub heaters: Vec<HeaterSpec>,
    pub sensors: SensorLayout,
    pub curing: CuringModel,
}

impl Default for PlantConfig {
    fn default() -> Self {
        Self::default_mold()
    }
}

impl PlantConfig {
    /// Two 500×400×40 mm steel blocks on a 10×8×4 grid each, 20 heaters, 14 sensors.
    ///
    /// The layout is invariant under a half-turn about the vertical axis through the
    /// mold centre, `(x, y) -> (nx-1-x, ny-1-y)`, which maps heater `i` onto its
    /// symmetry partner (1↔8, 2↔7, …, 17↔18, 19↔20). Auxiliary sensors on the
    /// upper face and two of the lower ones sit at the half-turn images of the
    /// control sensors.
    pub fn default_mold() -> Self {
        let (nx, ny, nzb) = (10, 8, 4);
        let nz = 2 * nzb;
        let upper_surface = nzb; // bottom layer of the upper block
        let lower_surface = nzb - 1; // top layer of the lower block
        let upper_cartridge_z = nzb + 1;
        let lower_cartridge_z = nzb - 2;

        let mut heaters = Vec::with_capacity(20);
        let spans = [[1, 2], [3, 4], [5, 6], [7, 8]];
        for (block, z) in [(0usize, upper_cartridge_z), (1, lower_cartridge_z)] {
            for (row, y) in [2usize, 5].into_iter().enumerate() {
                for (k, span) in spans.iter().enumerate() {
                    heaters.push(HeaterSpec {
                        id: block * 8 + row * 4 + k + 1,
                        max_power: 500.0,
                        footprint: span.iter().map(|&x| [x, y, z]).collect(),
                    });
                }
            }
        }
        let face = |fixed_y: Option<usize>, fixed_x: Option<usize>| -> Vec<CellIndex> {
            let mut cells = Vec::new();
            for z in 0..nz {
                match (fixed_y, fixed_x) {
                    (Some(y), None) => (1..nx - 1).for_each(|x| cells.push([x, y, z])),
                    (None, Some(x)) => (1..ny - 1).for_each(|y| cells.push([x, y, z])),
                    _ => unreachable!(),
                }
            }
            cells
        };
        heaters.push(HeaterSpec { id: 17, max_power: 750.0, footprint: face(Some(0), None) });
        heaters.push(HeaterSpec { id: 18, max_power: 750.0, footprint: face(Some(ny - 1), None) });
        heaters.push(HeaterSpec { id: 19, max_power: 550.0, footprint: face(None, Some(0)) });
        heaters.push(HeaterSpec { id: 20, max_power: 550.0, footprint: face(None, Some(nx - 1)) });

        let sensors = SensorLayout {
            control: vec![
                [2, 2, upper_surface],
                [6, 2, upper_surface],
                [2, 4, upper_surface],
                [5, 5, upper_surface],
                [3, 2, lower_surface],
                [6, 4, lower_surface],
            ],
            auxiliary: vec![
                [7, 5, upper_surface],
                [3, 5, upper_surface],
                [7, 3, upper_surface],
                [4, 2, upper_surface],
                [6, 5, lower_surface],
                [3, 3, lower_surface],
                [1, 3, lower_surface],
                [8, 4, lower_surface],
            ],
        };

        let cavity = CavityConfig {
            x_range: [1, 8],
            y_range: [1, 6],
            gap_m: 0.003,
            conductivity: 0.2,
            frame_conductivity: 34.0,
        };
        let mut resin_cells = Vec::new();
        for z in [lower_surface, upper_surface] {
            for y in cavity.y_range[0]..=cavity.y_range[1] {
                for x in cavity.x_range[0]..=cavity.x_range[1] {
                    resin_cells.push([x, y, z]);
                }
            }
        }
        let mut curing = CuringModel::synthetic_epoxy(resin_cells);
        curing.enabled = false;

        Self {
            ambient_c: 23.0,
            dt_s: 20.0,
            grid: GridConfig {
                blocks: 2,
                nx,
                ny,
                nz_per_block: nzb,
                size_x_m: 0.5,
                size_y_m: 0.4,
                block_thickness_m: 0.04,
            },
            material: MaterialProps::default(),
            cavity,
            insulation: InsulationConfig::default(),
            convection: ConvectionConfig::default(),
            heaters,
            sensors,
            curing,
        }
    }

    /// Single steel cell of the given volume with one heater and one sensor.
    pub fn lumped(volume_m3: f64, max_power: f64) -> Self {
        let side = volume_m3.cbrt();
        Self {
            ambient_c: 23.0,
            dt_s: 20.0,
            grid: GridConfig {
                blocks: 1,
                nx: 1,
                ny: 1,
                nz_per_block: 1,
                size_x_m: side,
                size_y_m: side,
                block_thickness_m: side,
            },
            material: MaterialProps::default(),
            cavity: CavityConfig {
                x_range: [0, 0],
                y_range: [0, 0],
                gap_m: 0.003,
                conductivity: 0.2,
                frame_conductivity: 34.0,
            },
            insulation: InsulationConfig::default(),
            convection: ConvectionConfig::default(),
            heaters: vec![HeaterSpec { id: 1, max_power, footprint: vec![[0, 0, 0]] }],
            sensors: SensorLayout { control: vec![[0, 0, 0]], auxiliary: vec![] },
            curing: CuringModel::disabled(),
        }
    }

    /// Same plant with every exterior face at a constant convection coefficient.
    pub fn with_constant_h(mut self, h: f64) -> Self {
        self.convection.constant_h = Some(h);
        self
    }

    pub fn from_toml_str(s: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(s)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plant config serializes")
    }

    pub fn nz(&self) -> usize {
        self.grid.blocks * self.grid.nz_per_block
    }

    pub fn cell_count(&self) -> usize {
        self.grid.nx * self.grid.ny * self.nz()
    }

    pub fn ambient_k(&self) -> f64 {
        self.ambient_c + KELVIN
    }

    /// Half-turn image of a cell about the vertical centre axis.
    pub fn half_turn(&self, c: CellIndex) -> CellIndex {
        [self.grid.nx - 1 - c[0], self.grid.ny - 1 - c[1], c[2]]
    }
}
