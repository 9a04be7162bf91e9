use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::PlantError;

use super::config::{CellIndex, PlantConfig, KELVIN};
use super::convection::{convection_h, ConvectionFit};
use super::curing::CuringModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    Upper,
    Lower,
    Lateral,
}

/// Exterior face of a boundary cell.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BoundaryFace {
    cell: usize,
    kind: FaceKind,
    area: f64,
    /// Half-cell steel plus insulation resistance, m²·K/W.
    wall_resistance: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct ResinSlab {
    cell: usize,
    volume: f64,
}

/// Temperatures (K), per-resin-cell degree of cure and simulation time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub temperatures: Vec<f64>,
    pub cure_degree: Vec<f64>,
    pub sim_time: f64,
}

/// Energy bookkeeping of one implicit step, J.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEnergy {
    pub heater_input: f64,
    pub curing_release: f64,
    pub convective_loss: f64,
}

/// Finite-volume thermal model of the mold.
#[derive(Debug, Clone)]
pub struct PlantModel {
    config: PlantConfig,
    capacity: Vec<f64>,
    links: Vec<(usize, usize, f64)>,
    faces: Vec<BoundaryFace>,
    heater_cells: Vec<Vec<usize>>,
    max_power: Vec<f64>,
    control_idx: Vec<usize>,
    auxiliary_idx: Vec<usize>,
    resin: Vec<ResinSlab>,
}

fn config_err(msg: impl Into<String>) -> PlantError {
    PlantError::Config(msg.into())
}

/// Assembles the finite-volume network for a plant configuration.
pub fn build_plant(config: PlantConfig) -> Result<PlantModel, PlantError> {
    PlantModel::new(config)
}

impl PlantModel {
    pub fn new(config: PlantConfig) -> Result<Self, PlantError> {
        let g = &config.grid;
        if g.blocks == 0 || g.blocks > 2 {
            return Err(config_err(format!("blocks must be 1 or 2, got {}", g.blocks)));
        }
        if g.nx == 0 || g.ny == 0 || g.nz_per_block == 0 {
            return Err(config_err("grid needs at least one cell per axis"));
        }
        for (name, v) in [
            ("size_x_m", g.size_x_m),
            ("size_y_m", g.size_y_m),
            ("block_thickness_m", g.block_thickness_m),
            ("dt_s", config.dt_s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(config_err(format!("{name} must be > 0")));
            }
        }
        let mat = &config.material;
        if !(mat.density > 0.0 && mat.specific_heat > 0.0 && mat.conductivity > 0.0) {
            return Err(config_err("material properties must be strictly positive"));
        }
        let [kmin, kmax] = mat.conductivity_band;
        if mat.conductivity < kmin || mat.conductivity > kmax {
            return Err(config_err(format!(
                "conductivity {} outside declared band [{kmin}, {kmax}]",
                mat.conductivity
            )));
        }
        for fit in [&config.convection.upper, &config.convection.lower, &config.convection.lateral] {
            fit.validate().map_err(config_err)?;
        }
        if let Some(h) = config.convection.constant_h {
            if !(h >= 0.0) || !h.is_finite() {
                return Err(config_err("constant_h must be finite and >= 0"));
            }
        }
        let ins = &config.insulation;
        if !(ins.upper_lower_conductivity > 0.0 && ins.lateral_conductivity > 0.0)
            || ins.upper_lower_thickness_m < 0.0
            || ins.lateral_thickness_m < 0.0
        {
            return Err(config_err("insulation needs positive conductivities and non-negative thickness"));
        }
        if g.blocks == 2 && !(config.cavity.gap_m > 0.0 && config.cavity.conductivity > 0.0 && config.cavity.frame_conductivity > 0.0) {
            return Err(config_err("cavity layer needs positive gap and conductivities"));
        }

        let (nx, ny, nz) = (g.nx, g.ny, config.nz());
        let dx = g.size_x_m / nx as f64;
        let dy = g.size_y_m / ny as f64;
        let dz = g.block_thickness_m / g.nz_per_block as f64;
        let k = mat.conductivity;
        let n = nx * ny * nz;
        let idx = |x: usize, y: usize, z: usize| (z * ny + y) * nx + x;
        let in_grid = |c: &CellIndex| c[0] < nx && c[1] < ny && c[2] < nz;

        let capacity = vec![mat.density * mat.specific_heat * dx * dy * dz; n];

        let mut links = Vec::new();
        let in_cavity = |x: usize, y: usize| {
            let cav = &config.cavity;
            (cav.x_range[0]..=cav.x_range[1]).contains(&x) && (cav.y_range[0]..=cav.y_range[1]).contains(&y)
        };
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let i = idx(x, y, z);
                    if x + 1 < nx {
                        links.push((i, idx(x + 1, y, z), k * dy * dz / dx));
                    }
                    if y + 1 < ny {
                        links.push((i, idx(x, y + 1, z), k * dx * dz / dy));
                    }
                    if z + 1 < nz {
                        let area = dx * dy;
                        let interface = g.blocks == 2 && z + 1 == g.nz_per_block;
                        let resistance = if interface {
                            let layer_k = if in_cavity(x, y) {
                                config.cavity.conductivity
                            } else {
                                config.cavity.frame_conductivity
                            };
                            dz / k + config.cavity.gap_m / layer_k
                        } else {
                            dz / k
                        };
                        links.push((i, idx(x, y, z + 1), area / resistance));
                    }
                }
            }
        }

        let mut faces = Vec::new();
        let r_ul = ins.upper_lower_thickness_m / ins.upper_lower_conductivity;
        let r_lat = ins.lateral_thickness_m / ins.lateral_conductivity;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let cell = idx(x, y, z);
                    let mut push = |kind, area: f64, half: f64, r_ins: f64| {
                        faces.push(BoundaryFace { cell, kind, area, wall_resistance: half / k + r_ins })
                    };
                    if z == nz - 1 {
                        push(FaceKind::Upper, dx * dy, dz / 2.0, r_ul);
                    }
                    if z == 0 {
                        push(FaceKind::Lower, dx * dy, dz / 2.0, r_ul);
                    }
                    if x == 0 {
                        push(FaceKind::Lateral, dy * dz, dx / 2.0, r_lat);
                    }
                    if x == nx - 1 {
                        push(FaceKind::Lateral, dy * dz, dx / 2.0, r_lat);
                    }
                    if y == 0 {
                        push(FaceKind::Lateral, dx * dz, dy / 2.0, r_lat);
                    }
                    if y == ny - 1 {
                        push(FaceKind::Lateral, dx * dz, dy / 2.0, r_lat);
                    }
                }
            }
        }

        let mut owner: HashMap<usize, usize> = HashMap::new();
        let mut heater_cells = Vec::with_capacity(config.heaters.len());
        let mut max_power = Vec::with_capacity(config.heaters.len());
        for heater in &config.heaters {
            if heater.footprint.is_empty() {
                return Err(config_err(format!("heater U{} has an empty footprint", heater.id)));
            }
            if !(heater.max_power > 0.0) || !heater.max_power.is_finite() {
                return Err(config_err(format!("heater U{} needs a positive max_power", heater.id)));
            }
            let mut cells = Vec::with_capacity(heater.footprint.len());
            for c in &heater.footprint {
                if !in_grid(c) {
                    return Err(config_err(format!("heater U{} cell {:?} outside the grid", heater.id, c)));
                }
                let i = idx(c[0], c[1], c[2]);
                if let Some(other) = owner.insert(i, heater.id) {
                    return Err(config_err(format!(
                        "heater footprints overlap: U{} and U{} share cell {:?}",
                        other, heater.id, c
                    )));
                }
                cells.push(i);
            }
            heater_cells.push(cells);
            max_power.push(heater.max_power);
        }

        let cavity_surface = |c: &CellIndex| -> bool {
            let surface_layer = if g.blocks == 2 {
                c[2] + 1 == g.nz_per_block || c[2] == g.nz_per_block
            } else {
                c[2] + 1 == nz
            };
            surface_layer && in_cavity(c[0], c[1])
        };
        let mut seen = HashMap::new();
        let mut sensor_index = |c: &CellIndex, label: String| -> Result<usize, PlantError> {
            if !in_grid(c) {
                return Err(config_err(format!("sensor {label} at {:?} outside the grid", c)));
            }
            if !cavity_surface(c) {
                return Err(config_err(format!("sensor {label} at {:?} is not on a cavity surface", c)));
            }
            if let Some(prev) = seen.insert(*c, label.clone()) {
                return Err(config_err(format!("sensors {prev} and {label} share cell {:?}", c)));
            }
            Ok(idx(c[0], c[1], c[2]))
        };
        let control_idx = config
            .sensors
            .control
            .iter()
            .enumerate()
            .map(|(i, c)| sensor_index(c, format!("y{}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let auxiliary_idx = config
            .sensors
            .auxiliary
            .iter()
            .enumerate()
            .map(|(i, c)| sensor_index(c, format!("aux{}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;

        config.curing.validate().map_err(config_err)?;
        let mut resin = Vec::new();
        let mut resin_seen = HashMap::new();
        for c in &config.curing.resin_cells {
            if !in_grid(c) {
                return Err(config_err(format!("resin cell {:?} outside the grid", c)));
            }
            if resin_seen.insert(*c, ()).is_some() {
                return Err(config_err(format!("resin cell {:?} listed twice", c)));
            }
            resin.push(ResinSlab { cell: idx(c[0], c[1], c[2]), volume: dx * dy * config.curing.resin_thickness_m });
        }

        Ok(Self {
            config,
            capacity,
            links,
            faces,
            heater_cells,
            max_power,
            control_idx,
            auxiliary_idx,
            resin,
        })
    }

    pub fn config(&self) -> &PlantConfig {
        &self.config
    }

    pub fn cell_count(&self) -> usize {
        self.capacity.len()
    }

    pub fn heater_count(&self) -> usize {
        self.max_power.len()
    }

    pub fn max_power(&self) -> &[f64] {
        &self.max_power
    }

    pub fn sensor_count(&self) -> (usize, usize) {
        (self.control_idx.len(), self.auxiliary_idx.len())
    }

    pub fn control_indices(&self) -> &[usize] {
        &self.control_idx
    }

    pub fn auxiliary_indices(&self) -> &[usize] {
        &self.auxiliary_idx
    }

    pub fn cell_index(&self, c: CellIndex) -> usize {
        let g = &self.config.grid;
        (c[2] * g.ny + c[1]) * g.nx + c[0]
    }

    pub fn ambient_k(&self) -> f64 {
        self.config.ambient_k()
    }

    /// Total resin mass attached to the plant, kg.
    pub fn resin_mass(&self) -> f64 {
        self.resin.iter().map(|r| r.volume).sum::<f64>() * self.config.curing.resin_density
    }

    /// Uniform state at `temperature_k` with uncured resin.
    pub fn uniform_state(&self, temperature_k: f64) -> PlantState {
        PlantState {
            temperatures: vec![temperature_k; self.cell_count()],
            cure_degree: vec![0.0; self.resin.len()],
            sim_time: 0.0,
        }
    }

    pub fn ambient_state(&self) -> PlantState {
        self.uniform_state(self.ambient_k())
    }

    /// Σ ρ c V T over all cells, J (absolute temperature reference).
    pub fn internal_energy(&self, state: &PlantState) -> f64 {
        self.capacity.iter().zip(&state.temperatures).map(|(c, t)| c * t).sum()
    }

    fn fit(&self, kind: FaceKind) -> &ConvectionFit {
        match kind {
            FaceKind::Upper => &self.config.convection.upper,
            FaceKind::Lower => &self.config.convection.lower,
            FaceKind::Lateral => &self.config.convection.lateral,
        }
    }

    /// Per-cell exterior conductance to ambient (W/K) at the given temperatures.
    fn exterior_conductance(&self, temperatures: &[f64]) -> Vec<f64> {
        let ambient = self.ambient_k();
        let mut u = vec![0.0; self.cell_count()];
        for f in &self.faces {
            let h = match self.config.convection.constant_h {
                Some(h) => h,
                None => convection_h(self.fit(f.kind), temperatures[f.cell] - ambient),
            };
            if h > 0.0 {
                u[f.cell] += f.area / (1.0 / h + f.wall_resistance);
            }
        }
        u
    }

    fn check_powers(&self, powers: &[f64]) -> Result<(), PlantError> {
        if powers.len() != self.heater_count() {
            return Err(PlantError::Input(format!(
                "expected {} heater powers, got {}",
                self.heater_count(),
                powers.len()
            )));
        }
        for (i, (&p, &pmax)) in powers.iter().zip(&self.max_power).enumerate() {
            if !p.is_finite() || p < 0.0 || p > pmax * (1.0 + 1e-12) {
                return Err(PlantError::Input(format!("power U{} = {p} W outside [0, {pmax}]", i + 1)));
            }
        }
        Ok(())
    }

    fn curing_active(&self, time: f64) -> bool {
        let c = &self.config.curing;
        c.enabled && !self.resin.is_empty() && time >= c.injection_time_s
    }

    /// One backward-Euler step of length `dt`.
    pub fn step(&self, state: &PlantState, powers: &[f64], dt: f64) -> Result<PlantState, PlantError> {
        self.step_detailed(state, powers, dt).map(|(s, _)| s)
    }

    /// Backward-Euler step that also reports the energy terms of the balance.
    ///
    /// Convection coefficients and the cure source are evaluated at the start of
    /// the step; conduction and the convective driving difference are implicit.
    pub fn step_detailed(
        &self,
        state: &PlantState,
        powers: &[f64],
        dt: f64,
    ) -> Result<(PlantState, StepEnergy), PlantError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(PlantError::Input(format!("dt must be > 0, got {dt}")));
        }
        self.check_powers(powers)?;
        if state.temperatures.len() != self.cell_count() || state.cure_degree.len() != self.resin.len() {
            return Err(PlantError::Input("state dimensions do not match the plant".into()));
        }
        let n = self.cell_count();
        let ambient = self.ambient_k();
        let exterior = self.exterior_conductance(&state.temperatures);

        let mut source = vec![0.0; n];
        for (cells, &p) in self.heater_cells.iter().zip(powers) {
            let share = p / cells.len() as f64;
            for &c in cells {
                source[c] += share;
            }
        }
        let mut cure = state.cure_degree.clone();
        let mut curing_release = 0.0;
        if self.curing_active(state.sim_time) {
            let model: &CuringModel = &self.config.curing;
            let per_volume = model.resin_density * model.total_heat_of_reaction;
            for (slab, alpha) in self.resin.iter().zip(cure.iter_mut()) {
                let next = model.integrate(*alpha, state.temperatures[slab.cell], dt);
                let released = per_volume * slab.volume * (next - *alpha);
                source[slab.cell] += released / dt;
                curing_release += released;
                *alpha = next;
            }
        }

        let mut diag: Vec<f64> = self.capacity.iter().zip(&exterior).map(|(c, u)| c / dt + u).collect();
        for &(i, j, g) in &self.links {
            diag[i] += g;
            diag[j] += g;
        }
        let rhs: Vec<f64> = (0..n)
            .map(|i| self.capacity[i] / dt * state.temperatures[i] + exterior[i] * ambient + source[i])
            .collect();
        let temperatures = conjugate_gradient(&diag, &self.links, &rhs, &state.temperatures)?;

        let convective_loss = dt
            * exterior
                .iter()
                .zip(&temperatures)
                .map(|(u, t)| u * (t - ambient))
                .sum::<f64>();
        let heater_input = dt * powers.iter().sum::<f64>();
        Ok((
            PlantState { temperatures, cure_degree: cure, sim_time: state.sim_time + dt },
            StepEnergy { heater_input, curing_release, convective_loss },
        ))
    }

    /// Holds `powers` for `duration`, stepping at the configured internal `dt_s`.
    pub fn advance(&self, state: &PlantState, powers: &[f64], duration: f64) -> Result<PlantState, PlantError> {
        if !(duration > 0.0) {
            return Err(PlantError::Input(format!("duration must be > 0, got {duration}")));
        }
        let substeps = (duration / self.config.dt_s - 1e-9).ceil().max(1.0) as usize;
        let dt = duration / substeps as f64;
        let mut s = state.clone();
        for _ in 0..substeps {
            s = self.step(&s, powers, dt)?;
        }
        Ok(s)
    }

    /// Temperatures at the control and auxiliary sensor cells, K.
    pub fn read_sensors(&self, state: &PlantState, noise: Option<&mut SensorNoise>) -> (Vec<f64>, Vec<f64>) {
        let mut control: Vec<f64> = self.control_idx.iter().map(|&i| state.temperatures[i]).collect();
        let mut auxiliary: Vec<f64> = self.auxiliary_idx.iter().map(|&i| state.temperatures[i]).collect();
        if let Some(noise) = noise {
            for v in control.iter_mut().chain(auxiliary.iter_mut()) {
                *v += noise.sample();
            }
        }
        (control, auxiliary)
    }

    /// Degree of cure per resin cell together with its grid cell index.
    pub fn cure_by_cell<'a>(&'a self, state: &'a PlantState) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.resin.iter().zip(&state.cure_degree).map(|(r, &a)| (r.cell, a))
    }

    /// Current temperatures in °C at the given cells.
    pub fn celsius_at(&self, state: &PlantState, cells: &[usize]) -> Vec<f64> {
        cells.iter().map(|&i| state.temperatures[i] - KELVIN).collect()
    }
}

/// Additive zero-mean Gaussian measurement noise with its own seeded stream.
#[derive(Debug, Clone)]
pub struct SensorNoise {
    rng: ChaCha8Rng,
    dist: Option<Normal<f64>>,
}

impl SensorNoise {
    pub fn new(std_dev: f64, rng: ChaCha8Rng) -> Self {
        let dist = if std_dev > 0.0 { Normal::new(0.0, std_dev).ok() } else { None };
        Self { rng, dist }
    }

    pub fn sample(&mut self) -> f64 {
        match &self.dist {
            Some(d) => d.sample(&mut self.rng),
            None => 0.0,
        }
    }

    pub fn rng(&mut self) -> &mut impl Rng {
        &mut self.rng
    }
}

/// Jacobi-preconditioned CG for `diag·x - Σ_links g (x_j ↔ x_i) = rhs`.
fn conjugate_gradient(
    diag: &[f64],
    links: &[(usize, usize, f64)],
    rhs: &[f64],
    guess: &[f64],
) -> Result<Vec<f64>, PlantError> {
    let n = diag.len();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = diag[i] * x[i];
        }
        for &(i, j, g) in links {
            out[i] -= g * x[j];
            out[j] -= g * x[i];
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut x = guess.to_vec();
    let mut ax = vec![0.0; n];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let b_norm = dot(rhs, rhs).sqrt().max(f64::MIN_POSITIVE);
    let tol = 1e-13 * b_norm;
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let max_iter = 4 * n + 200;
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        if dot(&r, &r).sqrt() <= tol {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = dot(&r, &r).sqrt() / b_norm;
    if residual <= 1e-11 {
        Ok(x)
    } else {
        Err(PlantError::Solver { iterations: max_iter, residual })
    }
}
