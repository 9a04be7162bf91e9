//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermal_mpc::harness::{compare_controllers, identify_roms, Comparison, IdentifiedRoms, Scenario};
use thermal_mpc::sysid::{ArxModel, Baseline, FitResidual, IoDataset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

/// Random ARX model whose companion matrix has spectral radius below 0.95.
pub fn random_stable_arx(rng: &mut ChaCha8Rng, m: usize, nu: usize, r: usize, s: usize) -> ArxModel<f64> {
    let mut model = ArxModel {
        r,
        s,
        a: (0..r).map(|_| random_matrix(rng, m, m, 1.0 / (m * r) as f64)).collect(),
        b: (0..=s).map(|_| random_matrix(rng, m, nu, 0.5)).collect(),
        baseline: Baseline::zero(m, nu),
        residual: FitResidual { rms: 0.0, max_abs: 0.0, samples: 0 },
    };
    while model.spectral_radius() >= 0.95 {
        model.a.iter_mut().for_each(|a| *a *= 0.8);
    }
    model
}

/// ARX recursion written out with index loops; inputs before `t = 0` are zero.
pub fn simulate_arx(model: &ArxModel<f64>, u: &[Vec<f64>], y_init: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (m, nu) = (model.outputs(), model.inputs());
    let mut y = y_init.to_vec();
    while y.len() < u.len() {
        let t = y.len() - 1;
        let mut next = vec![0.0; m];
        for (i, a) in model.a.iter().enumerate().filter(|(i, _)| *i <= t) {
            for row in 0..m {
                for col in 0..m {
                    next[row] += a[(row, col)] * y[t - i][col];
                }
            }
        }
        for (i, b) in model.b.iter().enumerate().filter(|(i, _)| *i <= t) {
            for row in 0..m {
                for col in 0..nu {
                    next[row] += b[(row, col)] * u[t - i][col];
                }
            }
        }
        y.push(next);
    }
    y
}

pub fn random_inputs(rng: &mut ChaCha8Rng, len: usize, nu: usize) -> Vec<Vec<f64>> {
    (0..len).map(|_| (0..nu).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()).collect()
}

pub fn dataset_from(u: &[Vec<f64>], y: &[Vec<f64>]) -> IoDataset<f64> {
    IoDataset::from_rows(1.0, u, y, u[0].len(), y[0].len()).unwrap()
}

/// Empty-mold comparison plus the molding run, computed once per test binary, with its wall time.
pub fn comparison_timed() -> &'static (Comparison, Duration) {
    static CELL: OnceLock<(Comparison, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let cmp = compare_controllers(&Scenario::empty_mold(), Some(&Scenario::molding())).expect("comparison run");
        (cmp, start.elapsed())
    })
}

pub fn comparison() -> &'static Comparison {
    &comparison_timed().0
}

/// ROMs identified on the default mold.
pub fn roms() -> &'static IdentifiedRoms {
    static CELL: OnceLock<IdentifiedRoms> = OnceLock::new();
    CELL.get_or_init(|| {
        let s = Scenario::empty_mold();
        identify_roms(&s.plant_config(), &s.identification, s.controller_period_s).expect("identification").0
    })
}
