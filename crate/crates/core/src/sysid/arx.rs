use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::error::IdentError;
use crate::scalar::{lit, to_f64, Real};

use super::dataset::IoDataset;

/// Operating point the ARX model is linearised around.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline<T: Real> {
    /// Output offsets (°C).
    pub y: DVector<T>,
    /// Input offsets (W).
    pub u: DVector<T>,
}

impl<T: Real> Baseline<T> {
    pub fn zero(outputs: usize, inputs: usize) -> Self {
        Self { y: DVector::zeros(outputs), u: DVector::zeros(inputs) }
    }

    /// Uniform output temperature, zero power.
    pub fn ambient(temperature_c: T, outputs: usize, inputs: usize) -> Self {
        Self { y: DVector::from_element(outputs, temperature_c), u: DVector::zeros(inputs) }
    }
}

/// One-step-ahead fit statistics on the identification set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResidual {
    pub rms: f64,
    pub max_abs: f64,
    pub samples: usize,
}

/// `y[t+1] = Σ_{i<r} a_i y[t-i] + Σ_{i≤s} b_i u[t-i]` on deviations from `baseline`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArxModel<T: Real> {
    pub r: usize,
    pub s: usize,
    /// `r` matrices, m × m.
    pub a: Vec<DMatrix<T>>,
    /// `s + 1` matrices, m × inputs.
    pub b: Vec<DMatrix<T>>,
    pub baseline: Baseline<T>,
    pub residual: FitResidual,
}

impl<T: Real> ArxModel<T> {
    pub fn outputs(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b[0].ncols()
    }

    /// One-step prediction in deviation coordinates.
    ///
    /// `y_hist[0]` is `y[t]`, `y_hist[i]` is `y[t-i]`; same for `u_hist`.
    pub fn predict_deviation(&self, y_hist: &[DVector<T>], u_hist: &[DVector<T>]) -> DVector<T> {
        let mut next = DVector::zeros(self.outputs());
        for (a, y) in self.a.iter().zip(y_hist) {
            next += a * y;
        }
        for (b, u) in self.b.iter().zip(u_hist) {
            next += b * u;
        }
        next
    }

    /// Output companion matrix `[[a_0 … a_{r-1}], [I 0 …]]`.
    pub fn companion(&self) -> DMatrix<T> {
        let m = self.outputs();
        let n = m * self.r;
        let mut c = DMatrix::zeros(n, n);
        for (i, a) in self.a.iter().enumerate() {
            c.view_mut((0, i * m), (m, m)).copy_from(a);
        }
        for i in 1..self.r {
            c.view_mut((i * m, (i - 1) * m), (m, m)).fill_with_identity();
        }
        c
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.companion())
    }
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<T: Real>(m: &DMatrix<T>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let schur = Schur::try_new(m.clone(), T::default_epsilon(), 10_000);
    match schur {
        Some(s) => s
            .complex_eigenvalues()
            .iter()
            .map(|z| to_f64(z.re).hypot(to_f64(z.im)))
            .fold(0.0, f64::max),
        None => f64::NAN,
    }
}

fn regressor_names(m: usize, nu: usize, r: usize, s: usize) -> Vec<String> {
    let lag = |i: usize| if i == 0 { "t".to_string() } else { format!("t-{i}") };
    let mut names = Vec::with_capacity(m * r + nu * (s + 1));
    for i in 0..r {
        names.extend((1..=m).map(|j| format!("y{j}[{}]", lag(i))));
    }
    for i in 0..=s {
        names.extend((1..=nu).map(|j| format!("u{j}[{}]", lag(i))));
    }
    names
}

/// Least-squares ARX fit on `data - baseline`.
///
/// Uses an SVD of the column-equilibrated regressor matrix; a numerically
/// rank-deficient regressor is reported with the offending channels instead of
/// returning a minimum-norm solution.
pub fn fit_arx<T: Real>(
    data: &IoDataset<T>,
    r: usize,
    s: usize,
    baseline: &Baseline<T>,
) -> Result<ArxModel<T>, IdentError> {
    if r == 0 {
        return Err(IdentError::Dataset("output order r must be >= 1".into()));
    }
    let (m, nu) = (data.outputs(), data.inputs());
    if m == 0 {
        return Err(IdentError::Dataset("dataset has no outputs".into()));
    }
    if baseline.y.len() != m || baseline.u.len() != nu {
        return Err(IdentError::Dataset("baseline dimensions do not match the dataset".into()));
    }
    let k = m * r + nu * (s + 1);
    let needed = r.max(s + 1) + (10 * k).div_ceil(m);
    if data.len() <= needed {
        return Err(IdentError::InsufficientData { needed, got: data.len() });
    }

    let y = DMatrix::from_fn(data.len(), m, |i, j| data.y[(i, j)] - baseline.y[j]);
    let u = DMatrix::from_fn(data.len(), nu, |i, j| data.u[(i, j)] - baseline.u[j]);
    let t0 = (r - 1).max(s);
    let rows = data.len() - 1 - t0;
    let mut phi = DMatrix::<T>::zeros(rows, k);
    let mut target = DMatrix::<T>::zeros(rows, m);
    for row in 0..rows {
        let t = t0 + row;
        for i in 0..r {
            for j in 0..m {
                phi[(row, i * m + j)] = y[(t - i, j)];
            }
        }
        for i in 0..=s {
            for j in 0..nu {
                phi[(row, m * r + i * nu + j)] = u[(t - i, j)];
            }
        }
        for j in 0..m {
            target[(row, j)] = y[(t + 1, j)];
        }
    }

    let names = regressor_names(m, nu, r, s);
    let norms: Vec<T> = (0..k).map(|j| phi.column(j).norm()).collect();
    let max_norm = norms.iter().fold(T::zero(), |acc, &n| acc.max(n));
    let zero_cols: Vec<usize> = (0..k).filter(|&j| norms[j] <= max_norm * lit(1e-14)).collect();
    if !zero_cols.is_empty() {
        return Err(IdentError::RankDeficient { channels: zero_cols.iter().map(|&j| names[j].clone()).collect() });
    }
    let mut scaled = phi.clone();
    for j in 0..k {
        let inv = T::one() / norms[j];
        scaled.column_mut(j).scale_mut(inv);
    }
    let svd = scaled.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let rel_tol = lit::<T>(1e-10).max(T::default_epsilon() * lit(100.0 * rows.max(k) as f64));
    let v_t = svd.v_t.as_ref().expect("V requested");
    let deficient: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= sigma_max * rel_tol)
        .collect();
    if !deficient.is_empty() {
        let mut channels = Vec::new();
        for j in 0..k {
            if deficient.iter().any(|&i| v_t[(i, j)].abs() > lit(1e-3)) {
                channels.push(names[j].clone());
            }
        }
        return Err(IdentError::RankDeficient { channels });
    }
    let theta_scaled = svd
        .solve(&target, T::zero())
        .map_err(|e| IdentError::Dataset(e.to_string()))?;
    let theta = DMatrix::from_fn(k, m, |i, j| theta_scaled[(i, j)] / norms[i]);

    let a = (0..r).map(|i| theta.rows(i * m, m).transpose()).collect::<Vec<_>>();
    let b = (0..=s).map(|i| theta.rows(m * r + i * nu, nu).transpose()).collect::<Vec<_>>();

    let resid = &phi * &theta - &target;
    let n_res = resid.len().max(1);
    let rms = (resid.iter().map(|v| to_f64(*v).powi(2)).sum::<f64>() / n_res as f64).sqrt();
    let max_abs = resid.iter().map(|v| to_f64(*v).abs()).fold(0.0, f64::max);

    let model = ArxModel {
        r,
        s,
        a,
        b,
        baseline: baseline.clone(),
        residual: FitResidual { rms, max_abs, samples: rows },
    };
    let rho = model.spectral_radius();
    if !(rho < 1.0) {
        return Err(IdentError::Unstable(rho));
    }
    Ok(model)
}

/// Sum of squared one-step residuals of `model` on `data` (deviation coordinates).
pub fn residual_sum_of_squares<T: Real>(model: &ArxModel<T>, data: &IoDataset<T>) -> T {
    let (m, nu) = (model.outputs(), model.inputs());
    let t0 = (model.r - 1).max(model.s);
    let dev_y = |t: usize| DVector::from_fn(m, |j, _| data.y[(t, j)] - model.baseline.y[j]);
    let dev_u = |t: usize| DVector::from_fn(nu, |j, _| data.u[(t, j)] - model.baseline.u[j]);
    let mut sum = T::zero();
    for t in t0..data.len() - 1 {
        let yh: Vec<_> = (0..model.r).map(|i| dev_y(t - i)).collect();
        let uh: Vec<_> = (0..=model.s).map(|i| dev_u(t - i)).collect();
        let e = model.predict_deviation(&yh, &uh) - dev_y(t + 1);
        sum += e.norm_squared();
    }
    sum
}
