//! Versioned JSON model file for identified ARX models.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::IdentError;
use crate::scalar::{lit, to_f64, Real};

use super::arx::{ArxModel, Baseline, FitResidual};
use super::statespace::arx_to_statespace;

pub const MODEL_FORMAT: &str = "thermal-mpc/arx";
pub const MODEL_VERSION: u32 = 1;

/// Dense matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMajor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RowMajor {
    pub fn from_matrix<T: Real>(m: &DMatrix<T>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            data.extend(m.row(i).iter().map(|v| to_f64(*v)));
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<DMatrix<T>, IdentError> {
        if self.data.len() != self.rows * self.cols {
            return Err(IdentError::ModelFile(format!(
                "matrix {}x{} has {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        Ok(DMatrix::from_row_iterator(self.rows, self.cols, self.data.iter().map(|&v| lit::<T>(v))))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaceBlock {
    pub a: RowMajor,
    pub b: RowMajor,
    pub c: RowMajor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub r: usize,
    pub s: usize,
    pub outputs: usize,
    pub inputs: usize,
    pub baseline_y: Vec<f64>,
    pub baseline_u: Vec<f64>,
    pub residual: FitResidual,
    pub a: Vec<RowMajor>,
    pub b: Vec<RowMajor>,
    /// Derived realisation, written for downstream tools; recomputed on load.
    pub state_space: StateSpaceBlock,
}

impl ModelFile {
    pub fn from_model<T: Real>(model: &ArxModel<T>) -> Self {
        let ss = arx_to_statespace(model);
        Self {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            r: model.r,
            s: model.s,
            outputs: model.outputs(),
            inputs: model.inputs(),
            baseline_y: model.baseline.y.iter().map(|v| to_f64(*v)).collect(),
            baseline_u: model.baseline.u.iter().map(|v| to_f64(*v)).collect(),
            residual: model.residual,
            a: model.a.iter().map(RowMajor::from_matrix).collect(),
            b: model.b.iter().map(RowMajor::from_matrix).collect(),
            state_space: StateSpaceBlock {
                a: RowMajor::from_matrix(&ss.a),
                b: RowMajor::from_matrix(&ss.b),
                c: RowMajor::from_matrix(&ss.c),
            },
        }
    }

    pub fn into_model<T: Real>(self) -> Result<ArxModel<T>, IdentError> {
        if self.format != MODEL_FORMAT {
            return Err(IdentError::ModelFile(format!("unknown format '{}'", self.format)));
        }
        if self.version != MODEL_VERSION {
            return Err(IdentError::ModelFile(format!("unsupported version {}", self.version)));
        }
        if self.a.len() != self.r || self.b.len() != self.s + 1 || self.r == 0 {
            return Err(IdentError::ModelFile("coefficient count does not match orders".into()));
        }
        let a = self.a.iter().map(|m| m.to_matrix::<T>()).collect::<Result<Vec<_>, _>>()?;
        let b = self.b.iter().map(|m| m.to_matrix::<T>()).collect::<Result<Vec<_>, _>>()?;
        if a.iter().any(|m| m.shape() != (self.outputs, self.outputs))
            || b.iter().any(|m| m.shape() != (self.outputs, self.inputs))
            || self.baseline_y.len() != self.outputs
            || self.baseline_u.len() != self.inputs
        {
            return Err(IdentError::ModelFile("coefficient shapes are inconsistent".into()));
        }
        Ok(ArxModel {
            r: self.r,
            s: self.s,
            a,
            b,
            baseline: Baseline {
                y: DVector::from_iterator(self.outputs, self.baseline_y.iter().map(|&v| lit(v))),
                u: DVector::from_iterator(self.inputs, self.baseline_u.iter().map(|&v| lit(v))),
            },
            residual: self.residual,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IdentError> {
        serde_json::from_str(s).map_err(|e| IdentError::ModelFile(e.to_string()))
    }
}
