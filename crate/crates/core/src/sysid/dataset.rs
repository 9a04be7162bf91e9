use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::IdentError;
use crate::scalar::Real;

/// Sampled input/output record: `u` is rows × inputs (W), `y` is rows × outputs (°C).
#[derive(Debug, Clone, PartialEq)]
pub struct IoDataset<T: Real> {
    pub sample_period: f64,
    pub u: DMatrix<T>,
    pub y: DMatrix<T>,
}

impl<T: Real> IoDataset<T> {
    pub fn new(sample_period: f64, u: DMatrix<T>, y: DMatrix<T>) -> Result<Self, IdentError> {
        if !(sample_period > 0.0) {
            return Err(IdentError::Dataset(format!("sample period must be > 0, got {sample_period}")));
        }
        if u.nrows() != y.nrows() {
            return Err(IdentError::Dataset(format!(
                "input rows ({}) and output rows ({}) differ",
                u.nrows(),
                y.nrows()
            )));
        }
        Ok(Self { sample_period, u, y })
    }

    pub fn from_rows(
        sample_period: f64,
        u: &[Vec<T>],
        y: &[Vec<T>],
        inputs: usize,
        outputs: usize,
    ) -> Result<Self, IdentError> {
        if u.iter().any(|r| r.len() != inputs) || y.iter().any(|r| r.len() != outputs) {
            return Err(IdentError::Dataset("ragged rows".into()));
        }
        let um = DMatrix::from_fn(u.len(), inputs, |i, j| u[i][j]);
        let ym = DMatrix::from_fn(y.len(), outputs, |i, j| y[i][j]);
        Self::new(sample_period, um, ym)
    }

    pub fn len(&self) -> usize {
        self.y.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn inputs(&self) -> usize {
        self.u.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.y.ncols()
    }

    /// Keeps the first `m` output columns.
    pub fn select_outputs(&self, m: usize) -> Self {
        Self { sample_period: self.sample_period, u: self.u.clone(), y: self.y.columns(0, m).into_owned() }
    }

    /// Rows `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let len = end.saturating_sub(start);
        Self {
            sample_period: self.sample_period,
            u: self.u.rows(start, len).into_owned(),
            y: self.y.rows(start, len).into_owned(),
        }
    }
}

impl IoDataset<f64> {
    /// CSV header: `time_s,u1..uN,y1..y6[,aux1..]`.
    pub fn header(inputs: usize, outputs: usize, control: usize) -> Vec<String> {
        let mut h = vec!["time_s".to_string()];
        h.extend((1..=inputs).map(|i| format!("u{i}")));
        h.extend((1..=outputs.min(control)).map(|i| format!("y{i}")));
        h.extend((1..=outputs.saturating_sub(control)).map(|i| format!("aux{i}")));
        h
    }

    /// Writes the dataset; the first `control` output columns are labelled `y`, the rest `aux`.
    pub fn write_csv<W: Write>(&self, writer: W, control: usize) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::header(self.inputs(), self.outputs(), control))?;
        for k in 0..self.len() {
            let mut rec = vec![format!("{}", k as f64 * self.sample_period)];
            rec.extend(self.u.row(k).iter().map(|v| format!("{v}")));
            rec.extend(self.y.row(k).iter().map(|v| format!("{v}")));
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self, IdentError> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers().map_err(|e| IdentError::Dataset(e.to_string()))?.clone();
        let inputs = headers.iter().filter(|h| h.trim().starts_with('u')).count();
        let outputs = headers
            .iter()
            .filter(|h| h.trim().starts_with('y') || h.trim().starts_with("aux"))
            .count();
        let mut times = Vec::new();
        let mut u = Vec::new();
        let mut y = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| IdentError::Dataset(e.to_string()))?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| IdentError::Dataset(e.to_string()))?;
            if vals.len() != 1 + inputs + outputs {
                return Err(IdentError::Dataset("row width does not match header".into()));
            }
            times.push(vals[0]);
            u.push(vals[1..1 + inputs].to_vec());
            y.push(vals[1 + inputs..].to_vec());
        }
        let ts = if times.len() >= 2 { times[1] - times[0] } else { 1.0 };
        Self::from_rows(ts, &u, &y, inputs, outputs)
    }
}
