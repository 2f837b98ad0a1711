//! Sampled time series with clamped linear interpolation, and their CSV form.

use std::io::{Read, Write};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::se3::Wrench;

/// Time-ordered vector samples, linearly interpolated and clamped to the
/// end samples outside their range.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<DVector<f64>>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<DVector<f64>>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::Config(format!(
                "time series needs matching non-empty times/values ({} vs {})",
                times.len(),
                values.len()
            )));
        }
        if let Some(w) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Config(format!(
                "sample times must be strictly increasing (row {})",
                w + 2
            )));
        }
        let dim = values[0].len();
        if let Some(bad) = values.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        if times
            .iter()
            .chain(values.iter().flat_map(|v| v.iter()))
            .any(|x| !x.is_finite())
        {
            return Err(Error::Config(
                "time series contains non-finite values".into(),
            ));
        }
        Ok(Self { times, values })
    }

    pub fn constant(value: DVector<f64>) -> Self {
        Self {
            times: vec![0.0],
            values: vec![value],
        }
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1].clone();
        }
        // First sample strictly after t; 1 <= hi <= n-1 here.
        let hi = self.times.partition_point(|&s| s <= t);
        let (t0, t1) = (self.times[hi - 1], self.times[hi]);
        let s = (t - t0) / (t1 - t0);
        &self.values[hi - 1] * (1.0 - s) + &self.values[hi] * s
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Reads `t,<prefix>1..<prefix>n`; when `dim` is given the column count
    /// must match it.
    pub fn read_csv<R: Read>(reader: R, prefix: &str, dim: Option<usize>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Csv(e.to_string()))?
            .clone();
        let n = headers.len().saturating_sub(1);
        if let Some(expected) = dim {
            if n != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: n,
                });
            }
        }
        let expected: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|i| format!("{prefix}{i}")))
            .collect();
        if n == 0 || headers.iter().ne(expected.iter().map(String::as_str)) {
            return Err(Error::Csv(format!(
                "expected header `{}`, got `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Csv(e.to_string()))?;
            let nums = record
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Csv(format!("row {}: `{f}`: {e}", line + 2)))
                })
                .collect::<Result<Vec<f64>>>()?;
            times.push(nums[0]);
            values.push(DVector::from_column_slice(&nums[1..]));
        }
        Self::new(times, values)
    }

    pub fn write_csv<W: Write>(&self, mut out: W, prefix: &str) -> std::io::Result<()> {
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=self.dim()).map(|i| format!("{prefix}{i}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (t, v) in self.times.iter().zip(&self.values) {
            let mut line = fmt_num(*t);
            for x in v.iter() {
                line.push(',');
                line.push_str(&fmt_num(*x));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// 17 significant digits, round-trip exact.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Externally applied wrench over time: base-frame force and moment acting
/// at the end-effector origin.
#[derive(Clone, Debug, PartialEq)]
pub struct WrenchProfile(TimeSeries);

impl WrenchProfile {
    pub fn new(samples: Vec<(f64, Wrench)>) -> Result<Self> {
        let (times, values) = samples
            .into_iter()
            .map(|(t, w)| (t, DVector::from_column_slice(w.0.as_slice())))
            .unzip();
        Ok(Self(TimeSeries::new(times, values)?))
    }

    pub fn zero() -> Self {
        Self(TimeSeries::constant(DVector::zeros(6)))
    }

    pub fn constant(w: Wrench) -> Self {
        Self(TimeSeries::constant(DVector::from_column_slice(
            w.0.as_slice(),
        )))
    }

    pub fn eval(&self, t: f64) -> Wrench {
        Wrench::from_slice(self.0.eval(t).as_slice()).expect("six components")
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scaled(factor))
    }

    pub fn series(&self) -> &TimeSeries {
        &self.0
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        Ok(Self(TimeSeries::read_csv(reader, "F", Some(6))?))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.0.write_csv(out, "F")
    }
}

/// Equilibrium joint trajectory `q₀(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTrajectory(TimeSeries);

impl JointTrajectory {
    pub fn new(times: Vec<f64>, q: Vec<DVector<f64>>) -> Result<Self> {
        Ok(Self(TimeSeries::new(times, q)?))
    }

    pub fn constant(q: DVector<f64>) -> Self {
        Self(TimeSeries::constant(q))
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        self.0.eval(t)
    }

    pub fn dof(&self) -> usize {
        self.0.dim()
    }

    pub fn series(&self) -> &TimeSeries {
        &self.0
    }

    pub fn read_csv<R: Read>(reader: R, dof: Option<usize>) -> Result<Self> {
        Ok(Self(TimeSeries::read_csv(reader, "q", dof)?))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        self.0.write_csv(out, "q")
    }
}
