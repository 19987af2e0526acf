//! Time-series container and segment preprocessing.
//!
//! A [`TimeSeries`] is an immutable, finite-valued matrix of `n` samples by
//! `d` dimensions. A [`Segment`] is a contiguous slice of it, optionally
//! upsampled to a common length and z-normalized before scoring. Sample
//! indices are 1-based in the public API.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Standard deviations below this are treated as zero when z-normalizing;
/// the affected dimension becomes all zeros instead of blowing up.
pub const ZNORM_EPS: f64 = 1e-12;

/// An immutable multivariate time series: `n` samples by `d` dimensions.
///
/// Values are stored row-major (sample-major) and are guaranteed finite.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl TimeSeries {
    /// Builds a series from row-major values with `dims` columns.
    pub fn new(values: Vec<f64>, dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidSeries("dimension count must be >= 1".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidSeries("series must have >= 1 sample".into()));
        }
        if values.len() % dims != 0 {
            return Err(Error::InvalidSeries(format!(
                "{} values do not divide into rows of {} dimensions",
                values.len(),
                dims
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value at sample {}, dimension {}",
                bad / dims + 1,
                bad % dims + 1
            )));
        }
        let n = values.len() / dims;
        Ok(Self { values, n, d: dims })
    }

    /// Builds a one-dimensional series.
    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of dimensions.
    pub fn dims(&self) -> usize {
        self.d
    }

    /// Value at 0-based sample `t`, dimension `dim`.
    pub fn value(&self, t: usize, dim: usize) -> f64 {
        self.values[t * self.d + dim]
    }

    /// One sample across all dimensions (0-based index).
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.d..(t + 1) * self.d]
    }

    /// Copies the segment starting at 1-based sample `start`, `length`
    /// samples long, across all dimensions. The origin interval is recorded
    /// on the returned segment.
    pub fn segment(&self, start: usize, length: usize) -> Result<Segment> {
        if start == 0 || length == 0 || start + length - 1 > self.n {
            return Err(Error::SegmentOutOfBounds {
                start,
                length,
                series_len: self.n,
            });
        }
        // Column-major copy: each dimension contiguous for later resampling.
        let mut values = Vec::with_capacity(length * self.d);
        for dim in 0..self.d {
            for t in 0..length {
                values.push(self.value(start - 1 + t, dim));
            }
        }
        Ok(Segment {
            values,
            length,
            dims: self.d,
            origin: Some(SegmentOrigin { start, length }),
        })
    }

    /// Reads a series from CSV: one row per sample, one column per dimension.
    ///
    /// A single leading header row is skipped when any of its cells fails to
    /// parse as a number. Every other row must be fully numeric and finite;
    /// the first offending row aborts ingestion with its line number.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);

        let mut values = Vec::new();
        let mut dims = 0usize;
        let mut first_data_row = true;
        for (row_idx, record) in csv.records().enumerate() {
            let record = record.map_err(|e| ingest_error_from_csv(e, row_idx as u64 + 1))?;
            let line = record
                .position()
                .map(|p| p.line())
                .unwrap_or(row_idx as u64 + 1);
            let parsed: std::result::Result<Vec<f64>, (usize, String)> = record
                .iter()
                .enumerate()
                .map(|(col, cell)| {
                    cell.parse::<f64>().map_err(|_| (col, cell.to_string()))
                })
                .collect();
            match parsed {
                Err((col, cell)) if row_idx == 0 => {
                    // Non-numeric first row: treat as header.
                    let _ = (col, cell);
                    continue;
                }
                Err((col, cell)) => {
                    return Err(Error::Ingest {
                        line,
                        message: format!("column {}: cannot parse {cell:?} as a number", col + 1),
                    });
                }
                Ok(row) => {
                    if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                        return Err(Error::Ingest {
                            line,
                            message: format!("column {}: non-finite value", col + 1),
                        });
                    }
                    if first_data_row {
                        dims = row.len();
                        first_data_row = false;
                    } else if row.len() != dims {
                        return Err(Error::Ingest {
                            line,
                            message: format!("expected {dims} columns, found {}", row.len()),
                        });
                    }
                    values.extend_from_slice(&row);
                }
            }
        }
        if values.is_empty() {
            return Err(Error::Ingest {
                line: 0,
                message: "no data rows".into(),
            });
        }
        Self::new(values, dims)
    }

    /// Reads a series from a CSV file.
    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }
}

fn ingest_error_from_csv(err: csv::Error, fallback_line: u64) -> Error {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => fallback_line,
    };
    Error::Ingest {
        line,
        message: err.to_string(),
    }
}

/// Where in the parent series a segment came from (1-based start, source length).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentOrigin {
    pub start: usize,
    pub length: usize,
}

/// A slice of a time series, possibly resampled and normalized.
///
/// Values are stored column-major: dimension 0 first, each dimension
/// contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    values: Vec<f64>,
    length: usize,
    dims: usize,
    origin: Option<SegmentOrigin>,
}

impl Segment {
    /// Builds a segment from column-major values (no origin).
    pub fn from_values(values: Vec<f64>, dims: usize) -> Self {
        assert!(dims >= 1, "segment needs at least one dimension");
        assert!(
            !values.is_empty() && values.len() % dims == 0,
            "values must form a non-empty length x dims matrix"
        );
        let length = values.len() / dims;
        Segment {
            values,
            length,
            dims,
            origin: None,
        }
    }

    /// Builds a one-dimensional segment (no origin).
    pub fn univariate(values: Vec<f64>) -> Self {
        Self::from_values(values, 1)
    }

    /// Current (possibly upsampled) length in samples.
    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Interval in the parent series, when extracted from one.
    pub fn origin(&self) -> Option<SegmentOrigin> {
        self.origin
    }

    /// Value at 0-based sample `i`, dimension `dim`.
    pub fn value(&self, i: usize, dim: usize) -> f64 {
        self.values[dim * self.length + i]
    }

    /// One dimension as a contiguous slice.
    pub fn dim_values(&self, dim: usize) -> &[f64] {
        &self.values[dim * self.length..(dim + 1) * self.length]
    }

    /// All values, column-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linearly interpolates every dimension onto `target_len` equally
    /// spaced points over the original index range. Endpoints are preserved
    /// exactly. `target_len` must not be below the current length;
    /// downsampling is a different operation.
    pub fn upsample(&self, target_len: usize) -> Result<Segment> {
        if target_len < self.length {
            return Err(Error::InvalidParameter(format!(
                "upsample target {target_len} below current length {}",
                self.length
            )));
        }
        if target_len == self.length {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity(target_len * self.dims);
        for dim in 0..self.dims {
            let src = self.dim_values(dim);
            resample_dim_into(src, target_len, &mut values);
        }
        Ok(Segment {
            values,
            length: target_len,
            dims: self.dims,
            origin: self.origin,
        })
    }

    /// Per dimension, subtracts the mean and divides by the population
    /// standard deviation. Dimensions with a standard deviation below
    /// [`ZNORM_EPS`] become all zeros.
    pub fn znormalize(&self) -> Segment {
        let mut values = Vec::with_capacity(self.values.len());
        for dim in 0..self.dims {
            let src = self.dim_values(dim);
            let len = src.len() as f64;
            let mean = src.iter().sum::<f64>() / len;
            let var = src.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
            let std = var.sqrt();
            if std < ZNORM_EPS {
                values.extend(std::iter::repeat(0.0).take(src.len()));
            } else {
                values.extend(src.iter().map(|v| (v - mean) / std));
            }
        }
        Segment {
            values,
            length: self.length,
            dims: self.dims,
            origin: self.origin,
        }
    }
}

/// Linear interpolation of one dimension onto `target` equally spaced points.
pub(crate) fn resample_dim_into(src: &[f64], target: usize, out: &mut Vec<f64>) {
    let len = src.len();
    if target == 1 || len == 1 {
        out.extend(std::iter::repeat(src[0]).take(target));
        return;
    }
    let scale = (len - 1) as f64 / (target - 1) as f64;
    for j in 0..target {
        let pos = j as f64 * scale;
        let i0 = (pos.floor() as usize).min(len - 1);
        let i1 = (i0 + 1).min(len - 1);
        let frac = pos - i0 as f64;
        out.push(src[i0] * (1.0 - frac) + src[i1] * frac);
    }
}
