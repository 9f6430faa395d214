//! Simulators for the experiment designs, block maxima, thresholds,
//! runs declustering and series input/output.

mod io;
mod prepare;
mod simulate;

pub use io::{read_series, read_sidecar, write_series, write_sidecar, ColumnSpec, SeriesMeta};
pub use prepare::{block_maxima, decluster_runs, largest_k, threshold_at_quantile};
pub use simulate::{simulate_gev, simulate_pp, simulate_truncated_normal, PointCount};

use crate::error::{Error, Result};

/// An ordered series of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    /// Observations per block, if the series has block structure.
    pub block_length: Option<usize>,
    pub units: String,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::domain(format!("value {v} at position {i} is not finite")));
        }
        Ok(Self { values, block_length: None, units: String::new() })
    }

    pub fn with_block_length(mut self, block_length: usize) -> Result<Self> {
        if block_length == 0 {
            return Err(Error::usage("block length must be at least 1"));
        }
        self.block_length = Some(block_length);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Complete blocks in the series, or 1 without block structure.
    pub fn n_blocks(&self) -> f64 {
        match self.block_length {
            Some(b) => (self.values.len() / b).max(1) as f64,
            None => 1.0,
        }
    }
}

/// Exceedances of a threshold with the block count they refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceSet {
    pub exceedances: Vec<f64>,
    pub threshold: f64,
    /// Size of the series the exceedances came from.
    pub n_total: usize,
    pub n_blocks: f64,
    /// Occurrence times in block units, `0 <= t < n_blocks`, when known.
    pub times: Option<Vec<f64>>,
}

impl ExceedanceSet {
    pub fn len(&self) -> usize {
        self.exceedances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exceedances.is_empty()
    }

    /// Applies an increasing map to the points and the threshold.
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let exceedances: Vec<f64> = self.exceedances.iter().map(|&x| f(x)).collect();
        let threshold = f(self.threshold);
        if exceedances.iter().any(|&y| !(y > threshold) || !y.is_finite()) {
            return Err(Error::usage("map is not increasing over the exceedances"));
        }
        Ok(Self { exceedances, threshold, ..self.clone() })
    }

    /// Points strictly above a higher threshold `u`.
    pub fn above(&self, u: f64) -> Result<Self> {
        if u < self.threshold {
            return Err(Error::usage(format!("new threshold {u} lies below the current one {}", self.threshold)));
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.exceedances[i] > u).collect();
        Ok(self.subset(&keep, u))
    }

    /// The `k` largest points; the threshold becomes the next largest one.
    pub fn retain_largest(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::usage(format!("k must lie in 1..={}, got {k}", self.len())));
        }
        let mut s = self.exceedances.clone();
        s.sort_by(f64::total_cmp);
        let u = if k == s.len() { self.threshold } else { s[s.len() - k - 1] };
        self.above(u)
    }

    fn subset(&self, keep: &[usize], threshold: f64) -> Self {
        Self {
            exceedances: keep.iter().map(|&i| self.exceedances[i]).collect(),
            threshold,
            n_total: self.n_total,
            n_blocks: self.n_blocks,
            times: self.times.as_ref().map(|t| keep.iter().map(|&i| t[i]).collect()),
        }
    }

    /// Largest point in each unit-length time block; blocks without points
    /// are skipped.
    pub fn time_block_maxima(&self) -> Result<Vec<f64>> {
        let times = self
            .times
            .as_ref()
            .ok_or_else(|| Error::usage("exceedance set carries no occurrence times"))?;
        let n = self.n_blocks.ceil() as usize;
        let mut maxima = vec![f64::NEG_INFINITY; n];
        for (&t, &x) in times.iter().zip(&self.exceedances) {
            let b = (t.floor() as usize).min(n - 1);
            maxima[b] = maxima[b].max(x);
        }
        Ok(maxima.into_iter().filter(|m| m.is_finite()).collect())
    }

    /// The points ordered by occurrence time, as a series.
    pub fn to_series(&self) -> Series {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        if let Some(t) = &self.times {
            idx.sort_by(|&a, &b| t[a].total_cmp(&t[b]));
        }
        Series { values: idx.iter().map(|&i| self.exceedances[i]).collect(), block_length: None, units: String::new() }
    }
}
