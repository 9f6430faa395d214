use log::warn;

use crate::error::{Error, Result};
use crate::numeric::{quantile_sorted, sorted};

use super::{ExceedanceSet, Series};

/// Maxima of consecutive disjoint blocks; a trailing partial block is dropped.
pub fn block_maxima(s: &Series, block_length: usize) -> Result<Series> {
    if block_length == 0 {
        return Err(Error::usage("block length must be at least 1"));
    }
    let leftover = s.values.len() % block_length;
    if leftover > 0 {
        warn!("dropping {leftover} observations in a trailing partial block");
    }
    let values = s
        .values
        .chunks_exact(block_length)
        .map(|c| c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(Series { values, block_length: None, units: s.units.clone() })
}

fn exceedances_of(s: &Series, u: f64) -> ExceedanceSet {
    ExceedanceSet {
        exceedances: s.values.iter().copied().filter(|&x| x > u).collect(),
        threshold: u,
        n_total: s.len(),
        n_blocks: s.n_blocks(),
        times: None,
    }
}

/// Threshold at the `(n-k)`th order statistic and the points strictly above it.
///
/// With `k = n` the threshold sits just below the minimum.
pub fn largest_k(s: &Series, k: usize) -> Result<ExceedanceSet> {
    let n = s.len();
    if k == 0 || k > n {
        return Err(Error::usage(format!("k must lie in 1..={n}, got {k}")));
    }
    let v = sorted(&s.values);
    let u = if k == n { v[0].next_down() } else { v[n - k - 1] };
    Ok(exceedances_of(s, u))
}

/// Threshold at the type-7 empirical `q`-quantile.
pub fn threshold_at_quantile(s: &Series, q: f64) -> Result<ExceedanceSet> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::usage(format!("quantile level must lie in (0, 1), got {q}")));
    }
    if s.is_empty() {
        return Err(Error::usage("cannot threshold an empty series"));
    }
    Ok(exceedances_of(s, quantile_sorted(&sorted(&s.values), q)))
}

/// Cluster maxima of exceedances of `u`. A cluster ends once `run_gap`
/// consecutive observations at or below `u` have been seen.
pub fn decluster_runs(s: &Series, u: f64, run_gap: usize) -> Result<ExceedanceSet> {
    if run_gap == 0 {
        return Err(Error::usage("run gap must be at least 1"));
    }
    let mut maxima = Vec::new();
    let mut current: Option<f64> = None;
    let mut below = 0usize;
    for &x in &s.values {
        if x > u {
            current = Some(current.map_or(x, |m: f64| m.max(x)));
            below = 0;
        } else {
            below += 1;
            if below >= run_gap {
                maxima.extend(current.take());
            }
        }
    }
    maxima.extend(current);
    Ok(ExceedanceSet { exceedances: maxima, threshold: u, n_total: s.len(), n_blocks: s.n_blocks(), times: None })
}
