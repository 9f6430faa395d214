//! Small numerical helpers: bracketed bisection, differentiation, empirical
//! quantiles and Kolmogorov distances.

use crate::error::{Error, Result};

/// Bisection for a root of `f` on `[lo, hi]`, requiring a sign change.
///
/// Stops when the bracket is narrower than `x_tol` (absolute) or after
/// 400 halvings.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::numerical(format!(
            "root not bracketed on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= x_tol {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First derivative by a five-point central stencil with one Richardson step.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    let (d1, d2) = (d(h), d(0.5 * h));
    d2 + (d2 - d1) / 15.0
}

/// Type-7 (linear interpolation) empirical quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov distance `sup |F_n - F|` between a sample and a continuous cdf.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let s = sorted(sample);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        acc.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Location of the maximum of a Gaussian kernel density estimate
/// (Silverman bandwidth), searched on a 2001-point grid over the sample range.
pub fn kde_mode(sample: &[f64]) -> f64 {
    let s = sorted(sample);
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let sd = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if !(spread > 0.0) {
        return s[0];
    }
    let bw = 0.9 * spread * n.powf(-0.2);
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let mut best = (f64::NEG_INFINITY, lo);
    for k in 0..=2000 {
        let x = lo + (hi - lo) * k as f64 / 2000.0;
        // only points within 8 bandwidths contribute materially
        let a = s.partition_point(|&v| v < x - 8.0 * bw);
        let b = s.partition_point(|&v| v <= x + 8.0 * bw);
        let dens: f64 = s[a..b].iter().map(|&v| (-0.5 * ((x - v) / bw).powi(2)).exp()).sum();
        if dens > best.0 {
            best = (dens, x);
        }
    }
    best.1
}
