//! Numerical penultimate-approximation error and Monte Carlo maxima.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evd::{boxcox_unchecked, GevParams};

use super::norming::{norming_constants, transform_norming, NormingTriple, TransformedParent};
use super::parent::ParentDistribution;

/// Standardized GEV quantiles at probabilities `0.001, 0.002, ..., 0.999`.
pub fn default_gap_grid(shape: f64) -> Vec<f64> {
    let g = GevParams::new_unchecked(0.0, 1.0, shape);
    (1..1000).map(|i| g.quantile(i as f64 / 1000.0).expect("probability inside (0, 1)")).collect()
}

/// `sup_x |F_Y(a_{Y,n} x + b_{Y,n})^n - G(x; ξ_{Y,n})|` with hazard-based norming.
pub fn convergence_gap(d: &ParentDistribution, n: u64, lambda: f64, grid: &[f64]) -> Result<f64> {
    let y_norming = transform_norming(&norming_constants(d, n)?, lambda)?;
    convergence_gap_with_norming(d, &y_norming, lambda, grid)
}

/// Gap for caller-supplied Y-scale norming constants and shape.
pub fn convergence_gap_with_norming(
    d: &ParentDistribution,
    y_norming: &NormingTriple,
    lambda: f64,
    grid: &[f64],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::usage("convergence gap needs a nonempty grid"));
    }
    let law = TransformedParent::new(*d, lambda)?;
    let limit = GevParams::new(0.0, 1.0, y_norming.xi_pen)?;
    let n = y_norming.n as f64;
    let mut gap = 0.0f64;
    for &x in grid {
        if !x.is_finite() {
            return Err(Error::usage(format!("grid point {x} is not finite")));
        }
        let log_f = law.log_cdf(y_norming.a * x + y_norming.b);
        // n log F underflows to -inf harmlessly; exp(-inf) = 0
        let fn_ = (n * log_f).exp();
        gap = gap.max((fn_ - limit.cdf(x)).abs());
    }
    Ok(gap)
}

/// Normalized Box-Cox transformed maxima `(boxcox(M_n, λ) - b_{Y,n}) / a_{Y,n}`
/// of `replicates` samples of size `n` drawn from the parent.
pub fn simulate_normalized_maxima(
    d: &ParentDistribution,
    n: u64,
    lambda: f64,
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let y = transform_norming(&norming_constants(d, n)?, lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..replicates)
        .map(|_| {
            let m = (0..n).map(|_| d.sample(&mut rng)).fold(f64::NEG_INFINITY, f64::max);
            (boxcox_unchecked(m, lambda) - y.b) / y.a
        })
        .collect();
    Ok(out)
}
