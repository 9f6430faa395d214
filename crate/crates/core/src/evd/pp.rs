//! Nonhomogeneous Poisson-process representation of threshold exceedances.
//!
//! A `PP(β, α, γ)` process observed over `N_B` blocks has intensity measure
//! `Λ{(x, ∞) × (0, 1)} = N_B [1 + γ(x - β)/α]_+^(-1/γ)`; the block-maximum
//! law of one block is then `GEV(β, α, γ)`.

use super::gev::{GevParams, GUMBEL_SWITCH};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpParams {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    pub n_blocks: f64,
}

impl PpParams {
    pub fn new(location: f64, scale: f64, shape: f64, n_blocks: f64) -> Result<Self> {
        GevParams::new(location, scale, shape)?;
        check_blocks(n_blocks)?;
        Ok(Self { location, scale, shape, n_blocks })
    }

    pub fn from_gev(p: &GevParams, n_blocks: f64) -> Result<Self> {
        Self::new(p.location, p.scale, p.shape, n_blocks)
    }

    /// Block-maximum law of a single block.
    pub fn block_gev(&self) -> GevParams {
        GevParams::new_unchecked(self.location, self.scale, self.shape)
    }

    /// Expected number of points above `x` over all `N_B` blocks.
    pub fn intensity_above(&self, x: f64) -> f64 {
        self.n_blocks * self.block_gev().neg_log_cdf(x)
    }

    /// Expected number of points in `(x_lo, x_hi] × (t0, t1)`, with time in block units
    /// `0 <= t0 < t1 <= 1` measured as a fraction of the whole observation period.
    pub fn intensity_rectangle(&self, x_lo: f64, x_hi: f64, t0: f64, t1: f64) -> f64 {
        (t1 - t0) * (self.intensity_above(x_lo) - self.intensity_above(x_hi))
    }

    /// Level `x` with `Λ{(x, ∞) × (0, 1)} = total`.
    pub fn level_for_intensity(&self, total: f64) -> Result<f64> {
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::domain(format!("intensity must be positive and finite, got {total}")));
        }
        Ok(self.block_gev().quantile_from_neg_log(total / self.n_blocks))
    }
}

fn check_blocks(n: f64) -> Result<()> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(format!("block count must be positive and finite, got {n}")));
    }
    Ok(())
}

/// Re-expresses the same intensity measure in terms of `to_n_blocks` blocks.
///
/// With `r = N_B / N_B'`: `γ' = γ`, `α' = α r^γ`, `β' = β - (α/γ)(1 - r^γ)`,
/// and `β' = β + α ln r` in the Gumbel limit.
pub fn convert_pp_nblocks(p: &PpParams, to_n_blocks: f64) -> Result<PpParams> {
    check_blocks(p.n_blocks)?;
    check_blocks(to_n_blocks)?;
    if to_n_blocks == p.n_blocks {
        return Ok(*p);
    }
    let log_ratio = (p.n_blocks / to_n_blocks).ln();
    let (location, scale) = if p.shape.abs() < GUMBEL_SWITCH {
        (p.location + p.scale * log_ratio, p.scale)
    } else {
        let growth = (p.shape * log_ratio).exp_m1();
        (p.location + p.scale * growth / p.shape, p.scale * (p.shape * log_ratio).exp())
    };
    Ok(PpParams { location, scale, shape: p.shape, n_blocks: to_n_blocks })
}

/// Point-process log-likelihood of exceedances of `threshold` over `n_blocks` blocks.
///
/// Returns `-inf` when the threshold or any point falls outside the support.
pub fn loglik_pp3(data: &[f64], threshold: f64, n_blocks: f64, p: &GevParams) -> Result<f64> {
    check_blocks(n_blocks).map_err(|e| Error::usage(e.to_string()))?;
    if let Some(bad) = data.iter().find(|&&x| !(x > threshold)) {
        return Err(Error::usage(format!(
            "point-process data must exceed the threshold {threshold}, found {bad}"
        )));
    }
    Ok(pp_loglik_unchecked(data, threshold, n_blocks, p))
}

pub(crate) fn pp_loglik_unchecked(data: &[f64], threshold: f64, n_blocks: f64, p: &GevParams) -> f64 {
    if !p.is_valid() {
        return f64::NEG_INFINITY;
    }
    let log_scale = p.scale.ln();
    if p.is_gumbel() {
        let mut total = -n_blocks * (-(threshold - p.location) / p.scale).exp();
        for &x in data {
            total += -log_scale - (x - p.location) / p.scale;
        }
        return total;
    }
    let arg_u = p.shape * (threshold - p.location) / p.scale;
    if arg_u <= -1.0 {
        return f64::NEG_INFINITY;
    }
    let mut total = -n_blocks * (-arg_u.ln_1p() / p.shape).exp();
    let power = 1.0 + 1.0 / p.shape;
    for &x in data {
        let arg = p.shape * (x - p.location) / p.scale;
        if arg <= -1.0 {
            return f64::NEG_INFINITY;
        }
        total += -log_scale - power * arg.ln_1p();
    }
    total
}
