//! Three-parameter generalized extreme value law.

use crate::error::{Error, Result};

/// Shapes with `|ξ|` below this are evaluated through the Gumbel (ξ = 0) formulas.
pub const GUMBEL_SWITCH: f64 = 1e-8;

/// Location / scale / shape triple of a GEV or point-process model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevParams {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
}

impl GevParams {
    pub fn new(location: f64, scale: f64, shape: f64) -> Result<Self> {
        if !location.is_finite() || !shape.is_finite() {
            return Err(Error::domain(format!(
                "GEV location and shape must be finite, got ({location}, {shape})"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::domain(format!(
                "GEV scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { location, scale, shape })
    }

    /// Builds the triple without validation; evaluation methods tolerate
    /// `scale <= 0` by treating every point as outside the support.
    pub(crate) fn new_unchecked(location: f64, scale: f64, shape: f64) -> Self {
        Self { location, scale, shape }
    }

    #[inline]
    pub fn is_gumbel(&self) -> bool {
        self.shape.abs() < GUMBEL_SWITCH
    }

    pub(crate) fn is_valid(&self) -> bool {
        self.scale > 0.0 && self.scale.is_finite() && self.location.is_finite() && self.shape.is_finite()
    }

    /// Lower end of the support (`-inf` unless ξ > 0).
    pub fn lower_endpoint(&self) -> f64 {
        if self.shape >= GUMBEL_SWITCH {
            self.location - self.scale / self.shape
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Upper end of the support (`+inf` unless ξ < 0).
    pub fn upper_endpoint(&self) -> f64 {
        if self.shape <= -GUMBEL_SWITCH {
            self.location - self.scale / self.shape
        } else {
            f64::INFINITY
        }
    }

    /// `[1 + ξ(x-μ)/σ]_+^(-1/ξ)`, i.e. `-ln G(x)`, in `[0, inf]`.
    #[inline]
    pub fn neg_log_cdf(&self, x: f64) -> f64 {
        let z = (x - self.location) / self.scale;
        if self.is_gumbel() {
            return (-z).exp();
        }
        let arg = self.shape * z;
        if arg <= -1.0 {
            if self.shape > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            (-arg.ln_1p() / self.shape).exp()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-self.neg_log_cdf(x)).exp()
    }

    /// `1 - G(x)`, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        -(-self.neg_log_cdf(x)).exp_m1()
    }

    pub fn logpdf(&self, x: f64) -> f64 {
        if !self.is_valid() {
            return f64::NEG_INFINITY;
        }
        let z = (x - self.location) / self.scale;
        if self.is_gumbel() {
            return -self.scale.ln() - z - (-z).exp();
        }
        let arg = self.shape * z;
        if arg <= -1.0 {
            return f64::NEG_INFINITY;
        }
        let log_t = arg.ln_1p();
        -self.scale.ln() - (1.0 + 1.0 / self.shape) * log_t - (-log_t / self.shape).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.logpdf(x).exp()
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::domain(format!("quantile level must lie in (0, 1), got {q}")));
        }
        Ok(self.quantile_from_neg_log(-q.ln()))
    }

    /// Level `x` with `-ln G(x) = s`, for `s > 0`.
    #[inline]
    pub(crate) fn quantile_from_neg_log(&self, s: f64) -> f64 {
        if self.is_gumbel() {
            self.location - self.scale * s.ln()
        } else {
            self.location + self.scale * (-self.shape * s.ln()).exp_m1() / self.shape
        }
    }
}

pub fn gev_cdf(x: f64, p: &GevParams) -> f64 {
    p.cdf(x)
}

pub fn gev_logpdf(x: f64, p: &GevParams) -> f64 {
    p.logpdf(x)
}

pub fn gev_quantile(q: f64, p: &GevParams) -> Result<f64> {
    p.quantile(q)
}

/// Block-maxima log-likelihood; `-inf` when any point leaves the support.
pub fn loglik_gev3(data: &[f64], p: &GevParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::usage("GEV log-likelihood needs at least one observation"));
    }
    Ok(gev_loglik_unchecked(data, p))
}

pub(crate) fn gev_loglik_unchecked(data: &[f64], p: &GevParams) -> f64 {
    if !p.is_valid() {
        return f64::NEG_INFINITY;
    }
    let log_scale = p.scale.ln();
    let mut total = 0.0;
    if p.is_gumbel() {
        for &x in data {
            let z = (x - p.location) / p.scale;
            total += -log_scale - z - (-z).exp();
        }
        return total;
    }
    let inv_shape = 1.0 / p.shape;
    for &x in data {
        let arg = p.shape * (x - p.location) / p.scale;
        if arg <= -1.0 {
            return f64::NEG_INFINITY;
        }
        let log_t = arg.ln_1p();
        total += -log_scale - (1.0 + inv_shape) * log_t - (-log_t * inv_shape).exp();
    }
    total
}
