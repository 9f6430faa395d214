//! The four-parameter model: a GEV / point process on the Box-Cox scale,
//! parameterized through the untransformed-scale quantities
//! `{β_X, log α_X, γ_X, λ}` and a fixed shape slope `c`.

use super::boxcox::{boxcox_unchecked, log_jacobian};
use super::gev::{gev_loglik_unchecked, GevParams};
use super::pp::pp_loglik_unchecked;
use crate::error::{Error, Result};

/// Which extreme value likelihood the data feed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Block maxima under a GEV likelihood.
    BlockMaxima,
    /// Exceedances of `threshold` under the point-process likelihood,
    /// referenced to `n_blocks` blocks.
    ThresholdExceedances { threshold: f64, n_blocks: f64 },
}

impl ModelKind {
    pub fn exceedances(threshold: f64, n_blocks: f64) -> Result<Self> {
        if !(threshold > 0.0) || !threshold.is_finite() {
            return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
        }
        if !(n_blocks > 0.0) || !n_blocks.is_finite() {
            return Err(Error::domain(format!("block count must be positive, got {n_blocks}")));
        }
        Ok(ModelKind::ThresholdExceedances { threshold, n_blocks })
    }

    pub fn threshold(&self) -> Option<f64> {
        match self {
            ModelKind::BlockMaxima => None,
            ModelKind::ThresholdExceedances { threshold, .. } => Some(*threshold),
        }
    }

    /// The same kind with the block count replaced (no-op for block maxima).
    pub fn with_n_blocks(&self, n: f64) -> Self {
        match *self {
            ModelKind::BlockMaxima => ModelKind::BlockMaxima,
            ModelKind::ThresholdExceedances { threshold, .. } => {
                ModelKind::ThresholdExceedances { threshold, n_blocks: n }
            }
        }
    }

    pub fn is_block_maxima(&self) -> bool {
        matches!(self, ModelKind::BlockMaxima)
    }
}

/// Three-parameter log-likelihood for either model kind.
pub fn loglik3(data: &[f64], kind: &ModelKind, p: &GevParams) -> Result<f64> {
    match *kind {
        ModelKind::BlockMaxima => super::gev::loglik_gev3(data, p),
        ModelKind::ThresholdExceedances { threshold, n_blocks } => {
            super::pp::loglik_pp3(data, threshold, n_blocks, p)
        }
    }
}

/// `{β_X, log α_X, γ_X, λ}` together with the slope `c` fixed before inference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedModel {
    beta_x: f64,
    log_alpha_x: f64,
    gamma_x: f64,
    lambda: f64,
    c: f64,
}

impl TransformedModel {
    pub fn new(beta_x: f64, log_alpha_x: f64, gamma_x: f64, lambda: f64, c: f64) -> Result<Self> {
        if !(beta_x > 0.0) || !beta_x.is_finite() {
            return Err(Error::domain(format!(
                "beta_X must be positive for the Box-Cox reparameterization, got {beta_x}"
            )));
        }
        for (name, v) in [("log alpha_X", log_alpha_x), ("gamma_X", gamma_x), ("lambda", lambda), ("c", c)] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self { beta_x, log_alpha_x, gamma_x, lambda, c })
    }

    pub fn beta_x(&self) -> f64 {
        self.beta_x
    }
    pub fn log_alpha_x(&self) -> f64 {
        self.log_alpha_x
    }
    pub fn alpha_x(&self) -> f64 {
        self.log_alpha_x.exp()
    }
    pub fn gamma_x(&self) -> f64 {
        self.gamma_x
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    /// State vector in sampling order `[β_X, log α_X, γ_X, λ]`.
    pub fn state(&self) -> [f64; 4] {
        [self.beta_x, self.log_alpha_x, self.gamma_x, self.lambda]
    }

    /// Rebuilds from a state vector, keeping `c`.
    pub fn with_state(&self, s: [f64; 4]) -> Result<Self> {
        Self::new(s[0], s[1], s[2], s[3], self.c)
    }

    /// GEV parameters on the transformed (Y) scale:
    /// `β_Y = (β_X^λ - 1)/λ`, `log α_Y = (λ-1) log β_X + log α_X`, `γ_Y = γ_X + c(λ-1)`.
    pub fn to_y_params(&self) -> GevParams {
        let l = self.lambda;
        GevParams::new_unchecked(
            boxcox_unchecked(self.beta_x, l),
            ((l - 1.0) * self.beta_x.ln() + self.log_alpha_x).exp(),
            self.gamma_x + self.c * (l - 1.0),
        )
    }

    /// For λ < 0 the transformed variable is bounded above by `-1/λ`, so the
    /// fitted GEV must have `γ_Y < 0` and upper end point `β_Y - α_Y/γ_Y <= -1/λ`.
    pub fn satisfies_constraints(&self) -> bool {
        if self.lambda >= 0.0 {
            return true;
        }
        let y = self.to_y_params();
        if !(y.shape < 0.0) {
            return false;
        }
        y.location - y.scale / y.shape <= -1.0 / self.lambda
    }
}

/// Data (and threshold) mapped to the Box-Cox scale for one value of λ, with
/// the log-Jacobian `Σ (λ-1) log x_i` precomputed.
#[derive(Debug, Clone)]
pub struct ScaledData {
    lambda: f64,
    values: Vec<f64>,
    threshold: Option<f64>,
    log_jacobian: f64,
}

impl ScaledData {
    pub fn new(data: &[f64], kind: &ModelKind, lambda: f64) -> Result<Self> {
        validate_data(data, kind)?;
        Ok(Self::new_unchecked(data, kind, lambda))
    }

    pub(crate) fn new_unchecked(data: &[f64], kind: &ModelKind, lambda: f64) -> Self {
        let values = data.iter().map(|&x| boxcox_unchecked(x, lambda)).collect();
        let log_jacobian = if lambda == 1.0 {
            0.0
        } else {
            data.iter().map(|&x| log_jacobian(x, lambda)).sum()
        };
        Self {
            lambda,
            values,
            threshold: kind.threshold().map(|u| boxcox_unchecked(u, lambda)),
            log_jacobian,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Log-likelihood of the original data given Y-scale parameters.
    pub fn loglik(&self, kind: &ModelKind, y: &GevParams) -> f64 {
        let core = match (kind, self.threshold) {
            (ModelKind::ThresholdExceedances { n_blocks, .. }, Some(u)) => {
                pp_loglik_unchecked(&self.values, u, *n_blocks, y)
            }
            _ => gev_loglik_unchecked(&self.values, y),
        };
        core + self.log_jacobian
    }

    /// Four-parameter log-likelihood; `model.lambda()` must equal `self.lambda()`.
    pub fn loglik4(&self, kind: &ModelKind, model: &TransformedModel) -> f64 {
        debug_assert_eq!(model.lambda(), self.lambda);
        if !model.satisfies_constraints() {
            return f64::NEG_INFINITY;
        }
        self.loglik(kind, &model.to_y_params())
    }
}

/// [`loglik3`] without input validation; constraint failures give `-inf`.
pub(crate) fn loglik3_unchecked(data: &[f64], kind: &ModelKind, p: &GevParams) -> f64 {
    match *kind {
        ModelKind::BlockMaxima => gev_loglik_unchecked(data, p),
        ModelKind::ThresholdExceedances { threshold, n_blocks } => {
            pp_loglik_unchecked(data, threshold, n_blocks, p)
        }
    }
}

pub(crate) fn validate_data(data: &[f64], kind: &ModelKind) -> Result<()> {
    if data.is_empty() && kind.is_block_maxima() {
        return Err(Error::usage("block-maxima likelihood needs at least one observation"));
    }
    if let Some(bad) = data.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::domain(format!(
            "the Box-Cox model needs positive finite data, found {bad}"
        )));
    }
    if let ModelKind::ThresholdExceedances { threshold, n_blocks } = *kind {
        if !(threshold > 0.0) {
            return Err(Error::domain(format!("threshold must be positive, got {threshold}")));
        }
        if !(n_blocks > 0.0) {
            return Err(Error::usage(format!("block count must be positive, got {n_blocks}")));
        }
        if let Some(bad) = data.iter().find(|&&x| !(x > threshold)) {
            return Err(Error::usage(format!(
                "point-process data must exceed the threshold {threshold}, found {bad}"
            )));
        }
    }
    Ok(())
}

/// Log-likelihood of the four-parameter model: the three-parameter
/// likelihood of the transformed data times the Jacobian `Π x_i^(λ-1)`.
///
/// Constraint violations give `-inf`; malformed data is an error.
pub fn loglik4(data: &[f64], kind: &ModelKind, model: &TransformedModel) -> Result<f64> {
    validate_data(data, kind)?;
    if !model.satisfies_constraints() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ScaledData::new_unchecked(data, kind, model.lambda()).loglik(kind, &model.to_y_params()))
}

pub fn to_y_params(model: &TransformedModel) -> GevParams {
    model.to_y_params()
}
