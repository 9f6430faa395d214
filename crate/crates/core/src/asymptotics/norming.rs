//! Norming constants, their Box-Cox images, penultimate and limiting shapes,
//! and the optimal transformation sequence `λ*_n`.

use crate::error::{Error, Result};
use crate::evd::{boxcox, inverse_boxcox, LAMBDA_LOG_SWITCH};

use super::mills::{mills_deriv_expansion, mills_over_x_expansion};
use super::parent::{Family, ParentDistribution};

/// `(b_n, a_n, ξ_n)` for maxima of `n` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingTriple {
    pub b: f64,
    pub a: f64,
    /// Penultimate shape `h'(b_n)`.
    pub xi_pen: f64,
    pub n: u64,
}

/// Where the hazard calculus is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    /// At `b_n = F^{-1}(1 - 1/n)`.
    Blocks(u64),
    /// At a caller-supplied level `b`.
    At(f64),
}

/// How `h(b)/b` and `h'(b)` are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HazardRule {
    Exact,
    /// Truncated Mills-ratio series; half-normal parent only.
    MillsExpansion { terms: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitShape {
    Value(f64),
    /// Transformed maxima have no non-degenerate limit.
    NoDomain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaStar {
    /// `has_limit` is false when the sequence `λ*_n` does not converge.
    Value { lambda: f64, has_limit: bool },
    /// `λ = 1` cannot be improved on: numerator or denominator vanishes.
    NoImprovement,
}

impl LambdaStar {
    pub fn value(&self) -> Option<f64> {
        match *self {
            LambdaStar::Value { lambda, .. } => Some(lambda),
            LambdaStar::NoImprovement => None,
        }
    }
}

pub fn norming_constants(d: &ParentDistribution, n: u64) -> Result<NormingTriple> {
    if n < 2 {
        return Err(Error::usage(format!("block size must be at least 2, got {n}")));
    }
    let b = d.upper_quantile(1.0 / n as f64)?;
    Ok(NormingTriple { b, a: d.hazard(b), xi_pen: d.hazard_deriv(b), n })
}

/// Box-Cox image of a norming triple; the shape becomes `ξ_{Y,n}`.
pub fn transform_norming(t: &NormingTriple, lambda: f64) -> Result<NormingTriple> {
    if !(t.b > 0.0) {
        return Err(Error::domain(format!("norming location must be positive to transform, got {}", t.b)));
    }
    let b = boxcox(t.b, lambda)?;
    let a = t.a * ((lambda - 1.0) * t.b.ln()).exp();
    Ok(NormingTriple { b, a, xi_pen: t.xi_pen + t.a / t.b * (lambda - 1.0), n: t.n })
}

/// `ξ_{Y,n} = ξ_{X,n} + (a_{X,n} / b_{X,n})(λ - 1)`.
pub fn penultimate_shape_y(d: &ParentDistribution, n: u64, lambda: f64) -> Result<f64> {
    let t = norming_constants(d, n)?;
    Ok(transform_norming(&t, lambda)?.xi_pen)
}

pub fn limiting_shape_y(d: &ParentDistribution, lambda: f64) -> LimitShape {
    if let Family::LogPareto { gamma, .. } = d.family() {
        if gamma > 0.0 {
            return if lambda.abs() < LAMBDA_LOG_SWITCH { LimitShape::Value(gamma) } else { LimitShape::NoDomain };
        }
    }
    match (d.shape_limit(), d.hazard_ratio_limit()) {
        (Some(xi), _) if xi <= 0.0 => LimitShape::Value(xi),
        (Some(xi), Some(l)) => LimitShape::Value(xi + l * (lambda - 1.0)),
        _ => LimitShape::NoDomain,
    }
}

/// `λ*_n = 1 - (h'(b) - ξ_X) / (h(b)/b - L)` with exact hazard functions.
pub fn lambda_star_n(d: &ParentDistribution, level: Level) -> Result<LambdaStar> {
    lambda_star_n_with(d, level, HazardRule::Exact)
}

pub fn lambda_star_n_with(d: &ParentDistribution, level: Level, rule: HazardRule) -> Result<LambdaStar> {
    let (xi, l) = match (d.shape_limit(), d.hazard_ratio_limit()) {
        (Some(xi), Some(l)) => (xi, l),
        _ => {
            return Err(Error::domain(format!(
                "{:?} has no limiting shape, so the optimal transformation is undefined",
                d.family()
            )))
        }
    };
    let b = match level {
        Level::Blocks(n) => norming_constants(d, n)?.b,
        Level::At(b) => {
            if !(b > d.lower_endpoint() && b < d.upper_endpoint()) {
                return Err(Error::domain(format!("level {b} lies outside the support")));
            }
            b
        }
    };
    if !(b > 0.0) {
        return Err(Error::domain(format!("level {b} must be positive")));
    }
    let (h_over_b, h_deriv) = match rule {
        HazardRule::Exact => (d.hazard(b) / b, d.hazard_deriv(b)),
        HazardRule::MillsExpansion { terms } => {
            if d.family() != Family::TruncatedNormal {
                return Err(Error::usage("the Mills-ratio expansion applies to the truncated normal only"));
            }
            (mills_over_x_expansion(b, terms), mills_deriv_expansion(b, terms))
        }
    };
    let num = h_deriv - xi;
    let den = h_over_b - l;
    let scale = h_deriv.abs().max(xi.abs()).max(f64::MIN_POSITIVE);
    if num.abs() <= 1e-12 * scale || den.abs() <= 1e-12 * h_over_b.abs().max(l.abs()).max(f64::MIN_POSITIVE) {
        return Ok(LambdaStar::NoImprovement);
    }
    let has_limit = !matches!(d.family(), Family::BoundedTail { beta, .. } if beta < 1.0);
    Ok(LambdaStar::Value { lambda: 1.0 - num / den, has_limit })
}

/// Limit of `λ*_n` for the tail classes, where one exists.
pub fn table1_lambda_star(family: &Family) -> Option<f64> {
    match *family {
        Family::PowerTail { beta, .. } => Some(beta),
        Family::BoundedTail { beta, .. } => (beta > 1.0).then_some(1.0),
        Family::HazardPower { alpha, .. } => Some(alpha + 1.0),
        Family::Exponential { .. } | Family::Gamma { .. } => Some(1.0),
        Family::TruncatedNormal => Some(2.0),
        Family::Weibull { shape, .. } => Some(shape),
        Family::LogPareto { gamma, .. } => (gamma != 0.0).then_some(0.0),
        Family::Gev { .. } | Family::GeneralizedPareto { .. } => None,
    }
}

/// The law of `Y = boxcox(X, λ)` for a parent `X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedParent {
    parent: ParentDistribution,
    lambda: f64,
}

impl TransformedParent {
    pub fn new(parent: ParentDistribution, lambda: f64) -> Result<Self> {
        if lambda != 1.0 && !(parent.lower_endpoint() >= 0.0) {
            return Err(Error::domain("Box-Cox transformation needs a parent supported on the positive axis"));
        }
        if !lambda.is_finite() {
            return Err(Error::domain(format!("λ must be finite, got {lambda}")));
        }
        Ok(Self { parent, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Maps `y` back to the parent scale; `None` below the image of zero,
    /// `+∞` beyond the image of infinity.
    fn x_of(&self, y: f64) -> Option<f64> {
        if self.lambda == 1.0 {
            return Some(y + 1.0);
        }
        if self.lambda.abs() >= LAMBDA_LOG_SWITCH && self.lambda * y + 1.0 <= 0.0 {
            return if self.lambda > 0.0 { None } else { Some(f64::INFINITY) };
        }
        inverse_boxcox(y, self.lambda).ok()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        self.x_of(y).map_or(0.0, |x| self.parent.cdf(x))
    }

    pub fn log_cdf(&self, y: f64) -> f64 {
        match self.x_of(y) {
            None => f64::NEG_INFINITY,
            Some(x) if x.is_infinite() => 0.0,
            Some(x) => self.parent.log_cdf(x),
        }
    }

    /// `h_Y(y) = h_X(x) x^{λ-1}`.
    pub fn hazard(&self, y: f64) -> f64 {
        let x = self.x_of(y).expect("y inside the transformed support");
        self.parent.hazard(x) * ((self.lambda - 1.0) * x.ln()).exp()
    }

    /// `h'_Y(y(x)) = h'_X(x) + (h_X(x)/x)(λ - 1)`.
    pub fn hazard_deriv_at_x(&self, x: f64) -> f64 {
        self.parent.hazard_deriv(x) + self.parent.hazard(x) / x * (self.lambda - 1.0)
    }
}
