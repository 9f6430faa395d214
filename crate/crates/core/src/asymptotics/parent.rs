//! Parent laws `F_X` with closed-form reciprocal hazard functions.

use rand::Rng;
use statrs::distribution::{Continuous, ContinuousCDF, Gamma};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::evd::GevParams;
use crate::numeric::bisect;

use super::mills::mills_ratio;

/// Parameterized parent families.
///
/// The four example classes are implemented with their `O(·)` remainders set
/// to zero, so each is a concrete distribution with the stated tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Exponential { rate: f64 },
    /// `F(x) = 2Φ(x) - 1` on `x > 0`.
    TruncatedNormal,
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    /// Fréchet-domain class: `1 - F(x) = C x^-α (1 + D x^-β)`.
    PowerTail { alpha: f64, beta: f64, c: f64, d: f64 },
    /// Negative-Weibull-domain class:
    /// `1 - F(x) = C (x_F - x)^α (1 + D (x_F - x)^β)`.
    BoundedTail { alpha: f64, beta: f64, c: f64, d: f64, upper: f64 },
    /// Gumbel-domain class with reciprocal hazard `h(x) = C x^-α`, `α > -1`.
    HazardPower { alpha: f64, c: f64 },
    /// Log-Pareto: `1 - F(x) = [1 + γ(log x - u)/β]_+^(-1/γ)`.
    LogPareto { beta: f64, gamma: f64, u: f64 },
    /// An exact GEV parent.
    Gev { location: f64, scale: f64, shape: f64 },
    /// Generalized Pareto above zero: `1 - F(x) = (1 + ξx/σ)^(-1/ξ)`.
    GeneralizedPareto { scale: f64, shape: f64 },
}

/// A validated parent law with its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParentDistribution {
    family: Family,
    lower: f64,
    upper: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

impl ParentDistribution {
    pub fn new(family: Family) -> Result<Self> {
        use Family::*;
        let (lower, upper) = match family {
            Exponential { rate } => {
                positive("rate", rate)?;
                (0.0, f64::INFINITY)
            }
            TruncatedNormal => (0.0, f64::INFINITY),
            Weibull { shape, scale } => {
                positive("Weibull shape", shape)?;
                positive("Weibull scale", scale)?;
                (0.0, f64::INFINITY)
            }
            Gamma { shape, rate } => {
                positive("gamma shape", shape)?;
                positive("gamma rate", rate)?;
                (0.0, f64::INFINITY)
            }
            PowerTail { alpha, beta, c, d } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
                positive("C", c)?;
                finite("D", d)?;
                (power_tail_lower(alpha, beta, c, d)?, f64::INFINITY)
            }
            BoundedTail { alpha, beta, c, d, upper } => {
                positive("alpha", alpha)?;
                positive("beta", beta)?;
                positive("C", c)?;
                finite("D", d)?;
                positive("upper end point", upper)?;
                let lower = upper - bounded_tail_extent(alpha, beta, c, d)?;
                if !(lower >= 0.0) {
                    return Err(Error::domain(format!(
                        "bounded-tail law would put mass below zero (lower end point {lower})"
                    )));
                }
                (lower, upper)
            }
            HazardPower { alpha, c } => {
                if !(alpha > -1.0) || !alpha.is_finite() {
                    return Err(Error::domain(format!("alpha must exceed -1, got {alpha}")));
                }
                positive("C", c)?;
                (0.0, f64::INFINITY)
            }
            LogPareto { beta, gamma, u } => {
                positive("beta", beta)?;
                finite("gamma", gamma)?;
                finite("u", u)?;
                let upper = if gamma < 0.0 { (u - beta / gamma).exp() } else { f64::INFINITY };
                (u.exp(), upper)
            }
            Gev { location, scale, shape } => {
                let g = GevParams::new(location, scale, shape)?;
                (g.lower_endpoint(), g.upper_endpoint())
            }
            GeneralizedPareto { scale, shape } => {
                positive("scale", scale)?;
                finite("shape", shape)?;
                let upper = if shape < 0.0 { -scale / shape } else { f64::INFINITY };
                (0.0, upper)
            }
        };
        Ok(Self { family, lower, upper })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Family::Exponential { rate })
    }

    pub fn truncated_normal() -> Self {
        Self::new(Family::TruncatedNormal).expect("parameter-free family")
    }

    /// `1 - F(x) = x^-α` on `x >= 1`.
    pub fn pareto(alpha: f64) -> Result<Self> {
        Self::new(Family::PowerTail { alpha, beta: 1.0, c: 1.0, d: 0.0 })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lower_endpoint(&self) -> f64 {
        self.lower
    }

    /// `x_F = sup{x : F(x) < 1}`.
    pub fn upper_endpoint(&self) -> f64 {
        self.upper
    }

    /// `1 - F(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        use Family::*;
        if x <= self.lower {
            return 1.0;
        }
        if x >= self.upper {
            return 0.0;
        }
        match self.family {
            Exponential { rate } => (-rate * x).exp(),
            TruncatedNormal => erfc(x / std::f64::consts::SQRT_2),
            Weibull { shape, scale } => (-(x / scale).powf(shape)).exp(),
            Gamma { shape, rate } => gamma_law(shape, rate).sf(x),
            PowerTail { alpha, beta, c, d } => c * x.powf(-alpha) * (1.0 + d * x.powf(-beta)),
            BoundedTail { alpha, beta, c, d, upper } => {
                let t = upper - x;
                c * t.powf(alpha) * (1.0 + d * t.powf(beta))
            }
            HazardPower { alpha, c } => (-x.powf(alpha + 1.0) / (c * (alpha + 1.0))).exp(),
            LogPareto { beta, gamma, u } => {
                let s = (x.ln() - u) / beta;
                if gamma == 0.0 {
                    (-s).exp()
                } else {
                    (-(gamma * s).ln_1p() / gamma).exp()
                }
            }
            Gev { location, scale, shape } => GevParams::new_unchecked(location, scale, shape).sf(x),
            GeneralizedPareto { scale, shape } => gpd_sf(x, scale, shape),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.sf(x)
    }

    /// `log F(x)`, accurate when `F(x)` is close to one.
    pub fn log_cdf(&self, x: f64) -> f64 {
        if x <= self.lower {
            return f64::NEG_INFINITY;
        }
        (-self.sf(x)).ln_1p()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        use Family::*;
        if x < self.lower || x > self.upper {
            return 0.0;
        }
        match self.family {
            TruncatedNormal => (2.0 / std::f64::consts::PI).sqrt() * (-0.5 * x * x).exp(),
            Gamma { shape, rate } => gamma_law(shape, rate).pdf(x),
            Gev { location, scale, shape } => GevParams::new_unchecked(location, scale, shape).pdf(x),
            _ => self.sf(x) / self.hazard(x),
        }
    }

    /// Reciprocal hazard `h(x) = (1 - F(x)) / f(x)`.
    pub fn hazard(&self, x: f64) -> f64 {
        use Family::*;
        match self.family {
            Exponential { rate } => 1.0 / rate,
            TruncatedNormal => mills_ratio(x),
            Weibull { shape, scale } => scale / shape * (x / scale).powf(1.0 - shape),
            PowerTail { alpha, beta, d, .. } => {
                let w = d * x.powf(-beta);
                x * (1.0 + w) / (alpha + (alpha + beta) * w)
            }
            BoundedTail { alpha, beta, d, upper, .. } => {
                let t = upper - x;
                let w = d * t.powf(beta);
                t * (1.0 + w) / (alpha + (alpha + beta) * w)
            }
            HazardPower { alpha, c } => c * x.powf(-alpha),
            LogPareto { beta, gamma, u } => beta * x * (1.0 + gamma * (x.ln() - u) / beta),
            GeneralizedPareto { scale, shape } => scale + shape * x,
            Gamma { .. } | Gev { .. } => self.sf(x) / self.pdf(x),
        }
    }

    /// Closed-form derivative `h'(x)`.
    pub fn hazard_deriv(&self, x: f64) -> f64 {
        use Family::*;
        match self.family {
            Exponential { .. } => 0.0,
            TruncatedNormal => x * mills_ratio(x) - 1.0,
            Weibull { shape, scale } => (1.0 - shape) / shape * (x / scale).powf(-shape),
            PowerTail { alpha, beta, d, .. } => {
                let w = d * x.powf(-beta);
                let a = alpha + (alpha + beta) * w;
                (1.0 + w) / a + beta * beta * w / (a * a)
            }
            BoundedTail { alpha, beta, d, upper, .. } => {
                let w = d * (upper - x).powf(beta);
                let a = alpha + (alpha + beta) * w;
                -(1.0 + w) / a + beta * beta * w / (a * a)
            }
            HazardPower { alpha, c } => -alpha * c * x.powf(-alpha - 1.0),
            LogPareto { beta, gamma, u } => beta + gamma * (x.ln() - u) + gamma,
            GeneralizedPareto { shape, .. } => shape,
            // h' = -1 - h (log f)'
            Gamma { shape, rate } => -1.0 - self.hazard(x) * ((shape - 1.0) / x - rate),
            Gev { location, scale, shape } => {
                let g = GevParams::new_unchecked(location, scale, shape);
                let z = (x - location) / scale;
                let dlogf = if g.is_gumbel() {
                    ((-z).exp() - 1.0) / scale
                } else {
                    let t = 1.0 + shape * z;
                    (g.neg_log_cdf(x) - 1.0 - shape) / (scale * t)
                };
                -1.0 - self.hazard(x) * dlogf
            }
        }
    }

    /// Limiting shape `ξ_X = lim h'(x)` as `x → x_F`, if it exists.
    pub fn shape_limit(&self) -> Option<f64> {
        use Family::*;
        match self.family {
            Exponential { .. } | TruncatedNormal | Weibull { .. } | Gamma { .. } | HazardPower { .. } => Some(0.0),
            PowerTail { alpha, .. } => Some(1.0 / alpha),
            BoundedTail { alpha, .. } => Some(-1.0 / alpha),
            LogPareto { beta, gamma, .. } => match gamma {
                g if g < 0.0 => Some(g),
                0.0 => Some(beta),
                _ => None,
            },
            Gev { shape, .. } | GeneralizedPareto { shape, .. } => Some(shape),
        }
    }

    /// `L = lim h(x)/x` as `x → x_F`, if it exists.
    pub fn hazard_ratio_limit(&self) -> Option<f64> {
        use Family::*;
        match self.family {
            PowerTail { alpha, .. } => Some(1.0 / alpha),
            LogPareto { beta, gamma, .. } => match gamma {
                g if g < 0.0 => Some(0.0),
                0.0 => Some(beta),
                _ => None,
            },
            Gev { shape, .. } | GeneralizedPareto { shape, .. } => Some(shape.max(0.0)),
            _ => Some(0.0),
        }
    }

    /// Upper quantile: the `x` with `1 - F(x) = s`, `0 < s < 1`.
    pub fn upper_quantile(&self, s: f64) -> Result<f64> {
        use Family::*;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("exceedance probability must lie in (0, 1), got {s}")));
        }
        let x = match self.family {
            Exponential { rate } => -s.ln() / rate,
            TruncatedNormal => {
                // Newton steps on log(1 - F) polish the inverse
                let x = std::f64::consts::SQRT_2 * erfc_inv(s);
                let x = x + mills_ratio(x) * (self.sf(x).ln() - s.ln());
                x + mills_ratio(x) * (self.sf(x).ln() - s.ln())
            }
            Weibull { shape, scale } => scale * (-s.ln()).powf(1.0 / shape),
            HazardPower { alpha, c } => (-s.ln() * c * (alpha + 1.0)).powf(1.0 / (alpha + 1.0)),
            LogPareto { beta, gamma, u } => {
                let e = if gamma == 0.0 { -s.ln() } else { (-gamma * s.ln()).exp_m1() / gamma };
                (u + beta * e).exp()
            }
            GeneralizedPareto { scale, shape } => {
                if shape == 0.0 {
                    -scale * s.ln()
                } else {
                    scale * (-shape * s.ln()).exp_m1() / shape
                }
            }
            Gev { location, scale, shape } => {
                GevParams::new_unchecked(location, scale, shape).quantile_from_neg_log(-(-s).ln_1p())
            }
            PowerTail { alpha, c, d: 0.0, .. } => (c / s).powf(1.0 / alpha),
            BoundedTail { alpha, c, d: 0.0, upper, .. } => upper - (s / c).powf(1.0 / alpha),
            Gamma { .. } | PowerTail { .. } | BoundedTail { .. } => return self.solve_upper_quantile(s),
        };
        Ok(x)
    }

    /// Safeguarded bisection on `log(1 - F(x)) - log s` inside the support.
    pub(crate) fn solve_upper_quantile(&self, s: f64) -> Result<f64> {
        let target = s.ln();
        let lo = if self.lower.is_finite() { self.lower } else { -1.0 };
        let mut lo = lo;
        while self.lower.is_infinite() && self.sf(lo) < s {
            lo = 2.0 * lo - 1.0;
            if lo < -1e300 {
                return Err(Error::numerical("failed to bracket the lower quantile"));
            }
        }
        let mut hi = if self.upper.is_finite() { self.upper } else { lo.abs().max(1.0) * 2.0 };
        while self.upper.is_infinite() && self.sf(hi) > s {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::numerical(format!("failed to bracket the {s} upper quantile")));
            }
        }
        let g = |x: f64| {
            let v = self.sf(x);
            if v <= 0.0 {
                -1e300
            } else {
                v.ln() - target
            }
        };
        bisect(g, lo, hi, 0.0)
    }

    /// One inversion draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // open interval (0, 1)
        let s: f64 = loop {
            let v: f64 = rng.random();
            if v > 0.0 {
                break v;
            }
        };
        self.upper_quantile(s).expect("s lies in (0, 1)")
    }
}

fn gamma_law(shape: f64, rate: f64) -> Gamma {
    Gamma::new(shape, rate).expect("validated gamma parameters")
}

fn gpd_sf(x: f64, scale: f64, shape: f64) -> f64 {
    if shape == 0.0 {
        (-x / scale).exp()
    } else {
        (-(shape * x / scale).ln_1p() / shape).exp()
    }
}

/// Lower end point `x0` of `C x^-α (1 + D x^-β)`, where it equals one.
fn power_tail_lower(alpha: f64, beta: f64, c: f64, d: f64) -> Result<f64> {
    // log S in terms of log x; decreasing wherever the density is positive
    let log_s = |lx: f64| c.ln() - alpha * lx + (d * (-beta * lx).exp()).ln_1p();
    let lo = if d < 0.0 {
        // the density vanishes where α + (α + β) D x^-β = 0
        (-d * (alpha + beta) / alpha).ln() / beta + 1e-12
    } else {
        -700.0
    };
    let mut hi = lo.max(0.0) + 1.0;
    while log_s(hi) >= 0.0 && hi < 1e4 {
        hi += 4.0;
    }
    if !(log_s(lo) > 0.0) || !(log_s(hi) < 0.0) {
        return Err(Error::domain(format!(
            "tail parameters (alpha={alpha}, beta={beta}, C={c}, D={d}) do not define a proper distribution"
        )));
    }
    Ok(bisect(log_s, lo, hi, 0.0)?.exp())
}

/// Largest distance `t0 = x_F - x0` below the end point with
/// `C t^α (1 + D t^β) = 1`.
fn bounded_tail_extent(alpha: f64, beta: f64, c: f64, d: f64) -> Result<f64> {
    let log_s = |lt: f64| c.ln() + alpha * lt + (d * (beta * lt).exp()).ln_1p();
    let lo = -700.0;
    let hi = if d < 0.0 {
        // density vanishes where α + (α + β) D t^β = 0
        (alpha / (-d * (alpha + beta))).ln() / beta - 1e-12
    } else {
        let mut hi = 1.0;
        while log_s(hi) <= 0.0 && hi < 1e4 {
            hi += 4.0;
        }
        hi
    };
    if !(log_s(lo) < 0.0) || !(log_s(hi) > 0.0) {
        return Err(Error::domain(format!(
            "bounded-tail parameters (alpha={alpha}, beta={beta}, C={c}, D={d}) do not define a distribution"
        )));
    }
    Ok(bisect(log_s, lo, hi, 0.0)?.exp())
}
