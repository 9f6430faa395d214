use crate::error::{Error, Result};
use crate::evd::{boxcox_unchecked, inverse_boxcox, GevParams, ModelKind, LAMBDA_LOG_SWITCH};
use crate::numeric::{quantile_sorted, sorted};
use crate::sampler::PosteriorDraws;

/// Bracket growth per attempt when locating the predictive level.
pub const EXPANSION_FACTOR: f64 = 1.5;
pub const MAX_EXPANSIONS: usize = 10;

/// The level exceeded by a block maximum with probability `p`:
/// `y = β_Y - (α_Y/γ_Y)[1 - {-log(1-p)}^{-γ_Y}]` mapped back by inverse Box-Cox.
pub fn return_level(y: &GevParams, lambda: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("exceedance probability must lie in (0, 1), got {p}")));
    }
    let level_y = y.quantile_from_neg_log(-(-p).ln_1p());
    inverse_boxcox(level_y, lambda).map_err(|_| {
        Error::domain(format!(
            "draw (β_Y={}, α_Y={}, γ_Y={}, λ={lambda}) puts the 1/{p} level {level_y} outside the Box-Cox range",
            y.location, y.scale, y.shape
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnLevelSummary {
    /// `1/p`, in blocks.
    pub return_period: f64,
    pub posterior_median: f64,
    pub credible_interval: (f64, f64),
    pub predictive_level: Option<f64>,
}

/// Y-scale block-maximum laws and `λ` per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorLevels {
    laws: Vec<(GevParams, f64)>,
    threshold: Option<f64>,
}

impl PosteriorLevels {
    /// Exceedance draws are re-referenced to `n_blocks` blocks when given, so
    /// return periods count those blocks.
    pub fn from_draws(draws: &PosteriorDraws, n_blocks: Option<f64>) -> Result<Self> {
        let y = draws.y_params_for_blocks(n_blocks)?;
        let laws = y.into_iter().zip(draws.column(3)).collect();
        Ok(Self { laws, threshold: draws.kind().threshold() })
    }

    /// Block-maximum laws given directly as `(GEV_Y, λ)` pairs.
    pub fn new(laws: Vec<(GevParams, f64)>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::usage("posterior needs at least one draw"));
        }
        Ok(Self { laws, threshold: None })
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn per_draw(&self, p: f64) -> Result<Vec<f64>> {
        self.laws.iter().map(|(y, l)| return_level(y, *l, p)).collect()
    }

    /// Median and central `level` interval of the per-draw levels.
    pub fn summary(&self, p: f64, level: f64) -> Result<ReturnLevelSummary> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::usage(format!("credible level must lie in (0, 1), got {level}")));
        }
        let v = sorted(&self.per_draw(p)?);
        let tail = 0.5 * (1.0 - level);
        Ok(ReturnLevelSummary {
            return_period: 1.0 / p,
            posterior_median: quantile_sorted(&v, 0.5),
            credible_interval: (quantile_sorted(&v, tail), quantile_sorted(&v, 1.0 - tail)),
            predictive_level: None,
        })
    }

    /// Posterior-averaged exceedance probability of `x`.
    pub fn predictive_sf(&self, x: f64) -> f64 {
        self.laws.iter().map(|(y, l)| y.sf(boxcox_unchecked(x, *l))).sum::<f64>() / self.laws.len() as f64
    }

    /// Solves `predictive_sf(x) = p` by bisection to relative tolerance `tol`.
    pub fn predictive(&self, p: f64, tol: f64) -> Result<f64> {
        let levels = self.per_draw(p)?;
        let (min, max) = levels.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let g = |x: f64| self.predictive_sf(x) - p;
        let (mut lo, mut hi) = (min, max);
        let mut attempt = 0;
        while !(g(lo) >= 0.0 && g(hi) <= 0.0) {
            if attempt == MAX_EXPANSIONS {
                return Err(Error::numerical(format!(
                    "predictive level for p={p} not bracketed within [{lo}, {hi}]"
                )));
            }
            lo /= EXPANSION_FACTOR;
            hi *= EXPANSION_FACTOR;
            attempt += 1;
        }
        let (mut g_lo, mut g_hi) = (g(lo), g(hi));
        while hi - lo > tol * hi.abs() {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let g_mid = g(mid);
            if g_mid > g_lo || g_mid < g_hi {
                return Err(Error::numerical(format!("predictive exceedance probability not monotone near {mid}")));
            }
            if g_mid > 0.0 {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
                g_hi = g_mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Summaries with the predictive level, one per return period.
    pub fn table(&self, periods: &[f64], level: f64, tol: f64) -> Result<Vec<ReturnLevelSummary>> {
        periods
            .iter()
            .map(|&t| {
                if !(t > 1.0) {
                    return Err(Error::usage(format!("return period must exceed one block, got {t}")));
                }
                let mut s = self.summary(1.0 / t, level)?;
                s.predictive_level = Some(self.predictive(1.0 / t, tol)?);
                Ok(s)
            })
            .collect()
    }

    /// Per-draw quantile at probability `q`. Block maxima use the GEV;
    /// exceedances use the conditional law above the threshold implied by
    /// the intensity. Quantiles below the Box-Cox range map to zero.
    fn fitted_quantile(&self, y: &GevParams, lambda: f64, q: f64) -> f64 {
        let level_y = match self.threshold {
            None => y.quantile_from_neg_log(-q.ln()),
            Some(u) => {
                let u_y = boxcox_unchecked(u, lambda);
                let sigma_u = y.scale + y.shape * (u_y - y.location);
                let log_tail = -(1.0 - q).ln();
                if y.shape.abs() < crate::evd::GUMBEL_SWITCH {
                    u_y + sigma_u * log_tail
                } else {
                    u_y + sigma_u * (y.shape * log_tail).exp_m1() / y.shape
                }
            }
        };
        if lambda.abs() >= LAMBDA_LOG_SWITCH && lambda * level_y + 1.0 <= 0.0 {
            return if lambda > 0.0 { 0.0 } else { f64::INFINITY };
        }
        inverse_boxcox(level_y, lambda).unwrap_or(f64::NAN)
    }
}

pub fn posterior_return_levels(draws: &PosteriorDraws, p: f64, level: f64) -> Result<ReturnLevelSummary> {
    PosteriorLevels::from_draws(draws, None)?.summary(p, level)
}

pub fn predictive_return_level(draws: &PosteriorDraws, p: f64, tol: f64) -> Result<f64> {
    PosteriorLevels::from_draws(draws, None)?.predictive(p, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QqPoint {
    pub empirical: f64,
    pub fitted_median: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Pointwise posterior quantiles at plotting positions `i/(m+1)` against
/// the sorted data, with a central `level` band.
pub fn qq_data(draws: &PosteriorDraws, sorted_data: &[f64], level: f64) -> Result<Vec<QqPoint>> {
    if sorted_data.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::usage("QQ data must be sorted ascending"));
    }
    let set = PosteriorLevels::from_draws(draws, None)?;
    if let ModelKind::ThresholdExceedances { threshold, .. } = draws.kind() {
        if sorted_data.first().is_some_and(|&x| x <= *threshold) {
            return Err(Error::usage("QQ data for an exceedance model must lie above the threshold"));
        }
    }
    let m = sorted_data.len() as f64;
    let tail = 0.5 * (1.0 - level);
    Ok(sorted_data
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let q = (i as f64 + 1.0) / (m + 1.0);
            let v = sorted(&set.laws.iter().map(|(y, l)| set.fitted_quantile(y, *l, q)).collect::<Vec<_>>());
            QqPoint {
                empirical: x,
                fitted_median: quantile_sorted(&v, 0.5),
                lo: quantile_sorted(&v, tail),
                hi: quantile_sorted(&v, 1.0 - tail),
            }
        })
        .collect())
}

pub fn write_return_levels_csv<W: std::io::Write>(rows: &[ReturnLevelSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "median", "lo", "hi", "predictive"])?;
    for r in rows {
        let pred = r.predictive_level.map_or(String::new(), |v| v.to_string());
        w.write_record([
            r.return_period.to_string(),
            r.posterior_median.to_string(),
            r.credible_interval.0.to_string(),
            r.credible_interval.1.to_string(),
            pred,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_qq_csv<W: std::io::Write>(rows: &[QqPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["empirical", "fitted_median", "lo", "hi"])?;
    for r in rows {
        w.write_record([r.empirical, r.fitted_median, r.lo, r.hi].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
