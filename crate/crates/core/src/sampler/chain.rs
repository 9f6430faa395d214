//! The sampler proper.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::evd::{validate_data, ModelKind, ScaledData, TransformedModel};
use crate::profile::{Fit3Result, Profiler};

use super::draws::PosteriorDraws;

pub const DEFAULT_PRIOR_VARIANCE: f64 = 10_000.0;
/// Per-component acceptance rate the burn-in adaptation aims for.
pub const TARGET_ACCEPTANCE: f64 = 0.44;
const ADAPT_BATCH: usize = 50;

/// Independent Gaussian priors on `(β_X, log α_X, γ_X)` and a uniform prior
/// on `λ`. A degenerate range `lo == hi` pins `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub gaussian_center: [f64; 3],
    pub gaussian_variance: f64,
    pub lambda_range: (f64, f64),
}

impl PriorSpec {
    pub fn new(gaussian_center: [f64; 3], gaussian_variance: f64, lambda_range: (f64, f64)) -> Result<Self> {
        if !(gaussian_variance > 0.0) || !gaussian_variance.is_finite() {
            return Err(Error::usage(format!("prior variance must be positive, got {gaussian_variance}")));
        }
        let (lo, hi) = lambda_range;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::usage(format!("invalid λ prior range [{lo}, {hi}]")));
        }
        if gaussian_center.iter().any(|v| !v.is_finite()) {
            return Err(Error::usage("prior centre must be finite"));
        }
        Ok(Self { gaussian_center, gaussian_variance, lambda_range })
    }

    /// Centred on a three-parameter fit, which is the `λ = 1` member of the model.
    pub fn from_fit3(fit: &Fit3Result, lambda_range: (f64, f64)) -> Result<Self> {
        let p = fit.params;
        Self::new([p.location, p.scale.ln(), p.shape], DEFAULT_PRIOR_VARIANCE, lambda_range)
    }

    pub fn lambda_fixed(&self) -> bool {
        self.lambda_range.0 == self.lambda_range.1
    }

    fn log_density(&self, s: &[f64; 4]) -> f64 {
        let (lo, hi) = self.lambda_range;
        if s[3] < lo || s[3] > hi {
            return f64::NEG_INFINITY;
        }
        -(0..3).map(|k| (s[k] - self.gaussian_center[k]).powi(2)).sum::<f64>() / (2.0 * self.gaussian_variance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    /// Stored draws after burn-in.
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Random-walk standard deviations for `(β_X, log α_X, γ_X)`; derived
    /// from the starting state when absent.
    pub initial_steps: Option<[f64; 3]>,
    /// Tune the steps toward [`TARGET_ACCEPTANCE`] during burn-in.
    pub adapt: bool,
    /// Switch off to sample the prior restricted to the constraint set.
    pub use_likelihood: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { iterations: 10_000, burn_in: 1_000, seed: 1, initial_steps: None, adapt: true, use_likelihood: true }
    }
}

/// Metropolis-Hastings acceptance for a log ratio of target densities.
pub(crate) fn mh_accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    if log_ratio.is_nan() {
        return false;
    }
    let u: f64 = rng.random();
    u.ln() < log_ratio
}

struct Target<'a> {
    data: &'a [f64],
    kind: ModelKind,
    c: f64,
    priors: &'a PriorSpec,
    use_likelihood: bool,
}

impl Target<'_> {
    fn scaled(&self, lambda: f64) -> Option<ScaledData> {
        self.use_likelihood.then(|| ScaledData::new_unchecked(self.data, &self.kind, lambda))
    }

    fn log_lik(&self, scaled: Option<&ScaledData>, s: &[f64; 4]) -> f64 {
        let Ok(m) = TransformedModel::new(s[0], s[1], s[2], s[3], self.c) else {
            return f64::NEG_INFINITY;
        };
        match scaled {
            Some(sd) => sd.loglik4(&self.kind, &m),
            None if m.satisfies_constraints() => 0.0,
            None => f64::NEG_INFINITY,
        }
    }

    /// A feasible start: the prior centre at `λ0`, else a profile fit there.
    fn start(&self, lambda0: f64) -> Result<[f64; 4]> {
        let centre = self.priors.gaussian_center;
        let s = [centre[0], centre[1], centre[2], lambda0];
        if self.log_lik(self.scaled(lambda0).as_ref(), &s).is_finite() {
            return Ok(s);
        }
        let gamma_y = centre[2] + self.c * (lambda0 - 1.0);
        let point = Profiler::new(self.data, &self.kind, lambda0)?.profile(gamma_y, None);
        if let Some((beta_x, log_alpha_x)) = point.x_scale(lambda0).filter(|_| point.loglik.is_finite()) {
            let s = [beta_x, log_alpha_x, centre[2], lambda0];
            if self.log_lik(self.scaled(lambda0).as_ref(), &s).is_finite() {
                return Ok(s);
            }
        }
        Err(Error::numerical(format!(
            "no feasible starting state at λ = {lambda0}; check the λ prior range and c"
        )))
    }
}

/// Runs the chain and returns the post burn-in draws.
///
/// Exceedance models are sampled with the block count set to the number of
/// exceedances; the returned draws record that block count.
pub fn run_mcmc(data: &[f64], kind: &ModelKind, c: f64, priors: &PriorSpec, cfg: &SamplerConfig) -> Result<PosteriorDraws> {
    validate_data(data, kind)?;
    if cfg.iterations == 0 {
        return Err(Error::usage("the sampler needs at least one stored iteration"));
    }
    if !c.is_finite() {
        return Err(Error::usage(format!("slope c must be finite, got {c}")));
    }
    let kind = match kind {
        ModelKind::BlockMaxima => ModelKind::BlockMaxima,
        k => k.with_n_blocks(data.len() as f64),
    };
    let target = Target { data, kind, c, priors, use_likelihood: cfg.use_likelihood };
    let (lo, hi) = priors.lambda_range;
    let lambda0 = if (lo..=hi).contains(&1.0) { 1.0 } else { 0.5 * (lo + hi) };
    let mut state = target.start(lambda0)?;
    let mut scaled = target.scaled(state[3]);
    let mut log_lik = target.log_lik(scaled.as_ref(), &state);
    let mut log_prior = priors.log_density(&state);

    let mut steps = cfg.initial_steps.unwrap_or([0.1 * state[1].exp(), 0.1, 0.05]);
    if steps.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::usage(format!("random-walk steps must be positive, got {steps:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = cfg.burn_in + cfg.iterations;
    let mut accepted = [0usize; 4];
    let mut burn_accepted = [0usize; 4];
    let mut batch_accepted = [0usize; 3];
    let mut stored = Vec::with_capacity(cfg.iterations);
    let lambda_fixed = priors.lambda_fixed();

    for it in 0..total {
        if it == cfg.burn_in {
            burn_accepted = accepted;
            accepted = [0; 4];
        }
        for k in 0..3 {
            let mut prop = state;
            let z: f64 = rng.sample(StandardNormal);
            prop[k] += steps[k] * z;
            let lp = priors.log_density(&prop);
            let ll = target.log_lik(scaled.as_ref(), &prop);
            if mh_accept(ll + lp - log_lik - log_prior, &mut rng) {
                state = prop;
                log_lik = ll;
                log_prior = lp;
                accepted[k] += 1;
                batch_accepted[k] += 1;
            }
        }
        if !lambda_fixed {
            // independence proposal from the uniform prior: the ratio is the likelihood ratio
            let mut prop = state;
            prop[3] = rng.random_range(lo..=hi);
            let prop_scaled = target.scaled(prop[3]);
            let ll = target.log_lik(prop_scaled.as_ref(), &prop);
            if mh_accept(ll - log_lik, &mut rng) {
                state = prop;
                scaled = prop_scaled;
                log_lik = ll;
                log_prior = priors.log_density(&state);
                accepted[3] += 1;
            }
        }
        if cfg.adapt && it < cfg.burn_in && (it + 1) % ADAPT_BATCH == 0 {
            for k in 0..3 {
                let rate = batch_accepted[k] as f64 / ADAPT_BATCH as f64;
                steps[k] *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
            }
            debug!("iteration {}: steps {steps:?}, batch acceptance {batch_accepted:?}", it + 1);
            batch_accepted = [0; 3];
        }
        if it >= cfg.burn_in {
            stored.push(state);
        }
    }
    if cfg.burn_in > 0 {
        for (k, name) in ["beta_x", "log_alpha_x", "gamma_x", "lambda"].iter().enumerate() {
            if burn_accepted[k] == 0 && !(k == 3 && lambda_fixed) {
                return Err(Error::numerical(format!(
                    "no {name} proposal was accepted during burn-in; revise the step scales or the λ range"
                )));
            }
        }
    }
    let n = cfg.iterations as f64;
    let mut acceptance = accepted.map(|a| a as f64 / n);
    if lambda_fixed {
        acceptance[3] = f64::NAN;
    }
    info!("sampler finished: acceptance {acceptance:?}, final steps {steps:?}");
    PosteriorDraws::new(stored, c, kind, acceptance)
}
