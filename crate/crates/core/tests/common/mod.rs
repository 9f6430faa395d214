#![allow(dead_code)]

use evscale::evd::ModelKind;
use evscale::profile::{build_grid, estimate_c, fit3_mle, GridSpec};
use evscale::sampler::{run_mcmc, PosteriorDraws, PriorSpec, SamplerConfig};

pub struct PipelineRun {
    pub c: f64,
    pub draws: PosteriorDraws,
}

/// The exceedance kind the sampler works with: the block count is set to the
/// number of points.
pub fn working_kind(data: &[f64], kind: &ModelKind) -> ModelKind {
    kind.with_n_blocks(data.len() as f64)
}

/// fit3 → profile grid → c → four-parameter chain.
pub fn four_param(data: &[f64], kind: &ModelKind, lambda_range: (f64, f64), seed: u64) -> PipelineRun {
    let kind = working_kind(data, kind);
    let fit = fit3_mle(data, &kind).expect("three-parameter fit");
    let grid = build_grid(data, &kind, &fit, &GridSpec::default()).expect("profile grid");
    let c = estimate_c(&grid).expect("slope");
    let priors = PriorSpec::from_fit3(&fit, lambda_range).unwrap();
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    let draws = run_mcmc(data, &kind, c, &priors, &cfg).expect("chain");
    PipelineRun { c, draws }
}

/// The same chain with λ pinned at 1, i.e. the three-parameter model.
pub fn three_param(data: &[f64], kind: &ModelKind, seed: u64) -> PosteriorDraws {
    let kind = working_kind(data, kind);
    let fit = fit3_mle(data, &kind).expect("three-parameter fit");
    let priors = PriorSpec::from_fit3(&fit, (1.0, 1.0)).unwrap();
    let cfg = SamplerConfig { seed, ..SamplerConfig::default() };
    run_mcmc(data, &kind, 0.0, &priors, &cfg).expect("chain")
}

pub fn iqr(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    evscale::numeric::quantile_sorted(&s, 0.75) - evscale::numeric::quantile_sorted(&s, 0.25)
}
