//! Component-wise Metropolis-Hastings for `{β_X, log α_X, γ_X, λ}`.

mod chain;
mod diagnostics;
mod draws;

pub use chain::{run_mcmc, PriorSpec, SamplerConfig, DEFAULT_PRIOR_VARIANCE, TARGET_ACCEPTANCE};
pub use diagnostics::{chain_diagnostics, effective_sample_size, ChainSummary, ComponentSummary};
pub use draws::{posterior_for_original_params, read_draws_csv, write_draws_csv, PosteriorDraws, COMPONENT_NAMES};
