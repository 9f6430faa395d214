//! Distributions, transforms and likelihoods for the three- and
//! four-parameter extreme value models.

mod boxcox;
mod gev;
mod model;
mod pp;

pub use boxcox::{boxcox, inverse_boxcox, LAMBDA_LOG_SWITCH};
pub(crate) use boxcox::boxcox_unchecked;
pub use gev::{gev_cdf, gev_logpdf, gev_quantile, loglik_gev3, GevParams, GUMBEL_SWITCH};
pub use model::{loglik3, loglik4, to_y_params, ModelKind, ScaledData, TransformedModel};
pub(crate) use model::{loglik3_unchecked, validate_data};
pub use pp::{convert_pp_nblocks, loglik_pp3, PpParams};
