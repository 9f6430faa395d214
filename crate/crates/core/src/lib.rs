//! Univariate extreme value inference with a Box-Cox transformation
//! parameter λ treated as unknown.
//!
//! The crate covers the four-parameter GEV and point-process models, the
//! norming-constant reparameterization `{β_X, log α_X, γ_X, λ}`, profile
//! likelihood estimation of the shape slope `c`, a component-wise
//! Metropolis-Hastings sampler, return-level summaries and the asymptotic
//! calculus (penultimate shapes, optimal λ, convergence gaps) for a family
//! of parent distributions.

pub mod asymptotics;
pub mod data;
pub mod error;
pub mod evd;
pub mod numeric;
pub mod optim;
pub mod profile;
pub mod returns;
pub mod sampler;

pub use error::{Error, Result};
