//! Parent-distribution calculus for maxima: norming constants, penultimate
//! and limiting shapes under Box-Cox transformation, optimal `λ*_n` and
//! convergence-gap diagnostics.

mod mills;
mod norming;
mod parent;
mod rates;

pub use mills::{mills_deriv_expansion, mills_over_x_expansion, mills_ratio, MILLS_EXPANSION_TERMS};
pub use norming::{
    lambda_star_n, lambda_star_n_with, limiting_shape_y, norming_constants, penultimate_shape_y,
    table1_lambda_star, transform_norming, HazardRule, LambdaStar, Level, LimitShape, NormingTriple,
    TransformedParent,
};
pub use parent::{Family, ParentDistribution};
pub use rates::{convergence_gap, convergence_gap_with_norming, default_gap_grid, simulate_normalized_maxima};
