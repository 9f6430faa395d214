//! Return levels per draw, posterior and posterior-predictive summaries,
//! and QQ diagnostics.

mod levels;
mod svg;

pub use levels::{
    posterior_return_levels, predictive_return_level, qq_data, return_level, write_qq_csv,
    write_return_levels_csv, PosteriorLevels, QqPoint, ReturnLevelSummary, EXPANSION_FACTOR,
    MAX_EXPANSIONS,
};
pub use svg::{qq_svg, return_level_svg};
