//! Frequentist groundwork for the four-parameter model: three-parameter
//! fits, the `(γ_Y, λ)` profile likelihood and the ridge slope `c`.

mod fit3;
mod grid;
mod slope;

pub use fit3::{fit3_mle, Fit3Result, MIN_FIT_POINTS};
pub use grid::{build_grid, profile_loglik, GridSpec, ProfileGrid, ProfilePoint, Profiler};
pub use slope::{estimate_c, estimate_c_detailed, read_grid_csv, write_grid_csv, SlopeFit};
