//! `evscale`: extreme value inference with an estimated Box-Cox scale.
//!
//! Settings come from built-in defaults, then a TOML file given by
//! `--config`, then command-line flags; later sources win. Every run writes
//! the resolved settings to `<out>/manifest.toml`, which `--config` accepts
//! to repeat the run.

mod commands;
mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Design, KindName, RuleName, RunConfig};
use evscale::Error;

#[derive(Parser)]
#[command(name = "evscale", version, about = "Extreme value inference with an estimated Box-Cox measurement scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML configuration file (a manifest.toml from an earlier run works).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; must not hold any input.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run seed; stage seeds derive from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write SVG figures.
    #[arg(long, global = true)]
    svg: bool,
    /// Log progress (RUST_LOG overrides).
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a design.
    ///
    /// pp writes exceedances.csv (time,value), block_maxima.csv, largest.csv
    /// and low_threshold.csv; truncated-normal writes series.csv and
    /// block_maxima.csv; gev writes series.csv. Series files have one
    /// `value` column and a `.meta.toml` sidecar.
    Simulate(SimulateArgs),
    /// Three-parameter maximum likelihood fit. Writes fit3.toml.
    Fit3(InputArgs),
    /// Profile likelihood grid and shape slope c.
    ///
    /// Writes fit3.toml, profile_grid.csv (gamma,lambda,loglik,converged)
    /// and slope.toml.
    Profile {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Four-parameter MCMC at a fixed c.
    ///
    /// Needs --c or --profile-dir. Writes draws.csv, diagnostics.csv and
    /// posterior.toml; see FORMATS.md for their columns.
    Fit4 {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Posterior and predictive return levels from a fit4 run.
    ///
    /// Writes return_levels.csv (period,median,lo,hi,predictive) with
    /// periods in user units.
    Returns(ReturnsArgs),
    /// Posterior QQ table from a fit4 run and its data.
    ///
    /// Writes qq.csv (empirical,fitted_median,lo,hi).
    Qq {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        returns: ReturnsArgs,
    },
    /// Norming constants, penultimate shapes, λ*_n and convergence gaps.
    ///
    /// Families and parameters: truncated-normal; exponential RATE;
    /// pareto ALPHA; weibull SHAPE SCALE; gamma SHAPE RATE; power-tail ALPHA
    /// BETA C D; bounded-tail ALPHA BETA C D UPPER; hazard-power ALPHA C;
    /// log-pareto BETA GAMMA U; gev LOCATION SCALE SHAPE; gpd SCALE SHAPE.
    /// Writes asymptotics.csv, one row per block size.
    Asymptotics(AsymptoticsArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Headered CSV input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Column name (default `value`).
    #[arg(long)]
    column: Option<String>,
    /// Zero-based column position; overrides --column.
    #[arg(long)]
    column_index: Option<usize>,
    #[arg(long, value_enum)]
    kind: Option<KindName>,
    /// Take maxima of blocks of this length first.
    #[arg(long)]
    block_maxima_of: Option<usize>,
    /// Fixed threshold for point-process input.
    #[arg(long)]
    threshold: Option<f64>,
    /// Threshold at this empirical quantile (type 7).
    #[arg(long)]
    threshold_quantile: Option<f64>,
    /// Keep the largest K points.
    #[arg(long, value_name = "K")]
    largest: Option<usize>,
    /// Block count of the observation period.
    #[arg(long)]
    n_blocks: Option<f64>,
    /// Runs declustering: a cluster ends after this many sub-threshold values.
    #[arg(long)]
    decluster_gap: Option<usize>,
}

#[derive(Args)]
struct GridArgs {
    /// Grid points along the shape axis.
    #[arg(long)]
    n_gamma: Option<usize>,
    /// Grid points along the λ axis.
    #[arg(long)]
    n_lambda: Option<usize>,
    /// Shape axis bounds (both or neither; default from the fit3 standard error).
    #[arg(long, allow_hyphen_values = true)]
    gamma_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma_max: Option<f64>,
    /// Half-width of the default shape axis in fit3 standard errors.
    #[arg(long)]
    se_multiplier: Option<f64>,
    /// λ axis bounds.
    #[arg(long, allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max: Option<f64>,
}

#[derive(Args)]
struct SamplerArgs {
    /// Iterations kept after burn-in.
    #[arg(long)]
    iterations: Option<usize>,
    /// Iterations discarded first.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Uniform λ prior bounds; equal bounds pin λ.
    #[arg(long, allow_hyphen_values = true)]
    prior_lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    prior_lambda_max: Option<f64>,
    /// Variance of the Gaussian priors on location, log scale and shape.
    #[arg(long)]
    prior_variance: Option<f64>,
    /// Shape slope c.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Output directory of a profile run supplying c.
    #[arg(long)]
    profile_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReturnsArgs {
    /// Output directory of a fit4 run.
    #[arg(long)]
    draws_dir: Option<PathBuf>,
    /// Comma-separated return periods in user units.
    #[arg(long, value_delimiter = ',')]
    periods: Option<Vec<f64>>,
    /// Blocks per user unit.
    #[arg(long)]
    blocks_per_unit: Option<f64>,
    /// Credible interval / QQ band level.
    #[arg(long)]
    level: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Design to simulate (default pp).
    #[arg(long, value_enum)]
    design: Option<Design>,
    /// GEV location (per block for pp).
    #[arg(long, allow_hyphen_values = true)]
    location: Option<f64>,
    /// GEV scale.
    #[arg(long)]
    scale: Option<f64>,
    /// GEV shape.
    #[arg(long, allow_hyphen_values = true)]
    shape: Option<f64>,
    /// Number of blocks in the pp observation period.
    #[arg(long)]
    n_blocks: Option<f64>,
    /// Expected number of points above the simulation threshold.
    #[arg(long)]
    total_intensity: Option<f64>,
    /// Use the expected point count instead of a Poisson draw.
    #[arg(long)]
    fixed_count: bool,
    /// Sample size for the truncated-normal and gev designs.
    #[arg(long)]
    n: Option<usize>,
    /// Block length for the truncated-normal maxima.
    #[arg(long)]
    block_length: Option<usize>,
    /// Square the simulated values.
    #[arg(long)]
    square: bool,
    /// Size of the largest-K subset.
    #[arg(long)]
    largest: Option<usize>,
}

#[derive(Args)]
struct AsymptoticsArgs {
    /// Parent family (default truncated-normal).
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated family parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    /// Comma-separated block sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Box-Cox λ for the transformed columns (default: the family's limiting λ*, else 1).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Exact hazard derivatives or the series expansion.
    #[arg(long, value_enum)]
    rule: Option<RuleName>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($field:ident),+) => {
        $(if let Some(v) = $src.$field.clone() { $dst.$field = v.into(); })+
    };
}

impl InputArgs {
    fn apply(&self, c: &mut RunConfig) {
        let i = &mut c.input;
        if let Some(p) = &self.input {
            i.path = Some(p.clone());
        }
        overlay!(i, self, column, kind);
        for (dst, src) in [(&mut i.column_index, self.column_index), (&mut i.block_maxima_of, self.block_maxima_of)] {
            if src.is_some() {
                *dst = src;
            }
        }
        if self.threshold.is_some() || self.threshold_quantile.is_some() || self.largest.is_some() {
            i.threshold = self.threshold;
            i.threshold_quantile = self.threshold_quantile;
            i.largest = self.largest;
        }
        if self.n_blocks.is_some() {
            i.n_blocks = self.n_blocks;
        }
        if self.decluster_gap.is_some() {
            i.decluster_gap = self.decluster_gap;
        }
    }
}

impl GridArgs {
    fn apply(&self, c: &mut RunConfig) {
        let g = &mut c.grid;
        overlay!(g, self, n_gamma, n_lambda, se_multiplier, lambda_min, lambda_max);
        if self.gamma_min.is_some() {
            g.gamma_min = self.gamma_min;
        }
        if self.gamma_max.is_some() {
            g.gamma_max = self.gamma_max;
        }
    }
}

impl SamplerArgs {
    fn apply(&self, c: &mut RunConfig) {
        let s = &mut c.sampler;
        overlay!(s, self, iterations, burn_in, prior_lambda_min, prior_lambda_max, prior_variance);
        if self.c.is_some() {
            s.c = self.c;
        }
        if self.profile_dir.is_some() {
            s.profile_dir = self.profile_dir.clone();
        }
    }
}

impl ReturnsArgs {
    fn apply(&self, c: &mut RunConfig) {
        let r = &mut c.returns;
        overlay!(r, self, periods, blocks_per_unit, level);
        if self.draws_dir.is_some() {
            r.draws_dir = self.draws_dir.clone();
        }
    }
}

impl SimulateArgs {
    fn apply(&self, c: &mut RunConfig) {
        let s = &mut c.simulate;
        overlay!(s, self, design, location, scale, shape, n_blocks, total_intensity, n, block_length, largest);
        s.fixed_count |= self.fixed_count;
        s.square |= self.square;
    }
}

impl AsymptoticsArgs {
    fn apply(&self, c: &mut RunConfig) {
        let a = &mut c.asymptotics;
        overlay!(a, self, family, params, n, rule);
        if self.lambda.is_some() {
            a.lambda = self.lambda;
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::Io(_) => 2,
        Error::Numerical(_) | Error::NonConvergence { .. } => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &g.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    cfg.svg |= g.svg;

    let name = match &cli.command {
        Command::Simulate(a) => {
            a.apply(&mut cfg);
            "simulate"
        }
        Command::Fit3(i) => {
            i.apply(&mut cfg);
            "fit3"
        }
        Command::Profile { input, grid } => {
            input.apply(&mut cfg);
            grid.apply(&mut cfg);
            "profile"
        }
        Command::Fit4 { input, sampler } => {
            input.apply(&mut cfg);
            sampler.apply(&mut cfg);
            "fit4"
        }
        Command::Returns(r) => {
            r.apply(&mut cfg);
            "returns"
        }
        Command::Qq { input, returns } => {
            input.apply(&mut cfg);
            returns.apply(&mut cfg);
            "qq"
        }
        Command::Asymptotics(a) => {
            a.apply(&mut cfg);
            "asymptotics"
        }
    };
    let inputs = [
        cfg.input.path.clone().filter(|_| name != "simulate" && name != "asymptotics" && name != "returns"),
        cfg.sampler.profile_dir.clone().filter(|_| name == "fit4"),
        cfg.returns.draws_dir.clone().filter(|_| name == "returns" || name == "qq"),
    ];
    let refs: Vec<Option<&std::path::Path>> = inputs.iter().map(|p| p.as_deref()).collect();
    let out = commands::start_run(&mut cfg, name, &refs)?;
    match name {
        "simulate" => commands::simulate(&cfg, &out),
        "fit3" => commands::fit3(&cfg, &out),
        "profile" => commands::profile(&cfg, &out),
        "fit4" => commands::fit4(&cfg, &out),
        "returns" => commands::returns(&cfg, &out),
        "qq" => commands::qq(&cfg, &out),
        _ => commands::asymptotics(&cfg, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.global.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("evscale: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
