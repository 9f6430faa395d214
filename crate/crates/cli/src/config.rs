//! Run configuration: defaults, overlaid by a TOML file, overlaid by flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use evscale::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum KindName {
    /// Block maxima, GEV likelihood.
    #[default]
    Gev,
    /// Threshold exceedances, point-process likelihood.
    Pp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Design {
    /// Point process with block-maxima, largest-k and low-threshold subsets.
    #[default]
    Pp,
    /// `2Φ(x) - 1` draws and their block maxima.
    TruncatedNormal,
    /// GEV draws.
    Gev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    /// Exact reciprocal hazard.
    #[default]
    Exact,
    /// Truncated Mills-ratio expansion (truncated normal only).
    Expansion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Subcommand that wrote this file; informational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Tool version that wrote this file; informational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub input: InputConfig,
    pub simulate: SimulateConfig,
    pub grid: GridConfig,
    pub sampler: SamplerSection,
    pub returns: ReturnsConfig,
    pub asymptotics: AsymptoticsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            version: None,
            seed: 1,
            out: None,
            svg: false,
            input: InputConfig::default(),
            simulate: SimulateConfig::default(),
            grid: GridConfig::default(),
            sampler: SamplerSection::default(),
            returns: ReturnsConfig::default(),
            asymptotics: AsymptoticsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub column: String,
    /// Zero-based column position; overrides `column`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_index: Option<usize>,
    pub kind: KindName,
    /// Reduce the series to maxima of blocks of this length first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_maxima_of: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_quantile: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub largest: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_blocks: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decluster_gap: Option<usize>,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            path: None,
            column: "value".into(),
            column_index: None,
            kind: KindName::Gev,
            block_maxima_of: None,
            threshold: None,
            threshold_quantile: None,
            largest: None,
            n_blocks: None,
            decluster_gap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub design: Design,
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    pub n_blocks: f64,
    pub total_intensity: f64,
    pub fixed_count: bool,
    /// Sample size for the truncated-normal and GEV designs.
    pub n: usize,
    pub block_length: usize,
    /// Square every simulated value.
    pub square: bool,
    pub largest: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            design: Design::Pp,
            location: 15.0,
            scale: 1.5,
            shape: -0.25,
            n_blocks: 1000.0,
            total_intensity: 100_000.0,
            fixed_count: false,
            n: 100_000,
            block_length: 100,
            square: false,
            largest: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_gamma: usize,
    pub n_lambda: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<f64>,
    pub se_multiplier: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub max_widenings: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = evscale::profile::GridSpec::default();
        Self {
            n_gamma: g.n_gamma,
            n_lambda: g.n_lambda,
            gamma_min: None,
            gamma_max: None,
            se_multiplier: g.se_multiplier,
            lambda_min: g.lambda_range.0,
            lambda_max: g.lambda_range.1,
            max_widenings: g.max_widenings,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSection {
    pub iterations: usize,
    pub burn_in: usize,
    pub prior_lambda_min: f64,
    pub prior_lambda_max: f64,
    pub prior_variance: f64,
    pub adapt: bool,
    /// Shape slope; alternatively read from `profile_dir`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_dir: Option<PathBuf>,
}

impl Default for SamplerSection {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            burn_in: 1_000,
            prior_lambda_min: -1.0,
            prior_lambda_max: 4.0,
            prior_variance: evscale::sampler::DEFAULT_PRIOR_VARIANCE,
            adapt: true,
            c: None,
            profile_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReturnsConfig {
    /// Output directory of a `fit4` run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws_dir: Option<PathBuf>,
    /// Return periods in user units.
    pub periods: Vec<f64>,
    /// Blocks per user unit.
    pub blocks_per_unit: f64,
    pub level: f64,
    pub tolerance: f64,
}

impl Default for ReturnsConfig {
    fn default() -> Self {
        Self {
            draws_dir: None,
            periods: vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            blocks_per_unit: 1.0,
            level: 0.95,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticsConfig {
    pub family: String,
    /// Family parameters in the order listed by `--help`.
    pub params: Vec<f64>,
    pub n: Vec<u64>,
    /// Transformation for the Y-scale columns; defaults to the limiting
    /// optimum of the family, else 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub rule: RuleName,
    pub expansion_terms: usize,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self {
            family: "truncated-normal".into(),
            params: Vec::new(),
            n: vec![10, 100, 1_000, 10_000, 100_000, 1_000_000],
            lambda: None,
            rule: RuleName::Exact,
            expansion_terms: evscale::asymptotics::MILLS_EXPANSION_TERMS,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, Error> {
        toml::to_string(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn out_dir(&self) -> Result<&Path, Error> {
        self.out.as_deref().ok_or_else(|| Error::Usage("no output directory; pass --out or set `out`".into()))
    }

    pub fn grid_spec(&self) -> evscale::profile::GridSpec {
        let g = &self.grid;
        evscale::profile::GridSpec {
            n_gamma: g.n_gamma,
            n_lambda: g.n_lambda,
            gamma_range: g.gamma_min.zip(g.gamma_max),
            se_multiplier: g.se_multiplier,
            lambda_range: (g.lambda_min, g.lambda_max),
            max_widenings: g.max_widenings,
        }
    }

    /// Checks that do not need any input file.
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Usage(m));
        // TOML integers are signed 64-bit, and the manifest must read back
        if self.seed > i64::MAX as u64 {
            return bad(format!("seed {} exceeds {}", self.seed, i64::MAX));
        }
        let g = &self.grid;
        if g.gamma_min.is_some() != g.gamma_max.is_some() {
            return bad("grid.gamma_min and grid.gamma_max must be given together".into());
        }
        if let (Some(lo), Some(hi)) = (g.gamma_min, g.gamma_max) {
            if !(lo < hi) {
                return bad(format!("empty γ range [{lo}, {hi}]"));
            }
        }
        if !(g.lambda_min < g.lambda_max) || g.n_gamma < 2 || g.n_lambda < 2 {
            return bad("grid needs at least 2×2 cells and lambda_min < lambda_max".into());
        }
        let s = &self.sampler;
        if !(s.prior_lambda_min <= s.prior_lambda_max) {
            return bad(format!("empty λ prior range [{}, {}]", s.prior_lambda_min, s.prior_lambda_max));
        }
        if s.iterations == 0 {
            return bad("sampler.iterations must be positive".into());
        }
        if !(s.prior_variance > 0.0) {
            return bad("sampler.prior_variance must be positive".into());
        }
        let r = &self.returns;
        if r.periods.iter().any(|&t| !(t * r.blocks_per_unit > 1.0)) {
            return bad("every return period must exceed one block".into());
        }
        if !(r.level > 0.0 && r.level < 1.0) || !(r.tolerance > 0.0) {
            return bad("returns.level must lie in (0, 1) and returns.tolerance must be positive".into());
        }
        let i = &self.input;
        if let Some(q) = i.threshold_quantile {
            if !(q > 0.0 && q < 1.0) {
                return bad(format!("input.threshold_quantile must lie in (0, 1), got {q}"));
            }
        }
        let selectors = [i.threshold.is_some(), i.threshold_quantile.is_some(), i.largest.is_some()];
        if selectors.iter().filter(|&&b| b).count() > 1 {
            return bad("give at most one of input.threshold, input.threshold_quantile, input.largest".into());
        }
        if i.decluster_gap.is_some() && i.largest.is_some() {
            return bad("declustering needs a threshold or threshold quantile, not input.largest".into());
        }
        if self.asymptotics.n.iter().any(|&n| n < 2) {
            return bad("asymptotics.n values must be at least 2".into());
        }
        Ok(())
    }
}
