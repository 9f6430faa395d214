use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use evscale::asymptotics::{
    convergence_gap, default_gap_grid, lambda_star_n_with, norming_constants, table1_lambda_star, transform_norming,
    Family, HazardRule, Level, ParentDistribution,
};
use evscale::data::{
    block_maxima, simulate_gev, simulate_pp, simulate_truncated_normal, write_series, write_sidecar, PointCount,
    SeriesMeta,
};
use evscale::evd::{convert_pp_nblocks, GevParams, ModelKind, PpParams};
use evscale::profile::{build_grid, estimate_c_detailed, fit3_mle, write_grid_csv, Fit3Result};
use evscale::returns::{qq_data, qq_svg, return_level_svg, write_qq_csv, write_return_levels_csv, PosteriorLevels};
use evscale::sampler::{
    chain_diagnostics, read_draws_csv, run_mcmc, write_draws_csv, PosteriorDraws, PriorSpec, SamplerConfig,
};
use evscale::Error;

use crate::config::{Design, KindName, RuleName, RunConfig};
use crate::input::{prepare, Prepared};

const STAGE_SIMULATE: u64 = 1;
const STAGE_SAMPLER: u64 = 2;

/// Seed for one stage, drawn from its own stream of the run seed.
fn sub_seed(seed: u64, stage: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage);
    rng.next_u64()
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_toml<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Error> {
    let text = toml::to_string(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join(name), text)?;
    Ok(())
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
}

/// Refuses an output directory that holds one of the inputs.
fn ensure_distinct(out: &Path, inputs: &[Option<&Path>]) -> Result<(), Error> {
    let out = fs::canonicalize(out)?;
    for p in inputs.iter().flatten() {
        let dir = if p.is_dir() { p.to_path_buf() } else { p.parent().map(Path::to_path_buf).unwrap_or_default() };
        let dir = if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir };
        if fs::canonicalize(&dir).is_ok_and(|d| d == out) {
            return Err(Error::Usage(format!(
                "output directory {} also holds input {}; choose a separate --out",
                out.display(),
                p.display()
            )));
        }
    }
    Ok(())
}

/// Creates the output directory and records the resolved configuration.
pub fn start_run(cfg: &mut RunConfig, command: &str, inputs: &[Option<&Path>]) -> Result<PathBuf, Error> {
    cfg.validate()?;
    let out = cfg.out_dir()?.to_path_buf();
    fs::create_dir_all(&out)?;
    ensure_distinct(&out, inputs)?;
    cfg.command = Some(command.to_string());
    cfg.version = Some(env!("CARGO_PKG_VERSION").to_string());
    let text = format!("# rerun with: evscale {command} --config <this file>\n{}", cfg.to_toml()?);
    fs::write(out.join("manifest.toml"), text)?;
    Ok(out)
}

fn kind_name(kind: &ModelKind) -> KindName {
    if kind.is_block_maxima() { KindName::Gev } else { KindName::Pp }
}

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let s = &cfg.simulate;
    let seed = sub_seed(cfg.seed, STAGE_SIMULATE);
    let square = |v: Vec<f64>| if s.square { v.into_iter().map(|x| x * x).collect() } else { v };
    match s.design {
        Design::Pp => {
            let p = PpParams::new(s.location, s.scale, s.shape, s.n_blocks)?;
            let count = if s.fixed_count { PointCount::Fixed } else { PointCount::Poisson };
            let sim = simulate_pp(&p, s.total_intensity, count, seed)?;
            let set1 = sim.time_block_maxima()?;
            let min_max = set1.iter().copied().fold(f64::INFINITY, f64::min);
            let sim = if s.square { sim.map_increasing(|x| x * x)? } else { sim };
            let u3 = if s.square { min_max * min_max } else { min_max };
            let set2 = sim.retain_largest(s.largest.min(sim.len()))?;
            let set3 = sim.above(u3)?;

            let mut w = csv::Writer::from_path(out.join("exceedances.csv"))?;
            w.write_record(["time", "value"])?;
            for (t, x) in sim.times.as_deref().unwrap_or_default().iter().zip(&sim.exceedances) {
                w.write_record([t.to_string(), x.to_string()])?;
            }
            w.flush()?;
            let side = |u: f64| SeriesMeta { threshold: Some(u), n_blocks: Some(s.n_blocks), ..SeriesMeta::default() };
            write_sidecar(&out.join("exceedances.csv"), &side(sim.threshold))?;
            let maxima = evscale::data::Series::new(square(set1))?;
            write_series(&out.join("block_maxima.csv"), &maxima)?;
            for (name, set) in [("largest.csv", &set2), ("low_threshold.csv", &set3)] {
                let series = evscale::data::Series::new(set.exceedances.clone())?;
                write_series(&out.join(name), &series)?;
                write_sidecar(&out.join(name), &side(set.threshold))?;
            }
            info!(
                "{} points above {}; {} block maxima; {} in the largest set; {} above the smallest block maximum",
                sim.len(),
                sim.threshold,
                maxima.len(),
                set2.len(),
                set3.len()
            );
        }
        Design::TruncatedNormal => {
            let raw = simulate_truncated_normal(s.n, seed)?;
            let raw = evscale::data::Series { values: square(raw.values), ..raw }.with_block_length(s.block_length)?;
            write_series(&out.join("series.csv"), &raw)?;
            write_series(&out.join("block_maxima.csv"), &block_maxima(&raw, s.block_length)?)?;
        }
        Design::Gev => {
            let g = GevParams::new(s.location, s.scale, s.shape)?;
            let raw = simulate_gev(&g, s.n, seed)?;
            write_series(&out.join("series.csv"), &evscale::data::Series::new(square(raw.values))?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct Fit3File {
    kind: KindName,
    n_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    /// Block count the parameters refer to (the point count for exceedances).
    #[serde(skip_serializing_if = "Option::is_none")]
    n_blocks: Option<f64>,
    location: f64,
    scale: f64,
    shape: f64,
    se_location: f64,
    se_scale: f64,
    se_shape: f64,
    loglik: f64,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<ReferenceParams>,
}

/// Exceedance-model parameters re-expressed for the input block count.
#[derive(Debug, Serialize, Deserialize)]
struct ReferenceParams {
    n_blocks: f64,
    location: f64,
    scale: f64,
    shape: f64,
}

fn fit3_file(p: &Prepared, fit: &Fit3Result) -> Result<Fit3File, Error> {
    let working = p.working_kind();
    let reference = match (working, p.reference_n_blocks()) {
        (ModelKind::ThresholdExceedances { n_blocks, .. }, Some(to)) => {
            let r = convert_pp_nblocks(&PpParams::from_gev(&fit.params, n_blocks)?, to)?;
            Some(ReferenceParams { n_blocks: to, location: r.location, scale: r.scale, shape: r.shape })
        }
        _ => None,
    };
    let [se_location, se_scale, se_shape] = fit.approx_std_errors;
    Ok(Fit3File {
        kind: kind_name(&working),
        n_points: p.data.len(),
        threshold: working.threshold(),
        n_blocks: match working {
            ModelKind::ThresholdExceedances { n_blocks, .. } => Some(n_blocks),
            ModelKind::BlockMaxima => None,
        },
        location: fit.params.location,
        scale: fit.params.scale,
        shape: fit.params.shape,
        se_location,
        se_scale,
        se_shape,
        loglik: fit.loglik,
        converged: fit.converged,
        reference,
    })
}

pub fn fit3(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let p = prepare(&cfg.input)?;
    let fit = fit3_mle(&p.data, &p.working_kind())?;
    if !fit.converged {
        warn!("three-parameter fit did not settle; the reported point is the best found");
    }
    write_toml(out, "fit3.toml", &fit3_file(&p, &fit)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SlopeFile {
    c: f64,
    intercept: f64,
    effective_cells: f64,
    cells_used: usize,
    converged_fraction: f64,
}

pub fn profile(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let p = prepare(&cfg.input)?;
    let kind = p.working_kind();
    let fit = fit3_mle(&p.data, &kind)?;
    write_toml(out, "fit3.toml", &fit3_file(&p, &fit)?)?;
    let grid = build_grid(&p.data, &kind, &fit, &cfg.grid_spec())?;
    write_grid_csv(&grid, create(out, "profile_grid.csv")?)?;
    let slope = estimate_c_detailed(&grid)?;
    info!("c = {:.5} from {} cells", slope.c, slope.cells_used);
    write_toml(
        out,
        "slope.toml",
        &SlopeFile {
            c: slope.c,
            intercept: slope.intercept,
            effective_cells: slope.effective_cells,
            cells_used: slope.cells_used,
            converged_fraction: grid.converged_fraction(),
        },
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct PosteriorFile {
    kind: KindName,
    c: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    /// Block count the draws refer to.
    #[serde(skip_serializing_if = "Option::is_none")]
    n_blocks: Option<f64>,
    /// Block count of the input, used for return periods.
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_n_blocks: Option<f64>,
    draws: usize,
    burn_in: usize,
    /// Run seed; the sampler uses its own stream of it.
    seed: u64,
    lambda_range: [f64; 2],
    /// Acceptance rates of beta_x, log_alpha_x, gamma_x, lambda.
    acceptance: [f64; 4],
}

pub fn fit4(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let s = &cfg.sampler;
    let c = match (s.c, &s.profile_dir) {
        (Some(c), _) => c,
        (None, Some(dir)) => read_toml::<SlopeFile>(&dir.join("slope.toml"))?.c,
        (None, None) => {
            return Err(Error::Usage(
                "fit4 needs the shape slope c: pass --c, or --profile-dir pointing at a profile run".into(),
            ))
        }
    };
    let p = prepare(&cfg.input)?;
    let kind = p.working_kind();
    let fit = fit3_mle(&p.data, &kind)?;
    let g = fit.params;
    let priors = PriorSpec::new(
        [g.location, g.scale.ln(), g.shape],
        s.prior_variance,
        (s.prior_lambda_min, s.prior_lambda_max),
    )?;
    let sc = SamplerConfig {
        iterations: s.iterations,
        burn_in: s.burn_in,
        seed: sub_seed(cfg.seed, STAGE_SAMPLER),
        initial_steps: None,
        adapt: s.adapt,
        use_likelihood: true,
    };
    let draws = run_mcmc(&p.data, &kind, c, &priors, &sc)?;
    write_draws_csv(&draws, create(out, "draws.csv")?)?;

    let summary = chain_diagnostics(&draws);
    let mut w = csv::Writer::from_writer(create(out, "diagnostics.csv")?);
    w.write_record(["component", "acceptance", "ess", "mean", "sd", "q025", "median", "q975"])?;
    for k in &summary.components {
        let nums = [k.acceptance, k.ess, k.mean, k.sd, k.q025, k.median, k.q975].map(|v| v.to_string());
        w.write_record(std::iter::once(k.name.to_string()).chain(nums))?;
    }
    w.flush()?;

    write_toml(
        out,
        "posterior.toml",
        &PosteriorFile {
            kind: kind_name(&kind),
            c,
            threshold: kind.threshold(),
            n_blocks: (!kind.is_block_maxima()).then_some(p.data.len() as f64),
            reference_n_blocks: p.reference_n_blocks(),
            draws: draws.len(),
            burn_in: s.burn_in,
            seed: cfg.seed,
            lambda_range: [s.prior_lambda_min, s.prior_lambda_max],
            acceptance: draws.acceptance,
        },
    )
}

fn load_posterior(cfg: &RunConfig) -> Result<(PosteriorFile, PosteriorDraws), Error> {
    let dir = cfg
        .returns
        .draws_dir
        .as_deref()
        .ok_or_else(|| Error::Usage("no posterior; pass --draws-dir pointing at a fit4 run".into()))?;
    let meta: PosteriorFile = read_toml(&dir.join("posterior.toml"))?;
    let kind = match meta.kind {
        KindName::Gev => ModelKind::BlockMaxima,
        KindName::Pp => ModelKind::exceedances(
            meta.threshold.ok_or_else(|| Error::Usage("posterior.toml lacks the threshold".into()))?,
            meta.n_blocks.ok_or_else(|| Error::Usage("posterior.toml lacks n_blocks".into()))?,
        )?,
    };
    let file = File::open(dir.join("draws.csv")).map_err(|e| Error::Usage(format!("{}: {e}", dir.display())))?;
    let draws = read_draws_csv(file, meta.c, kind)?;
    Ok((meta, draws))
}

pub fn returns(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let r = &cfg.returns;
    let (meta, draws) = load_posterior(cfg)?;
    let levels = PosteriorLevels::from_draws(&draws, meta.reference_n_blocks)?;
    let blocks: Vec<f64> = r.periods.iter().map(|t| t * r.blocks_per_unit).collect();
    let mut rows = levels.table(&blocks, r.level, r.tolerance)?;
    for (row, &t) in rows.iter_mut().zip(&r.periods) {
        row.return_period = t;
    }
    write_return_levels_csv(&rows, create(out, "return_levels.csv")?)?;
    if cfg.svg {
        fs::write(out.join("return_levels.svg"), return_level_svg(&rows, "Return levels"))?;
    }
    Ok(())
}

pub fn qq(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let (_, draws) = load_posterior(cfg)?;
    let p = prepare(&cfg.input)?;
    if kind_name(&p.kind) != kind_name(draws.kind()) || p.kind.threshold() != draws.kind().threshold() {
        return Err(Error::Usage("input data do not match the model kind and threshold of the posterior".into()));
    }
    let mut data = p.data;
    data.sort_by(f64::total_cmp);
    let rows = qq_data(&draws, &data, cfg.returns.level)?;
    write_qq_csv(&rows, create(out, "qq.csv")?)?;
    if cfg.svg {
        fs::write(out.join("qq.svg"), qq_svg(&rows, "Quantile-quantile"))?;
    }
    Ok(())
}

fn parse_family(name: &str, params: &[f64]) -> Result<ParentDistribution, Error> {
    let want = |k: usize| -> Result<(), Error> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::Usage(format!("family {name} takes {k} parameters, got {}", params.len())))
        }
    };
    let p = params;
    let family = match name {
        "truncated-normal" => {
            want(0)?;
            Family::TruncatedNormal
        }
        "exponential" => {
            want(1)?;
            Family::Exponential { rate: p[0] }
        }
        "pareto" => {
            want(1)?;
            return ParentDistribution::pareto(p[0]);
        }
        "weibull" => {
            want(2)?;
            Family::Weibull { shape: p[0], scale: p[1] }
        }
        "gamma" => {
            want(2)?;
            Family::Gamma { shape: p[0], rate: p[1] }
        }
        "power-tail" => {
            want(4)?;
            Family::PowerTail { alpha: p[0], beta: p[1], c: p[2], d: p[3] }
        }
        "bounded-tail" => {
            want(5)?;
            Family::BoundedTail { alpha: p[0], beta: p[1], c: p[2], d: p[3], upper: p[4] }
        }
        "hazard-power" => {
            want(2)?;
            Family::HazardPower { alpha: p[0], c: p[1] }
        }
        "log-pareto" => {
            want(3)?;
            Family::LogPareto { beta: p[0], gamma: p[1], u: p[2] }
        }
        "gev" => {
            want(3)?;
            Family::Gev { location: p[0], scale: p[1], shape: p[2] }
        }
        "gpd" => {
            want(2)?;
            Family::GeneralizedPareto { scale: p[0], shape: p[1] }
        }
        other => return Err(Error::Usage(format!("unknown family {other:?}"))),
    };
    ParentDistribution::new(family)
}

pub fn asymptotics(cfg: &RunConfig, out: &Path) -> Result<(), Error> {
    let a = &cfg.asymptotics;
    let d = parse_family(&a.family, &a.params)?;
    let rule = match a.rule {
        RuleName::Exact => HazardRule::Exact,
        RuleName::Expansion => {
            if d.family() != Family::TruncatedNormal {
                return Err(Error::Usage("the expansion rule applies to the truncated normal only".into()));
            }
            HazardRule::MillsExpansion { terms: a.expansion_terms }
        }
    };
    let lambda = a.lambda.or_else(|| table1_lambda_star(&d.family())).unwrap_or(1.0);
    let mut w = csv::Writer::from_writer(create(out, "asymptotics.csv")?);
    w.write_record(["family", "n", "b", "a", "xi_pen", "lambda", "xi_y_pen", "lambda_star", "gap", "gap_untransformed"])?;
    for &n in &a.n {
        let t = norming_constants(&d, n)?;
        let y = transform_norming(&t, lambda)?;
        let star = lambda_star_n_with(&d, Level::Blocks(n), rule)?.value().map_or(String::new(), |v| v.to_string());
        let gap = convergence_gap(&d, n, lambda, &default_gap_grid(y.xi_pen))?;
        let gap1 = convergence_gap(&d, n, 1.0, &default_gap_grid(t.xi_pen))?;
        w.write_record([
            a.family.clone(),
            n.to_string(),
            t.b.to_string(),
            t.a.to_string(),
            t.xi_pen.to_string(),
            lambda.to_string(),
            y.xi_pen.to_string(),
            star,
            gap.to_string(),
            gap1.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_differ_by_stage() {
        assert_ne!(sub_seed(1, STAGE_SIMULATE), sub_seed(1, STAGE_SAMPLER));
        assert_eq!(sub_seed(7, STAGE_SAMPLER), sub_seed(7, STAGE_SAMPLER));
    }

    #[test]
    fn family_parsing() {
        assert!(parse_family("weibull", &[2.0, 1.0]).is_ok());
        assert!(matches!(parse_family("weibull", &[2.0]), Err(Error::Usage(_))));
        assert!(matches!(parse_family("cauchy", &[]), Err(Error::Usage(_))));
        assert!(matches!(parse_family("exponential", &[-1.0]), Err(Error::Domain(_))));
    }
}
