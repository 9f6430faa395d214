//! Profile log-likelihood over `(γ_Y, λ)`, maximizing over the location and
//! scale coordinates.

use log::{debug, info};
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::evd::{boxcox_unchecked, inverse_boxcox, validate_data, ModelKind, ScaledData, TransformedModel};
use crate::numeric::sorted;
use crate::optim::{maximize, SimplexOptions};

use super::fit3::{matched_start, repair_start, Fit3Result};

/// One profiled cell: the maximized value and the maximizing Y-scale
/// location and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub loglik: f64,
    pub converged: bool,
    pub location_y: f64,
    pub scale_y: f64,
}

impl ProfilePoint {
    const FAILED: ProfilePoint =
        ProfilePoint { loglik: f64::NEG_INFINITY, converged: false, location_y: f64::NAN, scale_y: f64::NAN };

    /// The maximizing `(β_X, log α_X)`.
    pub fn x_scale(&self, lambda: f64) -> Option<(f64, f64)> {
        let beta_x = inverse_boxcox(self.location_y, lambda).ok()?;
        Some((beta_x, self.scale_y.ln() - (lambda - 1.0) * beta_x.ln()))
    }
}

/// Profiles one dataset at fixed `λ`, reusing the transformed data.
pub struct Profiler<'a> {
    kind: &'a ModelKind,
    scaled: ScaledData,
    sorted_y: Vec<f64>,
    kind_y: ModelKind,
}

impl<'a> Profiler<'a> {
    pub fn new(data: &[f64], kind: &'a ModelKind, lambda: f64) -> Result<Self> {
        let scaled = ScaledData::new(data, kind, lambda)?;
        let sorted_y = sorted(scaled.values());
        let kind_y = match *kind {
            ModelKind::BlockMaxima => ModelKind::BlockMaxima,
            ModelKind::ThresholdExceedances { threshold, n_blocks } => ModelKind::ThresholdExceedances {
                threshold: boxcox_unchecked(threshold, lambda),
                n_blocks,
            },
        };
        Ok(Self { kind, scaled, sorted_y, kind_y })
    }

    pub fn lambda(&self) -> f64 {
        self.scaled.lambda()
    }

    /// Log-likelihood at Y-scale `(location, scale, γ_Y)`, with the
    /// four-parameter constraints applied.
    pub fn loglik(&self, location: f64, scale: f64, gamma: f64) -> f64 {
        let lambda = self.lambda();
        let Ok(beta_x) = inverse_boxcox(location, lambda) else {
            return f64::NEG_INFINITY;
        };
        if !(scale > 0.0) || !(beta_x > 0.0) || !beta_x.is_finite() {
            return f64::NEG_INFINITY;
        }
        let log_alpha_x = scale.ln() - (lambda - 1.0) * beta_x.ln();
        match TransformedModel::new(beta_x, log_alpha_x, gamma, lambda, 0.0) {
            Ok(m) => self.scaled.loglik4(self.kind, &m),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn start(&self, gamma: f64) -> Option<(f64, f64)> {
        let guess = matched_start(&self.sorted_y, &self.kind_y, gamma);
        let lambda = self.lambda();
        let max_y = *self.sorted_y.last().expect("nonempty data");
        let spread = (max_y - self.sorted_y[0]).max(1e-8);
        let ceiling = if lambda < 0.0 { -1.0 / lambda } else { max_y + spread };
        repair_start(|l, s| self.loglik(l, s, gamma), guess, gamma, (max_y, ceiling))
    }

    /// Maximizes over location and scale with `γ_Y` held fixed, starting
    /// from `warm` when it is feasible.
    pub fn profile(&self, gamma: f64, warm: Option<(f64, f64)>) -> ProfilePoint {
        if self.lambda() < 0.0 && gamma >= 0.0 {
            return ProfilePoint::FAILED;
        }
        let start = warm
            .filter(|&(l, s)| self.loglik(l, s, gamma).is_finite())
            .or_else(|| self.start(gamma));
        let Some((loc, scale)) = start else {
            return ProfilePoint::FAILED;
        };
        let f = |p: &[f64]| self.loglik(p[0], p[1].exp(), gamma);
        let opts = SimplexOptions { max_evals: 3000, f_tol: 1e-12, x_tol: 1e-9 };
        let mut x = vec![loc, scale.ln()];
        let mut best = f64::NEG_INFINITY;
        let mut converged = false;
        for round in 0..4 {
            let s = x[1].exp();
            let opt = maximize(f, &x, &[0.1 * s, 0.1], opts);
            let gain = opt.value - best;
            if opt.value >= best {
                x = opt.x;
                best = opt.value;
            }
            if round > 0 && opt.converged && gain.abs() < 1e-9 * (1.0 + best.abs()) {
                converged = true;
                break;
            }
        }
        ProfilePoint { loglik: best, converged: converged && best.is_finite(), location_y: x[0], scale_y: x[1].exp() }
    }
}

/// Profile log-likelihood at `(γ_Y, λ)` and whether the inner maximization
/// converged.
pub fn profile_loglik(data: &[f64], kind: &ModelKind, gamma_y: f64, lambda: f64) -> Result<(f64, bool)> {
    let p = Profiler::new(data, kind, lambda)?.profile(gamma_y, None);
    Ok((p.loglik, p.converged))
}

/// Layout and extent of a profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_gamma: usize,
    pub n_lambda: usize,
    /// Explicit `γ_Y` range; otherwise `γ̂ ± se_multiplier · SE(γ̂)`.
    pub gamma_range: Option<(f64, f64)>,
    pub se_multiplier: f64,
    pub lambda_range: (f64, f64),
    /// How many times the `γ_Y` axis may be extended when column maxima
    /// that matter sit on its edge.
    pub max_widenings: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_gamma: 41,
            n_lambda: 41,
            gamma_range: None,
            se_multiplier: 4.0,
            lambda_range: (-1.0, 4.0),
            max_widenings: 3,
        }
    }
}

/// Column maxima within this many log-likelihood units of the overall
/// maximum trigger widening when they lie on the `γ_Y` edge.
const EDGE_RELEVANCE: f64 = 12.0;

/// Profile log-likelihood values on a rectangular `(γ_Y, λ)` grid; cell
/// `(i, j)` holds `(gamma_values[i], lambda_values[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    pub gamma_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub loglik: DMatrix<f64>,
    pub converged: DMatrix<bool>,
}

impl ProfileGrid {
    /// Validates dimensions and axis ordering.
    pub fn new(gamma_values: Vec<f64>, lambda_values: Vec<f64>, loglik: DMatrix<f64>, converged: DMatrix<bool>) -> Result<Self> {
        let shape = (gamma_values.len(), lambda_values.len());
        if loglik.shape() != shape || converged.shape() != shape {
            return Err(Error::usage(format!(
                "grid values are {:?} but the axes have lengths {shape:?}",
                loglik.shape()
            )));
        }
        for axis in [&gamma_values, &lambda_values] {
            if axis.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::usage("grid axes must be strictly ascending"));
            }
        }
        Ok(Self { gamma_values, lambda_values, loglik, converged })
    }

    /// Largest converged finite cell as `(i, j, value)`.
    pub fn max_cell(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for j in 0..self.lambda_values.len() {
            for i in 0..self.gamma_values.len() {
                let v = self.loglik[(i, j)];
                if self.converged[(i, j)] && v.is_finite() && best.is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }

    pub fn converged_fraction(&self) -> f64 {
        self.converged.iter().filter(|&&c| c).count() as f64 / self.converged.len() as f64
    }

    /// Rows `(γ, λ, loglik, converged)` in column-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64, bool)> + '_ {
        (0..self.lambda_values.len()).flat_map(move |j| {
            (0..self.gamma_values.len())
                .map(move |i| (self.gamma_values[i], self.lambda_values[j], self.loglik[(i, j)], self.converged[(i, j)]))
        })
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn validate_spec(spec: &GridSpec) -> Result<()> {
    if spec.n_gamma == 0 || spec.n_lambda == 0 {
        return Err(Error::usage("grid dimensions must be positive"));
    }
    let (l0, l1) = spec.lambda_range;
    if !(l0 <= l1) || !l0.is_finite() || !l1.is_finite() || (spec.n_lambda > 1 && l0 == l1) {
        return Err(Error::usage(format!("invalid λ range [{l0}, {l1}]")));
    }
    if let Some((g0, g1)) = spec.gamma_range {
        if !(g0 < g1) || !g0.is_finite() || !g1.is_finite() {
            return Err(Error::usage(format!("invalid γ range [{g0}, {g1}]")));
        }
    }
    Ok(())
}

/// Evaluates the profile grid, extending the `γ_Y` axis when the ridge of
/// high likelihood leaves it.
pub fn build_grid(data: &[f64], kind: &ModelKind, fit3: &Fit3Result, spec: &GridSpec) -> Result<ProfileGrid> {
    validate_data(data, kind)?;
    validate_spec(spec)?;
    if !fit3.converged {
        return Err(Error::usage("profile grid needs a converged three-parameter fit"));
    }
    let mut gamma_range = spec.gamma_range.unwrap_or_else(|| {
        let se = fit3.approx_std_errors[2];
        let half = spec.se_multiplier * if se.is_finite() { se.clamp(1e-3, 1.0) } else { 1.0 };
        (fit3.params.shape - half, fit3.params.shape + half)
    });
    let lambda_values = linspace(spec.lambda_range, spec.n_lambda);
    let profilers = lambda_values
        .iter()
        .map(|&l| Profiler::new(data, kind, l))
        .collect::<Result<Vec<_>>>()?;
    let mut widenings = 0;
    loop {
        let gamma_values = linspace(gamma_range, spec.n_gamma);
        let grid = evaluate(&profilers, gamma_values, lambda_values.clone(), fit3)?;
        let (low, high) = edge_maxima(&grid);
        if (!low && !high) || widenings == spec.max_widenings || spec.n_gamma < 3 {
            info!(
                "profile grid {}x{} over γ in [{:.4}, {:.4}], {:.1}% converged",
                spec.n_gamma,
                spec.n_lambda,
                gamma_range.0,
                gamma_range.1,
                100.0 * grid.converged_fraction()
            );
            return Ok(grid);
        }
        let span = gamma_range.1 - gamma_range.0;
        if low {
            gamma_range.0 -= span;
        }
        if high {
            gamma_range.1 += span;
        }
        widenings += 1;
        debug!("ridge on the γ edge; widening to [{}, {}]", gamma_range.0, gamma_range.1);
    }
}

/// Whether some relevant column maximum sits on the low / high γ edge.
fn edge_maxima(grid: &ProfileGrid) -> (bool, bool) {
    let Some((_, _, top)) = grid.max_cell() else {
        return (false, false);
    };
    let last = grid.gamma_values.len() - 1;
    let (mut low, mut high) = (false, false);
    for j in 0..grid.lambda_values.len() {
        let col = grid.loglik.column(j);
        let Some((i, v)) = col.iter().enumerate().filter(|(_, v)| v.is_finite()).max_by(|a, b| a.1.total_cmp(b.1)) else {
            continue;
        };
        if top - v <= EDGE_RELEVANCE {
            low |= i == 0;
            high |= i == last;
        }
    }
    (low, high)
}

fn evaluate(profilers: &[Profiler<'_>], gamma_values: Vec<f64>, lambda_values: Vec<f64>, fit3: &Fit3Result) -> Result<ProfileGrid> {
    let (ng, nl) = (gamma_values.len(), lambda_values.len());
    let mut cells = vec![ProfilePoint::FAILED; ng * nl];
    let idx = |i: usize, j: usize| j * ng + i;
    let centre_row = nearest(&gamma_values, fit3.params.shape);
    let centre_col = nearest(&lambda_values, 1.0);

    // seed each column's centre row, sweeping outward from λ = 1
    let fit_start = (fit3.params.location - 1.0, fit3.params.scale);
    let order: Vec<usize> = outward(centre_col, nl);
    for (k, &j) in order.iter().enumerate() {
        let warm = if k == 0 {
            (lambda_values[j] == 1.0).then_some(fit_start)
        } else {
            // nearest already-solved neighbour toward the centre
            let nb = if j < centre_col { j + 1 } else { j - 1 };
            transfer(&cells[idx(centre_row, nb)], lambda_values[nb], lambda_values[j])
        };
        cells[idx(centre_row, j)] = profilers[j].profile(gamma_values[centre_row], warm);
    }
    // chain each column outward from its centre row
    for j in 0..nl {
        for i in outward(centre_row, ng).into_iter().skip(1) {
            let nb = if i < centre_row { i + 1 } else { i - 1 };
            let prev = cells[idx(nb, j)];
            let warm = prev.converged.then_some((prev.location_y, prev.scale_y));
            cells[idx(i, j)] = profilers[j].profile(gamma_values[i], warm);
        }
    }
    let loglik = DMatrix::from_fn(ng, nl, |i, j| cells[idx(i, j)].loglik);
    let converged = DMatrix::from_fn(ng, nl, |i, j| cells[idx(i, j)].converged);
    ProfileGrid::new(gamma_values, lambda_values, loglik, converged)
}

/// Maps a solved cell's location and scale to another `λ` through the X scale.
fn transfer(p: &ProfilePoint, from: f64, to: f64) -> Option<(f64, f64)> {
    if !p.converged {
        return None;
    }
    let (beta_x, log_alpha_x) = p.x_scale(from)?;
    let loc = boxcox_unchecked(beta_x, to);
    Some((loc, (log_alpha_x + (to - 1.0) * beta_x.ln()).exp()))
}

fn nearest(axis: &[f64], v: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// `centre, centre-1, centre+1, centre-2, ...` restricted to `0..n`.
fn outward(centre: usize, n: usize) -> Vec<usize> {
    let mut out = vec![centre];
    for d in 1..n {
        if centre >= d {
            out.push(centre - d);
        }
        if centre + d < n {
            out.push(centre + d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evd::GevParams;
    use crate::profile::fit3_mle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gev_data(n: usize, seed: u64) -> Vec<f64> {
        let g = GevParams::new(15.0, 1.5, -0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| g.quantile(rng.random_range(1e-12..1.0)).unwrap()).collect()
    }

    #[test]
    fn unit_lambda_profile_matches_fit3() {
        let data = gev_data(500, 5);
        let kind = ModelKind::BlockMaxima;
        let fit = fit3_mle(&data, &kind).unwrap();
        let (v, ok) = profile_loglik(&data, &kind, fit.params.shape, 1.0).unwrap();
        assert!(ok);
        assert!((v - fit.loglik).abs() < 1e-6, "{v} vs {}", fit.loglik);
    }

    #[test]
    fn infeasible_cell_is_flagged() {
        let data = gev_data(100, 6);
        let (v, ok) = profile_loglik(&data, &ModelKind::BlockMaxima, 0.3, -0.5).unwrap();
        assert!(v == f64::NEG_INFINITY && !ok);
    }

    #[test]
    fn profile_dominates_random_search() {
        let data: Vec<f64> = gev_data(300, 8).iter().map(|x| x * x).collect();
        let kind = ModelKind::BlockMaxima;
        let (gamma, lambda) = (-0.2, 0.6);
        let profiler = Profiler::new(&data, &kind, lambda).unwrap();
        let p = profiler.profile(gamma, None);
        assert!(p.converged);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut best = f64::NEG_INFINITY;
        let (bx, lax) = p.x_scale(lambda).unwrap();
        for _ in 0..10_000 {
            let beta_x = bx * rng.random_range(0.9..1.1);
            let log_alpha_x = lax + rng.random_range(-0.2..0.2);
            let m = TransformedModel::new(beta_x, log_alpha_x, gamma, lambda, 0.0).unwrap();
            let v = crate::evd::loglik4(&data, &kind, &m).unwrap();
            assert!(v <= p.loglik + 1e-9);
            best = best.max(v);
        }
        assert!(p.loglik - best < 1e-3, "{} vs {best}", p.loglik);
    }

    #[test]
    fn grid_layout() {
        let data = gev_data(200, 10);
        let kind = ModelKind::BlockMaxima;
        let fit = fit3_mle(&data, &kind).unwrap();
        let spec = GridSpec { n_gamma: 5, n_lambda: 4, lambda_range: (0.5, 2.0), max_widenings: 0, ..Default::default() };
        let grid = build_grid(&data, &kind, &fit, &spec).unwrap();
        assert_eq!(grid.loglik.shape(), (5, 4));
        assert!(grid.gamma_values.windows(2).all(|w| w[0] < w[1]));
        assert!(grid.lambda_values.windows(2).all(|w| w[0] < w[1]));
        let (i, j) = (3, 2);
        let (v, _) = profile_loglik(&data, &kind, grid.gamma_values[i], grid.lambda_values[j]).unwrap();
        assert!((v - grid.loglik[(i, j)]).abs() < 1e-5);
        assert!(ProfileGrid::new(vec![1.0, 0.0], vec![1.0], DMatrix::zeros(2, 1), DMatrix::from_element(2, 1, true)).is_err());
    }
}
