//! Maximum likelihood for the three-parameter GEV and point-process models.

use log::debug;
use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evd::{loglik3_unchecked, GevParams, ModelKind, GUMBEL_SWITCH};
use crate::numeric::{quantile_sorted, sorted};
use crate::optim::{maximize, SimplexOptions};

/// Smallest sample accepted by [`fit3_mle`].
pub const MIN_FIT_POINTS: usize = 20;
const MAX_RESTARTS: usize = 6;
const START_SHAPES: [f64; 5] = [-0.3, -0.1, 0.0, 0.1, 0.3];

#[derive(Debug, Clone, PartialEq)]
pub struct Fit3Result {
    pub params: GevParams,
    pub loglik: f64,
    /// Approximate standard errors of (location, scale, shape).
    pub approx_std_errors: [f64; 3],
    pub converged: bool,
}

/// Quantile-matching location and scale for a fixed shape.
///
/// Block maxima match the quartiles of the GEV. Exceedances match the
/// median excess of the implied generalized Pareto law and then map to
/// point-process parameters with the exceedance rate `m / N_B`.
pub(crate) fn matched_start(sorted_data: &[f64], kind: &ModelKind, shape: f64) -> (f64, f64) {
    let k = |p: f64| -> f64 {
        let s = -p.ln();
        if shape.abs() < GUMBEL_SWITCH {
            -s.ln()
        } else {
            (-shape * s.ln()).exp_m1() / shape
        }
    };
    match *kind {
        ModelKind::BlockMaxima => {
            let (q1, q2, q3) = (
                quantile_sorted(sorted_data, 0.25),
                quantile_sorted(sorted_data, 0.5),
                quantile_sorted(sorted_data, 0.75),
            );
            let scale = ((q3 - q1) / (k(0.75) - k(0.25))).max(1e-8 * q2.abs().max(1.0));
            (q2 - scale * k(0.5), scale)
        }
        ModelKind::ThresholdExceedances { threshold, n_blocks } => {
            let median_excess = (quantile_sorted(sorted_data, 0.5) - threshold).max(1e-12);
            let rate = sorted_data.len() as f64 / n_blocks;
            if shape.abs() < GUMBEL_SWITCH {
                let scale = median_excess / std::f64::consts::LN_2;
                (threshold + scale * rate.ln(), scale)
            } else {
                let sigma_u = median_excess * shape / (shape * std::f64::consts::LN_2).exp_m1();
                let t_u = (-shape * rate.ln()).exp();
                let scale = sigma_u / t_u;
                (threshold - scale * (t_u - 1.0) / shape, scale)
            }
        }
    }
}

/// Moves a start into the support: widens the scale for `ξ >= 0`, or puts
/// the upper end point a little above the data for `ξ < 0`.
pub(crate) fn repair_start(
    loglik: impl Fn(f64, f64) -> f64,
    (location, scale): (f64, f64),
    shape: f64,
    upper_room: (f64, f64),
) -> Option<(f64, f64)> {
    if loglik(location, scale).is_finite() {
        return Some((location, scale));
    }
    if shape < 0.0 {
        // upper_room = (largest observation, ceiling for the end point)
        let (max_y, ceiling) = upper_room;
        for frac in [0.5, 0.1, 0.9, 0.01] {
            let end = max_y + frac * (ceiling - max_y);
            for s in [scale, scale * 4.0, scale * 0.25] {
                let loc = end + s / shape;
                if loglik(loc, s).is_finite() {
                    return Some((loc, s));
                }
            }
        }
        None
    } else {
        let mut s = scale;
        for _ in 0..40 {
            s *= 2.0;
            if loglik(location, s).is_finite() {
                return Some((location, s));
            }
        }
        None
    }
}

fn validate(data: &[f64], kind: &ModelKind) -> Result<()> {
    if data.len() < MIN_FIT_POINTS {
        return Err(Error::usage(format!(
            "a three-parameter fit needs at least {MIN_FIT_POINTS} observations, got {}",
            data.len()
        )));
    }
    if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("data contain a non-finite value {bad}")));
    }
    if let Some(u) = kind.threshold() {
        if let Some(bad) = data.iter().find(|&&x| !(x > u)) {
            return Err(Error::usage(format!("exceedance {bad} does not exceed the threshold {u}")));
        }
    }
    Ok(())
}

/// Derivative-free maximum likelihood for `(μ, σ, ξ)`.
pub fn fit3_mle(data: &[f64], kind: &ModelKind) -> Result<Fit3Result> {
    validate(data, kind)?;
    let s = sorted(data);
    let (lo, hi) = (s[0], s[s.len() - 1]);
    let ll = |p: &[f64]| loglik3_unchecked(data, kind, &GevParams::new_unchecked(p[0], p[1].exp(), p[2]));
    if hi - lo <= 0.0 {
        return Err(Error::NonConvergence {
            restarts: 0,
            best_point: vec![lo, f64::NAN, f64::NAN],
            best_value: f64::NEG_INFINITY,
        });
    }
    let room = (hi, hi + (hi - lo));
    let mut start: Option<(Vec<f64>, f64)> = None;
    for &shape in &START_SHAPES {
        let guess = matched_start(&s, kind, shape);
        if let Some((loc, scale)) = repair_start(|l, sc| ll(&[l, sc.ln(), shape]), guess, shape, room) {
            let x = vec![loc, scale.ln(), shape];
            let v = ll(&x);
            if start.as_ref().is_none_or(|(_, best)| v > *best) {
                start = Some((x, v));
            }
        }
    }
    let (mut x, mut value) = start.ok_or_else(|| Error::NonConvergence {
        restarts: 0,
        best_point: vec![],
        best_value: f64::NEG_INFINITY,
    })?;

    let opts = SimplexOptions { max_evals: 4000, f_tol: 1e-13, x_tol: 1e-10 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f173);
    let mut converged = false;
    for restart in 0..MAX_RESTARTS {
        let scale = x[1].exp();
        let jitter = if restart == 0 { 1.0 } else { rng.random_range(0.5..2.0) };
        let steps = [0.2 * scale * jitter, 0.2 * jitter, 0.1 * jitter];
        let opt = maximize(ll, &x, &steps, opts);
        let improvement = opt.value - value;
        debug!("fit3 restart {restart}: loglik {} ({} evaluations)", opt.value, opt.evals);
        if opt.value >= value {
            x = opt.x;
            value = opt.value;
        }
        // a restart that cannot improve the optimum confirms it
        if restart > 0 && opt.converged && improvement.abs() < 1e-8 * (1.0 + value.abs()) {
            converged = true;
            break;
        }
    }
    if !converged || !value.is_finite() {
        return Err(Error::NonConvergence { restarts: MAX_RESTARTS, best_point: x, best_value: value });
    }
    let params = GevParams::new(x[0], x[1].exp(), x[2])?;
    let approx_std_errors = standard_errors(|p| loglik3_unchecked(data, kind, &GevParams::new_unchecked(p[0], p[1], p[2])), &params);
    Ok(Fit3Result { params, loglik: value, approx_std_errors, converged })
}

/// Square roots of the diagonal of the inverse observed information,
/// from a central-difference Hessian in `(μ, σ, ξ)`.
fn standard_errors(f: impl Fn([f64; 3]) -> f64, p: &GevParams) -> [f64; 3] {
    let theta = [p.location, p.scale, p.shape];
    let h = [1e-4 * p.scale, 1e-4 * p.scale, 1e-4];
    let mut hess = Matrix3::<f64>::zeros();
    let f0 = f(theta);
    for i in 0..3 {
        for j in i..3 {
            let at = |di: f64, dj: f64| {
                let mut t = theta;
                t[i] += di * h[i];
                t[j] += dj * h[j];
                f(t)
            };
            let v = if i == j {
                (at(1.0, 0.0) - 2.0 * f0 + at(-1.0, 0.0)) / (h[i] * h[i])
            } else {
                (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h[i] * h[j])
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    match (-hess).try_inverse() {
        Some(cov) if (0..3).all(|i| cov[(i, i)] > 0.0) => [cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt(), cov[(2, 2)].sqrt()],
        _ => [f64::INFINITY; 3],
    }
}
