use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::asymptotics::ParentDistribution;
use crate::error::{Error, Result};
use crate::evd::{GevParams, PpParams};

use super::{ExceedanceSet, Series};

/// How many points a point-process simulation draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointCount {
    Poisson,
    /// Exactly the expected count, rounded.
    Fixed,
}

/// Uniform on the open interval (0, 1).
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    }
}

/// Points of a `PP(β, α, γ)` process over `N_B` blocks above the threshold
/// `u` with `Λ{(u, ∞) × (0, 1)} = total_intensity`.
///
/// Magnitudes invert the conditional tail `t(x) = t(u) V^{-γ}` with
/// `t(x) = 1 + γ(x - β)/α` and `V` uniform; times are uniform on `(0, N_B)`
/// in block units and the points are returned in time order.
pub fn simulate_pp(p: &PpParams, total_intensity: f64, count: PointCount, seed: u64) -> Result<ExceedanceSet> {
    let u = p.level_for_intensity(total_intensity)?;
    if !(u > 0.0) {
        return Err(Error::domain(format!(
            "intensity {total_intensity} puts the threshold at {u}; positive data need a positive threshold"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = match count {
        PointCount::Poisson => Poisson::new(total_intensity)
            .map_err(|e| Error::domain(format!("invalid Poisson mean {total_intensity}: {e}")))?
            .sample(&mut rng) as usize,
        PointCount::Fixed => total_intensity.round() as usize,
    };
    let g = p.block_gev();
    let t_u = if g.is_gumbel() { 0.0 } else { 1.0 + p.shape * (u - p.location) / p.scale };
    let mut points: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let v = open_unit(&mut rng);
            let x = if g.is_gumbel() {
                u - p.scale * v.ln()
            } else {
                p.location + p.scale * (t_u * (-p.shape * v.ln()).exp() - 1.0) / p.shape
            };
            (rng.random::<f64>() * p.n_blocks, x)
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (times, exceedances): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    // the largest magnitudes can round onto u when γ < 0 and the scale is tiny
    let exceedances = exceedances.into_iter().map(|x| if x > u { x } else { u.next_up() }).collect();
    Ok(ExceedanceSet { exceedances, threshold: u, n_total: n, n_blocks: p.n_blocks, times: Some(times) })
}

/// Draws from `F(x) = 2Φ(x) - 1` on `x > 0` by inversion.
pub fn simulate_truncated_normal(n: usize, seed: u64) -> Result<Series> {
    if n == 0 {
        return Err(Error::usage("sample size must be at least 1"));
    }
    let d = ParentDistribution::truncated_normal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Series::new((0..n).map(|_| d.sample(&mut rng)).collect())
}

/// GEV draws by inversion.
pub fn simulate_gev(p: &GevParams, n: usize, seed: u64) -> Result<Series> {
    let p = GevParams::new(p.location, p.scale, p.shape)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Series::new((0..n).map(|_| p.quantile_from_neg_log(-open_unit(&mut rng).ln())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{ks_distance, quantile_sorted, sorted};

    #[test]
    fn pp_threshold_and_count() {
        let p = PpParams::new(15.0, 1.5, -0.25, 1000.0).unwrap();
        let s = simulate_pp(&p, 100_000.0, PointCount::Fixed, 1).unwrap();
        assert_eq!(s.len(), 100_000);
        assert!((p.intensity_above(s.threshold) - 100_000.0).abs() < 1e-6);
        // closed-form inversion of 1000 [1 + γ(u - 15)/1.5]^(-1/γ) = 100000
        let u = 15.0 + 1.5 * (100f64.powf(0.25) - 1.0) / -0.25;
        assert!((s.threshold - u).abs() < 1e-10);
        assert!(s.exceedances.iter().all(|&x| x > u && x < 21.0));
        let times = s.times.as_ref().unwrap();
        assert!(times.windows(2).all(|w| w[0] <= w[1]) && times[0] >= 0.0 && *times.last().unwrap() < 1000.0);
    }

    #[test]
    fn pp_tail_matches_closed_form() {
        let p = PpParams::new(15.0, 1.5, -0.25, 1000.0).unwrap();
        let s = simulate_pp(&p, 100_000.0, PointCount::Poisson, 2).unwrap();
        let higher = s.above(12.0).unwrap();
        let tail = |x: f64| 1.0 - p.intensity_above(x) / p.intensity_above(12.0);
        assert!(ks_distance(&higher.exceedances, tail) < 0.01);
        assert!((s.len() as f64 - 100_000.0).abs() < 5.0 * 100_000f64.sqrt());
    }

    #[test]
    fn pp_rejects_nonpositive_threshold() {
        let p = PpParams::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(simulate_pp(&p, 1e6, PointCount::Fixed, 1).is_err());
        assert!(simulate_pp(&p, -1.0, PointCount::Fixed, 1).is_err());
    }

    #[test]
    fn truncated_normal_quantiles() {
        let s = simulate_truncated_normal(100_000, 3).unwrap();
        assert!(s.values.iter().all(|&x| x > 0.0));
        let v = sorted(&s.values);
        assert!((quantile_sorted(&v, 0.5) - 0.6744897501960817).abs() < 0.01);
        let below_one = v.partition_point(|&x| x <= 1.0) as f64 / v.len() as f64;
        assert!((below_one - 0.6826894921370859).abs() < 0.01);
    }

    #[test]
    fn gev_sampler() {
        let g = GevParams::new(15.0, 1.5, -0.25).unwrap();
        let s = simulate_gev(&g, 100_000, 4).unwrap();
        assert!(ks_distance(&s.values, |x| g.cdf(x)) < 0.01);
        assert!(s.values.iter().all(|&x| x < g.upper_endpoint()));
        assert_eq!(s, simulate_gev(&g, 100_000, 4).unwrap());
    }
}
