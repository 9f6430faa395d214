//! Acceptance, effective sample size and marginal summaries.

use log::warn;

use crate::numeric::{quantile_sorted, sorted};

use super::draws::{posterior_for_original_params, PosteriorDraws, COMPONENT_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSummary {
    pub name: &'static str,
    /// NaN for derived columns and components held fixed.
    pub acceptance: f64,
    pub ess: f64,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub draws: usize,
    pub components: Vec<ComponentSummary>,
}

/// Effective sample size by Geyer's initial positive sequence.
///
/// A constant chain carries one draw's worth of information and returns 1.
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return n as f64;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        warn!("constant chain: effective sample size set to 1");
        return 1.0;
    }
    let rho = |lag: usize| centred[..n - lag].iter().zip(&centred[lag..]).map(|(a, b)| a * b).sum::<f64>() / (n as f64 * var);
    // sum of autocorrelation pairs Γ_k = ρ(2k) + ρ(2k+1) while positive
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    // antithetic chains can exceed n; cap at n log10 n
    (n as f64 / tau.max(1.0 / n as f64)).min(n as f64 * (n as f64).log10().max(1.0))
}

fn summarize(name: &'static str, acceptance: f64, values: &[f64]) -> ComponentSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    let s = sorted(values);
    ComponentSummary {
        name,
        acceptance,
        ess: effective_sample_size(values),
        mean,
        sd,
        q025: quantile_sorted(&s, 0.025),
        median: quantile_sorted(&s, 0.5),
        q975: quantile_sorted(&s, 0.975),
    }
}

pub fn chain_diagnostics(draws: &PosteriorDraws) -> ChainSummary {
    let y = posterior_for_original_params(draws);
    let mut components: Vec<ComponentSummary> =
        (0..4).map(|k| summarize(COMPONENT_NAMES[k], draws.acceptance[k], &draws.column(k))).collect();
    let derived: [Vec<f64>; 3] = [
        y.iter().map(|g| g.location).collect(),
        y.iter().map(|g| g.scale).collect(),
        y.iter().map(|g| g.shape).collect(),
    ];
    for (k, col) in derived.iter().enumerate() {
        components.push(summarize(COMPONENT_NAMES[4 + k], f64::NAN, col));
    }
    ChainSummary { draws: draws.len(), components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn white_noise_ess_near_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ess = effective_sample_size(&x);
        assert!((ess - 10_000.0).abs() < 2_000.0, "{ess}");
    }

    #[test]
    fn ar1_ess_matches_theory() {
        // AR(1) with φ = 0.8: ESS ≈ n (1-φ)/(1+φ)
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut v = 0.0;
        let x: Vec<f64> = (0..50_000)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                v = 0.8 * v + e;
                v
            })
            .collect();
        let ess = effective_sample_size(&x);
        let theory = 50_000.0 * 0.2 / 1.8;
        assert!((ess / theory - 1.0).abs() < 0.2, "{ess} vs {theory}");
    }

    #[test]
    fn constant_chain() {
        assert_eq!(effective_sample_size(&[2.0; 500]), 1.0);
    }

    #[test]
    fn summary_columns() {
        use crate::evd::ModelKind;
        let states: Vec<[f64; 4]> = (0..100).map(|k| [10.0 + 0.01 * k as f64, 0.1, -0.1, 1.0]).collect();
        let d = PosteriorDraws::new(states, 0.2, ModelKind::BlockMaxima, [0.4, 0.5, 0.3, f64::NAN]).unwrap();
        let s = chain_diagnostics(&d);
        assert_eq!(s.components.len(), 7);
        assert_eq!(s.components[4].name, "beta_y");
        assert!((s.components[4].mean - (s.components[0].mean - 1.0)).abs() < 1e-12);
        assert!(s.components.iter().all(|c| c.q025 <= c.median && c.median <= c.q975));
    }
}
