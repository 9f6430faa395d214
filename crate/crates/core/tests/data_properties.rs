use proptest::prelude::*;

use evscale::data::{block_maxima, decluster_runs, simulate_gev, simulate_pp, simulate_truncated_normal, PointCount, Series};
use evscale::evd::{GevParams, ModelKind, PpParams};
use evscale::profile::fit3_mle;

#[test]
fn threshold_stability_of_simulated_process() {
    let p = PpParams::new(15.0, 1.5, -0.25, 100.0).unwrap();
    for seed in 0..10 {
        let low = simulate_pp(&p, 3000.0, PointCount::Poisson, seed).unwrap();
        let high = low.retain_largest(1000).unwrap();
        let fit = |set: &evscale::data::ExceedanceSet| {
            fit3_mle(&set.exceedances, &ModelKind::exceedances(set.threshold, 100.0).unwrap()).unwrap()
        };
        let (a, b) = (fit(&low), fit(&high));
        let pa = [a.params.location, a.params.scale, a.params.shape];
        let pb = [b.params.location, b.params.scale, b.params.shape];
        for k in 0..3 {
            let gap = (pa[k] - pb[k]).abs();
            let reach = 1.96 * (a.approx_std_errors[k] + b.approx_std_errors[k]);
            assert!(gap <= reach, "seed {seed}, parameter {k}: {} vs {}", pa[k], pb[k]);
        }
    }
}

#[test]
fn simulators_are_seed_deterministic() {
    let p = PpParams::new(15.0, 1.5, -0.25, 10.0).unwrap();
    assert_eq!(
        simulate_pp(&p, 500.0, PointCount::Poisson, 3).unwrap(),
        simulate_pp(&p, 500.0, PointCount::Poisson, 3).unwrap()
    );
    assert_ne!(
        simulate_pp(&p, 500.0, PointCount::Poisson, 3).unwrap(),
        simulate_pp(&p, 500.0, PointCount::Poisson, 4).unwrap()
    );
    assert_eq!(simulate_truncated_normal(50, 1).unwrap(), simulate_truncated_normal(50, 1).unwrap());
    let g = GevParams::new(0.0, 1.0, 0.1).unwrap();
    assert_eq!(simulate_gev(&g, 50, 2).unwrap(), simulate_gev(&g, 50, 2).unwrap());
}

proptest! {
    #[test]
    fn declustering_keeps_raw_maxima(values in prop::collection::vec(0.0f64..10.0, 0..200), u in 2.0f64..8.0, gap in 1usize..8) {
        let s = Series::new(values.clone()).unwrap();
        let raw: Vec<f64> = values.iter().copied().filter(|&x| x > u).collect();
        let clusters = decluster_runs(&s, u, gap).unwrap();
        prop_assert!(clusters.len() <= raw.len());
        for m in &clusters.exceedances {
            prop_assert!(raw.contains(m));
        }
        if !raw.is_empty() {
            let top = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(clusters.exceedances.contains(&top));
        }
    }

    #[test]
    fn block_maxima_dominate_their_blocks(values in prop::collection::vec(-5.0f64..5.0, 1..300), len in 1usize..20) {
        let s = Series::new(values.clone()).unwrap();
        let m = block_maxima(&s, len).unwrap().values;
        prop_assert_eq!(m.len(), values.len() / len);
        for (k, &mx) in m.iter().enumerate() {
            let block = &values[k * len..(k + 1) * len];
            prop_assert!(block.contains(&mx) && block.iter().all(|&v| v <= mx));
        }
    }
}
