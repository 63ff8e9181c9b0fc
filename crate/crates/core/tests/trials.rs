//! Monte Carlo behaviour of the maximum-likelihood estimator.

use homsense_core::detection::default_range;
use homsense_core::{run_trials, run_trials_with_records, DetectorModel, SceneParams, SearchInterval, TrialConfig};

fn config(dx: f64, nu: f64, n: usize, trials: usize, seed: u64) -> TrialConfig {
    TrialConfig {
        scene: SceneParams::gaussian(dx, nu, 1.0).unwrap(),
        detector: DetectorModel::resolving(0.05, default_range(1.0)).unwrap(),
        n_per_trial: n,
        n_trials: trials,
        master_seed: seed,
        search: SearchInterval::default_for(1.0, None).unwrap(),
    }
}

#[test]
fn variance_scales_inversely_with_sample_size() {
    let ns = [300usize, 1000, 3000, 10000];
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let s = run_trials(&config(4.0, 1.0, n, 400, 5)).unwrap();
            ((n as f64).ln(), s.variance.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() <= 0.1, "log-log slope {slope}");
}

#[test]
fn estimator_saturates_the_bound_across_visibilities() {
    for nu in [0.8, 0.9, 1.0] {
        let s = run_trials(&config(4.0, nu, 3000, 4000, 2026)).unwrap();
        println!("nu={nu}: saturation {:.4}, bias {:.2e}", s.crb_saturation, s.bias_relative.unwrap());
        assert!((0.9..=1.05).contains(&s.crb_saturation), "nu={nu}: {s:?}");
    }
}

#[test]
fn trials_are_reproducible_and_ordered() {
    let cfg = config(2.0, 0.9, 500, 20, 99);
    let (a, ra) = run_trials_with_records(&cfg).unwrap();
    let (b, rb) = run_trials_with_records(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    assert!(ra.iter().enumerate().all(|(i, r)| r.trial_index == i));
}
