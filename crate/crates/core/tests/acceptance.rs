//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p homsense-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use homsense_core::detection::{bin_probability, bucket_probs, default_range, joint_density, joint_density_dx};
use homsense_core::estimator::{run_trials, SearchInterval, TrialConfig};
use homsense_core::information::{
    crb, fisher_nonresolving, fisher_nonresolving_quadrature, fisher_partial, fisher_resolving,
    fisher_resolving_quadrature,
};
use homsense_core::sampler::sample_batch;
use homsense_core::units::fourier_limited_sigma_k;
use homsense_core::{rng, DetectorModel, Outcome, SceneParams};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn gaussian(dx: f64, nu: f64) -> SceneParams {
    SceneParams::gaussian(dx, nu, 1.0).unwrap()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn qfi_saturation() -> Check {
    let mut worst: f64 = 0.0;
    for dx in [0.1, 1.0, 4.0, 20.0] {
        let s = gaussian(dx, 1.0);
        let analytic = fisher_resolving(&s).map_err(|e| e.to_string())?;
        let quad = fisher_resolving_quadrature(&s).map_err(|e| e.to_string())?;
        worst = worst.max((analytic - 2.0).abs()).max((quad - 2.0).abs());
    }
    ensure(worst <= 1e-8, format!("max |F - 2| = {worst:.2e} (tol 1e-8)"))
}

fn asymptote() -> Check {
    let mut worst_far: f64 = 0.0;
    for nu in [0.3, 0.6, 0.9] {
        let ratio = fisher_resolving(&gaussian(20.0, nu)).unwrap() / 2.0;
        worst_far = worst_far.max((ratio - (1.0 - (1.0 - nu * nu).sqrt())).abs());
    }
    let bound = 1.0 - (1.0f64 - 0.81).sqrt();
    let mut min_ratio = f64::INFINITY;
    for i in 0..=110 {
        let dx = 0.5 + 0.05 * i as f64;
        min_ratio = min_ratio.min(fisher_resolving(&gaussian(dx, 0.9)).unwrap() / 2.0);
    }
    ensure(
        worst_far <= 0.01 && min_ratio >= bound - 1e-3,
        format!(
            "max deviation at σΔx=20: {worst_far:.2e} (tol 0.01); min F/H on [0.5, 6] at ν=0.9: {min_ratio:.6} (floor {:.6})",
            bound - 1e-3
        ),
    )
}

fn crb_saturation_experiment() -> Check {
    let cfg = TrialConfig {
        scene: gaussian(4.0, 1.0),
        detector: DetectorModel::resolving(0.05, default_range(1.0)).unwrap(),
        n_per_trial: 3000,
        n_trials: 4000,
        master_seed: 2026,
        search: SearchInterval::default_for(1.0, None).unwrap(),
    };
    let stats = run_trials(&cfg).map_err(|e| e.to_string())?;
    let bias = stats.bias_relative.unwrap();
    ensure(
        (0.90..=1.05).contains(&stats.crb_saturation) && bias.abs() <= 0.005,
        format!(
            "saturation {:.4} (band [0.90, 1.05]), relative bias {bias:.2e} (|·| ≤ 0.005), {} trials",
            stats.crb_saturation, stats.n_trials
        ),
    )
}

fn physical_units_headline() -> Check {
    let sigma_x_nm = 100.0;
    let sigma_k = fourier_limited_sigma_k(sigma_x_nm).unwrap();
    let h = homsense_core::qfi(sigma_k).unwrap();
    let predicted = crb(h, 3000).unwrap().sqrt();

    let scene = SceneParams::gaussian(800.0, 1.0, sigma_k).unwrap();
    let cfg = TrialConfig {
        detector: DetectorModel::resolving(0.05 * sigma_k, default_range(sigma_k)).unwrap(),
        scene,
        n_per_trial: 3000,
        n_trials: 1000,
        master_seed: 100,
        search: SearchInterval::default_for(sigma_k, None).unwrap(),
    };
    let stats = run_trials(&cfg).map_err(|e| e.to_string())?;
    let sd = stats.variance.sqrt();
    ensure(
        (predicted - 2.58).abs() <= 0.02 && (sd - 2.58).abs() <= 0.1 * 2.58,
        format!("predicted √CRB {predicted:.4} nm (2.58 ± 0.02); Monte Carlo sd {sd:.4} nm (2.58 ± 10%)"),
    )
}

fn partial_ratios() -> Check {
    let ratio = |nu: f64| {
        let s = gaussian(1.5, nu);
        fisher_partial(Outcome::B, &s).unwrap() / fisher_resolving(&s).unwrap()
    };
    let (r1, r09) = (ratio(1.0), ratio(0.9));
    let mut worst_gap = f64::INFINITY;
    for nu in [0.5, 0.9, 1.0] {
        for i in 0..=110 {
            let s = gaussian(0.5 + 0.05 * i as f64, nu);
            let gap = fisher_partial(Outcome::B, &s).unwrap() - fisher_partial(Outcome::A, &s).unwrap();
            worst_gap = worst_gap.min(gap);
        }
    }
    ensure(
        (r1 - 0.7).abs() <= 0.05 && (r09 - 0.6).abs() <= 0.05 && worst_gap >= 0.0,
        format!("R(ν=1) = {r1:.4}, R(ν=0.9) = {r09:.4}; min F(B) − F(A) on [0.5, 6] = {worst_gap:.3e}"),
    )
}

fn bucket_small_separation() -> Check {
    let f = fisher_nonresolving(&gaussian(0.01, 1.0)).unwrap();
    let rel_small = (f - 2.0).abs() / 2.0;
    let mut worst: f64 = 0.0;
    for nu in [0.5, 0.9, 1.0] {
        for i in 0..=40 {
            let s = gaussian(0.1 * i as f64, nu);
            let closed = fisher_nonresolving(&s).unwrap();
            let quad = fisher_nonresolving_quadrature(&s).unwrap();
            let rel = if closed == 0.0 { quad.abs() } else { (closed - quad).abs() / closed };
            worst = worst.max(rel);
        }
    }
    ensure(
        rel_small <= 1e-3 && worst <= 1e-6,
        format!("|F_nr/H − 1| at σΔx=0.01: {rel_small:.2e} (≤ 1e-3); closed form vs quadrature: {worst:.2e} (≤ 1e-6)"),
    )
}

fn decomposition_identity() -> Check {
    let mut r = rng::stream(7, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let nu: f64 = r.random_range(0.05..=1.0);
        let dx: f64 = r.random_range(0.3..10.0);
        let s = gaussian(dx, nu);
        let lhs = fisher_partial(Outcome::A, &s).unwrap() + fisher_partial(Outcome::B, &s).unwrap();
        let rhs = fisher_resolving(&s).unwrap() - fisher_nonresolving(&s).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    ensure(worst <= 1e-6, format!("max relative mismatch over 100 scenes: {worst:.2e} (≤ 1e-6)"))
}

fn sampler_exactness() -> Check {
    let scene = gaussian(4.0, 1.0);
    let det = DetectorModel::resolving(0.05, (-12.0, 12.0)).unwrap();
    let n = 1_000_000;
    let samples = sample_batch(n, 424_242, &scene, &det).map_err(|e| e.to_string())?;

    // 64 Δk bins: 62 equal-width bins on [−6, 6] and the two tails.
    let mut edges = vec![-12.0];
    edges.extend((0..=62).map(|i| -6.0 + 12.0 * i as f64 / 62.0));
    edges.push(12.0);
    let bins = edges.len() - 1;
    let mut counts = vec![[0usize; 2]; bins];
    for e in samples.used() {
        let dk = e.dk.unwrap();
        let b = edges.partition_point(|&x| x <= dk).clamp(1, bins) - 1;
        counts[b][(e.x == Outcome::B) as usize] += 1;
    }
    let mut chi2 = 0.0;
    let mut min_expected = f64::INFINITY;
    for b in 0..bins {
        for x in Outcome::ALL {
            let p = bin_probability((edges[b], edges[b + 1]), x, &scene).unwrap();
            let expected = p * n as f64;
            min_expected = min_expected.min(expected);
            let obs = counts[b][(x == Outcome::B) as usize] as f64;
            chi2 += (obs - expected).powi(2) / expected;
        }
    }
    let dof = (2 * bins - 1) as f64;
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.99);

    let mut worst_z: f64 = 0.0;
    for (dx, nu, seed) in [(0.5, 1.0, 1u64), (1.0, 0.9, 2), (2.0, 0.6, 3)] {
        let s = gaussian(dx, nu);
        let m = 100_000;
        let b = sample_batch(m, seed, &s, &DetectorModel::bucket()).unwrap();
        let (n_a, _) = b.outcome_counts();
        let p = bucket_probs(&s).unwrap().p_a;
        let z = (n_a as f64 - m as f64 * p).abs() / (m as f64 * p * (1.0 - p)).sqrt();
        worst_z = worst_z.max(z);
    }
    ensure(
        chi2 < critical && worst_z <= 3.0,
        format!(
            "χ² = {chi2:.1} < {critical:.1} (dof {dof}, min expected {min_expected:.1}); bucket max |z| = {worst_z:.2} (≤ 3)"
        ),
    )
}

fn score_correctness() -> Check {
    let mut r = rng::stream(9, 0);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut floor_limited = 0;
    for _ in 0..1000 {
        let nu: f64 = r.random_range(0.05..=1.0);
        let dx: f64 = r.random_range(-10.0..10.0);
        let dk: f64 = r.random_range(-8.0..8.0);
        let x = if r.random::<bool>() { Outcome::A } else { Outcome::B };
        let p = joint_density(dk, x, &gaussian(dx, nu));
        let fd = (joint_density(dk, x, &gaussian(dx + h, nu)) - joint_density(dk, x, &gaussian(dx - h, nu))) / (2.0 * h);
        let an = joint_density_dx(dk, x, &gaussian(dx, nu));
        // rounding in the difference quotient itself, ~ε·P/h
        let noise = 8.0 * f64::EPSILON * p / h;
        let err = (fd - an).abs();
        if err > 1e-5 * an.abs() {
            floor_limited += 1;
        }
        worst = worst.max(err / (1e-5 * an.abs() + noise));
    }
    ensure(
        worst <= 1.0,
        format!(
            "max error / (1e-5·|score| + difference-quotient rounding) = {worst:.3}; {floor_limited} of 1000 points at the rounding floor"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 QFI saturation at ν=1", qfi_saturation),
        ("AC2 large-separation asymptote", asymptote),
        ("AC3 CRB saturation of the MLE", crb_saturation_experiment),
        ("AC4 physical-units headline", physical_units_headline),
        ("AC5 partial-FI ratios", partial_ratios),
        ("AC6 bucket small-separation limit", bucket_small_separation),
        ("AC7 decomposition identity", decomposition_identity),
        ("AC8 sampler exactness", sampler_exactness),
        ("AC9 score correctness", score_correctness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
