//! Maximum-likelihood estimation of `|Δx|` and the Monte Carlo trial harness.
//!
//! The model depends on Δx only through `cos(Δk·Δx)`, so the sign of the
//! displacement is not identifiable and every search runs over `[lo, hi]`
//! with `lo ≥ 0`. The likelihood oscillates in Δx with frequencies up to the
//! largest observed `|Δk|`; a dense grid with step `π/(8·max|Δk|)` locates the
//! global peak before a golden-section refinement polishes it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{bin_probability, bucket_probs, DetectorMode, DetectorModel, Outcome, SceneParams};
use crate::error::{Error, Result};
use crate::information::{crb, fisher_for_mode};
use crate::quadrature::compensated_sum;
use crate::rng::derive_seed;
use crate::sampler::{sample_batch, SampleSet};

/// Largest admissible `hi·σ_k`.
pub const SEARCH_CAP: f64 = 50.0;

/// Default upper bound `20/σ_k` when no prior is supplied.
pub const DEFAULT_SEARCH_SPAN: f64 = 20.0;

/// Refinement stops once the bracket is narrower than this, in units of 1/σ_k.
pub const REFINEMENT_WIDTH: f64 = 1e-6;

/// Secondary grid peaks within this many log-units of the maximum raise the
/// multimodality flag.
pub const MULTIMODAL_GAP: f64 = 2.0;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchInterval {
    pub lo: f64,
    pub hi: f64,
}

impl SearchInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::invalid(format!("search interval [{lo}, {hi}] is empty or invalid")));
        }
        Ok(Self { lo, hi })
    }

    /// `[0, 4·prior_max]` if a prior upper bound on `|Δx|` is known, else `[0, 20/σ_k]`.
    pub fn default_for(sigma_k: f64, prior_max: Option<f64>) -> Result<Self> {
        let hi = match prior_max {
            Some(p) => 4.0 * p,
            None => DEFAULT_SEARCH_SPAN / sigma_k,
        };
        Self::new(0.0, hi)
    }

    fn check_cap(&self, sigma_k: f64) -> Result<()> {
        if self.hi * sigma_k > SEARCH_CAP {
            return Err(Error::invalid(format!(
                "search upper bound {}·σ_k exceeds the cap of {SEARCH_CAP}",
                self.hi * sigma_k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub delta_x_hat: f64,
    pub log_likelihood_at_max: f64,
    pub search_interval: [f64; 2],
    pub n_used: usize,
    pub grid_points: usize,
    pub refinement_width: f64,
    pub multimodal_flag: bool,
}

enum Data {
    /// Continuous Δk: (Δk, α) per event.
    Continuous(Vec<(f64, f64)>),
    /// Pixel-snapped Δk: event counts per (bin, outcome).
    Binned(Vec<((f64, f64), Outcome, usize)>),
    Bucket { n_a: usize, n_b: usize },
}

/// Log-likelihood of a sample set as a function of Δx, with data-independent
/// terms (`log C(Δk)/2`) dropped.
///
/// Events flagged lost are excluded and the remaining events are treated as
/// conditioned on detection. For two resolving cameras that normalization is
/// `∫_range C`, independent of Δx, and is dropped too; a single camera sees
/// only bunched pairs, whose detection probability does depend on Δx.
pub struct Likelihood<'a> {
    scene: SceneParams,
    detector: &'a DetectorModel,
    data: Data,
    n_used: usize,
}

impl<'a> Likelihood<'a> {
    pub fn new(samples: &'a SampleSet) -> Result<Self> {
        Self::with_nu(samples, samples.scene.nu)
    }

    /// Likelihood assuming distinguishability `nu` instead of the recorded one.
    pub fn with_nu(samples: &'a SampleSet, nu: f64) -> Result<Self> {
        let scene = SceneParams::new(samples.scene.delta_x, nu, samples.scene.envelope.clone())?;
        let detector = &samples.detector;
        let n_used = samples.n_used();
        if n_used == 0 {
            return Err(Error::NoData);
        }
        let data = match detector.mode {
            DetectorMode::Bucket => {
                let (n_a, n_b) = samples.outcome_counts();
                Data::Bucket { n_a, n_b }
            }
            _ if detector.snap => {
                let mut counts: BTreeMap<(i64, Outcome), ((f64, f64), usize)> = BTreeMap::new();
                let pixel = detector.pixel_dk.expect("validated");
                for e in samples.used() {
                    let dk = e.dk.ok_or(Error::NoData)?;
                    let idx = ((dk - detector.range.0) / pixel).floor() as i64;
                    let bounds = detector.pixel_bounds(dk).expect("validated");
                    counts.entry((idx, e.x)).or_insert((bounds, 0)).1 += 1;
                }
                Data::Binned(counts.into_iter().map(|((_, x), (b, n))| (b, x, n)).collect())
            }
            _ => {
                let mut events = Vec::with_capacity(n_used);
                for e in samples.used() {
                    events.push((e.dk.ok_or(Error::NoData)?, e.x.alpha()));
                }
                Data::Continuous(events)
            }
        };
        Ok(Self {
            scene,
            detector,
            data,
            n_used,
        })
    }

    pub fn n_used(&self) -> usize {
        self.n_used
    }

    /// Largest `|Δk|` the data can resolve; sets the grid step.
    fn max_frequency(&self) -> f64 {
        match &self.data {
            Data::Continuous(ev) => ev.iter().map(|(dk, _)| dk.abs()).fold(0.0, f64::max),
            Data::Binned(bins) => bins
                .iter()
                .map(|((lo, hi), _, _)| lo.abs().max(hi.abs()))
                .fold(0.0, f64::max),
            Data::Bucket { .. } => 0.0,
        }
    }

    fn single_camera_normalizer(&self, delta_x: f64) -> Result<f64> {
        let scene = self.scene.at(delta_x);
        bin_probability(self.detector.range, Outcome::B, &scene)
    }

    pub fn eval(&self, delta_x: f64) -> Result<f64> {
        let nu = self.scene.nu;
        let single = self.detector.mode == DetectorMode::SingleCamera;
        let mut ll = match &self.data {
            Data::Continuous(ev) => {
                compensated_sum(ev.iter().map(|&(dk, a)| (1.0 + a * nu * (dk * delta_x).cos()).max(0.0).ln()))
            }
            Data::Binned(bins) => {
                let scene = self.scene.at(delta_x);
                let mut terms = Vec::with_capacity(bins.len());
                for &(bin, x, n) in bins {
                    terms.push(n as f64 * bin_probability(bin, x, &scene)?.ln());
                }
                compensated_sum(terms)
            }
            Data::Bucket { n_a, n_b } => {
                let p = bucket_probs(&self.scene.at(delta_x))?;
                let term = |n: usize, p: f64| if n == 0 { 0.0 } else { n as f64 * p.ln() };
                term(*n_a, p.p_a) + term(*n_b, p.p_b)
            }
        };
        if single {
            ll -= self.n_used as f64 * self.single_camera_normalizer(delta_x)?.ln();
        }
        Ok(ll)
    }

    /// Values on the uniform grid `lo + j·step`, j = 0..points.
    fn eval_grid(&self, lo: f64, step: f64, points: usize) -> Result<Vec<f64>> {
        match &self.data {
            Data::Continuous(ev) if self.detector.mode == DetectorMode::Resolving => {
                // cos(Δk(lo + jh)) by rotation; exact restart every 64 steps.
                let nu = self.scene.nu;
                let mut acc = vec![0.0; points];
                for &(dk, a) in ev {
                    let (sd, cd) = (dk * step).sin_cos();
                    let mut j = 0;
                    while j < points {
                        let (mut s, mut c) = (dk * (lo + step * j as f64)).sin_cos();
                        let end = (j + 64).min(points);
                        for slot in &mut acc[j..end] {
                            *slot += (1.0 + a * nu * c).max(0.0).ln();
                            let c2 = c * cd - s * sd;
                            s = s * cd + c * sd;
                            c = c2;
                        }
                        j = end;
                    }
                }
                Ok(acc)
            }
            _ => (0..points).map(|j| self.eval(lo + step * j as f64)).collect(),
        }
    }
}

/// `Σ log P_ν(Δk_i, X_i; Δx)` up to Δx-independent constants.
pub fn log_likelihood(delta_x: f64, samples: &SampleSet) -> Result<f64> {
    Likelihood::new(samples)?.eval(delta_x)
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

fn estimate(lik: &Likelihood<'_>, search: SearchInterval) -> Result<EstimationResult> {
    let sigma_k = lik.scene.sigma_k();
    search.check_cap(sigma_k)?;
    let span = search.hi - search.lo;
    let k_max = lik.max_frequency();
    let mut step = span / 64.0;
    if k_max > 0.0 {
        step = step.min(std::f64::consts::PI / (8.0 * k_max));
    }
    let intervals = (span / step).ceil() as usize;
    let step = span / intervals as f64;
    let points = intervals + 1;
    let grid = lik.eval_grid(search.lo, step, points)?;
    let at = |j: usize| if j + 1 == points { search.hi } else { search.lo + step * j as f64 };

    // First index wins ties: smallest Δx.
    let mut best = 0;
    for (j, &v) in grid.iter().enumerate() {
        if v > grid[best] || (grid[best].is_nan() && !v.is_nan()) {
            best = j;
        }
    }
    let vmax = grid[best];
    let multimodal = (0..points).any(|j| {
        if j == best || (j as isize - best as isize).abs() <= 1 {
            return false;
        }
        let left = if j == 0 { f64::NEG_INFINITY } else { grid[j - 1] };
        let right = if j + 1 == points { f64::NEG_INFINITY } else { grid[j + 1] };
        grid[j] >= left && grid[j] >= right && grid[j] >= vmax - MULTIMODAL_GAP && grid[j].is_finite()
    });

    let tol = REFINEMENT_WIDTH / sigma_k;
    let a = at(best.saturating_sub(1));
    let b = at((best + 1).min(points - 1));
    let f = |x: f64| lik.eval(x);
    let (xr, fr) = golden_section(f, a, b, tol)?;

    let mut candidates = vec![(at(best), lik.eval(at(best))?), (xr, fr)];
    candidates.push((search.lo, lik.eval(search.lo)?));
    candidates.push((search.hi, lik.eval(search.hi)?));
    let mut chosen = candidates[0];
    for &c in &candidates[1..] {
        if c.1 > chosen.1 || (c.1 == chosen.1 && c.0 < chosen.0) {
            chosen = c;
        }
    }
    Ok(EstimationResult {
        delta_x_hat: chosen.0,
        log_likelihood_at_max: chosen.1,
        search_interval: [search.lo, search.hi],
        n_used: lik.n_used(),
        grid_points: points,
        refinement_width: tol,
        multimodal_flag: multimodal,
    })
}

/// Maximum-likelihood estimate of `|Δx|` on `search`.
pub fn mle(samples: &SampleSet, search: SearchInterval) -> Result<EstimationResult> {
    estimate(&Likelihood::new(samples)?, search)
}

/// Re-estimates under a range of assumed ν values. A diagnostic for
/// miscalibrated distinguishability, not an estimator of ν.
pub fn nu_sensitivity(samples: &SampleSet, nus: &[f64], search: SearchInterval) -> Result<Vec<(f64, EstimationResult)>> {
    nus.iter()
        .map(|&nu| Ok((nu, estimate(&Likelihood::with_nu(samples, nu)?, search)?)))
        .collect()
}

/// Closed-form inversion of the Gaussian HOM dip from bucket counts.
pub fn mle_bucket(n_a: usize, n_b: usize, nu: f64, sigma_k: f64) -> Result<EstimationResult> {
    let n = n_a + n_b;
    if n == 0 {
        return Err(Error::NoData);
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::invalid(format!("nu must lie in [0, 1], got {nu}")));
    }
    crate::wavepacket::qfi(sigma_k)?;
    let p_a = n_a as f64 / n as f64;
    let visibility = 1.0 - 2.0 * p_a;
    if visibility <= 0.0 {
        return Err(Error::OutOfModel {
            reason: format!("coincidence fraction {p_a} is at least 1/2"),
            boundary: f64::INFINITY,
        });
    }
    if visibility > nu {
        return Err(Error::OutOfModel {
            reason: format!("observed visibility {visibility} exceeds nu = {nu}"),
            boundary: 0.0,
        });
    }
    let delta_x_hat = (-(visibility / nu).ln()).max(0.0).sqrt() / sigma_k;
    let scene = SceneParams::gaussian(delta_x_hat, nu, sigma_k)?;
    let p = bucket_probs(&scene)?;
    let term = |n: usize, p: f64| if n == 0 { 0.0 } else { n as f64 * p.ln() };
    Ok(EstimationResult {
        delta_x_hat,
        log_likelihood_at_max: term(n_a, p.p_a) + term(n_b, p.p_b),
        search_interval: [0.0, SEARCH_CAP / sigma_k],
        n_used: n,
        grid_points: 0,
        refinement_width: 0.0,
        multimodal_flag: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub scene: SceneParams,
    pub detector: DetectorModel,
    pub n_per_trial: usize,
    pub n_trials: usize,
    pub master_seed: u64,
    pub search: SearchInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialStatistics {
    pub n_per_trial: usize,
    pub n_trials: usize,
    pub mean_estimate: f64,
    pub variance: f64,
    /// `E[est]/|Δx| − 1`; absent when Δx = 0.
    pub bias_relative: Option<f64>,
    /// CRB / variance
    pub crb_saturation: f64,
    pub crb_reference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub estimate: f64,
    pub loglik: f64,
}

/// Independent sample-and-estimate cycles, trial `i` seeded from
/// `(master_seed, i)`.
pub fn run_trials(config: &TrialConfig) -> Result<TrialStatistics> {
    Ok(run_trials_with_records(config)?.0)
}

pub fn run_trials_with_records(config: &TrialConfig) -> Result<(TrialStatistics, Vec<TrialRecord>)> {
    if config.n_trials < 2 {
        return Err(Error::invalid("at least 2 trials are needed for a variance"));
    }
    let info = fisher_for_mode(config.detector.mode, &config.scene.at(config.scene.delta_x.abs()))?;
    let crb_reference = crb(info, config.n_per_trial)?;
    config.search.check_cap(config.scene.sigma_k())?;

    let records: Vec<TrialRecord> = (0..config.n_trials)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(config.master_seed, i as u64);
            let samples = sample_batch(config.n_per_trial, seed, &config.scene, &config.detector)?;
            let r = mle(&samples, config.search)?;
            Ok(TrialRecord {
                trial_index: i,
                estimate: r.delta_x_hat,
                loglik: r.log_likelihood_at_max,
            })
        })
        .collect::<Result<_>>()?;

    let n = records.len() as f64;
    let mean = compensated_sum(records.iter().map(|r| r.estimate)) / n;
    let variance = compensated_sum(records.iter().map(|r| (r.estimate - mean).powi(2))) / (n - 1.0);
    let truth = config.scene.delta_x.abs();
    let stats = TrialStatistics {
        n_per_trial: config.n_per_trial,
        n_trials: config.n_trials,
        mean_estimate: mean,
        variance,
        bias_relative: (truth > 0.0).then(|| mean / truth - 1.0),
        crb_saturation: crb_reference / variance,
        crb_reference,
    };
    Ok((stats, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::default_range;
    use crate::sampler::{DetectionEvent, SampleSet};
    use std::f64::consts::PI;

    fn scene(dx: f64, nu: f64) -> SceneParams {
        SceneParams::gaussian(dx, nu, 1.0).unwrap()
    }

    fn resolving() -> DetectorModel {
        DetectorModel::resolving(0.05, (-12.0, 12.0)).unwrap()
    }

    fn single_event(dk: f64, x: Outcome, nu: f64) -> SampleSet {
        SampleSet {
            events: vec![DetectionEvent { dk: Some(dk), x, lost: false }],
            n_requested: 1,
            seed: 0,
            scene: scene(1.0, nu),
            detector: resolving(),
        }
    }

    #[test]
    fn likelihood_flat_without_interference() {
        let s = sample_batch(500, 1, &scene(3.0, 0.0), &resolving()).unwrap();
        let l0 = log_likelihood(0.0, &s).unwrap();
        for dx in [0.5, 2.0, 7.0] {
            assert_eq!(log_likelihood(dx, &s).unwrap(), l0);
        }
    }

    #[test]
    fn single_bunched_event_peaks_at_zero() {
        let s = single_event(1.0, Outcome::B, 1.0);
        let r = mle(&s, SearchInterval::new(0.0, PI).unwrap()).unwrap();
        assert!(r.delta_x_hat < 1e-5, "{}", r.delta_x_hat);
        assert!((r.log_likelihood_at_max - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn all_lost_is_no_data() {
        let mut s = single_event(1.0, Outcome::B, 1.0);
        s.events[0].lost = true;
        assert!(matches!(log_likelihood(1.0, &s), Err(Error::NoData)));
    }

    #[test]
    fn truth_beats_half_truth() {
        let wins = (0..100)
            .filter(|&seed| {
                let s = sample_batch(3000, seed, &scene(4.0, 1.0), &resolving()).unwrap();
                log_likelihood(4.0, &s).unwrap() > log_likelihood(2.0, &s).unwrap()
            })
            .count();
        assert!(wins >= 99, "{wins}");
    }

    #[test]
    fn dip_bottom_estimate() {
        let s = sample_batch(10_000, 3, &scene(0.0, 1.0), &resolving()).unwrap();
        let r = mle(&s, SearchInterval::default_for(1.0, None).unwrap()).unwrap();
        assert!(r.delta_x_hat < 0.05, "{}", r.delta_x_hat);
    }

    #[test]
    fn sign_is_not_identifiable() {
        let s = sample_batch(3000, 4, &scene(-4.0, 1.0), &resolving()).unwrap();
        let r = mle(&s, SearchInterval::new(0.0, 10.0).unwrap()).unwrap();
        assert!((r.delta_x_hat - 4.0).abs() < 0.1, "{}", r.delta_x_hat);
    }

    #[test]
    fn estimate_inside_interval_and_dominates_endpoints() {
        for seed in 0..5 {
            let s = sample_batch(300, seed, &scene(2.0, 0.9), &resolving()).unwrap();
            let search = SearchInterval::new(0.5, 6.0).unwrap();
            let r = mle(&s, search).unwrap();
            assert!(r.delta_x_hat >= 0.5 && r.delta_x_hat <= 6.0);
            assert!(r.log_likelihood_at_max >= log_likelihood(0.5, &s).unwrap());
            assert!(r.log_likelihood_at_max >= log_likelihood(6.0, &s).unwrap());
        }
    }

    #[test]
    fn grid_matches_direct_evaluation() {
        let s = sample_batch(200, 9, &scene(3.0, 0.8), &resolving()).unwrap();
        let lik = Likelihood::new(&s).unwrap();
        let grid = lik.eval_grid(0.1, 0.037, 300).unwrap();
        for (j, g) in grid.iter().enumerate().step_by(17) {
            let direct = lik.eval(0.1 + 0.037 * j as f64).unwrap();
            assert!((g - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn invalid_search_intervals() {
        assert!(SearchInterval::new(1.0, 1.0).is_err());
        assert!(SearchInterval::new(-1.0, 1.0).is_err());
        let s = single_event(1.0, Outcome::B, 1.0);
        assert!(mle(&s, SearchInterval::new(0.0, 60.0).unwrap()).is_err());
        assert_eq!(SearchInterval::default_for(2.0, None).unwrap().hi, 10.0);
        assert_eq!(SearchInterval::default_for(2.0, Some(1.5)).unwrap().hi, 6.0);
    }

    #[test]
    fn bucket_closed_form() {
        let r = mle_bucket(0, 1000, 1.0, 1.0).unwrap();
        assert_eq!(r.delta_x_hat, 0.0);

        // p̂_A = (1 − e⁻¹)/2 exactly is not a ratio of integers; use the inverse map.
        let p_a = (1.0 - (-1f64).exp()) / 2.0;
        let n = 1_000_000_000usize;
        let n_a = (p_a * n as f64).round() as usize;
        let r = mle_bucket(n_a, n - n_a, 1.0, 1.0).unwrap();
        assert!((r.delta_x_hat - 1.0).abs() < 1e-8);

        assert!(matches!(mle_bucket(49, 51, 0.001, 1.0), Err(Error::OutOfModel { .. })));
        assert!(matches!(mle_bucket(60, 40, 1.0, 1.0), Err(Error::OutOfModel { .. })));
        assert!(matches!(mle_bucket(0, 0, 1.0, 1.0), Err(Error::NoData)));
    }

    #[test]
    fn bucket_grid_agrees_with_closed_form() {
        let s = sample_batch(20_000, 5, &scene(0.8, 0.95), &DetectorModel::bucket()).unwrap();
        let (n_a, n_b) = s.outcome_counts();
        let closed = mle_bucket(n_a, n_b, 0.95, 1.0).unwrap();
        let grid = mle(&s, SearchInterval::new(0.0, 5.0).unwrap()).unwrap();
        assert!((closed.delta_x_hat - grid.delta_x_hat).abs() < 1e-5);
    }

    #[test]
    fn binned_likelihood_tracks_continuous() {
        let det = DetectorModel::resolving(0.02, default_range(1.0)).unwrap().with_snap(true).unwrap();
        let s = sample_batch(2000, 6, &scene(3.0, 1.0), &det).unwrap();
        let r = mle(&s, SearchInterval::new(1.0, 5.0).unwrap()).unwrap();
        // Within a few CRB widths (√(1/(2·2000)) ≈ 0.016).
        assert!((r.delta_x_hat - 3.0).abs() < 0.08, "{}", r.delta_x_hat);
    }

    #[test]
    fn single_camera_estimate() {
        let det = DetectorModel::single_camera(0.05, (-12.0, 12.0)).unwrap();
        let s = sample_batch(8000, 7, &scene(2.0, 1.0), &det).unwrap();
        let r = mle(&s, SearchInterval::new(0.5, 5.0).unwrap()).unwrap();
        assert!((r.delta_x_hat - 2.0).abs() < 0.1, "{}", r.delta_x_hat);
    }

    #[test]
    fn trials_reproducible_and_json() {
        let cfg = TrialConfig {
            scene: scene(2.0, 1.0),
            detector: resolving(),
            n_per_trial: 200,
            n_trials: 8,
            master_seed: 77,
            search: SearchInterval::new(0.5, 6.0).unwrap(),
        };
        let a = run_trials_with_records(&cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| run_trials_with_records(&cfg).unwrap());
        assert_eq!(a, b);
        assert!(a.0.variance >= 0.0);
        let json = serde_json::to_string(&a.0).unwrap();
        assert!(json.contains("\"crb_saturation\""));
        let mut bad = cfg.clone();
        bad.n_trials = 1;
        assert!(run_trials(&bad).is_err());
    }

    #[test]
    fn nu_sweep_runs() {
        let s = sample_batch(1000, 8, &scene(2.0, 0.9), &resolving()).unwrap();
        let out = nu_sensitivity(&s, &[0.8, 0.9, 1.0], SearchInterval::new(0.5, 5.0).unwrap()).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|(_, r)| (r.delta_x_hat - 2.0).abs() < 0.3));
    }
}
