//! Detection probabilities for the momentum-resolved, per-photon and bucket
//! detector variants, and the pixel resolution check.
//!
//! The central density is
//!
//! ```text
//! P_ν(Δk, X) = ½ C(Δk) (1 + α(X) ν cos(Δk·Δx)),   α(A) = −1, α(B) = +1
//! ```
//!
//! where `X = A` means the photons left by different ports (different cameras)
//! and `X = B` means they bunched into the same port.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Integrator;
use crate::units::PhysicalSetup;
use crate::wavepacket::{BeatEnvelope, MomentumDistribution};

/// Factor by which pixel pitch must undercut each resolved feature.
pub const RESOLUTION_MARGIN: f64 = 10.0;

/// Absolute tolerance for bin and bucket probabilities.
pub const PROBABILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    /// Photons at different cameras (coincidence).
    A,
    /// Photons at the same camera (bunching).
    B,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::A, Outcome::B];

    pub fn alpha(self) -> f64 {
        match self {
            Outcome::A => -1.0,
            Outcome::B => 1.0,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::A => "A",
            Outcome::B => "B",
        })
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Outcome::A),
            "B" | "b" => Ok(Outcome::B),
            other => Err(Error::invalid(format!("unknown outcome {other:?}, expected A or B"))),
        }
    }
}

/// True displacement, distinguishability and envelope of one configuration.
///
/// Only `|Δx|` affects any probability.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub delta_x: f64,
    pub nu: f64,
    pub envelope: BeatEnvelope,
}

impl SceneParams {
    pub fn new(delta_x: f64, nu: f64, envelope: BeatEnvelope) -> Result<Self> {
        if !delta_x.is_finite() {
            return Err(Error::invalid(format!("delta_x must be finite, got {delta_x}")));
        }
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::invalid(format!("nu must lie in [0, 1], got {nu}")));
        }
        Ok(Self {
            delta_x,
            nu,
            envelope,
        })
    }

    pub fn gaussian(delta_x: f64, nu: f64, sigma_k: f64) -> Result<Self> {
        Self::new(delta_x, nu, BeatEnvelope::gaussian(sigma_k)?)
    }

    /// Same envelope and ν at a different displacement.
    pub fn at(&self, delta_x: f64) -> Self {
        Self {
            delta_x,
            ..self.clone()
        }
    }

    pub fn sigma_k(&self) -> f64 {
        self.envelope.sigma_k()
    }

    pub fn qfi(&self) -> f64 {
        self.envelope.qfi()
    }
}

/// `P_ν(Δk, X)`.
pub fn joint_density(dk: f64, x: Outcome, scene: &SceneParams) -> f64 {
    0.5 * scene.envelope.value(dk) * (1.0 + x.alpha() * scene.nu * (dk * scene.delta_x).cos())
}

/// Analytic `∂P_ν(Δk, X)/∂Δx = −½ α ν C(Δk) Δk sin(Δk·Δx)`.
pub fn joint_density_dx(dk: f64, x: Outcome, scene: &SceneParams) -> f64 {
    -0.5 * x.alpha() * scene.nu * scene.envelope.value(dk) * dk * (dk * scene.delta_x).sin()
}

/// Probability of bunching given the momentum difference.
pub fn bunching_probability(dk: f64, scene: &SceneParams) -> f64 {
    0.5 * (1.0 + scene.nu * (dk * scene.delta_x).cos())
}

/// Per-photon density `½ |φ(k)|² |φ(k′)|² (1 + α ν cos((k − k′)Δx))`.
pub fn joint_density_kk(
    k: f64,
    kp: f64,
    x: Outcome,
    scene: &SceneParams,
    dist: &MomentumDistribution,
) -> f64 {
    0.5 * dist.density(k)
        * dist.density(kp)
        * (1.0 + x.alpha() * scene.nu * ((k - kp) * scene.delta_x).cos())
}

/// Integrator suited to integrands carrying `cos(Δk·Δx)`: at least eight
/// panels per beat period.
pub(crate) fn beat_integrator(delta_x: f64, abs_tol: f64, rel_tol: f64) -> Integrator {
    let q = Integrator::with_tolerance(abs_tol, rel_tol);
    if delta_x != 0.0 {
        q.max_panel(PI / (8.0 * delta_x.abs()))
    } else {
        q
    }
}

/// Integrates `f` over the envelope support `[−cutoff, cutoff]`, honouring
/// table knots and beat periods.
pub(crate) fn integrate_over_envelope<F: Fn(f64) -> f64>(
    envelope: &BeatEnvelope,
    delta_x: f64,
    abs_tol: f64,
    rel_tol: f64,
    f: F,
) -> Result<f64> {
    let cut = envelope.cutoff();
    integrate_window(envelope, delta_x, -cut, cut, abs_tol, rel_tol, f)
}

pub(crate) fn integrate_window<F: Fn(f64) -> f64>(
    envelope: &BeatEnvelope,
    delta_x: f64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    f: F,
) -> Result<f64> {
    let cut = envelope.cutoff();
    let (lo, hi) = (lo.max(-cut), hi.min(cut));
    if lo >= hi {
        return Ok(0.0);
    }
    let breaks = envelope.breakpoints(lo, hi);
    Ok(beat_integrator(delta_x, abs_tol, rel_tol)
        .integrate(f, lo, hi, &breaks)?
        .value)
}

/// `∫ C(Δk) cos(Δk·Δx) dΔk`, the HOM-dip profile.
pub fn envelope_cos_transform(envelope: &BeatEnvelope, delta_x: f64) -> Result<f64> {
    if let Some(v) = envelope.cos_transform_closed(delta_x) {
        return Ok(v);
    }
    integrate_over_envelope(envelope, delta_x, 1e-14, 1e-13, |dk| {
        envelope.value(dk) * (dk * delta_x).cos()
    })
}

/// `∫ C(Δk) Δk sin(Δk·Δx) dΔk = −d/dΔx ∫ C cos`.
pub fn envelope_sin_moment(envelope: &BeatEnvelope, delta_x: f64) -> Result<f64> {
    if let BeatEnvelope::GaussianClosedForm { sigma_k } = envelope {
        let s2 = sigma_k * sigma_k;
        return Ok(2.0 * s2 * delta_x * (-s2 * delta_x * delta_x).exp());
    }
    integrate_over_envelope(envelope, delta_x, 1e-14, 1e-13, |dk| {
        envelope.value(dk) * dk * (dk * delta_x).sin()
    })
}

/// Outcome probabilities seen by non-resolving (bucket) detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BucketProbs {
    pub p_a: f64,
    pub p_b: f64,
}

impl BucketProbs {
    pub fn get(&self, x: Outcome) -> f64 {
        match x {
            Outcome::A => self.p_a,
            Outcome::B => self.p_b,
        }
    }
}

pub fn bucket_probs(scene: &SceneParams) -> Result<BucketProbs> {
    let dip = envelope_cos_transform(&scene.envelope, scene.delta_x)?;
    Ok(BucketProbs {
        p_a: 0.5 * (1.0 - scene.nu * dip),
        p_b: 0.5 * (1.0 + scene.nu * dip),
    })
}

/// Mass of `P_ν(·, X)` on `[lo, hi]`.
pub fn bin_probability(bin: (f64, f64), x: Outcome, scene: &SceneParams) -> Result<f64> {
    let (lo, hi) = bin;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty bin [{lo}, {hi}]")));
    }
    integrate_window(
        &scene.envelope,
        scene.delta_x,
        lo,
        hi,
        PROBABILITY_TOL,
        1e-12,
        |dk| joint_density(dk, x, scene),
    )
}

/// Envelope mass on `[lo, hi]`, i.e. the probability that Δk lands there
/// regardless of outcome.
pub fn envelope_mass(envelope: &BeatEnvelope, lo: f64, hi: f64) -> Result<f64> {
    integrate_window(envelope, 0.0, lo, hi, PROBABILITY_TOL, 1e-12, |dk| envelope.value(dk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorMode {
    /// Two momentum-resolving cameras, one per output port.
    Resolving,
    /// Two non-resolving detectors; only the outcome is recorded.
    Bucket,
    /// One momentum-resolving camera on a single output port.
    SingleCamera,
}

impl fmt::Display for DetectorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorMode::Resolving => "resolving",
            DetectorMode::Bucket => "bucket",
            DetectorMode::SingleCamera => "single-camera",
        })
    }
}

impl FromStr for DetectorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "resolving" => Ok(Self::Resolving),
            "bucket" => Ok(Self::Bucket),
            "single-camera" | "single_camera" => Ok(Self::SingleCamera),
            other => Err(Error::invalid(format!(
                "unknown detector mode {other:?} (resolving, bucket, single-camera)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    pub mode: DetectorMode,
    /// Momentum pitch δk; unused for bucket detectors.
    pub pixel_dk: Option<f64>,
    /// Sensing range in Δk.
    pub range: (f64, f64),
    /// Snap recorded Δk to pixel centres.
    pub snap: bool,
    pub physical: Option<PhysicalSetup>,
}

/// `[−6√2 σ_k, +6√2 σ_k]`.
pub fn default_range(sigma_k: f64) -> (f64, f64) {
    let half = 6.0 * std::f64::consts::SQRT_2 * sigma_k;
    (-half, half)
}

impl DetectorModel {
    pub fn new(mode: DetectorMode, pixel_dk: Option<f64>, range: (f64, f64)) -> Result<Self> {
        let det = Self {
            mode,
            pixel_dk,
            range,
            snap: false,
            physical: None,
        };
        det.validate()?;
        Ok(det)
    }

    pub fn resolving(pixel_dk: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(DetectorMode::Resolving, Some(pixel_dk), range)
    }

    pub fn single_camera(pixel_dk: f64, range: (f64, f64)) -> Result<Self> {
        Self::new(DetectorMode::SingleCamera, Some(pixel_dk), range)
    }

    pub fn bucket() -> Self {
        Self {
            mode: DetectorMode::Bucket,
            pixel_dk: None,
            range: (f64::NEG_INFINITY, f64::INFINITY),
            snap: false,
            physical: None,
        }
    }

    /// Camera pair whose pitch and range follow from a lab geometry.
    pub fn from_physical(mode: DetectorMode, setup: PhysicalSetup, range: (f64, f64)) -> Result<Self> {
        let mut det = Self::new(mode, Some(setup.momentum_pitch()), range)?;
        det.physical = Some(setup);
        Ok(det)
    }

    pub fn with_snap(mut self, snap: bool) -> Result<Self> {
        if snap && self.pixel_dk.is_none() {
            return Err(Error::invalid("pixel snapping needs a pixel pitch"));
        }
        self.snap = snap;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode != DetectorMode::Bucket {
            match self.pixel_dk {
                Some(p) if p.is_finite() && p > 0.0 => {}
                Some(p) => return Err(Error::invalid(format!("pixel pitch must be positive, got {p}"))),
                None => return Err(Error::invalid(format!("{} detectors need a pixel pitch", self.mode))),
            }
            if !(self.range.0 < self.range.1) || self.range.0.is_nan() {
                return Err(Error::invalid(format!(
                    "detector range [{}, {}] is empty",
                    self.range.0, self.range.1
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, dk: f64) -> bool {
        dk >= self.range.0 && dk <= self.range.1
    }

    /// Centre of the pixel containing `dk`, counted from the range's lower edge.
    pub fn pixel_centre(&self, dk: f64) -> f64 {
        match self.pixel_dk {
            Some(p) => {
                let lo = self.range.0;
                let idx = ((dk - lo) / p).floor();
                lo + (idx + 0.5) * p
            }
            None => dk,
        }
    }

    /// Pixel edges around a snapped value.
    pub fn pixel_bounds(&self, centre: f64) -> Option<(f64, f64)> {
        self.pixel_dk.map(|p| (centre - 0.5 * p, centre + 0.5 * p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    /// σ_k / δk
    pub margin_envelope: f64,
    /// (2π/|Δx|) / δk, infinite at Δx = 0
    pub margin_beats: f64,
    pub pass: bool,
}

pub fn check_resolution(det: &DetectorModel, scene: &SceneParams) -> Result<ResolutionReport> {
    let pixel = det
        .pixel_dk
        .ok_or_else(|| Error::invalid("resolution check needs a pixel pitch"))?;
    let margin_envelope = scene.sigma_k() / pixel;
    let margin_beats = if scene.delta_x == 0.0 {
        f64::INFINITY
    } else {
        (2.0 * PI / scene.delta_x.abs()) / pixel
    };
    Ok(ResolutionReport {
        margin_envelope,
        margin_beats,
        pass: margin_envelope >= RESOLUTION_MARGIN && margin_beats >= RESOLUTION_MARGIN,
    })
}
