//! Fisher information of every detector variant, the quantum bound
//! `H = 2σ_k²`, and Cramér–Rao bounds.

use serde::{Deserialize, Serialize};

use crate::detection::{
    envelope_cos_transform, envelope_sin_moment, integrate_window, joint_density, joint_density_dx,
    DetectorMode, Outcome, SceneParams,
};
use crate::error::{Error, Result};
use crate::wavepacket::BeatEnvelope;

// Tolerances for the normalized integrals (F/H and friends).
const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-12;

/// Per-outcome contribution `f_ν(Δk; Δx)` to `F_ν/H`, summed over both
/// outcomes. At ν = 1 the removable singularity is replaced by its limit
/// `C(Δk)·Δk²/2σ_k²`.
pub fn fi_contribution(dk: f64, scene: &SceneParams) -> f64 {
    let nu = scene.nu;
    if nu == 0.0 {
        return 0.0;
    }
    let base = scene.envelope.value(dk) * dk * dk / (2.0 * scene.sigma_k().powi(2));
    if nu == 1.0 {
        return base;
    }
    let phase = dk * scene.delta_x;
    let (s, c) = phase.sin_cos();
    base * nu * nu * s * s / (1.0 - nu * nu * c * c)
}

/// Score `∂ log P_ν(Δk, X) / ∂Δx`.
pub fn score(dk: f64, x: Outcome, scene: &SceneParams) -> f64 {
    joint_density_dx(dk, x, scene) / joint_density(dk, x, scene)
}

/// Integral of an even integrand over the envelope support.
fn integrate_even<F: Fn(f64) -> f64>(envelope: &BeatEnvelope, delta_x: f64, f: F) -> Result<f64> {
    let cut = envelope.cutoff();
    Ok(2.0 * integrate_window(envelope, delta_x, 0.0, cut, ABS_TOL, REL_TOL, f)?)
}

/// `F_ν(Δx)` for momentum-resolving cameras on both ports.
pub fn fisher_resolving(scene: &SceneParams) -> Result<f64> {
    let h = scene.qfi();
    if scene.nu == 1.0 {
        return Ok(h);
    }
    if scene.nu == 0.0 || scene.delta_x == 0.0 {
        return Ok(0.0);
    }
    let ratio = integrate_even(&scene.envelope, scene.delta_x, |dk| fi_contribution(dk, scene))?;
    Ok(h * ratio)
}

/// `F_ν(Δx)` by quadrature even at ν = 1, where [`fisher_resolving`]
/// returns H analytically.
pub fn fisher_resolving_quadrature(scene: &SceneParams) -> Result<f64> {
    if scene.nu == 0.0 {
        return Ok(0.0);
    }
    let ratio = integrate_even(&scene.envelope, scene.delta_x, |dk| fi_contribution(dk, scene))?;
    Ok(scene.qfi() * ratio)
}

/// Large-separation limit `(1 − √(1 − ν²))·2σ_k²`.
pub fn fisher_asymptote(nu: f64, sigma_k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::invalid(format!("nu must lie in [0, 1], got {nu}")));
    }
    let h = crate::wavepacket::qfi(sigma_k)?;
    Ok((1.0 - (1.0 - nu * nu).sqrt()) * h)
}

/// Envelope integrals that shape the HOM dip.
#[derive(Debug, Clone, Copy)]
struct DipIntegrals {
    /// ∫ C cos(Δk Δx)
    cos: f64,
    /// ∫ C (1 − cos(Δk Δx)), evaluated without cancellation
    one_minus_cos: f64,
    /// ∫ C Δk sin(Δk Δx)
    sin_moment: f64,
}

fn dip_integrals(envelope: &BeatEnvelope, delta_x: f64, closed_form: bool) -> Result<DipIntegrals> {
    if closed_form {
        if let BeatEnvelope::GaussianClosedForm { sigma_k } = envelope {
            let a = (sigma_k * delta_x).powi(2);
            return Ok(DipIntegrals {
                cos: (-a).exp(),
                one_minus_cos: -(-a).exp_m1(),
                sin_moment: 2.0 * sigma_k * sigma_k * delta_x * (-a).exp(),
            });
        }
        return Ok(DipIntegrals {
            cos: envelope_cos_transform(envelope, delta_x)?,
            one_minus_cos: one_minus_cos(envelope, delta_x)?,
            sin_moment: envelope_sin_moment(envelope, delta_x)?,
        });
    }
    Ok(DipIntegrals {
        cos: integrate_even(envelope, delta_x, |dk| envelope.value(dk) * (dk * delta_x).cos())?,
        one_minus_cos: one_minus_cos(envelope, delta_x)?,
        sin_moment: integrate_even(envelope, delta_x, |dk| envelope.value(dk) * dk * (dk * delta_x).sin())?,
    })
}

fn one_minus_cos(envelope: &BeatEnvelope, delta_x: f64) -> Result<f64> {
    integrate_even(envelope, delta_x, |dk| {
        let s = (0.5 * dk * delta_x).sin();
        2.0 * envelope.value(dk) * s * s
    })
}

fn nonresolving_from(nu: f64, h: f64, delta_x: f64, d: DipIntegrals) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    if delta_x == 0.0 {
        return if nu == 1.0 { h } else { 0.0 };
    }
    // 1 − ν²I² = (1 − νI)(1 + νI), with 1 − νI = (1 − ν) + ν(1 − I).
    let lower = (1.0 - nu) + nu * d.one_minus_cos;
    let upper = 1.0 + nu * d.cos;
    nu * nu * d.sin_moment * d.sin_moment / (lower * upper)
}

/// `F^(nr)_ν(Δx)` for bucket detectors. Gaussian envelopes use the closed
/// form; Δx = 0 with ν = 1 returns the limit H.
pub fn fisher_nonresolving(scene: &SceneParams) -> Result<f64> {
    let d = dip_integrals(&scene.envelope, scene.delta_x, true)?;
    Ok(nonresolving_from(scene.nu, scene.qfi(), scene.delta_x, d))
}

/// Bucket-detector information with every envelope integral done by
/// quadrature, regardless of envelope kind.
pub fn fisher_nonresolving_quadrature(scene: &SceneParams) -> Result<f64> {
    let d = dip_integrals(&scene.envelope, scene.delta_x, false)?;
    Ok(nonresolving_from(scene.nu, scene.qfi(), scene.delta_x, d))
}

/// Information from observing only outcome `x`, with the other class
/// discarded: the resolved contribution of `x` minus the information carried
/// by the (now unobserved) class probability `P_ν(X)`.
pub fn fisher_partial(x: Outcome, scene: &SceneParams) -> Result<f64> {
    let nu = scene.nu;
    let dx = scene.delta_x;
    if nu == 0.0 || dx == 0.0 {
        return Ok(0.0);
    }
    let alpha = x.alpha();
    let env = &scene.envelope;
    // ∫ (∂P)²/P = ∫ (ν²/2) C Δk² sin²/(1 + αν cos)
    let resolved = integrate_even(env, dx, |dk| {
        let (s, c) = (dk * dx).sin_cos();
        let ratio = if nu == 1.0 {
            1.0 - alpha * c
        } else {
            s * s / (1.0 + alpha * nu * c)
        };
        0.5 * nu * nu * env.value(dk) * dk * dk * ratio
    })?;
    let d = dip_integrals(env, dx, false)?;
    // (∂P(X))²/P(X) = ν² I_s² / (2(1 + αν I_c))
    let class_prob = match x {
        Outcome::B => 1.0 + nu * d.cos,
        Outcome::A => (1.0 - nu) + nu * d.one_minus_cos,
    };
    let lost = nu * nu * d.sin_moment * d.sin_moment / (2.0 * class_prob);
    Ok(resolved - lost)
}

/// One camera on a single port sees `P_ν(Δk, B)/2`, hence half of `F(B)`.
pub fn fisher_single_camera(scene: &SceneParams) -> Result<f64> {
    Ok(0.5 * fisher_partial(Outcome::B, scene)?)
}

/// Fisher information per event for a detector mode.
pub fn fisher_for_mode(mode: DetectorMode, scene: &SceneParams) -> Result<f64> {
    match mode {
        DetectorMode::Resolving => fisher_resolving(scene),
        DetectorMode::Bucket => fisher_nonresolving(scene),
        DetectorMode::SingleCamera => fisher_single_camera(scene),
    }
}

/// Cramér–Rao variance bound `1/(n·f)`.
pub fn crb(f: f64, n: usize) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::invalid(format!("Fisher information must be positive, got {f}")));
    }
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    Ok(1.0 / (n as f64 * f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub f_resolving: f64,
    pub h_qfi: f64,
    pub ratio: f64,
    pub f_partial_a: f64,
    pub f_partial_b: f64,
    pub f_nonresolving: f64,
    pub f_single_camera: f64,
    pub asymptote: f64,
}

impl FisherReport {
    pub fn compute(scene: &SceneParams) -> Result<Self> {
        let f_resolving = fisher_resolving(scene)?;
        let h_qfi = scene.qfi();
        let f_partial_b = fisher_partial(Outcome::B, scene)?;
        Ok(Self {
            f_resolving,
            h_qfi,
            ratio: f_resolving / h_qfi,
            f_partial_a: fisher_partial(Outcome::A, scene)?,
            f_partial_b,
            f_nonresolving: fisher_nonresolving(scene)?,
            f_single_camera: 0.5 * f_partial_b,
            asymptote: fisher_asymptote(scene.nu, scene.sigma_k())?,
        })
    }
}
