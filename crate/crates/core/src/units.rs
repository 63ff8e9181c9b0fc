//! Conversion between lab quantities and the dimensionless k-space used by
//! the rest of the crate.
//!
//! Any consistent length unit works; the CLI uses nanometres. A camera pixel
//! at transverse position `y` in the far field at distance `d` resolves the
//! momentum `k = y·k₀/d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `σ_x ≈ 2.2/k₀` for diffraction-limited optics. Informational only.
pub const DIFFRACTION_LIMIT_FACTOR: f64 = 2.2;

pub fn diffraction_limited_sigma_x(k0: f64) -> f64 {
    DIFFRACTION_LIMIT_FACTOR / k0
}

/// σ_k of a Fourier-limited Gaussian wavepacket with position spread `sigma_x`.
pub fn fourier_limited_sigma_k(sigma_x: f64) -> Result<f64> {
    if !(sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(Error::invalid(format!("sigma_x must be positive, got {sigma_x}")));
    }
    Ok(0.5 / sigma_x)
}

/// Camera geometry: pixel size δy, source–camera distance d, wavenumber k₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    pub pixel_size: f64,
    pub distance: f64,
    pub k0: f64,
}

impl PhysicalSetup {
    pub fn new(pixel_size: f64, distance: f64, k0: f64) -> Result<Self> {
        for (name, v) in [("pixel_size", pixel_size), ("distance", distance), ("k0", k0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            pixel_size,
            distance,
            k0,
        })
    }

    pub fn momentum(&self, y: f64) -> f64 {
        y * self.k0 / self.distance
    }

    /// Momentum pitch δk = δy·k₀/d.
    pub fn momentum_pitch(&self) -> f64 {
        self.momentum(self.pixel_size)
    }
}

/// Scale between a physical length and σ_k-units (`σ_k·Δx`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub sigma_k: f64,
}

impl Scale {
    pub fn to_dimensionless(&self, length: f64) -> f64 {
        length * self.sigma_k
    }

    pub fn to_physical(&self, dimensionless: f64) -> f64 {
        dimensionless / self.sigma_k
    }
}
