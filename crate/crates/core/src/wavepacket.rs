//! Single-photon transverse-momentum densities and the two-photon beat
//! envelope derived from them.
//!
//! The envelope is the autocorrelation
//!
//! ```text
//! C(Δk) = ∫ dK |φ(K + Δk/2)|² |φ(K − Δk/2)|²
//! ```
//!
//! which for a Gaussian density of standard deviation σ_k has the closed form
//! `exp(−Δk²/4σ_k²) / √(4πσ_k²)`. Everything in this crate is dimensionless
//! in k-space; see [`crate::units`] for the mapping from lab quantities.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of grid points per σ_k for a tabulated density.
pub const MIN_POINTS_PER_SIGMA: f64 = 16.0;

/// The numeric envelope table always covers at least ±`ENVELOPE_HALF_SPAN`·σ_k.
pub const ENVELOPE_HALF_SPAN: f64 = 8.0 * std::f64::consts::SQRT_2;

/// Half-width (in units of σ_k) beyond which the Gaussian envelope is treated
/// as zero. `C(12σ_k)/C(0) = e⁻³⁶`.
pub const GAUSSIAN_TRUNCATION: f64 = 12.0;

/// Relative level below which numeric envelopes are truncated.
pub const ENVELOPE_CUTOFF: f64 = 1e-14;

// Upper bound on the resampled grid used for numeric autocorrelation.
const MAX_TABLE_POINTS: usize = 8192;

// Tabulated densities with more than this mass beyond mean ± 8σ_k are
// rejected as heavy-tailed: their second moment is set by the truncation.
const MAX_TAIL_MASS: f64 = 1e-6;
const MAX_EDGE_DENSITY: f64 = 1e-5;

/// A tabulated |φ(k)|², linearly interpolated between grid points and zero
/// outside the grid. Normalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    grid: Arc<[f64]>,
    values: Arc<[f64]>,
    cdf: Arc<[f64]>,
    mean: f64,
    sigma_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentumDistribution {
    Gaussian { sigma_k: f64 },
    Tabulated(TabulatedDensity),
}

/// Builds a centred Gaussian momentum density with standard deviation `sigma_k`.
pub fn make_gaussian(sigma_k: f64) -> Result<MomentumDistribution> {
    if !(sigma_k.is_finite() && sigma_k > 0.0) {
        return Err(Error::invalid(format!(
            "sigma_k must be positive and finite, got {sigma_k}"
        )));
    }
    Ok(MomentumDistribution::Gaussian { sigma_k })
}

/// Quantum Fisher information for the displacement, `H = 2σ_k²`.
pub fn qfi(sigma_k: f64) -> Result<f64> {
    if !(sigma_k.is_finite() && sigma_k > 0.0) {
        return Err(Error::invalid(format!(
            "sigma_k must be positive and finite, got {sigma_k}"
        )));
    }
    Ok(2.0 * sigma_k * sigma_k)
}

fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if !(x >= grid[0] && x <= grid[n - 1]) {
        return 0.0;
    }
    let i = grid.partition_point(|&g| g <= x);
    if i == 0 {
        return values[0];
    }
    if i >= n {
        return values[n - 1];
    }
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = (x - x0) / (x1 - x0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

impl TabulatedDensity {
    /// Validates and normalizes a tabulated density.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "grid has {} points but {} density values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 3 {
            return Err(Error::invalid("a tabulated density needs at least 3 points"));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::invalid("tabulated density contains non-finite values"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid must be strictly increasing"));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("density must be non-negative"));
        }
        let norm = trapezoid(&grid, &values);
        if norm <= 0.0 {
            return Err(Error::invalid("density integrates to zero"));
        }
        let values: Vec<f64> = values.iter().map(|v| v / norm).collect();

        let first: Vec<f64> = grid.iter().zip(&values).map(|(k, p)| k * p).collect();
        let mean = trapezoid(&grid, &first);
        let second: Vec<f64> = grid
            .iter()
            .zip(&values)
            .map(|(k, p)| (k - mean).powi(2) * p)
            .collect();
        let variance = trapezoid(&grid, &second);
        if !(variance > 0.0) {
            return Err(Error::invalid("density has zero variance"));
        }
        let sigma_k = variance.sqrt();

        let peak = values.iter().cloned().fold(0.0, f64::max);
        let edge = values[0].max(values[values.len() - 1]);
        if edge > MAX_EDGE_DENSITY * peak {
            return Err(Error::invalid(
                "density does not decay to zero at the grid edges; heavy-tailed or truncated densities are not supported",
            ));
        }
        let tail: Vec<f64> = grid
            .iter()
            .zip(&values)
            .map(|(k, p)| if (k - mean).abs() > 8.0 * sigma_k { *p } else { 0.0 })
            .collect();
        if trapezoid(&grid, &tail) > MAX_TAIL_MASS {
            return Err(Error::invalid(
                "density has significant mass beyond 8 standard deviations; heavy-tailed densities are not supported",
            ));
        }

        let cdf = cumulative_trapezoid(&grid, &values);
        Ok(Self {
            grid: grid.into(),
            values: values.into(),
            cdf: cdf.into(),
            mean,
            sigma_k,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn density(&self, k: f64) -> f64 {
        interpolate(&self.grid, &self.values, k)
    }

    fn max_spacing(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    fn min_spacing(&self) -> f64 {
        self.grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    fn is_uniform(&self) -> bool {
        let h = (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64;
        self.grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }
}

impl MomentumDistribution {
    /// Loads a two-column `k,density` CSV. A header row is optional and
    /// `#` lines are ignored.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (index, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(index + 1, |p| p.line() as usize);
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 columns, found {}", record.len()),
                });
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(v) => {
                    grid.push(v[0]);
                    values.push(v[1]);
                }
                Err(_) if grid.is_empty() && index == 0 => continue,
                Err(e) => {
                    return Err(Error::Parse {
                        line,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok(Self::Tabulated(TabulatedDensity::new(grid, values)?))
    }

    pub fn sigma_k(&self) -> f64 {
        match self {
            Self::Gaussian { sigma_k } => *sigma_k,
            Self::Tabulated(t) => t.sigma_k,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Gaussian { .. } => 0.0,
            Self::Tabulated(t) => t.mean,
        }
    }

    pub fn density(&self, k: f64) -> f64 {
        match self {
            Self::Gaussian { sigma_k } => {
                let z = k / sigma_k;
                (-0.5 * z * z).exp() / (sigma_k * (2.0 * PI).sqrt())
            }
            Self::Tabulated(t) => t.density(k),
        }
    }

    /// Interval outside which the density is negligible.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Gaussian { sigma_k } => (-GAUSSIAN_TRUNCATION * sigma_k, GAUSSIAN_TRUNCATION * sigma_k),
            Self::Tabulated(t) => (t.grid[0], t.grid[t.grid.len() - 1]),
        }
    }

    /// Draws a single momentum from the density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Gaussian { sigma_k } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma_k * z
            }
            Self::Tabulated(t) => {
                invert_piecewise_linear(&t.grid, &t.values, &t.cdf, rng.random::<f64>())
            }
        }
    }
}

/// Builds the beat envelope of a momentum density.
pub fn envelope(dist: &MomentumDistribution) -> Result<BeatEnvelope> {
    match dist {
        MomentumDistribution::Gaussian { sigma_k } => {
            Ok(BeatEnvelope::GaussianClosedForm { sigma_k: *sigma_k })
        }
        MomentumDistribution::Tabulated(t) => Ok(BeatEnvelope::NumericTable(EnvelopeTable::build(t)?)),
    }
}

/// Autocorrelation of a tabulated density on a uniform Δk grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeTable {
    sigma_k: f64,
    step: f64,
    /// C at Δk = (i − half)·step, i = 0..=2·half.
    grid: Arc<[f64]>,
    values: Arc<[f64]>,
    cdf: Arc<[f64]>,
    half: usize,
}

impl EnvelopeTable {
    fn build(t: &TabulatedDensity) -> Result<Self> {
        let sigma = t.sigma_k;
        let coarsest = t.max_spacing();
        if coarsest > sigma / MIN_POINTS_PER_SIGMA {
            return Err(Error::Resolution(format!(
                "grid spacing {coarsest:.3e} exceeds sigma_k/{MIN_POINTS_PER_SIGMA} = {:.3e}",
                sigma / MIN_POINTS_PER_SIGMA
            )));
        }
        let (lo, hi) = (t.grid[0], t.grid[t.grid.len() - 1]);

        // Uniform inputs are used as-is: the node sum is then the trapezoid
        // rule on the original samples. Others are resampled at the finest spacing.
        let (step, samples) = if t.is_uniform() && t.grid.len() <= MAX_TABLE_POINTS {
            let step = (hi - lo) / (t.grid.len() - 1) as f64;
            (step, t.values.to_vec())
        } else {
            let span = hi - lo;
            let n = ((span / t.min_spacing()).ceil() as usize).clamp(2, MAX_TABLE_POINTS - 1);
            let step = span / n as f64;
            let samples = (0..=n)
                .map(|i| t.density(lo + step * i as f64))
                .collect::<Vec<_>>();
            (step, samples)
        };
        let norm: f64 = step * samples.iter().sum::<f64>();
        let samples: Vec<f64> = samples.iter().map(|p| p / norm).collect();

        // Moments of the resampled density, so that the discrete second
        // moment of the table is exactly twice this variance.
        let n = samples.len();
        let mean = step * samples.iter().enumerate().map(|(i, p)| i as f64 * step * p).sum::<f64>();
        let var = step
            * samples
                .iter()
                .enumerate()
                .map(|(i, p)| (i as f64 * step - mean).powi(2) * p)
                .sum::<f64>();
        let sigma_k = var.sqrt();

        let support = n - 1;
        let min_half = (ENVELOPE_HALF_SPAN * sigma_k / step).ceil() as usize;
        let half = support.max(min_half) + 1;

        let mut positive = vec![0.0; half + 1];
        for (m, c) in positive.iter_mut().enumerate().take(support + 1) {
            let mut acc = 0.0;
            for i in m..n {
                acc += samples[i] * samples[i - m];
            }
            *c = step * acc;
        }
        let values: Vec<f64> = positive
            .iter()
            .rev()
            .chain(positive.iter().skip(1))
            .copied()
            .collect();
        let grid: Vec<f64> = (0..values.len())
            .map(|i| (i as f64 - half as f64) * step)
            .collect();
        let cdf = cumulative_trapezoid(&grid, &values);
        Ok(Self {
            sigma_k,
            step,
            grid: grid.into(),
            values: values.into(),
            cdf: cdf.into(),
            half,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `(Δk, C(Δk))` pairs at the table nodes.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.iter().copied().zip(self.values.iter().copied())
    }

    fn value(&self, dk: f64) -> f64 {
        let pos = dk / self.step + self.half as f64;
        if !(pos >= 0.0) || pos > (self.values.len() - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let t = pos - i as f64;
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    fn cutoff(&self) -> f64 {
        let threshold = ENVELOPE_CUTOFF * self.values[self.half];
        let last = (self.half..self.values.len())
            .rev()
            .find(|&i| self.values[i] > threshold)
            .unwrap_or(self.half);
        ((last + 1).min(self.values.len() - 1) - self.half) as f64 * self.step
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        invert_piecewise_linear(&self.grid, &self.values, &self.cdf, u)
    }
}

/// The two-photon envelope C(Δk).
#[derive(Debug, Clone, PartialEq)]
pub enum BeatEnvelope {
    GaussianClosedForm { sigma_k: f64 },
    NumericTable(EnvelopeTable),
}

impl BeatEnvelope {
    pub fn gaussian(sigma_k: f64) -> Result<Self> {
        envelope(&make_gaussian(sigma_k)?)
    }

    /// σ_k of the underlying single-photon density; the envelope variance is 2σ_k².
    pub fn sigma_k(&self) -> f64 {
        match self {
            Self::GaussianClosedForm { sigma_k } => *sigma_k,
            Self::NumericTable(t) => t.sigma_k,
        }
    }

    pub fn qfi(&self) -> f64 {
        2.0 * self.sigma_k().powi(2)
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Self::GaussianClosedForm { .. })
    }

    pub fn value(&self, dk: f64) -> f64 {
        match self {
            Self::GaussianClosedForm { sigma_k } => {
                let s2 = sigma_k * sigma_k;
                (-dk * dk / (4.0 * s2)).exp() / (4.0 * PI * s2).sqrt()
            }
            Self::NumericTable(t) => t.value(dk),
        }
    }

    /// Half-width of the Δk interval outside which C is negligible.
    pub fn cutoff(&self) -> f64 {
        match self {
            Self::GaussianClosedForm { sigma_k } => GAUSSIAN_TRUNCATION * sigma_k,
            Self::NumericTable(t) => t.cutoff(),
        }
    }

    /// Table nodes strictly inside `(lo, hi)`; quadrature should split there.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Self::GaussianClosedForm { .. } => Vec::new(),
            Self::NumericTable(t) => t
                .nodes()
                .map(|(x, _)| x)
                .filter(|&x| x > lo && x < hi)
                .collect(),
        }
    }

    /// Second moment of the tabulated values (closed form for Gaussian).
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::GaussianClosedForm { sigma_k } => 2.0 * sigma_k * sigma_k,
            Self::NumericTable(t) => t.step * t.nodes().map(|(x, c)| x * x * c).sum::<f64>(),
        }
    }

    /// Draws Δk with density C.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::GaussianClosedForm { sigma_k } => {
                let z: f64 = StandardNormal.sample(rng);
                std::f64::consts::SQRT_2 * sigma_k * z
            }
            Self::NumericTable(t) => t.sample(rng),
        }
    }

    /// Characteristic integral `∫ C(Δk) cos(Δk·Δx) dΔk` for the Gaussian case;
    /// `None` when only quadrature can provide it.
    pub fn cos_transform_closed(&self, delta_x: f64) -> Option<f64> {
        match self {
            Self::GaussianClosedForm { sigma_k } => Some((-(sigma_k * delta_x).powi(2)).exp()),
            Self::NumericTable(_) => None,
        }
    }
}

/// Serializable description of an envelope, for metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Gaussian,
    Tabulated,
}

impl From<&BeatEnvelope> for EnvelopeKind {
    fn from(e: &BeatEnvelope) -> Self {
        match e {
            BeatEnvelope::GaussianClosedForm { .. } => Self::Gaussian,
            BeatEnvelope::NumericTable(_) => Self::Tabulated,
        }
    }
}

fn cumulative_trapezoid(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..grid.len() {
        acc += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
        out.push(acc);
    }
    out
}

/// Inverse CDF of a piecewise-linear density, solving the quadratic on the
/// bracketing cell.
fn invert_piecewise_linear(grid: &[f64], values: &[f64], cdf: &[f64], u: f64) -> f64 {
    let total = cdf[cdf.len() - 1];
    let target = u * total;
    let i = cdf.partition_point(|&c| c <= target).clamp(1, cdf.len() - 1) - 1;
    let h = grid[i + 1] - grid[i];
    let (p0, p1) = (values[i], values[i + 1]);
    let need = target - cdf[i];
    let slope = (p1 - p0) / h;
    let t = if slope.abs() < 1e-14 * (p0 + p1).max(f64::MIN_POSITIVE) / h {
        if p0 > 0.0 {
            need / p0
        } else {
            0.5 * h
        }
    } else {
        // p0·t + slope·t²/2 = need
        let disc = (p0 * p0 + 2.0 * slope * need).max(0.0);
        2.0 * need / (p0 + disc.sqrt())
    };
    grid[i] + t.clamp(0.0, h)
}
