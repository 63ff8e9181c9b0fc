//! Turns flags and config values into core scenes and detectors.

use homsense_core::detection::default_range;
use homsense_core::units::{fourier_limited_sigma_k, PhysicalSetup};
use homsense_core::wavepacket::EnvelopeKind;
use homsense_core::{
    check_resolution, envelope, make_gaussian, BeatEnvelope, DetectorMode, DetectorModel, MomentumDistribution,
    SceneParams, SearchInterval,
};

use crate::args::{DetectorArgs, Mode, SceneArgs, SearchArgs};
use crate::config::{pick, pick_list, Config};
use crate::error::{CliError, Result};

/// Default Δx in σ_k-units.
pub const DEFAULT_DX: f64 = 4.0;

pub struct Scene {
    pub envelope: BeatEnvelope,
    pub nus: Vec<f64>,
    pub dx: f64,
    /// Lengths are nanometres and σ_k is in 1/nm.
    pub physical: bool,
}

impl Scene {
    pub fn sigma_k(&self) -> f64 {
        self.envelope.sigma_k()
    }

    pub fn single_nu(&self) -> Result<f64> {
        match self.nus.as_slice() {
            [nu] => Ok(*nu),
            _ => Err(CliError::config("this command takes a single --nu value")),
        }
    }

    pub fn at(&self, dx: f64, nu: f64) -> Result<SceneParams> {
        Ok(SceneParams::new(dx, nu, self.envelope.clone())?)
    }

    pub fn describe(&self, meta: &mut Vec<(String, String)>) {
        let kind = match EnvelopeKind::from(&self.envelope) {
            EnvelopeKind::Gaussian => "gaussian",
            EnvelopeKind::Tabulated => "tabulated",
        };
        meta.push(("envelope".into(), kind.into()));
        meta.push(("sigma_k".into(), format!("{:?}", self.sigma_k())));
        meta.push(("units".into(), if self.physical { "nm" } else { "dimensionless" }.into()));
    }
}

pub fn load_envelope(dist_csv: Option<&std::path::Path>) -> Result<Option<BeatEnvelope>> {
    dist_csv
        .map(|p| {
            let dist = MomentumDistribution::from_csv_path(p)?;
            Ok(envelope(&dist)?)
        })
        .transpose()
}

pub fn resolve_scene(a: &SceneArgs, cfg: &Config) -> Result<Scene> {
    let sigma_k = pick(a.sigma_k, cfg, "sigma_k")?;
    let dist_csv = pick(a.dist_csv.clone(), cfg, "dist_csv")?;
    let sigma_x_nm = pick(a.sigma_x_nm, cfg, "sigma_x_nm")?;
    let given = [sigma_k.is_some(), dist_csv.is_some(), sigma_x_nm.is_some()];
    if given.iter().filter(|&&g| g).count() > 1 {
        return Err(CliError::config(
            "give at most one of --sigma-k, --dist-csv and --sigma-x-nm",
        ));
    }
    let envelope = match (sigma_k, dist_csv, sigma_x_nm) {
        (_, Some(path), _) => load_envelope(Some(&path))?.expect("path given"),
        (_, _, Some(sx)) => envelope(&make_gaussian(fourier_limited_sigma_k(sx)?)?)?,
        (s, _, _) => envelope(&make_gaussian(s.unwrap_or(1.0))?)?,
    };
    let nus = pick_list(&a.nu, cfg, "nu")?.unwrap_or_else(|| vec![1.0]);
    if nus.is_empty() {
        return Err(CliError::config("--nu needs at least one value"));
    }
    let dx = pick(a.dx, cfg, "dx")?.unwrap_or(DEFAULT_DX / envelope.sigma_k());
    let scene = Scene {
        envelope,
        nus,
        dx,
        physical: sigma_x_nm.is_some(),
    };
    for &nu in &scene.nus {
        scene.at(dx, nu)?;
    }
    Ok(scene)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || CliError::config(format!("--range expects LO,HI, got {s:?}"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

fn parse_mode(s: &str) -> Result<DetectorMode> {
    Ok(s.parse::<DetectorMode>()?)
}

pub fn resolve_detector(a: &DetectorArgs, cfg: &Config, scene: &Scene) -> Result<DetectorModel> {
    let mode = match a.mode {
        Some(Mode::Resolving) => DetectorMode::Resolving,
        Some(Mode::Bucket) => DetectorMode::Bucket,
        Some(Mode::SingleCamera) => DetectorMode::SingleCamera,
        None => match cfg.get::<String>("mode")? {
            Some(m) => parse_mode(&m).map_err(|e| CliError::config(e.to_string()))?,
            None => DetectorMode::Resolving,
        },
    };
    if mode == DetectorMode::Bucket {
        return Ok(DetectorModel::bucket());
    }
    let sigma_k = scene.sigma_k();
    let range = match pick(a.range.clone(), cfg, "range")? {
        Some(r) => parse_range(&r)?,
        None => default_range(sigma_k),
    };
    let geometry = [
        pick(a.pixel_size, cfg, "pixel_size")?,
        pick(a.distance, cfg, "distance")?,
        pick(a.k0, cfg, "k0")?,
    ];
    let pixel = pick(a.pixel, cfg, "pixel")?;
    let det = match geometry {
        [Some(dy), Some(d), Some(k0)] => {
            if pixel.is_some() {
                return Err(CliError::config("--pixel conflicts with --pixel-size/--distance/--k0"));
            }
            DetectorModel::from_physical(mode, PhysicalSetup::new(dy, d, k0)?, range)?
        }
        [None, None, None] => DetectorModel::new(mode, Some(pixel.unwrap_or(sigma_k / 20.0)), range)?,
        _ => return Err(CliError::config("--pixel-size, --distance and --k0 go together")),
    };
    let det = det.with_snap(a.snap || cfg.flag("snap")?)?;

    for &nu in &scene.nus {
        let report = check_resolution(&det, &scene.at(scene.dx, nu)?)?;
        if !report.pass {
            eprintln!(
                "warning: camera under-resolves the pattern (σ_k/δk = {:.2}, beat period/δk = {:.2}, want ≥ 10)",
                report.margin_envelope, report.margin_beats
            );
        }
    }
    Ok(det)
}

pub fn resolve_search(a: &SearchArgs, cfg: &Config, sigma_k: f64) -> Result<SearchInterval> {
    let default = SearchInterval::default_for(sigma_k, None)?;
    let lo = pick(a.search_lo, cfg, "search_lo")?.unwrap_or(default.lo);
    let hi = pick(a.search_hi, cfg, "search_hi")?.unwrap_or(default.hi);
    Ok(SearchInterval::new(lo, hi)?)
}

/// `steps` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CliError::config(format!("invalid sweep [{lo}, {hi}] with {steps} points")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}
