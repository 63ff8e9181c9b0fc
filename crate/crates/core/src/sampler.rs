//! Synthetic detection events drawn exactly from `P_ν(Δk, X)`.
//!
//! Events are generated marginal-first: Δk from the envelope C, then the
//! outcome from `p(B | Δk) = (1 + ν cos(Δk·Δx))/2`. Batches are cut into
//! fixed-size blocks, each with its own counter-derived stream, so parallel
//! generation is bit-identical to serial generation.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::detection::{bunching_probability, DetectorMode, DetectorModel, Outcome, SceneParams};
use crate::error::{Error, Result};
use crate::rng;
use crate::wavepacket::{BeatEnvelope, EnvelopeKind, MomentumDistribution};

const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionEvent {
    /// Momentum difference, absent for bucket detectors.
    pub dk: Option<f64>,
    pub x: Outcome,
    /// Not registered by the detector (outside the sensing range, or at an
    /// unobserved port for a single camera).
    pub lost: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub events: Vec<DetectionEvent>,
    pub n_requested: usize,
    pub seed: u64,
    pub scene: SceneParams,
    pub detector: DetectorModel,
}

/// Draws an ideal `(Δk, X)` pair.
pub fn sample_event<R: Rng + ?Sized>(rng: &mut R, scene: &SceneParams) -> (f64, Outcome) {
    let dk = scene.envelope.sample(rng);
    let x = if rng.random::<f64>() < bunching_probability(dk, scene) {
        Outcome::B
    } else {
        Outcome::A
    };
    (dk, x)
}

/// Validation sampler: both momenta from |φ|², then the outcome given k − k′.
pub fn sample_event_kk<R: Rng + ?Sized>(
    rng: &mut R,
    scene: &SceneParams,
    dist: &MomentumDistribution,
) -> (f64, f64, Outcome) {
    let k = dist.sample(rng);
    let kp = dist.sample(rng);
    let x = if rng.random::<f64>() < bunching_probability(k - kp, scene) {
        Outcome::B
    } else {
        Outcome::A
    };
    (k, kp, x)
}

fn detect<R: Rng + ?Sized>(
    rng: &mut R,
    scene: &SceneParams,
    det: &DetectorModel,
    bucket_p_b: f64,
) -> DetectionEvent {
    match det.mode {
        DetectorMode::Bucket => {
            let p_b = bucket_p_b;
            let x = if rng.random::<f64>() < p_b { Outcome::B } else { Outcome::A };
            DetectionEvent {
                dk: None,
                x,
                lost: false,
            }
        }
        DetectorMode::Resolving | DetectorMode::SingleCamera => {
            let (dk, x) = sample_event(rng, scene);
            // Half of the bunched pairs land on the port without a camera.
            let unobserved = det.mode == DetectorMode::SingleCamera
                && (x == Outcome::A || rng.random::<bool>());
            let in_range = det.contains(dk);
            let dk = if det.snap && in_range { det.pixel_centre(dk) } else { dk };
            DetectionEvent {
                dk: Some(dk),
                x,
                lost: unobserved || !in_range,
            }
        }
    }
}

/// Generates `n` independent events.
pub fn sample_batch(n: usize, seed: u64, scene: &SceneParams, detector: &DetectorModel) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    detector.validate()?;
    let bucket_p_b = if detector.mode == DetectorMode::Bucket {
        crate::detection::bucket_probs(scene)?.p_b
    } else {
        f64::NAN
    };
    let blocks = n.div_ceil(BLOCK);
    let events: Vec<DetectionEvent> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = rng::stream(seed, b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            (0..len)
                .map(|_| detect(&mut rng, scene, detector, bucket_p_b))
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SampleSet {
        events,
        n_requested: n,
        seed,
        scene: scene.clone(),
        detector: detector.clone(),
    })
}

impl SampleSet {
    pub fn used(&self) -> impl Iterator<Item = &DetectionEvent> + '_ {
        self.events.iter().filter(|e| !e.lost)
    }

    pub fn n_used(&self) -> usize {
        self.used().count()
    }

    pub fn lost_count(&self) -> usize {
        self.events.len() - self.n_used()
    }

    /// `(n_A, n_B)` over non-lost events.
    pub fn outcome_counts(&self) -> (usize, usize) {
        self.used().fold((0, 0), |(a, b), e| match e.x {
            Outcome::A => (a + 1, b),
            Outcome::B => (a, b + 1),
        })
    }

    /// Serializes to CSV with `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let det = &self.detector;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# n_requested={}", self.n_requested)?;
        writeln!(w, "# nu={:?}", self.scene.nu)?;
        writeln!(w, "# delta_x={:?}", self.scene.delta_x)?;
        writeln!(w, "# sigma_k={:?}", self.scene.sigma_k())?;
        let kind = match EnvelopeKind::from(&self.scene.envelope) {
            EnvelopeKind::Gaussian => "gaussian",
            EnvelopeKind::Tabulated => "tabulated",
        };
        writeln!(w, "# envelope={kind}")?;
        writeln!(w, "# mode={}", det.mode)?;
        match det.pixel_dk {
            Some(p) => writeln!(w, "# pixel_dk={p:?}")?,
            None => writeln!(w, "# pixel_dk=none")?,
        }
        writeln!(w, "# range_lo={:?}", det.range.0)?;
        writeln!(w, "# range_hi={:?}", det.range.1)?;
        writeln!(w, "# snap={}", u8::from(det.snap))?;
        writeln!(w, "event_index,dk,x,lost")?;
        for (i, e) in self.events.iter().enumerate() {
            match e.dk {
                Some(dk) => writeln!(w, "{i},{dk:?},{},{}", e.x, u8::from(e.lost))?,
                None => writeln!(w, "{i},,{},{}", e.x, u8::from(e.lost))?,
            }
        }
        Ok(())
    }

    /// Parses a CSV written by [`SampleSet::write_csv`]. Tabulated envelopes
    /// are not stored in the file and must be supplied.
    pub fn read_csv<R: BufRead>(reader: R, tabulated: Option<&BeatEnvelope>) -> Result<Self> {
        let mut meta: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut events = Vec::new();
        let mut header_seen = false;
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.trim().to_string(), (line_no, v.trim().to_string()));
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["event_index", "dk", "x", "lost"] {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unexpected header {line:?}"),
                    });
                }
                header_seen = true;
                continue;
            }
            events.push(parse_event_row(line, line_no, events.len())?);
        }
        if !header_seen {
            return Err(Error::NoData);
        }

        let get = |key: &str| -> Result<(usize, &str)> {
            meta.get(key)
                .map(|(l, v)| (*l, v.as_str()))
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    message: format!("missing metadata `{key}`"),
                })
        };
        fn num<T: std::str::FromStr>(key: &str, (line, v): (usize, &str)) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| Error::Parse {
                line,
                message: format!("metadata `{key}`: {e}"),
            })
        }

        let seed: u64 = num("seed", get("seed")?)?;
        let n_requested: usize = num("n_requested", get("n_requested")?)?;
        let nu: f64 = num("nu", get("nu")?)?;
        let delta_x: f64 = num("delta_x", get("delta_x")?)?;
        let sigma_k: f64 = num("sigma_k", get("sigma_k")?)?;
        let envelope = match get("envelope")?.1 {
            "gaussian" => BeatEnvelope::gaussian(sigma_k)?,
            "tabulated" => tabulated
                .cloned()
                .ok_or_else(|| Error::invalid("sample file uses a tabulated envelope; supply the distribution"))?,
            other => {
                return Err(Error::Parse {
                    line: get("envelope")?.0,
                    message: format!("unknown envelope {other:?}"),
                })
            }
        };
        let (mode_line, mode) = get("mode")?;
        let mode: DetectorMode = mode.parse().map_err(|e: Error| Error::Parse {
            line: mode_line,
            message: e.to_string(),
        })?;
        let pixel = get("pixel_dk")?;
        let pixel_dk = if pixel.1 == "none" { None } else { Some(num::<f64>("pixel_dk", pixel)?) };
        let range = (num::<f64>("range_lo", get("range_lo")?)?, num::<f64>("range_hi", get("range_hi")?)?);
        let snap = num::<u8>("snap", get("snap")?)? != 0;

        let scene = SceneParams::new(delta_x, nu, envelope)?;
        let detector = if mode == DetectorMode::Bucket {
            DetectorModel::bucket()
        } else {
            DetectorModel::new(mode, pixel_dk, range)?.with_snap(snap)?
        };
        if events.len() != n_requested {
            return Err(Error::Parse {
                line: 0,
                message: format!("{} events listed but n_requested={n_requested}", events.len()),
            });
        }
        Ok(Self {
            events,
            n_requested,
            seed,
            scene,
            detector,
        })
    }
}

fn parse_event_row(line: &str, line_no: usize, expected_index: usize) -> Result<DetectionEvent> {
    let perr = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    if cols.len() != 4 {
        return Err(perr(format!("expected 4 columns, found {}", cols.len())));
    }
    let index: usize = cols[0].parse().map_err(|e| perr(format!("event_index: {e}")))?;
    if index != expected_index {
        return Err(perr(format!("event_index {index}, expected {expected_index}")));
    }
    let dk = if cols[1].is_empty() {
        None
    } else {
        Some(cols[1].parse::<f64>().map_err(|e| perr(format!("dk: {e}")))?)
    };
    let x: Outcome = cols[2].parse().map_err(|e: Error| perr(e.to_string()))?;
    let lost = match cols[3] {
        "0" => false,
        "1" => true,
        other => return Err(perr(format!("lost must be 0 or 1, got {other:?}"))),
    };
    Ok(DetectionEvent { dk, x, lost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::default_range;

    fn scene(dx: f64, nu: f64) -> SceneParams {
        SceneParams::gaussian(dx, nu, 1.0).unwrap()
    }

    fn wide() -> DetectorModel {
        DetectorModel::resolving(0.05, (-12.0, 12.0)).unwrap()
    }

    #[test]
    fn dip_bottom_always_bunches() {
        let s = sample_batch(20_000, 1, &scene(0.0, 1.0), &wide()).unwrap();
        assert!(s.events.iter().all(|e| e.x == Outcome::B));
    }

    #[test]
    fn distinguishable_outcomes_are_fair_coin() {
        let s = sample_batch(100_000, 2, &scene(4.0, 0.0), &wide()).unwrap();
        let (a, _) = s.outcome_counts();
        let p = a as f64 / 100_000.0;
        assert!((p - 0.5).abs() < 3.0 * (0.25f64 / 1e5).sqrt());
        // Independence from Δk: coin is still fair for large |Δk|.
        let far: Vec<_> = s.used().filter(|e| e.dk.unwrap().abs() > 1.5).collect();
        let fa = far.iter().filter(|e| e.x == Outcome::A).count() as f64 / far.len() as f64;
        assert!((fa - 0.5).abs() < 3.0 * (0.25 / far.len() as f64).sqrt());
    }

    #[test]
    fn same_seed_same_events() {
        let a = sample_batch(10_000, 99, &scene(4.0, 0.9), &wide()).unwrap();
        let b = sample_batch(10_000, 99, &scene(4.0, 0.9), &wide()).unwrap();
        assert_eq!(a, b);
        let c = sample_batch(10_000, 100, &scene(4.0, 0.9), &wide()).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_batch(3 * BLOCK + 17, 5, &scene(2.0, 0.8), &wide()).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn zero_events_rejected() {
        assert!(matches!(
            sample_batch(0, 1, &scene(1.0, 1.0), &wide()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn wide_range_loses_nothing() {
        let s = sample_batch(100_000, 3, &scene(4.0, 1.0), &wide()).unwrap();
        assert_eq!(s.lost_count(), 0);
        assert_eq!(s.events.len(), s.n_requested);
    }

    #[test]
    fn narrow_range_marks_losses() {
        let det = DetectorModel::resolving(0.05, (-1.0, 1.0)).unwrap();
        let s = sample_batch(50_000, 4, &scene(4.0, 1.0), &det).unwrap();
        // P(|Δk| > 1) for Δk ~ N(0, 2) is 0.4795.
        let frac = s.lost_count() as f64 / 50_000.0;
        assert!((frac - 0.4795).abs() < 0.01, "lost fraction {frac}");
        for e in s.used() {
            assert!(det.contains(e.dk.unwrap()));
        }
    }

    #[test]
    fn snapping_lands_on_pixel_centres() {
        let det = DetectorModel::resolving(0.25, (-8.0, 8.0)).unwrap().with_snap(true).unwrap();
        let s = sample_batch(2000, 6, &scene(1.0, 1.0), &det).unwrap();
        for e in s.used() {
            let idx = (e.dk.unwrap() + 8.0) / 0.25 - 0.5;
            assert!((idx - idx.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn single_camera_keeps_about_half_of_bunched_pairs() {
        let det = DetectorModel::single_camera(0.05, (-12.0, 12.0)).unwrap();
        let s = sample_batch(100_000, 8, &scene(1.0, 1.0), &det).unwrap();
        assert!(s.used().all(|e| e.x == Outcome::B));
        let p_b = crate::detection::bucket_probs(&scene(1.0, 1.0)).unwrap().p_b;
        let frac = s.n_used() as f64 / 1e5;
        let p = p_b / 2.0;
        assert!((frac - p).abs() < 4.0 * (p * (1.0 - p) / 1e5).sqrt());
    }

    #[test]
    fn csv_round_trip() {
        let det = DetectorModel::resolving(0.05, default_range(1.0)).unwrap();
        let s = sample_batch(500, 11, &scene(-4.0, 0.9), &det).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = SampleSet::read_csv(buf.as_slice(), None).unwrap();
        assert_eq!(back, s);

        let b = sample_batch(300, 12, &scene(0.5, 1.0), &DetectorModel::bucket()).unwrap();
        let mut buf = Vec::new();
        b.write_csv(&mut buf).unwrap();
        assert_eq!(SampleSet::read_csv(buf.as_slice(), None).unwrap(), b);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let s = sample_batch(3, 1, &scene(1.0, 1.0), &wide()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("\n1,", "\n1,abc");
        match SampleSet::read_csv(text.as_bytes(), None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 14),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(SampleSet::read_csv("".as_bytes(), None), Err(Error::NoData)));
    }
}
