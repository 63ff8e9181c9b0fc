use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::Value;

use homsense_core::detection::default_range;
use homsense_core::estimator::nu_sensitivity;
use homsense_core::information::fisher_for_mode;
use homsense_core::{
    crb, fi_contribution, joint_density, mle, run_trials_with_records, sample_batch, FisherReport, Outcome,
    SampleSet, TrialConfig,
};

use crate::args::{DkSweep, EstimateArgs, FisherArgs, Format, ProbabilityArgs, SimulateArgs, TrialsArgs};
use crate::config::{pick, pick_list, Config};
use crate::error::{CliError, Result};
use crate::output::{emit, gnuplot_script, is_stdout, num, with_writer, write_script, Series, Table};
use crate::setup::{linspace, load_envelope, resolve_detector, resolve_scene, resolve_search, Scene};

fn format(cli: Option<Format>, cfg: &Config, default: Format) -> Result<Format> {
    if let Some(f) = cli {
        return Ok(f);
    }
    match cfg.get::<String>("format")? {
        Some(s) => Format::from_str(&s, true).map_err(|_| CliError::config(format!("unknown format {s:?}"))),
        None => Ok(default),
    }
}

fn dk_sweep(s: &DkSweep, cfg: &Config, sigma_k: f64) -> Result<Vec<f64>> {
    let (lo, hi) = default_range(sigma_k);
    linspace(
        pick(s.dk_min, cfg, "dk_min")?.unwrap_or(lo),
        pick(s.dk_max, cfg, "dk_max")?.unwrap_or(hi),
        pick(s.dk_steps, cfg, "dk_steps")?.unwrap_or(241),
    )
}

fn needs_file(out: Option<&Path>) -> Result<&Path> {
    match out {
        Some(p) if !is_stdout(Some(p)) => Ok(p),
        _ => Err(CliError::config("--gnuplot needs --out FILE")),
    }
}

fn base_meta(table: &mut Table, scene: &Scene) {
    scene.describe(&mut table.meta);
}

pub fn probability(a: &ProbabilityArgs, cfg: &Config) -> Result<()> {
    let scene = resolve_scene(&a.scene, cfg)?;
    let nu = scene.single_nu()?;
    let params = scene.at(scene.dx, nu)?;
    let dks = dk_sweep(&a.sweep, cfg, scene.sigma_k())?;
    let fmt = format(a.output.format, cfg, Format::Csv)?;
    let out = pick(a.output.out.clone(), cfg, "out")?;

    let mut cols = vec!["dk", "p_A", "p_B", "envelope"];
    if scene.physical {
        cols.push("dk_sigma");
    }
    let mut t = Table::new(&cols);
    t.meta("nu", nu);
    t.meta("delta_x", format!("{:?}", scene.dx));
    base_meta(&mut t, &scene);
    for dk in dks {
        let pa = joint_density(dk, Outcome::A, &params);
        let pb = joint_density(dk, Outcome::B, &params);
        let mut row = vec![num(dk), num(pa), num(pb), num(pa + pb)];
        if scene.physical {
            row.push(num(dk / scene.sigma_k()));
        }
        t.push(row);
    }
    emit(&t, out.as_deref(), fmt)?;
    if a.gnuplot || cfg.flag("gnuplot")? {
        let path = needs_file(out.as_deref())?;
        let series = [
            Series { y: 2, title: "P(Δk, A)".into(), filter: None },
            Series { y: 3, title: "P(Δk, B)".into(), filter: None },
            Series { y: 4, title: "C(Δk)".into(), filter: None },
        ];
        write_script(path, &gnuplot_script(path, 1, &series, "Δk", "probability density"))?;
    }
    Ok(())
}

pub fn fisher(a: &FisherArgs, cfg: &Config) -> Result<()> {
    let scene = resolve_scene(&a.scene, cfg)?;
    let sk = scene.sigma_k();
    let dxs = linspace(
        pick(a.dx_min, cfg, "dx_min")?.unwrap_or(0.0),
        pick(a.dx_max, cfg, "dx_max")?.unwrap_or(6.0 / sk),
        pick(a.dx_steps, cfg, "dx_steps")?.unwrap_or(121),
    )?;
    let dks = dk_sweep(&a.sweep, cfg, sk)?;
    let fmt = format(a.format, cfg, Format::Csv)?;
    let dir = pick(a.out.clone(), cfg, "out")?.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let ext = match fmt {
        Format::Csv => "csv",
        Format::Json => "json",
    };

    let mut cols = vec!["dx", "nu", "f_over_h", "f_partial_a", "f_partial_b", "f_nonresolving", "asymptote"];
    if scene.physical {
        cols.push("dx_sigma");
    }
    let mut scan = Table::new(&cols);
    base_meta(&mut scan, &scene);
    scan.meta("qfi", format!("{:?}", scene.envelope.qfi()));
    for &nu in &scene.nus {
        for &dx in &dxs {
            let r = FisherReport::compute(&scene.at(dx, nu)?)?;
            let mut row = vec![
                num(dx),
                num(nu),
                num(r.ratio),
                num(r.f_partial_a),
                num(r.f_partial_b),
                num(r.f_nonresolving),
                num(r.asymptote),
            ];
            if scene.physical {
                row.push(num(dx * sk));
            }
            scan.push(row);
        }
    }

    let mut cols = vec!["dk", "nu", "f_nu"];
    if scene.physical {
        cols.push("dk_sigma");
    }
    let mut contrib = Table::new(&cols);
    base_meta(&mut contrib, &scene);
    contrib.meta("delta_x", format!("{:?}", scene.dx));
    for &nu in &scene.nus {
        let params = scene.at(scene.dx, nu)?;
        for &dk in &dks {
            let mut row = vec![num(dk), num(nu), num(fi_contribution(dk, &params))];
            if scene.physical {
                row.push(num(dk / sk));
            }
            contrib.push(row);
        }
    }

    let scan_path = dir.join(format!("fisher_scan.{ext}"));
    let contrib_path = dir.join(format!("fi_contrib.{ext}"));
    emit(&scan, Some(&scan_path), fmt)?;
    emit(&contrib, Some(&contrib_path), fmt)?;
    if (a.gnuplot || cfg.flag("gnuplot")?) && fmt == Format::Csv {
        let per_nu = |y: usize, label: &str| -> Vec<Series> {
            scene
                .nus
                .iter()
                .map(|&nu| Series { y, title: format!("{label} ν={nu}"), filter: Some((2, nu)) })
                .collect()
        };
        write_script(&scan_path, &gnuplot_script(&scan_path, 1, &per_nu(3, "F/H"), "Δx", "F/H"))?;
        write_script(&contrib_path, &gnuplot_script(&contrib_path, 1, &per_nu(3, "f"), "Δk", "FI density"))?;
    }
    eprintln!("wrote {} and {}", scan_path.display(), contrib_path.display());
    Ok(())
}

pub fn simulate(a: &SimulateArgs, cfg: &Config) -> Result<()> {
    let scene = resolve_scene(&a.scene, cfg)?;
    let nu = scene.single_nu()?;
    let det = resolve_detector(&a.detector, cfg, &scene)?;
    let n = pick(a.n, cfg, "n")?.unwrap_or(3000);
    let seed = pick(a.seed, cfg, "seed")?.unwrap_or(0);
    let samples = sample_batch(n, seed, &scene.at(scene.dx, nu)?, &det)?;
    let out = pick(a.out.clone(), cfg, "out")?;
    let label = out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    with_writer(out.as_deref(), |w| {
        samples.write_csv(w).map_err(|e| CliError::io(&label, e))
    })
}

pub fn read_events(path: &Path, dist_csv: Option<&Path>) -> Result<SampleSet> {
    let tabulated = load_envelope(dist_csv)?;
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(SampleSet::read_csv(BufReader::new(file), tabulated.as_ref())?)
}

pub fn estimate(a: &EstimateArgs, cfg: &Config) -> Result<()> {
    let path = pick(a.events.clone(), cfg, "events")?.ok_or_else(|| CliError::config("--events FILE is required"))?;
    let samples = read_events(&path, pick(a.dist_csv.clone(), cfg, "dist_csv")?.as_deref())?;
    let sk = samples.scene.sigma_k();
    let search = resolve_search(&a.search, cfg, sk)?;
    let nu_override = pick(a.nu, cfg, "nu")?;
    let result = match nu_override {
        Some(nu) => nu_sensitivity(&samples, &[nu], search)?.remove(0).1,
        None => mle(&samples, search)?,
    };
    let nu = nu_override.unwrap_or(samples.scene.nu);

    let mut t = Table::new(&[]);
    t.single = true;
    let mut row = Vec::new();
    if let Value::Object(m) = serde_json::to_value(result)? {
        for (k, v) in m {
            t.columns.push(k);
            row.push(v);
        }
    }
    let scene_at_hat = samples.scene.at(result.delta_x_hat);
    let info = fisher_for_mode(samples.detector.mode, &homsense_core::SceneParams::new(
        scene_at_hat.delta_x,
        nu,
        scene_at_hat.envelope.clone(),
    )?)?;
    let crb_sd = if info > 0.0 { crb(info, result.n_used)?.sqrt() } else { f64::INFINITY };
    for (k, v) in [
        ("delta_x_hat_sigma_units", num(result.delta_x_hat * sk)),
        ("sigma_k", num(sk)),
        ("nu", num(nu)),
        ("mode", Value::String(samples.detector.mode.to_string())),
        ("crb_sd_at_estimate", num(crb_sd)),
    ] {
        t.columns.push(k.into());
        row.push(v);
    }
    t.push(row);
    t.meta("events", path.display());
    let fmt = format(a.output.format, cfg, Format::Json)?;
    emit(&t, pick(a.output.out.clone(), cfg, "out")?.as_deref(), fmt)
}

pub fn trials(a: &TrialsArgs, cfg: &Config) -> Result<()> {
    let scene = resolve_scene(&a.scene, cfg)?;
    let nu = scene.single_nu()?;
    let det = resolve_detector(&a.detector, cfg, &scene)?;
    let sk = scene.sigma_k();
    let search = resolve_search(&a.search, cfg, sk)?;
    let ns = pick_list(&a.n, cfg, "n")?.unwrap_or_else(|| vec![3000]);
    let n_trials = pick(a.trials, cfg, "trials")?.unwrap_or(1000);
    let seed = pick(a.output.seed, cfg, "seed")?.unwrap_or(0);
    let fmt = format(a.output.format, cfg, Format::Csv)?;
    let out = pick(a.output.out.clone(), cfg, "out")?;
    let records_path = pick(a.records.clone(), cfg, "records")?;
    let params = scene.at(scene.dx, nu)?;

    let mut cols = vec!["n", "variance", "crb", "saturation", "bias", "mean_estimate", "sd", "crb_sd"];
    if scene.physical {
        cols.extend(["sd_sigma", "crb_sd_sigma"]);
    }
    let mut stats_table = Table::new(&cols);
    stats_table.meta("seed", seed);
    stats_table.meta("trials", n_trials);
    stats_table.meta("nu", nu);
    stats_table.meta("delta_x", format!("{:?}", scene.dx));
    stats_table.meta("mode", det.mode);
    base_meta(&mut stats_table, &scene);

    let sweep = ns.len() > 1;
    let mut rec_table = Table::new(if sweep {
        &["n", "trial_index", "estimate", "loglik"][..]
    } else {
        &["trial_index", "estimate", "loglik"][..]
    });
    rec_table.meta("seed", seed);

    for &n in &ns {
        let config = TrialConfig {
            scene: params.clone(),
            detector: det.clone(),
            n_per_trial: n,
            n_trials,
            master_seed: seed,
            search,
        };
        let (s, records) = run_trials_with_records(&config)?;
        let mut row = vec![
            Value::from(n),
            num(s.variance),
            num(s.crb_reference),
            num(s.crb_saturation),
            s.bias_relative.map_or(Value::Null, num),
            num(s.mean_estimate),
            num(s.variance.sqrt()),
            num(s.crb_reference.sqrt()),
        ];
        if scene.physical {
            row.push(num(s.variance.sqrt() * sk));
            row.push(num(s.crb_reference.sqrt() * sk));
        }
        stats_table.push(row);
        if records_path.is_some() {
            for r in records {
                let mut row = vec![Value::from(r.trial_index), num(r.estimate), num(r.loglik)];
                if sweep {
                    row.insert(0, Value::from(n));
                }
                rec_table.push(row);
            }
        }
    }
    if let Some(p) = &records_path {
        emit(&rec_table, Some(p), Format::Csv)?;
    }
    emit(&stats_table, out.as_deref(), fmt)?;
    if a.gnuplot || cfg.flag("gnuplot")? {
        let path = needs_file(out.as_deref())?;
        let series = [Series { y: 4, title: "CRB / variance".into(), filter: None }];
        let mut script = String::from("set logscale x\n");
        script.push_str(&gnuplot_script(path, 1, &series, "N", "saturation"));
        write_script(path, &script)?;
    }
    Ok(())
}
