//! Flat `key=value` run files. Keys are the long flag names, with `-` or `_`.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

pub const KEYS: &[&str] = &[
    "nu", "dx", "sigma_k", "dist_csv", "sigma_x_nm", "mode", "pixel", "range", "snap", "k0", "distance",
    "pixel_size", "n", "trials", "seed", "search_lo", "search_hi", "out", "format", "events", "dx_min",
    "dx_max", "dx_steps", "dk_min", "dk_max", "dk_steps", "gnuplot", "records",
];

#[derive(Debug, Default)]
pub struct Config {
    path: PathBuf,
    entries: HashMap<String, (usize, String)>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("{}:{}: expected key=value, got {line:?}", path.display(), i + 1))
            })?;
            let key = k.trim().trim_start_matches("--").replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!("{}:{}: unknown key {key:?}", path.display(), i + 1)));
            }
            entries.insert(key, (i + 1, v.trim().to_string()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn error(&self, line: usize, key: &str, e: impl Display) -> CliError {
        CliError::config(format!("{}:{line}: {key}: {e}", self.path.display()))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|(line, v)| v.parse().map_err(|e| self.error(*line, key, e)))
            .transpose()
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|(line, v)| {
                v.split(',')
                    .map(|s| s.trim().parse().map_err(|e| self.error(*line, key, e)))
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.raw(key) {
            None => Ok(false),
            Some((line, v)) => match v.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" => Ok(false),
                other => Err(self.error(*line, key, format!("expected a boolean, got {other:?}"))),
            },
        }
    }
}

/// Command-line value if given, else the file's.
pub fn pick<T: FromStr>(cli: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    match cli {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}

pub fn pick_list<T: FromStr + Clone>(cli: &[T], cfg: &Config, key: &str) -> Result<Option<Vec<T>>>
where
    T::Err: Display,
{
    if cli.is_empty() {
        cfg.list(key)
    } else {
        Ok(Some(cli.to_vec()))
    }
}
