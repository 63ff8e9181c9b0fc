//! Tables written as CSV (with `# key=value` metadata) or JSON objects.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::{CliError, Result};

/// JSON value for a float; non-finite values become strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(format!("{x}")))
}

#[derive(Debug, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Write JSON as one object rather than an array.
    pub single: bool,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write + ?Sized>(&self, w: &mut W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w).map_err(|e| CliError::io("<output>", e)),
            Format::Json => {
                let objects: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                        Value::Object(m)
                    })
                    .collect();
                if self.single && objects.len() == 1 {
                    serde_json::to_writer_pretty(&mut *w, &objects[0])?;
                } else {
                    serde_json::to_writer_pretty(&mut *w, &objects)?;
                }
                writeln!(w).map_err(|e| CliError::io("<output>", e))
            }
        }
    }

    fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// `None` or `-` means standard output.
pub fn is_stdout(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

pub fn emit(table: &Table, out: Option<&Path>, format: Format) -> Result<()> {
    with_writer(out, |w| table.write(w, format))
}

pub fn with_writer(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) if !is_stdout(Some(path)) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| CliError::io(path, e))
        }
        _ => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush().map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub struct Series {
    pub y: usize,
    pub title: String,
    /// Plot only rows whose column `.0` equals `.1`.
    pub filter: Option<(usize, f64)>,
}

/// A gnuplot script plotting columns of a CSV file (1-based column numbers).
pub fn gnuplot_script(data: &Path, x: usize, series: &[Series], xlabel: &str, ylabel: &str) -> String {
    let name = data.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\n");
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\nset key outside\n"));
    let terms: Vec<String> = series
        .iter()
        .map(|se| {
            let y = match se.filter {
                Some((col, v)) => format!("(${col}=={v:?}?${}:1/0)", se.y),
                None => format!("{}", se.y),
            };
            format!("'{name}' using {x}:{y} with lines title '{}'", se.title)
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&terms.join(", \\\n     "));
    s.push('\n');
    s
}

pub fn script_path(data: &Path) -> PathBuf {
    data.with_extension("gp")
}

pub fn write_script(data: &Path, script: &str) -> Result<()> {
    let path = script_path(data);
    std::fs::write(&path, script).map_err(|e| CliError::io(&path, e))
}
