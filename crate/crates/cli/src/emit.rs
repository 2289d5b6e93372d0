//! CSV tables, JSON envelopes and gnuplot scripts, all written atomically.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A rectangular table destined for `<file>`; the first column is the
/// abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(file: &str, columns: &[&str]) -> Self {
        Table { file: file.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(file: &str, columns: Vec<String>) -> Self {
        Table { file: file.to_string(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }
}

/// A gnuplot script drawing columns 2.. of a table against column 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub file: String,
    pub table: String,
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub loglog: bool,
    /// Number of value columns to draw.
    pub curves: usize,
    /// Fitted power law (slope, intercept of ln y against ln x), drawn as a
    /// line and annotated.
    pub fit: Option<(f64, f64)>,
    /// Draw the table as a histogram of its single column instead.
    pub histogram: bool,
}

impl Plot {
    pub fn lines(file: &str, table: &str, title: &str, xlabel: &str, ylabel: &str, curves: usize) -> Self {
        Plot {
            file: file.into(),
            table: table.into(),
            title: title.into(),
            xlabel: xlabel.into(),
            ylabel: ylabel.into(),
            loglog: false,
            curves,
            fit: None,
            histogram: false,
        }
    }
}

/// Everything a command produces before it is written out.
#[derive(Debug, Default)]
pub struct Output {
    pub tables: Vec<Table>,
    /// Preformatted data files (name, bytes).
    pub raw: Vec<(String, Vec<u8>)>,
    pub plots: Vec<Plot>,
    pub results: Map<String, Value>,
}

impl Output {
    pub fn result<V: Into<Value>>(&mut self, key: &str, value: V) {
        self.results.insert(key.to_string(), value.into());
    }
}

/// Renders a table as CSV: header row, shortest round-trip float text (with an
/// exponent at extreme magnitudes), LF line endings.
pub fn table_csv(table: &Table) -> Result<String, CliError> {
    let width = table.columns.len();
    let mut out = table.columns.join(",");
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != width {
            return Err(CliError::Config(format!(
                "{}: row {i} has {} values for {width} columns",
                table.file,
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn plot_script(plot: &Plot) -> String {
    let mut s = String::new();
    writeln!(s, "# {}", plot.title).unwrap();
    writeln!(s, "set datafile separator \",\"").unwrap();
    writeln!(s, "set datafile commentschars \"#\"").unwrap();
    writeln!(s, "set title \"{}\"", plot.title).unwrap();
    writeln!(s, "set xlabel \"{}\"", plot.xlabel).unwrap();
    writeln!(s, "set ylabel \"{}\"", plot.ylabel).unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    if plot.loglog {
        writeln!(s, "set logscale xy").unwrap();
        writeln!(s, "set format y \"%.0e\"").unwrap();
    }
    if plot.histogram {
        writeln!(s, "set style fill solid 0.5").unwrap();
        writeln!(s, "plot \"{}\" using 1 bins=200 with boxes title \"samples\"", plot.table).unwrap();
        return s;
    }
    match plot.fit {
        Some((slope, intercept)) => {
            writeln!(s, "slope = {slope:?}").unwrap();
            writeln!(s, "intercept = {intercept:?}").unwrap();
            writeln!(s, "fit_line(x) = exp(intercept) * x**slope").unwrap();
            writeln!(s, "set label 1 sprintf(\"fitted slope %.4f\", slope) at graph 0.05, graph 0.1").unwrap();
            writeln!(
                s,
                "plot \"{}\" using 1:2 with points pt 7, fit_line(x) with lines title \"fit\"",
                plot.table
            )
            .unwrap();
        }
        None => {
            writeln!(s, "plot for [c=2:{}] \"{}\" using 1:c with lines", plot.curves + 1, plot.table).unwrap();
        }
    }
    s
}

/// Hex SHA-256 of the compact, key-sorted JSON of the echoed input.
pub fn config_hash(input: &Value) -> String {
    let digest = Sha256::digest(input.to_string().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// The JSON written next to the tables. Wall time is not included so that
/// identical runs give identical bytes.
pub fn envelope_json(command: &str, input: &Value, provenance: Value, output: &Output, plots: bool) -> String {
    let mut files: Vec<Value> = output.tables.iter().map(|t| Value::from(t.file.clone())).collect();
    files.extend(output.raw.iter().map(|(name, _)| Value::from(name.clone())));
    let env = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": config_hash(input),
        "input": input,
        "results": Value::Object(output.results.clone()),
        "tables": files,
        "plots": output.plots.iter().filter(|_| plots).map(|p| p.file.clone()).collect::<Vec<_>>(),
        "provenance": provenance,
    });
    let mut text = serde_json::to_string_pretty(&env).expect("envelope serializes");
    text.push('\n');
    text
}

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| CliError::Io(e.error))?;
    Ok(path)
}

/// Renders everything first, then writes tables, plot scripts and finally
/// the envelope `<command>.json`.
pub fn write_output(
    dir: &Path,
    command: &str,
    input: &Value,
    provenance: Value,
    output: &Output,
    plots: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for t in &output.tables {
        files.push((t.file.clone(), table_csv(t)?.into_bytes()));
    }
    files.extend(output.raw.iter().cloned());
    if plots {
        for p in &output.plots {
            files.push((p.file.clone(), plot_script(p).into_bytes()));
        }
    }
    let envelope = envelope_json(command, input, provenance, output, plots);
    files.push((format!("{command}.json"), envelope.into_bytes()));

    fs::create_dir_all(dir)?;
    files.iter().map(|(name, bytes)| write_atomic(dir, name, bytes)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new("t.csv", &["x", "value"]);
        assert_eq!(table_csv(&t).unwrap(), "x,value\n");
    }

    #[test]
    fn floats_round_trip() {
        let mut t = Table::new("t.csv", &["x", "a", "b"]);
        let row = vec![0.1, 1.0 / 3.0, -2.5e-300];
        t.push(row.clone());
        let text = table_csv(&t).unwrap();
        let line = text.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, row);
        assert_eq!(text.lines().next().unwrap(), "x,a,b");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new("t.csv", &["x", "a"]);
        t.push(vec![1.0]);
        assert!(table_csv(&t).is_err());
    }

    #[test]
    fn envelope_keys_are_sorted_and_hash_is_stable() {
        let input = json!({"b": 1, "a": [1.5, 2]});
        let out = Output::default();
        let a = envelope_json("dispersion", &input, json!({}), &out, true);
        let b = envelope_json("dispersion", &input, json!({}), &out, true);
        assert_eq!(a, b);
        let keys: Vec<&str> = ["command", "config_hash", "input", "plots", "provenance", "results", "tables", "version"].to_vec();
        let positions: Vec<usize> = keys.iter().map(|k| a.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(config_hash(&input).len(), 64);
        assert_ne!(config_hash(&input), config_hash(&json!({"b": 2, "a": [1.5, 2]})));
    }

    #[test]
    fn tail_plot_is_loglog_with_slope() {
        let mut p = Plot::lines("tail.gp", "tail.csv", "tail", "x", "W", 1);
        p.loglog = true;
        p.fit = Some((-1.5, 0.1));
        let s = plot_script(&p);
        assert!(s.contains("set logscale xy"));
        assert!(s.contains("slope = -1.5"));
        assert!(s.contains("\"tail.csv\""));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "a.txt", b"one").unwrap();
        write_atomic(dir.path(), "a.txt", b"two").unwrap();
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
