//! Result tables and their CSV / JSON serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::HarnessError;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Self::Int(x as i64)
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Self {
        Self::Int(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Self::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Self::Text(x)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Float(x) => Some(*x),
            Self::Int(i) => Some(*i as f64),
            Self::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Self::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Self::Float(x) => format_sci(*x),
            Self::Int(i) => i.to_string(),
            Self::Text(s) => s.clone(),
        }
    }
}

/// C-style `%.12e`: `1.234500000000e-03`.
pub fn format_sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    /// Empty for an experiment's main table.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table `{}`", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a numeric column.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let k = self
            .column_index(name)
            .unwrap_or_else(|| panic!("no column `{name}` in table `{}`", self.name));
        self.rows
            .iter()
            .map(|r| r[k].as_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Rows whose text column `name` equals `value`.
    pub fn filter(&self, name: &str, value: &str) -> Table {
        let k = self.column_index(name).expect("filter column exists");
        Table {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r[k].as_str() == Some(value))
                .cloned()
                .collect(),
        }
    }

    /// Rows whose numeric column `name` equals `value` within 1e-12.
    pub fn filter_eq(&self, name: &str, value: f64) -> Table {
        let k = self.column_index(name).expect("filter column exists");
        Table {
            name: self.name.clone(),
            columns: self.columns.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r[k].as_f64().is_some_and(|x| (x - value).abs() <= 1e-12))
                .cloned()
                .collect(),
        }
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub experiment: String,
    pub tables: Vec<Table>,
    /// Scalar findings (fits, maxima, flags) for the sidecar.
    pub summary: serde_json::Value,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> &Table {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .unwrap_or_else(|| panic!("no table `{name}` in {}", self.experiment))
    }
}

pub const META_COLUMNS: [&str; 5] = ["params_hash", "seed", "rtol", "atol", "version"];

/// CSV bytes of one table with the per-row metadata columns appended.
pub fn csv_bytes(table: &Table, config: &Config) -> Result<Vec<u8>, HarnessError> {
    let hash = config.params_hash();
    let meta = [
        hash,
        config.seed.to_string(),
        format_sci(config.tolerances.rtol),
        format_sci(config.tolerances.atol),
        crate::VERSION.to_string(),
    ];
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = table
        .columns
        .iter()
        .map(String::as_str)
        .chain(META_COLUMNS)
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(Value::render)
            .chain(meta.iter().cloned())
            .collect();
        w.write_record(&cells).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Io(std::io::Error::other(e.to_string())))
}

fn csv_err(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e.to_string()))
}

pub fn file_stem(experiment: &str, table: &str) -> String {
    if table.is_empty() {
        experiment.to_string()
    } else {
        format!("{experiment}-{table}")
    }
}

/// Writes every table as `<experiment>[-<table>]_<timestamp>_<seed>.csv` and
/// a `<experiment>_<timestamp>_<seed>.json` sidecar. Returns the paths written.
pub fn write_run(
    out_dir: &Path,
    output: &RunOutput,
    config: &Config,
    timestamp: &str,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut files = Vec::new();
    for table in &output.tables {
        let name = format!(
            "{}_{timestamp}_{}.csv",
            file_stem(&output.experiment, &table.name),
            config.seed
        );
        let path = out_dir.join(&name);
        fs::write(&path, csv_bytes(table, config)?)?;
        files.push(json!({
            "table": table.name,
            "file": name,
            "columns": table.columns,
            "rows": table.rows.len(),
        }));
        written.push(path);
    }
    let sidecar = json!({
        "experiment": output.experiment,
        "version": crate::VERSION,
        "timestamp": timestamp,
        "seed": config.seed,
        "workers": config.workers,
        "params_hash": config.params_hash(),
        "config": config,
        "tables": files,
        "summary": output.summary,
    });
    let path = out_dir.join(format!("{}_{timestamp}_{}.json", output.experiment, config.seed));
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(&path, text + "\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format_matches_printf() {
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(-0.0012345), "-1.234500000000e-03");
        assert_eq!(format_sci(6.02214076e23), "6.022140760000e+23");
        assert_eq!(format_sci(1e-300), "1.000000000000e-300");
        assert_eq!(format_sci(f64::NAN), "nan");
        assert_eq!(format_sci(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn csv_has_metadata_columns() {
        let mut t = Table::new("", &["kappa", "label", "count"]);
        t.push(vec![0.14.into(), "a".into(), 3usize.into()]);
        let cfg = Config::default();
        let text = String::from_utf8(csv_bytes(&t, &cfg).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "kappa,label,count,params_hash,seed,rtol,atol,version"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.400000000000e-01,a,3,"));
        assert!(row.ends_with(&format!(",0,1.000000000000e-08,1.000000000000e-10,{}", crate::VERSION)));
        assert!(lines.next().is_none());
    }

    #[test]
    fn file_names() {
        assert_eq!(file_stem("fig2a", ""), "fig2a");
        assert_eq!(file_stem("offset-fit", "fits"), "offset-fit-fits");
    }

    #[test]
    #[should_panic]
    fn row_width_checked() {
        let mut t = Table::new("", &["a", "b"]);
        t.push(vec![1.0.into()]);
    }
}
