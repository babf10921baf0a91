//! Tabular datasets with embedded provenance, emitted as CSV or JSON.
//!
//! CSV layout: one `# provenance: {json}` line, a header row, then data rows.
//! Numbers use Rust's shortest round-trip `{:e}` form (lowercase `e`, `.`
//! decimal, no grouping), lines end in LF, missing values are empty cells.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const PROVENANCE_PREFIX: &str = "# provenance: ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Number(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Number(v) => format!("{v:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn parse(s: &str) -> Cell {
        if s.is_empty() {
            Cell::Missing
        } else if let Ok(v) = s.parse::<f64>() {
            Cell::Number(v)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Number)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// What produced the rows: generator, parameters, tool version, seed.
    pub provenance: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let mut provenance = BTreeMap::new();
        provenance.insert("tool".to_string(), format!("optoneuro {}", env!("CARGO_PKG_VERSION")));
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new(), provenance }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.provenance.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.rows.is_empty() {
            return Err(CliError::Runtime(format!("dataset `{}` has no rows", self.name)));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != self.columns.len()) {
            return Err(CliError::Runtime(format!("dataset `{}` row {i} has the wrong width", self.name)));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), CliError> {
        self.check()?;
        let mut prov = self.provenance.clone();
        prov.insert("name".to_string(), self.name.clone());
        writeln!(w, "{PROVENANCE_PREFIX}{}", serde_json::to_string(&prov).map_err(io_err)?)?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::render)).map_err(io_err)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<Self, CliError> {
        let mut first = String::new();
        r.read_line(&mut first)?;
        let json = first
            .trim_end_matches('\n')
            .strip_prefix(PROVENANCE_PREFIX)
            .ok_or_else(|| CliError::Validation("CSV dataset must start with a provenance line".into()))?;
        let mut provenance: BTreeMap<String, String> =
            serde_json::from_str(json).map_err(|e| CliError::Validation(format!("provenance line: {e}")))?;
        let name = provenance.remove("name").unwrap_or_default();
        let mut csv = csv::ReaderBuilder::new().from_reader(r);
        let columns = csv.headers().map_err(io_err)?.iter().map(str::to_string).collect();
        let rows = csv
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(Cell::parse).collect()).map_err(io_err))
            .collect::<Result<_, _>>()?;
        Ok(Self { name, columns, rows, provenance })
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        self.check()?;
        let mut s = serde_json::to_string_pretty(self).map_err(io_err)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `<dir>/<name>.<ext>` and returns the path.
    pub fn save(&self, dir: &Path, format: Format) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.{}", self.name, format.extension()));
        match format {
            Format::Csv => {
                let mut buf = Vec::new();
                self.write_csv(&mut buf)?;
                std::fs::write(&path, buf)?;
            }
            Format::Json => std::fs::write(&path, self.to_json()?)?,
        }
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_slice(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
            _ => Self::read_csv(text.as_slice()),
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}
