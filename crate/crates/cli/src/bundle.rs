//! Result tables, scalar summary and their on-disk form.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn matches(&self, x: f64) -> bool {
        match self {
            Cell::Num(v) => v.to_bits() == x.to_bits(),
            Cell::Int(i) => *i as f64 == x,
            Cell::Text(_) => false,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    fn contains(&self, x: f64) -> bool {
        self.rows.iter().flatten().any(|c| c.matches(x))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub code_version: String,
    /// SHA-256 of the little-endian bytes of each discretisation grid.
    pub grid_hashes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub class: String,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub tables: Vec<Table>,
    pub summary: BTreeMap<String, f64>,
    pub provenance: Provenance,
    pub failure: Option<Failure>,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    experiment: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a Failure>,
    summary: &'a BTreeMap<String, f64>,
    tables: Vec<String>,
    provenance: &'a Provenance,
    config: &'a ExperimentConfig,
}

impl ResultBundle {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            experiment: config.experiment.name().into(),
            config: config.clone(),
            tables: vec![],
            summary: BTreeMap::new(),
            provenance: Provenance { code_version: env!("CARGO_PKG_VERSION").into(), grid_hashes: BTreeMap::new() },
            failure: None,
        }
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn scalar(&mut self, key: &str, value: f64) {
        self.summary.insert(key.into(), value);
    }

    pub fn grid(&mut self, name: &str, values: &[f64]) {
        let bytes: Vec<u8> = values.iter().flat_map(|x| x.to_le_bytes()).collect();
        self.grid_bytes(name, &bytes);
    }

    pub fn grid_bytes(&mut self, name: &str, bytes: &[u8]) {
        self.provenance.grid_hashes.insert(name.into(), hex::encode(Sha256::digest(bytes)));
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Summary keys whose value does not occur in any table.
    pub fn orphan_scalars(&self) -> Vec<String> {
        self.summary
            .iter()
            .filter(|(_, v)| !self.tables.iter().any(|t| t.contains(**v)))
            .map(|(k, _)| k.clone())
            .collect()
    }

    pub fn summary_json(&self) -> String {
        let file = SummaryFile {
            experiment: &self.experiment,
            status: if self.failure.is_some() { "failed" } else { "ok" },
            failure: self.failure.as_ref(),
            summary: &self.summary,
            tables: self.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
            provenance: &self.provenance,
            config: &self.config,
        };
        serde_json::to_string_pretty(&file).expect("summary serializes") + "\n"
    }

    /// One CSV per table plus `summary.json`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        fs::write(dir.join("summary.json"), self.summary_json())
    }
}
