use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polar_fault_core::format::{fmt_f64, CSV_HEADER};
use serde_json::{Map, Value};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Named columns of scalar cells, written as versioned CSV or a JSON array.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .map(|c| c.to_string())
                    .zip(row.iter().cloned())
                    .collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Files written by one command, removed again if the command fails.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    format: Format,
    created: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path, format: Format) -> CliResult<Self> {
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            created: Vec::new(),
        })
    }

    pub fn created(&self) -> &[PathBuf] {
        &self.created
    }

    /// Writes `table` to `<stem>.csv` or `<stem>.json` depending on the format.
    pub fn table(&mut self, stem: &str, table: &Table) -> CliResult<PathBuf> {
        let name = format!("{stem}.{}", self.format.extension());
        match self.format {
            Format::Csv => self.file(&name, |out| Ok(table.write_csv(out)?)),
            Format::Json => self.json(&name, &table.to_json()),
        }
    }

    pub fn json(&mut self, name: &str, value: &impl serde::Serialize) -> CliResult<PathBuf> {
        self.file(name, |out| {
            serde_json::to_writer_pretty(&mut *out, value)?;
            writeln!(out)?;
            Ok(())
        })
    }

    pub fn file(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut BufWriter<File>) -> CliResult<()>,
    ) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.created.push(path.clone());
        let mut out = BufWriter::new(file);
        write(&mut out)?;
        out.flush()?;
        Ok(path)
    }

    /// Deletes every file this run created.
    pub fn discard(&mut self) {
        for path in self.created.drain(..) {
            let _ = fs::remove_file(path);
        }
    }
}

pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn int(x: impl Into<u64>) -> Value {
    Value::from(x.into())
}
