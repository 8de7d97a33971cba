use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Collects the paths written by one command.
#[derive(Debug, Default)]
pub struct Outputs {
    pub dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn path(&mut self, name: &str) -> Result<PathBuf> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent)?;
        }
        self.written.push(p.clone());
        Ok(p)
    }

    /// CSV file whose first line is a `#` comment naming the table and its schema version.
    pub fn csv<R: AsRef<[String]>>(&mut self, name: &str, table: &str, header: &[&str], rows: &[R]) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.path(name)?)?);
        writeln!(out, "# reslab {table} schema v{CSV_SCHEMA_VERSION}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r.as_ref())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Whitespace-separated columns with a `#` header line.
    pub fn columns(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.path(name)?)?);
        writeln!(out, "# {}", header.join(" "))?;
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| num(*v)).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.path(name)?)?);
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    /// Raw writer for formats produced elsewhere.
    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.path(name)?)?))
    }
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Serialize)]
pub struct FailureManifest {
    pub command: String,
    pub stage: String,
    pub error: String,
    pub exit_code: i32,
    pub written: Vec<String>,
}
