use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use crate::config::ExperimentConfig;

/// One output table. Rows arrive already in their final order.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Hard invariant violations; any entry makes the run exit nonzero.
    pub violations: Vec<String>,
}

impl Table {
    pub fn new(name: &str, header: Vec<&'static str>) -> Self {
        Self {
            name: name.to_string(),
            header,
            ..Default::default()
        }
    }
}

pub fn num(x: f64) -> String {
    if !x.is_finite() {
        String::new()
    } else if x != 0.0 && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Write `<dir>/<name>.csv` with a `#` metadata header, then the body.
pub fn write_table(
    dir: &Path,
    table: &Table,
    cfg: &ExperimentConfig,
    command: &str,
    seeds: &[u64],
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(format!("{}.csv", table.name));
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut out = BufWriter::new(file);
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "# qloss {} {command}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# config_sha256 = {}", cfg.hash())?;
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    writeln!(out, "# seeds = {}", seeds.join(","))?;
    writeln!(out, "# generated_unix = {stamp}")?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    out.flush()?;
    Ok(path)
}
