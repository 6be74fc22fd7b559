//! Result bundles: CSV tables, optional SVG plots and a JSON manifest.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

use super::{ScenarioConfig, ScenarioError, ScenarioResult};

/// Shortest round-trip formatting, so CSVs are diffable and lossless.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// One CSV file with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&x| num(x)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    pub fn to_csv(&self) -> ScenarioResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| ScenarioError::Io(std::io::Error::other(e.to_string()));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.into_inner()
            .map_err(|e| ScenarioError::Io(std::io::Error::other(e.to_string())))
    }
}

/// Everything a scenario run produces.
#[derive(Clone, Debug, Default)]
pub struct ResultBundle {
    pub tables: Vec<Table>,
    /// `(file stem, SVG document)`.
    pub plots: Vec<(String, String)>,
    /// Human-readable headline results.
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

impl ResultBundle {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn write(&self, dir: &Path, config: &ScenarioConfig) -> ScenarioResult<()> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for t in &self.tables {
            let name = format!("{}.csv", t.name);
            std::fs::write(dir.join(&name), t.to_csv()?)?;
            files.push(json!({ "file": name, "columns": t.header, "rows": t.rows.len() }));
        }
        for (stem, doc) in &self.plots {
            let name = format!("{stem}.svg");
            std::fs::write(dir.join(&name), doc)?;
            files.push(json!({ "file": name }));
        }
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = json!({
            "scenario": config.kind().name(),
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": utc_timestamp(now),
            "config": config.to_table(),
            "files": files,
            "summary": self.summary,
            "warnings": self.warnings,
        });
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| ScenarioError::Io(std::io::Error::other(e)))?;
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}

/// `YYYY-MM-DDTHH:MM:SSZ` from Unix seconds (proleptic Gregorian, UTC).
pub fn utc_timestamp(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    // civil-from-days, era-based
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        (rem % 3600) / 60,
        rem % 60
    )
}
