//! Named, reproducible experiments with CSV/SVG/JSON output.

pub mod analysis;
pub mod config;
pub mod output;
mod runners;
pub mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::error::Error;
pub use config::ScenarioConfig;
pub use output::{ResultBundle, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    FreeDiracScan,
    SpinTexture,
    PairProduction,
    SchwingerScan,
    CircuitValidation,
    BellCheck,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::FreeDiracScan,
        ScenarioKind::SpinTexture,
        ScenarioKind::PairProduction,
        ScenarioKind::SchwingerScan,
        ScenarioKind::CircuitValidation,
        ScenarioKind::BellCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::FreeDiracScan => "free-dirac-scan",
            ScenarioKind::SpinTexture => "spin-texture",
            ScenarioKind::PairProduction => "pair-production",
            ScenarioKind::SchwingerScan => "schwinger-scan",
            ScenarioKind::CircuitValidation => "circuit-validation",
            ScenarioKind::BellCheck => "bell-check",
        }
    }

    pub fn default_config(self) -> ScenarioConfig {
        use config::*;
        match self {
            ScenarioKind::FreeDiracScan => ScenarioConfig::FreeDiracScan(Default::default()),
            ScenarioKind::SpinTexture => ScenarioConfig::SpinTexture(Default::default()),
            ScenarioKind::PairProduction => ScenarioConfig::PairProduction(PairProductionConfig::default()),
            ScenarioKind::SchwingerScan => ScenarioConfig::SchwingerScan(SchwingerScanConfig::default()),
            ScenarioKind::CircuitValidation => ScenarioConfig::CircuitValidation(CircuitValidationConfig::default()),
            ScenarioKind::BellCheck => ScenarioConfig::BellCheck(BellCheckConfig::default()),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ScenarioError::Config(format!("unknown scenario '{s}'; see `list-scenarios`")))
    }
}

/// Physical model a scenario runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// The ideal four-level Dirac Hamiltonian.
    Ideal4,
    /// Two coupled three-level transmons driven by the mapped tones.
    Circuit9,
}

#[derive(Debug, ThisError)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    /// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Numerical(_) => 3,
            ScenarioError::Io(_) => 1,
        }
    }
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) | Error::UnsupportedConfiguration(m) | Error::DegenerateDrive(m) => {
                ScenarioError::Config(m)
            }
            other => ScenarioError::Numerical(other),
        }
    }
}

pub type ScenarioResult<T> = std::result::Result<T, ScenarioError>;

impl ScenarioConfig {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioConfig::FreeDiracScan(_) => ScenarioKind::FreeDiracScan,
            ScenarioConfig::SpinTexture(_) => ScenarioKind::SpinTexture,
            ScenarioConfig::PairProduction(_) => ScenarioKind::PairProduction,
            ScenarioConfig::SchwingerScan(_) => ScenarioKind::SchwingerScan,
            ScenarioConfig::CircuitValidation(_) => ScenarioKind::CircuitValidation,
            ScenarioConfig::BellCheck(_) => ScenarioKind::BellCheck,
        }
    }

    pub fn to_table(&self) -> toml::Table {
        let table = match self {
            ScenarioConfig::FreeDiracScan(c) => toml::Table::try_from(c),
            ScenarioConfig::SpinTexture(c) => toml::Table::try_from(c),
            ScenarioConfig::PairProduction(c) => toml::Table::try_from(c),
            ScenarioConfig::SchwingerScan(c) => toml::Table::try_from(c),
            ScenarioConfig::CircuitValidation(c) => toml::Table::try_from(c),
            ScenarioConfig::BellCheck(c) => toml::Table::try_from(c),
        };
        table.expect("config structs serialize to tables")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_table()).expect("tables serialize")
    }

    fn from_table(kind: ScenarioKind, table: toml::Table) -> ScenarioResult<Self> {
        fn de<T: serde::de::DeserializeOwned>(t: toml::Table) -> ScenarioResult<T> {
            t.try_into()
                .map_err(|e: toml::de::Error| ScenarioError::Config(e.to_string()))
        }
        Ok(match kind {
            ScenarioKind::FreeDiracScan => ScenarioConfig::FreeDiracScan(de(table)?),
            ScenarioKind::SpinTexture => ScenarioConfig::SpinTexture(de(table)?),
            ScenarioKind::PairProduction => ScenarioConfig::PairProduction(de(table)?),
            ScenarioKind::SchwingerScan => ScenarioConfig::SchwingerScan(de(table)?),
            ScenarioKind::CircuitValidation => ScenarioConfig::CircuitValidation(de(table)?),
            ScenarioKind::BellCheck => ScenarioConfig::BellCheck(de(table)?),
        })
    }

    /// Parses a TOML document, filling everything it omits from the defaults
    /// of the scenario it names.
    pub fn parse(text: &str) -> ScenarioResult<Self> {
        let user: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ScenarioError::Config(e.to_string()))?;
        let kind: ScenarioKind = match user.get("scenario") {
            Some(toml::Value::String(s)) => s.parse()?,
            Some(_) => return Err(ScenarioError::Config("`scenario` must be a string".into())),
            None => return Err(ScenarioError::Config("missing `scenario` key".into())),
        };
        let mut merged = kind.default_config().to_table();
        merge(&mut merged, user, "")?;
        Self::from_table(kind, merged)
    }

    pub fn load(path: &Path) -> ScenarioResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Deep merge of `user` over `base`. Keys absent from `base` are kept so the
/// strict deserializer can report them by name.
fn merge(base: &mut toml::Table, user: toml::Table, path: &str) -> ScenarioResult<()> {
    for (key, value) in user {
        let here = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(u)) => merge(b, u, &here)?,
            (Some(toml::Value::Table(_)), _) => {
                return Err(ScenarioError::Config(format!("`{here}` must be a table")));
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
    Ok(())
}

/// Execution knobs that do not affect results.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub svg: bool,
}

/// Runs a scenario and returns its bundle without touching the filesystem.
pub fn run(config: &ScenarioConfig, opts: &RunOptions) -> ScenarioResult<ResultBundle> {
    let work = || runners::run(config, opts.svg);
    match opts.threads {
        Some(n) => {
            if n == 0 {
                return Err(ScenarioError::Config("--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            pool.install(work)
        }
        None => work(),
    }
}

/// Runs a scenario and writes `<out>/<scenario>/…`; returns the directory.
pub fn run_to_dir(config: &ScenarioConfig, out: &Path, opts: &RunOptions) -> ScenarioResult<PathBuf> {
    let bundle = run(config, opts)?;
    let dir = out.join(config.kind().name());
    bundle.write(&dir, config)?;
    Ok(dir)
}
