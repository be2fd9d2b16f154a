//! Flags, environment, config file and their merge into a validated run configuration.
//!
//! Precedence, highest first: command-line flag, `QVIR_*` environment variable,
//! config file, built-in default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::suites::Suite;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid value for {key}: {value:?}")]
    Value { key: String, value: String },
    #[error("unknown suite {0:?}; valid suites: {valid}", valid = Suite::names().join(", "))]
    UnknownSuite(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Parser)]
#[command(name = "qvir", version, about = "Numerical verification of q-Virasoro free-field identities")]
pub struct Cli {
    #[command(flatten)]
    pub opts: CommonOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonOpts {
    #[arg(long, global = true, env = "QVIR_Q")]
    pub q: Option<f64>,
    #[arg(long, global = true, env = "QVIR_T")]
    pub t: Option<f64>,
    #[arg(long, global = true, env = "QVIR_ELL")]
    pub ell: Option<u32>,
    #[arg(long, global = true, env = "QVIR_K")]
    pub k: Option<u32>,
    /// Momentum label of the vertex at the origin in four-point functions.
    #[arg(long = "L", global = true, env = "QVIR_L")]
    pub l_label: Option<f64>,
    /// Bracket parameter of the connection matrix.
    #[arg(long, global = true, env = "QVIR_R")]
    pub r: Option<f64>,
    /// Largest bra/ket degree.
    #[arg(long, global = true, env = "QVIR_DEGREE")]
    pub degree: Option<usize>,
    /// Largest |N| of the (w/z)^N coefficients compared.
    #[arg(long, global = true, env = "QVIR_WINDOW")]
    pub window: Option<i64>,
    /// Tolerance for every selected check (default: per suite).
    #[arg(long, global = true, env = "QVIR_TOL")]
    pub tol: Option<f64>,
    #[arg(long, global = true, env = "QVIR_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, env = "QVIR_THREADS")]
    pub threads: Option<usize>,
    /// Flat key=value file; keys are the flag names.
    #[arg(long, global = true, env = "QVIR_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "QVIR_JSON", conflicts_with = "csv")]
    pub json: bool,
    #[arg(long, global = true, env = "QVIR_CSV")]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites.
    Verify {
        /// Suite names, repeatable or comma separated; `all` selects every suite.
        #[arg(long, value_delimiter = ',', env = "QVIR_SUITE")]
        suite: Vec<String>,
    },
    /// Evaluate a single function and print its value.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// phi21, gamma, theta, bracket, two-point, four-point, connection-matrix
    pub function: String,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// `+` or `-` for four-point.
    #[arg(long, allow_hyphen_values = true, default_value = "+")]
    pub sign: String,
    /// `closed` or `jackson` for four-point.
    #[arg(long, default_value = "closed")]
    pub method: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// The merged, validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: f64,
    pub t: f64,
    pub ell: Option<u32>,
    pub k: Option<u32>,
    pub l_label: f64,
    pub r: f64,
    pub degree: usize,
    pub window: i64,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Format,
    pub suites: Vec<Suite>,
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are ignored.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected key=value, got {line:?}"),
            });
        };
        let key = key.trim().trim_start_matches("--").to_string();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::Syntax {
                line: i + 1,
                msg: format!("unknown key {key:?}; valid keys: {}", FILE_KEYS.join(", ")),
            });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

const FILE_KEYS: [&str; 15] = [
    "q", "t", "ell", "k", "L", "r", "degree", "window", "tol", "suite", "json", "csv", "seed", "threads", "config",
];

fn read_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let map = parse_config_file(&text)?;
    if map.contains_key("config") {
        return Err(ConfigError::Invalid("a config file cannot name another config file".into()));
    }
    Ok(map)
}

fn file_value<T: std::str::FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, ConfigError> {
    file.get(key)
        .map(|v| {
            v.parse().map_err(|_| ConfigError::Value {
                key: key.to_string(),
                value: v.clone(),
            })
        })
        .transpose()
}

fn file_flag(file: &BTreeMap<String, String>, key: &str) -> Result<bool, ConfigError> {
    match file.get(key).map(|v| v.to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) if ["1", "true", "yes", "on"].contains(&v.as_str()) => Ok(true),
        Some(v) if ["0", "false", "no", "off", ""].contains(&v.as_str()) => Ok(false),
        Some(v) => Err(ConfigError::Value {
            key: key.to_string(),
            value: v,
        }),
    }
}

/// Merges flags (already carrying environment values) over the config file and defaults.
pub fn resolve(opts: &CommonOpts, suites: &[String]) -> Result<RunConfig, ConfigError> {
    let file = match &opts.config {
        Some(path) => read_file(path)?,
        None => BTreeMap::new(),
    };
    macro_rules! pick {
        ($field:ident, $key:expr) => {
            match opts.$field {
                Some(v) => Some(v),
                None => file_value(&file, $key)?,
            }
        };
    }
    let format = if opts.json {
        Format::Json
    } else if opts.csv {
        Format::Csv
    } else {
        match (file_flag(&file, "json")?, file_flag(&file, "csv")?) {
            (true, true) => return Err(ConfigError::Invalid("json and csv are mutually exclusive".into())),
            (true, false) => Format::Json,
            (false, true) => Format::Csv,
            (false, false) => Format::Text,
        }
    };
    let suite_names: Vec<String> = if suites.is_empty() {
        file.get("suite")
            .map(|s| s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect())
            .unwrap_or_default()
    } else {
        suites.to_vec()
    };
    let cfg = RunConfig {
        q: pick!(q, "q").unwrap_or(0.7),
        t: pick!(t, "t").unwrap_or(0.3),
        ell: pick!(ell, "ell"),
        k: pick!(k, "k"),
        l_label: pick!(l_label, "L").unwrap_or(1.0),
        r: pick!(r, "r").unwrap_or(5.0),
        degree: pick!(degree, "degree").unwrap_or(4),
        window: pick!(window, "window").unwrap_or(4),
        tol: pick!(tol, "tol"),
        seed: pick!(seed, "seed"),
        threads: pick!(threads, "threads"),
        format,
        suites: Suite::parse_list(&suite_names)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        for (name, v) in [("q", self.q), ("t", self.t)] {
            if !(v > 0.0 && v < 1.0) {
                return invalid(format!("{name} = {v} must lie in (0, 1)"));
            }
        }
        if self.q == self.t {
            return invalid(format!("q = t = {} gives p = 1, which is excluded", self.q));
        }
        if self.window < 0 {
            return invalid(format!("window = {} must be >= 0", self.window));
        }
        if (self.degree as i64) < self.window {
            return invalid(format!("degree = {} must be >= window = {}", self.degree, self.window));
        }
        if self.ell == Some(0) {
            return invalid("ell must be >= 1".into());
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return invalid(format!("r = {} must be positive", self.r));
        }
        if !self.l_label.is_finite() {
            return invalid(format!("L = {} must be finite", self.l_label));
        }
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return invalid(format!("tol = {tol} must be positive"));
            }
        }
        if self.threads == Some(0) {
            return invalid("threads must be >= 1".into());
        }
        Ok(())
    }
}
