//! Run configuration: defaults, a flat `key = value` file, then flags.

use std::path::{Path, PathBuf};

use qhexa_core::ncalg::{Basis, DEFAULT_STEP_BOUND};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "QHEXA_CONFIG";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Syntax { path: String, line: usize, msg: String },
    #[error("cannot read config {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("invalid {key}: {msg}")]
    Value { key: String, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Basis override; `None` keeps each command's default.
    pub basis: Option<Basis>,
    pub grid_n: usize,
    /// Box half-width in packet widths.
    pub box_sigmas: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub composite_tol: f64,
    pub samples: usize,
    pub step_bound: u64,
    pub manifest: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    /// Report wall-clock times (breaks byte-identical output).
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            basis: None,
            grid_n: 32,
            box_sigmas: 6.5,
            epsilon: 0.5,
            tol: 1e-6,
            composite_tol: 1e-5,
            samples: 8,
            step_bound: DEFAULT_STEP_BOUND,
            manifest: None,
            format: Format::Text,
            seed: 7,
            timing: false,
        }
    }
}

fn positive<T: PartialOrd + Default + std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    let x: T = v.parse().map_err(|_| ConfigError::Value {
        key: key.into(),
        msg: format!("cannot parse {v:?}"),
    })?;
    if x > T::default() {
        Ok(x)
    } else {
        Err(ConfigError::Value {
            key: key.into(),
            msg: format!("{v} must be positive"),
        })
    }
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::Value { key: key.into(), msg };
        match key {
            "basis" => self.basis = Some(value.parse().map_err(|_| bad(format!("{value:?} is not A or B")))?),
            "grid_n" => {
                let n: usize = positive(key, value)?;
                if n < 24 || n % 2 == 1 {
                    return Err(bad(format!("{n} must be even and at least 24")));
                }
                self.grid_n = n;
            }
            "box_sigmas" => self.box_sigmas = positive(key, value)?,
            "epsilon" => self.epsilon = positive(key, value)?,
            "tol" => self.tol = positive(key, value)?,
            "composite_tol" => self.composite_tol = positive(key, value)?,
            "samples" => self.samples = positive(key, value)?,
            "step_bound" => self.step_bound = positive(key, value)?,
            "manifest" => self.manifest = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    _ => return Err(bad(format!("{value:?} is not text or json"))),
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(format!("cannot parse {value:?}")))?,
            "timing" => self.timing = value.parse().map_err(|_| bad(format!("{value:?} is not true or false")))?,
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, path: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: path.into(),
                line: i + 1,
                msg: "expected key = value".into(),
            })?;
            self.set(k.trim(), v.trim()).map_err(|e| ConfigError::Syntax {
                path: path.into(),
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Defaults, then the file named by `explicit` or else by the
    /// environment variable.
    pub fn resolve(explicit: Option<&Path>) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        let from_env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        if let Some(p) = explicit.map(Path::to_path_buf).or(from_env) {
            c.load_file(&p)?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut c = Config::default();
        c.apply_text("# grid\ngrid_n = 48\nformat=json\nbasis = B  # trailing\n", "t").unwrap();
        assert_eq!((c.grid_n, c.format, c.basis), (48, Format::Json, Some(Basis::B)));
        let err = c.apply_text("tol = -1", "t").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }));
        assert!(c.apply_text("grid_n = 25", "t").is_err());
        assert!(c.apply_text("colour = red", "t").is_err());
    }
}
