use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SimplexFamily;
use crate::stream::StreamSeed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ErrorFree,
    PositiveError,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::ErrorFree => "error_free",
            Scheme::PositiveError => "positive_error",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ef" | "error_free" => Ok(Scheme::ErrorFree),
            "pe" | "positive_error" => Ok(Scheme::PositiveError),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Where an experiment's prior pair comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// A hard `(m, S)` pair drawn for the configured alpha.
    Hard,
    /// A random alpha-close pair over `size` messages.
    Random {
        size: usize,
        #[serde(default)]
        prior: SimplexFamily,
    },
    /// A pair read from an instance file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(alias = "instance_spec")]
    pub instance: InstanceSpec,
    pub trials: u64,
    pub master_seed: StreamSeed,
    /// Directory receiving `records.csv`/`summary.json` (or the sweep tables).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 1.0) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        match (self.scheme, self.epsilon) {
            (Scheme::ErrorFree, Some(_)) => Err(Error::InvalidConfig(
                "epsilon is only meaningful for the positive_error scheme".into(),
            )),
            (Scheme::PositiveError, None) => Err(Error::InvalidConfig(
                "positive_error scheme requires epsilon".into(),
            )),
            (Scheme::PositiveError, Some(e)) if !(e > 0.0 && e <= 1.0) => {
                Err(Error::InvalidEpsilon(e))
            }
            _ => Ok(()),
        }
    }
}
