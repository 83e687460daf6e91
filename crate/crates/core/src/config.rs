//! Run configuration, stored as TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HemError, Result};
use crate::gmc::DEFAULT_GRID_POINTS;
use crate::params::Params;
use crate::quadrature::{DEFAULT_MC_SAMPLES, DEFAULT_SEED, DEFAULT_TOL_2D, DEFAULT_TOL_3D};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    SingularVector,
    VerifySelberg,
    Residue,
    ProbeRegularity,
    GmcFusion,
    Suite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOptions {
    pub tol_2d: f64,
    pub tol_3d: f64,
    pub mc_samples: u64,
    /// Largest pole offset of residue fits and regularity probes.
    pub residue_window: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { tol_2d: DEFAULT_TOL_2D, tol_3d: DEFAULT_TOL_3D, mc_samples: DEFAULT_MC_SAMPLES, residue_window: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GmcOptions {
    pub grid_points: usize,
    pub samples: usize,
    pub radii: Vec<f64>,
}

impl Default for GmcOptions {
    fn default() -> Self {
        Self { grid_points: DEFAULT_GRID_POINTS, samples: 10_000, radii: vec![0.0125, 0.025, 0.05, 0.1, 0.2, 0.4] }
    }
}

/// Everything needed to reproduce a run. Missing tables take the defaults
/// below; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "current_version")]
    pub version: u32,
    pub command: Command,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub params: Params,
    #[serde(default)]
    pub quadrature: QuadratureOptions,
    #[serde(default)]
    pub gmc: GmcOptions,
    /// Suite name for `command = "suite"`.
    #[serde(default)]
    pub suite: Option<String>,
    /// Integral name for `residue` and `probe-regularity`.
    #[serde(default)]
    pub integral: Option<String>,
    /// Insertion momentum for `gmc-fusion`.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// `bulk` or `boundary`, for `singular-vector`.
    #[serde(default)]
    pub sector: Option<String>,
    /// Kac label `r,s[,±]` substituted by `singular-vector`.
    #[serde(default)]
    pub at_kac: Option<String>,
}

fn current_version() -> u32 {
    CONFIG_VERSION
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn new(command: Command, params: Params) -> Self {
        Self {
            version: CONFIG_VERSION,
            command,
            seed: DEFAULT_SEED,
            out: None,
            params,
            quadrature: QuadratureOptions::default(),
            gmc: GmcOptions::default(),
            suite: None,
            integral: None,
            alpha: None,
            sector: None,
            at_kac: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HemError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HemError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HemError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(HemError::Usage(format!("config version {} unsupported", self.version)));
        }
        self.params.validate()?;
        if self.seed > i64::MAX as u64 {
            return Err(HemError::Usage("seed must fit in a signed 64-bit TOML integer".into()));
        }
        let q = &self.quadrature;
        if !(q.tol_2d > 0.0 && q.tol_3d > 0.0 && q.residue_window > 0.0) || q.mc_samples == 0 {
            return Err(HemError::Usage("quadrature options must be positive".into()));
        }
        if self.gmc.samples == 0 || self.gmc.radii.is_empty() {
            return Err(HemError::Usage("gmc options must be non-empty".into()));
        }
        let missing = |what: &str| Err(HemError::Usage(format!("command needs {what}")));
        match self.command {
            Command::Suite if self.suite.is_none() => return missing("a suite name"),
            Command::Residue | Command::ProbeRegularity if self.integral.is_none() => return missing("an integral"),
            Command::GmcFusion if self.alpha.is_none() => return missing("alpha"),
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = RunConfig::from_toml("command = \"constants\"\n[params]\ngamma = 1.0\nmu = 1.0\n").unwrap();
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.quadrature, QuadratureOptions::default());
        assert_eq!(cfg.params.mu_l, 0.0);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(matches!(RunConfig::from_toml("command = \"suite\"\n[params]\ngamma = 1.0\n"), Err(HemError::Usage(_))));
        assert!(RunConfig::from_toml("command = \"constants\"\n[params]\ngamma = 2.5\n").is_err());
        assert!(RunConfig::from_toml("command = \"constants\"\nbogus = 1\n[params]\ngamma = 1.0\n").is_err());
    }

    proptest! {
        #[test]
        fn toml_round_trip(g in 0.05f64..1.95, mu in 0.0f64..5.0, seed in 0..i64::MAX as u64, samples in 1usize..100_000) {
            let mut cfg = RunConfig::new(Command::Suite, Params::new(g, mu, 0.5, 0.25).unwrap());
            cfg.seed = seed;
            cfg.suite = Some("gmc".into());
            cfg.gmc.samples = samples;
            cfg.out = Some(PathBuf::from("out/report.json"));
            let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
