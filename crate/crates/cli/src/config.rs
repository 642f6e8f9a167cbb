//! Experiment configuration files (TOML).
//!
//! ```toml
//! kind = "sweep"
//! snr_db = [20.0, 30.0, 40.0]
//! algorithms = ["zest", "max_sinr", "sapc", "tdma", "full_power"]
//! profile = "ci"
//!
//! [channel]
//! source = "cyclic"
//! users = 5
//! x = 0.5
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use timtin_core::Algorithm;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Sweep,
    Converge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Full,
    Ci,
}

impl Profile {
    pub fn realizations(self) -> usize {
        match self {
            Profile::Full => 200,
            Profile::Ci => 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSource {
    /// Fresh random cyclic network per realization.
    Cyclic { users: usize, x: f64 },
    /// The same network, read from a channel file, for every realization.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// Channel uses for the beamforming schemes.
    pub n: usize,
    /// Streams per user for the beamforming schemes.
    pub streams: usize,
    pub zest_max_iter: usize,
    pub zest_tol: f64,
    pub max_sinr_max_iter: usize,
    pub sapc_max_iter: usize,
    pub igpc_max_iter: usize,
    /// Random initializations below `init_threshold_db`.
    pub inits_low_snr: usize,
    /// Random initializations at or above `init_threshold_db`.
    pub inits_high_snr: usize,
    pub init_threshold_db: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n: 2,
            streams: 1,
            zest_max_iter: timtin_core::zest::DEFAULT_MAX_ITER,
            zest_tol: timtin_core::zest::DEFAULT_TOL,
            max_sinr_max_iter: timtin_core::baselines::DEFAULT_MAX_ITER,
            sapc_max_iter: timtin_core::baselines::DEFAULT_MAX_ITER,
            igpc_max_iter: 100,
            inits_low_snr: 30,
            inits_high_snr: 10,
            init_threshold_db: 30.0,
        }
    }
}

impl Params {
    pub fn inits_at(&self, snr_db: f64) -> usize {
        if snr_db < self.init_threshold_db {
            self.inits_low_snr
        } else {
            self.inits_high_snr
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub channel: ChannelSource,
    #[serde(default = "default_snr")]
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub profile: Profile,
    /// Overrides the profile's realization count.
    #[serde(default)]
    pub realizations: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Starting configuration for ZEST in convergence runs.
    #[serde(default)]
    pub zest_start: Option<PathBuf>,
}

fn default_snr() -> Vec<f64> {
    vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]
}

fn default_seed() -> u64 {
    1
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::Zest, Algorithm::MaxSinr, Algorithm::Sapc, Algorithm::Tdma, Algorithm::FullPower]
}

impl ExperimentConfig {
    pub fn realizations(&self) -> usize {
        self.realizations.unwrap_or_else(|| self.profile.realizations())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.snr_db.is_empty() {
            return invalid("snr_db must not be empty");
        }
        if self.snr_db.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("snr_db must be strictly ascending");
        }
        if self.snr_db.iter().any(|db| !db.is_finite()) {
            return invalid("snr_db values must be finite");
        }
        if self.algorithms.is_empty() {
            return invalid("algorithms must not be empty");
        }
        if self.realizations() == 0 {
            return invalid("realizations must be at least 1");
        }
        let p = &self.params;
        if p.n == 0 || p.streams == 0 || p.streams > p.n {
            return invalid("params need 1 <= streams <= n");
        }
        if p.inits_low_snr == 0 || p.inits_high_snr == 0 {
            return invalid("initialization counts must be at least 1");
        }
        if p.zest_max_iter == 0 || p.max_sinr_max_iter == 0 || p.sapc_max_iter == 0 || p.igpc_max_iter == 0 {
            return invalid("iteration limits must be at least 1");
        }
        if !(p.zest_tol > 0.0) {
            return invalid("zest_tol must be positive");
        }
        if let ChannelSource::Cyclic { users, x } = self.channel {
            if users < 3 || !(0.5..=1.0).contains(&x) {
                return invalid("cyclic channels need users >= 3 and 0.5 <= x <= 1");
            }
        }
        Ok(())
    }

    /// Relative paths inside the file are resolved against its directory.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let ChannelSource::File { path } = &mut self.channel {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        for path in [&mut self.zest_start, &mut self.output].into_iter().flatten() {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

pub fn parse_config_str(text: &str, origin: &Path) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let mut cfg = parse_config_str(&text, path)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "kind = \"sweep\"\n[channel]\nsource = \"cyclic\"\nusers = 5\nx = 0.5\n";

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config_str(MINIMAL, Path::new("t.toml")).unwrap();
        assert_eq!(cfg.realizations(), 200);
        assert_eq!(cfg.params, Params::default());
        assert_eq!(cfg.algorithms.len(), 5);
        assert_eq!(cfg.params.inits_at(20.0), 30);
        assert_eq!(cfg.params.inits_at(30.0), 10);
    }

    #[test]
    fn ci_profile_uses_twenty_realizations() {
        let cfg = parse_config_str(&format!("profile = \"ci\"\n{MINIMAL}"), Path::new("t.toml")).unwrap();
        assert_eq!(cfg.realizations(), 20);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config_str(&format!("colour = 3\n{MINIMAL}"), Path::new("t.toml")).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn descending_grid_is_rejected() {
        let err = parse_config_str(&format!("snr_db = [30.0, 20.0]\n{MINIMAL}"), Path::new("t.toml")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }
}
