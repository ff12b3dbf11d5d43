use std::path::{Path, PathBuf};

use genmod::io::Format;
use genmod::partition::SsgbParams;
use genmod::{Model, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Everything a run needs besides the command itself. Loaded from a TOML
/// file with `--config`; explicit flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputConfig,
    pub model: ModelConfig,
    pub tolerances: Tolerances,
    pub ssgb: SsgbConfig,
    pub seed: u64,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Eigensolver residual target, relative to `‖M‖_F`.
    pub residual: f64,
    /// Sign tolerance τ, relative to `‖M‖_F`.
    pub sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsgbConfig {
    pub size_floor: usize,
    pub max_depth: Option<usize>,
    pub greedy_q: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    /// `node<TAB>community` lines; only meaningful for `ssgb`.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: InputConfig::default(),
            model: ModelConfig::default(),
            tolerances: Tolerances::default(),
            ssgb: SsgbConfig::default(),
            seed: 42,
            output: OutputConfig::default(),
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            name: "ng".into(),
            gamma: None,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        let o = SolverOptions::default();
        Tolerances {
            residual: o.residual_tol,
            sign: o.tol,
        }
    }
}

impl Default for SsgbConfig {
    fn default() -> Self {
        let p = SsgbParams::default();
        SsgbConfig {
            size_floor: p.size_floor,
            max_depth: p.max_depth,
            greedy_q: p.greedy_q,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes to TOML")
    }

    pub fn model(&self) -> Result<Model, CliError> {
        Ok(Model::parse(&self.model.name, self.model.gamma)?)
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tolerances.sign,
            residual_tol: self.tolerances.residual,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }

    pub fn ssgb_params(&self) -> SsgbParams {
        SsgbParams {
            solver: self.solver(),
            size_floor: self.ssgb.size_floor,
            max_depth: self.ssgb.max_depth,
            greedy_q: self.ssgb.greedy_q,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::default();
        c.input.path = Some("graph.txt".into());
        c.input.format = Format::Matrixmarket;
        c.model = ModelConfig {
            name: "rb".into(),
            gamma: Some(2.5),
        };
        c.ssgb.max_depth = Some(3);
        c.ssgb.greedy_q = true;
        c.output.format = OutputFormat::Flat;
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        assert_eq!(RunConfig::from_toml(&RunConfig::default().to_toml()).unwrap(), RunConfig::default());
    }

    #[test]
    fn defaults_and_partial_files() {
        let c = RunConfig::from_toml("seed = 7\n[model]\nname = \"rn\"\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.model.name, "rn");
        assert_eq!(c.tolerances.sign, 1e-10);
        assert_eq!(c.model().unwrap(), Model::Rn(1.0));
        assert!(RunConfig::from_toml("bogus = 1\n").is_err());
    }
}
