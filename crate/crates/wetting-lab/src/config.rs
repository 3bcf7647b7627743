//! Run configuration: a TOML file with one flat table per concern. The wall
//! strength accepts the literal `inf` for the hard wall. Seeds are mandatory
//! so no run ever depends on the wall clock.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::disorder::DisorderLaw;
use crate::lattice::OriginMode;
use crate::model::{Boundary, ModelParams, Wall};
use crate::sampler::McmcSpec;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config does not parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub d: usize,
    pub n: i64,
    #[serde(default = "default_origin")]
    pub origin: OriginMode,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub h: f64,
    /// Wall strength in (0, inf]; spell the hard wall as `inf`.
    pub k: f64,
    #[serde(default = "default_law")]
    pub law: DisorderLaw,
    #[serde(default = "default_boundary")]
    pub boundary: BoundaryKind,
    #[serde(default)]
    pub boundary_height: f64,
}

fn default_origin() -> OriginMode {
    OriginMode::Corner
}

fn default_law() -> DisorderLaw {
    DisorderLaw::StandardGaussian
}

fn default_boundary() -> BoundaryKind {
    BoundaryKind::Constant
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Constant,
    FreeFieldAtHeight,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default)]
    pub h_list: Vec<f64>,
    #[serde(default)]
    pub k_list: Vec<f64>,
    #[serde(default)]
    pub n_list: Vec<i64>,
    #[serde(default)]
    pub beta_list: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Suite to run; see `list-suites`.
    pub experiment: String,
    /// Master seed; every stream in the run derives from it.
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
    pub model: ModelBlock,
    #[serde(default)]
    pub grids: GridBlock,
    #[serde(default = "default_mcmc")]
    pub mcmc: McmcSpec,
}

fn default_mcmc() -> McmcSpec {
    McmcSpec::default()
}

pub const SUITE_NAMES: &[(&str, &str)] = &[
    ("oracle", "single-site grid: TI free energy vs the exact oracle"),
    ("coupling", "monotone coupled sweeps; fails on any order violation"),
    ("ti-curve", "free-energy curve over h by thermodynamic integration"),
    ("scaling", "analytic -log f / log^2(1/h) table and narrow-band conjecture values"),
    ("kgap", "soft-to-hard wall gap over a K grid"),
    ("superadd", "height-selected lower bound on the free energy"),
    ("marginal", "center-site marginal CDFs over growing centered boxes"),
    ("second-moment", "reduced partition function: mean, variance, variance bound"),
];

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str_validated(&text)
    }

    pub fn from_str_validated(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Collects every violated field so a bad config is fixed in one pass.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errs = Vec::new();
        if !SUITE_NAMES.iter().any(|(n, _)| *n == self.experiment) {
            errs.push(format!(
                "experiment: unknown suite {:?}; valid suites: {}",
                self.experiment,
                SUITE_NAMES
                    .iter()
                    .map(|(n, _)| *n)
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        if self.model.d == 0 {
            errs.push("model.d: dimension must be >= 1".into());
        }
        if self.model.n < 2 {
            errs.push(format!(
                "model.n: side parameter must be >= 2 (got {})",
                self.model.n
            ));
        }
        if !(self.model.k > 0.0) {
            errs.push(format!(
                "model.k: wall strength must lie in (0, inf] (got {}); spell the hard wall as inf",
                self.model.k
            ));
        }
        if !self.model.law.contains(self.model.beta) {
            errs.push(format!(
                "model.beta: {} is outside the admissible interval {:?} of {:?}",
                self.model.beta,
                self.model.law.domain(),
                self.model.law
            ));
        }
        if !self.model.h.is_finite() {
            errs.push(format!("model.h: must be finite (got {})", self.model.h));
        }
        if !self.model.boundary_height.is_finite() {
            errs.push("model.boundary_height: must be finite".into());
        }
        for (i, &k) in self.grids.k_list.iter().enumerate() {
            if !(k > 0.0) {
                errs.push(format!(
                    "grids.k_list[{i}]: wall strength must lie in (0, inf] (got {k})"
                ));
            }
        }
        for (i, &n) in self.grids.n_list.iter().enumerate() {
            if n < 2 {
                errs.push(format!("grids.n_list[{i}]: must be >= 2 (got {n})"));
            }
        }
        for (i, &b) in self.grids.beta_list.iter().enumerate() {
            if !self.model.law.contains(b) {
                errs.push(format!(
                    "grids.beta_list[{i}]: {b} is outside the admissible interval of {:?}",
                    self.model.law
                ));
            }
        }
        if self.grids.h_list.windows(2).any(|w| w[0] >= w[1]) {
            errs.push("grids.h_list: must be strictly increasing".into());
        }
        if self.mcmc.samples == 0 {
            errs.push("mcmc.samples: must be positive".into());
        }
        if self.mcmc.thinning == 0 {
            errs.push("mcmc.thinning: must be positive".into());
        }
        if self.mcmc.replicas == 0 {
            errs.push("mcmc.replicas: must be positive".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(errs))
        }
    }

    /// The model block as validated parameters.
    pub fn model_params(&self) -> Result<ModelParams, crate::model::ModelError> {
        let wall = Wall::from_strength(self.model.k)?;
        let boundary = match self.model.boundary {
            BoundaryKind::Constant => Boundary::Constant(self.model.boundary_height),
            BoundaryKind::FreeFieldAtHeight => {
                Boundary::FreeFieldAtHeight(self.model.boundary_height)
            }
        };
        ModelParams::new(
            self.model.d,
            self.model.n,
            self.model.origin,
            self.model.beta,
            self.model.h,
            wall,
            boundary,
            self.model.law,
            self.seed,
        )
    }
}
