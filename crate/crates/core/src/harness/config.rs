use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::equivariant::{SolverSettings, StepPolicy};
use crate::error::{Error, Result};
use crate::grid::Scheme;

/// One experiment: a problem, its discretization, solver tolerances and
/// the pipeline to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output directory; the CLI `--out` flag takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub step: StepPolicy,
    #[serde(default)]
    pub run: RunConfig,
}

/// Names are kept as strings so that typos get a nearest-match hint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Cmc {
        /// `plane`, `sphere` or `flat_torus`.
        ambient: String,
    },
    Geodesic {
        family: String,
        #[serde(default)]
        eps: f64,
        winding: [i32; 2],
        #[serde(default)]
        base: [f64; 2],
    },
    Harmonic {
        /// `circle` or `sphere`.
        target: String,
        family: String,
        #[serde(default)]
        eps: f64,
        #[serde(default = "default_degree")]
        degree: [i32; 2],
    },
}

fn default_degree() -> [i32; 2] {
    [1, 0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub scheme: Scheme,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, scheme: Scheme::Spectral }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Analyze,
    Continue,
    Verify,
    Project,
}

impl RunMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Analyze => "analyze",
            Self::Continue => "continue",
            Self::Verify => "verify",
            Self::Project => "project",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: RunMode,
    /// Parameter at the known critical point; the problem default if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_target: Option<f64>,
    /// Random trials for `verify` and `project`.
    pub samples: usize,
    pub seed: u64,
    /// Bound on `|g|` for random group elements in `project` and `verify`.
    pub group_radius: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: RunMode::Analyze,
            lambda_start: None,
            lambda_target: None,
            samples: 20,
            seed: 0,
            group_radius: 0.3,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Tolerances and step policy only; names and λ ranges are checked when
    /// the problem is assembled.
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        let tolerances = [
            ("newton_tol", s.newton_tol),
            ("svd_tol", s.svd_tol),
            ("spectral_gap", s.spectral_gap),
            ("angle_tol", s.angle_tol),
            ("rank_tol", s.rank_tol),
            ("multiplier_tol", s.multiplier_tol),
            ("residual_tol", s.residual_tol),
            ("max_condition", s.max_condition),
            ("project_tol", s.project_tol),
            ("step.min_step", self.step.min_step),
            ("run.group_radius", self.run.group_radius),
        ];
        for (name, v) in tolerances {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if s.max_iter == 0 || self.step.steps == 0 {
            return Err(Error::Config("max_iter and step.steps must be at least 1".into()));
        }
        if matches!(self.run.mode, RunMode::Continue) && self.run.lambda_target.is_none() {
            return Err(Error::Config("continue needs run.lambda_target".into()));
        }
        Ok(())
    }
}
