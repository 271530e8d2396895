use serde::Serialize;

use super::config::{ExperimentConfig, GridConfig, ProblemConfig, RunConfig, RunMode};
use super::suggestion;
use crate::error::{Error, Result};
use crate::grid::Scheme;

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub lambda_range: (f64, f64),
    pub config: ExperimentConfig,
}

fn entry(
    name: &'static str,
    description: &'static str,
    lambda_range: (f64, f64),
    problem: ProblemConfig,
    n: usize,
    mode: RunMode,
    lambdas: (Option<f64>, Option<f64>),
) -> CatalogEntry {
    CatalogEntry {
        name,
        description,
        lambda_range,
        config: ExperimentConfig {
            output: None,
            problem,
            grid: GridConfig { n, scheme: Scheme::Spectral },
            solver: Default::default(),
            step: Default::default(),
            run: RunConfig { mode, lambda_start: lambdas.0, lambda_target: lambdas.1, ..Default::default() },
        },
    }
}

fn cmc(ambient: &str) -> ProblemConfig {
    ProblemConfig::Cmc { ambient: ambient.into() }
}

fn geodesic(family: &str, eps: f64, winding: [i32; 2]) -> ProblemConfig {
    ProblemConfig::Geodesic { family: family.into(), eps, winding, base: [0.0, 0.0] }
}

fn harmonic(target: &str, family: &str, eps: f64) -> ProblemConfig {
    ProblemConfig::Harmonic { target: target.into(), family: family.into(), eps, degree: [1, 0] }
}

/// Built-in problems, each with a runnable default configuration.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        entry(
            "cmc-plane",
            "unit circle in the plane, curvature λ",
            (0.25, 4.0),
            cmc("plane"),
            64,
            RunMode::Continue,
            (Some(1.0), Some(2.0)),
        ),
        entry(
            "cmc-sphere",
            "equator of the unit sphere, curvature λ",
            (-1.0, 1.0),
            cmc("sphere"),
            64,
            RunMode::Continue,
            (Some(0.0), Some(0.5)),
        ),
        entry(
            "cmc-torus",
            "straight loop on the flat torus; no invariant volume, obstructed for λ ≠ 0",
            (-1.0, 1.0),
            cmc("flat_torus"),
            64,
            RunMode::Continue,
            (Some(0.0), Some(0.3)),
        ),
        entry(
            "geodesic-flat",
            "straight loop on the flat torus, degenerate by translations",
            (0.0, 1.0),
            geodesic("flat_torus", 0.0, [1, 0]),
            32,
            RunMode::Verify,
            (None, None),
        ),
        entry(
            "geodesic-channel",
            "loop x = 0 of diag(1, 1 + tε cos x), t = λ",
            (0.0, 1.0),
            geodesic("channel_torus", 0.1, [0, 1]),
            64,
            RunMode::Continue,
            (Some(0.2), Some(1.0)),
        ),
        entry(
            "geodesic-lorentz",
            "straight spacelike loop of the Lorentzian flat torus",
            (0.0, 1.0),
            geodesic("lorentz_flat", 0.0, [1, 0]),
            32,
            RunMode::Verify,
            (None, None),
        ),
        entry(
            "harmonic-circle",
            "degree (1, 0) maps to S¹ over conformal source metrics, t = λ",
            (0.0, 1.0),
            harmonic("circle", "conformal_torus", 0.3),
            16,
            RunMode::Continue,
            (Some(0.0), Some(1.0)),
        ),
        entry(
            "harmonic-sphere",
            "equator map into S², degenerate",
            (0.0, 1.0),
            harmonic("sphere", "flat_torus", 0.0),
            16,
            RunMode::Analyze,
            (None, None),
        ),
    ]
}

pub fn lookup(name: &str) -> Result<CatalogEntry> {
    let all = catalog();
    let names: Vec<&str> = all.iter().map(|e| e.name).collect();
    all.iter()
        .find(|e| e.name == name)
        .cloned()
        .ok_or_else(|| Error::Unknown { name: name.to_string(), hint: suggestion(name, &names) })
}
