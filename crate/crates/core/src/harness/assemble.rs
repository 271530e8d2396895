use nalgebra::DVector;
use rand::Rng;

use super::config::{ExperimentConfig, ProblemConfig};
use super::suggestion;
use crate::cmc::CmcProblem;
use crate::equivariant::ProblemInstance;
use crate::error::{Error, Result};
use crate::geodesics::{GeodesicProblem, MetricFamily};
use crate::harmonic::HarmonicProblem;
use nalgebra::Matrix2;

const AMBIENTS: [&str; 3] = ["plane", "sphere", "flat_torus"];
const TARGETS: [&str; 2] = ["circle", "sphere"];

/// Nodal layout of a state vector, used to draw smooth random fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `components` periodic blocks of `n` nodes on S¹.
    Curve { n: usize, components: usize },
    /// `components` periodic blocks of `n²` nodes on T².
    Torus { n: usize, components: usize },
}

impl Layout {
    /// Sum of a few random low Fourier modes per component, scaled to `amplitude`.
    pub fn smooth_field(&self, rng: &mut impl Rng, amplitude: f64) -> DVector<f64> {
        let (n, comps, two_d) = match *self {
            Self::Curve { n, components } => (n, components, false),
            Self::Torus { n, components } => (n, components, true),
        };
        let block = if two_d { n * n } else { n };
        let h = std::f64::consts::TAU / n as f64;
        let mut out = DVector::zeros(block * comps);
        for c in 0..comps {
            for _ in 0..4 {
                let a = amplitude * rng.gen_range(-0.5..0.5);
                let kx = rng.gen_range(0..4) as f64;
                let ky = if two_d { rng.gen_range(0..3) as f64 } else { 0.0 };
                let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                for i in 0..block {
                    let (x, y) = ((i % n) as f64 * h, (i / n) as f64 * h);
                    out[c * block + i] += a * (kx * x + ky * y + phase).cos();
                }
            }
        }
        out
    }
}

/// A configured problem together with its known critical point.
pub struct Assembled {
    pub problem: Box<dyn ProblemInstance>,
    pub x0: DVector<f64>,
    pub lambda0: f64,
    pub layout: Layout,
    /// Reference curve of a CMC problem, for the Stokes identities.
    pub cmc: Option<CmcProblem>,
}

fn unknown(name: &str, candidates: &[&str]) -> Error {
    Error::Unknown { name: name.to_string(), hint: suggestion(name, candidates) }
}

pub fn assemble(config: &ExperimentConfig) -> Result<Assembled> {
    config.validate()?;
    let n = config.grid.n;
    let scheme = config.grid.scheme;
    let mut out = match &config.problem {
        ProblemConfig::Cmc { ambient } => {
            let p = match ambient.as_str() {
                "plane" => CmcProblem::plane_circle(n, scheme)?,
                "sphere" => CmcProblem::sphere_equator(n, scheme)?,
                "flat_torus" => CmcProblem::torus_loop(n, scheme)?,
                other => return Err(unknown(other, &AMBIENTS)),
            };
            Assembled {
                problem: Box::new(p.clone()),
                x0: DVector::zeros(n),
                lambda0: p.lambda0(),
                layout: Layout::Curve { n, components: 1 },
                cmc: Some(p),
            }
        }
        ProblemConfig::Geodesic { family, eps, winding, base } => {
            let family = MetricFamily::from_name(family, *eps)?;
            let p = GeodesicProblem::new(family, (winding[0], winding[1]), n, scheme, Matrix2::identity())?;
            let x0 = p.straight_state((base[0], base[1]));
            Assembled {
                problem: Box::new(p),
                x0,
                lambda0: 1.0,
                layout: Layout::Curve { n, components: 2 },
                cmc: None,
            }
        }
        ProblemConfig::Harmonic { target, family, eps, degree } => {
            let family = MetricFamily::from_name(family, *eps)?;
            let (p, comps) = match target.as_str() {
                "circle" => (HarmonicProblem::circle(family, (degree[0], degree[1]), n, scheme)?, 1),
                "sphere" => (HarmonicProblem::equator(family, n, scheme)?, 2),
                other => return Err(unknown(other, &TARGETS)),
            };
            let x0 = DVector::zeros(p.dim());
            Assembled {
                problem: Box::new(p),
                x0,
                lambda0: 0.0,
                layout: Layout::Torus { n, components: comps },
                cmc: None,
            }
        }
    };
    if let Some(l) = config.run.lambda_start {
        out.lambda0 = l;
    }
    let (lo, hi) = out.problem.parameter_range();
    for (name, l) in [("lambda_start", Some(out.lambda0)), ("lambda_target", config.run.lambda_target)] {
        if let Some(l) = l {
            if !(lo..=hi).contains(&l) {
                return Err(Error::Config(format!(
                    "{name} = {l} outside the parameter range [{lo}, {hi}] of {}",
                    out.problem.name()
                )));
            }
        }
    }
    if let ProblemConfig::Geodesic { family, eps, .. } | ProblemConfig::Harmonic { family, eps, .. } = &config.problem
    {
        let family = MetricFamily::from_name(family, *eps)?;
        for l in [Some(out.lambda0), config.run.lambda_target].into_iter().flatten() {
            family.at(l).check_nondegenerate()?;
        }
    }
    Ok(out)
}
