use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3x2, Rotation3, Vector3};

use super::map::{
    dirichlet_energy, harmonic_jacobi, weighted_laplacian, SourceWeights, SphereFrame, TorusGrid, TorusMap,
};
use crate::equivariant::{GramPair, GroupModel, ProblemInstance};
use crate::error::{Error, Result};
use crate::geodesics::MetricFamily;
use crate::grid::Scheme;

/// Exponential chart of sphere-valued maps around a centre map:
/// `φ = exp_{φ₀}(a·e₁ + b·e₂)` node by node.
#[derive(Debug, Clone)]
pub struct SphereChart {
    pub center: Vec<Vector3<f64>>,
    pub frame: SphereFrame,
}

/// Angle beyond which the inverse chart is refused.
const CHART_LIMIT: f64 = PI - 0.05;

impl SphereChart {
    pub fn new(center: Vec<Vector3<f64>>) -> Result<Self> {
        let frame = SphereFrame::new(&center)?;
        Ok(Self { center, frame })
    }

    fn tangent(&self, s: &DVector<f64>, k: usize) -> Vector3<f64> {
        let n = self.center.len();
        self.frame.e1[k] * s[k] + self.frame.e2[k] * s[n + k]
    }

    pub fn values(&self, s: &DVector<f64>) -> Vec<Vector3<f64>> {
        (0..self.center.len())
            .map(|k| {
                let v = self.tangent(s, k);
                let r = v.norm();
                if r < 1e-300 {
                    return self.center[k];
                }
                (self.center[k] * r.cos() + v * (r.sin() / r)).normalize()
            })
            .collect()
    }

    /// Per-node differential of the chart, columns are the images of `e₁, e₂`.
    pub fn differentials(&self, s: &DVector<f64>) -> Vec<Matrix3x2<f64>> {
        (0..self.center.len())
            .map(|k| {
                let (e1, e2, p) = (self.frame.e1[k], self.frame.e2[k], self.center[k]);
                let v = self.tangent(s, k);
                let r = v.norm();
                if r < 1e-12 {
                    return Matrix3x2::from_columns(&[e1, e2]);
                }
                let u = v / r;
                let (sn, cs) = r.sin_cos();
                let d = |w: Vector3<f64>| {
                    let a = u.dot(&w);
                    -p * (sn * a) + u * (cs * a) + (w - u * a) * (sn / r)
                };
                Matrix3x2::from_columns(&[d(e1), d(e2)])
            })
            .collect()
    }

    /// Inverse chart; fails when a node is too close to the antipode of the centre.
    pub fn coordinates(&self, values: &[Vector3<f64>]) -> Result<DVector<f64>> {
        let n = self.center.len();
        let mut out = DVector::zeros(2 * n);
        for (k, q) in values.iter().enumerate() {
            let p = self.center[k];
            let r = p.dot(q).clamp(-1.0, 1.0).acos();
            if r > CHART_LIMIT {
                return Err(Error::ChartExit);
            }
            let scale = if r < 1e-8 { 1.0 } else { r / r.sin() };
            let v = (q - p * p.dot(q)) * scale;
            out[k] = self.frame.e1[k].dot(&v);
            out[n + k] = self.frame.e2[k].dot(&v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub enum HarmonicTarget {
    Circle { degree: (i32, i32) },
    Sphere(Arc<SphereChart>),
}

/// Target isometries: rotations of `S¹` (global, abelian) or `SO(3)` in
/// rotation-vector coordinates.
#[derive(Debug, Clone)]
pub struct TargetRotations {
    target: HarmonicTarget,
}

impl GroupModel for TargetRotations {
    fn dim(&self) -> usize {
        match self.target {
            HarmonicTarget::Circle { .. } => 1,
            HarmonicTarget::Sphere(_) => 3,
        }
    }

    fn orbit_tangent(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        match &self.target {
            HarmonicTarget::Circle { .. } => Ok(DMatrix::from_element(x.len(), 1, 1.0)),
            HarmonicTarget::Sphere(chart) => {
                let n = chart.center.len();
                if x.len() != 2 * n {
                    return Err(Error::DimensionMismatch { expected: 2 * n, got: x.len() });
                }
                let values = chart.values(x);
                let diffs = chart.differentials(x);
                let mut out = DMatrix::zeros(2 * n, 3);
                for (k, d) in diffs.iter().enumerate() {
                    let normal = d.transpose() * d;
                    let inv = normal.try_inverse().ok_or(Error::ChartExit)?;
                    for i in 0..3 {
                        let w = inv * (d.transpose() * Vector3::ith(i, 1.0).cross(&values[k]));
                        out[(k, i)] = w.x;
                        out[(n + k, i)] = w.y;
                    }
                }
                Ok(out)
            }
        }
    }

    fn act(&self, g: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
        match &self.target {
            HarmonicTarget::Circle { .. } => Ok(x.add_scalar(g[0])),
            HarmonicTarget::Sphere(chart) => {
                let norm = g.norm();
                if norm > self.domain_radius() {
                    return Err(Error::OutOfActionDomain { norm, radius: self.domain_radius() });
                }
                let rot = Rotation3::new(Vector3::new(g[0], g[1], g[2]));
                let moved: Vec<_> = chart.values(x).iter().map(|p| rot * p).collect();
                chart.coordinates(&moved)
            }
        }
    }

    fn compose(&self, g1: &DVector<f64>, g2: &DVector<f64>) -> DVector<f64> {
        match self.target {
            HarmonicTarget::Circle { .. } => g1 + g2,
            HarmonicTarget::Sphere(_) => {
                let r = Rotation3::new(Vector3::new(g1[0], g1[1], g1[2]))
                    * Rotation3::new(Vector3::new(g2[0], g2[1], g2[2]));
                let v = r.scaled_axis();
                DVector::from_column_slice(v.as_slice())
            }
        }
    }

    fn domain_radius(&self) -> f64 {
        match self.target {
            HarmonicTarget::Circle { .. } => f64::INFINITY,
            HarmonicTarget::Sphere(_) => 1.0,
        }
    }

    fn is_abelian(&self) -> bool {
        matches!(self.target, HarmonicTarget::Circle { .. })
    }
}

/// Dirichlet energy of maps from the chart torus with source metric
/// `g(t)`, with `λ = t`. The pairing uses the flat chart volume, so the
/// gradient-like field is `−ζ·τ(φ)`.
#[derive(Debug, Clone)]
pub struct HarmonicProblem {
    name: String,
    family: MetricFamily,
    grid: Arc<TorusGrid>,
    group: TargetRotations,
    gram: GramPair,
    range: (f64, f64),
}

impl HarmonicProblem {
    pub fn circle(family: MetricFamily, degree: (i32, i32), n: usize, scheme: Scheme) -> Result<Self> {
        Self::build("harmonic-circle", family, HarmonicTarget::Circle { degree }, n, scheme)
    }

    /// Sphere target with the exponential chart centred at `center`.
    pub fn sphere(family: MetricFamily, center: &TorusMap, n: usize, scheme: Scheme) -> Result<Self> {
        let TorusMap::Sphere { values } = center else {
            return Err(Error::Config("sphere problem needs a sphere-valued centre map".into()));
        };
        let chart = SphereChart::new(values.clone())?;
        Self::build("harmonic-sphere", family, HarmonicTarget::Sphere(Arc::new(chart)), n, scheme)
    }

    /// Chart centred at the equator map `(x, y) ↦ (cos x, sin x, 0)`.
    pub fn equator(family: MetricFamily, n: usize, scheme: Scheme) -> Result<Self> {
        let grid = TorusGrid::new(n, scheme)?;
        Self::sphere(family, &TorusMap::equator(&grid), n, scheme)
    }

    fn build(name: &str, family: MetricFamily, target: HarmonicTarget, n: usize, scheme: Scheme) -> Result<Self> {
        let grid = TorusGrid::new(n, scheme)?;
        // rejects Lorentzian sources up front
        SourceWeights::new(&family.at(1.0), &grid)?;
        let dim = match target {
            HarmonicTarget::Circle { .. } => grid.len(),
            HarmonicTarget::Sphere(_) => 2 * grid.len(),
        };
        let gram = GramPair::uniform(dim, grid.weight());
        Ok(Self {
            name: name.to_string(),
            family,
            grid,
            group: TargetRotations { target },
            gram,
            range: (0.0, 1.0),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn grid(&self) -> &Arc<TorusGrid> {
        &self.grid
    }

    pub fn family(&self) -> MetricFamily {
        self.family
    }

    pub fn target(&self) -> &HarmonicTarget {
        &self.group.target
    }

    pub fn weights(&self, t: f64) -> Result<SourceWeights> {
        SourceWeights::new(&self.family.at(t), &self.grid)
    }

    pub fn map(&self, x: &DVector<f64>) -> Result<TorusMap> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(match &self.group.target {
            HarmonicTarget::Circle { degree } => TorusMap::Circle { degree: *degree, remainder: x.clone() },
            HarmonicTarget::Sphere(chart) => TorusMap::Sphere { values: chart.values(x) },
        })
    }

    /// Chart coordinates of a map; sphere maps must stay inside the chart.
    pub fn state_of(&self, map: &TorusMap) -> Result<DVector<f64>> {
        match (map, &self.group.target) {
            (TorusMap::Circle { degree, remainder }, HarmonicTarget::Circle { degree: d }) if degree == d => {
                Ok(remainder.clone())
            }
            (TorusMap::Sphere { values }, HarmonicTarget::Sphere(chart)) => chart.coordinates(values),
            _ => Err(Error::Config("map does not match the problem target".into())),
        }
    }

    pub fn frame(&self) -> Option<&SphereFrame> {
        match &self.group.target {
            HarmonicTarget::Sphere(chart) => Some(&chart.frame),
            HarmonicTarget::Circle { .. } => None,
        }
    }
}

impl ProblemInstance for HarmonicProblem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        self.gram.dim()
    }

    fn functional(&self, x: &DVector<f64>, lambda: f64) -> Result<f64> {
        Ok(dirichlet_energy(&self.map(x)?, &self.grid, &self.weights(lambda)?))
    }

    fn gradient(&self, x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
        let map = self.map(x)?;
        let lap = weighted_laplacian(&map, &self.grid, &self.weights(lambda)?);
        match &self.group.target {
            HarmonicTarget::Circle { .. } => Ok(-&lap[0]),
            HarmonicTarget::Sphere(chart) => {
                let n = self.grid.len();
                let mut out = DVector::zeros(2 * n);
                for (k, d) in chart.differentials(x).iter().enumerate() {
                    let g = -(d.transpose() * Vector3::new(lap[0][k], lap[1][k], lap[2][k]));
                    out[k] = g.x;
                    out[n + k] = g.y;
                }
                Ok(out)
            }
        }
    }

    /// Exact for the circle target everywhere and for the sphere target at
    /// the chart centre; elsewhere the solvers fall back to differences.
    fn linearization(&self, x: &DVector<f64>, lambda: f64) -> Option<Result<DMatrix<f64>>> {
        let sphere_off_centre = matches!(self.group.target, HarmonicTarget::Sphere(_)) && x.amax() != 0.0;
        if sphere_off_centre {
            return None;
        }
        Some((|| harmonic_jacobi(&self.map(x)?, &self.grid, &self.weights(lambda)?, self.frame()))())
    }

    fn gram(&self) -> &GramPair {
        &self.gram
    }

    fn group(&self) -> &dyn GroupModel {
        &self.group
    }

    fn parameter_range(&self) -> (f64, f64) {
        self.range
    }
}
