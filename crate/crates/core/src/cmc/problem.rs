use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::ambient::{AmbientKind, VolumePrimitive};
use super::curve::{circle, horizontal_loop, latitude, CurveGrid};
use super::graph::{evaluate, isometry_regraph, jacobi_matrix, killing_normals, GraphGeometry, NormalGraph};
use super::volume::{sphere_pole, volume_with};
use crate::equivariant::{GramPair, GroupModel, ProblemInstance};
use crate::error::Result;
use crate::grid::Scheme;

/// Ambient isometries acting on graph functions by move-and-regraph.
#[derive(Debug, Clone)]
pub struct CmcGroup {
    geometry: Arc<GraphGeometry>,
    radius: f64,
}

impl GroupModel for CmcGroup {
    fn dim(&self) -> usize {
        self.geometry.ambient().group_dim()
    }

    /// `⟨K_j, N⟩ / ⟨∂y/∂φ, N⟩`: the graph-function velocity of the j-th
    /// Killing flow.
    fn orbit_tangent(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let state = evaluate(&self.geometry, x)?;
        let mut b = killing_normals(&state);
        for (k, mut row) in b.row_iter_mut().enumerate() {
            row /= state.c[k];
        }
        Ok(b)
    }

    fn act(&self, g: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
        let graph = NormalGraph::new(self.geometry.clone(), x.clone())?;
        Ok(isometry_regraph(&graph, g.as_slice())?.phi)
    }

    fn compose(&self, g1: &DVector<f64>, g2: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.geometry.ambient().compose(g1.as_slice(), g2.as_slice()))
    }

    fn domain_radius(&self) -> f64 {
        self.radius
    }

    fn is_abelian(&self) -> bool {
        self.geometry.ambient().kind == AmbientKind::FlatTorus
    }
}

/// `f(φ, λ) = Length(y_φ) − λ·σ·𝒱(y_φ)`, whose gradient-like field is
/// `δf = (κ − λ)·⟨∂y/∂φ, N⟩·|y'|`: the curvature residual weighted by the
/// induced length element. `σ` accounts for the reference orientation so
/// that critical points have `κ = λ` with respect to `N`.
#[derive(Debug, Clone)]
pub struct CmcProblem {
    name: String,
    geometry: Arc<GraphGeometry>,
    primitive: VolumePrimitive,
    gram: GramPair,
    group: CmcGroup,
    range: (f64, f64),
    lambda0: f64,
}

impl CmcProblem {
    pub fn new(
        name: impl Into<String>,
        geometry: Arc<GraphGeometry>,
        primitive: VolumePrimitive,
        lambda0: f64,
        range: (f64, f64),
    ) -> Self {
        let n = geometry.n();
        let gram = GramPair::uniform(n, geometry.reference.grid.h());
        let group = CmcGroup { geometry: geometry.clone(), radius: 0.5 };
        Self { name: name.into(), geometry, primitive, gram, group, range, lambda0 }
    }

    /// Unit circle in the plane with outward normal; critical at `λ = 1`.
    pub fn plane_circle(n: usize, scheme: Scheme) -> Result<Self> {
        let grid = CurveGrid::new(n, scheme)?;
        let geom = GraphGeometry::right_handed(circle(1.0, &grid))?;
        Ok(Self::new("cmc-plane", geom, VolumePrimitive::Plane, 1.0, (0.25, 4.0)))
    }

    /// Equator of the unit sphere with northward normal; critical at `λ = 0`.
    /// The latitude at height `sin c` has `κ = −tan c`.
    pub fn sphere_equator(n: usize, scheme: Scheme) -> Result<Self> {
        let grid = CurveGrid::new(n, scheme)?;
        let reference = latitude(0.0, &grid);
        let pole = sphere_pole(&reference)?;
        let geom = GraphGeometry::left_handed(reference)?;
        Ok(Self::new("cmc-sphere", geom, VolumePrimitive::Sphere { pole }, 0.0, (-3.0, 3.0)))
    }

    /// Straight loop `y = 0` on the flat torus with normal `∂y`. Uses the
    /// non-invariant lifted primitive `−y dx`.
    pub fn torus_loop(n: usize, scheme: Scheme) -> Result<Self> {
        let grid = CurveGrid::new(n, scheme)?;
        let geom = GraphGeometry::left_handed(horizontal_loop(0.0, &grid))?;
        Ok(Self::new("cmc-torus", geom, VolumePrimitive::TorusLift, 0.0, (-1.0, 1.0)))
    }

    pub fn geometry(&self) -> &Arc<GraphGeometry> {
        &self.geometry
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn graph(&self, phi: &DVector<f64>) -> Result<NormalGraph> {
        NormalGraph::new(self.geometry.clone(), phi.clone())
    }

    /// Weighted volume term `σ·𝒱` with the problem's fixed primitive.
    pub fn signed_volume(&self, phi: &DVector<f64>) -> Result<f64> {
        let state = evaluate(&self.geometry, phi)?;
        Ok(self.geometry.sigma * volume_with(&state.curve, &self.primitive)?)
    }
}

impl ProblemInstance for CmcProblem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        self.geometry.n()
    }

    fn functional(&self, x: &DVector<f64>, lambda: f64) -> Result<f64> {
        let state = evaluate(&self.geometry, x)?;
        let length = state.jet.speed.sum() * self.geometry.reference.grid.h();
        let vol = volume_with(&state.curve, &self.primitive)?;
        Ok(length - lambda * self.geometry.sigma * vol)
    }

    fn gradient(&self, x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
        let s = evaluate(&self.geometry, x)?;
        Ok(DVector::from_iterator(
            x.len(),
            (0..x.len()).map(|k| (s.kappa[k] - lambda) * s.c[k] * s.jet.speed[k]),
        ))
    }

    /// `diag(c·|y'|)·J·diag(c)`, exact at constant-curvature curves.
    fn linearization(&self, x: &DVector<f64>, _lambda: f64) -> Option<Result<DMatrix<f64>>> {
        Some(evaluate(&self.geometry, x).map(|s| {
            let mut j = jacobi_matrix(&s, self.geometry.ambient().gaussian_curvature());
            for r in 0..x.len() {
                let w = s.c[r] * s.jet.speed[r];
                for col in 0..x.len() {
                    j[(r, col)] *= w * s.c[col];
                }
            }
            j
        }))
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

    fn invariance_obstruction(&self) -> Option<String> {
        (self.geometry.ambient().kind == AmbientKind::FlatTorus).then(|| {
            "flat torus: no invariant volume functional, so nonzero curvature cannot be prescribed"
                .to_string()
        })
    }
}
