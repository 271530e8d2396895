use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use super::metric::{MetricFamily, MetricField};
use crate::equivariant::{GramPair, GroupModel, ProblemInstance};
use crate::error::{Error, Result};
use crate::grid::{circular_shift, CurveGrid, Scheme};

/// Closed curve on the torus chart: `γ(θ) = winding·θ + periodic(θ)`.
#[derive(Debug, Clone)]
pub struct ClosedCurve {
    /// Periodic parts of the two chart components.
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub winding: (i32, i32),
    pub grid: Arc<CurveGrid>,
}

impl ClosedCurve {
    /// Straight loop through `base` in the homotopy class `winding`.
    pub fn straight(base: (f64, f64), winding: (i32, i32), grid: &Arc<CurveGrid>) -> Self {
        let n = grid.n();
        Self {
            x: DVector::from_element(n, base.0),
            y: DVector::from_element(n, base.1),
            winding,
            grid: grid.clone(),
        }
    }

    /// Component-major state vector `[x; y]`.
    pub fn state(&self) -> DVector<f64> {
        let n = self.x.len();
        let mut s = DVector::zeros(2 * n);
        s.rows_mut(0, n).copy_from(&self.x);
        s.rows_mut(n, n).copy_from(&self.y);
        s
    }

    pub fn from_state(state: &DVector<f64>, winding: (i32, i32), grid: &Arc<CurveGrid>) -> Result<Self> {
        let n = grid.n();
        if state.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: state.len() });
        }
        Ok(Self {
            x: state.rows(0, n).into_owned(),
            y: state.rows(n, n).into_owned(),
            winding,
            grid: grid.clone(),
        })
    }

    fn w(&self) -> Vector2<f64> {
        Vector2::new(self.winding.0 as f64, self.winding.1 as f64)
    }

    /// Chart points `γ(θ_k)` on the universal cover.
    pub fn points(&self) -> Vec<Vector2<f64>> {
        let w = self.w();
        self.grid
            .grid
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, &t)| Vector2::new(self.x[k], self.y[k]) + w * t)
            .collect()
    }

    fn jet(&self) -> (Vec<Vector2<f64>>, Vec<Vector2<f64>>, Vec<Vector2<f64>>) {
        let ops = &self.grid.ops;
        let (x1, y1) = (&ops.d1 * &self.x, &ops.d1 * &self.y);
        let (x2, y2) = (&ops.d2 * &self.x, &ops.d2 * &self.y);
        let w = self.w();
        let n = self.x.len();
        let d1 = (0..n).map(|k| Vector2::new(x1[k], y1[k]) + w).collect();
        let d2 = (0..n).map(|k| Vector2::new(x2[k], y2[k])).collect();
        (self.points(), d1, d2)
    }
}

/// `½ ∫ g(γ', γ') dθ`.
pub fn energy(curve: &ClosedCurve, metric: &MetricField) -> f64 {
    let (p, d1, _) = curve.jet();
    let sum: f64 = (0..p.len()).map(|k| (d1[k].transpose() * metric.g(&p[k]) * d1[k])[(0, 0)]).sum();
    0.5 * sum * curve.grid.h()
}

/// `−T_g(D_θ γ')` with `T_g = g_R⁻¹ g`, written as
/// `−g_R⁻¹ (g γ'' + Γ(γ', γ'))` with first-kind Christoffel symbols.
/// Component-major nodal field.
pub fn geodesic_residual(curve: &ClosedCurve, metric: &MetricField, g_r: &Matrix2<f64>) -> DVector<f64> {
    let (p, d1, d2) = curve.jet();
    let n = p.len();
    let g_r_inv = g_r.try_inverse().expect("auxiliary metric is SPD");
    let mut out = DVector::zeros(2 * n);
    for k in 0..n {
        let gam = metric.christoffel_first(&p[k]);
        let acc = metric.g(&p[k]) * d2[k]
            + Vector2::new(
                (d1[k].transpose() * gam[0] * d1[k])[(0, 0)],
                (d1[k].transpose() * gam[1] * d1[k])[(0, 0)],
            );
        let r = -(g_r_inv * acc);
        out[k] = r.x;
        out[n + k] = r.y;
    }
    out
}

/// Exact derivative of [`geodesic_residual`] with respect to the periodic
/// part, assembled from analytic metric derivatives.
pub fn geodesic_jacobi(curve: &ClosedCurve, metric: &MetricField, g_r: &Matrix2<f64>) -> DMatrix<f64> {
    let (p, d1, d2) = curve.jet();
    let n = p.len();
    let ops = &curve.grid.ops;
    let g_r_inv = g_r.try_inverse().expect("auxiliary metric is SPD");
    // blocks[b][e]: ∂E_b / ∂(component e)
    let mut blocks = [[DMatrix::zeros(n, n), DMatrix::zeros(n, n)], [DMatrix::zeros(n, n), DMatrix::zeros(n, n)]];
    for k in 0..n {
        let g = metric.g(&p[k]);
        let dg = metric.dg(&p[k]);
        let gam = metric.christoffel_first(&p[k]);
        let dgam = metric.christoffel_first_derivative(&p[k]);
        for b in 0..2 {
            for e in 0..2 {
                let pos = (dg[e].row(b) * d2[k])[(0, 0)] + (d1[k].transpose() * dgam[e][b] * d1[k])[(0, 0)];
                let vel = 2.0 * (gam[b].row(e) * d1[k])[(0, 0)];
                let blk = &mut blocks[b][e];
                for col in 0..n {
                    blk[(k, col)] = g[(b, e)] * ops.d2[(k, col)] + vel * ops.d1[(k, col)];
                }
                blk[(k, k)] += pos;
            }
        }
    }
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 {
        for e in 0..2 {
            let blk = &blocks[0][e] * (-g_r_inv[(a, 0)]) + &blocks[1][e] * (-g_r_inv[(a, 1)]);
            out.view_mut((a * n, e * n), (n, n)).copy_from(&blk);
        }
    }
    out
}

/// `γ ↦ γ(· + s)` on the periodic part: `x ↦ x(· + s) + winding·s`.
pub fn rotation_action(curve: &ClosedCurve, shift: f64) -> ClosedCurve {
    let w = curve.w();
    let g = &curve.grid.grid;
    ClosedCurve {
        x: circular_shift(&curve.x, shift, g).add_scalar(w.x * shift),
        y: circular_shift(&curve.y, shift, g).add_scalar(w.y * shift),
        winding: curve.winding,
        grid: curve.grid.clone(),
    }
}

/// Parameter rotations `S¹`, acting globally.
#[derive(Debug, Clone)]
pub struct ShiftGroup {
    winding: (i32, i32),
    grid: Arc<CurveGrid>,
}

impl GroupModel for ShiftGroup {
    fn dim(&self) -> usize {
        1
    }

    /// `γ' = winding + D₁·periodic`.
    fn orbit_tangent(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let c = ClosedCurve::from_state(x, self.winding, &self.grid)?;
        let (_, d1, _) = c.jet();
        let n = d1.len();
        Ok(DMatrix::from_fn(2 * n, 1, |i, _| if i < n { d1[i].x } else { d1[i - n].y }))
    }

    fn act(&self, g: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
        let c = ClosedCurve::from_state(x, self.winding, &self.grid)?;
        Ok(rotation_action(&c, g[0]).state())
    }

    fn compose(&self, g1: &DVector<f64>, g2: &DVector<f64>) -> DVector<f64> {
        g1 + g2
    }

    fn is_abelian(&self) -> bool {
        true
    }
}

/// Energy of closed curves in a fixed homotopy class, parametrized by the
/// metric family parameter `t`.
#[derive(Debug, Clone)]
pub struct GeodesicProblem {
    name: String,
    family: MetricFamily,
    winding: (i32, i32),
    g_r: Matrix2<f64>,
    grid: Arc<CurveGrid>,
    gram: GramPair,
    group: ShiftGroup,
    range: (f64, f64),
}

impl GeodesicProblem {
    pub fn new(
        family: MetricFamily,
        winding: (i32, i32),
        n: usize,
        scheme: Scheme,
        g_r: Matrix2<f64>,
    ) -> Result<Self> {
        if g_r != g_r.transpose() || g_r.determinant() <= 0.0 || g_r[(0, 0)] <= 0.0 {
            return Err(Error::Config("auxiliary metric must be symmetric positive definite".into()));
        }
        if winding == (0, 0) {
            return Err(Error::Config("winding (0, 0) has no nonconstant closed geodesics".into()));
        }
        let grid = CurveGrid::new(n, scheme)?;
        let h = grid.h();
        let mass = g_r.kronecker(&DMatrix::<f64>::identity(n, n)) * h;
        let mass = DMatrix::from_fn(2 * n, 2 * n, |i, j| mass[(i, j)]);
        let gram = GramPair::new(mass.clone(), mass)?;
        let group = ShiftGroup { winding, grid: grid.clone() };
        Ok(Self {
            name: format!("geodesic-{}", family.short_name()),
            family,
            winding,
            g_r,
            grid,
            gram,
            group,
            range: (0.0, 1.0),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn grid(&self) -> &Arc<CurveGrid> {
        &self.grid
    }

    pub fn family(&self) -> MetricFamily {
        self.family
    }

    pub fn winding(&self) -> (i32, i32) {
        self.winding
    }

    pub fn auxiliary_metric(&self) -> Matrix2<f64> {
        self.g_r
    }

    pub fn curve(&self, state: &DVector<f64>) -> Result<ClosedCurve> {
        ClosedCurve::from_state(state, self.winding, &self.grid)
    }

    pub fn straight_state(&self, base: (f64, f64)) -> DVector<f64> {
        ClosedCurve::straight(base, self.winding, &self.grid).state()
    }
}

impl ProblemInstance for GeodesicProblem {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        2 * self.grid.n()
    }

    fn functional(&self, x: &DVector<f64>, lambda: f64) -> Result<f64> {
        Ok(energy(&self.curve(x)?, &self.family.at(lambda)))
    }

    fn gradient(&self, x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
        Ok(geodesic_residual(&self.curve(x)?, &self.family.at(lambda), &self.g_r))
    }

    fn linearization(&self, x: &DVector<f64>, lambda: f64) -> Option<Result<DMatrix<f64>>> {
        Some(self.curve(x).map(|c| geodesic_jacobi(&c, &self.family.at(lambda), &self.g_r)))
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
