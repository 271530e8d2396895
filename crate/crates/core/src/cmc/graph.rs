use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Vector3};

use super::ambient::{Ambient, AmbientKind};
use super::curve::{Curve, CurveJet};
use crate::error::{Error, Result};
use crate::grid::TrigInterpolant;

/// Reference curve with a fixed transverse orientation `n_x`.
#[derive(Debug, Clone)]
pub struct GraphGeometry {
    pub reference: Curve,
    pub normals: Vec<Vector3<f64>>,
    /// `+1` when `n_x` is the right-hand normal `T × ν`, `−1` otherwise.
    pub sigma: f64,
}

impl GraphGeometry {
    /// `normals` must be unit, tangent to the ambient and transverse to the
    /// curve, all on the same side.
    pub fn new(reference: Curve, normals: Vec<Vector3<f64>>) -> Result<Arc<Self>> {
        if normals.len() != reference.n() {
            return Err(Error::DimensionMismatch { expected: reference.n(), got: normals.len() });
        }
        let jet = reference.jet();
        let right = reference.right_normals(&jet);
        let signs: Vec<f64> = right.iter().zip(&normals).map(|(r, n)| r.dot(n)).collect();
        let sigma = signs[0].signum();
        if signs.iter().any(|s| s * sigma <= 0.0) {
            return Err(Error::Config("reference normal changes side along the curve".into()));
        }
        Ok(Arc::new(Self { reference, normals, sigma }))
    }

    /// Orientation `n_x = T × ν`.
    pub fn right_handed(reference: Curve) -> Result<Arc<Self>> {
        let jet = reference.jet();
        let normals = reference.right_normals(&jet);
        Self::new(reference, normals)
    }

    /// Orientation `n_x = −T × ν`.
    pub fn left_handed(reference: Curve) -> Result<Arc<Self>> {
        let jet = reference.jet();
        let normals = reference.right_normals(&jet).into_iter().map(|v| -v).collect();
        Self::new(reference, normals)
    }

    pub fn ambient(&self) -> Ambient {
        self.reference.ambient
    }

    pub fn n(&self) -> usize {
        self.reference.n()
    }
}

/// Normal graph `y_φ(θ) = exp_{x(θ)}(φ(θ)·n_x(θ))` over a reference curve.
#[derive(Debug, Clone)]
pub struct NormalGraph {
    pub geometry: Arc<GraphGeometry>,
    pub phi: DVector<f64>,
}

impl NormalGraph {
    pub fn new(geometry: Arc<GraphGeometry>, phi: DVector<f64>) -> Result<Self> {
        if phi.len() != geometry.n() {
            return Err(Error::DimensionMismatch { expected: geometry.n(), got: phi.len() });
        }
        Ok(Self { geometry, phi })
    }

    pub fn zero(geometry: Arc<GraphGeometry>) -> Self {
        let n = geometry.n();
        Self { geometry, phi: DVector::zeros(n) }
    }
}

/// Everything derived from `φ` that the CMC residual and its linearization
/// need.
#[derive(Debug, Clone)]
pub(crate) struct GraphState {
    pub curve: Curve,
    pub jet: CurveJet,
    /// Unit normal with `⟨N, n_x⟩ > 0`.
    pub normal: Vec<Vector3<f64>>,
    /// `⟨∂y/∂φ, N⟩`.
    pub c: DVector<f64>,
    pub kappa: DVector<f64>,
}

fn place(geom: &GraphGeometry, phi: &DVector<f64>) -> (Vec<Vector3<f64>>, Vec<Vector3<f64>>) {
    let amb = geom.ambient();
    let x = &geom.reference.points;
    let nx = &geom.normals;
    let mut pts = Vec::with_capacity(x.len());
    let mut dy = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        pts.push(amb.exp(&x[k], &(nx[k] * phi[k])));
        dy.push(match amb.kind {
            AmbientKind::Sphere => {
                let (s, c) = phi[k].sin_cos();
                nx[k] * c - x[k] * s
            }
            _ => nx[k],
        });
    }
    (pts, dy)
}

pub(crate) fn evaluate(geom: &GraphGeometry, phi: &DVector<f64>) -> Result<GraphState> {
    let (points, dy_dphi) = place(geom, phi);
    let curve = Curve {
        ambient: geom.ambient(),
        points,
        winding: geom.reference.winding,
        grid: geom.reference.grid.clone(),
    };
    let jet = curve.jet();
    let n = curve.n();
    let right = curve.right_normals(&jet);
    let normal: Vec<Vector3<f64>> = right.iter().map(|r| r * geom.sigma).collect();
    let c = DVector::from_iterator(n, (0..n).map(|k| dy_dphi[k].dot(&normal[k])));
    let cmin = c.min();
    if !(cmin > 0.0) {
        return Err(Error::SelfIntersection(cmin));
    }
    let kappa = DVector::from_iterator(
        n,
        (0..n).map(|k| -jet.d2[k].dot(&normal[k]) / (jet.speed[k] * jet.speed[k])),
    );
    Ok(GraphState { curve, jet, normal, c, kappa })
}

/// Graph curve; fails when it folds over the reference normals or
/// self-intersects.
pub fn graph_to_curve(graph: &NormalGraph) -> Result<Curve> {
    let state = evaluate(&graph.geometry, &graph.phi)?;
    state.curve.check_embedded()?;
    Ok(state.curve)
}

/// Geodesic curvature of the graph curve with respect to the transported
/// orientation.
pub fn mean_curvature(graph: &NormalGraph) -> Result<DVector<f64>> {
    let state = evaluate(&graph.geometry, &graph.phi)?;
    state.curve.check_embedded()?;
    Ok(state.kappa)
}

#[derive(Debug, Clone)]
pub struct JacobiOperator {
    /// `−Δ_s − (K̄ + κ²)` acting on nodal normal speeds.
    pub matrix: DMatrix<f64>,
    pub warnings: Vec<String>,
}

pub(crate) fn jacobi_matrix(state: &GraphState, gauss: f64) -> DMatrix<f64> {
    let grid = &state.curve.grid;
    let s = &state.jet.speed;
    let ds = &grid.ops.d1 * s;
    let n = s.len();
    let mut j = DMatrix::zeros(n, n);
    for r in 0..n {
        let a = 1.0 / (s[r] * s[r]);
        let b = ds[r] / (s[r] * s[r] * s[r]);
        for col in 0..n {
            j[(r, col)] = -a * grid.ops.d2[(r, col)] + b * grid.ops.d1[(r, col)];
        }
        j[(r, r)] -= gauss + state.kappa[r] * state.kappa[r];
    }
    j
}

/// Jacobi operator of the graph curve in non-divergence form, so the
/// Nyquist mode is not spuriously annihilated.
pub fn cmc_jacobi(graph: &NormalGraph) -> Result<JacobiOperator> {
    let state = evaluate(&graph.geometry, &graph.phi)?;
    let mut warnings = Vec::new();
    let spread = state.kappa.max() - state.kappa.min();
    if spread > 1e-6 {
        warnings.push(format!("curvature not constant (spread {spread:e})"));
    }
    let matrix = jacobi_matrix(&state, graph.geometry.ambient().gaussian_curvature());
    Ok(JacobiOperator { matrix, warnings })
}

/// Column `j` is `⟨K_j, N⟩` along the graph curve.
pub fn killing_normal_components(graph: &NormalGraph) -> Result<DMatrix<f64>> {
    let state = evaluate(&graph.geometry, &graph.phi)?;
    Ok(killing_normals(&state))
}

pub(crate) fn killing_normals(state: &GraphState) -> DMatrix<f64> {
    let amb = state.curve.ambient;
    let n = state.curve.n();
    DMatrix::from_fn(n, amb.group_dim(), |k, j| {
        amb.killing(j, &state.curve.points[k]).dot(&state.normal[k])
    })
}

/// Moves the graph curve by the isometry `g` and regraphs it over the
/// reference by a per-node scalar Newton solve along the reference normal
/// lines (20 iterations, steps clamped to half a grid cell).
pub fn isometry_regraph(graph: &NormalGraph, g: &[f64]) -> Result<NormalGraph> {
    let geom = &graph.geometry;
    let amb = geom.ambient();
    if g.len() != amb.group_dim() {
        return Err(Error::DimensionMismatch { expected: amb.group_dim(), got: g.len() });
    }
    let state = evaluate(geom, &graph.phi)?;
    let n = geom.n();
    let grid = &geom.reference.grid;
    let nodes = grid.grid.nodes();
    let h = grid.h();
    let w = geom.reference.winding;
    let moved: Vec<Vector3<f64>> = state.curve.points.iter().map(|p| amb.isometry(g, p)).collect();
    let interp: Vec<TrigInterpolant> = (0..3)
        .map(|c| {
            let q = DVector::from_iterator(n, (0..n).map(|k| moved[k][c] - w[c] * nodes[k]));
            TrigInterpolant::new(&q, std::f64::consts::TAU)
        })
        .collect();
    let z = |s: f64| Vector3::new(interp[0].eval(s), interp[1].eval(s), interp[2].eval(s)) + w * s;
    let dz = |s: f64| {
        Vector3::new(interp[0].derivative(s), interp[1].derivative(s), interp[2].derivative(s)) + w
    };

    let x = &geom.reference.points;
    let ref_jet = geom.reference.jet();
    let mut phi = DVector::zeros(n);
    for k in 0..n {
        let (dir, base) = match amb.kind {
            AmbientKind::Sphere => (x[k].cross(&geom.normals[k]), Vector3::zeros()),
            _ => (ref_jet.d1[k] / ref_jet.speed[k], x[k]),
        };
        let f = |s: f64| (z(s) - base).dot(&dir);
        let start = (0..n)
            .min_by(|&a, &b| (moved[a] - x[k]).norm().total_cmp(&(moved[b] - x[k]).norm()))
            .unwrap_or(k);
        let mut s = nodes[start];
        let mut converged = false;
        for _ in 0..20 {
            let fs = f(s);
            let d = dz(s).dot(&dir);
            if d == 0.0 {
                break;
            }
            let step = (fs / d).clamp(-0.5 * h, 0.5 * h);
            s -= step;
            if step.abs() < 1e-13 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::RegraphFailure { node: k });
        }
        let zs = z(s);
        phi[k] = match amb.kind {
            AmbientKind::Sphere => zs.dot(&geom.normals[k]).atan2(zs.dot(&x[k])),
            _ => (zs - x[k]).dot(&geom.normals[k]),
        };
    }
    let out = NormalGraph { geometry: geom.clone(), phi };
    evaluate(geom, &out.phi).map_err(|_| Error::RegraphFailure { node: 0 })?;
    Ok(out)
}
