use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geodesics::MetricField;
use crate::grid::{derivative_matrices, DiffOperators, Grid, Scheme};

/// Periodic `n × n` grid on the flat chart `[0, 2π)²`, first coordinate fastest.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    pub grid: Grid,
    pub ops: DiffOperators,
}

impl TorusGrid {
    pub fn new(n: usize, scheme: Scheme) -> Result<Arc<Self>> {
        let grid = Grid::new(n, std::f64::consts::TAU, 2)?;
        let ops = derivative_matrices(&grid, scheme);
        Ok(Arc::new(Self { grid, ops }))
    }

    /// Nodes per direction.
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weight(&self) -> f64 {
        self.grid.weight()
    }
}

/// Energy weight `A = √det g · g⁻¹` of a source metric and its chart derivatives.
#[derive(Debug, Clone, Copy)]
pub struct WeightTensor {
    pub a: Matrix2<f64>,
    pub da: [Matrix2<f64>; 2],
}

impl WeightTensor {
    pub fn at(metric: &MetricField, q: &Vector2<f64>) -> Result<Self> {
        let g = metric.g(q);
        let det = g.determinant();
        if det <= 0.0 || g[(0, 0)] <= 0.0 {
            return Err(Error::Config(format!(
                "harmonic maps need a Riemannian source metric, {} is not",
                metric.family.name()
            )));
        }
        let gi = g.try_inverse().ok_or(Error::Config("singular source metric".into()))?;
        let s = det.sqrt();
        let dg = metric.dg(q);
        let da = dg.map(|d| {
            let ds = 0.5 * s * (gi * d).trace();
            gi * ds - gi * d * gi * s
        });
        Ok(Self { a: gi * s, da })
    }

    /// Coefficients of `∂ᵢ(Aⁱʲ ∂ⱼ ·)` in non-divergence form: `(A, b)` with
    /// `bⱼ = ∂ᵢAⁱʲ`.
    fn drift(&self) -> Vector2<f64> {
        Vector2::new(self.da[0][(0, 0)] + self.da[1][(1, 0)], self.da[0][(0, 1)] + self.da[1][(1, 1)])
    }
}

/// Pointwise weights of a source metric on the grid.
#[derive(Debug, Clone)]
pub struct SourceWeights {
    pub tensors: Vec<WeightTensor>,
}

impl SourceWeights {
    pub fn new(metric: &MetricField, grid: &TorusGrid) -> Result<Self> {
        let tensors = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.grid.point(i);
                WeightTensor::at(metric, &Vector2::new(x, y))
            })
            .collect::<Result<_>>()?;
        Ok(Self { tensors })
    }

    /// Dense `div(A∇·)`, assembled in non-divergence form so that the
    /// spectral Nyquist modes stay invertible.
    pub fn divergence_operator(&self, grid: &TorusGrid) -> DMatrix<f64> {
        let t = grid.ops.tensor();
        let n = grid.len();
        let mut out = DMatrix::zeros(n, n);
        for (i, w) in self.tensors.iter().enumerate() {
            let b = w.drift();
            let row = t.dxx.row(i) * w.a[(0, 0)]
                + t.dxy.row(i) * (2.0 * w.a[(0, 1)])
                + t.dyy.row(i) * w.a[(1, 1)]
                + t.dx.row(i) * b.x
                + t.dy.row(i) * b.y;
            out.set_row(i, &row);
        }
        out
    }
}

/// Nodal map from the torus into `S¹` or `S²`.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusMap {
    /// Angle `p·x + q·y + remainder`.
    Circle { degree: (i32, i32), remainder: DVector<f64> },
    /// Unit vectors, one per node.
    Sphere { values: Vec<Vector3<f64>> },
}

impl TorusMap {
    pub fn linear_circle(degree: (i32, i32), grid: &TorusGrid) -> Self {
        Self::Circle { degree, remainder: DVector::zeros(grid.len()) }
    }

    /// `(x, y) ↦ (cos x, sin x, 0)`.
    pub fn equator(grid: &TorusGrid) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, _) = grid.grid.point(i);
                Vector3::new(x.cos(), x.sin(), 0.0)
            })
            .collect();
        Self::Sphere { values }
    }

    pub fn constant(value: Vector3<f64>, grid: &TorusGrid) -> Self {
        Self::Sphere { values: vec![value.normalize(); grid.len()] }
    }

    /// Componentwise nodal fields: one for the circle, three for the sphere.
    /// The circle component is the full angle, which is not periodic.
    fn components(&self, grid: &TorusGrid) -> Vec<(DVector<f64>, Vector2<f64>)> {
        match self {
            Self::Circle { degree, remainder } => {
                vec![(remainder.clone(), Vector2::new(degree.0 as f64, degree.1 as f64))]
            }
            Self::Sphere { values } => (0..3)
                .map(|c| (DVector::from_iterator(grid.len(), values.iter().map(|v| v[c])), Vector2::zeros()))
                .collect(),
        }
    }
}

/// Per-component nodal gradients `(∂ₓu, ∂ᵧu)` including the linear part.
fn gradients(map: &TorusMap, grid: &TorusGrid) -> Vec<(DVector<f64>, DVector<f64>)> {
    let t = grid.ops.tensor();
    map.components(grid)
        .into_iter()
        .map(|(u, slope)| ((&t.dx * &u).add_scalar(slope.x), (&t.dy * &u).add_scalar(slope.y)))
        .collect()
}

/// Hilbert–Schmidt energy density `½ Aⁱʲ⟨∂ᵢφ, ∂ⱼφ⟩` against the flat volume.
pub fn energy_density(map: &TorusMap, grid: &TorusGrid, weights: &SourceWeights) -> DVector<f64> {
    let grads = gradients(map, grid);
    DVector::from_fn(grid.len(), |i, _| {
        let a = weights.tensors[i].a;
        let mut e = 0.0;
        for (ux, uy) in &grads {
            let v = Vector2::new(ux[i], uy[i]);
            e += (v.transpose() * a * v)[(0, 0)];
        }
        0.5 * e
    })
}

/// `½ ∫ |dφ|²_g vol_g`.
pub fn dirichlet_energy(map: &TorusMap, grid: &TorusGrid, weights: &SourceWeights) -> f64 {
    grid.grid.integrate(&energy_density(map, grid, weights))
}

/// Componentwise `div(A∇φ) = ζ·Δ_g φ`, with `ζ` the density of `vol_g`
/// against the flat chart volume.
pub(crate) fn weighted_laplacian(map: &TorusMap, grid: &TorusGrid, weights: &SourceWeights) -> Vec<DVector<f64>> {
    let t = grid.ops.tensor();
    map.components(grid)
        .into_iter()
        .map(|(u, slope)| {
            let (ux, uy) = (&t.dx * &u, &t.dy * &u);
            let (uxx, uxy, uyy) = (&t.dxx * &u, &t.dxy * &u, &t.dyy * &u);
            DVector::from_fn(grid.len(), |i, _| {
                let w = &weights.tensors[i];
                let b = w.drift();
                w.a[(0, 0)] * uxx[i]
                    + 2.0 * w.a[(0, 1)] * uxy[i]
                    + w.a[(1, 1)] * uyy[i]
                    + b.x * (ux[i] + slope.x)
                    + b.y * (uy[i] + slope.y)
            })
        })
        .collect()
}

/// Tension field scaled by `ζ`. For the circle this is the weighted
/// Laplace–Beltrami of the angle; for the sphere, the tangential part of
/// the componentwise weighted Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub enum Tension {
    Circle(DVector<f64>),
    Sphere(Vec<Vector3<f64>>),
}

impl Tension {
    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Circle(v) => v.amax(),
            Self::Sphere(v) => v.iter().map(|t| t.amax()).fold(0.0, f64::max),
        }
    }
}

pub fn tension_field(map: &TorusMap, grid: &TorusGrid, weights: &SourceWeights) -> Tension {
    let lap = weighted_laplacian(map, grid, weights);
    match map {
        TorusMap::Circle { .. } => Tension::Circle(lap.into_iter().next().expect("one component")),
        TorusMap::Sphere { values } => Tension::Sphere(
            values
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let v = Vector3::new(lap[0][i], lap[1][i], lap[2][i]);
                    v - p * p.dot(&v)
                })
                .collect(),
        ),
    }
}

/// Orthonormal tangent frame along a sphere-valued map, by Gram–Schmidt of
/// one fixed ambient axis against the map value: `e₁ ∝ a − ⟨a, φ⟩φ`,
/// `e₂ = φ × e₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereFrame {
    pub axis: Vector3<f64>,
    pub e1: Vec<Vector3<f64>>,
    pub e2: Vec<Vector3<f64>>,
}

impl SphereFrame {
    /// Picks the coordinate axis least aligned with the map.
    pub fn new(values: &[Vector3<f64>]) -> Result<Self> {
        let axis = (0..3)
            .map(|c| {
                let worst = values.iter().map(|p| p[c].abs()).fold(0.0, f64::max);
                (worst, c)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(worst, c)| (worst, Vector3::ith(c, 1.0)))
            .expect("three axes");
        if axis.0 > 0.95 {
            return Err(Error::Config(
                "map covers too much of the sphere for a single Gram–Schmidt frame".into(),
            ));
        }
        Ok(Self::with_axis(values, axis.1))
    }

    pub fn with_axis(values: &[Vector3<f64>], axis: Vector3<f64>) -> Self {
        let e1: Vec<_> = values.iter().map(|p| (axis - p * p.dot(&axis)).normalize()).collect();
        let e2 = values.iter().zip(&e1).map(|(p, e)| p.cross(e)).collect();
        Self { axis, e1, e2 }
    }

    /// Ambient vectors of frame coordinates `[a; b]`.
    pub fn ambient(&self, coords: &DVector<f64>) -> Vec<Vector3<f64>> {
        let n = self.e1.len();
        (0..n).map(|k| self.e1[k] * coords[k] + self.e2[k] * coords[n + k]).collect()
    }

    /// Frame coordinates of ambient tangent vectors.
    pub fn coordinates(&self, vectors: &[Vector3<f64>]) -> DVector<f64> {
        let n = self.e1.len();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                self.e1[i].dot(&vectors[i])
            } else {
                self.e2[i - n].dot(&vectors[i - n])
            }
        })
    }
}

/// Harmonic Jacobi operator in chart coordinates, assembled at the chart
/// centre. Circle target: `−div(A∇·)`. Sphere target, in the frame:
/// `−Fᵀ div(A∇(F·)) + ⟨φ, div(A∇φ)⟩`, which at harmonic maps is the
/// classical `−Δ^⊥ − |dφ|²` for normal directions.
pub fn harmonic_jacobi(
    map: &TorusMap,
    grid: &TorusGrid,
    weights: &SourceWeights,
    frame: Option<&SphereFrame>,
) -> Result<DMatrix<f64>> {
    let div = weights.divergence_operator(grid);
    match map {
        TorusMap::Circle { .. } => Ok(-div),
        TorusMap::Sphere { values } => {
            let frame = frame.ok_or(Error::Config("sphere Jacobi operator needs a frame".into()))?;
            let n = grid.len();
            let lap = weighted_laplacian(map, grid, weights);
            let fields = [&frame.e1, &frame.e2];
            let mut out = DMatrix::zeros(2 * n, 2 * n);
            for (a, fa) in fields.iter().enumerate() {
                for (b, fb) in fields.iter().enumerate() {
                    let mut blk = DMatrix::zeros(n, n);
                    for c in 0..3 {
                        let left = DVector::from_iterator(n, fa.iter().map(|v| v[c]));
                        let right = DVector::from_iterator(n, fb.iter().map(|v| v[c]));
                        let mut term = div.clone();
                        for j in 0..n {
                            term.column_mut(j).component_mul_assign(&left);
                            term.column_mut(j).scale_mut(right[j]);
                        }
                        blk -= term;
                    }
                    if a == b {
                        for k in 0..n {
                            let p = values[k];
                            blk[(k, k)] += p.x * lap[0][k] + p.y * lap[1][k] + p.z * lap[2][k];
                        }
                    }
                    out.view_mut((a * n, b * n), (n, n)).copy_from(&blk);
                }
            }
            Ok(out)
        }
    }
}

/// Target Killing fields composed with the map. Circle: one constant
/// column. Sphere: `eᵢ × φ` in frame coordinates.
pub fn target_killing_fields(map: &TorusMap, frame: Option<&SphereFrame>) -> Result<DMatrix<f64>> {
    match map {
        TorusMap::Circle { remainder, .. } => Ok(DMatrix::from_element(remainder.len(), 1, 1.0)),
        TorusMap::Sphere { values } => {
            let frame = frame.ok_or(Error::Config("sphere Killing fields need a frame".into()))?;
            let cols: Vec<DVector<f64>> = (0..3)
                .map(|i| {
                    let axis = Vector3::ith(i, 1.0);
                    let k: Vec<_> = values.iter().map(|p| axis.cross(p)).collect();
                    frame.coordinates(&k)
                })
                .collect();
            Ok(DMatrix::from_columns(&cols))
        }
    }
}
