//! Uniform periodic grids on S¹ and T², periodic derivative matrices,
//! trapezoid quadrature and band-limited (trigonometric) interpolation.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid. For `dim == 2` the grid is the tensor product of
/// the 1D grid with itself, flattened with the first coordinate fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    period: f64,
    dim: usize,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize, period: f64, dim: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::Sizing(format!(
                "node count must be even and at least 8, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Sizing(format!("period must be positive, got {period}")));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::Sizing(format!("source dimension must be 1 or 2, got {dim}")));
        }
        let nodes = (0..n).map(|k| k as f64 * period / n as f64).collect();
        Ok(Self { n, period, dim, nodes })
    }

    /// Nodes per direction.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 1D parameter values `k * period / n`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Total number of nodes (`n` or `n²`).
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Tensor node coordinates; for `dim == 1` the second entry is zero.
    pub fn point(&self, index: usize) -> (f64, f64) {
        match self.dim {
            1 => (self.nodes[index], 0.0),
            _ => (self.nodes[index % self.n], self.nodes[index / self.n]),
        }
    }

    /// Trapezoid weight of every node.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn weights(&self) -> DVector<f64> {
        DVector::from_element(self.len(), self.weight())
    }

    /// Trapezoid quadrature of nodal values.
    pub fn integrate(&self, values: &DVector<f64>) -> f64 {
        values.sum() * self.weight()
    }

    /// Samples a function of the tensor coordinates.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|i| {
                let (x, y) = self.point(i);
                f(x, y)
            }),
        )
    }
}

/// Convenience wrapper matching the harness vocabulary.
pub fn make_grid(n: usize, period: f64, dim: usize) -> Result<Grid> {
    Grid::new(n, period, dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Spectral,
    FourthOrder,
}

/// Partial-derivative operators on the flattened T² grid.
#[derive(Debug, Clone)]
pub struct TensorOperators {
    pub dx: DMatrix<f64>,
    pub dy: DMatrix<f64>,
    pub dxx: DMatrix<f64>,
    pub dyy: DMatrix<f64>,
    pub dxy: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
}

/// Dense periodic differentiation matrices.
#[derive(Debug, Clone)]
pub struct DiffOperators {
    pub scheme: Scheme,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    pub tensor: Option<TensorOperators>,
}

impl DiffOperators {
    pub fn tensor(&self) -> &TensorOperators {
        self.tensor
            .as_ref()
            .expect("tensor operators requested on a 1D grid")
    }
}

pub fn derivative_matrices(grid: &Grid, scheme: Scheme) -> DiffOperators {
    let n = grid.n();
    let (d1, d2) = match scheme {
        Scheme::Spectral => spectral_matrices(n, grid.period()),
        Scheme::FourthOrder => fourth_order_matrices(n, grid.spacing()),
    };
    let tensor = (grid.dim() == 2).then(|| {
        let eye = DMatrix::<f64>::identity(n, n);
        let dx = eye.kronecker(&d1);
        let dy = d1.kronecker(&eye);
        let dxx = eye.kronecker(&d2);
        let dyy = d2.kronecker(&eye);
        let dxy = d1.kronecker(&d1);
        let laplacian = &dxx + &dyy;
        TensorOperators { dx, dy, dxx, dyy, dxy, laplacian }
    });
    DiffOperators { scheme, d1, d2, tensor }
}

fn spectral_matrices(n: usize, period: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let scale = 2.0 * PI / period;
    let hh = 2.0 * PI / n as f64;
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    let diag = -PI * PI / (3.0 * hh * hh) - 1.0 / 6.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                d2[(i, j)] = diag * scale * scale;
                continue;
            }
            let k = i as isize - j as isize;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let half = k as f64 * hh / 2.0;
            d1[(i, j)] = scale * 0.5 * sign / half.tan();
            d2[(i, j)] = -scale * scale * sign / (2.0 * half.sin().powi(2));
        }
    }
    (d1, d2)
}

fn fourth_order_matrices(n: usize, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    let c1 = [(-2isize, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    let c2 = [(-2isize, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];
    for i in 0..n {
        for &(o, c) in &c1 {
            let j = (i as isize + o).rem_euclid(n as isize) as usize;
            d1[(i, j)] += c / (12.0 * h);
        }
        for &(o, c) in &c2 {
            let j = (i as isize + o).rem_euclid(n as isize) as usize;
            d2[(i, j)] += c / (12.0 * h * h);
        }
    }
    (d1, d2)
}

fn signed_wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Returns `v(θ + shift)` sampled on the grid, using the band-limited
/// interpolant of `v`. Grid-aligned shifts are exact cyclic permutations.
///
/// The Nyquist mode is carried as a cosine, so the composition law
/// `shift(shift(v, a), b) = shift(v, a + b)` is exact only for data without
/// Nyquist content (and always for grid-aligned shifts).
pub fn circular_shift(values: &DVector<f64>, shift: f64, grid: &Grid) -> DVector<f64> {
    let n = grid.n();
    assert_eq!(values.len(), n, "circular_shift expects one 1D component");
    let h = grid.spacing();
    let slots = shift / h;
    let rounded = slots.round();
    if (slots - rounded).abs() <= 1e-12 * slots.abs().max(1.0) {
        let m = (rounded as i64).rem_euclid(n as i64) as usize;
        return DVector::from_iterator(n, (0..n).map(|j| values[(j + m) % n]));
    }
    let omega = 2.0 * PI / grid.period();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        if k == n / 2 {
            *c *= (n as f64 / 2.0 * omega * shift).cos();
        } else {
            let phase = signed_wavenumber(k, n) * omega * shift;
            *c *= Complex64::new(phase.cos(), phase.sin());
        }
    }
    inverse.process(&mut buf);
    DVector::from_iterator(n, buf.iter().map(|c| c.re / n as f64))
}

/// Parameter grid on `[0, 2π)` with its differentiation matrices.
#[derive(Debug, Clone)]
pub struct CurveGrid {
    pub grid: Grid,
    pub ops: DiffOperators,
}

impl CurveGrid {
    pub fn new(n: usize, scheme: Scheme) -> Result<Arc<Self>> {
        let grid = Grid::new(n, TAU, 1)?;
        let ops = derivative_matrices(&grid, scheme);
        Ok(Arc::new(Self { grid, ops }))
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn h(&self) -> f64 {
        self.grid.spacing()
    }
}

/// Real trigonometric interpolant of periodic nodal data, evaluable off-grid.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    omega: f64,
    mean: f64,
    /// `(k, a_k, b_k)` for `a_k cos(kωt) + b_k sin(kωt)`, k < n/2.
    modes: Vec<(f64, f64, f64)>,
    nyquist: f64,
    n: usize,
}

impl TrigInterpolant {
    pub fn new(values: &DVector<f64>, period: f64) -> Self {
        let n = values.len();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.process(&mut buf);
        let nf = n as f64;
        let modes = (1..n / 2)
            .map(|k| {
                let c = buf[k] / nf;
                (k as f64, 2.0 * c.re, -2.0 * c.im)
            })
            .collect();
        Self {
            omega: 2.0 * PI / period,
            mean: buf[0].re / nf,
            modes,
            nyquist: if n % 2 == 0 { buf[n / 2].re / nf } else { 0.0 },
            n,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut s = self.mean;
        for &(k, a, b) in &self.modes {
            let (sn, cs) = (k * self.omega * t).sin_cos();
            s += a * cs + b * sn;
        }
        s + self.nyquist * (self.n as f64 / 2.0 * self.omega * t).cos()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for &(k, a, b) in &self.modes {
            let w = k * self.omega;
            let (sn, cs) = (w * t).sin_cos();
            s += w * (-a * sn + b * cs);
        }
        let w = self.n as f64 / 2.0 * self.omega;
        s - self.nyquist * w * (w * t).sin()
    }
}
