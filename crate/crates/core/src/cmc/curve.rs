use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nalgebra::{DVector, Vector3};

use super::ambient::{Ambient, AmbientKind};
use crate::error::{Error, Result};
pub use crate::grid::CurveGrid;

/// A closed nodal curve. On the torus the points live on the universal
/// cover and `y(θ) − winding·θ` is periodic.
#[derive(Debug, Clone)]
pub struct Curve {
    pub ambient: Ambient,
    pub points: Vec<Vector3<f64>>,
    pub winding: Vector3<f64>,
    pub grid: Arc<CurveGrid>,
}

/// Pointwise first and second parameter derivatives.
#[derive(Debug, Clone)]
pub struct CurveJet {
    pub d1: Vec<Vector3<f64>>,
    pub d2: Vec<Vector3<f64>>,
    pub speed: DVector<f64>,
}

impl Curve {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn jet(&self) -> CurveJet {
        let n = self.n();
        let nodes = self.grid.grid.nodes();
        let mut d1 = vec![self.winding; n];
        let mut d2 = vec![Vector3::zeros(); n];
        for c in 0..3 {
            let q = DVector::from_iterator(n, (0..n).map(|k| self.points[k][c] - self.winding[c] * nodes[k]));
            if q.amax() == 0.0 {
                continue;
            }
            let q1 = &self.grid.ops.d1 * &q;
            let q2 = &self.grid.ops.d2 * &q;
            for k in 0..n {
                d1[k][c] += q1[k];
                d2[k][c] = q2[k];
            }
        }
        let speed = DVector::from_iterator(n, d1.iter().map(|v| v.norm()));
        CurveJet { d1, d2, speed }
    }

    pub fn length(&self) -> f64 {
        self.jet().speed.sum() * self.grid.h()
    }

    /// Right-hand unit normal `T × ν` inside the ambient.
    pub fn right_normals(&self, jet: &CurveJet) -> Vec<Vector3<f64>> {
        (0..self.n())
            .map(|k| {
                let t = jet.d1[k] / jet.speed[k];
                t.cross(&self.ambient.surface_normal(&self.points[k])).normalize()
            })
            .collect()
    }

    /// Geodesic curvature vector `H⃗` at every node.
    pub fn curvature_vectors(&self, jet: &CurveJet) -> Vec<Vector3<f64>> {
        (0..self.n())
            .map(|k| {
                let t = jet.d1[k] / jet.speed[k];
                let nu = self.ambient.surface_normal(&self.points[k]);
                let a = jet.d2[k] - t * t.dot(&jet.d2[k]) - nu * nu.dot(&jet.d2[k]);
                a / (jet.speed[k] * jet.speed[k])
            })
            .collect()
    }

    /// Smallest chart distance between nodes at least two apart, relative to
    /// the smallest adjacent spacing. Values below 0.5 flag self-intersection.
    pub fn separation_ratio(&self) -> f64 {
        let n = self.n();
        let dist = |a: &Vector3<f64>, b: &Vector3<f64>| -> f64 {
            let mut d = a - b;
            if self.ambient.kind == AmbientKind::FlatTorus {
                for c in 0..2 {
                    d[c] -= TAU * (d[c] / TAU).round();
                }
            }
            d.norm()
        };
        let adj = (0..n)
            .map(|k| dist(&self.points[k], &self.points[(k + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        let mut far = f64::INFINITY;
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                far = far.min(dist(&self.points[i], &self.points[j]));
            }
        }
        if adj == 0.0 {
            return 0.0;
        }
        far / adj
    }

    pub fn check_embedded(&self) -> Result<()> {
        let r = self.separation_ratio();
        if r < 0.5 {
            return Err(Error::SelfIntersection(r));
        }
        Ok(())
    }

    /// Whether the curve bounds a region: always on the plane and sphere, on
    /// the torus only for null-homotopic loops.
    pub fn bounds(&self) -> bool {
        self.ambient.kind != AmbientKind::FlatTorus || self.winding.norm() == 0.0
    }
}

/// Counter-clockwise circle of radius `r` centred at the origin.
pub fn circle(radius: f64, grid: &Arc<CurveGrid>) -> Curve {
    let points = grid
        .grid
        .nodes()
        .iter()
        .map(|&t| Vector3::new(radius * t.cos(), radius * t.sin(), 0.0))
        .collect();
    Curve { ambient: Ambient::plane(), points, winding: Vector3::zeros(), grid: grid.clone() }
}

/// Latitude circle at height `sin c` on the unit sphere, counter-clockwise
/// about `e_z`.
pub fn latitude(c: f64, grid: &Arc<CurveGrid>) -> Curve {
    let (s, co) = c.sin_cos();
    let points = grid
        .grid
        .nodes()
        .iter()
        .map(|&t| Vector3::new(co * t.cos(), co * t.sin(), s))
        .collect();
    Curve { ambient: Ambient::sphere(), points, winding: Vector3::zeros(), grid: grid.clone() }
}

/// Straight loop `θ ↦ (θ, y₀)` on the flat torus `R²/(2πZ)²`.
pub fn horizontal_loop(y0: f64, grid: &Arc<CurveGrid>) -> Curve {
    let points = grid.grid.nodes().iter().map(|&t| Vector3::new(t, y0, 0.0)).collect();
    Curve { ambient: Ambient::flat_torus(), points, winding: Vector3::x(), grid: grid.clone() }
}

/// Small contractible loop on the torus: circle of radius `r < π` about `c`.
pub fn torus_disk_loop(center: (f64, f64), radius: f64, grid: &Arc<CurveGrid>) -> Curve {
    assert!(radius < PI);
    let mut c = circle(radius, grid);
    for p in &mut c.points {
        p.x += center.0;
        p.y += center.1;
    }
    c.ambient = Ambient::flat_torus();
    c
}
