use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmbientKind {
    Plane,
    Sphere,
    FlatTorus,
}

/// Two-dimensional ambient, embedded in R³ for uniform bookkeeping: the plane
/// and the (lifted) flat torus live in `z = 0`, the sphere is the unit
/// sphere. The torus is `R² / (2πZ)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ambient {
    pub kind: AmbientKind,
}

impl Ambient {
    pub fn plane() -> Self {
        Self { kind: AmbientKind::Plane }
    }

    pub fn sphere() -> Self {
        Self { kind: AmbientKind::Sphere }
    }

    pub fn flat_torus() -> Self {
        Self { kind: AmbientKind::FlatTorus }
    }

    pub fn gaussian_curvature(&self) -> f64 {
        match self.kind {
            AmbientKind::Sphere => 1.0,
            _ => 0.0,
        }
    }

    /// Unit normal of the ambient surface in R³ (orientation).
    pub fn surface_normal(&self, p: &Vector3<f64>) -> Vector3<f64> {
        match self.kind {
            AmbientKind::Sphere => p.normalize(),
            _ => Vector3::z(),
        }
    }

    /// Number of listed Killing fields.
    pub fn group_dim(&self) -> usize {
        match self.kind {
            AmbientKind::FlatTorus => 2,
            _ => 3,
        }
    }

    /// Plane: `∂x, ∂y, x∂y − y∂x`. Sphere: `eⱼ × p`. Torus: `∂x, ∂y`.
    pub fn killing(&self, j: usize, p: &Vector3<f64>) -> Vector3<f64> {
        match (self.kind, j) {
            (AmbientKind::Sphere, _) => {
                let mut e = Vector3::zeros();
                e[j] = 1.0;
                e.cross(p)
            }
            (_, 0) => Vector3::x(),
            (_, 1) => Vector3::y(),
            (AmbientKind::Plane, 2) => Vector3::new(-p.y, p.x, 0.0),
            _ => panic!("killing field index {j} out of range"),
        }
    }

    pub fn killing_fields(&self, p: &Vector3<f64>) -> Vec<Vector3<f64>> {
        (0..self.group_dim()).map(|j| self.killing(j, p)).collect()
    }

    /// Plane: `g = (a, b, ω)`, `p ↦ R(ω)p + (a, b)`. Sphere: rotation vector.
    /// Torus: translation (on the lift).
    pub fn isometry(&self, g: &[f64], p: &Vector3<f64>) -> Vector3<f64> {
        match self.kind {
            AmbientKind::Plane => {
                let (s, c) = g[2].sin_cos();
                Vector3::new(c * p.x - s * p.y + g[0], s * p.x + c * p.y + g[1], 0.0)
            }
            AmbientKind::Sphere => Rotation3::new(Vector3::new(g[0], g[1], g[2])) * p,
            AmbientKind::FlatTorus => Vector3::new(p.x + g[0], p.y + g[1], 0.0),
        }
    }

    /// Group product, same coordinates as [`Ambient::isometry`].
    pub fn compose(&self, g1: &[f64], g2: &[f64]) -> Vec<f64> {
        match self.kind {
            AmbientKind::Plane => {
                let (s, c) = g1[2].sin_cos();
                vec![
                    c * g2[0] - s * g2[1] + g1[0],
                    s * g2[0] + c * g2[1] + g1[1],
                    g1[2] + g2[2],
                ]
            }
            AmbientKind::Sphere => {
                let r = Rotation3::new(Vector3::new(g1[0], g1[1], g1[2]))
                    * Rotation3::new(Vector3::new(g2[0], g2[1], g2[2]));
                r.scaled_axis().as_slice().to_vec()
            }
            AmbientKind::FlatTorus => vec![g1[0] + g2[0], g1[1] + g2[1]],
        }
    }

    /// Exponential map at `p` applied to the tangent vector `v`.
    pub fn exp(&self, p: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        match self.kind {
            AmbientKind::Sphere => {
                let t = v.norm();
                if t == 0.0 {
                    return *p;
                }
                p * t.cos() + v * (t.sin() / t)
            }
            _ => p + v,
        }
    }

    /// Riemannian area form `dA(u, v)`.
    pub fn area_form(&self, p: &Vector3<f64>, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        self.surface_normal(p).dot(&u.cross(v))
    }

    pub fn has_volume_primitive(&self) -> bool {
        self.kind != AmbientKind::FlatTorus
    }

    /// Norm of the symmetrized covariant derivative of the j-th Killing
    /// field at `p`, from central differences of the ambient extension
    /// projected to the tangent plane.
    pub fn killing_defect(&self, j: usize, p: &Vector3<f64>) -> f64 {
        let nu = self.surface_normal(p);
        let proj = nalgebra::Matrix3::identity() - nu * nu.transpose();
        let h = 1e-5;
        let mut dk = nalgebra::Matrix3::zeros();
        for i in 0..3 {
            let mut e = Vector3::zeros();
            e[i] = h;
            let col = (self.killing(j, &(p + e)) - self.killing(j, &(p - e))) / (2.0 * h);
            dk.set_column(i, &col);
        }
        let sym = proj * (dk + dk.transpose()) * proj;
        sym.abs().max()
    }
}

/// A 1-form `η` with `dη = dA` on (part of) the ambient, or the lifted torus
/// form `−y dx` used when no invariant primitive exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumePrimitive {
    /// `½(x dy − y dx)`.
    Plane,
    /// `η_p(v) = ⟨P, p × v⟩ / (1 + ⟨P, p⟩)` on `S² ∖ {−P}`.
    Sphere { pole: Vector3<f64> },
    /// `−y dx` on the universal cover; not invariant under `∂y`.
    TorusLift,
}

impl VolumePrimitive {
    pub fn eval(&self, p: &Vector3<f64>, v: &Vector3<f64>) -> Result<f64> {
        match self {
            VolumePrimitive::Plane => Ok(0.5 * (p.x * v.y - p.y * v.x)),
            VolumePrimitive::Sphere { pole } => {
                let den = 1.0 + pole.dot(p);
                if den <= 1e-8 {
                    return Err(Error::ChartExit);
                }
                Ok(pole.dot(&p.cross(v)) / den)
            }
            VolumePrimitive::TorusLift => Ok(-p.y * v.x),
        }
    }

    /// Relative Stokes defect `|∮η − area| / area` around a small geodesic
    /// circle of radius `rho` centred at `p`.
    pub fn stokes_defect(&self, ambient: &Ambient, p: &Vector3<f64>, rho: f64) -> Result<f64> {
        let nu = ambient.surface_normal(p);
        let seed = if nu.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let e1 = (seed - nu * nu.dot(&seed)).normalize();
        let e2 = nu.cross(&e1);
        let m = 64;
        let mut flux = 0.0;
        for k in 0..m {
            let t = std::f64::consts::TAU * k as f64 / m as f64;
            let (s, c) = t.sin_cos();
            let dir = e1 * c + e2 * s;
            let q = ambient.exp(p, &(dir * rho));
            // d/dt of exp_p(ρ(cos t e1 + sin t e2))
            let ddir = e2 * c - e1 * s;
            let dq = match ambient.kind {
                AmbientKind::Sphere => ddir * rho.sin(),
                _ => ddir * rho,
            };
            flux += self.eval(&q, &dq)?;
        }
        flux *= std::f64::consts::TAU / m as f64;
        let area = match ambient.kind {
            AmbientKind::Sphere => std::f64::consts::TAU * (1.0 - rho.cos()),
            _ => std::f64::consts::PI * rho * rho,
        };
        Ok((flux - area).abs() / area)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_fields_are_killing() {
        let p = Vector3::new(0.3, -0.4, 0.0);
        let s = Vector3::new(0.48, 0.6, 0.64);
        for amb in [Ambient::plane(), Ambient::flat_torus()] {
            for j in 0..amb.group_dim() {
                assert!(amb.killing_defect(j, &p) < 1e-9);
            }
        }
        for j in 0..3 {
            assert!(Ambient::sphere().killing_defect(j, &s) < 1e-9);
        }
    }

    #[test]
    fn primitives_integrate_to_area() {
        let p = Vector3::new(0.2, 0.1, 0.0);
        assert!(VolumePrimitive::Plane.stokes_defect(&Ambient::plane(), &p, 1e-2).unwrap() < 1e-9);
        let t = VolumePrimitive::TorusLift;
        assert!(t.stokes_defect(&Ambient::flat_torus(), &p, 1e-2).unwrap() < 1e-9);
        let s = Vector3::new(0.6, 0.0, 0.8);
        let sp = VolumePrimitive::Sphere { pole: Vector3::z() };
        assert!(sp.stokes_defect(&Ambient::sphere(), &s, 1e-2).unwrap() < 1e-9);
    }

    #[test]
    fn plane_composition_matches_action() {
        let a = Ambient::plane();
        let g1 = [0.1, -0.2, 0.3];
        let g2 = [-0.05, 0.15, -0.7];
        let p = Vector3::new(0.4, 0.9, 0.0);
        let lhs = a.isometry(&g1, &a.isometry(&g2, &p));
        let rhs = a.isometry(&a.compose(&g1, &g2), &p);
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
