use std::f64::consts::TAU;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::ambient::{AmbientKind, VolumePrimitive};
use super::curve::Curve;
use crate::error::{Error, Result};

/// `∫ y*(η)` by the periodic trapezoid rule.
pub fn volume_with(curve: &Curve, primitive: &VolumePrimitive) -> Result<f64> {
    let jet = curve.jet();
    let mut sum = 0.0;
    for k in 0..curve.n() {
        sum += primitive.eval(&curve.points[k], &jet.d1[k])?;
    }
    Ok(sum * curve.grid.h())
}

/// Pole for the sphere primitive: the normalized area vector `∫ y × y'`,
/// which is rotation-equivariant, so the resulting volume is invariant.
pub fn sphere_pole(curve: &Curve) -> Result<Vector3<f64>> {
    let jet = curve.jet();
    let v: Vector3<f64> = (0..curve.n()).map(|k| curve.points[k].cross(&jet.d1[k])).sum();
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::ChartExit);
    }
    Ok(v / norm)
}

/// The ambient's invariant primitive adapted to `curve`.
pub fn default_primitive(curve: &Curve) -> Result<VolumePrimitive> {
    match curve.ambient.kind {
        AmbientKind::Plane => Ok(VolumePrimitive::Plane),
        AmbientKind::Sphere => Ok(VolumePrimitive::Sphere { pole: sphere_pole(curve)? }),
        AmbientKind::FlatTorus => Err(Error::NoPrimitive),
    }
}

/// Enclosed volume `𝒱(y) = ∫ y*(η)`. The plane uses `½(x dy − y dx)`, the
/// sphere the primitive on the complement of the antipode of the curve's
/// area-vector pole. The flat torus has no primitive.
pub fn volume_functional(curve: &Curve) -> Result<f64> {
    volume_with(curve, &default_primitive(curve)?)
}

/// SO(2)-average of a plane 1-form `η = a dx + b dy`:
/// `η^G(p) = (1/m) Σ R_kᵀ η(R_k p)` over `m` equally spaced rotations.
pub struct AveragedPrimitive<F: Fn(Vector2<f64>) -> Vector2<f64>> {
    base: F,
    samples: usize,
}

impl<F: Fn(Vector2<f64>) -> Vector2<f64>> AveragedPrimitive<F> {
    pub fn coefficients(&self, p: Vector2<f64>) -> Vector2<f64> {
        let m = self.samples;
        let mut acc = Vector2::zeros();
        for k in 0..m {
            let (s, c) = (TAU * k as f64 / m as f64).sin_cos();
            let rp = Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y);
            let e = (self.base)(rp);
            acc += Vector2::new(c * e.x + s * e.y, -s * e.x + c * e.y);
        }
        acc / m as f64
    }

    /// `max |R(t)ᵀ η^G(R(t)p) − η^G(p)|` over the given points and angles.
    pub fn invariance_defect(&self, points: &[Vector2<f64>], angles: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for p in points {
            let base = self.coefficients(*p);
            for &t in angles {
                let (s, c) = t.sin_cos();
                let rp = Vector2::new(c * p.x - s * p.y, s * p.x + c * p.y);
                let e = self.coefficients(rp);
                let pulled = Vector2::new(c * e.x + s * e.y, -s * e.x + c * e.y);
                worst = worst.max((pulled - base).norm());
            }
        }
        worst
    }
}

/// Haar average over the rotation part of the plane isometries. Only the
/// plane is supported: the sphere's SO(3) average is not needed because its
/// primitive is built invariant.
pub fn average_primitive<F>(base: F, samples: usize) -> Result<AveragedPrimitive<F>>
where
    F: Fn(Vector2<f64>) -> Vector2<f64>,
{
    if samples < 4 {
        return Err(Error::Config(format!("need at least 4 rotation samples, got {samples}")));
    }
    Ok(AveragedPrimitive { base, samples })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StokesResiduals {
    /// `max_j |∫ ⟨K_j, H⃗⟩ ds|`.
    pub r1: f64,
    /// `max_j |∫ ⟨K_j, n̂⟩ ds|`; `None` when the curve bounds nothing.
    pub r2: Option<f64>,
    /// `∫ ⟨K_j, n̂⟩ ds` per Killing field, reported regardless.
    pub flux: Vec<f64>,
    pub length: f64,
}

pub fn stokes_identity_check(curve: &Curve) -> StokesResiduals {
    let jet = curve.jet();
    let normals = curve.right_normals(&jet);
    let hvec = curve.curvature_vectors(&jet);
    let h = curve.grid.h();
    let amb = curve.ambient;
    let d = amb.group_dim();
    let mut r1: f64 = 0.0;
    let mut flux = vec![0.0; d];
    for (j, fl) in flux.iter_mut().enumerate() {
        let mut a = 0.0;
        let mut b = 0.0;
        for k in 0..curve.n() {
            let kv = amb.killing(j, &curve.points[k]);
            a += kv.dot(&hvec[k]) * jet.speed[k];
            b += kv.dot(&normals[k]) * jet.speed[k];
        }
        r1 = r1.max((a * h).abs());
        *fl = b * h;
    }
    let r2 = curve.bounds().then(|| flux.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    StokesResiduals { r1, r2, flux, length: jet.speed.sum() * h }
}
