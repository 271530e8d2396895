use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-parameter metric families on the periodic chart `[0, 2π)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MetricFamily {
    FlatTorus,
    /// `(1 + t·ε·cos x)·I`.
    ConformalTorus { eps: f64 },
    /// `diag(1, −1)`.
    LorentzFlat,
    /// `diag(1, 1 + t·ε·cos x)`; the loops `x = 0` and `x = π` are geodesics.
    ChannelTorus { eps: f64 },
}

pub const FAMILY_NAMES: [&str; 4] = ["flat_torus", "conformal_torus", "lorentz_flat", "channel_torus"];

impl MetricFamily {
    /// Looks a family up by name; `eps` is ignored by the rigid families.
    pub fn from_name(name: &str, eps: f64) -> Result<Self> {
        match name {
            "flat_torus" => Ok(Self::FlatTorus),
            "conformal_torus" => Ok(Self::ConformalTorus { eps }),
            "lorentz_flat" => Ok(Self::LorentzFlat),
            "channel_torus" => Ok(Self::ChannelTorus { eps }),
            _ => Err(Error::Unknown {
                name: name.to_string(),
                hint: crate::harness::suggestion(name, &FAMILY_NAMES),
            }),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FlatTorus => FAMILY_NAMES[0],
            Self::ConformalTorus { .. } => FAMILY_NAMES[1],
            Self::LorentzFlat => FAMILY_NAMES[2],
            Self::ChannelTorus { .. } => FAMILY_NAMES[3],
        }
    }

    /// Short label used in problem names: `flat`, `conformal`, `lorentz`, `channel`.
    pub fn short_name(&self) -> &'static str {
        match self {
            Self::FlatTorus => "flat",
            Self::ConformalTorus { .. } => "conformal",
            Self::LorentzFlat => "lorentz",
            Self::ChannelTorus { .. } => "channel",
        }
    }

    pub fn at(&self, t: f64) -> MetricField {
        MetricField { family: *self, t }
    }
}

/// `g(q)` with analytic first and second chart derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricField {
    pub family: MetricFamily,
    pub t: f64,
}

impl MetricField {
    fn profile(&self, x: f64) -> (f64, f64, f64) {
        let a = match self.family {
            MetricFamily::ConformalTorus { eps } | MetricFamily::ChannelTorus { eps } => self.t * eps,
            _ => 0.0,
        };
        (1.0 + a * x.cos(), -a * x.sin(), -a * x.cos())
    }

    pub fn g(&self, q: &Vector2<f64>) -> Matrix2<f64> {
        let (f, _, _) = self.profile(q.x);
        match self.family {
            MetricFamily::FlatTorus => Matrix2::identity(),
            MetricFamily::ConformalTorus { .. } => Matrix2::identity() * f,
            MetricFamily::LorentzFlat => Matrix2::new(1.0, 0.0, 0.0, -1.0),
            MetricFamily::ChannelTorus { .. } => Matrix2::new(1.0, 0.0, 0.0, f),
        }
    }

    /// `[∂ₓg, ∂ᵧg]`.
    pub fn dg(&self, q: &Vector2<f64>) -> [Matrix2<f64>; 2] {
        let (_, fx, _) = self.profile(q.x);
        let dx = match self.family {
            MetricFamily::ConformalTorus { .. } => Matrix2::identity() * fx,
            MetricFamily::ChannelTorus { .. } => Matrix2::new(0.0, 0.0, 0.0, fx),
            _ => Matrix2::zeros(),
        };
        [dx, Matrix2::zeros()]
    }

    /// `d2g[i][j] = ∂ᵢ∂ⱼg`.
    pub fn d2g(&self, q: &Vector2<f64>) -> [[Matrix2<f64>; 2]; 2] {
        let (_, _, fxx) = self.profile(q.x);
        let dxx = match self.family {
            MetricFamily::ConformalTorus { .. } => Matrix2::identity() * fxx,
            MetricFamily::ChannelTorus { .. } => Matrix2::new(0.0, 0.0, 0.0, fxx),
            _ => Matrix2::zeros(),
        };
        [[dxx, Matrix2::zeros()], [Matrix2::zeros(), Matrix2::zeros()]]
    }

    /// Christoffel symbols of the first kind, `Γ[a][(b, c)] = ½(∂_b g_ac + ∂_c g_ab − ∂_a g_bc)`.
    pub fn christoffel_first(&self, q: &Vector2<f64>) -> [Matrix2<f64>; 2] {
        let dg = self.dg(q);
        let mut out = [Matrix2::zeros(); 2];
        for (a, m) in out.iter_mut().enumerate() {
            for b in 0..2 {
                for c in 0..2 {
                    m[(b, c)] = 0.5 * (dg[b][(a, c)] + dg[c][(a, b)] - dg[a][(b, c)]);
                }
            }
        }
        out
    }

    /// `∂_e Γ[a][(b, c)]`, indexed `[e][a]`.
    pub fn christoffel_first_derivative(&self, q: &Vector2<f64>) -> [[Matrix2<f64>; 2]; 2] {
        let d2 = self.d2g(q);
        let mut out = [[Matrix2::zeros(); 2]; 2];
        for (e, row) in out.iter_mut().enumerate() {
            for (a, m) in row.iter_mut().enumerate() {
                for b in 0..2 {
                    for c in 0..2 {
                        m[(b, c)] = 0.5 * (d2[e][b][(a, c)] + d2[e][c][(a, b)] - d2[e][a][(b, c)]);
                    }
                }
            }
        }
        out
    }

    /// `(+, +)` or `(+, −)`.
    pub fn signature(&self) -> (i8, i8) {
        match self.family {
            MetricFamily::LorentzFlat => (1, -1),
            _ => (1, 1),
        }
    }

    /// `T_g = g_R⁻¹ g`.
    pub fn t_tensor(&self, q: &Vector2<f64>, g_r: &Matrix2<f64>) -> Matrix2<f64> {
        g_r.try_inverse().expect("auxiliary metric is SPD") * self.g(q)
    }

    /// Minimum `|det g|` over an `m × m` chart sample.
    pub fn min_abs_det(&self, m: usize) -> f64 {
        let mut worst = f64::INFINITY;
        for i in 0..m {
            for j in 0..m {
                let q = Vector2::new(
                    std::f64::consts::TAU * i as f64 / m as f64,
                    std::f64::consts::TAU * j as f64 / m as f64,
                );
                worst = worst.min(self.g(&q).determinant().abs());
            }
        }
        worst
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        let d = self.min_abs_det(64);
        if d < 1e-8 {
            return Err(Error::Config(format!(
                "{} at t = {} is degenerate on the chart (|det g| = {d:e})",
                self.family.name(),
                self.t
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_derivatives_match_differences() {
        let m = MetricFamily::ChannelTorus { eps: 0.1 }.at(0.7);
        let c = MetricFamily::ConformalTorus { eps: 0.3 }.at(1.0);
        let q = Vector2::new(0.4, 1.3);
        let h = 1e-6;
        for f in [m, c] {
            for i in 0..2 {
                let mut e = Vector2::zeros();
                e[i] = h;
                let fd = (f.g(&(q + e)) - f.g(&(q - e))) / (2.0 * h);
                assert!((fd - f.dg(&q)[i]).abs().max() < 1e-9);
                for j in 0..2 {
                    let fd2 = (f.dg(&(q + e))[j] - f.dg(&(q - e))[j]) / (2.0 * h);
                    assert!((fd2 - f.d2g(&q)[i][j]).abs().max() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn channel_profile() {
        let g = MetricFamily::ChannelTorus { eps: 0.1 }.at(1.0);
        let q = Vector2::new(0.8, 2.0);
        assert!((g.g(&q)[(1, 1)] - (1.0 + 0.1 * 0.8f64.cos())).abs() < 1e-15);
        assert_eq!(g.g(&q)[(0, 0)], 1.0);
    }

    #[test]
    fn lorentz_tensor_and_determinant() {
        let g = MetricFamily::LorentzFlat.at(0.0);
        let t = g.t_tensor(&Vector2::zeros(), &Matrix2::identity());
        assert_eq!(t, Matrix2::new(1.0, 0.0, 0.0, -1.0));
        assert!(g.check_nondegenerate().is_ok());
        assert!(MetricFamily::ConformalTorus { eps: 1.0 }.at(1.0).check_nondegenerate().is_err());
    }

    #[test]
    fn unknown_family_suggests_nearest() {
        match MetricFamily::from_name("chanel_torus", 0.1) {
            Err(Error::Unknown { hint, .. }) => assert!(hint.contains("channel_torus")),
            other => panic!("{other:?}"),
        }
    }
}
