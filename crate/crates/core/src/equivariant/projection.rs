use nalgebra::{DMatrix, DVector};

use super::slice::SliceBasis;
use super::ProblemInstance;
use crate::error::{Error, Result};
use crate::SolverSettings;

/// Result of moving a state onto the slice along its group orbit.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Full group coordinates (zero in generators outside the slice).
    pub g: DVector<f64>,
    pub state: DVector<f64>,
    /// `‖Bᵀ M (ρ(g, x) − x₀)‖∞`.
    pub residual: f64,
    pub iterations: usize,
}

fn embed(slice: &SliceBasis, d: usize, gr: &DVector<f64>) -> DVector<f64> {
    let mut g = DVector::zeros(d);
    for (k, &i) in slice.generators.iter().enumerate() {
        g[i] = gr[k];
    }
    g
}

/// `r(g) = B(x₀)ᵀ M (ρ(g, x) − x₀)` over the slice generators.
fn slice_residual(
    problem: &dyn ProblemInstance,
    slice: &SliceBasis,
    x: &DVector<f64>,
    gr: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let group = problem.group();
    let g = embed(slice, group.dim(), gr);
    if g.norm() > group.domain_radius() {
        return Err(Error::OutOfActionDomain { norm: g.norm(), radius: group.domain_radius() });
    }
    let moved = group.act(&g, x)?;
    let r = slice.orbit_basis.transpose() * problem.gram().m_x() * (&moved - &slice.x0);
    Ok((moved, r))
}

/// Finds `g` with `ρ(g, x)` on the slice by damped Newton in the slice
/// generators, starting from the identity.
pub fn slice_project(
    problem: &dyn ProblemInstance,
    x: &DVector<f64>,
    slice: &SliceBasis,
    settings: &SolverSettings,
) -> Result<Projection> {
    let n = problem.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let k = slice.generators.len();
    let mut gr = DVector::zeros(k);
    let (mut moved, mut r) = slice_residual(problem, slice, x, &gr)?;
    let mut res = r.amax();
    let mut iterations = 0;
    let h = 1e-7;
    while res > settings.project_tol {
        if iterations >= settings.max_iter {
            return Err(Error::NoConvergence { iterations, residual: res });
        }
        iterations += 1;
        let mut jac = DMatrix::zeros(k, k);
        for j in 0..k {
            let mut gp = gr.clone();
            gp[j] += h;
            let mut gm = gr.clone();
            gm[j] -= h;
            let rp = slice_residual(problem, slice, x, &gp)?.1;
            let rm = slice_residual(problem, slice, x, &gm)?.1;
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        let step = jac.lu().solve(&(-&r)).ok_or(Error::SingularBorderedMatrix)?;
        let norm0 = r.norm();
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1.0 / 1024.0 {
            let g_try = &gr + &step * t;
            match slice_residual(problem, slice, x, &g_try) {
                Ok((m_try, r_try)) if r_try.norm() <= (1.0 - 1e-4 * t) * norm0 => {
                    accepted = Some((g_try, m_try, r_try));
                    break;
                }
                Ok(_) => {}
                Err(e @ Error::OutOfActionDomain { .. }) if t <= 1.0 / 1024.0 => return Err(e),
                Err(Error::OutOfActionDomain { .. }) => {}
                Err(e) => return Err(e),
            }
            t *= 0.5;
        }
        let Some((g_new, m_new, r_new)) = accepted else {
            return Err(Error::NoConvergence { iterations, residual: res });
        };
        gr = g_new;
        moved = m_new;
        r = r_new;
        res = r.amax();
    }
    Ok(Projection { g: embed(slice, problem.group().dim(), &gr), state: moved, residual: res, iterations })
}

/// Brouwer degree of `g ↦ r(g)` on the sphere `|g| = radius` in the slice
/// generators. Supports one or two effective generators.
pub fn winding_degree(
    problem: &dyn ProblemInstance,
    x: &DVector<f64>,
    slice: &SliceBasis,
    radius: f64,
    samples: usize,
) -> Result<i32> {
    let k = slice.generators.len();
    let tiny = 1e-13;
    match k {
        1 => {
            let rp = slice_residual(problem, slice, x, &DVector::from_element(1, radius))?.1[0];
            let rm = slice_residual(problem, slice, x, &DVector::from_element(1, -radius))?.1[0];
            if rp.abs() <= tiny || rm.abs() <= tiny {
                return Err(Error::ResidualVanishesOnContour);
            }
            Ok(((rp.signum() - rm.signum()) / 2.0) as i32)
        }
        2 => {
            let m = samples.max(8);
            let point = |i: usize| -> Result<f64> {
                let t = std::f64::consts::TAU * i as f64 / m as f64;
                let g = DVector::from_vec(vec![radius * t.cos(), radius * t.sin()]);
                let r = slice_residual(problem, slice, x, &g)?.1;
                if r.norm() <= tiny {
                    return Err(Error::ResidualVanishesOnContour);
                }
                Ok(r[1].atan2(r[0]))
            };
            let first = point(0)?;
            let mut prev = first;
            let mut total = 0.0;
            for i in 1..=m {
                let cur = if i == m { first } else { point(i)? };
                let mut d = cur - prev;
                while d > std::f64::consts::PI {
                    d -= std::f64::consts::TAU;
                }
                while d <= -std::f64::consts::PI {
                    d += std::f64::consts::TAU;
                }
                total += d;
                prev = cur;
            }
            Ok((total / std::f64::consts::TAU).round() as i32)
        }
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// `‖B(x)ᵀ M_pair δf(x, λ)‖∞`, which vanishes for invariant functionals.
pub fn equivariance_residual(problem: &dyn ProblemInstance, x: &DVector<f64>, lambda: f64) -> Result<f64> {
    let b = problem.group().orbit_tangent(x)?;
    let g = problem.gradient(x, lambda)?;
    let v = b.transpose() * problem.gram().m_pair() * g;
    Ok(if v.is_empty() { 0.0 } else { v.amax() })
}
