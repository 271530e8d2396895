use nalgebra::{DMatrix, DVector};

use super::kernel::{fd_jacobian, LinearizationSource};
use super::slice::{bordered_matrix, SliceBasis};
use super::{ProblemInstance, SolverSettings};
use crate::error::{Error, Result};

/// Solution of `δf(x₀ + S s, λ) + Y a = 0`.
#[derive(Debug, Clone)]
pub struct BorderedSolution {
    pub state: DVector<f64>,
    /// Slice coordinates `s`.
    pub coordinates: DVector<f64>,
    /// Multipliers `a`, one per slice generator.
    pub multipliers: DVector<f64>,
    /// `‖δf + Y a‖∞` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

pub(crate) fn jacobian_at(
    problem: &dyn ProblemInstance,
    x: &DVector<f64>,
    lambda: f64,
) -> Result<(DMatrix<f64>, LinearizationSource)> {
    match problem.linearization(x, lambda) {
        Some(l) => Ok((l?, LinearizationSource::Analytic)),
        None => Ok((fd_jacobian(problem, x, lambda)?, LinearizationSource::FiniteDifference)),
    }
}

fn bordered_residual(
    problem: &dyn ProblemInstance,
    slice: &SliceBasis,
    s: &DVector<f64>,
    a: &DVector<f64>,
    lambda: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let x = &slice.x0 + &slice.s_basis * s;
    let f = problem.gradient(&x, lambda)? + &slice.y_basis * a;
    Ok((x, f))
}

/// Damped Newton on the bordered system. The initial guess is projected onto
/// the slice; a warning is recorded when that moves it.
pub fn solve_bordered(
    problem: &dyn ProblemInstance,
    slice: &SliceBasis,
    lambda: f64,
    x_guess: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<BorderedSolution> {
    let n = problem.dim();
    if x_guess.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_guess.len() });
    }
    let m = problem.gram().m_x();
    let k = slice.s_basis.ncols();
    let r = slice.y_basis.ncols();
    let mut warnings = Vec::new();

    let mut s = slice.coordinates(x_guess, m);
    let off = (x_guess - &slice.x0 - &slice.s_basis * &s).amax();
    if off > 1e-10 * (1.0 + x_guess.amax()) {
        warnings.push(format!("initial guess projected onto the slice (moved by {off:e})"));
    }
    let mut a = DVector::zeros(r);
    let (mut x, mut f) = bordered_residual(problem, slice, &s, &a, lambda)?;
    let mut res = f.amax();
    let mut iterations = 0;
    while res > settings.newton_tol {
        if iterations >= settings.max_iter {
            return Err(Error::NoConvergence { iterations, residual: res });
        }
        iterations += 1;
        let (l, _) = jacobian_at(problem, &x, lambda)?;
        let jac = bordered_matrix(&l, &slice.s_basis, &slice.y_basis);
        let step = jac
            .lu()
            .solve(&(-&f))
            .ok_or(Error::SingularBorderedMatrix)?;
        if step.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularBorderedMatrix);
        }
        let ds = step.rows(0, k).into_owned();
        let da = step.rows(k, r).into_owned();
        let norm0 = f.norm();
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1.0 / 1024.0 {
            let s_try = &s + &ds * t;
            let a_try = &a + &da * t;
            if let Ok((x_try, f_try)) = bordered_residual(problem, slice, &s_try, &a_try, lambda) {
                let norm = f_try.norm();
                if norm.is_finite() && norm <= (1.0 - 1e-4 * t) * norm0 {
                    accepted = Some((s_try, a_try, x_try, f_try));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((s_new, a_new, x_new, f_new)) = accepted else {
            return Err(Error::NoConvergence { iterations, residual: res });
        };
        s = s_new;
        a = a_new;
        x = x_new;
        f = f_new;
        res = f.amax();
    }
    Ok(BorderedSolution {
        state: x,
        coordinates: s,
        multipliers: a,
        residual: res,
        iterations,
        warnings,
    })
}
