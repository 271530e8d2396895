//! Structural identities every problem must satisfy, evaluated numerically.

use nalgebra::DVector;

use super::ProblemInstance;
use crate::error::Result;

/// Relative mismatch between `vᵀ M_pair δf(x)` and a central difference of
/// the functional along `v`.
pub fn gradient_consistency(
    problem: &dyn ProblemInstance,
    x: &DVector<f64>,
    v: &DVector<f64>,
    lambda: f64,
    step: f64,
) -> Result<f64> {
    let fp = problem.functional(&(x + v * step), lambda)?;
    let fm = problem.functional(&(x - v * step), lambda)?;
    let fd = (fp - fm) / (2.0 * step);
    let g = problem.gradient(x, lambda)?;
    let pairing = (v.transpose() * problem.gram().m_pair() * g)[(0, 0)];
    Ok((pairing - fd).abs() / pairing.abs().max(fd.abs()).max(1e-12))
}

/// `|f(ρ(g, x)) − f(x)|`.
pub fn invariance_defect(
    problem: &dyn ProblemInstance,
    x: &DVector<f64>,
    g: &DVector<f64>,
    lambda: f64,
) -> Result<f64> {
    let moved = problem.group().act(g, x)?;
    Ok((problem.functional(&moved, lambda)? - problem.functional(x, lambda)?).abs())
}

/// `max_k |Bᵀ M_pair δf|_k / (|B_k|·|δf|)`, scale-free.
pub fn relative_equivariance(problem: &dyn ProblemInstance, x: &DVector<f64>, lambda: f64) -> Result<f64> {
    let b = problem.group().orbit_tangent(x)?;
    let g = problem.gradient(x, lambda)?;
    let m = problem.gram().m_pair();
    let gn = (g.transpose() * m * &g)[(0, 0)].max(0.0).sqrt();
    let mut worst: f64 = 0.0;
    for j in 0..b.ncols() {
        let col = b.column(j).into_owned();
        let bn = (col.transpose() * m * &col)[(0, 0)].max(0.0).sqrt();
        if bn == 0.0 || gn == 0.0 {
            continue;
        }
        worst = worst.max((col.transpose() * m * &g)[(0, 0)].abs() / (bn * gn));
    }
    Ok(worst)
}
