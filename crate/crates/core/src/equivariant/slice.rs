use nalgebra::{DMatrix, DVector};

use super::kernel::{analyze_center, select_columns, Linearization, NondegeneracyReport};
use super::{ProblemInstance, SolverSettings};
use crate::error::{Error, Result};
use crate::linalg;

/// Slice through a nondegenerate critical point.
///
/// `s_basis` spans `S = Im(B(x₀))^⊥` (M-orthonormal columns); `y_basis`
/// spans `Y = ker L = Im B(x₀)` and is taken from the orbit tangent columns
/// themselves, so the bordered multipliers are the coefficients of the
/// Killing (generator) directions.
#[derive(Debug, Clone)]
pub struct SliceBasis {
    pub x0: DVector<f64>,
    pub lambda0: f64,
    pub s_basis: DMatrix<f64>,
    /// Independent columns of `B(x₀)`.
    pub orbit_basis: DMatrix<f64>,
    pub y_basis: DMatrix<f64>,
    /// Group generators (indices into `0..d`) kept in `orbit_basis`.
    pub generators: Vec<usize>,
    /// Condition number of `[L·S | Y]`.
    pub condition: f64,
    pub report: NondegeneracyReport,
    pub warnings: Vec<String>,
}

impl SliceBasis {
    pub fn codim(&self) -> usize {
        self.orbit_basis.ncols()
    }

    /// Slice coordinates of `x` (M-orthogonal projection onto `S`).
    pub fn coordinates(&self, x: &DVector<f64>, m: &DMatrix<f64>) -> DVector<f64> {
        self.s_basis.transpose() * m * (x - &self.x0)
    }
}

pub fn build_slice(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda0: f64,
    settings: &SolverSettings,
) -> Result<SliceBasis> {
    let (report, lin, _) = analyze_center(problem, x0, lambda0, settings)?;
    build_slice_with(problem, x0, lambda0, settings, report, &lin)
}

pub(crate) fn build_slice_with(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda0: f64,
    settings: &SolverSettings,
    report: NondegeneracyReport,
    lin: &Linearization,
) -> Result<SliceBasis> {
    if !report.is_nondegenerate() {
        return Err(Error::DegenerateOrbit {
            kernel_dim: report.kernel_dim,
            orbit_rank: report.orbit_rank,
            angle: report.principal_angle,
        });
    }
    let gram = problem.gram();
    let m = gram.m_x();
    let orbit = problem.group().orbit_tangent(x0)?;
    let generators = linalg::effective_columns(&orbit, m, settings.rank_tol);
    let orbit_basis = select_columns(&orbit, &generators);
    let q = linalg::m_orthonormalize(&orbit_basis, m);
    let s_basis = linalg::m_complement(&q, m, gram.factor());
    let y_basis = orbit_basis.clone();
    let mut warnings = report.notes.clone();
    let bordered = bordered_matrix(&lin.matrix, &s_basis, &y_basis);
    let condition = linalg::condition_number(&bordered);
    if condition > settings.max_condition {
        return Err(Error::IllPosedComplement(condition));
    }
    if generators.len() < orbit.ncols() {
        warnings.push(format!(
            "slice codimension {} below group dimension {}",
            generators.len(),
            orbit.ncols()
        ));
    }
    Ok(SliceBasis {
        x0: x0.clone(),
        lambda0,
        s_basis,
        orbit_basis,
        y_basis,
        generators,
        condition,
        report,
        warnings,
    })
}

pub(crate) fn bordered_matrix(l: &DMatrix<f64>, s: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let ls = l * s;
    let mut out = DMatrix::zeros(n, ls.ncols() + y.ncols());
    out.columns_mut(0, ls.ncols()).copy_from(&ls);
    out.columns_mut(ls.ncols(), y.ncols()).copy_from(y);
    out
}
