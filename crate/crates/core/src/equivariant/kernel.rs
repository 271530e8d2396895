use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GramPair, ProblemInstance, SolverSettings};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearizationSource {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone)]
pub struct Linearization {
    pub matrix: DMatrix<f64>,
    pub source: LinearizationSource,
    pub warnings: Vec<String>,
}

/// `L = ∂ₓδf(x₀, λ₀)`: the analytic linearization when the problem has one,
/// otherwise a central difference Jacobian with step `1e-6·(1 + ‖x₀‖∞)`.
pub fn assemble_linearization(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda0: f64,
    settings: &SolverSettings,
) -> Result<Linearization> {
    let n = problem.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut warnings = Vec::new();
    let grad = problem.gradient(x0, lambda0)?;
    let res = grad.amax();
    if res > settings.residual_tol {
        warnings.push(format!("linearizing at a non-critical point (|δf|∞ = {res:e})"));
    }
    if let Some(analytic) = problem.linearization(x0, lambda0) {
        let matrix = analytic?;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: matrix.nrows() });
        }
        return Ok(Linearization { matrix, source: LinearizationSource::Analytic, warnings });
    }
    let matrix = fd_jacobian(problem, x0, lambda0)?;
    Ok(Linearization { matrix, source: LinearizationSource::FiniteDifference, warnings })
}

pub(crate) fn fd_jacobian(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    let n = x0.len();
    let step = 1e-6 * (1.0 + x0.amax());
    let mut jac = DMatrix::zeros(n, n);
    let mut xp = x0.clone();
    for j in 0..n {
        xp[j] = x0[j] + step;
        let gp = problem.gradient(&xp, lambda)?;
        xp[j] = x0[j] - step;
        let gm = problem.gradient(&xp, lambda)?;
        xp[j] = x0[j];
        jac.set_column(j, &((gp - gm) / (2.0 * step)));
    }
    Ok(jac)
}

/// Numerical kernel of `L` in the `M_X` geometry.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    /// M-orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Descending singular values of `R L R⁻¹` (`M = RᵀR`).
    pub singular_values: Vec<f64>,
    pub threshold: f64,
}

impl KernelBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Kernel `{σᵢ ≤ svd_tol·σ_max}`. Fails with [`Error::AmbiguousKernel`] when a
/// singular value lies within a factor `√gap` of the threshold on either side.
pub fn kernel_basis(
    l: &DMatrix<f64>,
    gram: &GramPair,
    svd_tol: f64,
    spectral_gap: f64,
) -> Result<KernelBasis> {
    let n = l.nrows();
    if l.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: l.ncols() });
    }
    if gram.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: gram.dim() });
    }
    let f = gram.factor();
    let lt = &f.r * l * &f.r_inv;
    let svd = lt.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let threshold = svd_tol * smax;
    let half_gap = spectral_gap.sqrt();
    if smax > 0.0 {
        if let Some(&s) = sv
            .iter()
            .find(|&&s| s > threshold / half_gap && s < threshold * half_gap)
        {
            return Err(Error::AmbiguousKernel { threshold, nearest: s });
        }
    }
    let cols: Vec<DVector<f64>> = order
        .iter()
        .filter(|&&i| svd.singular_values[i] <= threshold)
        .map(|&i| &f.r_inv * v_t.row(i).transpose())
        .collect();
    let basis = if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        linalg::m_orthonormalize(&DMatrix::from_columns(&cols), gram.m_x())
    };
    Ok(KernelBasis { basis, singular_values: sv, threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Nondegenerate,
    Degenerate,
    /// Nondegenerate center of a problem without an invariant functional.
    Obstructed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub singular_values: Vec<f64>,
    pub kernel_dim: usize,
    pub group_dim: usize,
    /// Numerical rank of `B(x₀)`.
    pub orbit_rank: usize,
    pub principal_angle: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl NondegeneracyReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.verdict != Verdict::Degenerate
    }
}

/// Compares the numerical kernel with the span of the orbit tangent `B(x₀)`.
/// `kernel` must carry M-orthonormal columns.
pub fn nondegeneracy_check(
    kernel: &KernelBasis,
    orbit: &DMatrix<f64>,
    gram: &GramPair,
    settings: &SolverSettings,
) -> NondegeneracyReport {
    let mut notes = Vec::new();
    let cols = linalg::effective_columns(orbit, gram.m_x(), settings.rank_tol);
    let orbit_rank = cols.len();
    if orbit_rank < orbit.ncols() {
        notes.push(format!(
            "orbit tangent has rank {orbit_rank} < group dimension {} (isotropy)",
            orbit.ncols()
        ));
    }
    let eff = select_columns(orbit, &cols);
    let q = linalg::m_orthonormalize(&eff, gram.m_x());
    let angle = linalg::max_principal_angle(&kernel.basis, &q, gram.m_x(), gram.factor());
    let verdict = if kernel.dim() == orbit_rank && angle <= settings.angle_tol {
        Verdict::Nondegenerate
    } else {
        Verdict::Degenerate
    };
    NondegeneracyReport {
        singular_values: kernel.singular_values.clone(),
        kernel_dim: kernel.dim(),
        group_dim: orbit.ncols(),
        orbit_rank,
        principal_angle: angle,
        verdict,
        notes,
    }
}

/// Linearize, extract the kernel and certify it against the orbit tangent at
/// `(x₀, λ₀)`. Nondegenerate centers of problems with an invariance
/// obstruction are reported as [`Verdict::Obstructed`].
pub fn analyze_center(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda0: f64,
    settings: &SolverSettings,
) -> Result<(NondegeneracyReport, Linearization, KernelBasis)> {
    let lin = assemble_linearization(problem, x0, lambda0, settings)?;
    let kernel = kernel_basis(&lin.matrix, problem.gram(), settings.svd_tol, settings.spectral_gap)?;
    let orbit = problem.group().orbit_tangent(x0)?;
    let kernel = align_kernel(kernel, &orbit, problem.gram());
    let mut report = nondegeneracy_check(&kernel, &orbit, problem.gram(), settings);
    report.notes.extend(lin.warnings.iter().cloned());
    if report.verdict == Verdict::Nondegenerate {
        if let Some(reason) = problem.invariance_obstruction() {
            report.verdict = Verdict::Obstructed;
            report.notes.push(reason);
        }
    }
    Ok((report, lin, kernel))
}

/// Flips kernel vectors so each has a nonnegative inner product with the
/// orbit column it overlaps most.
fn align_kernel(mut kernel: KernelBasis, orbit: &DMatrix<f64>, gram: &GramPair) -> KernelBasis {
    if orbit.ncols() == 0 {
        return kernel;
    }
    for j in 0..kernel.basis.ncols() {
        let k = kernel.basis.column(j).into_owned();
        let best = (0..orbit.ncols())
            .map(|i| gram.inner(&k, &orbit.column(i).into_owned()))
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if best < 0.0 {
            kernel.basis.set_column(j, &(-k));
        }
    }
    kernel
}

pub(crate) fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    if cols.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    DMatrix::from_columns(&cols.iter().map(|&j| m.column(j).into_owned()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invertible_matrix_has_trivial_kernel() {
        let g = GramPair::uniform(4, 0.5);
        let l = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]));
        let k = kernel_basis(&l, &g, 1e-8, 100.0).unwrap();
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn near_threshold_singular_value_is_ambiguous() {
        let g = GramPair::uniform(3, 1.0);
        let l = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-8, 1.0]));
        assert!(matches!(
            kernel_basis(&l, &g, 1e-8, 100.0),
            Err(Error::AmbiguousKernel { .. })
        ));
    }

    #[test]
    fn trivial_symmetry_with_trivial_kernel_is_nondegenerate() {
        let g = GramPair::uniform(3, 1.0);
        let l = DMatrix::identity(3, 3);
        let k = kernel_basis(&l, &g, 1e-8, 100.0).unwrap();
        let report = nondegeneracy_check(&k, &DMatrix::zeros(3, 0), &g, &SolverSettings::default());
        assert_eq!(report.verdict, Verdict::Nondegenerate);
        assert_eq!(report.kernel_dim, 0);
    }
}
