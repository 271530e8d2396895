//! Slice construction, equivariant nondegeneracy certification, the
//! multiplier-bordered Newton solve and branch continuation.
//!
//! In finite dimensions the inclusions `𝔦`, `κ` are identities and every
//! pairing is a quadrature mass matrix, so a problem only has to supply its
//! functional, a gradient-like field `δf` with `vᵀ M δf = ∂f·v`, a mass
//! matrix and a (local) group action with its orbit tangent `B(x)`.

mod bordered;
pub mod checks;
mod continuation;
mod kernel;
mod projection;
mod slice;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bordered::{solve_bordered, BorderedSolution};
pub use continuation::{continue_branch, Branch, BranchSample, BranchStatus};
pub use kernel::{
    analyze_center, assemble_linearization, kernel_basis, nondegeneracy_check, KernelBasis,
    Linearization, LinearizationSource, NondegeneracyReport, Verdict,
};
pub use projection::{equivariance_residual, slice_project, winding_degree, Projection};
pub use slice::{build_slice, SliceBasis};

/// Quadrature pairings: `M_X` realizes the inner product on states and
/// `M_pair` the pairing of `δf` with variations. They coincide unless a
/// problem configures a distinct auxiliary metric.
#[derive(Debug, Clone)]
pub struct GramPair {
    m_x: DMatrix<f64>,
    m_pair: DMatrix<f64>,
    factor: crate::linalg::MassFactor,
}

impl GramPair {
    pub fn new(m_x: DMatrix<f64>, m_pair: DMatrix<f64>) -> Result<Self> {
        let n = m_x.nrows();
        if m_x.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m_x.ncols() });
        }
        if m_pair.nrows() != n || m_pair.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m_pair.nrows() });
        }
        let asym = (&m_x - m_x.transpose()).amax();
        if asym > 1e-12 * m_x.amax().max(1.0) {
            return Err(Error::Config("mass matrix is not symmetric".into()));
        }
        let min_eig = SymmetricEigen::new(m_x.clone()).eigenvalues.min();
        if min_eig <= 0.0 {
            return Err(Error::Config(format!(
                "mass matrix is not positive definite (smallest eigenvalue {min_eig:e})"
            )));
        }
        let factor = crate::linalg::MassFactor::new(&m_x);
        Ok(Self { m_x, m_pair, factor })
    }

    /// `weight · I`, the periodic trapezoid mass.
    pub fn uniform(n: usize, weight: f64) -> Self {
        let m = DMatrix::from_diagonal_element(n, n, weight);
        Self::new(m.clone(), m).expect("positive weight gives an SPD mass")
    }

    pub fn from_diagonal(weights: &DVector<f64>) -> Result<Self> {
        let m = DMatrix::from_diagonal(weights);
        Self::new(m.clone(), m)
    }

    pub fn m_x(&self) -> &DMatrix<f64> {
        &self.m_x
    }

    pub fn m_pair(&self) -> &DMatrix<f64> {
        &self.m_pair
    }

    pub fn factor(&self) -> &crate::linalg::MassFactor {
        &self.factor
    }

    pub fn dim(&self) -> usize {
        self.m_x.nrows()
    }

    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        crate::linalg::inner(&self.m_x, u, v)
    }
}

/// A local action `ρ(g, x)` of a `d`-dimensional Lie group, in exponential
/// coordinates `g ∈ R^d` around the identity.
pub trait GroupModel: Send + Sync {
    fn dim(&self) -> usize;

    /// Columns are `B(x)·e_i`, the orbit tangent generated by the i-th
    /// Lie algebra basis element.
    fn orbit_tangent(&self, x: &DVector<f64>) -> Result<DMatrix<f64>>;

    /// `ρ(g, x)`; fails outside the action domain.
    fn act(&self, g: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>>;

    /// Group product `g₁·g₂` in the same coordinates.
    fn compose(&self, g1: &DVector<f64>, g2: &DVector<f64>) -> DVector<f64>;

    /// Bound on `|g|` for which [`GroupModel::act`] is defined.
    fn domain_radius(&self) -> f64 {
        f64::INFINITY
    }

    fn is_abelian(&self) -> bool;
}

/// A discretized invariant variational problem.
pub trait ProblemInstance: Send + Sync {
    fn name(&self) -> String;

    /// State dimension `n`.
    fn dim(&self) -> usize;

    fn functional(&self, x: &DVector<f64>, lambda: f64) -> Result<f64>;

    /// Gradient-like field `δf(x, λ)`.
    fn gradient(&self, x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>>;

    /// Analytic `∂ₓδf`, when available.
    fn linearization(&self, _x: &DVector<f64>, _lambda: f64) -> Option<Result<DMatrix<f64>>> {
        None
    }

    fn gram(&self) -> &GramPair;

    fn group(&self) -> &dyn GroupModel;

    fn parameter_range(&self) -> (f64, f64);

    /// Reason why no invariant functional exists for `λ ≠ 0`, if any.
    fn invariance_obstruction(&self) -> Option<String> {
        None
    }
}

/// Tolerances shared by the solvers. Defaults follow the library contract.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub svd_tol: f64,
    pub spectral_gap: f64,
    pub angle_tol: f64,
    pub rank_tol: f64,
    pub multiplier_tol: f64,
    /// Criticality threshold for centers.
    pub residual_tol: f64,
    pub max_condition: f64,
    pub project_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            max_iter: 50,
            svd_tol: 1e-8,
            spectral_gap: 100.0,
            angle_tol: 1e-6,
            rank_tol: 1e-8,
            multiplier_tol: 1e-8,
            residual_tol: 1e-8,
            max_condition: 1e10,
            project_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepPolicy {
    /// Nominal number of steps from `λ₀` to the target.
    pub steps: usize,
    pub min_step: f64,
    /// Consecutive samples with `max|a| > multiplier_tol` before the branch
    /// is declared obstructed.
    pub obstruction_patience: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { steps: 20, min_step: 1e-6, obstruction_patience: 1 }
    }
}
