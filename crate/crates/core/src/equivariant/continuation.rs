use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::bordered::{jacobian_at, solve_bordered};
use super::kernel::{kernel_basis, Linearization};
use super::slice::{bordered_matrix, build_slice, build_slice_with, SliceBasis};
use super::{kernel, ProblemInstance, SolverSettings, StepPolicy};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchStatus {
    Completed,
    /// The multipliers stayed above `multiplier_tol`: the critical orbit
    /// does not persist.
    Obstructed,
    /// The kernel stopped matching the orbit tangent along the branch.
    DegenerateEncounter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchSample {
    pub lambda: f64,
    pub state: Vec<f64>,
    pub multipliers: Vec<f64>,
    /// `‖δf + Y a‖∞`.
    pub residual: f64,
    pub kernel_dim: usize,
    /// `‖dx/dλ‖∞` from the predictor tangent.
    pub sensitivity: f64,
}

impl BranchSample {
    pub fn max_abs_multiplier(&self) -> f64 {
        self.multipliers.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn state_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.state)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub problem: String,
    pub samples: Vec<BranchSample>,
    pub status: BranchStatus,
    pub warnings: Vec<String>,
}

impl Branch {
    pub fn last(&self) -> &BranchSample {
        self.samples.last().expect("a branch holds at least its center")
    }
}

/// Tangent `(ds, da)` of the bordered system with respect to `λ`, with
/// `∂λδf` taken by central differences.
fn tangent(
    problem: &dyn ProblemInstance,
    slice: &SliceBasis,
    x: &DVector<f64>,
    lambda: f64,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let h = 1e-6 * (1.0 + lambda.abs());
    let dl = (problem.gradient(x, lambda + h)? - problem.gradient(x, lambda - h)?) / (2.0 * h);
    let (l, _) = jacobian_at(problem, x, lambda)?;
    let jac = bordered_matrix(&l, &slice.s_basis, &slice.y_basis);
    let sol = jac.lu().solve(&(-dl)).ok_or(Error::SingularBorderedMatrix)?;
    let k = slice.s_basis.ncols();
    let ds = sol.rows(0, k).into_owned();
    let da = sol.rows(k, slice.y_basis.ncols()).into_owned();
    Ok((&slice.s_basis * ds, da))
}

/// Continue the critical orbit through `(x₀, λ₀)` to `λ_target`.
///
/// Requires `‖δf(x₀, λ₀)‖∞ ≤ residual_tol` and a nondegenerate center. The
/// slice is rebuilt around every accepted point. Stops early with
/// [`BranchStatus::Obstructed`] or [`BranchStatus::DegenerateEncounter`].
pub fn continue_branch(
    problem: &dyn ProblemInstance,
    x0: &DVector<f64>,
    lambda0: f64,
    lambda_target: f64,
    policy: &StepPolicy,
    settings: &SolverSettings,
) -> Result<Branch> {
    let n = problem.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let res0 = problem.gradient(x0, lambda0)?.amax();
    if res0 > settings.residual_tol {
        return Err(Error::InitialPointNotCritical(res0));
    }
    let mut slice = build_slice(problem, x0, lambda0, settings)?;
    let mut warnings = slice.warnings.clone();
    let mut x = x0.clone();
    let mut lambda = lambda0;
    let mut a = DVector::zeros(slice.y_basis.ncols());
    let (dx0, _) = tangent(problem, &slice, &x, lambda)?;
    let mut samples = vec![BranchSample {
        lambda,
        state: x.as_slice().to_vec(),
        multipliers: a.as_slice().to_vec(),
        residual: res0,
        kernel_dim: slice.report.kernel_dim,
        sensitivity: dx0.amax(),
    }];
    let span = lambda_target - lambda0;
    if span == 0.0 {
        return Ok(Branch { problem: problem.name(), samples, status: BranchStatus::Completed, warnings });
    }
    let nominal = span / policy.steps.max(1) as f64;
    let mut step = nominal;
    let mut over = 0usize;
    let mut status = BranchStatus::Completed;
    let done = |l: f64| (l - lambda_target) * span.signum() >= -1e-14 * (1.0 + span.abs());

    while !done(lambda) {
        let mut next = lambda + step;
        if done(next) {
            next = lambda_target;
        }
        let dl = next - lambda;
        let (dx, _) = tangent(problem, &slice, &x, lambda)?;
        let guess = &x + &dx * dl;
        match solve_bordered(problem, &slice, next, &guess, settings) {
            Ok(sol) => {
                lambda = next;
                x = sol.state;
                a = sol.multipliers;
                // kernel at the new point, compared with the orbit rank
                let (l, source) = jacobian_at(problem, &x, lambda)?;
                let orbit = problem.group().orbit_tangent(&x)?;
                let rank = linalg::effective_columns(&orbit, problem.gram().m_x(), settings.rank_tol).len();
                let kb = kernel_basis(&l, problem.gram(), settings.svd_tol, settings.spectral_gap);
                if let Err(e) = &kb {
                    warnings.push(format!("kernel at λ = {lambda}: {e}"));
                }
                samples.push(BranchSample {
                    lambda,
                    state: x.as_slice().to_vec(),
                    multipliers: a.as_slice().to_vec(),
                    residual: sol.residual,
                    kernel_dim: kb.as_ref().map_or(0, |k| k.dim()),
                    sensitivity: dx.amax(),
                });
                if a.amax() > settings.multiplier_tol {
                    over += 1;
                    if over >= policy.obstruction_patience.max(1) {
                        status = BranchStatus::Obstructed;
                        break;
                    }
                } else {
                    over = 0;
                }
                let Ok(kb) = kb else {
                    status = BranchStatus::DegenerateEncounter;
                    break;
                };
                if kb.dim() != rank {
                    status = BranchStatus::DegenerateEncounter;
                    break;
                }
                let report = kernel::nondegeneracy_check(&kb, &orbit, problem.gram(), settings);
                let lin = Linearization { matrix: l, source, warnings: vec![] };
                slice = match build_slice_with(problem, &x, lambda, settings, report, &lin) {
                    Ok(s) => s,
                    Err(Error::DegenerateOrbit { .. }) => {
                        status = BranchStatus::DegenerateEncounter;
                        break;
                    }
                    Err(e) => return Err(e),
                };
                if step.abs() < nominal.abs() {
                    step = (step * 2.0).abs().min(nominal.abs()) * span.signum();
                }
            }
            Err(Error::NoConvergence { .. } | Error::SingularBorderedMatrix) => {
                step *= 0.5;
                if step.abs() < policy.min_step {
                    return Err(Error::StepUnderflow { lambda, step: step.abs() });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Branch { problem: problem.name(), samples, status, warnings })
}
