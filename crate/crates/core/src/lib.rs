//! Equivariant numerical continuation for finite-dimensional discretizations
//! of geometric variational problems.
//!
//! A problem is a functional `f(x, λ)` on nodal states that is invariant under
//! a (local) Lie group action, together with a gradient-like field `δf`. The
//! [`equivariant`] module builds a slice transverse to the group orbit at a
//! critical point, certifies that the Jacobi kernel is exactly the orbit
//! tangent, and solves the multiplier-bordered critical point system to
//! continue the critical orbit in `λ`.
//!
//! Built-in problems:
//! - [`cmc`]: constant geodesic curvature curves in the plane, the round
//!   sphere and the flat torus, as normal graphs over a reference curve;
//! - [`geodesics`]: closed (semi-)Riemannian geodesics on 2-tori;
//! - [`harmonic`]: harmonic maps from a flat-chart 2-torus into S¹ and S².

pub mod cmc;
pub mod equivariant;
pub mod error;
pub mod geodesics;
pub mod grid;
pub mod harmonic;
pub mod harness;
pub mod linalg;

pub use error::{Error, Result};
pub use equivariant::{
    assemble_linearization, build_slice, continue_branch, equivariance_residual, kernel_basis,
    nondegeneracy_check, slice_project, solve_bordered, winding_degree, Branch, BranchSample,
    BranchStatus, GramPair, GroupModel, NondegeneracyReport, ProblemInstance, SliceBasis,
    SolverSettings, StepPolicy, Verdict,
};
pub use grid::{circular_shift, derivative_matrices, make_grid, CurveGrid, DiffOperators, Grid, Scheme};
