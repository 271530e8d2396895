//! Closed geodesics of Riemannian and Lorentzian metrics on the 2-torus,
//! as critical points of the energy under parameter rotations.

mod metric;
mod problem;

pub use metric::{MetricFamily, MetricField, FAMILY_NAMES};
pub use problem::{
    energy, geodesic_jacobi, geodesic_residual, rotation_action, ClosedCurve, GeodesicProblem, ShiftGroup,
};
