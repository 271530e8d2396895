//! Constant geodesic curvature curves in the plane, the round sphere and the
//! flat torus, as normal graphs over a reference curve.

mod ambient;
mod curve;
mod graph;
mod problem;
mod volume;

pub use ambient::{Ambient, AmbientKind, VolumePrimitive};
pub use curve::{circle, horizontal_loop, latitude, torus_disk_loop, Curve, CurveGrid, CurveJet};
pub use graph::{
    cmc_jacobi, graph_to_curve, isometry_regraph, killing_normal_components, mean_curvature,
    GraphGeometry, JacobiOperator, NormalGraph,
};
pub use problem::{CmcGroup, CmcProblem};
pub use volume::{
    average_primitive, default_primitive, sphere_pole, stokes_identity_check, volume_functional,
    volume_with, AveragedPrimitive, StokesResiduals,
};
