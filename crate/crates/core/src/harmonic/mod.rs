//! Harmonic maps from the chart 2-torus, with a variable source metric,
//! into `S¹` and `S²`.

mod map;
mod problem;

pub use map::{
    dirichlet_energy, energy_density, harmonic_jacobi, target_killing_fields, tension_field, SourceWeights,
    SphereFrame, Tension, TorusGrid, TorusMap, WeightTensor,
};
pub use problem::{HarmonicProblem, HarmonicTarget, SphereChart, TargetRotations};
