//! Nondegeneracy reports at the model critical points.

use equicont::cmc::CmcProblem;
use equicont::equivariant::analyze_center;
use equicont::geodesics::{GeodesicProblem, MetricFamily};
use equicont::harmonic::HarmonicProblem;
use equicont::{ProblemInstance, Scheme, SolverSettings};
use nalgebra::{DVector, Matrix2};

fn show(p: &dyn ProblemInstance, x0: &DVector<f64>, lambda: f64) -> equicont::Result<()> {
    let (r, _, _) = analyze_center(p, x0, lambda, &SolverSettings::default())?;
    println!(
        "{:<20} kernel {} orbit rank {} angle {:.1e} {:?}",
        p.name(),
        r.kernel_dim,
        r.orbit_rank,
        r.principal_angle,
        r.verdict
    );
    Ok(())
}

fn main() -> equicont::Result<()> {
    let n = 64;
    let plane = CmcProblem::plane_circle(n, Scheme::Spectral)?;
    show(&plane, &DVector::zeros(n), 1.0)?;
    let sphere = CmcProblem::sphere_equator(n, Scheme::Spectral)?;
    show(&sphere, &DVector::zeros(n), 0.0)?;
    let channel = GeodesicProblem::new(MetricFamily::ChannelTorus { eps: 0.1 }, (0, 1), n, Scheme::Spectral, Matrix2::identity())?;
    show(&channel, &channel.straight_state((0.0, 0.0)), 0.5)?;
    let flat = GeodesicProblem::new(MetricFamily::FlatTorus, (1, 0), n, Scheme::Spectral, Matrix2::identity())?;
    show(&flat, &flat.straight_state((0.0, 0.0)), 0.0)?;
    let circle = HarmonicProblem::circle(MetricFamily::ConformalTorus { eps: 0.3 }, (1, 0), 16, Scheme::Spectral)?;
    show(&circle, &DVector::zeros(circle.dim()), 0.0)?;
    Ok(())
}
