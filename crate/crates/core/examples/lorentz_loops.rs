//! Straight loops of the flat Lorentzian torus next to the Riemannian ones.
//! The Jacobi kernels agree; both contain the two constant fields while the
//! translation orbit of a loop is one-dimensional.

use equicont::equivariant::analyze_center;
use equicont::geodesics::{energy, GeodesicProblem, MetricFamily};
use equicont::{ProblemInstance, Scheme, SolverSettings};
use nalgebra::Matrix2;

fn main() -> equicont::Result<()> {
    for (family, w) in [
        (MetricFamily::FlatTorus, (1, 0)),
        (MetricFamily::LorentzFlat, (1, 0)),
        (MetricFamily::LorentzFlat, (0, 1)),
    ] {
        let p = GeodesicProblem::new(family, w, 32, Scheme::Spectral, Matrix2::identity())?;
        let x0 = p.straight_state((0.0, 0.0));
        let residual = p.gradient(&x0, 0.0)?.amax();
        let (r, _, _) = analyze_center(&p, &x0, 0.0, &SolverSettings::default())?;
        println!(
            "{:<18} winding {:?} residual {:.1e} energy {:+.6} kernel {} orbit rank {} {:?}",
            p.name(),
            w,
            residual,
            energy(&p.curve(&x0)?, &p.family().at(0.0)),
            r.kernel_dim,
            r.orbit_rank,
            r.verdict
        );
    }
    Ok(())
}
