//! Closed geodesics of diag(1, 1 + tε cos x) in the class (0, 1),
//! continued in t.

use equicont::geodesics::{energy, GeodesicProblem, MetricFamily};
use equicont::{continue_branch, Scheme, SolverSettings, StepPolicy};
use nalgebra::Matrix2;

fn main() -> equicont::Result<()> {
    let p = GeodesicProblem::new(MetricFamily::ChannelTorus { eps: 0.2 }, (0, 1), 64, Scheme::Spectral, Matrix2::identity())?;
    let x0 = p.straight_state((0.0, 0.0));
    let branch = continue_branch(&p, &x0, 0.2, 1.0, &StepPolicy::default(), &SolverSettings::default())?;
    for s in &branch.samples {
        let c = p.curve(&s.state_vector())?;
        let drift = c.points().iter().map(|q| q.x.abs()).fold(0.0, f64::max);
        println!("t = {:.3}  energy {:.12}  max |x| {:.1e}  residual {:.1e}", s.lambda, energy(&c, &p.family().at(s.lambda)), drift, s.residual);
    }
    println!("status {:?}", branch.status);
    Ok(())
}
