//! Degree (1, 0) maps into the circle over the channel family of source
//! metrics. The x-dependent part of the map satisfies √f (1 + u') = const.

use equicont::geodesics::MetricFamily;
use equicont::harmonic::{dirichlet_energy, HarmonicProblem};
use equicont::{continue_branch, ProblemInstance, Scheme, SolverSettings, StepPolicy};
use nalgebra::DVector;

fn main() -> equicont::Result<()> {
    let p = HarmonicProblem::circle(MetricFamily::ChannelTorus { eps: 0.2 }, (1, 0), 24, Scheme::Spectral)?;
    let branch = continue_branch(&p, &DVector::zeros(p.dim()), 0.0, 1.0, &StepPolicy::default(), &SolverSettings::default())?;
    for s in &branch.samples {
        let x = s.state_vector();
        println!(
            "t = {:.2}  energy {:.12}  max |u| {:.3e}  residual {:.1e}",
            s.lambda,
            dirichlet_energy(&p.map(&x)?, p.grid(), &p.weights(s.lambda)?),
            x.add_scalar(-x.mean()).amax(),
            s.residual
        );
    }
    Ok(())
}
