//! Continue the unit circle through curvatures H ∈ [1, 3] and compare
//! every sample with the circle of radius 1/H.

use equicont::cmc::{graph_to_curve, CmcProblem};
use equicont::{continue_branch, Scheme, SolverSettings, StepPolicy};
use nalgebra::DVector;

fn main() -> equicont::Result<()> {
    let n = 128;
    let p = CmcProblem::plane_circle(n, Scheme::Spectral)?;
    let branch = continue_branch(&p, &DVector::zeros(n), 1.0, 3.0, &StepPolicy::default(), &SolverSettings::default())?;
    println!("{:>6} {:>12} {:>12}", "H", "radius err", "|a|");
    for s in &branch.samples {
        let curve = graph_to_curve(&p.graph(&s.state_vector())?)?;
        let err = curve.points.iter().map(|q| (q.norm() - 1.0 / s.lambda).abs()).fold(0.0, f64::max);
        println!("{:>6.3} {:>12.2e} {:>12.2e}", s.lambda, err, s.max_abs_multiplier());
    }
    println!("status {:?}", branch.status);
    Ok(())
}
