//! The equator map T² → S² is harmonic but its Jacobi kernel is larger than
//! the rotation orbit, so continuation is refused.

use equicont::equivariant::analyze_center;
use equicont::geodesics::MetricFamily;
use equicont::harmonic::HarmonicProblem;
use equicont::{continue_branch, ProblemInstance, Scheme, SolverSettings, StepPolicy};
use nalgebra::DVector;

fn main() -> equicont::Result<()> {
    let p = HarmonicProblem::equator(MetricFamily::FlatTorus, 16, Scheme::Spectral)?;
    let x0 = DVector::zeros(p.dim());
    let s = SolverSettings::default();
    let (r, _, _) = analyze_center(&p, &x0, 0.0, &s)?;
    println!("kernel {} orbit rank {} {:?}", r.kernel_dim, r.orbit_rank, r.verdict);
    match continue_branch(&p, &x0, 0.0, 0.5, &StepPolicy::default(), &s) {
        Ok(b) => println!("unexpected branch with {} samples", b.samples.len()),
        Err(e) => println!("refused: {e}"),
    }
    Ok(())
}
