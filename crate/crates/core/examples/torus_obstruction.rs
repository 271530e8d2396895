//! A straight loop on the flat torus is a critical point of length with
//! no invariant volume. Asking for curvature λ ≠ 0 is absorbed entirely
//! by the translation multiplier.

use equicont::cmc::{volume_functional, CmcProblem};
use equicont::equivariant::solve_bordered;
use equicont::{build_slice, continue_branch, Scheme, SolverSettings, StepPolicy};
use nalgebra::DVector;

fn main() -> equicont::Result<()> {
    let n = 64;
    let s = SolverSettings::default();
    let p = CmcProblem::torus_loop(n, Scheme::Spectral)?;
    let x0 = DVector::zeros(n);
    let slice = build_slice(&p, &x0, 0.0, &s)?;
    for lambda in [0.1, 0.2, 0.3] {
        let sol = solve_bordered(&p, &slice, lambda, &x0, &s)?;
        println!("λ = {lambda}: ‖φ‖∞ = {:.1e}, a = {:+.12}", sol.state.amax(), sol.multipliers[0]);
    }
    let branch = continue_branch(&p, &x0, 0.0, 0.3, &StepPolicy::default(), &s)?;
    println!("continuation: {:?} after {} samples", branch.status, branch.samples.len());
    match volume_functional(&p.geometry().reference) {
        Ok(v) => println!("volume {v}"),
        Err(e) => println!("volume: {e}"),
    }
    Ok(())
}
