//! Move the circle of curvature 2 by random rigid motions and project it
//! back to the slice through the original.

use equicont::cmc::CmcProblem;
use equicont::{build_slice, slice_project, winding_degree, ProblemInstance, Scheme, SolverSettings};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> equicont::Result<()> {
    let n = 64;
    let s = SolverSettings::default();
    let p = CmcProblem::plane_circle(n, Scheme::Spectral)?;
    // graph of the circle of radius 1/2 over the unit circle
    let x0 = DVector::from_element(n, -0.5);
    let slice = build_slice(&p, &x0, 2.0, &s)?;
    println!("slice generators {:?}", slice.generators);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..5 {
        let g = DVector::from_fn(3, |_, _| rng.gen_range(-0.2..0.2));
        let moved = p.group().act(&g, &x0)?;
        let proj = slice_project(&p, &moved, &slice, &s)?;
        println!("g = {:+.3?}  recovered {:+.3?}  residual {:.1e}", g.as_slice(), proj.g.as_slice(), proj.residual);
    }
    println!("winding degree {}", winding_degree(&p, &x0, &slice, 0.1, 64)?);
    Ok(())
}
