//! Enclosed area of graphs over the circle, its invariance under rigid
//! motions, and the rotation-averaged primitive of x dy.

use equicont::cmc::{average_primitive, circle, graph_to_curve, isometry_regraph, volume_functional, CmcProblem};
use equicont::{CurveGrid, Scheme};
use nalgebra::{DVector, Vector2};

fn main() -> equicont::Result<()> {
    let grid = CurveGrid::new(64, Scheme::Spectral)?;
    for r in [0.5, 1.0, 2.0] {
        let v = volume_functional(&circle(r, &grid))?;
        println!("r = {r}: area {v:.15} (πr² {:.15})", std::f64::consts::PI * r * r);
    }
    let p = CmcProblem::plane_circle(64, Scheme::Spectral)?;
    let x = DVector::from_fn(64, |k, _| 0.1 * (2.0 * std::f64::consts::TAU * k as f64 / 64.0).sin());
    let graph = p.graph(&x)?;
    let before = volume_functional(&graph_to_curve(&graph)?)?;
    let after = volume_functional(&graph_to_curve(&isometry_regraph(&graph, &[0.1, -0.05, 0.3])?)?)?;
    println!("perturbed area {before:.15}, after motion {after:.15}");
    let avg = average_primitive(|q: Vector2<f64>| Vector2::new(0.0, q.x), 64)?;
    let q = Vector2::new(0.7, -0.4);
    println!("averaged primitive at {q:?}: {:?}", avg.coefficients(q));
    Ok(())
}
