//! Divergence-theorem residuals for the Killing fields along closed curves.

use equicont::cmc::{circle, horizontal_loop, latitude, stokes_identity_check};
use equicont::{CurveGrid, Scheme};

fn main() -> equicont::Result<()> {
    let grid = CurveGrid::new(128, Scheme::Spectral)?;
    for (label, curve) in [
        ("circle r = 0.5", circle(0.5, &grid)),
        ("circle r = 2", circle(2.0, &grid)),
        ("latitude z = 0.4", latitude(0.4, &grid)),
        ("latitude z = -0.8", latitude(-0.8, &grid)),
    ] {
        let r = stokes_identity_check(&curve);
        println!("{label:<18} r1 {:.1e} r2 {:.1e}", r.r1, r.r2.unwrap_or(f64::NAN));
    }
    // a loop that bounds nothing: the flux of the transverse translation is the length
    let r = stokes_identity_check(&horizontal_loop(0.3, &grid));
    println!("torus loop         flux {:?} length {:.12}", r.flux, r.length);
    Ok(())
}
