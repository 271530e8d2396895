use std::f64::consts::PI;

use equicont::equivariant::analyze_center;
use equicont::equivariant::checks::{gradient_consistency, invariance_defect};
use equicont::geodesics::MetricFamily;
use equicont::harmonic::*;
use equicont::{
    continue_branch, equivariance_residual, Error, ProblemInstance, Scheme, SolverSettings, StepPolicy, Verdict,
};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flat(grid: &TorusGrid) -> SourceWeights {
    SourceWeights::new(&MetricFamily::FlatTorus.at(0.0), grid).unwrap()
}

#[test]
fn energies_of_model_maps() {
    let grid = TorusGrid::new(16, Scheme::Spectral).unwrap();
    let w = flat(&grid);
    let two_pi_sq = 2.0 * PI * PI;
    assert!((dirichlet_energy(&TorusMap::linear_circle((1, 0), &grid), &grid, &w) - two_pi_sq).abs() < 1e-12);
    assert!((dirichlet_energy(&TorusMap::equator(&grid), &grid, &w) - two_pi_sq).abs() < 1e-12);
    assert!(dirichlet_energy(&TorusMap::constant(Vector3::z(), &grid), &grid, &w) < 1e-24);
    // degree (p, q): ½(p² + q²)(2π)²
    let e = dirichlet_energy(&TorusMap::linear_circle((2, -1), &grid), &grid, &w);
    assert!((e - 5.0 * two_pi_sq).abs() < 1e-11);
}

#[test]
fn model_maps_are_harmonic() {
    let grid = TorusGrid::new(16, Scheme::Spectral).unwrap();
    let w = flat(&grid);
    for d in [(1, 0), (0, 1), (2, -3)] {
        assert!(tension_field(&TorusMap::linear_circle(d, &grid), &grid, &w).max_abs() < 1e-12);
    }
    assert!(tension_field(&TorusMap::equator(&grid), &grid, &w).max_abs() < 1e-12);
    let eps = 0.05;
    let remainder = grid.grid.sample(|x, _| eps * x.sin());
    let map = TorusMap::Circle { degree: (1, 0), remainder };
    let Tension::Circle(t) = tension_field(&map, &grid, &w) else { panic!() };
    assert!((t - grid.grid.sample(|x, _| -eps * x.sin())).amax() < 1e-12);
}

#[test]
fn circle_jacobi_is_minus_laplacian() {
    let grid = TorusGrid::new(16, Scheme::Spectral).unwrap();
    let j = harmonic_jacobi(&TorusMap::linear_circle((1, 0), &grid), &grid, &flat(&grid), None).unwrap();
    assert!((&j + &grid.ops.tensor().laplacian).amax() < 1e-12);
    let p = HarmonicProblem::circle(MetricFamily::FlatTorus, (1, 0), 16, Scheme::Spectral).unwrap();
    let (report, _, _) = analyze_center(&p, &DVector::zeros(256), 0.0, &SolverSettings::default()).unwrap();
    assert_eq!(report.kernel_dim, 1);
    assert_eq!(report.verdict, Verdict::Nondegenerate);
    let k = target_killing_fields(&TorusMap::linear_circle((1, 0), &grid), None).unwrap();
    assert!(k.iter().all(|&v| v == 1.0) && k.ncols() == 1);
}

/// `−Δ − 1` on the flat chart torus has the four unit lattice modes in its
/// kernel; the tangential block `−Δ` adds the constants.
fn equator_kernel_oracle(n: usize) -> usize {
    let half = n as i64 / 2;
    let mut count = 1;
    for kx in -half + 1..=half {
        for ky in -half + 1..=half {
            if kx * kx + ky * ky == 1 {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn equator_map_is_degenerate() {
    let n = 16;
    let p = HarmonicProblem::equator(MetricFamily::FlatTorus, n, Scheme::Spectral).unwrap();
    let x0 = DVector::zeros(p.dim());
    let j = p.linearization(&x0, 0.0).unwrap().unwrap();
    let eig = j.clone().symmetric_eigen();
    let zero = eig.eigenvalues.iter().filter(|v| v.abs() < 1e-8).count();
    assert_eq!(zero, equator_kernel_oracle(n));
    let settings = SolverSettings::default();
    let (report, _, _) = analyze_center(&p, &x0, 0.0, &settings).unwrap();
    assert_eq!(report.kernel_dim, 5);
    assert_eq!(report.orbit_rank, 3);
    assert_eq!(report.verdict, Verdict::Degenerate);
    let refused = continue_branch(&p, &x0, 0.0, 0.5, &StepPolicy::default(), &settings);
    assert!(matches!(refused, Err(Error::DegenerateOrbit { kernel_dim: 5, .. })), "{refused:?}");

    // Killing fields are Jacobi fields; the axial one is constant and tangential
    let grid = p.grid().clone();
    let k = target_killing_fields(&TorusMap::equator(&grid), p.frame()).unwrap();
    assert!((&j * &k).amax() < 1e-9);
    let m = grid.len();
    let axial = k.column(2);
    assert!(axial.rows(0, m).amax() < 1e-14);
    assert!(axial.rows(m, m).iter().all(|v| (v.abs() - 1.0).abs() < 1e-14));
    assert!((axial.rows(m, m).add_scalar(-axial[m])).amax() < 1e-14);
}

#[test]
fn north_pole_isotropy() {
    let grid = TorusGrid::new(8, Scheme::Spectral).unwrap();
    let map = TorusMap::constant(Vector3::z(), &grid);
    let TorusMap::Sphere { values } = &map else { panic!() };
    let frame = SphereFrame::new(values).unwrap();
    let k = target_killing_fields(&map, Some(&frame)).unwrap();
    assert_eq!(k.column(2).amax(), 0.0);
    assert!(k.column(0).amax() > 0.5 && k.column(1).amax() > 0.5);
}

#[test]
fn sphere_jacobi_matches_differences() {
    let n = 10;
    let grid = TorusGrid::new(n, Scheme::Spectral).unwrap();
    let values = (0..grid.len())
        .map(|i| {
            let (x, y) = grid.grid.point(i);
            Vector3::new(x.cos(), x.sin(), 0.2 * y.sin()).normalize()
        })
        .collect();
    let center = TorusMap::Sphere { values };
    let p = HarmonicProblem::sphere(MetricFamily::ChannelTorus { eps: 0.1 }, &center, n, Scheme::Spectral).unwrap();
    let x0 = DVector::zeros(p.dim());
    let j = p.linearization(&x0, 0.7).unwrap().unwrap();
    let h = 1e-6;
    let fd = DMatrix::from_columns(
        &(0..p.dim())
            .map(|c| {
                let mut e = DVector::zeros(p.dim());
                e[c] = h;
                (p.gradient(&e, 0.7).unwrap() - p.gradient(&(-&e), 0.7).unwrap()) / (2.0 * h)
            })
            .collect::<Vec<_>>(),
    );
    assert!((&j - fd).amax() / j.amax() < 1e-6);
}

#[test]
fn gradients_are_consistent_and_equivariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let circle = HarmonicProblem::circle(MetricFamily::ChannelTorus { eps: 0.1 }, (1, 2), 12, Scheme::Spectral).unwrap();
    let sphere = HarmonicProblem::equator(MetricFamily::ConformalTorus { eps: 0.2 }, 12, Scheme::Spectral).unwrap();
    for p in [&circle, &sphere] {
        let grid = p.grid().clone();
        for _ in 0..5 {
            let (a, b, c): (f64, f64, f64) = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(0.0..6.0));
            let smooth = grid.grid.sample(|x, y| a * (x + c).sin() + b * (x - 2.0 * y).cos());
            let x = if p.dim() == smooth.len() {
                smooth.clone()
            } else {
                DVector::from_fn(p.dim(), |i, _| smooth[i % smooth.len()] * if i < smooth.len() { 1.0 } else { -0.5 })
            };
            // band-limited direction: the discrete pairing and energy differ on Nyquist modes
            let modes: Vec<(f64, f64, f64)> =
                (0..4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0))).collect();
            let v = DVector::from_fn(p.dim(), |i, _| {
                let (x, y) = grid.grid.point(i % grid.len());
                let shift = (i / grid.len()) as f64;
                modes
                    .iter()
                    .enumerate()
                    .map(|(k, (amp, px, py))| amp * ((k % 3) as f64 * x + (k / 2) as f64 * y + px + shift * py).cos())
                    .sum::<f64>()
            });
            let t = rng.gen_range(0.0..1.0);
            assert!(gradient_consistency(p, &x, &v, t, 1e-5).unwrap() < 1e-5);
            assert!(equivariance_residual(p, &x, t).unwrap() < 1e-8);
            let g = DVector::from_fn(p.group().dim(), |_, _| rng.gen_range(-0.3..0.3));
            assert!(invariance_defect(p, &x, &g, t).unwrap() < 1e-10);
        }
    }
}

#[test]
fn sphere_action_composes() {
    let p = HarmonicProblem::equator(MetricFamily::FlatTorus, 8, Scheme::Spectral).unwrap();
    let x = DVector::from_fn(p.dim(), |i, _| 0.1 * (i as f64 * 0.7).sin());
    let (g1, g2) = (DVector::from_vec(vec![0.1, -0.2, 0.05]), DVector::from_vec(vec![0.0, 0.15, 0.3]));
    let two = p.group().act(&g1, &p.group().act(&g2, &x).unwrap()).unwrap();
    let one = p.group().act(&p.group().compose(&g1, &g2), &x).unwrap();
    assert!((two - one).amax() < 1e-12);
    let back = p.group().act(&(-&g1), &p.group().act(&g1, &x).unwrap()).unwrap();
    assert!((back - &x).amax() < 1e-12);
    let map = p.map(&x).unwrap();
    let TorusMap::Sphere { values } = map else { panic!() };
    assert!(values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
}

/// Direct dense solve of `div(A∇(p·x + u)) = 0` in energy (divergence) form:
/// `Σ Dᵢᵀ Aⁱʲ Dⱼ u = −Σ Dᵢᵀ Aⁱʲ slopeⱼ`, minimum-norm over the null space.
pub fn weighted_laplace_solve(family: MetricFamily, t: f64, degree: (i32, i32), grid: &TorusGrid) -> DVector<f64> {
    let w = SourceWeights::new(&family.at(t), grid).unwrap();
    let ops = grid.ops.tensor();
    let d = [&ops.dx, &ops.dy];
    let slope = [degree.0 as f64, degree.1 as f64];
    let m = grid.len();
    let mut k = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for i in 0..2 {
        for j in 0..2 {
            let coef = DVector::from_iterator(m, w.tensors.iter().map(|t| t.a[(i, j)]));
            let weighted = DMatrix::from_diagonal(&coef) * d[j];
            k += d[i].transpose() * weighted;
            rhs -= d[i].transpose() * coef * slope[j];
        }
    }
    let u = k.svd(true, true).solve(&rhs, 1e-10).unwrap();
    let mean = u.mean();
    u.add_scalar(-mean)
}

#[test]
fn circle_branches_match_linear_solves() {
    let n = 16;
    for family in [MetricFamily::ConformalTorus { eps: 0.3 }, MetricFamily::ChannelTorus { eps: 0.1 }] {
        let p = HarmonicProblem::circle(family, (1, 0), n, Scheme::Spectral).unwrap();
        let branch = continue_branch(
            &p,
            &DVector::zeros(p.dim()),
            0.0,
            1.0,
            &StepPolicy { steps: 10, ..Default::default() },
            &SolverSettings::default(),
        )
        .unwrap();
        for s in &branch.samples {
            let u = s.state_vector();
            let u = u.add_scalar(-u.mean());
            let oracle = weighted_laplace_solve(family, s.lambda, (1, 0), p.grid());
            assert!((u - oracle).amax() < 1e-8, "{} at t = {}", family.name(), s.lambda);
        }
    }
}

#[test]
fn channel_circle_map_closed_form() {
    // (√f (1 + u'))' = 0 in x alone, so √f (1 + u') = C with C = 2π / ∫ f^{−½}
    let n = 16;
    let (eps, t) = (0.1, 1.0);
    let grid = TorusGrid::new(n, Scheme::Spectral).unwrap();
    let u = weighted_laplace_solve(MetricFamily::ChannelTorus { eps }, t, (1, 0), &grid);
    let f = |x: f64| (1.0 + t * eps * x.cos()).powf(-0.5);
    let quad = |b: f64| {
        let m = 4000;
        let h = b / m as f64;
        (0..m).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
    };
    let c = 2.0 * PI / quad(2.0 * PI);
    let exact = DVector::from_iterator(grid.len(), (0..grid.len()).map(|i| {
        let (x, _) = grid.grid.point(i);
        c * quad(x) - x
    }));
    let exact = exact.add_scalar(-exact.mean());
    assert!((u - exact).amax() < 1e-7);
}
