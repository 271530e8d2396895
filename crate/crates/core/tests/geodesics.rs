use std::f64::consts::{PI, TAU};

use equicont::equivariant::analyze_center;
use equicont::equivariant::checks::gradient_consistency;
use equicont::geodesics::*;
use equicont::{
    continue_branch, equivariance_residual, BranchStatus, CurveGrid, ProblemInstance, Scheme,
    SolverSettings, StepPolicy, Verdict,
};
use nalgebra::{DMatrix, DVector, Matrix2};

fn problem(family: MetricFamily, winding: (i32, i32), n: usize) -> GeodesicProblem {
    GeodesicProblem::new(family, winding, n, Scheme::Spectral, Matrix2::identity()).unwrap()
}

fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

#[test]
fn energy_closed_forms() {
    let grid = CurveGrid::new(32, Scheme::Spectral).unwrap();
    let flat = MetricFamily::FlatTorus.at(0.0);
    let lor = MetricFamily::LorentzFlat.at(0.0);
    let horizontal = ClosedCurve::straight((0.0, 0.0), (1, 0), &grid);
    let vertical = ClosedCurve::straight((0.0, 0.0), (0, 1), &grid);
    assert!((energy(&horizontal, &flat) - PI).abs() < 1e-14);
    assert!((energy(&vertical, &lor) + PI).abs() < 1e-14);
    let shifted = rotation_action(&horizontal, 3.0 * grid.h());
    assert!((energy(&shifted, &flat) - energy(&horizontal, &flat)).abs() < 1e-15);
}

#[test]
fn flat_residual_is_minus_second_derivative() {
    let n = 64;
    let grid = CurveGrid::new(n, Scheme::Spectral).unwrap();
    let t = nodes(n);
    let mut c = ClosedCurve::straight((0.0, 0.0), (1, 0), &grid);
    for k in 0..n {
        c.y[k] = 0.1 * (2.0 * t[k]).sin();
    }
    let r = geodesic_residual(&c, &MetricFamily::FlatTorus.at(0.0), &Matrix2::identity());
    for k in 0..n {
        assert!(r[k].abs() < 1e-12);
        // −y'' = 0.4 sin 2θ
        assert!((r[n + k] - 0.4 * (2.0 * t[k]).sin()).abs() < 1e-12);
    }
    let lor = geodesic_residual(
        &ClosedCurve::straight((0.3, 0.1), (1, 1), &grid),
        &MetricFamily::LorentzFlat.at(0.0),
        &Matrix2::identity(),
    );
    assert!(lor.amax() < 1e-12);
}

#[test]
fn flat_jacobi_is_block_second_derivative() {
    let n = 32;
    let p = problem(MetricFamily::FlatTorus, (1, 0), n);
    let x0 = p.straight_state((0.0, 0.0));
    let j = p.linearization(&x0, 0.0).unwrap().unwrap();
    let d2 = &p.grid().ops.d2;
    let mut expected = DMatrix::zeros(2 * n, 2 * n);
    expected.view_mut((0, 0), (n, n)).copy_from(&(-d2));
    expected.view_mut((n, n), (n, n)).copy_from(&(-d2));
    assert!((&j - expected).amax() < 1e-12);
    // both constant fields are Jacobi fields; the tangential one is the orbit direction
    let tangential = DVector::from_fn(2 * n, |i, _| if i < n { 1.0 } else { 0.0 });
    let transverse = DVector::from_fn(2 * n, |i, _| if i < n { 0.0 } else { 1.0 });
    assert!((&j * &tangential).amax() < 1e-12);
    assert!((&j * &transverse).amax() < 1e-12);
    let b = p.group().orbit_tangent(&x0).unwrap();
    assert!((b.column(0) - tangential).amax() < 1e-14);
}

#[test]
fn analytic_jacobi_matches_differences() {
    let n = 48;
    for family in [MetricFamily::ChannelTorus { eps: 0.1 }, MetricFamily::ConformalTorus { eps: 0.2 }] {
        let p = problem(family, (0, 1), n);
        let t = nodes(n);
        let x = DVector::from_fn(2 * n, |i, _| {
            let k = i % n;
            if i < n {
                0.2 * t[k].cos() + 0.05 * (3.0 * t[k]).sin()
            } else {
                0.1 * (2.0 * t[k]).sin()
            }
        });
        let j = p.linearization(&x, 0.8).unwrap().unwrap();
        let h = 1e-6;
        let mut fd = DMatrix::zeros(2 * n, 2 * n);
        for c in 0..2 * n {
            let mut xp = x.clone();
            xp[c] += h;
            let mut xm = x.clone();
            xm[c] -= h;
            let col = (p.gradient(&xp, 0.8).unwrap() - p.gradient(&xm, 0.8).unwrap()) / (2.0 * h);
            fd.set_column(c, &col);
        }
        let scale = j.amax();
        assert!((j - fd).amax() / scale < 1e-5);
    }
}

#[test]
fn channel_geodesic_is_equivariantly_nondegenerate() {
    let settings = SolverSettings::default();
    for te in [0.02, 0.1, 0.2, 0.3] {
        let p = problem(MetricFamily::ChannelTorus { eps: te }, (0, 1), 64);
        let x0 = p.straight_state((0.0, 0.0));
        assert!(p.gradient(&x0, 1.0).unwrap().amax() < 1e-12);
        let (report, _, _) = analyze_center(&p, &x0, 1.0, &settings).unwrap();
        assert_eq!(report.kernel_dim, 1, "tε = {te}");
        assert_eq!(report.verdict, Verdict::Nondegenerate);
        assert!(report.principal_angle < 1e-6);
    }
}

#[test]
fn flat_signatures_share_kernels() {
    let settings = SolverSettings::default();
    let riem = problem(MetricFamily::FlatTorus, (1, 0), 32);
    let (r, _, kr) = analyze_center(&riem, &riem.straight_state((0.0, 0.0)), 0.0, &settings).unwrap();
    for w in [(1, 0), (0, 1)] {
        let lor = problem(MetricFamily::LorentzFlat, w, 32);
        let (l, _, kl) = analyze_center(&lor, &lor.straight_state((0.0, 0.0)), 0.0, &settings).unwrap();
        assert_eq!(l.kernel_dim, r.kernel_dim);
        // span comparison: both kernels are the constant fields
        let m = riem.gram().m_x();
        let cross = kl.basis.transpose() * m * &kr.basis;
        let sv = cross.singular_values();
        assert!(sv.iter().all(|s| (s - 1.0).abs() < 1e-10));
    }
    assert_eq!(r.kernel_dim, 2);
    assert_eq!(r.verdict, Verdict::Degenerate);
}

#[test]
fn rotation_action_edge_cases() {
    let n = 32;
    let grid = CurveGrid::new(n, Scheme::Spectral).unwrap();
    let t = nodes(n);
    let mut c = ClosedCurve::straight((0.2, 0.0), (1, 2), &grid);
    for k in 0..n {
        c.x[k] += 0.1 * t[k].sin();
        c.y[k] += 0.05 * (3.0 * t[k]).cos();
    }
    let full = rotation_action(&c, TAU);
    assert!((full.x - c.x.add_scalar(TAU)).amax() < 1e-12);
    assert!((full.y - c.y.add_scalar(2.0 * TAU)).amax() < 1e-12);
    let one = rotation_action(&c, grid.h());
    for k in 0..n {
        assert_eq!(one.x[k], c.x[(k + 1) % n] + grid.h());
    }
    let frac = rotation_action(&c, 0.377);
    let m = MetricFamily::ChannelTorus { eps: 0.1 }.at(1.0);
    assert!((energy(&frac, &m) - energy(&c, &m)).abs() < 1e-10);
    let ab = rotation_action(&rotation_action(&c, 0.2), 0.31);
    let direct = rotation_action(&c, 0.51);
    assert!((ab.state() - direct.state()).amax() < 1e-12);

    let p = problem(MetricFamily::FlatTorus, (1, 0), n);
    let b = p.group().orbit_tangent(&p.straight_state((0.0, 0.0))).unwrap();
    for k in 0..n {
        assert!((b[(k, 0)] - 1.0).abs() < 1e-14 && b[(n + k, 0)].abs() < 1e-14);
    }
}

#[test]
fn gradient_and_equivariance() {
    let n = 48;
    let t = nodes(n);
    for (family, w) in [
        (MetricFamily::FlatTorus, (1, 0)),
        (MetricFamily::ChannelTorus { eps: 0.1 }, (0, 1)),
        (MetricFamily::ConformalTorus { eps: 0.2 }, (1, 1)),
        (MetricFamily::LorentzFlat, (1, 0)),
    ] {
        let p = problem(family, w, n);
        for s in 0..4 {
            let a = 0.1 + 0.05 * s as f64;
            let x = DVector::from_fn(2 * n, |i, _| {
                let k = i % n;
                a * ((1 + i / n) as f64 * t[k] + s as f64).sin()
            });
            let v = DVector::from_fn(2 * n, |i, _| ((1 + i / n) as f64 * t[i % n] + 0.5).cos() + 0.3 * t[i % n].sin());
            let err = gradient_consistency(&p, &x, &v, 0.6, 1e-5).unwrap();
            assert!(err < 1e-5, "{}: {err:e}", p.name());
            assert!(equivariance_residual(&p, &x, 0.6).unwrap() < 1e-8);
        }
    }
}

/// Channel metric geodesic equations, integrated with classical RK4:
/// `x'' = ½ f'(x) y'²`, `y'' = −f'(x) x' y' / f(x)`, `f = 1 + a cos x`.
fn shoot(a: f64, init: [f64; 4], steps: usize) -> Vec<[f64; 4]> {
    let rhs = |s: [f64; 4]| {
        let f = 1.0 + a * s[0].cos();
        let fp = -a * s[0].sin();
        [s[2], s[3], 0.5 * fp * s[3] * s[3], -fp * s[2] * s[3] / f]
    };
    let h = TAU / steps as f64;
    let mut out = vec![init];
    let mut s = init;
    for _ in 0..steps {
        let k1 = rhs(s);
        let k2 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k1[i]));
        let k3 = rhs(std::array::from_fn(|i| s[i] + 0.5 * h * k2[i]));
        let k4 = rhs(std::array::from_fn(|i| s[i] + h * k3[i]));
        s = std::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        out.push(s);
    }
    out
}

/// Closed geodesic in class (0, 1) with `y(0) = y0`, by Newton on
/// `(x(0), x'(0), y'(0))`.
pub fn shooting_oracle(a: f64, y0: f64, steps: usize) -> Vec<[f64; 4]> {
    let mut u = [0.05, 0.01, 1.0];
    let residual = |u: [f64; 3]| {
        let end = *shoot(a, [u[0], y0, u[1], u[2]], steps).last().unwrap();
        [end[0] - u[0], end[2] - u[1], end[1] - y0 - TAU]
    };
    for _ in 0..30 {
        let r = residual(u);
        if r.iter().all(|v| v.abs() < 1e-13) {
            break;
        }
        let mut jac = nalgebra::Matrix3::zeros();
        for j in 0..3 {
            let mut up = u;
            up[j] += 1e-7;
            let rp = residual(up);
            for i in 0..3 {
                jac[(i, j)] = (rp[i] - r[i]) / 1e-7;
            }
        }
        let step = jac.lu().solve(&nalgebra::Vector3::new(-r[0], -r[1], -r[2])).unwrap();
        for j in 0..3 {
            u[j] += step[j];
        }
    }
    shoot(a, [u[0], y0, u[1], u[2]], steps)
}

#[test]
fn channel_branch_matches_shooting() {
    let n = 64;
    let eps = 0.1;
    let p = problem(MetricFamily::ChannelTorus { eps }, (0, 1), n);
    let x0 = p.straight_state((0.0, 0.0));
    let branch = continue_branch(
        &p,
        &x0,
        0.2,
        1.0,
        &StepPolicy { steps: 8, ..Default::default() },
        &SolverSettings::default(),
    )
    .unwrap();
    assert_eq!(branch.status, BranchStatus::Completed);
    let steps = 64 * n;
    for s in &branch.samples {
        let c = p.curve(&s.state_vector()).unwrap();
        let orbit = shooting_oracle(s.lambda * eps, c.y[0], steps);
        let pts = c.points();
        for k in 0..n {
            let o = orbit[64 * k];
            assert!((pts[k].x - o[0]).abs() < 1e-6 && (pts[k].y - o[1]).abs() < 1e-6);
        }
    }
}
