use std::f64::consts::TAU;

use equicont::cmc::{graph_to_curve, isometry_regraph, volume_functional, CmcProblem};
use equicont::geodesics::{GeodesicProblem, MetricFamily};
use equicont::harness::{state_checksum, suggestion};
use equicont::{ProblemInstance, Scheme};
use nalgebra::{DVector, Matrix2};
use proptest::prelude::*;

fn low_modes(n: usize, c: &[f64]) -> DVector<f64> {
    DVector::from_fn(n, |k, _| {
        let t = TAU * k as f64 / n as f64;
        c.iter().enumerate().map(|(m, a)| a * ((m + 1) as f64 * t + m as f64).cos()).sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loop_shifts_compose(a in -1.0..1.0f64, b in -1.0..1.0f64, c in prop::collection::vec(-0.2..0.2f64, 3)) {
        let n = 32;
        let p = GeodesicProblem::new(MetricFamily::ChannelTorus { eps: 0.1 }, (0, 1), n, Scheme::Spectral, Matrix2::identity()).unwrap();
        let mut x = p.straight_state((0.0, 0.0));
        x.rows_mut(0, n).copy_from(&low_modes(n, &c));
        let g = p.group();
        let two = g.act(&DVector::from_element(1, a), &g.act(&DVector::from_element(1, b), &x).unwrap()).unwrap();
        let one = g.act(&DVector::from_element(1, a + b), &x).unwrap();
        prop_assert!((two - one).amax() < 1e-10);
    }

    #[test]
    fn loop_gradient_norm_is_shift_invariant(s in -3.0..3.0f64, c in prop::collection::vec(-0.2..0.2f64, 3)) {
        let n = 32;
        let p = GeodesicProblem::new(MetricFamily::ChannelTorus { eps: 0.2 }, (0, 1), n, Scheme::Spectral, Matrix2::identity()).unwrap();
        let mut x = p.straight_state((0.0, 0.0));
        x.rows_mut(0, n).copy_from(&low_modes(n, &c));
        let moved = p.group().act(&DVector::from_element(1, s), &x).unwrap();
        let e0 = p.gradient(&x, 0.7).unwrap();
        let e1 = p.gradient(&moved, 0.7).unwrap();
        prop_assert!((e0.norm() - e1.norm()).abs() < 1e-9);
    }

    #[test]
    fn area_is_invariant_under_rigid_motions(
        g in prop::collection::vec(-0.2..0.2f64, 3),
        c in prop::collection::vec(-0.1..0.1f64, 3),
    ) {
        let n = 64;
        let p = CmcProblem::plane_circle(n, Scheme::Spectral).unwrap();
        let graph = p.graph(&low_modes(n, &c)).unwrap();
        let v0 = volume_functional(&graph_to_curve(&graph).unwrap()).unwrap();
        let moved = isometry_regraph(&graph, &[g[0], g[1], g[2]]).unwrap();
        let v1 = volume_functional(&graph_to_curve(&moved).unwrap()).unwrap();
        prop_assert!((v0 - v1).abs() < 1e-9);
    }

    #[test]
    fn checksum_is_deterministic_and_sensitive(v in prop::collection::vec(-1e3..1e3f64, 1..40), k in 0usize..40) {
        let a = state_checksum(&v);
        prop_assert_eq!(a.len(), 16);
        prop_assert_eq!(&a, &state_checksum(&v.clone()));
        let mut w = v.clone();
        let i = k % w.len();
        w[i] = f64::from_bits(w[i].to_bits() ^ 1);
        prop_assert_ne!(a, state_checksum(&w));
    }

    #[test]
    fn single_typo_is_suggested(i in 0usize..4, pos in 0usize..8) {
        let names = ["cmc-plane", "cmc-sphere", "geodesic-channel", "harmonic-circle"];
        let name = names[i];
        let mut typo: Vec<char> = name.chars().collect();
        typo.remove(pos % typo.len());
        let typo: String = typo.into_iter().collect();
        prop_assert_eq!(suggestion(&typo, &names), format!(" (did you mean `{name}`?)"));
    }
}
