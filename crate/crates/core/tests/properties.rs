use proptest::prelude::*;

use tetrakit::config::RunConfig;
use tetrakit::dilation::{build_dilation, verify_model_identities, verify_moments, DilationModel};
use tetrakit::domains::{
    beta_pair, gamma_membership, neat_slice, pi_map, tetrablock_membership, Criterion, Point3, MEMBERSHIP_TOL,
};
use tetrakit::families::certified_triple;
use tetrakit::json::to_canonical_string;
use tetrakit::linalg::{CMatrix, C64};
use tetrakit::suite::{run_suite, SuiteKind};
use tetrakit::tetra::{fundamental_pair, OperatorTriple};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn point() -> impl Strategy<Value = Point3> {
    (complex(), complex(), complex()).prop_map(|(a, b, c)| Point3::new(a.scale(1.2), b.scale(1.2), c.scale(1.2)))
}

/// `A / ‖A‖ · r` with `r < 1`.
fn strict_contraction() -> impl Strategy<Value = CMatrix> {
    (prop::collection::vec(complex(), 4), 0.0f64..0.98).prop_filter_map("zero matrix", |(e, r)| {
        let a = CMatrix::new(2, 2, e).ok()?;
        let n = a.norm();
        (n > 1e-6).then(|| a.scale_re(r / n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_is_swap_symmetric(x in point()) {
        let a = tetrablock_membership(&x, &Criterion::CLOSED_FORM, MEMBERSHIP_TOL);
        let b = tetrablock_membership(&x.swapped(), &Criterion::CLOSED_FORM, MEMBERSHIP_TOL);
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.in_closed, b.in_closed);
            prop_assert_eq!(a.in_open, b.in_open);
        }
    }

    #[test]
    fn contractions_map_into_the_open_tetrablock(a in strict_contraction()) {
        let x = pi_map(&a).unwrap();
        let v = tetrablock_membership(&x, &Criterion::ALL, MEMBERSHIP_TOL).unwrap();
        prop_assert!(v.in_closed);
        prop_assert!(v.in_open || v.min_abs_margin() < 1e-6);
    }

    #[test]
    fn slices_of_interior_points_lie_in_gamma(a in strict_contraction(), theta in 0.0f64..std::f64::consts::TAU) {
        let x = pi_map(&a).unwrap();
        let q = neat_slice(&x, C64::from_polar(1.0, theta)).unwrap();
        prop_assert!(gamma_membership(&q, MEMBERSHIP_TOL).in_closed);
    }

    #[test]
    fn beta_pair_reconstructs(x in point()) {
        prop_assume!(x.x3.norm() < 0.95);
        let (b1, b2) = beta_pair(&x);
        prop_assert!((b1 + b2.conj() * x.x3 - x.x1).norm() < 1e-10);
        prop_assert!((b2 + b1.conj() * x.x3 - x.x2).norm() < 1e-10);
    }

    #[test]
    fn triple_json_round_trips(index in 0u64..1000) {
        let t = certified_triple(3, index, 4);
        let s = serde_json::to_string(&t).unwrap();
        let back: OperatorTriple = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(&back.a, &t.a);
        prop_assert_eq!(&back.b, &t.b);
        prop_assert_eq!(&back.p, &t.p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certified_dilations_reproduce_moments(index in 0u64..10_000) {
        let t = certified_triple(11, index, 4);
        let fp = fundamental_pair(&t).unwrap();
        let m = build_dilation(&t, &fp, 5).unwrap();
        prop_assert!(m.conditions_ok);
        let scale = t.scale();
        prop_assert!(verify_moments(&m, &t, 4).unwrap() < 1e-10 * scale.powi(4));
        for (k, v) in verify_model_identities(&m) {
            prop_assert!(v < 1e-8 * scale * scale, "{} = {}", k, v);
        }
        let s = to_canonical_string(&m).unwrap();
        let back: DilationModel = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(to_canonical_string(&back).unwrap(), s);
    }
}

#[test]
fn suites_are_deterministic() {
    let cfg = RunConfig {
        seed: 5,
        ..RunConfig::default()
    };
    for kind in [
        SuiteKind::AwyEquiv,
        SuiteKind::Chain,
        SuiteKind::Dilation,
        SuiteKind::Classify,
    ] {
        let a = to_canonical_string(&run_suite(kind, 8, &cfg).unwrap()).unwrap();
        let b = to_canonical_string(&run_suite(kind, 8, &cfg).unwrap()).unwrap();
        assert_eq!(a, b, "{kind}");
    }
}
