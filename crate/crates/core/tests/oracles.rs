//! Values frozen from hand evaluation or from an independent numpy
//! computation, checked through the public API.

mod common;

use approx::assert_abs_diff_eq;
use common::nonnormal_triple;
use tetrakit::classify::stampfli_check;
use tetrakit::dilation::{build_dilation, recover_fundamental_from_dilation, verify_moments};
use tetrakit::domains::{neat_slice, pi_map, tetrablock_membership, Criterion, Point3};
use tetrakit::gamma::{gamma_contraction_test, rho, solve_fundamental_gamma, GammaConfig, OperatorPair, Verdict};
use tetrakit::linalg::{
    commutator, default_clamp_tol, defect, joint_eigenvalues, numerical_radius, operator_norm, spectral_radius,
    CMatrix, C64,
};
use tetrakit::tetra::{check_remark_pair, check_twoneweqns, fundamental_pair, rho1, OperatorTriple};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn half() -> OperatorTriple {
    OperatorTriple::real_scalar(0.5, 0.5, 0.25)
}

#[test]
fn nilpotent_jordan_block() {
    let j = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    assert_abs_diff_eq!(operator_norm(&j), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(numerical_radius(&j), 0.5, epsilon = 1e-12);
    let rot = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
    assert_abs_diff_eq!(spectral_radius(&rot), 1.0, epsilon = 1e-15);
    let comm = commutator(&j, &j.adjoint());
    assert_eq!(comm, CMatrix::from_real_diag(&[1.0, -1.0]));
    let jt = joint_eigenvalues(&[j.clone(), &j * &j, &j * &j], 1e-12).unwrap();
    assert!(jt.iter().flatten().all(|z| z.norm() < 1e-12));
}

#[test]
fn scalar_defect() {
    let p = CMatrix::scalar(c(0.25, 0.0));
    let dd = defect(&p, default_clamp_tol(&p)).unwrap();
    assert_eq!(dd.rank, 1);
    assert_abs_diff_eq!(dd.dp.get(0, 0).re, 0.968_245_836_551_854_2, epsilon = 1e-15);
}

#[test]
fn scalar_points() {
    let d = CMatrix::from_real_diag(&[0.5, 0.5]);
    assert_eq!(pi_map(&d).unwrap(), Point3::real(0.5, 0.5, 0.25));

    let v = tetrablock_membership(&Point3::real(0.5, 0.5, 0.25), &Criterion::ALL, 1e-9).unwrap();
    assert!(v.in_open);
    // 1 - |x2|² = 3/4 against |x1 - x̄2x3| + |x1x2 - x3| = 3/8.
    assert_abs_diff_eq!(v.margin(Criterion::Awy3).unwrap(), 0.375, epsilon = 1e-15);

    let v = tetrablock_membership(&Point3::real(1.0, 1.0, 1.0), &Criterion::CLOSED_FORM, 1e-9).unwrap();
    assert!(v.in_closed && !v.in_open);

    let q = neat_slice(&Point3::real(0.5, 0.5, 0.25), c(-1.0, 0.0)).unwrap();
    assert_abs_diff_eq!(q.s.norm(), 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(q.p.re, -0.25, epsilon = 1e-15);
}

#[test]
fn gamma_scalars() {
    let cfg = GammaConfig::default();
    let r = rho(&CMatrix::scalar(c(2.0, 0.0)), &CMatrix::scalar(c(0.0, 0.0))).unwrap();
    assert_abs_diff_eq!(r.get(0, 0).re, -2.0, epsilon = 1e-15);
    let r = rho(&CMatrix::scalar(c(2.0, 0.0)), &CMatrix::scalar(c(1.0, 0.0))).unwrap();
    assert_abs_diff_eq!(r.get(0, 0).re, 0.0, epsilon = 1e-15);

    let rep = gamma_contraction_test(&OperatorPair::scalar(c(2.5, 0.0), c(1.0, 0.0)), &cfg).unwrap();
    assert_eq!(rep.is_contraction, Verdict::Refuted);
    let rep = gamma_contraction_test(&OperatorPair::scalar(c(2.0, 0.0), c(1.0, 0.0)), &cfg).unwrap();
    assert!(!rep.is_contraction.is_refuted());

    let pr = OperatorPair::scalar(c(1.0, 0.0), c(0.25, 0.0));
    let dd = defect(&pr.p, default_clamp_tol(&pr.p)).unwrap();
    let phi = solve_fundamental_gamma(&pr, &dd).unwrap();
    assert_abs_diff_eq!(phi.get(0, 0).re, 0.8, epsilon = 1e-14);
}

#[test]
fn scalar_triple_values() {
    let t = half();
    assert_abs_diff_eq!(rho1(&t, c(1.0, 0.0)).get(0, 0).re, 3.0 / 16.0, epsilon = 1e-15);
    let fp = fundamental_pair(&t).unwrap();
    assert_abs_diff_eq!(fp.dd.embed(&fp.f1).get(0, 0).re, 0.4, epsilon = 1e-12);
    assert_abs_diff_eq!(fp.dd.embed(&fp.f2).get(0, 0).re, 0.4, epsilon = 1e-12);

    let bumped = &fp.f1 + CMatrix::scalar(c(0.1, 0.0));
    let (ra, _) = check_twoneweqns(&t, &fp.dd, &bumped, &fp.f2);
    assert!(ra > 0.09, "{ra}");

    for z in [c(1.0, 0.0), c(0.0, 1.0)] {
        assert!(check_remark_pair(&t, &fp, z).unwrap() < 1e-12);
    }

    let s = stampfli_check(
        &CMatrix::scalar(c(1.0, 0.0)),
        &CMatrix::scalar(c(1.0, 0.0)),
        &CMatrix::scalar(c(1.0, 0.0)),
    );
    assert_abs_diff_eq!(s.norm_b1, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(s.r_b1, 1.0, epsilon = 1e-14);
}

#[test]
fn scalar_dilation_columns() {
    let t = half();
    let fp = fundamental_pair(&t).unwrap();
    let m = build_dilation(&t, &fp, 4).unwrap();
    let d = 0.968_245_836_551_854_2;
    let v3: Vec<f64> = (0..5).map(|i| m.v3.get(i, 0).norm()).collect();
    let v1: Vec<f64> = (0..5).map(|i| m.v1.get(i, 0).norm()).collect();
    for (got, want) in v3.iter().zip([0.25, d, 0.0, 0.0, 0.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
    }
    for (got, want) in v1.iter().zip([0.5, 0.4 * d, 0.0, 0.0, 0.0]) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
    }
    let m = build_dilation(&t, &fp, 5).unwrap();
    assert!(verify_moments(&m, &t, 4).unwrap() < 1e-12);
    let rec = recover_fundamental_from_dilation(&m, &t, Some(&fp)).unwrap();
    assert_abs_diff_eq!(rec.f1.get(0, 0).re, 0.4, epsilon = 1e-12);
    assert_abs_diff_eq!(rec.f2.get(0, 0).re, 0.4, epsilon = 1e-12);
}

#[test]
fn nonnormal_fundamental_operators_match_numpy() {
    let t = nonnormal_triple();
    let fp = fundamental_pair(&t).unwrap();
    assert_abs_diff_eq!(fp.f1.norm(), 0.340_041_618_171_690_93, epsilon = 1e-12);
    assert_abs_diff_eq!(fp.f2.norm(), 0.439_663_038_215_796_33, epsilon = 1e-12);
    assert_abs_diff_eq!(
        commutator(&fp.f1, &fp.f2).norm(),
        0.028_545_420_508_070_074,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(numerical_radius(&fp.f1), 0.260_043_451_719_758_2, epsilon = 1e-9);
    // numpy used a 4000-angle grid per z: accurate to a few 1e-7.
    assert_abs_diff_eq!(fp.w_sweep_max, 0.675_257_755_408_137_5, epsilon = 1e-6);

    let m = build_dilation(&t, &fp, 3).unwrap();
    assert!(!m.conditions_ok);
    assert_abs_diff_eq!(m.commutator_residual, 0.028_545_420_508_070_074, epsilon = 1e-12);
    assert_abs_diff_eq!(m.normal_difference, 0.072_811_134_239_378_46, epsilon = 1e-12);
}
