//! Recognition of tetrablock unitaries and isometries, the Wold-type split
//! of a (possibly truncated) isometry, and the Stampfli norm identity.
//!
//! On a finite-dimensional space an isometry is unitary, so a pure
//! tetrablock isometry only shows up in the truncated model of the dilation
//! module. The `_on` variants restrict residuals to the leading columns so
//! those models can be judged away from their truncation edge.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domains::{gamma_boundary, tetrablock_boundary};
use crate::error::{Error, Result};
use crate::gamma::{pair_spectrum, Verdict};
use crate::linalg::{
    eigenvalues, hermitian_eigen, min_eigenvalue, normality_residual, orthonormal_span, spectral_radius, CMatrix,
};
use crate::tetra::{slice_pair, unimodular_grid, OperatorTriple, SpectralBattery};

/// Residual tolerance for the recognizers, relative to the operator scale.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Slack for spectral-radius bounds: eigenvalues of non-normal matrices
/// carry larger errors than norms do.
pub const RADIUS_SLACK: f64 = 1e-6;

const FINITE_DIM_NOTE: &str =
    "finite-dimensional isometries are unitary; a nontrivial shift part only appears in truncated models";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleKind {
    TetrablockUnitary,
    TetrablockIsometry,
    TetrablockContraction,
    None,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleClass {
    pub kind: TripleKind,
    /// Battery verdict when `kind` is `TetrablockContraction`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction: Option<Verdict>,
    pub evidence: BTreeMap<String, f64>,
    /// Individual equivalent criteria and whether each held.
    pub criteria: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn leading(m: &CMatrix, keep: usize) -> CMatrix {
    m.columns(0, keep.min(m.cols()))
}

fn unitary_defects(n3: &CMatrix, keep: usize) -> (f64, f64) {
    let n = n3.rows();
    let id = CMatrix::identity(n);
    let iso = leading(&(n3.adjoint() * n3 - &id), keep).norm();
    let co = (n3 * n3.adjoint() - id).norm();
    (iso, co)
}

/// Criterion (1): normal with joint spectrum in `bE`.
fn normal_with_boundary_spectrum(t: &OperatorTriple, tol: f64, ev: &mut BTreeMap<String, f64>) -> Result<bool> {
    let normality = [&t.a, &t.b, &t.p].map(normality_residual);
    ev.insert("normalityN1".into(), normality[0]);
    ev.insert("normalityN2".into(), normality[1]);
    ev.insert("normalityN3".into(), normality[2]);
    let spectrum = t.joint_spectrum()?;
    let violation = spectrum
        .iter()
        .map(|x| -tetrablock_boundary(x, tol).margin)
        .fold(0.0, f64::max);
    ev.insert("spectrumBoundaryViolation".into(), violation);
    Ok(normality.iter().all(|&r| r <= tol) && violation <= tol)
}

/// Criterion (5): every slice `(N1 + zN2, zN3)` is a Γ-unitary (normal with
/// joint spectrum in `bΓ`), on a 16-point circle grid.
fn slices_gamma_unitary(t: &OperatorTriple, tol: f64, ev: &mut BTreeMap<String, f64>) -> Result<bool> {
    let mut failures = 0usize;
    for z in unimodular_grid(16) {
        let pr = slice_pair(t, z)?;
        let normal = normality_residual(&pr.s) <= tol && normality_residual(&pr.p) <= tol;
        let on_boundary = pair_spectrum(&pr.s, &pr.p)?.iter().all(|q| gamma_boundary(q, tol));
        if !(normal && on_boundary) {
            failures += 1;
        }
    }
    ev.insert("sliceFailures".into(), failures as f64);
    Ok(failures == 0)
}

/// Decides by `N3` unitary, `‖N2‖ ≤ 1`, `N1 = N2*N3`, and records the
/// normal-spectrum form and the slice form alongside.
pub fn is_tetrablock_unitary(t: &OperatorTriple) -> Result<TripleClass> {
    let s = t.scale();
    let tol = CLASSIFY_TOL * s * s;
    let mut ev = BTreeMap::new();
    let (iso, co) = unitary_defects(&t.p, t.dim());
    let n2_excess = (t.b.norm() - 1.0).max(0.0);
    let relation = (&t.a - t.b.adjoint() * &t.p).norm();
    ev.insert("n3IsometryDefect".into(), iso);
    ev.insert("n3CoisometryDefect".into(), co);
    ev.insert("n2NormExcess".into(), n2_excess);
    ev.insert("relation".into(), relation);
    let form2 = iso <= tol && co <= tol && n2_excess <= tol && relation <= tol;
    let form1 = normal_with_boundary_spectrum(t, tol, &mut ev)?;
    let form5 = slices_gamma_unitary(t, tol, &mut ev)?;
    let criteria = BTreeMap::from([
        ("normalSpectrumInBE".to_string(), form1),
        ("unitaryContractionRelation".to_string(), form2),
        ("slicesGammaUnitary".to_string(), form5),
    ]);
    Ok(TripleClass {
        kind: if form2 {
            TripleKind::TetrablockUnitary
        } else {
            TripleKind::None
        },
        contraction: None,
        evidence: ev,
        criteria,
        note: None,
    })
}

/// Verdicts of the four testable unitary criteria: normal with spectrum in
/// `bE`; `N3` unitary, `N2` contractive, `N1 = N2*N3`; `N3` unitary and the
/// triple a tetrablock contraction (battery not refuted); slices Γ-unitary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryCriteria {
    pub normal_spectrum: bool,
    pub relation: bool,
    pub unitary_contraction: bool,
    pub slices: bool,
}

impl UnitaryCriteria {
    pub fn consistent(&self) -> bool {
        let v = [
            self.normal_spectrum,
            self.relation,
            self.unitary_contraction,
            self.slices,
        ];
        v.iter().all(|&b| b == v[0])
    }
}

pub fn unitary_criteria(t: &OperatorTriple, battery: &SpectralBattery) -> Result<UnitaryCriteria> {
    let class = is_tetrablock_unitary(t)?;
    let s = t.scale();
    let tol = CLASSIFY_TOL * s * s;
    let n3_unitary = class.evidence["n3IsometryDefect"] <= tol && class.evidence["n3CoisometryDefect"] <= tol;
    let unitary_contraction = n3_unitary && !battery.run(t)?.verdict.is_refuted();
    Ok(UnitaryCriteria {
        normal_spectrum: class.criteria["normalSpectrumInBE"],
        relation: class.criteria["unitaryContractionRelation"],
        unitary_contraction,
        slices: class.criteria["slicesGammaUnitary"],
    })
}

/// The proof's block unitary `[[N2*N3, -D], [N3 D, N2]]` with
/// `D = (I - N2*N2)^{1/2}`; meaningful for normal `N2`. Returns the block
/// and its unitary defect.
pub fn block_unitary_witness(t: &OperatorTriple) -> (CMatrix, f64) {
    let n = t.dim();
    let g = CMatrix::identity(n) - t.b.adjoint() * &t.b;
    let (vals, vecs) = hermitian_eigen(&g);
    let roots: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    let d = &vecs * CMatrix::from_real_diag(&roots) * vecs.adjoint();
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.set_block(0, 0, &(t.b.adjoint() * &t.p));
    u.set_block(0, n, &d.scale_re(-1.0));
    u.set_block(n, 0, &(&t.p * &d));
    u.set_block(n, n, &t.b);
    let id = CMatrix::identity(2 * n);
    let defect = (u.adjoint() * &u - &id).norm().max((&u * u.adjoint() - id).norm());
    (u, defect)
}

pub fn is_tetrablock_isometry(t: &OperatorTriple) -> Result<TripleClass> {
    is_tetrablock_isometry_on(t, t.dim())
}

/// Isometry recognizer with residuals restricted to the first `keep`
/// columns. Decides by `V3` isometric, `r(V1), r(V2) ≤ 1`, `V1 = V2*V3`;
/// also records the norm form (`‖V2‖ ≤ 1` instead of the radii) and the
/// companion relation `V2 = V1*V3`.
pub fn is_tetrablock_isometry_on(t: &OperatorTriple, keep: usize) -> Result<TripleClass> {
    let s = t.scale();
    let tol = CLASSIFY_TOL * s * s;
    let mut ev = BTreeMap::new();
    let (iso, _) = unitary_defects(&t.p, keep);
    let r1 = spectral_radius(&t.a);
    let r2 = spectral_radius(&t.b);
    let n2 = t.b.norm();
    let relation = leading(&(&t.a - t.b.adjoint() * &t.p), keep).norm();
    let relation_swap = leading(&(&t.b - t.a.adjoint() * &t.p), keep).norm();
    ev.insert("v3IsometryDefect".into(), iso);
    ev.insert("spectralRadiusV1".into(), r1);
    ev.insert("spectralRadiusV2".into(), r2);
    ev.insert("normV2".into(), n2);
    ev.insert("relation".into(), relation);
    ev.insert("relationSwap".into(), relation_swap);
    let base = iso <= tol && relation <= tol;
    let form3 = base && n2 <= 1.0 + tol;
    let form4 = base && r1 <= 1.0 + RADIUS_SLACK && r2 <= 1.0 + RADIUS_SLACK;
    let criteria = BTreeMap::from([
        ("normForm".to_string(), form3),
        ("spectralRadiusForm".to_string(), form4),
        ("companionRelation".to_string(), relation_swap <= tol),
    ]);
    Ok(TripleClass {
        kind: if form4 {
            TripleKind::TetrablockIsometry
        } else {
            TripleKind::None
        },
        contraction: None,
        evidence: ev,
        criteria,
        note: (keep < t.dim()).then(|| FINITE_DIM_NOTE.to_string()),
    })
}

/// Full classification: unitary, else isometry, else the battery verdict.
pub fn classify_triple(t: &OperatorTriple, battery: &SpectralBattery) -> Result<TripleClass> {
    let u = is_tetrablock_unitary(t)?;
    if u.kind == TripleKind::TetrablockUnitary {
        return Ok(u);
    }
    let i = is_tetrablock_isometry(t)?;
    if i.kind == TripleKind::TetrablockIsometry {
        return Ok(i);
    }
    let report = battery.run(t)?;
    let mut evidence = u.evidence;
    evidence.insert("rho12MinEig".into(), report.rho12_min_eig);
    evidence.insert("vnWorstRatio".into(), report.vn_worst_ratio);
    let mut criteria = u.criteria;
    criteria.extend(i.criteria);
    let kind = if report.verdict.is_refuted() {
        TripleKind::None
    } else {
        TripleKind::TetrablockContraction
    };
    Ok(TripleClass {
        kind,
        contraction: Some(report.verdict),
        evidence,
        criteria,
        note: None,
    })
}

#[derive(Clone, Debug)]
pub struct WoldSplit {
    pub unitary_part: OperatorTriple,
    pub shift_part: OperatorTriple,
    pub basis_u: CMatrix,
    pub basis_s: CMatrix,
    /// `‖(I - Π_U) V_i Π_U‖ + ‖Π_U V_i (I - Π_U)‖`, worst over i: how far the
    /// unitary part is from reducing each component.
    pub reducing_residual: f64,
    pub note: String,
}

/// Eigenvectors of a Hermitian matrix with eigenvalue within `tol` of 1.
fn unit_eigenspace(h: &CMatrix, tol: f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i] - 1.0).abs() <= tol).collect();
    CMatrix::from_fn(h.rows(), keep.len(), |r, c| vecs.get(r, keep[c]))
}

/// Orthonormal basis of `span(x) ∩ span(y)` for orthonormal `x`, `y`.
fn intersect(x: &CMatrix, y: &CMatrix, tol: f64) -> CMatrix {
    if x.cols() == 0 || y.cols() == 0 {
        return CMatrix::zeros(x.rows(), 0);
    }
    // Vectors of span(x) fixed by the projection onto span(y).
    let m = x.adjoint() * y * y.adjoint() * x;
    let v = unit_eigenspace(&m, tol);
    orthonormal_span(&(x * v), 1e-10, 0.0)
}

/// Splits the space into the largest subspace on which `V3` is unitary and
/// its complement. `edge` trailing basis vectors are treated as truncation
/// artefacts and excluded from the isometry precondition.
pub fn wold_split(t: &OperatorTriple, edge: usize) -> Result<WoldSplit> {
    let n = t.dim();
    let keep = n.saturating_sub(edge);
    let s = t.scale();
    let tol = CLASSIFY_TOL * s * s;
    let (defect, _) = unitary_defects(&t.p, keep);
    if defect > tol {
        return Err(Error::NotIsometry { defect });
    }
    let v = &t.p;
    let etol = 1e-8;
    let mut m = intersect(
        &unit_eigenspace(&(v.adjoint() * v), etol),
        &unit_eigenspace(&(v * v.adjoint()), etol),
        etol,
    );
    // Shrink to the largest subspace invariant under V3 and V3*.
    loop {
        let before = m.cols();
        if before == 0 {
            break;
        }
        let vm = orthonormal_span(&(v * &m), 1e-10, 0.0);
        let vsm = orthonormal_span(&(v.adjoint() * &m), 1e-10, 0.0);
        m = intersect(&intersect(&m, &vm, etol), &vsm, etol);
        if m.cols() == before {
            break;
        }
    }
    let basis_u = m;
    let basis_s = crate::linalg::orthogonal_complement(&basis_u);
    let proj = &basis_u * basis_u.adjoint();
    let comp = CMatrix::identity(n) - &proj;
    let reducing_residual = t
        .components()
        .iter()
        .map(|x| (&comp * *x * &proj).norm() + (&proj * *x * &comp).norm())
        .fold(0.0, f64::max);
    Ok(WoldSplit {
        unitary_part: t.compress(&basis_u),
        shift_part: t.compress(&basis_s),
        basis_u,
        basis_s,
        reducing_residual,
        note: FINITE_DIM_NOTE.to_string(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StampfliReport {
    pub norm_b1: f64,
    pub r_b1: f64,
    /// `λ_min(B1*B1 - B1B1*)`; nonnegative for hyponormal `B1`.
    pub hyponormal_residual: f64,
    /// `‖[B1, B2]‖` with `B2 = diag(V3, V3)`.
    pub b2_commutator: f64,
}

/// `B1 = [[0, V1], [V2, 0]]`: its norm, spectral radius and hyponormality
/// margin.
pub fn stampfli_check(v1: &CMatrix, v2: &CMatrix, v3: &CMatrix) -> StampfliReport {
    let n = v1.rows();
    let mut b1 = CMatrix::zeros(2 * n, 2 * n);
    b1.set_block(0, n, v1);
    b1.set_block(n, 0, v2);
    let b2 = CMatrix::direct_sum(&[v3, v3]);
    let gap = b1.adjoint() * &b1 - &b1 * b1.adjoint();
    let r = if n == 0 {
        0.0
    } else {
        eigenvalues(&b1).iter().map(|z| z.norm()).fold(0.0, f64::max)
    };
    StampfliReport {
        norm_b1: b1.norm(),
        r_b1: r,
        hyponormal_residual: if n == 0 { 0.0 } else { min_eigenvalue(&gap) },
        b2_commutator: (&b1 * &b2 - &b2 * &b1).norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{pi_map, tetrablock_boundary};
    use crate::families::tetrablock_unitary;
    use crate::random::{random_unitary, stream};
    use approx::assert_abs_diff_eq;

    #[test]
    fn unitary_examples() {
        let c = is_tetrablock_unitary(&OperatorTriple::real_scalar(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(c.kind, TripleKind::TetrablockUnitary);
        assert!(c.criteria.values().all(|&b| b));

        let mut rng = stream(8, 0);
        let pts: Vec<_> = (0..4).map(|_| pi_map(&random_unitary(2, &mut rng)).unwrap()).collect();
        let c = is_tetrablock_unitary(&OperatorTriple::diagonal(&pts)).unwrap();
        assert_eq!(c.kind, TripleKind::TetrablockUnitary);

        let c = is_tetrablock_unitary(&OperatorTriple::real_scalar(0.5, 0.5, 0.25)).unwrap();
        assert_eq!(c.kind, TripleKind::None);
        assert_abs_diff_eq!(c.evidence["n3IsometryDefect"], 15.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn isometry_examples() {
        let c = is_tetrablock_isometry(&OperatorTriple::real_scalar(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(c.kind, TripleKind::TetrablockIsometry);
        let c = is_tetrablock_isometry(&OperatorTriple::real_scalar(0.5, 0.5, 0.25)).unwrap();
        assert_eq!(c.kind, TripleKind::None);
        for i in 0..6 {
            let g = tetrablock_unitary(2, i, 5);
            let c = is_tetrablock_isometry(&g.triple).unwrap();
            assert_eq!(c.kind, TripleKind::TetrablockIsometry);
            assert!(c.criteria["normForm"] && c.criteria["companionRelation"]);
        }
    }

    #[test]
    fn wold_on_unitaries_keeps_everything() {
        let g = tetrablock_unitary(4, 2, 5);
        let w = wold_split(&g.triple, 0).unwrap();
        assert_eq!(w.basis_u.cols(), g.triple.dim());
        assert_eq!(w.basis_s.cols(), 0);
        assert!(wold_split(&OperatorTriple::real_scalar(0.5, 0.5, 0.25), 0).is_err());
    }

    #[test]
    fn stampfli_examples() {
        let z = CMatrix::zeros(2, 2);
        let r = stampfli_check(&z, &z, &CMatrix::identity(2));
        assert_eq!((r.norm_b1, r.r_b1, r.hyponormal_residual), (0.0, 0.0, 0.0));
        assert_eq!(r.b2_commutator, 0.0);
        let one = CMatrix::identity(1);
        let r = stampfli_check(&one, &one, &one);
        assert_abs_diff_eq!(r.norm_b1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.r_b1, 1.0, epsilon = 1e-14);
        for i in 0..6 {
            let t = tetrablock_unitary(6, i, 5).triple;
            let r = stampfli_check(&t.a, &t.b, &t.p);
            assert!(r.norm_b1 - r.r_b1 < 1e-6);
            assert!(r.hyponormal_residual > -1e-10);
        }
    }

    #[test]
    fn unitary_spectra_lie_on_the_boundary() {
        for i in 0..8 {
            let t = tetrablock_unitary(9, i, 6).triple;
            for x in t.joint_spectrum().unwrap() {
                assert!(tetrablock_boundary(&x, 1e-8).on_boundary);
            }
        }
    }
}
