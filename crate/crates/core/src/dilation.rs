//! Schäffer-type tetrablock isometric dilation on the truncated space
//! `K = H ⊕ D ⊕ ... ⊕ D` (`depth` copies of the defect space `D`), and the
//! truncated multiplication-operator model of a pure tetrablock isometry.
//!
//! Level `k` (1-based) of the defect part starts at row `n + (k - 1) r`.
//! The blocks are
//!
//! ```text
//! V3 = [ P   0  0 ...]    V1 = [ A       0    0  ...]    V2: as V1 with
//!      [ Dh  0  0 ...]         [ F2* Dh  F1   0  ...]        F1 and F2
//!      [ 0   I  0 ...]         [ 0       F2*  F1 ...]        exchanged
//!      [ 0   0  I ...]         [ 0       0    F2* ..]
//! ```
//!
//! where `Dh` is `D_P` as a map from `H` into defect coordinates. Outflow from
//! the deepest level is dropped, so products of at most `depth - 1` factors
//! are exact and every identity check is restricted to levels below the
//! deepest one.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, hermitian_eigen, orthonormal_span, CMatrix};
use crate::tetra::{FundamentalPair, OperatorTriple};

/// Identity residual bound for conditionsOK, relative to `(1 + ‖F1‖ + ‖F2‖)²`.
pub const CONDITIONS_TOL: f64 = 1e-8;
/// Default depth for identity checks.
pub const DEFAULT_DEPTH: usize = 8;

#[derive(Clone, Debug)]
pub struct DilationModel {
    pub h_dim: usize,
    pub defect_rank: usize,
    pub depth: usize,
    pub v1: CMatrix,
    pub v2: CMatrix,
    pub v3: CMatrix,
    pub f1: CMatrix,
    pub f2: CMatrix,
    /// `D_P` from `H` into defect coordinates (`rank × n`).
    pub dh: CMatrix,
    pub conditions_ok: bool,
    /// `‖[F1, F2]‖`.
    pub commutator_residual: f64,
    /// `‖[F1, F1*] - [F2, F2*]‖`.
    pub normal_difference: f64,
}

impl DilationModel {
    pub fn dim(&self) -> usize {
        self.h_dim + self.depth * self.defect_rank
    }

    /// Dimension of `H` plus all levels but the deepest.
    pub fn inner_dim(&self) -> usize {
        self.h_dim + self.depth.saturating_sub(1) * self.defect_rank
    }

    fn level(&self, k: usize) -> usize {
        self.h_dim + (k - 1) * self.defect_rank
    }

    /// The compressions of `V1, V2, V3` to `H`.
    pub fn h_triple(&self) -> Result<OperatorTriple> {
        let n = self.h_dim;
        OperatorTriple::new(
            self.v1.block(0, 0, n, n),
            self.v2.block(0, 0, n, n),
            self.v3.block(0, 0, n, n),
        )
    }
}

fn condition_residuals(f1: &CMatrix, f2: &CMatrix) -> (f64, f64, bool) {
    let c = commutator(f1, f2).norm();
    let d = (commutator(f1, &f1.adjoint()) - commutator(f2, &f2.adjoint())).norm();
    let scale = 1.0 + f1.norm() + f2.norm();
    let bound = CONDITIONS_TOL * scale * scale;
    (c, d, c <= bound && d <= bound)
}

/// Assembles the block operators from `(A, B, P)`, `F1`, `F2` and `Dh`.
pub fn assemble(t: &OperatorTriple, f1: &CMatrix, f2: &CMatrix, dh: &CMatrix, depth: usize) -> Result<DilationModel> {
    if depth == 0 {
        return Err(Error::BadDepth);
    }
    let n = t.dim();
    let r = dh.rows();
    if f1.rows() != r || f2.rows() != r || dh.cols() != n {
        return Err(Error::BadShape(format!(
            "fundamental operators {}x{}, defect map {}x{} for H of dimension {n}",
            f1.rows(),
            f1.cols(),
            dh.rows(),
            dh.cols()
        )));
    }
    let dim = n + depth * r;
    let mut v1 = CMatrix::zeros(dim, dim);
    let mut v2 = CMatrix::zeros(dim, dim);
    let mut v3 = CMatrix::zeros(dim, dim);
    v1.set_block(0, 0, &t.a);
    v2.set_block(0, 0, &t.b);
    v3.set_block(0, 0, &t.p);
    if r > 0 {
        let (f1a, f2a) = (f1.adjoint(), f2.adjoint());
        v1.set_block(n, 0, &(&f2a * dh));
        v2.set_block(n, 0, &(&f1a * dh));
        v3.set_block(n, 0, dh);
        let id = CMatrix::identity(r);
        for k in 0..depth {
            let o = n + k * r;
            v1.set_block(o, o, f1);
            v2.set_block(o, o, f2);
            if k + 1 < depth {
                v1.set_block(o + r, o, &f2a);
                v2.set_block(o + r, o, &f1a);
                v3.set_block(o + r, o, &id);
            }
        }
    }
    let (commutator_residual, normal_difference, conditions_ok) = condition_residuals(f1, f2);
    Ok(DilationModel {
        h_dim: n,
        defect_rank: r,
        depth,
        v1,
        v2,
        v3,
        f1: f1.clone(),
        f2: f2.clone(),
        dh: dh.clone(),
        conditions_ok,
        commutator_residual,
        normal_difference,
    })
}

/// Builds the model for `t` from its fundamental pair. Always returns the
/// model; `conditions_ok` records whether the commutativity hypotheses of
/// the construction hold, and callers decide whether to refuse.
pub fn build_dilation(t: &OperatorTriple, fp: &FundamentalPair, depth: usize) -> Result<DilationModel> {
    if depth == 0 {
        return Err(Error::BadDepth);
    }
    let bound = crate::gamma::RESIDUAL_TOL * t.scale();
    let residual = fp.residual1.max(fp.residual2);
    if residual > bound {
        return Err(Error::ResidualTooLarge {
            context: "fundamental pair".into(),
            residual,
            bound,
        });
    }
    assemble(t, &fp.f1, &fp.f2, &fp.dd.to_defect(), depth)
}

/// `max ‖Π_H V1^{k1} V2^{k2} V3^{k3}|_H - A^{k1} B^{k2} P^{k3}‖` over
/// `k1 + k2 + k3 ≤ max_degree`.
#[allow(clippy::needless_range_loop)]
pub fn verify_moments(m: &DilationModel, t: &OperatorTriple, max_degree: usize) -> Result<f64> {
    if max_degree + 1 > m.depth {
        return Err(Error::DepthTooShallow {
            depth: m.depth,
            degree: max_degree,
        });
    }
    let n = m.h_dim;
    let d = max_degree;
    let embed_h = CMatrix::from_fn(m.dim(), n, |i, j| if i == j { 1.0.into() } else { 0.0.into() });
    let pw = |x: &CMatrix| {
        let mut v = vec![CMatrix::identity(n)];
        for k in 1..=d {
            let next = &v[k - 1] * x;
            v.push(next);
        }
        v
    };
    let (pa, pb, pp) = (pw(&t.a), pw(&t.b), pw(&t.p));
    let mut worst = 0.0f64;
    let mut x3 = embed_h;
    for k3 in 0..=d {
        let mut x2 = x3.clone();
        for k2 in 0..=d - k3 {
            let mut x1 = x2.clone();
            for k1 in 0..=d - k3 - k2 {
                let got = x1.block(0, 0, n, n);
                let want = &pa[k1] * &pb[k2] * &pp[k3];
                worst = worst.max((got - want).norm());
                x1 = &m.v1 * &x1;
            }
            x2 = &m.v2 * &x2;
        }
        x3 = &m.v3 * &x3;
    }
    Ok(worst)
}

/// Residuals of the model identities: commutators and `V1 = V2*V3` on the
/// levels below the deepest, the isometry defect of `V3` there, and the
/// three conditions on `F1, F2`.
pub fn verify_model_identities(m: &DilationModel) -> BTreeMap<String, f64> {
    let k = m.inner_dim();
    let inner = |x: &CMatrix| x.block(0, 0, k, k).norm();
    let cols = |x: &CMatrix| x.columns(0, k).norm();
    let (v1, v2, v3) = (&m.v1, &m.v2, &m.v3);
    let mut out = BTreeMap::new();
    out.insert("commutatorV1V2".into(), inner(&commutator(v1, v2)));
    out.insert("commutatorV1V3".into(), inner(&commutator(v1, v3)));
    out.insert("commutatorV2V3".into(), inner(&commutator(v2, v3)));
    out.insert("relationV1".into(), cols(&(v1 - v2.adjoint() * v3)));
    out.insert("relationV2".into(), cols(&(v2 - v1.adjoint() * v3)));
    out.insert(
        "isometryV3".into(),
        cols(&(v3.adjoint() * v3 - CMatrix::identity(m.dim()))),
    );
    let (f1, f2, dh) = (&m.f1, &m.f2, &m.dh);
    out.insert("commutatorF1F2".into(), commutator(f1, f2).norm());
    out.insert(
        "normalityF".into(),
        (f2.adjoint() * f2 + f1 * f1.adjoint() - f1.adjoint() * f1 - f2 * f2.adjoint()).norm(),
    );
    if m.h_dim > 0 && m.defect_rank > 0 {
        let t = m.h_triple_unchecked();
        let third =
            f1.adjoint() * dh * &t.a + f2 * f2.adjoint() * dh - f2.adjoint() * dh * &t.b - f1 * f1.adjoint() * dh;
        out.insert("thirdIdentity".into(), third.norm());
    } else {
        out.insert("thirdIdentity".into(), 0.0);
    }
    out
}

impl DilationModel {
    fn h_triple_unchecked(&self) -> OperatorTriple {
        let n = self.h_dim;
        OperatorTriple {
            a: self.v1.block(0, 0, n, n),
            b: self.v2.block(0, 0, n, n),
            p: self.v3.block(0, 0, n, n),
            residuals: [0.0; 3],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RecoveredPair {
    #[serde(rename = "F1")]
    pub f1: CMatrix,
    #[serde(rename = "F2")]
    pub f2: CMatrix,
    /// `‖F2* Dh P + F1 Dh - Dh A‖` and `‖F1* Dh P + F2 Dh - Dh B‖`.
    pub equation_residuals: [f64; 2],
    /// Distance to the directly solved pair, compared in `H` coordinates.
    pub agreement: Option<f64>,
}

/// Reads `F1, F2` back from the block structure, checks the two equations
/// they must satisfy, and compares with `direct` when given. The comparison
/// is basis-free: both pairs are embedded into `H` through the isometry
/// `Dh* (Dh Dh*)^{-1/2}` (model) and the defect basis (direct).
pub fn recover_fundamental_from_dilation(
    m: &DilationModel,
    t: &OperatorTriple,
    direct: Option<&FundamentalPair>,
) -> Result<RecoveredPair> {
    let (n, r) = (m.h_dim, m.defect_rank);
    if r == 0 {
        let z = CMatrix::zeros(0, 0);
        return Ok(RecoveredPair {
            f1: z.clone(),
            f2: z,
            equation_residuals: [0.0, 0.0],
            agreement: direct.map(|_| 0.0),
        });
    }
    let l1 = m.level(1);
    let f1 = m.v1.block(l1, l1, r, r);
    let f2 = m.v2.block(l1, l1, r, r);
    let dh = m.v3.block(l1, 0, r, n);
    let scale = 1.0 + f1.norm() + f2.norm() + dh.norm();
    let tol = 1e-12 * scale * scale;
    let mismatch = |what: &str, x: CMatrix| -> Result<()> {
        let v = x.norm();
        if v > tol {
            Err(Error::BlockStructureMismatch(format!("{what}: residual {v:e}")))
        } else {
            Ok(())
        }
    };
    mismatch("V1 first column", m.v1.block(l1, 0, r, n) - f2.adjoint() * &dh)?;
    mismatch("V2 first column", m.v2.block(l1, 0, r, n) - f1.adjoint() * &dh)?;
    for k in 2..=m.depth {
        let (o, prev) = (m.level(k), m.level(k - 1));
        mismatch("V1 diagonal", m.v1.block(o, o, r, r) - &f1)?;
        mismatch("V2 diagonal", m.v2.block(o, o, r, r) - &f2)?;
        mismatch("V1 subdiagonal", m.v1.block(o, prev, r, r) - f2.adjoint())?;
        mismatch("V2 subdiagonal", m.v2.block(o, prev, r, r) - f1.adjoint())?;
        mismatch("V3 subdiagonal", m.v3.block(o, prev, r, r) - CMatrix::identity(r))?;
    }
    let e1 = (f2.adjoint() * &dh * &t.p + &f1 * &dh - &dh * &t.a).norm();
    let e2 = (f1.adjoint() * &dh * &t.p + &f2 * &dh - &dh * &t.b).norm();

    let agreement = direct.map(|fp| {
        let q = model_basis(&dh);
        let emb = |x: &CMatrix| &q * x * q.adjoint();
        (emb(&f1) - fp.dd.embed(&fp.f1))
            .norm()
            .max((emb(&f2) - fp.dd.embed(&fp.f2)).norm())
    });
    Ok(RecoveredPair {
        f1,
        f2,
        equation_residuals: [e1, e2],
        agreement,
    })
}

/// `Dh* (Dh Dh*)^{-1/2}`: orthonormal columns in `H` matching the defect
/// coordinates of the model.
fn model_basis(dh: &CMatrix) -> CMatrix {
    let g = dh * dh.adjoint();
    let (vals, vecs) = hermitian_eigen(&g);
    let inv: Vec<f64> = vals.iter().map(|v| 1.0 / v.max(1e-300).sqrt()).collect();
    let root_inv = &vecs * CMatrix::from_real_diag(&inv) * vecs.adjoint();
    dh.adjoint() * root_inv
}

/// Lower bidiagonal block of `V1` acting on the defect levels.
pub fn e1_block(m: &DilationModel) -> CMatrix {
    let o = m.h_dim;
    let k = m.depth * m.defect_rank;
    m.v1.block(o, o, k, k)
}

/// `max(r(A), r(F1))` and `max(r(B), r(F2))`: the spectra of the block
/// lower-triangular `V1`, `V2` are the unions of their diagonal blocks.
pub fn block_spectral_radii(m: &DilationModel) -> (f64, f64) {
    use crate::linalg::spectral_radius;
    let n = m.h_dim;
    let r = |x: &CMatrix| if x.rows() == 0 { 0.0 } else { spectral_radius(x) };
    let r1 = r(&m.v1.block(0, 0, n, n)).max(r(&m.f1));
    let r2 = r(&m.v2.block(0, 0, n, n)).max(r(&m.f2));
    (r1, r2)
}

/// Rank of `span{V3^k h : h ∈ H, k ≤ depth}` against the model dimension.
pub fn minimality_rank(m: &DilationModel) -> (usize, usize) {
    let n = m.h_dim;
    let mut x = CMatrix::from_fn(m.dim(), n, |i, j| if i == j { 1.0.into() } else { 0.0.into() });
    let mut parts = vec![x.clone()];
    for _ in 0..m.depth {
        x = &m.v3 * &x;
        parts.push(x.clone());
    }
    let refs: Vec<&CMatrix> = parts.iter().collect();
    let span = orthonormal_span(&CMatrix::hstack(&refs), 1e-10, 1e-12);
    (span.cols(), m.dim())
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    #[serde(rename = "H_dim")]
    h_dim: usize,
    #[serde(rename = "defectRank")]
    defect_rank: usize,
    depth: usize,
    #[serde(rename = "V1")]
    v1: CMatrix,
    #[serde(rename = "V2")]
    v2: CMatrix,
    #[serde(rename = "V3")]
    v3: CMatrix,
    #[serde(rename = "F1")]
    f1: CMatrix,
    #[serde(rename = "F2")]
    f2: CMatrix,
    #[serde(rename = "conditionsOK", default)]
    conditions_ok: bool,
    #[serde(rename = "conditionResiduals", default)]
    condition_residuals: BTreeMap<String, f64>,
}

impl Serialize for DilationModel {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ModelJson {
            h_dim: self.h_dim,
            defect_rank: self.defect_rank,
            depth: self.depth,
            v1: self.v1.clone(),
            v2: self.v2.clone(),
            v3: self.v3.clone(),
            f1: self.f1.clone(),
            f2: self.f2.clone(),
            conditions_ok: self.conditions_ok,
            condition_residuals: BTreeMap::from([
                ("commutator".to_string(), self.commutator_residual),
                ("normalDifference".to_string(), self.normal_difference),
            ]),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DilationModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ModelJson::deserialize(d)?;
        let dim = j.h_dim + j.depth * j.defect_rank;
        for (name, v) in [("V1", &j.v1), ("V2", &j.v2), ("V3", &j.v3)] {
            if v.rows() != dim || v.cols() != dim {
                return Err(D::Error::custom(format!("{name} must be {dim}x{dim}")));
            }
        }
        let r = j.defect_rank;
        if j.depth == 0 || j.f1.rows() != r || j.f1.cols() != r || j.f2.rows() != r || j.f2.cols() != r {
            return Err(D::Error::custom("F1, F2 must be defectRank square and depth positive"));
        }
        let dh = j.v3.block(j.h_dim, 0, r, j.h_dim);
        let (c, nd, ok) = condition_residuals(&j.f1, &j.f2);
        Ok(DilationModel {
            h_dim: j.h_dim,
            defect_rank: r,
            depth: j.depth,
            v1: j.v1,
            v2: j.v2,
            v3: j.v3,
            f1: j.f1,
            f2: j.f2,
            dh,
            conditions_ok: ok,
            commutator_residual: c,
            normal_difference: nd,
        })
    }
}

/// Coefficients of a pure tetrablock isometry model on `⊕_{k<depth} E`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsometryModelSpec {
    pub tau1: CMatrix,
    pub tau2: CMatrix,
    pub depth: usize,
}

/// `sup_{|z|=1} ‖x + y z‖` on a 256-point grid.
fn circle_sup(x: &CMatrix, y: &CMatrix) -> f64 {
    (0..256)
        .map(|k| (x + y.scale(crate::linalg::C64::from_polar(1.0, TAU * k as f64 / 256.0))).norm())
        .fold(0.0, f64::max)
}

/// Checks the model hypotheses: `‖τ1 + τ2 z‖ ≤ 1` and `‖τ2 + τ1* z‖ ≤ 1` on
/// the circle, `[τ1, τ2] = 0`, `[τ1, τ1*] = [τ2, τ2*]`. Returns the
/// residuals by name.
pub fn isometry_spec_residuals(spec: &IsometryModelSpec) -> BTreeMap<String, f64> {
    let (t1, t2) = (&spec.tau1, &spec.tau2);
    BTreeMap::from([
        ("hInfinity".to_string(), circle_sup(t1, t2)),
        ("hInfinityPhi2".to_string(), circle_sup(t2, &t1.adjoint())),
        ("commutator".to_string(), commutator(t1, t2).norm()),
        (
            "normalDifference".to_string(),
            (commutator(t1, &t1.adjoint()) - commutator(t2, &t2.adjoint())).norm(),
        ),
    ])
}

/// Truncated multiplication operators: `V3` the level shift, `V1` with `τ1`
/// on the diagonal and `τ2*` below it (symbol `τ1 + τ2* z`), `V2` with `τ2`
/// and `τ1*` (symbol `τ2 + τ1* z`).
pub fn build_pure_isometry_model(spec: &IsometryModelSpec) -> Result<OperatorTriple> {
    if spec.depth == 0 {
        return Err(Error::BadDepth);
    }
    let e = spec.tau1.rows();
    if !spec.tau1.is_square() || spec.tau2.rows() != e || spec.tau2.cols() != e {
        return Err(Error::BadShape("tau1, tau2 must be square of equal size".into()));
    }
    let res = isometry_spec_residuals(spec);
    let scale = 1.0 + spec.tau1.norm() + spec.tau2.norm();
    let tol = CONDITIONS_TOL * scale * scale;
    for (name, bound) in [
        ("hInfinity", 1.0 + tol),
        ("hInfinityPhi2", 1.0 + tol),
        ("commutator", tol),
        ("normalDifference", tol),
    ] {
        if res[name] > bound {
            return Err(Error::SpecInvariantViolated(format!(
                "{name} = {} exceeds {bound}",
                res[name]
            )));
        }
    }
    let dim = spec.depth * e;
    let mut v1 = CMatrix::zeros(dim, dim);
    let mut v2 = CMatrix::zeros(dim, dim);
    let mut v3 = CMatrix::zeros(dim, dim);
    let (t1a, t2a) = (spec.tau1.adjoint(), spec.tau2.adjoint());
    for k in 0..spec.depth {
        let o = k * e;
        v1.set_block(o, o, &spec.tau1);
        v2.set_block(o, o, &spec.tau2);
        if k + 1 < spec.depth {
            v1.set_block(o + e, o, &t2a);
            v2.set_block(o + e, o, &t1a);
            v3.set_block(o + e, o, &CMatrix::identity(e));
        }
    }
    OperatorTriple::new(v1, v2, v3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_tetrablock_isometry_on, wold_split, TripleKind};
    use crate::tetra::fundamental_pair;
    use approx::assert_abs_diff_eq;

    fn model(t: &OperatorTriple, depth: usize) -> DilationModel {
        build_dilation(t, &fundamental_pair(t).unwrap(), depth).unwrap()
    }

    #[test]
    fn scalar_model_blocks() {
        let t = OperatorTriple::real_scalar(0.5, 0.5, 0.25);
        let m = model(&t, 4);
        assert_eq!(m.v1.rows(), 5);
        let d = 15f64.sqrt() / 4.0;
        assert_abs_diff_eq!(m.v3.get(0, 0).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.v3.get(1, 0).norm(), d, epsilon = 1e-14);
        assert_abs_diff_eq!(m.v1.get(0, 0).re, 0.5, epsilon = 1e-15);
        // Basis sign conventions cancel in F2* Dh: compare moduli.
        assert_abs_diff_eq!(m.v1.get(1, 0).norm(), 0.4 * d, epsilon = 1e-14);
        assert_abs_diff_eq!(m.v1.get(1, 1).re, 0.4, epsilon = 1e-14);
        assert_abs_diff_eq!(m.v1.get(2, 1).re, 0.4, epsilon = 1e-14);
        assert!(m.conditions_ok);
        for k in 2..5 {
            assert_eq!(m.v1.get(k, 0).norm(), 0.0);
        }
    }

    #[test]
    fn moments_and_identities() {
        let t = OperatorTriple::real_scalar(0.5, 0.5, 0.25);
        let m = model(&t, 5);
        assert!(verify_moments(&m, &t, 4).unwrap() < 1e-12);
        assert!(matches!(verify_moments(&m, &t, 5), Err(Error::DepthTooShallow { .. })));
        let ids = verify_model_identities(&m);
        assert!(ids.values().all(|&v| v < 1e-12), "{ids:?}");
        let rec = recover_fundamental_from_dilation(&m, &t, Some(&fundamental_pair(&t).unwrap())).unwrap();
        assert_abs_diff_eq!(rec.f1.get(0, 0).re, 0.4, epsilon = 1e-12);
        assert!(rec.agreement.unwrap() < 1e-12);
        assert!(rec.equation_residuals.iter().all(|&v| v < 1e-12));
        assert_eq!(minimality_rank(&m), (6, 6));
    }

    #[test]
    fn zero_triple_model() {
        let t = OperatorTriple::zero(2);
        let m = model(&t, 3);
        assert_eq!(m.v1, CMatrix::zeros(8, 8));
        assert!(verify_moments(&m, &t, 2).unwrap() == 0.0);
        assert!(verify_model_identities(&m).values().all(|&v| v == 0.0));
        let rec = recover_fundamental_from_dilation(&m, &t, None).unwrap();
        assert_eq!(rec.f1, CMatrix::zeros(2, 2));
    }

    #[test]
    fn swapped_fundamental_operators_break_the_relation() {
        let t = OperatorTriple::real_scalar(0.5, 0.25, 0.125);
        let fp = fundamental_pair(&t).unwrap();
        assert_abs_diff_eq!(fp.f1.get(0, 0).re, 10.0 / 21.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fp.f2.get(0, 0).re, 4.0 / 21.0, epsilon = 1e-12);
        let m = assemble(&t, &fp.f2, &fp.f1, &fp.dd.to_defect(), 6).unwrap();
        let ids = verify_model_identities(&m);
        assert!(ids["relationV1"] > 1e-3);
    }

    #[test]
    fn unitary_p_gives_the_triple_itself() {
        let t = OperatorTriple::real_scalar(1.0, 1.0, 1.0);
        let m = model(&t, 3);
        assert_eq!(m.dim(), 1);
        assert_eq!(m.v3, t.p);
    }

    #[test]
    fn model_json_round_trip() {
        let t = OperatorTriple::real_scalar(0.5, 0.5, 0.25);
        let m = model(&t, 5);
        let s = serde_json::to_string(&m).unwrap();
        let back: DilationModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back.v1, m.v1);
        assert_eq!(back.dh, m.dh);
        assert!(back.conditions_ok);
    }

    #[test]
    fn pure_isometry_models() {
        let z = CMatrix::zeros(1, 1);
        let t = build_pure_isometry_model(&IsometryModelSpec {
            tau1: z.clone(),
            tau2: z,
            depth: 4,
        })
        .unwrap();
        assert_eq!(t.a, CMatrix::zeros(4, 4));

        let c = CMatrix::scalar(0.4.into());
        let spec = IsometryModelSpec {
            tau1: c.clone(),
            tau2: c,
            depth: 6,
        };
        assert_abs_diff_eq!(isometry_spec_residuals(&spec)["hInfinity"], 0.8, epsilon = 1e-12);
        let t = build_pure_isometry_model(&spec).unwrap();
        let cls = is_tetrablock_isometry_on(&t, 5).unwrap();
        assert_eq!(cls.kind, TripleKind::TetrablockIsometry);
        assert!(cls.criteria.values().all(|&b| b));
        let w = wold_split(&t, 1).unwrap();
        assert_eq!(w.basis_u.cols(), 0);

        let c = CMatrix::scalar(0.9.into());
        assert!(matches!(
            build_pure_isometry_model(&IsometryModelSpec {
                tau1: c.clone(),
                tau2: c,
                depth: 6
            }),
            Err(Error::SpecInvariantViolated(_))
        ));
    }
}
