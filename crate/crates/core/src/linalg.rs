//! Dense complex linear algebra kernel.
//!
//! [`CMatrix`] is the single operator representation used across the crate.
//! The heavy lifting (SVD, Hermitian eigensolver, Schur form) is delegated to
//! `nalgebra`; this module adds the operator-theoretic quantities built on top
//! of it: numerical radius, defect operators and joint eigenvalues of
//! commuting tuples.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Default grid used by [`numerical_radius`].
pub const THETA_GRID: usize = 512;

/// Mixed absolute/relative tolerance: `|a - b| <= atol + rtol * max(|a|, |b|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-10,
            rtol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.atol + self.rtol * a.abs().max(b.abs())
    }

    pub fn close_c(&self, a: C64, b: C64) -> bool {
        (a - b).norm() <= self.atol + self.rtol * a.norm().max(b.norm())
    }
}

/// Dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix(DMatrix<C64>);

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::BadShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        CMatrix::new(r, c, entries)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMatrix(DMatrix::identity(n, n))
    }

    pub fn scalar(z: C64) -> Self {
        CMatrix(DMatrix::from_element(1, 1, z))
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { ZERO })
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let n = d.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(d[i], 0.0) } else { ZERO })
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.0[(i, j)] = z;
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    pub fn scale(&self, z: C64) -> CMatrix {
        CMatrix(&self.0 * z)
    }

    pub fn scale_re(&self, x: f64) -> CMatrix {
        self.scale(C64::new(x, 0.0))
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        operator_norm(self)
    }

    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        CMatrix((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMatrix {
        CMatrix(self.0.view((r0, c0), (nr, nc)).into_owned())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        self.0.view_mut((r0, c0), (b.rows(), b.cols())).copy_from(&b.0);
    }

    pub fn columns(&self, c0: usize, nc: usize) -> CMatrix {
        self.block(0, c0, self.rows(), nc)
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        let mut out = CMatrix::identity(self.rows());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Horizontal concatenation.
    pub fn hstack(parts: &[&CMatrix]) -> CMatrix {
        let rows = parts.first().map_or(0, |m| m.rows());
        let cols = parts.iter().map(|m| m.cols()).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut c = 0;
        for m in parts {
            out.set_block(0, c, m);
            c += m.cols();
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&CMatrix]) -> CMatrix {
        let rows = parts.iter().map(|m| m.rows()).sum();
        let cols = parts.iter().map(|m| m.cols()).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.set_block(r, c, m);
            r += m.rows();
            c += m.cols();
        }
        out
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: &CMatrix) -> CMatrix {
                CMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: CMatrix) -> CMatrix {
                CMatrix(self.0 $op rhs.0)
            }
        }
        impl $tr<&CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: &CMatrix) -> CMatrix {
                CMatrix(self.0 $op &rhs.0)
            }
        }
        impl $tr<CMatrix> for &CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: CMatrix) -> CMatrix {
                CMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let part = |f: fn(&C64) -> f64| {
            (0..self.rows())
                .map(|i| (0..self.cols()).map(|j| f(&self.0[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let m = MatrixJson::deserialize(d)?;
        let shape_ok = |parts: &Vec<Vec<f64>>| parts.len() == m.rows && parts.iter().all(|row| row.len() == m.cols);
        if !shape_ok(&m.re) || !shape_ok(&m.im) {
            return Err(D::Error::custom(format!(
                "matrix arrays do not match declared shape {}x{}",
                m.rows, m.cols
            )));
        }
        let entries =
            m.re.iter()
                .zip(&m.im)
                .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| C64::new(a, b)))
                .collect();
        CMatrix::new(m.rows, m.cols, entries).map_err(D::Error::custom)
    }
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    if m.rows() == 1 || m.cols() == 1 {
        return m.fro_norm();
    }
    m.0.clone().singular_values().max()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.0.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a square matrix (complex Schur form).
pub fn eigenvalues(m: &CMatrix) -> Vec<C64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    if m.rows() == 0 {
        return Vec::new();
    }
    let (_, t) = schur(m);
    t.diagonal()
}

/// Complex Schur decomposition `M = Q T Q*` with `T` upper triangular.
pub fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    let (q, t) = m.0.clone().schur().unpack();
    (CMatrix(q), CMatrix(t))
}

pub fn spectral_radius(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending. Only the
/// Hermitian part of the input is used.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.rows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = h.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    if h.rows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = h.hermitian_part().0.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h).first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eigenvalue(h: &CMatrix) -> f64 {
    hermitian_eigenvalues(h).last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// `XY - YX`.
pub fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// `‖MM* - M*M‖`.
pub fn normality_residual(m: &CMatrix) -> f64 {
    commutator(m, &m.adjoint()).norm()
}

/// `‖M*M - I‖`.
pub fn isometry_defect(m: &CMatrix) -> f64 {
    (m.adjoint() * m - CMatrix::identity(m.cols())).norm()
}

/// Result of a numerical-radius computation. `value` is attained at `theta`,
/// so it is a certified lower bound for `w(M)`; the refinement makes it a
/// heuristic upper bound as well.
#[derive(Clone, Copy, Debug)]
pub struct NumericalRadius {
    pub value: f64,
    pub theta: f64,
}

/// `w(M) = max_θ λ_max(Re(e^{iθ} M))`.
pub fn numerical_radius(m: &CMatrix) -> f64 {
    numerical_radius_with(m, THETA_GRID).value
}

pub fn numerical_radius_with(m: &CMatrix, grid: usize) -> NumericalRadius {
    assert!(m.is_square(), "numerical radius of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return NumericalRadius { value: 0.0, theta: 0.0 };
    }
    if n == 1 {
        let z = m.get(0, 0);
        return NumericalRadius {
            value: z.norm(),
            theta: -z.arg(),
        };
    }
    // Re(e^{iθ}M) = cos θ · H - sin θ · K with H = Re M, K = Im M.
    let h = m.hermitian_part();
    let k = (m - m.adjoint()).scale(C64::new(0.0, -0.5));
    let f = |theta: f64| max_eigenvalue(&(h.scale_re(theta.cos()) - k.scale_re(theta.sin())));
    let grid = grid.max(8);
    let step = 2.0 * PI / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|i| f(i as f64 * step)).collect();
    // Refine around the three largest local maxima of the grid.
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&i| vals[i] >= vals[(i + grid - 1) % grid] && vals[i] >= vals[(i + 1) % grid])
        .collect();
    peaks.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut best_t = peaks.first().map_or(0.0, |&i| i as f64 * step);
    let mut best_v = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for &i in peaks.iter().take(3) {
        let t0 = i as f64 * step;
        let (t, v) = golden_max(&f, t0 - step, t0 + step, 1e-7);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    NumericalRadius {
        value: best_v.max(0.0),
        theta: best_t,
    }
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub(crate) fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub(crate) fn golden_min(f: &impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let (x, v) = golden_max(&|t| -f(t), a, b, xtol);
    (x, -v)
}

/// The defect operator `D_P = (I - P*P)^{1/2}` together with an orthonormal
/// basis of its range.
#[derive(Clone, Debug)]
pub struct DefectData {
    pub dp: CMatrix,
    /// `n × rank`, orthonormal columns spanning the range of `dp`.
    pub basis: CMatrix,
    pub rank: usize,
    pub clamp_tol: f64,
    /// Nonzero eigenvalues of `dp`, matching the columns of `basis`.
    pub sqrt_eigs: Vec<f64>,
}

pub fn default_clamp_tol(p: &CMatrix) -> f64 {
    let np = p.norm();
    1e-10 * (1.0 + np * np)
}

/// Builds [`DefectData`] for `P`. Eigenvalues of `I - P*P` in
/// `[-clamp_tol, clamp_tol]` are treated as zero: they are dropped from both
/// `dp` and the basis, so a single rank decision is shared downstream.
pub fn defect(p: &CMatrix, clamp_tol: f64) -> Result<DefectData> {
    if !p.is_square() {
        return Err(Error::BadShape(format!("defect of a {}x{} matrix", p.rows(), p.cols())));
    }
    let n = p.rows();
    let gram = CMatrix::identity(n) - p.adjoint() * p;
    let (vals, vecs) = hermitian_eigen(&gram);
    if let Some(&lo) = vals.first() {
        if lo < -clamp_tol {
            return Err(Error::NotAContraction { min_eig: lo });
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > clamp_tol).collect();
    let rank = keep.len();
    let basis = CMatrix::from_fn(n, rank, |r, c| vecs.get(r, keep[c]));
    let sqrt_eigs: Vec<f64> = keep.iter().map(|&i| vals[i].sqrt()).collect();
    let dtilde = CMatrix::from_real_diag(&sqrt_eigs);
    let dp = &basis * &dtilde * basis.adjoint();
    Ok(DefectData {
        dp,
        basis,
        rank,
        clamp_tol,
        sqrt_eigs,
    })
}

impl DefectData {
    pub fn dim(&self) -> usize {
        self.dp.rows()
    }

    /// `D_P` as a map from `H` onto the defect space, in basis coordinates
    /// (`rank × n`).
    pub fn to_defect(&self) -> CMatrix {
        CMatrix::from_real_diag(&self.sqrt_eigs) * self.basis.adjoint()
    }

    /// `Q X Q*`: a defect-space operator embedded in `H`.
    pub fn embed(&self, x: &CMatrix) -> CMatrix {
        &self.basis * x * self.basis.adjoint()
    }

    /// `Q* M Q`.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        self.basis.adjoint() * m * &self.basis
    }

    /// `D_P X D_P` for `X` on the defect space.
    pub fn sandwich(&self, x: &CMatrix) -> CMatrix {
        let d = self.to_defect();
        d.adjoint() * x * d
    }

    /// Pseudoinverse solve of `D_P X D_P = Σ` on the defect space.
    pub fn pinv_sandwich(&self, sigma: &CMatrix) -> CMatrix {
        let inv: Vec<f64> = self.sqrt_eigs.iter().map(|d| 1.0 / d).collect();
        let dinv = CMatrix::from_real_diag(&inv);
        &dinv * self.compress(sigma) * &dinv
    }
}

/// Orthonormal basis for the column span of `m`, dropping directions whose
/// singular value falls below `rel_tol · σ_max` (and below `abs_tol`).
pub fn orthonormal_span(m: &CMatrix, rel_tol: f64, abs_tol: f64) -> CMatrix {
    let n = m.rows();
    if m.cols() == 0 || n == 0 {
        return CMatrix::zeros(n, 0);
    }
    let svd = m.0.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let cut = (rel_tol * smax).max(abs_tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cut)
        .collect();
    CMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

/// Orthonormal basis for the orthogonal complement of the span of the
/// orthonormal columns `q`.
pub fn orthogonal_complement(q: &CMatrix) -> CMatrix {
    let n = q.rows();
    let proj = CMatrix::identity(n) - q * q.adjoint();
    let (vals, vecs) = hermitian_eigen(&proj);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
    CMatrix::from_fn(n, keep.len(), |r, c| vecs.get(r, keep[c]))
}

/// Basis of the (numerical) null space: right singular vectors with
/// singular value at most `tol`. Falls back to the weakest direction so the
/// result is never empty for a square input.
fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let n = m.cols();
    let svd = m.0.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let mut keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] <= tol).collect();
    if keep.is_empty() {
        let weakest = (0..sv.len()).min_by(|&a, &b| sv[a].total_cmp(&sv[b])).unwrap();
        keep.push(weakest);
    }
    CMatrix::from_fn(n, keep.len(), |r, c| v_t[(keep[c], r)].conj())
}

fn commute_check(ms: &[CMatrix], tol: f64) -> Result<()> {
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            let residual = commutator(&ms[i], &ms[j]).norm();
            let bound = tol * (1.0 + ms[i].norm() * ms[j].norm());
            if residual > bound {
                return Err(Error::NotCommuting { residual, bound });
            }
        }
    }
    Ok(())
}

fn lower_mass(t: &CMatrix) -> f64 {
    let n = t.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..i {
            s += t.get(i, j).norm_sqr();
        }
    }
    s.sqrt()
}

/// Worst relative off-triangular mass of `Q* M Q` over the tuple.
fn triangularity_gap(ms: &[CMatrix], q: &CMatrix) -> f64 {
    ms.iter()
        .map(|m| lower_mass(&(q.adjoint() * m * q)) / (1.0 + m.norm()))
        .fold(0.0, f64::max)
}

/// Common eigenvector deflation. Used when the randomized Schur route fails
/// (combinations with defective repeated eigenvalues).
fn deflation_triangularize(ms: &[CMatrix], tol: f64) -> CMatrix {
    let n = ms[0].rows();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if n == 1 {
        return CMatrix::identity(1);
    }
    let mut w = CMatrix::identity(n);
    for m in ms {
        if w.cols() <= 1 {
            break;
        }
        let restricted = w.adjoint() * m * &w;
        let lambda = eigenvalues(&restricted)[0];
        let shifted = &restricted - CMatrix::identity(restricted.rows()).scale(lambda);
        let cut = 1e-7 * (1.0 + restricted.norm());
        let ker = null_space(&shifted, cut.max(tol));
        w = orthonormal_span(&(&w * ker), 1e-12, 0.0);
        if w.cols() == 0 {
            break;
        }
    }
    let v = if w.cols() == 0 {
        CMatrix::from_fn(n, 1, |r, _| if r == 0 { ONE } else { ZERO })
    } else {
        w.columns(0, 1)
    };
    let rest = orthogonal_complement(&v);
    let sub: Vec<CMatrix> = ms.iter().map(|m| rest.adjoint() * m * &rest).collect();
    let q_sub = deflation_triangularize(&sub, tol);
    CMatrix::hstack(&[&v, &(&rest * q_sub)])
}

/// Simultaneous unitary upper-triangularization of commuting matrices:
/// returns `Q` with every `Q* M Q` upper triangular within `tol`.
pub fn simultaneous_triangularize(ms: &[CMatrix], tol: f64) -> Result<CMatrix> {
    let Some(first) = ms.first() else {
        return Ok(CMatrix::zeros(0, 0));
    };
    let n = first.rows();
    if ms.iter().any(|m| !m.is_square() || m.rows() != n) {
        return Err(Error::BadShape("joint eigenvalues need equal square matrices".into()));
    }
    commute_check(ms, tol)?;
    if n <= 1 {
        return Ok(CMatrix::identity(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e7a_b10c);
    let mut worst = f64::INFINITY;
    for _attempt in 0..5 {
        let mut comb = ms[0].clone();
        for m in &ms[1..] {
            let phase: f64 = rng.random_range(0.0..2.0 * PI);
            let weight: f64 = rng.random_range(0.5..1.5);
            comb = comb + m.scale(C64::from_polar(weight, phase));
        }
        let (q, _) = schur(&comb);
        let gap = triangularity_gap(ms, &q);
        if gap <= tol {
            return Ok(q);
        }
        worst = worst.min(gap);
    }
    let q = deflation_triangularize(ms, tol);
    let gap = triangularity_gap(ms, &q);
    if gap <= tol {
        return Ok(q);
    }
    Err(Error::TriangularizationFailed { mass: worst.min(gap) })
}

/// Joint eigenvalues of commuting square matrices: `n` tuples (with
/// multiplicity), the `i`-th tuple read off the `i`-th diagonal position of
/// the simultaneously triangularized inputs.
pub fn joint_eigenvalues(ms: &[CMatrix], tol: f64) -> Result<Vec<Vec<C64>>> {
    let q = simultaneous_triangularize(ms, tol)?;
    let diags: Vec<Vec<C64>> = ms.iter().map(|m| (q.adjoint() * m * &q).diagonal()).collect();
    let n = q.cols();
    Ok((0..n).map(|i| diags.iter().map(|d| d[i]).collect()).collect())
}
