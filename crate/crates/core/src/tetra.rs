//! Tetrablock contractions: the spectral-set battery, the ρ₁/ρ₂ positivity
//! conditions, the slice pairs `(A + zB, zP)`, the fundamental operators
//! `F₁, F₂` and the operator identities they satisfy.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::domains::{
    sample_tetrablock, tetrablock_membership, ComplexJson, Criterion, Point3, SampleMode, MEMBERSHIP_TOL,
};
use crate::error::{Error, Result};
use crate::gamma::{
    check_square_family, commute_residual, gamma_contraction_test, solve_fundamental_gamma, GammaConfig, OperatorPair,
    Verdict, COMMUTE_TOL, RESIDUAL_TOL, SPECTRUM_SLACK, SWEEP_THETA_GRID, W_SLACK,
};
use crate::linalg::{
    commutator, default_clamp_tol, defect, golden_max, golden_min, joint_eigenvalues, min_eigenvalue,
    normality_residual, numerical_radius_with, CMatrix, DefectData, C64,
};
use crate::random;

/// Unimodular points used for slice tests and numerical-radius sweeps.
pub const SLICE_GRID: usize = 32;

/// A commuting triple `(A, B, P)`.
#[derive(Clone, Debug)]
pub struct OperatorTriple {
    pub a: CMatrix,
    pub b: CMatrix,
    pub p: CMatrix,
    /// `‖[A,B]‖, ‖[A,P]‖, ‖[B,P]‖`.
    pub residuals: [f64; 3],
}

impl OperatorTriple {
    pub fn new(a: CMatrix, b: CMatrix, p: CMatrix) -> Result<Self> {
        Self::with_tol(a, b, p, COMMUTE_TOL)
    }

    pub fn with_tol(a: CMatrix, b: CMatrix, p: CMatrix, tol: f64) -> Result<Self> {
        check_square_family(&[&a, &b, &p])?;
        let residuals = [
            commute_residual(&a, &b, tol)?,
            commute_residual(&a, &p, tol)?,
            commute_residual(&b, &p, tol)?,
        ];
        Ok(OperatorTriple { a, b, p, residuals })
    }

    pub fn scalar(a: C64, b: C64, p: C64) -> Self {
        OperatorTriple {
            a: CMatrix::scalar(a),
            b: CMatrix::scalar(b),
            p: CMatrix::scalar(p),
            residuals: [0.0; 3],
        }
    }

    pub fn real_scalar(a: f64, b: f64, p: f64) -> Self {
        Self::scalar(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(p, 0.0))
    }

    pub fn zero(n: usize) -> Self {
        let z = CMatrix::zeros(n, n);
        OperatorTriple {
            a: z.clone(),
            b: z.clone(),
            p: z,
            residuals: [0.0; 3],
        }
    }

    /// Diagonal triple with the given joint eigenvalues.
    pub fn diagonal(points: &[Point3]) -> Self {
        let d = |f: fn(&Point3) -> C64| CMatrix::from_diag(&points.iter().map(f).collect::<Vec<_>>());
        OperatorTriple {
            a: d(|x| x.x1),
            b: d(|x| x.x2),
            p: d(|x| x.x3),
            residuals: [0.0; 3],
        }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.a, &self.b, &self.p]
    }

    /// `(A*, B*, P*)`.
    pub fn adjoint(&self) -> Self {
        OperatorTriple {
            a: self.a.adjoint(),
            b: self.b.adjoint(),
            p: self.p.adjoint(),
            residuals: self.residuals,
        }
    }

    /// `(W*AW, W*BW, W*PW)` for `W` with orthonormal columns.
    pub fn compress(&self, w: &CMatrix) -> Self {
        let c = |m: &CMatrix| w.adjoint() * m * w;
        let (a, b, p) = (c(&self.a), c(&self.b), c(&self.p));
        let residuals = [
            commutator(&a, &b).norm(),
            commutator(&a, &p).norm(),
            commutator(&b, &p).norm(),
        ];
        OperatorTriple { a, b, p, residuals }
    }

    /// `1 + ‖A‖ + ‖B‖ + ‖P‖`.
    pub fn scale(&self) -> f64 {
        1.0 + self.a.norm() + self.b.norm() + self.p.norm()
    }

    /// `A - B*P`.
    pub fn sigma1(&self) -> CMatrix {
        &self.a - self.b.adjoint() * &self.p
    }

    /// `B - A*P`.
    pub fn sigma2(&self) -> CMatrix {
        &self.b - self.a.adjoint() * &self.p
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let s = self.scale();
        self.components().iter().all(|m| normality_residual(m) <= tol * s * s)
    }

    pub fn joint_spectrum(&self) -> Result<Vec<Point3>> {
        let tuples = joint_eigenvalues(&[self.a.clone(), self.b.clone(), self.p.clone()], 1e-7)?;
        Ok(tuples.into_iter().map(|t| Point3::new(t[0], t[1], t[2])).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct TripleJson {
    #[serde(rename = "A")]
    a: CMatrix,
    #[serde(rename = "B")]
    b: CMatrix,
    #[serde(rename = "P")]
    p: CMatrix,
}

impl Serialize for OperatorTriple {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        TripleJson {
            a: self.a.clone(),
            b: self.b.clone(),
            p: self.p.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OperatorTriple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TripleJson::deserialize(d)?;
        OperatorTriple::new(j.a, j.b, j.p).map_err(serde::de::Error::custom)
    }
}

/// `ρ₁(A, zB, zP)` with `ρ₁(A, B, P) = I - P*P + (B*B - A*A) - 2 Re(B - A*P)`.
pub fn rho1(t: &OperatorTriple, z: C64) -> CMatrix {
    let (zb, zp) = (t.b.scale(z), t.p.scale(z));
    let n = t.dim();
    let re = &zb - t.a.adjoint() * &zp;
    CMatrix::identity(n) - zp.adjoint() * &zp + (zb.adjoint() * &zb - t.a.adjoint() * &t.a) - (&re + re.adjoint())
}

/// `ρ₂(zA, B, zP)` with `ρ₂(A, B, P) = I - P*P + (A*A - B*B) - 2 Re(A - B*P)`.
/// The rotation sits on `A`, mirroring [`rho1`]; on the circle `ρ₂(A, zB, zP)`
/// would not depend on `z`.
pub fn rho2(t: &OperatorTriple, z: C64) -> CMatrix {
    let (za, zp) = (t.a.scale(z), t.p.scale(z));
    let n = t.dim();
    let re = &za - t.b.adjoint() * &zp;
    CMatrix::identity(n) - zp.adjoint() * &zp + (za.adjoint() * &za - t.b.adjoint() * &t.b) - (&re + re.adjoint())
}

/// Closed-disc grid for ρ₁/ρ₂: 32 points on the circle, then 16 angles on
/// each of the radii 1/4, 1/2, 3/4.
pub fn rho_disc_grid() -> Vec<C64> {
    let mut zs: Vec<C64> = (0..32).map(|k| C64::from_polar(1.0, TAU * k as f64 / 32.0)).collect();
    for r in [0.25, 0.5, 0.75] {
        zs.extend((0..16).map(|k| C64::from_polar(r, TAU * k as f64 / 16.0)));
    }
    zs
}

pub fn unimodular_grid(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}

/// `min` over the disc grid of `λ_min ρ₁` and `λ_min ρ₂`, refined along the
/// circle at the worst boundary point. Returns `(value, z)`.
pub fn rho12_min(t: &OperatorTriple) -> (f64, C64) {
    if t.dim() == 0 {
        return (f64::INFINITY, C64::new(1.0, 0.0));
    }
    let f = |z: C64| min_eigenvalue(&rho1(t, z)).min(min_eigenvalue(&rho2(t, z)));
    let mut best = (f64::INFINITY, C64::new(1.0, 0.0));
    for z in rho_disc_grid() {
        let v = f(z);
        if v < best.0 {
            best = (v, z);
        }
    }
    let (r0, t0) = (best.1.norm(), best.1.arg());
    let step = TAU / if r0 > 0.99 { 32.0 } else { 16.0 };
    let (t1, v1) = golden_min(&|th| f(C64::from_polar(r0, th)), t0 - step, t0 + step, 1e-7);
    if v1 < best.0 {
        best = (v1, C64::from_polar(r0, t1));
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatteryConfig {
    pub max_deg: usize,
    pub n_polys: usize,
    pub sup_samples: usize,
    pub seed: u64,
    #[serde(default = "default_battery_tol")]
    pub tol: f64,
}

fn default_battery_tol() -> f64 {
    1e-9
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            max_deg: 4,
            n_polys: 64,
            sup_samples: 10_000,
            seed: 0,
            tol: default_battery_tol(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: [usize; 3],
    pub coefficient: ComplexJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailingWitness {
    /// A joint eigenvalue outside `Ē`.
    Point { point: Point3, margin: f64 },
    /// A disc point where ρ₁ or ρ₂ has a negative eigenvalue.
    Z { z: ComplexJson, min_eig: f64 },
    /// A polynomial with `‖f(A,B,P)‖ > sup_Ē |f|`.
    Polynomial { index: usize, terms: Vec<Term>, ratio: f64 },
    /// The operators themselves fail a norm bound.
    Norm { which: String, norm: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectralSetReport {
    pub verdict: Verdict,
    pub spectrum_in_e: bool,
    pub rho12_min_eig: f64,
    pub vn_worst_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_witness: Option<FailingWitness>,
}

fn monomial_exponents(max_deg: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for d in 0..=max_deg {
        for i in (0..=d).rev() {
            for j in (0..=d - i).rev() {
                out.push([i, j, d - i - j]);
            }
        }
    }
    out
}

fn monomials_at(x: &[C64; 3], exps: &[[usize; 3]], max_deg: usize) -> Vec<C64> {
    let pows: Vec<Vec<C64>> = x
        .iter()
        .map(|&c| {
            let mut v = vec![C64::new(1.0, 0.0); max_deg + 1];
            for k in 1..=max_deg {
                v[k] = v[k - 1] * c;
            }
            v
        })
        .collect();
    exps.iter()
        .map(|e| pows[0][e[0]] * pows[1][e[1]] * pows[2][e[2]])
        .collect()
}

fn dot(c: &[C64], m: &[C64]) -> C64 {
    c.iter().zip(m).map(|(a, b)| a * b).sum()
}

/// The sampled von Neumann battery. Polynomials and their sup-norm
/// estimates over `Ē` depend only on the configuration, so they are built
/// once and reused across triples.
pub struct SpectralBattery {
    pub config: BatteryConfig,
    exps: Vec<[usize; 3]>,
    polys: Vec<Vec<C64>>,
    sups: Vec<f64>,
}

impl SpectralBattery {
    pub fn new(config: BatteryConfig) -> Self {
        let exps = monomial_exponents(config.max_deg);
        let mut rng = random::stream(config.seed, u64::MAX);
        let mut polys: Vec<Vec<C64>> = Vec::with_capacity(config.n_polys + 3);
        // Coordinate functions: sup over Ē is exactly 1.
        for axis in 0..3 {
            let mut e = [0; 3];
            e[axis] = 1;
            if let Some(pos) = exps.iter().position(|x| *x == e) {
                let mut c = vec![C64::new(0.0, 0.0); exps.len()];
                c[pos] = C64::new(1.0, 0.0);
                polys.push(c);
            }
        }
        for _ in 0..config.n_polys {
            let c: Vec<C64> = (0..exps.len()).map(|_| random::complex_gaussian(&mut rng)).collect();
            let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            polys.push(c.iter().map(|z| z / norm).collect());
        }

        let interior = sample_tetrablock(config.sup_samples, SampleMode::Interior, config.seed);
        let boundary = sample_tetrablock(
            (config.sup_samples / 4).max(16),
            SampleMode::Boundary,
            config.seed ^ 0xb0,
        );
        let mut sups = vec![0.0f64; polys.len()];
        let mut best_b: Vec<(f64, Point3)> = vec![(-1.0, Point3::real(0.0, 0.0, 1.0)); polys.len()];
        for x in &interior {
            let m = monomials_at(&x.coords(), &exps, config.max_deg);
            for (k, c) in polys.iter().enumerate() {
                sups[k] = sups[k].max(dot(c, &m).norm());
            }
        }
        for x in &boundary {
            let m = monomials_at(&x.coords(), &exps, config.max_deg);
            for (k, c) in polys.iter().enumerate() {
                let v = dot(c, &m).norm();
                if v > best_b[k].0 {
                    best_b[k] = (v, *x);
                }
            }
        }
        let max_deg = config.max_deg;
        for (k, c) in polys.iter().enumerate() {
            let refined = refine_on_boundary(
                &|x: &Point3| dot(c, &monomials_at(&x.coords(), &exps, max_deg)).norm(),
                &best_b[k].1,
            );
            sups[k] = sups[k].max(best_b[k].0).max(refined);
        }
        // The coordinate functions peak at exactly 1 on bE.
        for s in sups.iter_mut().take(3) {
            *s = s.max(1.0);
        }
        SpectralBattery {
            config,
            exps,
            polys,
            sups,
        }
    }

    pub fn poly_count(&self) -> usize {
        self.polys.len()
    }

    pub fn sup_estimate(&self, k: usize) -> f64 {
        self.sups[k]
    }

    fn terms(&self, k: usize) -> Vec<Term> {
        self.exps
            .iter()
            .zip(&self.polys[k])
            .map(|(e, c)| Term {
                exponents: *e,
                coefficient: (*c).into(),
            })
            .collect()
    }

    /// Monomial matrices `A^i B^j P^k`, indexed like the polynomial basis.
    fn monomial_matrices(&self, t: &OperatorTriple) -> Vec<CMatrix> {
        let d = self.config.max_deg;
        let pw = |m: &CMatrix| {
            let mut v = vec![CMatrix::identity(m.rows())];
            for k in 1..=d {
                let next = &v[k - 1] * m;
                v.push(next);
            }
            v
        };
        let (pa, pb, pp) = (pw(&t.a), pw(&t.b), pw(&t.p));
        self.exps.iter().map(|e| &pa[e[0]] * &pb[e[1]] * &pp[e[2]]).collect()
    }

    /// Runs the three stages in order: joint spectrum in `Ē`, ρ₁/ρ₂ on the
    /// disc grid, sampled polynomial von Neumann inequality. Only normal
    /// triples with joint spectrum in `Ē` are certified.
    pub fn run(&self, t: &OperatorTriple) -> Result<SpectralSetReport> {
        let tol = self.config.tol;
        let scale = t.scale();
        let mut witness: Option<FailingWitness> = None;

        // (i) joint spectrum.
        let spectrum = t.joint_spectrum()?;
        let mut spectrum_in_e = true;
        let mut strictly_in = true;
        let mut own_points = Vec::new();
        for x in &spectrum {
            let v = tetrablock_membership(x, &Criterion::CLOSED_FORM, SPECTRUM_SLACK)?;
            let margin = v.per_criterion.values().map(|r| r.margin).fold(f64::INFINITY, f64::min);
            if !v.in_closed {
                spectrum_in_e = false;
                if witness.is_none() {
                    witness = Some(FailingWitness::Point { point: *x, margin });
                }
            }
            if margin >= -MEMBERSHIP_TOL {
                own_points.push(*x);
            } else {
                strictly_in = false;
            }
        }

        // (ii) ρ₁, ρ₂ on the disc grid.
        let (rho_min, rho_z) = rho12_min(t);
        if witness.is_none() && rho_min < -tol * scale * scale {
            witness = Some(FailingWitness::Z {
                z: rho_z.into(),
                min_eig: rho_min,
            });
        }

        // (iii) polynomial von Neumann inequality.
        let mats = self.monomial_matrices(t);
        let own_monos: Vec<Vec<C64>> = own_points
            .iter()
            .map(|x| monomials_at(&x.coords(), &self.exps, self.config.max_deg))
            .collect();
        let n = t.dim();
        let mut worst = (0.0f64, 0usize);
        for (k, c) in self.polys.iter().enumerate() {
            let mut f = CMatrix::zeros(n, n);
            for (ck, mk) in c.iter().zip(&mats) {
                if ck.norm() > 0.0 {
                    f = f + mk.scale(*ck);
                }
            }
            let own = own_monos.iter().map(|m| dot(c, m).norm()).fold(0.0, f64::max);
            let sup = self.sups[k].max(own);
            let ratio = if sup > 0.0 { f.norm() / sup } else { 0.0 };
            if ratio > worst.0 {
                worst = (ratio, k);
            }
        }
        if witness.is_none() && worst.0 > 1.0 + W_SLACK {
            witness = Some(FailingWitness::Polynomial {
                index: worst.1,
                terms: self.terms(worst.1),
                ratio: worst.0,
            });
        }

        let verdict = if witness.is_some() {
            Verdict::Refuted
        } else if strictly_in && t.is_normal(1e-8) {
            Verdict::Certified
        } else {
            Verdict::PassedBattery
        };
        Ok(SpectralSetReport {
            verdict,
            spectrum_in_e,
            rho12_min_eig: rho_min,
            vn_worst_ratio: worst.0,
            failing_witness: witness,
        })
    }
}

/// Local ascent of `f` along the distinguished-boundary parametrization
/// `(x̄₂x₃, x₂, x₃)`, `x₂ = r e^{iα}`, `x₃ = e^{iγ}`, started at `x`.
fn refine_on_boundary(f: &dyn Fn(&Point3) -> f64, x: &Point3) -> f64 {
    let point = |r: f64, al: f64, ga: f64| {
        let x2 = C64::from_polar(r, al);
        let x3 = C64::from_polar(1.0, ga);
        Point3::new(x2.conj() * x3, x2, x3)
    };
    let (mut r, mut al, mut ga) = (x.x2.norm().min(1.0), x.x2.arg(), x.x3.arg());
    let mut best = f(&point(r, al, ga));
    let mut w = 0.2;
    for _ in 0..4 {
        let (r1, v) = golden_max(&|s| f(&point(s, al, ga)), (r - w).max(0.0), (r + w).min(1.0), 1e-9);
        if v > best {
            best = v;
            r = r1;
        }
        let (a1, v) = golden_max(&|s| f(&point(r, s, ga)), al - w, al + w, 1e-9);
        if v > best {
            best = v;
            al = a1;
        }
        let (g1, v) = golden_max(&|s| f(&point(r, al, s)), ga - w, ga + w, 1e-9);
        if v > best {
            best = v;
            ga = g1;
        }
        w *= 0.5;
    }
    best
}

pub fn spectral_set_battery(t: &OperatorTriple, cfg: &BatteryConfig) -> Result<SpectralSetReport> {
    SpectralBattery::new(cfg.clone()).run(t)
}

/// `(A + zB, zP)`.
pub fn slice_pair(t: &OperatorTriple, z: C64) -> Result<OperatorPair> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular { modulus });
    }
    let s = &t.a + t.b.scale(z);
    let p = t.p.scale(z);
    let commutation_residual = commutator(&s, &p).norm();
    Ok(OperatorPair {
        s,
        p,
        commutation_residual,
    })
}

/// Solutions of `A - B*P = D_P F₁ D_P` and `B - A*P = D_P F₂ D_P` on the
/// defect basis.
#[derive(Clone, Debug)]
pub struct FundamentalPair {
    pub f1: CMatrix,
    pub f2: CMatrix,
    pub dd: DefectData,
    pub residual1: f64,
    pub residual2: f64,
    /// Gap to the circle-averaging route, compared in `H` coordinates.
    pub cross_route_gap: f64,
    /// `max_z w(F₁ + zF₂)` over the unimodular sweep grid.
    pub w_sweep_max: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FundamentalPairJson<'a> {
    #[serde(rename = "F1")]
    f1: &'a CMatrix,
    #[serde(rename = "F2")]
    f2: &'a CMatrix,
    basis: &'a CMatrix,
    defect_rank: usize,
    residual1: f64,
    residual2: f64,
    cross_route_gap: f64,
    w_sweep_max: f64,
}

impl Serialize for FundamentalPair {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        FundamentalPairJson {
            f1: &self.f1,
            f2: &self.f2,
            basis: &self.dd.basis,
            defect_rank: self.dd.rank,
            residual1: self.residual1,
            residual2: self.residual2,
            cross_route_gap: self.cross_route_gap,
            w_sweep_max: self.w_sweep_max,
        }
        .serialize(ser)
    }
}

/// `max_z w(F₁ + zF₂)` over `SLICE_GRID` unimodular points.
pub fn w_sweep(f1: &CMatrix, f2: &CMatrix) -> f64 {
    w_sweep_with(f1, f2, SWEEP_THETA_GRID)
}

/// As [`w_sweep`] with `theta_grid` angles per numerical radius.
pub fn w_sweep_with(f1: &CMatrix, f2: &CMatrix, theta_grid: usize) -> f64 {
    if f1.rows() == 0 {
        return 0.0;
    }
    unimodular_grid(SLICE_GRID)
        .into_iter()
        .map(|z| numerical_radius_with(&(f1 + f2.scale(z)), theta_grid).value)
        .fold(0.0, f64::max)
}

pub fn solve_fundamental_pair(t: &OperatorTriple, dd: &DefectData) -> Result<FundamentalPair> {
    let bound = RESIDUAL_TOL * t.scale();
    let (s1, s2) = (t.sigma1(), t.sigma2());
    let f1 = dd.pinv_sandwich(&s1);
    let f2 = dd.pinv_sandwich(&s2);
    let residual1 = (dd.sandwich(&f1) - &s1).norm();
    let residual2 = (dd.sandwich(&f2) - &s2).norm();
    for (residual, which) in [(residual1, "A - B*P = D_P F1 D_P"), (residual2, "B - A*P = D_P F2 D_P")] {
        if residual > bound {
            return Err(Error::ResidualTooLarge {
                context: which.into(),
                residual,
                bound,
            });
        }
    }

    // Averaging route: F(±1) from the slice pairs, each with its own defect
    // data (D_{±P} = D_P, so only the basis choice can differ).
    let mut slice_f = Vec::with_capacity(2);
    for z in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
        let pr = slice_pair(t, z)?;
        let ddz = defect(&pr.p, dd.clamp_tol)?;
        let f = solve_fundamental_gamma(&pr, &ddz)?;
        slice_f.push(ddz.embed(&f));
    }
    let avg1 = (&slice_f[0] + &slice_f[1]).scale_re(0.5);
    let avg2 = (&slice_f[0] - &slice_f[1]).scale_re(0.5);
    let cross_route_gap = (dd.embed(&f1) - avg1).norm().max((dd.embed(&f2) - avg2).norm());

    let w_sweep_max = w_sweep(&f1, &f2);
    Ok(FundamentalPair {
        f1,
        f2,
        dd: dd.clone(),
        residual1,
        residual2,
        cross_route_gap,
        w_sweep_max,
    })
}

/// Convenience: defect data with the default clamp tolerance, then solve.
pub fn fundamental_pair(t: &OperatorTriple) -> Result<FundamentalPair> {
    let dd = defect(&t.p, default_clamp_tol(&t.p))?;
    solve_fundamental_pair(t, &dd)
}

/// Residuals of `D_P A = X₁D_P + X₂*D_P P` and `D_P B = X₂D_P + X₁*D_P P`.
pub fn check_twoneweqns(t: &OperatorTriple, dd: &DefectData, x1: &CMatrix, x2: &CMatrix) -> (f64, f64) {
    let (e1, e2) = (dd.embed(x1), dd.embed(x2));
    let d = &dd.dp;
    let ra = (d * &t.a - (&e1 * d + e2.adjoint() * d * &t.p)).norm();
    let rb = (d * &t.b - (&e2 * d + e1.adjoint() * d * &t.p)).norm();
    (ra, rb)
}

/// `‖(A*A - B*B) - D_P(F₁*F₁ - F₂*F₂)D_P‖`, asserted only for commuting
/// fundamental operators.
pub fn check_t_and_f(t: &OperatorTriple, fp: &FundamentalPair) -> Result<f64> {
    let c = commutator(&fp.f1, &fp.f2).norm();
    let bound = 1e-8 * (1.0 + fp.f1.norm() * fp.f2.norm());
    if c > bound {
        return Err(Error::HypothesisFailed(format!("[F1, F2] has norm {c:e}")));
    }
    let lhs = t.a.adjoint() * &t.a - t.b.adjoint() * &t.b;
    let inner = fp.f1.adjoint() * &fp.f1 - fp.f2.adjoint() * &fp.f2;
    Ok((lhs - fp.dd.sandwich(&inner)).norm())
}

/// `‖(zA + B) - (zA + B)*(zP) - D_P(zF₁ + F₂)D_P‖`.
pub fn check_remark_pair(t: &OperatorTriple, fp: &FundamentalPair, z: C64) -> Result<f64> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular { modulus });
    }
    let s = t.a.scale(z) + &t.b;
    let lhs = &s - s.adjoint() * t.p.scale(z);
    let rhs = fp.dd.sandwich(&(fp.f1.scale(z) + &fp.f2));
    Ok((lhs - rhs).norm())
}

/// Outcome of the four-stage implication chain for one triple.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainReport {
    /// Stage k (1-based) held: (1) battery not refuted, (2) ρ₁, ρ₂ ≥ 0 on the
    /// grid, (3) every slice pair passes the Γ battery, (4) the fundamental
    /// equations solve with `w(F₁ + zF₂) ≤ 1` on the sweep.
    pub stages: [bool; 4],
    pub battery: Verdict,
    pub rho12_min_eig: f64,
    pub w_sweep_max: Option<f64>,
    /// `Some(k)` when stage k held but stage k + 1 failed.
    pub violation: Option<usize>,
}

pub fn chain_check(t: &OperatorTriple, battery: &SpectralBattery) -> Result<ChainReport> {
    let report = battery.run(t)?;
    let tol = battery.config.tol;
    let scale = t.scale();
    let s1 = !report.verdict.is_refuted();
    let s2 = report.rho12_min_eig >= -tol * scale * scale;

    let gcfg = GammaConfig { circle_grid: 64, tol };
    let mut s3 = true;
    for z in unimodular_grid(SLICE_GRID) {
        let pr = slice_pair(t, z)?;
        if gamma_contraction_test(&pr, &gcfg)?.is_contraction.is_refuted() {
            s3 = false;
            break;
        }
    }

    let (s4, w) = if t.p.norm() > 1.0 + tol {
        (false, None)
    } else {
        match fundamental_pair(t) {
            Ok(fp) => (fp.w_sweep_max <= 1.0 + W_SLACK, Some(fp.w_sweep_max)),
            Err(Error::ResidualTooLarge { .. }) | Err(Error::NotAContraction { .. }) => (false, None),
            Err(e) => return Err(e),
        }
    };
    let stages = [s1, s2, s3, s4];
    let violation = (0..3).find(|&k| stages[k] && !stages[k + 1]).map(|k| k + 1);
    Ok(ChainReport {
        stages,
        battery: report.verdict,
        rho12_min_eig: report.rho12_min_eig,
        w_sweep_max: w,
        violation,
    })
}
