//! Γ-contractions: the ρ-positivity battery, the fundamental operator `Φ`
//! solving `S - S*P = D_P Φ D_P`, and classification of commuting pairs.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::domains::{gamma_boundary, gamma_margin, Point2};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, default_clamp_tol, defect, golden_min, isometry_defect, joint_eigenvalues, min_eigenvalue,
    normality_residual, numerical_radius_with, CMatrix, DefectData, C64,
};

/// Default β-grid for the ρ battery.
pub const CIRCLE_GRID: usize = 256;
/// θ-grid used for numerical radii inside batteries and sweeps.
pub const SWEEP_THETA_GRID: usize = 64;
/// Default commutation tolerance, relative to `1 + ‖X‖‖Y‖`.
pub const COMMUTE_TOL: f64 = 1e-9;
/// Numerical-radius slack before `w(Φ) > 1` refutes.
pub const W_SLACK: f64 = 1e-6;
/// Slack for joint-spectrum containment. Eigenvalues of defective matrices
/// are only accurate to roughly the square root of machine precision.
pub const SPECTRUM_SLACK: f64 = 1e-6;
/// Fundamental-equation residual bound, relative to the operator scale.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Three-state verdict of a sampled necessary-condition battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    PassedBattery,
}

impl Verdict {
    pub fn is_refuted(self) -> bool {
        self == Verdict::Refuted
    }
}

pub(crate) fn check_square_family(ms: &[&CMatrix]) -> Result<usize> {
    let n = ms[0].rows();
    for m in ms {
        if !m.is_square() || m.rows() != n {
            return Err(Error::BadShape(format!(
                "expected {n}x{n} operators, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Ok(n)
}

pub(crate) fn commute_residual(x: &CMatrix, y: &CMatrix, tol: f64) -> Result<f64> {
    let residual = commutator(x, y).norm();
    let bound = tol * (1.0 + x.norm() * y.norm());
    if residual > bound {
        return Err(Error::NotCommuting { residual, bound });
    }
    Ok(residual)
}

/// A commuting pair `(S, P)`.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub s: CMatrix,
    pub p: CMatrix,
    pub commutation_residual: f64,
}

impl OperatorPair {
    pub fn new(s: CMatrix, p: CMatrix) -> Result<Self> {
        Self::with_tol(s, p, COMMUTE_TOL)
    }

    pub fn with_tol(s: CMatrix, p: CMatrix, tol: f64) -> Result<Self> {
        check_square_family(&[&s, &p])?;
        let commutation_residual = commute_residual(&s, &p, tol)?;
        Ok(OperatorPair {
            s,
            p,
            commutation_residual,
        })
    }

    pub fn scalar(s: C64, p: C64) -> Self {
        OperatorPair {
            s: CMatrix::scalar(s),
            p: CMatrix::scalar(p),
            commutation_residual: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    /// `S - S*P`.
    pub fn sigma(&self) -> CMatrix {
        &self.s - self.s.adjoint() * &self.p
    }

    fn scale(&self) -> f64 {
        1.0 + self.s.norm() + self.p.norm()
    }
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    #[serde(rename = "S")]
    s: CMatrix,
    #[serde(rename = "P")]
    p: CMatrix,
}

impl Serialize for OperatorPair {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PairJson {
            s: self.s.clone(),
            p: self.p.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OperatorPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PairJson::deserialize(d)?;
        OperatorPair::new(j.s, j.p).map_err(serde::de::Error::custom)
    }
}

/// `ρ(S, P) = 2(I - P*P) - (S - S*P) - (S* - P*S)`.
pub fn rho(s: &CMatrix, p: &CMatrix) -> Result<CMatrix> {
    let n = check_square_family(&[s, p])?;
    let sigma = s - s.adjoint() * p;
    Ok((CMatrix::identity(n) - p.adjoint() * p).scale_re(2.0) - &sigma - sigma.adjoint())
}

/// `min_β λ_min ρ(βS, β²P)` over a circle grid with golden refinement at the
/// best grid point. Returns `(value, β)`.
pub fn rho_circle_min(s: &CMatrix, p: &CMatrix, grid: usize) -> (f64, C64) {
    let n = s.rows();
    if n == 0 {
        return (f64::INFINITY, C64::new(1.0, 0.0));
    }
    // ρ(βS, β²P) = 2D² - βΣ - β̄Σ*.
    let d2 = (CMatrix::identity(n) - p.adjoint() * p).scale_re(2.0);
    let sigma = s - s.adjoint() * p;
    let f = |t: f64| {
        let bs = sigma.scale(C64::from_polar(1.0, t));
        min_eigenvalue(&(&d2 - &bs - bs.adjoint()))
    };
    let grid = grid.max(8);
    let step = TAU / grid as f64;
    let (mut bt, mut bv) = (0.0, f64::INFINITY);
    for i in 0..grid {
        let t = i as f64 * step;
        let v = f(t);
        if v < bv {
            bt = t;
            bv = v;
        }
    }
    let (t, v) = golden_min(&f, bt - step, bt + step, 1e-7);
    if v < bv {
        bt = t;
        bv = v;
    }
    (bv, C64::from_polar(1.0, bt))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaConfig {
    pub circle_grid: usize,
    pub tol: f64,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            circle_grid: CIRCLE_GRID,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaReport {
    pub is_contraction: Verdict,
    pub min_rho_eig: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<CMatrix>,
    pub w_phi: f64,
    /// First refuting stage, when refuted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Joint eigenvalues of a commuting pair as points of ℂ².
pub fn pair_spectrum(s: &CMatrix, p: &CMatrix) -> Result<Vec<Point2>> {
    let tuples = joint_eigenvalues(&[s.clone(), p.clone()], 1e-7)?;
    Ok(tuples.into_iter().map(|t| Point2::new(t[0], t[1])).collect())
}

fn is_normal_pair(pr: &OperatorPair) -> bool {
    let scale = pr.scale();
    normality_residual(&pr.s) <= 1e-8 * scale * scale && normality_residual(&pr.p) <= 1e-8 * scale * scale
}

/// Runs, in order: `‖P‖ ≤ 1`, joint spectrum in `Γ`, the ρ(βS, β²P) circle
/// grid, and `w(Φ) ≤ 1`. Any failure refutes. Normal pairs with spectrum in
/// `Γ` are certified by the spectral theorem; everything else that survives
/// is reported as having passed the battery.
pub fn gamma_contraction_test(pr: &OperatorPair, cfg: &GammaConfig) -> Result<GammaReport> {
    let scale = pr.scale();
    let (min_rho, _) = rho_circle_min(&pr.s, &pr.p, cfg.circle_grid);
    let mut reason: Option<String> = None;

    let pn = pr.p.norm();
    if pn > 1.0 + cfg.tol {
        reason = Some(format!("norm of P is {pn}"));
    }

    let spectrum = pair_spectrum(&pr.s, &pr.p)?;
    let spec_margin = spectrum.iter().map(gamma_margin).fold(f64::INFINITY, f64::min);
    if reason.is_none() && spec_margin < -SPECTRUM_SLACK {
        reason = Some(format!("joint spectrum leaves Gamma by {:e}", -spec_margin));
    }

    if reason.is_none() && min_rho < -cfg.tol * scale * scale {
        reason = Some(format!("rho has eigenvalue {min_rho:e}"));
    }

    let mut phi = None;
    let mut w_phi = 0.0;
    if reason.is_none() {
        let dd = defect(&pr.p, default_clamp_tol(&pr.p))?;
        if let Ok(f) = solve_fundamental_gamma(pr, &dd) {
            w_phi = numerical_radius_with(&f, SWEEP_THETA_GRID).value;
            if w_phi > 1.0 + W_SLACK {
                reason = Some(format!("numerical radius of Phi is {w_phi}"));
            }
            phi = Some(f);
        }
    }

    let is_contraction = if reason.is_some() {
        Verdict::Refuted
    } else if is_normal_pair(pr) && spec_margin >= -cfg.tol {
        Verdict::Certified
    } else {
        Verdict::PassedBattery
    };
    Ok(GammaReport {
        is_contraction,
        min_rho_eig: min_rho,
        phi,
        w_phi,
        reason,
    })
}

/// `‖D_P X D_P - Σ‖` for `X` on the defect basis.
pub fn fundamental_residual(dd: &DefectData, x: &CMatrix, sigma: &CMatrix) -> f64 {
    (dd.sandwich(x) - sigma).norm()
}

/// `Φ` on the defect basis, by the pseudoinverse of `D_P`.
pub fn solve_fundamental_gamma(pr: &OperatorPair, dd: &DefectData) -> Result<CMatrix> {
    let sigma = pr.sigma();
    let phi = dd.pinv_sandwich(&sigma);
    let residual = fundamental_residual(dd, &phi, &sigma);
    let bound = RESIDUAL_TOL * pr.scale();
    if residual > bound {
        return Err(Error::ResidualTooLarge {
            context: "S - S*P = D_P Phi D_P".into(),
            residual,
            bound,
        });
    }
    Ok(phi)
}

/// Independent route to `Φ`: least squares on
/// `vec(Σ) = (conj(M) ⊗ M) vec(Φ)` with `M = D_P Q`, the matrix of `D_P`
/// from defect coordinates into `H`.
pub fn solve_fundamental_gamma_lstsq(pr: &OperatorPair, dd: &DefectData) -> Result<CMatrix> {
    let sigma = pr.sigma();
    Ok(lstsq_sandwich(dd, &sigma))
}

pub(crate) fn lstsq_sandwich(dd: &DefectData, sigma: &CMatrix) -> CMatrix {
    let n = dd.dim();
    let r = dd.rank;
    if r == 0 {
        return CMatrix::zeros(0, 0);
    }
    let m = dd.to_defect().adjoint(); // n × r
                                      // Column-major vec: vec(M X M*) = (conj(M) ⊗ M) vec(X).
    let k = CMatrix::from_fn(n * n, r * r, |row, col| {
        let (i, j) = (row % n, row / n);
        let (a, b) = (col % r, col / r);
        m.get(i, a) * m.get(j, b).conj()
    });
    let rhs = nalgebra::DVector::from_fn(n * n, |row, _| sigma.get(row % n, row / n));
    let svd = k.into_inner().svd(true, true);
    let sol = svd.solve(&rhs, 1e-13).expect("svd with both factors");
    CMatrix::from_fn(r, r, |a, b| sol[a + b * r])
}

/// `‖D_P S - (X D_P + X* D_P P)‖` with `X` embedded from the defect basis.
pub fn check_alt_equation(pr: &OperatorPair, dd: &DefectData, x: &CMatrix) -> f64 {
    let xe = dd.embed(x);
    let lhs = &dd.dp * &pr.s;
    let rhs = &xe * &dd.dp + xe.adjoint() * &dd.dp * &pr.p;
    (lhs - rhs).norm()
}

/// `‖(S1*S2 - S2*S1) - D_P(Φ1*Φ2 - Φ2*Φ1)D_P‖`.
pub fn check_newresult(s1: &CMatrix, s2: &CMatrix, dd: &DefectData, phi1: &CMatrix, phi2: &CMatrix) -> f64 {
    let lhs = s1.adjoint() * s2 - s2.adjoint() * s1;
    let inner = phi1.adjoint() * phi2 - phi2.adjoint() * phi1;
    (lhs - dd.sandwich(&inner)).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaClass {
    GammaUnitary,
    GammaIsometry,
    GammaContraction,
    None,
}

/// Γ-unitary: normal with joint spectrum in `bΓ`. Γ-isometry: `P` an
/// isometry and the battery passes. Γ-contraction: the battery passes.
pub fn classify_gamma(pr: &OperatorPair, cfg: &GammaConfig) -> Result<GammaClass> {
    let tol = 1e-8 * pr.scale();
    if is_normal_pair(pr) {
        let spectrum = pair_spectrum(&pr.s, &pr.p)?;
        if spectrum.iter().all(|q| gamma_boundary(q, tol)) {
            return Ok(GammaClass::GammaUnitary);
        }
    }
    let report = gamma_contraction_test(pr, cfg)?;
    if report.is_contraction.is_refuted() {
        return Ok(GammaClass::None);
    }
    if isometry_defect(&pr.p) <= tol {
        return Ok(GammaClass::GammaIsometry);
    }
    Ok(GammaClass::GammaContraction)
}
