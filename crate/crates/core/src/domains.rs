//! Scalar geometry of the tetrablock `E` and the symmetrized bidisc `G`.
//!
//! Membership in `E` (and its closure) has many equivalent descriptions.
//! The closed-form ones are evaluated exactly and decide the verdict by
//! majority; the grid-based ones (the bidisc zero-free test, the two Möbius
//! sup-norms and the minimal-norm matrix search) can refute membership but
//! cannot certify it, so they are reported as advisory.
//!
//! Every criterion reports a *margin*: the right-hand side minus the
//! left-hand side of its defining inequality, so a positive margin means
//! strictly inside.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{golden_max, golden_min, CMatrix, C64};
use crate::random::{self, stream};

/// Default tolerance for membership decisions.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Points per unit circle for the Möbius sup-norm criteria.
pub const CIRCLE_GRID: usize = 256;
/// Radial and angular resolution of the bidisc zero-free test.
pub const DISC_GRID: usize = 64;
/// Width of the band around `|x3| = 1` where the β-criterion falls back to
/// the distinguished-boundary test.
pub const BETA_FALLBACK_BAND: f64 = 1e-8;

/// Unimodularity slack accepted for slice parameters.
const UNIMODULAR_TOL: f64 = 1e-12;

/// A point of ℂ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub x1: C64,
    pub x2: C64,
    pub x3: C64,
}

/// A point `(s, p)` of ℂ².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2 {
    pub s: C64,
    pub p: C64,
}

impl Point3 {
    pub fn new(x1: C64, x2: C64, x3: C64) -> Self {
        Point3 { x1, x2, x3 }
    }

    pub fn real(x1: f64, x2: f64, x3: f64) -> Self {
        Point3::new(C64::new(x1, 0.0), C64::new(x2, 0.0), C64::new(x3, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        [self.x1, self.x2, self.x3]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(x2, x1, x3)`.
    pub fn swapped(&self) -> Self {
        Point3::new(self.x2, self.x1, self.x3)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Point3::new(self.x1 * t, self.x2 * t, self.x3 * t)
    }

    pub fn coords(&self) -> [C64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

impl Point2 {
    pub fn new(s: C64, p: C64) -> Self {
        Point2 { s, p }
    }

    pub fn real(s: f64, p: f64) -> Self {
        Point2::new(C64::new(s, 0.0), C64::new(p, 0.0))
    }
}

/// `{"re": .., "im": ..}` wire form of a complex scalar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for C64 {
    fn from(z: ComplexJson) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    x: Vec<ComplexJson>,
}

fn parse_coords<'de, D: Deserializer<'de>>(d: D, want: usize) -> std::result::Result<Vec<C64>, D::Error> {
    use serde::de::Error as _;
    let p = PointJson::deserialize(d)?;
    if p.x.len() != want {
        return Err(D::Error::custom(format!(
            "expected {want} coordinates, got {}",
            p.x.len()
        )));
    }
    let coords: Vec<C64> = p.x.into_iter().map(C64::from).collect();
    if coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(D::Error::custom("non-finite coordinate"));
    }
    Ok(coords)
}

impl Serialize for Point3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson {
            x: self.coords().iter().map(|&z| z.into()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = parse_coords(d, 3)?;
        Ok(Point3::new(c[0], c[1], c[2]))
    }
}

impl Serialize for Point2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointJson {
            x: vec![self.s.into(), self.p.into()],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = parse_coords(d, 2)?;
        Ok(Point2::new(c[0], c[1]))
    }
}

/// Identifiers of the membership criteria. `P` suffixes are the primed
/// variants with the roles of `x1` and `x2` exchanged; `Sp` is the
/// symmetrized-bidisc inequality `|s - s̄p| < 1 - |p|², |s| < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Awy1,
    Awy2,
    Awy2p,
    Awy3,
    Awy3p,
    Awy4,
    Awy4p,
    Awy5,
    Awy6,
    Awy7,
    Awy8,
    Awy9,
    Sp,
}

impl Criterion {
    pub const ALL: [Criterion; 12] = [
        Criterion::Awy1,
        Criterion::Awy2,
        Criterion::Awy2p,
        Criterion::Awy3,
        Criterion::Awy3p,
        Criterion::Awy4,
        Criterion::Awy4p,
        Criterion::Awy5,
        Criterion::Awy6,
        Criterion::Awy7,
        Criterion::Awy8,
        Criterion::Awy9,
    ];

    pub const CLOSED_FORM: [Criterion; 8] = [
        Criterion::Awy3,
        Criterion::Awy3p,
        Criterion::Awy4,
        Criterion::Awy4p,
        Criterion::Awy5,
        Criterion::Awy6,
        Criterion::Awy8,
        Criterion::Awy9,
    ];

    pub fn is_closed_form(self) -> bool {
        !matches!(
            self,
            Criterion::Awy1 | Criterion::Awy2 | Criterion::Awy2p | Criterion::Awy7
        )
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("criterion serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CriterionResult {
    pub pass_open: bool,
    pub pass_closed: bool,
    pub margin: f64,
}

impl CriterionResult {
    fn from_margin(margin: f64, tol: f64) -> Self {
        CriterionResult {
            pass_open: margin > tol,
            pass_closed: margin >= -tol,
            margin,
        }
    }
}

/// Auxiliary data produced while deciding membership.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<ComplexJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<ComplexJson>,
    /// 2×2 matrix `A` with `π(A) = x`, from the symmetric construction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<CMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipVerdict {
    pub in_open: bool,
    pub in_closed: bool,
    pub per_criterion: BTreeMap<Criterion, CriterionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl MembershipVerdict {
    /// Smallest `|margin|` over the closed-form criteria present.
    pub fn min_abs_margin(&self) -> f64 {
        self.per_criterion
            .iter()
            .filter(|(c, _)| c.is_closed_form())
            .map(|(_, r)| r.margin.abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn margin(&self, c: Criterion) -> Option<f64> {
        self.per_criterion.get(&c).map(|r| r.margin)
    }
}

/// `π(A) = (a11, a22, det A)`.
pub fn pi_map(a: &CMatrix) -> Result<Point3> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::BadShape(format!(
            "pi_map needs 2x2, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    Ok(Point3::new(a11, a22, a11 * a22 - a12 * a21))
}

/// Operator norm of a 2×2 matrix from its Frobenius norm and determinant.
fn norm2x2(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let fro2 = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * c).norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    ((fro2 + disc.sqrt()) / 2.0).sqrt()
}

/// `β1, β2` with `x1 = β1 + β̄2 x3`, `x2 = β2 + β̄1 x3` (requires `|x3| ≠ 1`).
pub fn beta_pair(x: &Point3) -> (C64, C64) {
    let den = 1.0 - x.x3.norm_sqr();
    let b1 = (x.x1 - x.x2.conj() * x.x3) / den;
    let b2 = (x.x2 - x.x1.conj() * x.x3) / den;
    (b1, b2)
}

/// Sup over the unit circle of `|(x3 z - u)/(v z - 1)|`, with the pole
/// condition `|v| < 1` folded into the returned margin.
fn mobius_margin(u: C64, v: C64, x3: C64, grid: usize) -> f64 {
    let value = |t: f64| {
        let z = C64::from_polar(1.0, t);
        let den = v * z - 1.0;
        if den.norm() < 1e-14 {
            // Removable singularity or genuine pole: judge from neighbours.
            return f64::NAN;
        }
        ((x3 * z - u) / den).norm()
    };
    let clean = |t: f64| {
        let v = value(t);
        if v.is_nan() {
            let l = value(t - 1e-7);
            let r = value(t + 1e-7);
            l.max(r).min(1e12)
        } else {
            v.min(1e12)
        }
    };
    let step = TAU / grid as f64;
    let (mut bt, mut bv) = (0.0, f64::NEG_INFINITY);
    for i in 0..grid {
        let t = i as f64 * step;
        let v = clean(t);
        if v > bv {
            bt = t;
            bv = v;
        }
    }
    let (_, rv) = golden_max(&clean, bt - step, bt + step, 1e-12);
    let sup = bv.max(rv);
    (1.0 - sup).min(1.0 - v.norm())
}

/// `min_{|z| ≤ 1} (|1 - u z| - |v - x3 z|)`: the minimum over `|w| ≤ 1` of
/// `|1 - u z - v w + x3 z w|` is `|1 - u z| - |v - x3 z|` when that is
/// nonnegative, and the polynomial has a zero in the bidisc otherwise.
fn half_bidisc_margin(u: C64, v: C64, x3: C64, n: usize) -> f64 {
    let g = |r: f64, t: f64| {
        let z = C64::from_polar(r, t);
        (1.0 - u * z).norm() - (v - x3 * z).norm()
    };
    let (mut br, mut bt, mut bv) = (0.0, 0.0, g(0.0, 0.0));
    for i in 1..n {
        let r = i as f64 / (n - 1) as f64;
        for j in 0..n {
            let t = j as f64 * TAU / n as f64;
            let v = g(r, t);
            if v < bv {
                br = r;
                bt = t;
                bv = v;
            }
        }
    }
    // Local refinement at the grid minimizer: angle, then radius.
    let dt = TAU / n as f64;
    let (t1, _) = golden_min(&|t| g(br, t), bt - dt, bt + dt, 1e-12);
    let dr = 1.0 / (n - 1) as f64;
    let (_, v1) = golden_min(&|r| g(r, t1), (br - dr).max(0.0), (br + dr).min(1.0), 1e-12);
    bv.min(v1)
}

/// Zero-free test for `1 - x1 z - x2 w + x3 z w` on the bidisc. Taking the
/// minimum over both variable orders also catches common zeros of the two
/// coefficients, where `|1 - x1 z| - |x2 - x3 z|` vanishes without being
/// negative.
fn bidisc_margin(x: &Point3, grid: usize) -> f64 {
    half_bidisc_margin(x.x1, x.x2, x.x3, grid).min(half_bidisc_margin(x.x2, x.x1, x.x3, grid))
}

/// Smallest operator norm of `[[x1, r c], [c / r, x2]]` over `r > 0`, with
/// `c² = x1 x2 - x3` (every 2×2 matrix with `π(A) = x` is unitarily similar
/// to one of these).
fn min_norm_realization(x: &Point3) -> (f64, CMatrix) {
    let c = (x.x1 * x.x2 - x.x3).sqrt();
    let f = |s: f64| {
        let r = s.exp();
        norm2x2(x.x1, c * r, c / r, x.x2)
    };
    let (s, v) = golden_min(&f, -8.0, 8.0, 1e-10);
    let v0 = f(0.0);
    let (s, v) = if v0 <= v { (0.0, v0) } else { (s, v) };
    let r = s.exp();
    let a = CMatrix::new(2, 2, vec![x.x1, c * r, c / r, x.x2]).expect("finite point");
    (v, a)
}

fn criterion_margin(x: &Point3, c: Criterion, grids: Grids, witness: &mut Witness) -> f64 {
    let (x1, x2, x3) = (x.x1, x.x2, x.x3);
    let (n1, n2, n3) = (x1.norm_sqr(), x2.norm_sqr(), x3.norm_sqr());
    let d1 = (x1 - x2.conj() * x3).norm();
    let d2 = (x2 - x1.conj() * x3).norm();
    let d12 = (x1 * x2 - x3).norm();
    match c {
        Criterion::Awy1 => bidisc_margin(x, grids.disc),
        Criterion::Awy2 => mobius_margin(x1, x2, x3, grids.circle),
        Criterion::Awy2p => mobius_margin(x2, x1, x3, grids.circle),
        Criterion::Awy3 => (1.0 - n2) - (d1 + d12),
        Criterion::Awy3p => (1.0 - n1) - (d2 + d12),
        Criterion::Awy4 => (1.0 - (n1 - n2 + n3 + 2.0 * d2)).min(1.0 - x2.norm()),
        Criterion::Awy4p => (1.0 - (-n1 + n2 + n3 + 2.0 * d1)).min(1.0 - x1.norm()),
        Criterion::Awy5 => (1.0 - (n1 + n2 - n3 + 2.0 * d12)).min(1.0 - x3.norm()),
        Criterion::Awy6 => (1.0 - n3) - d1 - d2,
        Criterion::Awy7 => 1.0 - min_norm_realization(x).0,
        Criterion::Awy8 => {
            let cc = (x1 * x2 - x3).sqrt();
            let a = CMatrix::new(2, 2, vec![x1, cc, cc, x2]).expect("finite point");
            witness.matrix = Some(a);
            1.0 - norm2x2(x1, cc, cc, x2)
        }
        Criterion::Awy9 => {
            if (1.0 - x3.norm()).abs() < BETA_FALLBACK_BAND {
                // β-formulas divide by 1 - |x3|²; decide by the bE test.
                let b = tetrablock_boundary(x, BETA_FALLBACK_BAND);
                if b.on_boundary {
                    0.0
                } else {
                    b.margin
                }
            } else {
                let (b1, b2) = beta_pair(x);
                witness.beta1 = Some(b1.into());
                witness.beta2 = Some(b2.into());
                (1.0 - x3.norm()).min(1.0 - b1.norm() - b2.norm())
            }
        }
        Criterion::Sp => unreachable!("symmetrized-bidisc criterion on a tetrablock point"),
    }
}

/// Grid sizes of the advisory criteria: `circle` points for (2)/(2'),
/// `disc × disc` polar points for (1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grids {
    pub circle: usize,
    pub disc: usize,
}

impl Default for Grids {
    fn default() -> Self {
        Grids {
            circle: CIRCLE_GRID,
            disc: DISC_GRID,
        }
    }
}

/// Evaluates the requested membership criteria for `x` and aggregates a
/// verdict by majority over the closed-form ones (or over all requested ones
/// when no closed-form criterion was asked for).
pub fn tetrablock_membership(x: &Point3, criteria: &[Criterion], tol: f64) -> Result<MembershipVerdict> {
    tetrablock_membership_with(x, criteria, tol, Grids::default())
}

pub fn tetrablock_membership_with(
    x: &Point3,
    criteria: &[Criterion],
    tol: f64,
    grids: Grids,
) -> Result<MembershipVerdict> {
    if grids.circle == 0 || grids.disc < 2 {
        return Err(Error::BadShape(format!("grid sizes {grids:?}")));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut witness = Witness::default();
    let mut per = BTreeMap::new();
    for &c in criteria {
        if c == Criterion::Sp {
            continue;
        }
        let m = criterion_margin(x, c, grids, &mut witness);
        per.insert(c, CriterionResult::from_margin(m, tol));
    }

    let decisive: Vec<(&Criterion, &CriterionResult)> = {
        let closed: Vec<_> = per.iter().filter(|(c, _)| c.is_closed_form()).collect();
        if closed.is_empty() {
            per.iter().collect()
        } else {
            closed
        }
    };

    let clear = 10.0 * tol;
    let inside = decisive.iter().find(|(_, r)| r.margin > clear);
    let outside = decisive.iter().find(|(_, r)| r.margin < -clear);
    if let (Some((ci, ri)), Some((co, ro))) = (inside, outside) {
        return Err(Error::InternalInconsistency(format!(
            "{ci} margin {:e} vs {co} margin {:e} at ({}, {}, {})",
            ri.margin, ro.margin, x.x1, x.x2, x.x3
        )));
    }

    let vote = |pick: fn(&CriterionResult) -> bool| {
        let yes = decisive.iter().filter(|(_, r)| pick(r)).count();
        let no = decisive.len() - yes;
        if yes != no {
            yes > no
        } else {
            decisive
                .iter()
                .max_by(|a, b| a.1.margin.abs().total_cmp(&b.1.margin.abs()))
                .is_some_and(|(_, r)| pick(r))
        }
    };
    let in_closed = !decisive.is_empty() && vote(|r| r.pass_closed);
    let in_open = in_closed && vote(|r| r.pass_open);

    let witness = if witness == Witness::default() {
        None
    } else {
        Some(witness)
    };
    Ok(MembershipVerdict {
        in_open,
        in_closed,
        per_criterion: per,
        witness,
    })
}

/// Outcome of the distinguished-boundary test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryCheck {
    pub on_boundary: bool,
    /// `-max(||x3| - 1|, |x1 - x̄2 x3|, |x2| - 1)`; zero on `bE`.
    pub margin: f64,
    /// Equivalent form: `x ∈ Ē` and `|x3| = 1`.
    pub closure_form: bool,
}

/// `x ∈ bE` iff `x1 = x̄2 x3`, `|x3| = 1`, `|x2| ≤ 1`.
pub fn tetrablock_boundary(x: &Point3, tol: f64) -> BoundaryCheck {
    let unimodular = (x.x3.norm() - 1.0).abs();
    let relation = (x.x1 - x.x2.conj() * x.x3).norm();
    let excess = x.x2.norm() - 1.0;
    let violation = unimodular.max(relation).max(excess);
    let in_closure = [Criterion::Awy5, Criterion::Awy6]
        .iter()
        .all(|&c| criterion_margin(x, c, Grids::default(), &mut Witness::default()) >= -tol);
    BoundaryCheck {
        on_boundary: violation <= tol,
        margin: -violation,
        closure_form: in_closure && unimodular <= tol,
    }
}

/// Margin of `|s - s̄p| < 1 - |p|²` and `|s| < 2`.
pub fn gamma_margin(q: &Point2) -> f64 {
    let lhs = (q.s - q.s.conj() * q.p).norm();
    ((1.0 - q.p.norm_sqr()) - lhs).min(2.0 - q.s.norm())
}

pub fn gamma_membership(q: &Point2, tol: f64) -> MembershipVerdict {
    let r = CriterionResult::from_margin(gamma_margin(q), tol);
    MembershipVerdict {
        in_open: r.pass_open,
        in_closed: r.pass_closed,
        per_criterion: BTreeMap::from([(Criterion::Sp, r)]),
        witness: None,
    }
}

/// `(s, p) ∈ bΓ` iff `(s, p) ∈ Γ` and `|p| = 1`.
pub fn gamma_boundary(q: &Point2, tol: f64) -> bool {
    (q.p.norm() - 1.0).abs() <= tol && gamma_margin(q) >= -tol
}

/// `(x1 + z x2, z x3)` for unimodular `z`.
pub fn neat_slice(x: &Point3, z: C64) -> Result<Point2> {
    let modulus = z.norm();
    if (modulus - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular { modulus });
    }
    Ok(Point2::new(x.x1 + z * x.x2, z * x.x3))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Interior,
    Boundary,
    Exterior,
}

fn interior_point(rng: &mut impl Rng) -> Point3 {
    let g = random::gaussian_matrix(2, 2, rng);
    let radius: f64 = rng.random_range(0.0..0.999);
    let a = g.scale_re(radius / g.norm());
    pi_map(&a).expect("2x2")
}

fn closed_verdict(x: &Point3) -> bool {
    tetrablock_membership(x, &Criterion::CLOSED_FORM, MEMBERSHIP_TOL)
        .map(|v| v.in_closed)
        .unwrap_or(false)
}

/// Deterministic samples: `interior` are `π(A)` with `‖A‖ < 1`, `boundary`
/// are `π(U)` with `U` a random 2×2 unitary, `exterior` are interior points
/// scaled up until the closed-form verdict fails.
pub fn sample_tetrablock(count: usize, mode: SampleMode, seed: u64) -> Vec<Point3> {
    (0..count as u64)
        .map(|i| {
            let mut rng = stream(seed, i);
            match mode {
                SampleMode::Interior => interior_point(&mut rng),
                SampleMode::Boundary => pi_map(&random::random_unitary(2, &mut rng)).expect("2x2"),
                SampleMode::Exterior => {
                    let mut x = interior_point(&mut rng);
                    for _ in 0..400 {
                        if !closed_verdict(&x) {
                            return x;
                        }
                        x = x.scaled(1.25);
                    }
                    Point3::real(2.0, 0.0, 0.0)
                }
            }
        })
        .collect()
}

/// `π(A)` with `‖A‖ = 1 ± δ`, `δ` log-uniform in `[1e-7, 1e-2]`: points
/// straddling the boundary of `E`.
pub fn sample_near_boundary(count: usize, seed: u64) -> Vec<Point3> {
    (0..count as u64)
        .map(|i| {
            let mut rng = stream(seed, i);
            let g = random::gaussian_matrix(2, 2, &mut rng);
            let delta = 10f64.powf(rng.random_range(-7.0..-2.0));
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            pi_map(&g.scale_re((1.0 + sign * delta) / g.norm())).expect("2x2")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn all(x: &Point3) -> MembershipVerdict {
        tetrablock_membership(x, &Criterion::ALL, MEMBERSHIP_TOL).unwrap()
    }

    #[test]
    fn pi_map_examples() {
        assert_eq!(pi_map(&CMatrix::identity(2)).unwrap(), Point3::real(1.0, 1.0, 1.0));
        assert_eq!(pi_map(&CMatrix::zeros(2, 2)).unwrap(), Point3::real(0.0, 0.0, 0.0));
        let half = CMatrix::from_real_diag(&[0.5, 0.5]);
        assert_eq!(pi_map(&half).unwrap(), Point3::real(0.5, 0.5, 0.25));
        assert!(matches!(pi_map(&CMatrix::identity(3)), Err(Error::BadShape(_))));
    }

    #[test]
    fn origin_is_strictly_inside() {
        let v = all(&Point3::real(0.0, 0.0, 0.0));
        assert!(v.in_open && v.in_closed);
        assert!(v.per_criterion.values().all(|r| r.pass_open && r.margin > 0.0));
    }

    #[test]
    fn half_half_quarter() {
        let v = all(&Point3::real(0.5, 0.5, 0.25));
        assert!(v.in_open);
        // |x1 - x̄2 x3| + |x1 x2 - x3| = 3/8 against 1 - |x2|² = 3/4.
        assert_abs_diff_eq!(v.margin(Criterion::Awy3).unwrap(), 0.75 - 0.375, epsilon = 1e-15);
        let w = v.witness.unwrap();
        let b1: C64 = w.beta1.unwrap().into();
        assert_abs_diff_eq!(b1.re, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn two_zero_zero_is_outside() {
        let v = all(&Point3::real(2.0, 0.0, 0.0));
        assert!(!v.in_closed && !v.in_open);
        assert!(!v.per_criterion[&Criterion::Awy3p].pass_closed);
        assert!(!v.per_criterion[&Criterion::Awy1].pass_closed);
    }

    #[test]
    fn one_one_one_is_on_the_boundary() {
        let v = all(&Point3::real(1.0, 1.0, 1.0));
        assert!(v.in_closed && !v.in_open);
        // 1 + 1 - 1 + 2·0 = 1.
        assert_abs_diff_eq!(v.margin(Criterion::Awy5).unwrap(), 0.0, epsilon = 1e-15);
        assert!(v.per_criterion[&Criterion::Awy2].pass_closed);
    }

    #[test]
    fn mobius_criterion_needs_the_pole_condition() {
        // Ψ ≡ 0 but (0, 2, 0) is not in Ē.
        let v = all(&Point3::real(0.0, 2.0, 0.0));
        assert!(!v.in_closed);
        assert!(!v.per_criterion[&Criterion::Awy2].pass_closed);
    }

    #[test]
    fn boundary_examples() {
        assert!(tetrablock_boundary(&Point3::real(1.0, 1.0, 1.0), 1e-12).on_boundary);
        let b = tetrablock_boundary(&Point3::real(0.0, 0.0, 1.0), 1e-12);
        assert!(b.on_boundary && b.closure_form);
        let b = tetrablock_boundary(&Point3::real(0.5, 0.5, 0.25), 1e-12);
        assert!(!b.on_boundary && !b.closure_form);
    }

    #[test]
    fn gamma_examples() {
        let v = gamma_membership(&Point2::real(0.0, 0.0), 1e-12);
        assert!(v.in_open);
        let v = gamma_membership(&Point2::real(2.0, 1.0), 1e-12);
        assert!(v.in_closed && !v.in_open);
        // |1.9 - 1.9·0.9| = 0.19 = 1 - 0.81: on the boundary.
        assert_abs_diff_eq!(gamma_margin(&Point2::real(1.9, 0.9)), 0.0, epsilon = 1e-14);
        // |1.95 - 1.95·0.9| = 0.195 > 0.19.
        assert!(!gamma_membership(&Point2::real(1.95, 0.9), 1e-12).in_closed);

        assert!(gamma_boundary(&Point2::real(2.0, 1.0), 1e-12));
        assert!(gamma_boundary(&Point2::real(0.0, 1.0), 1e-12));
        assert!(!gamma_boundary(&Point2::real(0.0, 0.0), 1e-12));
    }

    #[test]
    fn neat_slice_examples() {
        let z = C64::from_polar(1.0, 0.3);
        let q = neat_slice(&Point3::real(0.0, 0.0, 0.0), z).unwrap();
        assert_eq!(q, Point2::real(0.0, 0.0));
        let q = neat_slice(&Point3::real(1.0, 1.0, 1.0), C64::new(1.0, 0.0)).unwrap();
        assert_eq!(q, Point2::real(2.0, 1.0));
        let q = neat_slice(&Point3::real(0.5, 0.5, 0.25), C64::new(-1.0, 0.0)).unwrap();
        assert_eq!(q, Point2::real(0.0, -0.25));
        assert!(matches!(
            neat_slice(&Point3::real(0.0, 0.0, 0.0), C64::new(0.5, 0.0)),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn samplers_land_where_they_claim() {
        for x in sample_tetrablock(64, SampleMode::Boundary, 1) {
            assert!(tetrablock_boundary(&x, 1e-10).on_boundary);
        }
        for x in sample_tetrablock(64, SampleMode::Interior, 2) {
            assert!(all(&x).in_open);
        }
        for x in sample_tetrablock(64, SampleMode::Exterior, 3) {
            assert!(!all(&x).in_closed);
        }
        assert_eq!(
            sample_tetrablock(16, SampleMode::Interior, 5),
            sample_tetrablock(16, SampleMode::Interior, 5)
        );
    }

    #[test]
    fn point_json() {
        let x = Point3::real(0.5, 0.5, 0.25);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(
            s,
            r#"{"x":[{"re":0.5,"im":0.0},{"re":0.5,"im":0.0},{"re":0.25,"im":0.0}]}"#
        );
        assert_eq!(serde_json::from_str::<Point3>(&s).unwrap(), x);
        assert!(serde_json::from_str::<Point3>(r#"{"x":[{"re":0,"im":0}]}"#).is_err());
        let v = all(&x);
        let json = serde_json::to_value(&v).unwrap();
        assert!(json["perCriterion"]["awy3p"]["passOpen"].as_bool().unwrap());
    }
}
