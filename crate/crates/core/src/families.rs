//! Seeded generators for the triple families exercised by the suites.
//! Every generator takes `(seed, index)` and draws from its own stream, so a
//! case can be regenerated in isolation.

use rand::Rng;

use crate::domains::{pi_map, sample_tetrablock, Point3, SampleMode};
use crate::linalg::{CMatrix, C64};
use crate::random::{complex_gaussian, gaussian_matrix, random_unitary, stream, unimodular, SampleRng};
use crate::tetra::OperatorTriple;

/// Family salts keep the streams of different generators apart.
const SALT_CERTIFIED: u64 = 0x1;
const SALT_NONCONTRACTION: u64 = 0x2;
const SALT_UNITARY: u64 = 0x3;
const SALT_ISOMETRY: u64 = 0x4;
const SALT_ANALYTIC: u64 = 0x5;

fn rng_for(seed: u64, salt: u64, index: u64) -> SampleRng {
    stream(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15), index)
}

fn point_from(rng: &mut SampleRng, mode: SampleMode) -> Point3 {
    let s: u64 = rng.random();
    sample_tetrablock(1, mode, s)[0]
}

fn conjugate(t: &OperatorTriple, u: &CMatrix) -> OperatorTriple {
    let c = |m: &CMatrix| u * m * u.adjoint();
    OperatorTriple {
        a: c(&t.a),
        b: c(&t.b),
        p: c(&t.p),
        residuals: [0.0; 3],
    }
    .compress(&CMatrix::identity(t.dim()))
}

/// Diagonal triple with joint eigenvalues in `Ē` (mostly interior, some on
/// `bE`), conjugated by a Haar unitary. Size is uniform in `1..=max_n`.
pub fn certified_triple(seed: u64, index: u64, max_n: usize) -> OperatorTriple {
    let mut rng = rng_for(seed, SALT_CERTIFIED, index);
    let n = rng.random_range(1..=max_n);
    let pts: Vec<Point3> = (0..n)
        .map(|_| {
            let mode = if rng.random_bool(0.15) {
                SampleMode::Boundary
            } else {
                SampleMode::Interior
            };
            point_from(&mut rng, mode)
        })
        .collect();
    let u = random_unitary(n, &mut rng);
    conjugate(&OperatorTriple::diagonal(&pts), &u)
}

/// Commuting triples that are not tetrablock contractions. Even indices:
/// diagonal with at least one joint eigenvalue outside `Ē`, conjugated by a
/// unitary. Odd indices: polynomials in a single non-normal matrix.
pub fn non_contraction(seed: u64, index: u64, max_n: usize) -> OperatorTriple {
    let mut rng = rng_for(seed, SALT_NONCONTRACTION, index);
    let n = rng.random_range(1..=max_n);
    if index.is_multiple_of(2) {
        let bad = rng.random_range(0..n);
        let pts: Vec<Point3> = (0..n)
            .map(|i| {
                let mode = if i == bad {
                    SampleMode::Exterior
                } else {
                    SampleMode::Interior
                };
                point_from(&mut rng, mode)
            })
            .collect();
        let u = random_unitary(n, &mut rng);
        conjugate(&OperatorTriple::diagonal(&pts), &u)
    } else {
        let x = gaussian_matrix(n, n, &mut rng);
        let x = x.scale_re(rng.random_range(0.6..1.6) / x.norm().max(1e-12));
        let x2 = &x * &x;
        let id = CMatrix::identity(n);
        let mut poly = |deg2: bool| {
            let c0 = complex_gaussian(&mut rng) * 0.3;
            let c1 = complex_gaussian(&mut rng);
            let c2 = if deg2 {
                complex_gaussian(&mut rng) * 0.5
            } else {
                C64::new(0.0, 0.0)
            };
            id.scale(c0) + x.scale(c1) + x2.scale(c2)
        };
        let a = poly(false);
        let b = poly(true);
        let p = poly(true);
        OperatorTriple {
            a,
            b,
            p,
            residuals: [0.0; 3],
        }
        .compress(&CMatrix::identity(n))
    }
}

/// How a tetrablock unitary was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitaryRoute {
    /// `π` of random 2×2 unitaries on the diagonal, then conjugated.
    DiagonalBoundary,
    /// Blocks of a 2n×2n unitary `[[U11, U12], [U21, U22]]` with commuting
    /// normal entries; `N = (U11, U22, U11 U22 - U21 U12)`.
    BlockUnitary,
}

pub struct GeneratedUnitary {
    pub triple: OperatorTriple,
    pub route: UnitaryRoute,
    /// For the block route, the 2n×2n block unitary.
    pub block: Option<CMatrix>,
}

pub fn tetrablock_unitary(seed: u64, index: u64, max_n: usize) -> GeneratedUnitary {
    let mut rng = rng_for(seed, SALT_UNITARY, index);
    let n = rng.random_range(1..=max_n);
    let w = random_unitary(n, &mut rng);
    let locals: Vec<CMatrix> = (0..n).map(|_| random_unitary(2, &mut rng)).collect();
    if index.is_multiple_of(2) {
        let pts: Vec<Point3> = locals.iter().map(|u| pi_map(u).expect("2x2")).collect();
        GeneratedUnitary {
            triple: conjugate(&OperatorTriple::diagonal(&pts), &w),
            route: UnitaryRoute::DiagonalBoundary,
            block: None,
        }
    } else {
        let entry = |i: usize, j: usize| {
            let d: Vec<C64> = locals.iter().map(|u| u.get(i, j)).collect();
            &w * CMatrix::from_diag(&d) * w.adjoint()
        };
        let (u11, u12, u21, u22) = (entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
        let mut block = CMatrix::zeros(2 * n, 2 * n);
        block.set_block(0, 0, &u11);
        block.set_block(0, n, &u12);
        block.set_block(n, 0, &u21);
        block.set_block(n, n, &u22);
        let p = &u11 * &u22 - &u21 * &u12;
        let triple = OperatorTriple {
            a: u11,
            b: u22,
            p,
            residuals: [0.0; 3],
        }
        .compress(&CMatrix::identity(n));
        GeneratedUnitary {
            triple,
            route: UnitaryRoute::BlockUnitary,
            block: Some(block),
        }
    }
}

/// Triples for comparing the two isometry criteria: tetrablock unitaries,
/// copies with `V2` inflated past norm one (keeping `V1 = V2*V3`), copies
/// with `V3` shrunk off the circle, and copies with the relation broken.
pub fn isometry_candidate(seed: u64, index: u64, max_n: usize) -> OperatorTriple {
    let mut rng = rng_for(seed, SALT_ISOMETRY, index);
    let n = rng.random_range(1..=max_n);
    let w = random_unitary(n, &mut rng);
    let mut v3: Vec<C64> = (0..n).map(|_| unimodular(&mut rng)).collect();
    let mut v2: Vec<C64> = (0..n)
        .map(|_| {
            C64::from_polar(
                rng.random_range(0.0f64..1.0).sqrt(),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    match index % 4 {
        0 => {}
        1 => {
            let k = rng.random_range(0..n);
            let target: f64 = rng.random_range(1.05..1.5);
            let modulus = v2[k].norm().max(1e-3);
            v2[k] *= target / modulus;
        }
        2 => {
            let k = rng.random_range(0..n);
            v3[k] *= rng.random_range(0.5..0.95);
        }
        _ => {}
    }
    let mut v1: Vec<C64> = v2.iter().zip(&v3).map(|(b, u)| b.conj() * u).collect();
    if index % 4 == 3 {
        let k = rng.random_range(0..n);
        v1[k] += C64::from_polar(
            rng.random_range(0.05..0.3),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
    }
    let d = |v: &[C64]| &w * CMatrix::from_diag(v) * w.adjoint();
    OperatorTriple {
        a: d(&v1),
        b: d(&v2),
        p: d(&v3),
        residuals: [0.0; 3],
    }
    .compress(&CMatrix::identity(n))
}

/// `(M11(X), M22(X), det M(X))` for `M(z) = W diag(z, s) V` with `W, V`
/// random 2×2 unitaries, `|s| ≤ 1` and `X` a random non-normal
/// contraction. `M` maps the disc into the 2×2 contractions, so by von
/// Neumann's inequality `Ē` is a spectral set for the result. These triples
/// are generally not normal, which is where the commutativity conditions on
/// the fundamental operators can fail.
pub fn analytic_contraction(seed: u64, index: u64, max_n: usize) -> OperatorTriple {
    let mut rng = rng_for(seed, SALT_ANALYTIC, index);
    let n = rng.random_range(1..=max_n);
    let g = gaussian_matrix(n, n, &mut rng);
    let x = g.scale_re(rng.random_range(0.5..1.0) / g.norm().max(1e-12));
    let w = random_unitary(2, &mut rng);
    let v = random_unitary(2, &mut rng);
    let s = C64::from_polar(
        rng.random_range(0.0f64..1.0).sqrt(),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let id = CMatrix::identity(n);
    let affine = |c1: C64, c0: C64| x.scale(c1) + id.scale(c0);
    let det = (w.get(0, 0) * w.get(1, 1) - w.get(0, 1) * w.get(1, 0))
        * (v.get(0, 0) * v.get(1, 1) - v.get(0, 1) * v.get(1, 0));
    OperatorTriple {
        a: affine(w.get(0, 0) * v.get(0, 0), w.get(0, 1) * s * v.get(1, 0)),
        b: affine(w.get(1, 0) * v.get(0, 1), w.get(1, 1) * s * v.get(1, 1)),
        p: x.scale(det * s),
        residuals: [0.0; 3],
    }
    .compress(&id)
}
