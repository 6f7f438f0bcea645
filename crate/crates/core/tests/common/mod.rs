use tetrakit::linalg::{CMatrix, C64};
use tetrakit::tetra::OperatorTriple;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `(M11(X), M22(X), det M(X))` for `M(z) = W diag(z, 0.6) V`, `W` a real
/// rotation by 0.7, `V = [[cos .4, i sin .4], [i sin .4, cos .4]]`,
/// `X = [[0.3, 0.5], [0, -0.2]]`. A tetrablock contraction whose
/// fundamental operators do not commute.
pub fn nonnormal_triple() -> OperatorTriple {
    let x = CMatrix::from_real_rows(&[&[0.3, 0.5], &[0.0, -0.2]]).unwrap();
    let (cw, sw) = (0.7f64.cos(), 0.7f64.sin());
    let (cv, sv) = (0.4f64.cos(), 0.4f64.sin());
    let w = [[c(cw, 0.0), c(-sw, 0.0)], [c(sw, 0.0), c(cw, 0.0)]];
    let v = [[c(cv, 0.0), c(0.0, sv)], [c(0.0, sv), c(cv, 0.0)]];
    let s = 0.6;
    let id = CMatrix::identity(2);
    let det = |m: &[[C64; 2]; 2]| m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let a = x.scale(w[0][0] * v[0][0]) + id.scale(w[0][1] * s * v[1][0]);
    let b = x.scale(w[1][0] * v[0][1]) + id.scale(w[1][1] * s * v[1][1]);
    let p = x.scale(det(&w) * det(&v) * s);
    OperatorTriple::new(a, b, p).unwrap()
}
