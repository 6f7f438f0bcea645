//! C ABI over `tetrakit`. Objects cross the boundary as opaque handles that
//! the caller frees with the matching `*_free`. Every fallible call returns a
//! `TkStatus`; on failure `tk_last_error` holds a message for the calling
//! thread. Matrices are dense, row-major, split into real and imaginary
//! arrays; a null imaginary pointer on input means zero.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tetrakit::classify::{classify_triple, TripleKind};
use tetrakit::dilation::{build_dilation, verify_model_identities, verify_moments, DilationModel};
use tetrakit::domains::{tetrablock_boundary, tetrablock_membership, Criterion, Point3};
use tetrakit::gamma::Verdict;
use tetrakit::linalg::{CMatrix, C64};
use tetrakit::tetra::{fundamental_pair, BatteryConfig, FundamentalPair, OperatorTriple, SpectralBattery};
use tetrakit::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TkStatus {
    Ok = 0,
    NullPointer = 1,
    BadShape = 2,
    NonFinite = 3,
    NotAContraction = 4,
    NotCommuting = 5,
    ResidualTooLarge = 6,
    /// The fundamental operators fail the commutativity conditions, so no
    /// dilation model is built.
    ConditionsFailed = 7,
    DepthTooShallow = 8,
    InvalidArgument = 9,
    Json = 10,
    InternalInconsistency = 11,
    Numerical = 12,
    Panic = 13,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TkVerdict {
    Certified = 0,
    Refuted = 1,
    PassedBattery = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TkKind {
    None = 0,
    TetrablockUnitary = 1,
    TetrablockIsometry = 2,
    TetrablockContraction = 3,
}

/// Battery settings; pass null for the defaults (degree 4, 64 polynomials,
/// 10000 sup samples, seed 0, tolerance 1e-9).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TkBatteryConfig {
    pub max_deg: usize,
    pub n_polys: usize,
    pub sup_samples: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Commuting triple `(A, B, P)`.
pub struct TkTriple(OperatorTriple);

/// Fundamental operators of a triple.
pub struct TkFundamental(FundamentalPair);

/// Truncated isometric dilation.
pub struct TkModel(DilationModel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn status_of(e: &Error) -> TkStatus {
    match e {
        Error::BadShape(_) | Error::BlockStructureMismatch(_) => TkStatus::BadShape,
        Error::NonFinite => TkStatus::NonFinite,
        Error::NotAContraction { .. } => TkStatus::NotAContraction,
        Error::NotCommuting { .. } => TkStatus::NotCommuting,
        Error::ResidualTooLarge { .. } => TkStatus::ResidualTooLarge,
        Error::DepthTooShallow { .. } => TkStatus::DepthTooShallow,
        Error::BadDepth
        | Error::NotUnimodular { .. }
        | Error::InvalidConfig(_)
        | Error::SpecInvariantViolated(_)
        | Error::HypothesisFailed(_) => TkStatus::InvalidArgument,
        Error::Json(_) | Error::Io(_) => TkStatus::Json,
        Error::InternalInconsistency(_) => TkStatus::InternalInconsistency,
        Error::TriangularizationFailed { .. } | Error::NotIsometry { .. } => TkStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last-error message.
fn guard(f: impl FnOnce() -> Result<(), (TkStatus, String)>) -> TkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TkStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside tetrakit");
            TkStatus::Panic
        }
    }
}

fn lift(e: Error) -> (TkStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (TkStatus, String) {
    (TkStatus::NullPointer, "null pointer argument".into())
}

unsafe fn matrix_from(n: usize, re: *const f64, im: *const f64) -> Result<CMatrix, (TkStatus, String)> {
    if re.is_null() {
        return Err(null());
    }
    let len = n
        .checked_mul(n)
        .ok_or((TkStatus::BadShape, "dimension overflow".into()))?;
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(im, len))
    };
    let entries = (0..len).map(|k| C64::new(re[k], im.map_or(0.0, |v| v[k]))).collect();
    CMatrix::new(n, n, entries).map_err(lift)
}

unsafe fn write_matrix(m: &CMatrix, re: *mut f64, im: *mut f64) -> Result<(), (TkStatus, String)> {
    if re.is_null() || im.is_null() {
        return Err(null());
    }
    for (k, z) in m.entries().iter().enumerate() {
        *re.add(k) = z.re;
        *im.add(k) = z.im;
    }
    Ok(())
}

unsafe fn point_from(x: *const f64) -> Result<Point3, (TkStatus, String)> {
    if x.is_null() {
        return Err(null());
    }
    let v = std::slice::from_raw_parts(x, 6);
    Ok(Point3::new(
        C64::new(v[0], v[1]),
        C64::new(v[2], v[3]),
        C64::new(v[4], v[5]),
    ))
}

unsafe fn str_from<'a>(s: *const c_char) -> Result<&'a str, (TkStatus, String)> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (TkStatus::InvalidArgument, "string is not UTF-8".into()))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn battery_from(cfg: *const TkBatteryConfig) -> SpectralBattery {
    let config = if cfg.is_null() {
        BatteryConfig::default()
    } else {
        let c = unsafe { *cfg };
        BatteryConfig {
            max_deg: c.max_deg,
            n_polys: c.n_polys,
            sup_samples: c.sup_samples,
            seed: c.seed,
            tol: c.tol,
        }
    };
    SpectralBattery::new(config)
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn tk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn tk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by a `*_to_json` call.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Tetrablock membership of `x = (re0, im0, re1, im1, re2, im2)` by the
/// closed-form criteria.
///
/// # Safety
/// `x` must point to 6 doubles; outputs must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn tk_point_in_tetrablock(
    x: *const f64,
    tol: f64,
    in_open: *mut bool,
    in_closed: *mut bool,
) -> TkStatus {
    guard(|| {
        let p = point_from(x)?;
        let v = tetrablock_membership(&p, &Criterion::CLOSED_FORM, tol).map_err(lift)?;
        if !in_open.is_null() {
            *in_open = v.in_open;
        }
        if !in_closed.is_null() {
            *in_closed = v.in_closed;
        }
        Ok(())
    })
}

/// Distinguished-boundary test for `x` laid out as in `tk_point_in_tetrablock`.
///
/// # Safety
/// `x` must point to 6 doubles; `on_boundary` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tk_point_on_distinguished_boundary(
    x: *const f64,
    tol: f64,
    on_boundary: *mut bool,
) -> TkStatus {
    guard(|| {
        let p = point_from(x)?;
        if on_boundary.is_null() {
            return Err(null());
        }
        *on_boundary = tetrablock_boundary(&p, tol).on_boundary;
        Ok(())
    })
}

/// Builds a triple from three `n × n` row-major matrices. Fails with
/// `TK_STATUS_NOT_COMMUTING` unless they commute.
///
/// # Safety
/// Real parts must point to `n * n` doubles; imaginary parts likewise or
/// null; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tk_triple_new(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    p_re: *const f64,
    p_im: *const f64,
    out: *mut *mut TkTriple,
) -> TkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let a = matrix_from(n, a_re, a_im)?;
        let b = matrix_from(n, b_re, b_im)?;
        let p = matrix_from(n, p_re, p_im)?;
        let t = OperatorTriple::new(a, b, p).map_err(lift)?;
        *out = Box::into_raw(Box::new(TkTriple(t)));
        Ok(())
    })
}

/// Parses `{"A": .., "B": .., "P": ..}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tk_triple_from_json(json: *const c_char, out: *mut *mut TkTriple) -> TkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let t: OperatorTriple = serde_json::from_str(str_from(json)?).map_err(|e| lift(e.into()))?;
        *out = Box::into_raw(Box::new(TkTriple(t)));
        Ok(())
    })
}

/// # Safety
/// `t` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tk_triple_free(t: *mut TkTriple) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// # Safety
/// `t` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn tk_triple_dim(t: *const TkTriple) -> usize {
    t.as_ref().map_or(0, |t| t.0.dim())
}

/// Sampled spectral-set battery.
///
/// # Safety
/// `t` must be live; `cfg` valid or null; `verdict` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_triple_check(
    t: *const TkTriple,
    cfg: *const TkBatteryConfig,
    verdict: *mut TkVerdict,
) -> TkStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        if verdict.is_null() {
            return Err(null());
        }
        let r = battery_from(cfg).run(&t.0).map_err(lift)?;
        *verdict = match r.verdict {
            Verdict::Certified => TkVerdict::Certified,
            Verdict::Refuted => TkVerdict::Refuted,
            Verdict::PassedBattery => TkVerdict::PassedBattery,
        };
        Ok(())
    })
}

/// Classification: unitary, isometry, contraction (battery not refuted) or
/// none.
///
/// # Safety
/// `t` must be live; `cfg` valid or null; `kind` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_triple_classify(
    t: *const TkTriple,
    cfg: *const TkBatteryConfig,
    kind: *mut TkKind,
) -> TkStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        if kind.is_null() {
            return Err(null());
        }
        let c = classify_triple(&t.0, &battery_from(cfg)).map_err(lift)?;
        *kind = match c.kind {
            TripleKind::TetrablockUnitary => TkKind::TetrablockUnitary,
            TripleKind::TetrablockIsometry => TkKind::TetrablockIsometry,
            TripleKind::TetrablockContraction => TkKind::TetrablockContraction,
            TripleKind::None => TkKind::None,
        };
        Ok(())
    })
}

/// Solves the fundamental equations for `t`.
///
/// # Safety
/// `t` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_fundamental_new(t: *const TkTriple, out: *mut *mut TkFundamental) -> TkStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let fp = fundamental_pair(&t.0).map_err(lift)?;
        *out = Box::into_raw(Box::new(TkFundamental(fp)));
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tk_fundamental_free(f: *mut TkFundamental) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Rank of the defect operator `D_P`.
///
/// # Safety
/// `f` must be live or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn tk_fundamental_rank(f: *const TkFundamental) -> usize {
    f.as_ref().map_or(0, |f| f.0.dd.rank)
}

/// `max_z w(F1 + z F2)` over the unit-circle sweep.
///
/// # Safety
/// `f` must be live or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn tk_fundamental_w_sweep(f: *const TkFundamental) -> f64 {
    f.as_ref().map_or(f64::NAN, |f| f.0.w_sweep_max)
}

/// Copies `F1` (`which == 1`) or `F2` (`which == 2`) as an `n × n` operator
/// on `H` (zero off the defect space) into `re`, `im`.
///
/// # Safety
/// `f` must be live; `re` and `im` must hold `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn tk_fundamental_operator(
    f: *const TkFundamental,
    which: c_int,
    re: *mut f64,
    im: *mut f64,
) -> TkStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(null)?;
        let x = match which {
            1 => &f.0.f1,
            2 => &f.0.f2,
            _ => return Err((TkStatus::InvalidArgument, format!("which must be 1 or 2, got {which}"))),
        };
        write_matrix(&f.0.dd.embed(x), re, im)
    })
}

/// Builds the depth-`depth` dilation model of `t`. Fails with
/// `TK_STATUS_CONDITIONS_FAILED` when the fundamental operators do not
/// satisfy the commutativity conditions.
///
/// # Safety
/// `t` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_dilation_build(t: *const TkTriple, depth: usize, out: *mut *mut TkModel) -> TkStatus {
    guard(|| {
        let t = t.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let fp = fundamental_pair(&t.0).map_err(lift)?;
        let m = build_dilation(&t.0, &fp, depth).map_err(lift)?;
        if !m.conditions_ok {
            return Err((
                TkStatus::ConditionsFailed,
                format!(
                    "[F1, F2] = {:e}, [F1, F1*] - [F2, F2*] = {:e}",
                    m.commutator_residual, m.normal_difference
                ),
            ));
        }
        *out = Box::into_raw(Box::new(TkModel(m)));
        Ok(())
    })
}

/// Parses model JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_model_from_json(json: *const c_char, out: *mut *mut TkModel) -> TkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let m: DilationModel = serde_json::from_str(str_from(json)?).map_err(|e| lift(e.into()))?;
        *out = Box::into_raw(Box::new(TkModel(m)));
        Ok(())
    })
}

/// Serializes the model; free the result with `tk_string_free`.
///
/// # Safety
/// `m` must be live; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_model_to_json(m: *const TkModel, out: *mut *mut c_char) -> TkStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let s = tetrakit::json::to_canonical_string(&m.0).map_err(lift)?;
        *out = to_c_string(s);
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn tk_model_free(m: *mut TkModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the model space.
///
/// # Safety
/// `m` must be live or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn tk_model_dim(m: *const TkModel) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Worst moment residual over total degree `<= max_degree`, against the
/// triple read off the model's first block.
///
/// # Safety
/// `m` must be live; `worst` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_model_verify_moments(m: *const TkModel, max_degree: usize, worst: *mut f64) -> TkStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        if worst.is_null() {
            return Err(null());
        }
        let t = m.0.h_triple().map_err(lift)?;
        *worst = verify_moments(&m.0, &t, max_degree).map_err(lift)?;
        Ok(())
    })
}

/// Largest of the model identity residuals.
///
/// # Safety
/// `m` must be live; `worst` valid.
#[no_mangle]
pub unsafe extern "C" fn tk_model_identity_residual(m: *const TkModel, worst: *mut f64) -> TkStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        if worst.is_null() {
            return Err(null());
        }
        *worst = verify_model_identities(&m.0).values().fold(0.0, |a, &b| a.max(b));
        Ok(())
    })
}
