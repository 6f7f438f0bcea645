use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use tetrakit_ffi::*;

fn scalar_triple(a: f64, b: f64, p: f64) -> *mut TkTriple {
    let mut t = ptr::null_mut();
    let s = unsafe { tk_triple_new(1, &a, ptr::null(), &b, ptr::null(), &p, ptr::null(), &mut t) };
    assert_eq!(s, TkStatus::Ok);
    t
}

#[test]
fn scalar_fundamental_and_model() {
    let t = scalar_triple(0.5, 0.5, 0.25);
    unsafe {
        assert_eq!(tk_triple_dim(t), 1);
        let mut f = ptr::null_mut();
        assert_eq!(tk_fundamental_new(t, &mut f), TkStatus::Ok);
        assert_eq!(tk_fundamental_rank(f), 1);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tk_fundamental_operator(f, 1, &mut re, &mut im), TkStatus::Ok);
        assert!((re - 0.4).abs() < 1e-12 && im.abs() < 1e-15);
        assert_eq!(
            tk_fundamental_operator(f, 3, &mut re, &mut im),
            TkStatus::InvalidArgument
        );
        assert!((tk_fundamental_w_sweep(f) - 0.8).abs() < 1e-6);

        let mut m = ptr::null_mut();
        assert_eq!(tk_dilation_build(t, 5, &mut m), TkStatus::Ok);
        assert_eq!(tk_model_dim(m), 6);
        let mut worst = 1.0;
        assert_eq!(tk_model_verify_moments(m, 4, &mut worst), TkStatus::Ok);
        assert!(worst < 1e-12);
        assert_eq!(tk_model_verify_moments(m, 5, &mut worst), TkStatus::DepthTooShallow);
        assert_eq!(tk_model_identity_residual(m, &mut worst), TkStatus::Ok);
        assert!(worst < 1e-12);

        let mut json = ptr::null_mut();
        assert_eq!(tk_model_to_json(m, &mut json), TkStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(tk_model_from_json(json, &mut back), TkStatus::Ok);
        assert_eq!(tk_model_dim(back), 6);
        tk_string_free(json);
        tk_model_free(back);
        tk_model_free(m);
        tk_fundamental_free(f);
        tk_triple_free(t);
    }
}

#[test]
fn errors_set_status_and_message() {
    let x = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let y = [0.0, 0.0, 1.0, 0.0, 1.0, 0.0];
    let mut t = ptr::null_mut();
    unsafe {
        let s = tk_triple_new(
            2,
            x[..4].as_ptr(),
            ptr::null(),
            y[..4].as_ptr(),
            ptr::null(),
            x[..4].as_ptr(),
            ptr::null(),
            &mut t,
        );
        assert_eq!(s, TkStatus::NotCommuting);
        assert!(t.is_null());
        let msg = CStr::from_ptr(tk_last_error()).to_string_lossy();
        assert!(msg.contains("commute"), "{msg}");

        assert_eq!(
            tk_triple_new(
                1,
                ptr::null(),
                ptr::null(),
                ptr::null(),
                ptr::null(),
                ptr::null(),
                ptr::null(),
                &mut t
            ),
            TkStatus::NullPointer
        );
        let bad = CString::new("{\"A\": 1}").unwrap();
        assert_eq!(tk_triple_from_json(bad.as_ptr(), &mut t), TkStatus::Json);

        let big = scalar_triple(0.0, 0.0, 2.0);
        let mut f = ptr::null_mut();
        assert_eq!(tk_fundamental_new(big, &mut f), TkStatus::NotAContraction);
        tk_triple_free(big);

        tk_triple_free(ptr::null_mut());
        assert_eq!(tk_triple_dim(ptr::null()), 0);
    }
}

#[test]
fn points_and_classification() {
    let (mut open, mut closed) = (false, false);
    unsafe {
        let origin = [0.0; 6];
        assert_eq!(
            tk_point_in_tetrablock(origin.as_ptr(), 1e-9, &mut open, &mut closed),
            TkStatus::Ok
        );
        assert!(open && closed);
        let far = [2.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(
            tk_point_in_tetrablock(far.as_ptr(), 1e-9, &mut open, &mut closed),
            TkStatus::Ok
        );
        assert!(!closed);
        let one = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let mut on = false;
        assert_eq!(
            tk_point_on_distinguished_boundary(one.as_ptr(), 1e-9, &mut on),
            TkStatus::Ok
        );
        assert!(on);

        let cfg = TkBatteryConfig {
            max_deg: 3,
            n_polys: 8,
            sup_samples: 500,
            seed: 0,
            tol: 1e-9,
        };
        let t = scalar_triple(1.0, 1.0, 1.0);
        let mut kind = TkKind::None;
        assert_eq!(tk_triple_classify(t, &cfg, &mut kind), TkStatus::Ok);
        assert_eq!(kind, TkKind::TetrablockUnitary);
        tk_triple_free(t);

        let t = scalar_triple(0.5, 0.5, 0.25);
        let mut v = TkVerdict::Refuted;
        assert_eq!(tk_triple_check(t, &cfg, &mut v), TkStatus::Ok);
        assert_eq!(v, TkVerdict::Certified);
        tk_triple_free(t);

        let version = CStr::from_ptr(tk_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}

/// The generated header compiles as C, and the smoke program links against
/// the static library when cargo has built it next to this test binary.
#[test]
fn header_compiles_and_links() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .output()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let exe = std::env::current_exe().unwrap();
    let lib = exe
        .parent()
        .and_then(|d| d.parent())
        .map(|d| d.join("libtetrakit_ffi.a"));
    let Some(lib) = lib.filter(|l| l.exists()) else {
        eprintln!("static library not built; skipping link step");
        return;
    };
    let bin = tempfile_path();
    let out = Command::new("cc")
        .args(["-std=c99", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    let _ = std::fs::remove_file(&bin);
    assert!(run.status.success());
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("F1 = 0.400000000000"), "{stdout}");
    assert!(stdout.contains("dim = 6, moments = 0"), "{stdout}");
}

fn tempfile_path() -> PathBuf {
    std::env::temp_dir().join(format!("tetrakit_smoke_{}", std::process::id()))
}
