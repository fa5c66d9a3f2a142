use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use uicrit_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/models").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        uic_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn load(name: &str) -> *mut UicModel {
    let path = fixture(name);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { uic_model_load(path.as_ptr(), &mut m) }, UicStatus::Ok, "{}", last_error());
    assert!(!m.is_null());
    m
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(uic_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn uniform3_ui_profile() {
    let m = load("uniform3.json");
    let levels = [0.0, 1.0, 2.0, 3.0, 4.0];
    let mut values = [f64::NAN; 5];
    let mut lo = [f64::NAN; 5];
    let mut hi = [f64::NAN; 5];
    let crit = CString::new("ui").unwrap();
    let s = unsafe {
        uic_profile(
            m,
            ptr::null(),
            crit.as_ptr(),
            levels.as_ptr(),
            levels.len(),
            0,
            0,
            values.as_mut_ptr(),
            lo.as_mut_ptr(),
            hi.as_mut_ptr(),
        )
    };
    assert_eq!(s, UicStatus::Ok);
    assert_eq!(values[0], 2.0);
    assert!((values[2] - 5.0 / 3.0).abs() < 1e-15);
    assert_eq!(values[4], 0.0);
    assert_eq!(lo, values);
    assert_eq!(hi, values);
    unsafe { uic_model_free(m) };
}

#[test]
fn plugin_profile_and_phi() {
    let name = CString::new("remark-counterexample").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { uic_model_plugin(name.as_ptr(), 1000, &mut m) }, UicStatus::Ok);
    let crit = CString::new("ui").unwrap();
    let levels = [10.0, 100.0];
    let mut values = [0.0; 2];
    let s = unsafe {
        uic_profile(
            m,
            ptr::null(),
            crit.as_ptr(),
            levels.as_ptr(),
            2,
            0,
            0,
            values.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(s, UicStatus::Ok);
    assert!((values[0] - 1.0 / 10f64.ln()).abs() < 1e-12);
    assert!((values[1] - 1.0 / 100f64.ln()).abs() < 1e-12);

    let mut ts = [0u64; 3];
    let mut written = 0usize;
    let s = unsafe { uic_phi_find(m, ptr::null(), 3, 1 << 20, ts.as_mut_ptr(), ts.len(), &mut written) };
    assert_eq!(s, UicStatus::Ok);
    assert_eq!(written, 3);
    assert_eq!(ts, [2, 6, 138]);
    unsafe { uic_model_free(m) };
}

#[test]
fn phi_find_reports_cap_and_buffer() {
    let m = load("uniform0to4.json");
    let mut ts = [0u64; 3];
    let mut written = 0usize;
    let s = unsafe { uic_phi_find(m, ptr::null(), 3, 1 << 20, ts.as_mut_ptr(), 3, &mut written) };
    assert_eq!(s, UicStatus::Ok);
    assert_eq!(ts, [3, 4, 5]);

    let s = unsafe { uic_phi_find(m, ptr::null(), 3, 1 << 20, ts.as_mut_ptr(), 2, &mut written) };
    assert_eq!(s, UicStatus::BufferTooSmall);
    assert_eq!(written, 3);

    let s = unsafe { uic_phi_find(m, ptr::null(), 3, 3, ts.as_mut_ptr(), 3, &mut written) };
    assert_eq!(s, UicStatus::SearchCap);
    assert!(last_error().contains("last profile value 0.2"), "{}", last_error());
    unsafe { uic_model_free(m) };
}

#[test]
fn phi_and_expr_eval() {
    let ts = [3u64, 4, 5];
    let mut out = 0.0;
    assert_eq!(unsafe { uic_phi_eval(ts.as_ptr(), 3, 6.7, &mut out) }, UicStatus::Ok);
    assert_eq!(out, 6.0);
    let bad = [3u64, 3];
    assert_eq!(unsafe { uic_phi_eval(bad.as_ptr(), 2, 1.0, &mut out) }, UicStatus::InvalidArgument);

    let e = CString::new("1 - 1/(n*ln(n))").unwrap();
    assert_eq!(unsafe { uic_expr_eval(e.as_ptr(), 2, &mut out) }, UicStatus::Ok);
    assert!((out - (1.0 - 1.0 / (2.0 * 2f64.ln()))).abs() < 1e-15);
    let e = CString::new("ln(0)").unwrap();
    assert_eq!(unsafe { uic_expr_eval(e.as_ptr(), 0, &mut out) }, UicStatus::Eval);
    let e = CString::new("2 +").unwrap();
    assert_eq!(unsafe { uic_expr_eval(e.as_ptr(), 0, &mut out) }, UicStatus::Expr);
    assert!(last_error().contains("offset 3"));
}

#[test]
fn error_codes() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { uic_model_load(ptr::null(), &mut m) }, UicStatus::NullPointer);
    let missing = fixture("does-not-exist.json");
    assert_eq!(unsafe { uic_model_load(missing.as_ptr(), &mut m) }, UicStatus::Io);
    assert!(m.is_null());
    let invalid = fixture("invalid/normalization.json");
    assert_eq!(unsafe { uic_model_load(invalid.as_ptr(), &mut m) }, UicStatus::Model);
    assert!(last_error().contains("/measures/P/weights"));
    let bad_utf8 = [0xffu8 as c_char, 0];
    assert_eq!(unsafe { uic_model_load(bad_utf8.as_ptr(), &mut m) }, UicStatus::InvalidUtf8);
    let name = CString::new("nope").unwrap();
    assert_eq!(unsafe { uic_model_plugin(name.as_ptr(), 10, &mut m) }, UicStatus::Model);

    let model = load("uniform3.json");
    let crit = CString::new("bogus").unwrap();
    let mut v = 0.0;
    let level = 1.0;
    let s = unsafe {
        uic_profile(model, ptr::null(), crit.as_ptr(), &level, 1, 0, 0, &mut v, ptr::null_mut(), ptr::null_mut())
    };
    assert_eq!(s, UicStatus::InvalidArgument);
    let crit = CString::new("ui").unwrap();
    let s = unsafe {
        uic_profile(model, ptr::null(), crit.as_ptr(), &level, 1, 0, 0, ptr::null_mut(), ptr::null_mut(), ptr::null_mut())
    };
    assert_eq!(s, UicStatus::NullPointer);
    let s = unsafe {
        uic_profile(ptr::null(), ptr::null(), crit.as_ptr(), &level, 1, 0, 0, &mut v, ptr::null_mut(), ptr::null_mut())
    };
    assert_eq!(s, UicStatus::NullPointer);
    unsafe {
        uic_model_free(model);
        uic_model_free(ptr::null_mut());
    }
}

#[test]
fn error_message_is_truncated_and_cleared() {
    let e = CString::new("sqrt(2)").unwrap();
    let mut out = 0.0;
    unsafe { uic_expr_eval(e.as_ptr(), 0, &mut out) };
    let mut small = [0 as c_char; 8];
    let full = unsafe { uic_last_error_message(small.as_mut_ptr(), small.len()) };
    assert!(full > 7);
    let head = unsafe { CStr::from_ptr(small.as_ptr()) };
    assert_eq!(head.to_bytes().len(), 7);
    assert_eq!(unsafe { uic_last_error_message(ptr::null_mut(), 0) }, full);

    let ok = CString::new("1").unwrap();
    unsafe { uic_expr_eval(ok.as_ptr(), 0, &mut out) };
    assert_eq!(unsafe { uic_last_error_message(ptr::null_mut(), 0) }, 0);
}

#[test]
fn header_declares_the_api_and_compiles() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = std::fs::read_to_string(dir.join("uicrit.h")).unwrap();
    for name in [
        "uic_version",
        "uic_last_error_message",
        "uic_model_load",
        "uic_model_plugin",
        "uic_model_free",
        "uic_profile",
        "uic_phi_find",
        "uic_phi_eval",
        "uic_expr_eval",
        "UIC_STATUS_BUFFER_TOO_SMALL",
        "typedef struct UicModel UicModel;",
    ] {
        assert!(header.contains(name), "{name}");
    }
    let Ok(cc) = which_cc() else { return };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"uicrit.h\"\nint main(void) {\n  UicModel *m = 0;\n  UicStatus s = uic_model_plugin(\"remark-counterexample\", 10, &m);\n  uic_model_free(m);\n  return s == UIC_STATUS_OK ? 0 : 1;\n}\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&dir)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else { return };
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libuicrit_ffi.a");
    if !lib.exists() || !cfg!(target_os = "linux") {
        return;
    }
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    let bin = tmp.path().join("main");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "uicrit.h"

int main(int argc, char **argv) {
  UicModel *m = NULL;
  if (argc < 2 || uic_model_load(argv[1], &m) != UIC_STATUS_OK) return 2;
  double levels[3] = {0.0, 2.0, 4.0};
  double values[3];
  UicStatus s = uic_profile(m, NULL, "ui", levels, 3, 0, 0, values, NULL, NULL);
  uic_model_free(m);
  if (s != UIC_STATUS_OK) return 3;
  printf("%.17g %.17g %.17g\n", values[0], values[1], values[2]);
  char msg[64];
  double out;
  if (uic_expr_eval("ln(0)", 0, &out) != UIC_STATUS_EVAL) return 4;
  if (uic_last_error_message(msg, sizeof msg) == 0) return 5;
  return 0;
}
"#,
    )
    .unwrap();
    let built = Command::new(cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(built.success());
    let out = Command::new(&bin).arg(fixture("uniform3.json").to_str().unwrap()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "2 1.6666666666666665 0\n");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
