use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use fraccontact_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(fc_last_error()) }.to_str().unwrap().to_string()
}

fn parse(text: &str) -> (FcStatus, *mut FcScenario) {
    let c = CString::new(text).unwrap();
    let mut sc = ptr::null_mut();
    let s = unsafe { fc_scenario_parse(c.as_ptr(), &mut sc) };
    (s, sc)
}

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(fc_gamma(0.5, &mut v), FcStatus::Ok);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(fc_mittag_leffler(1.0, 1.0, -3.0, &mut v), FcStatus::Ok);
        assert!((v - (-3.0f64).exp()).abs() < 1e-15);
        assert_eq!(fc_wright(0.5, 1.0, &mut v), FcStatus::Ok);
        assert!((v - (-0.25f64).exp() / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(fc_bound(1, 2.0, 0.5, 1.0, 1.5, 1.0, &mut v), FcStatus::Ok);
        assert!((v - 1.5).abs() < 1e-15);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn scalar_errors() {
    let mut v = 7.0;
    unsafe {
        assert_eq!(fc_gamma(-2.0, &mut v), FcStatus::Domain);
        assert!(last_error().contains("pole"));
        assert_eq!(fc_mittag_leffler(1.5, 1.0, 0.0, &mut v), FcStatus::Domain);
        assert_eq!(fc_mittag_leffler(0.5, 1.0, 30.0, &mut v), FcStatus::Overflow);
        assert_eq!(fc_bound(1, 1.0, 0.5, -1.0, 1.0, 1.0, &mut v), FcStatus::Domain);
        assert_eq!(fc_gamma(1.0, ptr::null_mut()), FcStatus::NullPointer);
    }
    assert_eq!(v, 7.0);
}

#[test]
fn scenario_solve_rows() {
    let (s, sc) = parse("model.alpha = 0.5\nmodel.kappa = 0.5\nmodel.c = 2\nchain.n_max = 2\ngrid.points = 64\n");
    assert_eq!(s, FcStatus::Ok);
    let times = [0.5, 1.0, 4.0];
    unsafe {
        assert_eq!(fc_scenario_set_times(sc, times.as_ptr(), times.len()), FcStatus::Ok);
        let mut sol = ptr::null_mut();
        assert_eq!(fc_solve(sc, &mut sol), FcStatus::Ok);
        assert_eq!(fc_solution_len(sol), 6);
        let mut row = FcNormRow::default();
        for (i, t) in times.iter().enumerate() {
            assert_eq!(fc_solution_row(sol, i, &mut row), FcStatus::Ok);
            let mut e = 0.0;
            fc_mittag_leffler(0.5, 1.0, -0.5 * t.sqrt(), &mut e);
            assert_eq!(row.n, 1);
            assert!((row.max_norm - 2.0 * e).abs() < 1e-12);
        }
        assert_eq!(fc_solution_row(sol, 5, &mut row), FcStatus::Ok);
        assert_eq!((row.n, row.t), (2, 4.0));
        assert_eq!(fc_solution_row(sol, 6, &mut row), FcStatus::OutOfRange);
        fc_solution_free(sol);

        let bad = [2.0, 1.0];
        assert_eq!(fc_scenario_set_times(sc, bad.as_ptr(), 2), FcStatus::Config);
        fc_scenario_free(sc);
    }
}

#[test]
fn overflow_returns_partial_rows() {
    let (_, sc) = parse("model.alpha = 0.5\nmodel.kappa = 1.5\nchain.n_max = 1\nchain.times = 1, 2, 100000\ngrid.points = 32\n");
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(fc_solve(sc, &mut sol), FcStatus::Overflow);
        assert!(!sol.is_null());
        assert_eq!(fc_solution_len(sol), 2);
        fc_solution_free(sol);
        fc_scenario_free(sc);
    }
}

#[test]
fn bad_inputs() {
    let (s, sc) = parse("model.alpha = 1.5\nmodel.kappa = 0.5\n");
    assert_eq!(s, FcStatus::Config);
    assert!(sc.is_null());
    assert!(last_error().contains("alpha must lie in (0,1]"));

    let path = CString::new("/nonexistent/scenario.cfg").unwrap();
    let mut sc = ptr::null_mut();
    unsafe {
        assert_eq!(fc_scenario_load(path.as_ptr(), &mut sc), FcStatus::Io);
        assert_eq!(fc_scenario_parse(ptr::null(), &mut sc), FcStatus::NullPointer);
        let invalid = [0xffu8, 0];
        assert_eq!(fc_scenario_parse(invalid.as_ptr().cast(), &mut sc), FcStatus::InvalidUtf8);
        let mut sol = ptr::null_mut();
        assert_eq!(fc_solve(ptr::null(), &mut sol), FcStatus::NullPointer);
        assert!(sol.is_null());
        assert_eq!(fc_solution_len(ptr::null()), 0);
        fc_scenario_free(ptr::null_mut());
        fc_solution_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(fc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = tempfile::tempdir().unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let src = r#"#include "fraccontact.h"
int main(void) {
    FcScenario *sc = NULL;
    FcSolution *sol = NULL;
    FcNormRow row;
    double v;
    enum FcStatus s = fc_gamma(0.5, &v);
    s = fc_scenario_parse("model.alpha = 0.5\nmodel.kappa = 1\n", &sc);
    s = fc_solve(sc, &sol);
    s = fc_solution_row(sol, fc_solution_len(sol) - 1, &row);
    fc_solution_free(sol);
    fc_scenario_free(sc);
    return s == FC_STATUS_OK ? 0 : (int)s + (int)(row.n > 0) + (fc_last_error() == NULL);
}
"#;
    for (file, compiler) in [("check.c", "cc"), ("check.cpp", "c++")] {
        let path = dir.path().join(file);
        std::fs::write(&path, src).unwrap();
        let o = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-I", include])
            .arg(&path)
            .output()
            .unwrap_or_else(|e| panic!("{compiler}: {e}"));
        assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
