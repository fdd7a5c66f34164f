use std::ffi::{CStr, CString};
use std::ptr;

use hameig_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hameig_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn green_and_phi() {
    let mut v = 0.0;
    assert_eq!(hameig_green_eval(0.25, 0.5, &mut v), HameigStatus::Ok);
    assert_eq!(v, 0.125);
    assert_eq!(hameig_green_eval(1.5, 0.5, &mut v), HameigStatus::Domain);
    assert!(!last_error().is_empty());
    assert_eq!(hameig_green_eval(0.5, 0.5, ptr::null_mut()), HameigStatus::NullPointer);
    assert_eq!(hameig_phi_eval(1e9, 40, &mut v), HameigStatus::Ok);
    assert_eq!(v, 1.0 - 0.5f64.powi(40));
}

#[test]
fn const_f_round_trip() {
    let name = CString::new("const-f").unwrap();
    let mut problem = ptr::null_mut();
    assert_eq!(hameig_problem_from_catalog(name.as_ptr(), 1.0, 40, &mut problem), HameigStatus::Ok);

    let (mut pass, mut db, mut lb) = (false, 0.0, 0.0);
    assert_eq!(hameig_problem_check(problem, 0.0, &mut pass, &mut db, &mut lb), HameigStatus::Ok);
    assert!(pass);
    assert!((db - 3.0 / 32.0).abs() < 1e-10);

    let mut sol = ptr::null_mut();
    assert_eq!(hameig_solve(problem, 4.0, 65, 1e-12, &mut sol), HameigStatus::Ok);
    let n = hameig_solution_len(sol);
    let (mut t, mut u) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(hameig_solution_copy(sol, t.as_mut_ptr(), u.as_mut_ptr(), n), HameigStatus::Ok);
    assert_eq!(hameig_solution_copy(sol, t.as_mut_ptr(), u.as_mut_ptr(), n - 1), HameigStatus::InvalidArgument);
    assert!((u[n / 2] - 0.5).abs() < 1e-12 && t[n / 2] == 0.5);
    let (mut norm, mut res, mut it) = (0.0, 0.0, 0usize);
    assert_eq!(hameig_solution_info(sol, &mut norm, &mut res, &mut it), HameigStatus::Ok);
    assert!((norm - 0.5).abs() < 1e-12);
    hameig_solution_free(sol);

    let mut scan = ptr::null_mut();
    assert_eq!(hameig_scan(problem, 0.0, 32, 65, &mut scan), HameigStatus::Ok);
    assert_eq!(hameig_scan_pair_count(scan), 1);
    let mut pair = HameigPair::default();
    assert_eq!(hameig_scan_pair(scan, 0, &mut pair), HameigStatus::Ok);
    assert!((pair.lambda_star - 8.0).abs() < 1e-6 && pair.cone_ok);
    assert_eq!(hameig_scan_pair(scan, 1, &mut pair), HameigStatus::InvalidArgument);
    hameig_scan_free(scan);
    hameig_problem_free(problem);
}

#[test]
fn bad_inputs() {
    let mut problem = ptr::null_mut();
    let name = CString::new("no-such-problem").unwrap();
    assert_eq!(hameig_problem_from_catalog(name.as_ptr(), 1.0, 40, &mut problem), HameigStatus::UnknownProblem);
    assert!(last_error().contains("no-such-problem"));
    assert_eq!(hameig_problem_from_catalog(ptr::null(), 1.0, 40, &mut problem), HameigStatus::NullPointer);
    let toml = CString::new("schema = \"hameig-problem/1\"\nname = \"x\"\nr = 0\nomega = \"0\"\nf = \"1 +\"").unwrap();
    assert_eq!(hameig_problem_from_toml(toml.as_ptr(), 1.0, &mut problem), HameigStatus::InvalidArgument);
    assert!(problem.is_null());
    hameig_problem_free(ptr::null_mut());
    assert_eq!(hameig_solution_len(ptr::null()), 0);
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hameig.h")).unwrap();
    for sym in [
        "hameig_last_error",
        "hameig_green_eval",
        "hameig_problem_from_catalog",
        "hameig_problem_free",
        "hameig_solve",
        "hameig_scan_pair",
        "HAMEIG_STATUS_NON_CONVERGENCE",
        "typedef struct HameigProblem HameigProblem",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
