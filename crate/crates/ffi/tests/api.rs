//! Exercises the C ABI from Rust through raw pointers, as a foreign caller would.

use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use framedil_ffi::*;

fn last_error() -> String {
    let p = fd_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn problem_text(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/problems").join(name);
    std::fs::read_to_string(p).unwrap()
}

/// Interleaved row-major complex product `a · b` for square `n × n` inputs.
fn mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n * n];
    for i in 0..n {
        for j in 0..n {
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..n {
                let (ar, ai) = (a[2 * (i * n + k)], a[2 * (i * n + k) + 1]);
                let (br, bi) = (b[2 * (k * n + j)], b[2 * (k * n + j) + 1]);
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            out[2 * (i * n + j)] = re;
            out[2 * (i * n + j) + 1] = im;
        }
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn identity(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; 2 * n * n];
    for i in 0..n {
        out[2 * (i * n + i)] = 1.0;
    }
    out
}

#[test]
fn version_and_default_tolerance() {
    let v = unsafe { CStr::from_ptr(fd_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let t = fd_tolerance_default();
    assert_eq!((t.rel, t.abs), (1e-9, 1e-12));
}

#[test]
fn null_pointers_are_rejected_with_a_message() {
    let tol = fd_tolerance_default();
    unsafe {
        let mut pd = ptr::null_mut();
        assert_eq!(fd_naimark_dilate(ptr::null(), tol, &mut pd), FdStatus::NullPointer);
        assert!(pd.is_null());
        assert!(last_error().to_lowercase().contains("povm"), "{}", last_error());
        assert_eq!(fd_pvm_k_dim(ptr::null()), 0);
        assert_eq!(fd_dilation_rank(ptr::null()), 0);
        let mut code = 0;
        assert_eq!(fd_run_problem_json(ptr::null(), ptr::null_mut(), &mut code), FdStatus::NullPointer);
        let mut om = ptr::null_mut();
        assert_eq!(fd_operator_map_from_json(ptr::null(), &mut om), FdStatus::NullPointer);
        // freeing null is a no-op
        fd_framing_free(ptr::null_mut());
        fd_povm_free(ptr::null_mut());
        fd_pvm_free(ptr::null_mut());
        fd_operator_map_free(ptr::null_mut());
        fd_dilation_free(ptr::null_mut());
        fd_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_tolerance_is_an_invalid_argument() {
    let atoms = [0.5, 0.0, 0.5, 0.0];
    let bad = FdTolerance { rel: -1.0, abs: 1e-12 };
    let mut povm = ptr::null_mut();
    let status = unsafe { fd_povm_new(1, 2, atoms.as_ptr(), bad, &mut povm) };
    assert_eq!(status, FdStatus::InvalidArgument);
    assert!(povm.is_null());
}

#[test]
fn framing_of_an_orthonormal_basis() {
    // g_k = h_k = e_k in C^2
    let basis = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let tol = fd_tolerance_default();
    unsafe {
        let mut fr = ptr::null_mut();
        assert_eq!(fd_framing_new(2, 2, basis.as_ptr(), basis.as_ptr(), &mut fr), FdStatus::Ok);
        let mut dim = 0;
        assert_eq!(fd_framing_fmax_dim(fr, tol, &mut dim), FdStatus::Ok);
        assert_eq!(dim, 2);
        let mut s = [0.0; 8];
        assert_eq!(fd_framing_synthesis(fr, s.as_mut_ptr(), 8), FdStatus::Ok);
        assert!(max_diff(&s, &identity(2)) < 1e-15);
        assert_eq!(fd_framing_synthesis(fr, s.as_mut_ptr(), 7), FdStatus::BufferTooSmall);
        assert!(last_error().contains("8 needed"));
        fd_framing_free(fr);
    }
}

#[test]
fn naimark_projections_compress_to_the_atoms() {
    // two-outcome qubit POVM: diag(0.7, 0.2) and diag(0.3, 0.8)
    let mut data = [0.0; 16];
    for (k, v) in [(0, 0.7), (3, 0.2), (4, 0.3), (7, 0.8)] {
        data[2 * k] = v;
    }
    let tol = fd_tolerance_default();
    unsafe {
        let mut povm = ptr::null_mut();
        assert_eq!(fd_povm_new(2, 2, data.as_ptr(), tol, &mut povm), FdStatus::Ok);
        let mut pd = ptr::null_mut();
        assert_eq!(fd_naimark_dilate(povm, tol, &mut pd), FdStatus::Ok);
        fd_povm_free(povm);
        let k = fd_pvm_k_dim(pd);
        assert!(k >= 2);

        let mut v = vec![0.0; 2 * k * 2];
        assert_eq!(fd_pvm_v(pd, v.as_mut_ptr(), v.len()), FdStatus::Ok);
        let proj = |mask| {
            let mut p = vec![0.0; 2 * k * k];
            assert_eq!(fd_pvm_projection(pd, mask, p.as_mut_ptr(), p.len()), FdStatus::Ok);
            p
        };
        let (p1, p2, p12) = (proj(1), proj(2), proj(3));
        assert!(max_diff(&mul(&p1, &p1, k), &p1) < 1e-10);
        assert!(max_diff(&mul(&p1, &p2, k), &vec![0.0; 2 * k * k]) < 1e-10);
        let sum: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
        assert!(max_diff(&sum, &p12) < 1e-10);

        // V* P(1) V = E_1, computed entrywise
        for i in 0..2 {
            for j in 0..2 {
                let (mut re, mut im) = (0.0, 0.0);
                for a in 0..k {
                    for b in 0..k {
                        let (vr, vi) = (v[2 * (a * 2 + i)], -v[2 * (a * 2 + i) + 1]);
                        let (pr, pi) = (p1[2 * (a * k + b)], p1[2 * (a * k + b) + 1]);
                        let (wr, wi) = (v[2 * (b * 2 + j)], v[2 * (b * 2 + j) + 1]);
                        let (xr, xi) = (vr * pr - vi * pi, vr * pi + vi * pr);
                        re += xr * wr - xi * wi;
                        im += xr * wi + xi * wr;
                    }
                }
                let idx = 2 * (i * 2 + j);
                assert!((re - data[idx]).abs() < 1e-10 && (im - data[idx + 1]).abs() < 1e-10);
            }
        }

        let mut bad = vec![0.0; 2 * k * k];
        assert_eq!(fd_pvm_projection(pd, 4, bad.as_mut_ptr(), bad.len()), FdStatus::InvalidArgument);

        let (mut passed, mut worst) = (false, f64::NAN);
        assert_eq!(fd_pvm_verify(pd, tol, &mut passed, &mut worst), FdStatus::Ok);
        assert!(passed && worst < 1e-10);
        fd_pvm_free(pd);
    }
}

#[test]
fn non_psd_atom_is_rejected() {
    let data = [-0.5, 0.0, 1.5, 0.0];
    let mut povm = ptr::null_mut();
    let status = unsafe { fd_povm_new(1, 2, data.as_ptr(), fd_tolerance_default(), &mut povm) };
    assert_eq!(status, FdStatus::InvalidArgument);
    assert!(last_error().contains("atom 0"), "{}", last_error());
}

#[test]
fn dilation_from_json_is_a_unitary_representation() {
    let problem: serde_json::Value = serde_json::from_str(&problem_text("z2_swap.json")).unwrap();
    let json = CString::new(problem["payload"].to_string()).unwrap();
    let tol = fd_tolerance_default();
    unsafe {
        let mut om = ptr::null_mut();
        assert_eq!(fd_operator_map_from_json(json.as_ptr(), &mut om), FdStatus::Ok);
        let mut dil = ptr::null_mut();
        assert_eq!(fd_dilation_build(om, tol, &mut dil), FdStatus::Ok);
        fd_operator_map_free(om);
        let r = fd_dilation_rank(dil);
        assert!(r > 0);
        let mut phi = vec![0.0; 2 * r * r];
        assert_eq!(fd_dilation_phi(dil, 1, phi.as_mut_ptr(), phi.len()), FdStatus::Ok);
        assert!(max_diff(&mul(&phi, &phi, r), &identity(r)) < 1e-9);
        assert_eq!(fd_dilation_phi(dil, 2, phi.as_mut_ptr(), phi.len()), FdStatus::InvalidArgument);
        let mut passed = false;
        assert_eq!(fd_dilation_verify(dil, tol, &mut passed), FdStatus::Ok);
        assert!(passed);
        fd_dilation_free(dil);
    }
}

#[test]
fn non_positive_map_fails_to_dilate() {
    let problem: serde_json::Value = serde_json::from_str(&problem_text("z2_not_positive.json")).unwrap();
    let json = CString::new(problem["payload"].to_string()).unwrap();
    unsafe {
        let mut om = ptr::null_mut();
        assert_eq!(fd_operator_map_from_json(json.as_ptr(), &mut om), FdStatus::Ok);
        let mut dil = ptr::null_mut();
        let status = fd_dilation_build(om, fd_tolerance_default(), &mut dil);
        assert_eq!(status, FdStatus::NotPositiveDefinite);
        assert!(dil.is_null());
        fd_operator_map_free(om);
    }
}

#[test]
fn malformed_operator_map_json() {
    let json = CString::new(r#"{"semigroup": 3}"#).unwrap();
    let mut om = ptr::null_mut();
    let status = unsafe { fd_operator_map_from_json(json.as_ptr(), &mut om) };
    assert_eq!(status, FdStatus::InvalidArgument);
    assert!(om.is_null());
}

fn run_problem(text: &str) -> (FdStatus, i32, Option<serde_json::Value>) {
    let c = CString::new(text).unwrap();
    let mut report = ptr::null_mut();
    let mut code = -1;
    let status = unsafe { fd_run_problem_json(c.as_ptr(), &mut report, &mut code) };
    let json = (!report.is_null()).then(|| {
        let v = serde_json::from_str(unsafe { CStr::from_ptr(report) }.to_str().unwrap()).unwrap();
        unsafe { fd_string_free(report) };
        v
    });
    (status, code, json)
}

#[test]
fn run_problem_json_mirrors_exit_codes() {
    let (status, code, report) = run_problem(&problem_text("coin.json"));
    assert_eq!((status, code), (FdStatus::Ok, 0));
    assert_eq!(report.unwrap()["passed"], true);

    let (status, code, report) = run_problem(&problem_text("z2_not_positive.json"));
    assert_eq!((status, code), (FdStatus::Ok, 1));
    let report = report.unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["sections"][0]["section"], "positive_definite");

    let (status, code, report) = run_problem(&problem_text("malformed.json"));
    assert_eq!((status, code), (FdStatus::InvalidArgument, 2));
    assert!(report.is_none());
    assert!(last_error().contains("payload"), "{}", last_error());
}
