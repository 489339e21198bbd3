//! C ABI for `framedil`.
//!
//! Objects are opaque handles created by `fd_*_new`/`fd_*_build` functions
//! and released by the matching `fd_*_free`. Every fallible call returns an
//! [`FdStatus`]; on failure a message is available from [`fd_last_error`]
//! until the next failing call on the same thread.
//!
//! Complex arrays are interleaved `(re, im)` pairs of `double`. Matrices are
//! row-major; a matrix of shape `r × c` occupies `2·r·c` doubles.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use framedil::cli::{self, Flags};
use framedil::dilation::{self, Dilation, OperatorMap};
use framedil::framing::{self, Framing};
use framedil::naimark::{self, Povm, PvmDilation};
use framedil::numlin::{CMatrix, CVector, Tolerance};
use framedil::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    NotPositiveDefinite = 4,
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdTolerance {
    pub rel: f64,
    pub abs: f64,
}

pub struct FdFraming {
    inner: Framing,
}

pub struct FdPovm {
    inner: Povm,
}

pub struct FdOperatorMap {
    inner: OperatorMap,
}

pub struct FdDilation {
    map: OperatorMap,
    inner: Dilation,
}

pub struct FdPvmDilation {
    inner: PvmDilation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(FdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidTolerance { .. }
            | Error::IndexOutOfRange { .. }
            | Error::TooManyAtoms { .. }
            | Error::AtomNotHermitian { .. }
            | Error::AtomNotPsd { .. } => {
                FdStatus::InvalidArgument
            }
            Error::Shape(_) | Error::DimensionMismatch(_) | Error::NonFinite(_) | Error::InvalidSemigroup(_) => {
                FdStatus::Shape
            }
            Error::NotPositiveDefinite { .. } | Error::PositivityBroken { .. } => FdStatus::NotPositiveDefinite,
            _ => FdStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: FdStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, records any failure and converts panics to [`FdStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FdStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FdStatus::Panic
        }
    }
}

fn tolerance(t: FdTolerance) -> Result<Tolerance, Failure> {
    Ok(Tolerance::new(t.rel, t.abs)?)
}

/// # Safety
/// `p` is null or valid for reads of `len` doubles.
unsafe fn doubles<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(FdStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn complex_at(data: &[f64], k: usize) -> Complex64 {
    Complex64::new(data[2 * k], data[2 * k + 1])
}

fn matrix(data: &[f64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |r, c| complex_at(data, r * cols + c))
}

/// # Safety
/// `out` is null or valid for writes of `out_len` doubles.
unsafe fn write_matrix(m: &CMatrix, out: *mut f64, out_len: usize) -> Result<(), Failure> {
    let need = 2 * m.nrows() * m.ncols();
    if out.is_null() {
        return fail(FdStatus::NullPointer, "output buffer is null");
    }
    if out_len < need {
        return fail(
            FdStatus::BufferTooSmall,
            format!("output buffer holds {out_len} doubles, {need} needed"),
        );
    }
    let buf = std::slice::from_raw_parts_mut(out, need);
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            let k = 2 * (r * m.ncols() + c);
            buf[k] = z.re;
            buf[k + 1] = z.im;
        }
    }
    Ok(())
}

/// # Safety
/// `p` is null or a valid, exclusive pointer.
unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(FdStatus::NullPointer, "output pointer is null"), Ok)
}

/// # Safety
/// `p` is null or points to a live handle.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .map_or_else(|| fail(FdStatus::NullPointer, format!("{what} handle is null")), Ok)
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return fail(FdStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(FdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// # Safety
/// `p` is null or was produced by [`boxed`] and not yet freed.
unsafe fn free_boxed<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn fd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn fd_tolerance_default() -> FdTolerance {
    let t = Tolerance::default();
    FdTolerance { rel: t.rel, abs: t.abs }
}

/// Framing of `len` pairs in `C^dim`. `g` and `h` each hold `len` vectors
/// of `dim` complex entries, one vector after another.
///
/// # Safety
/// `g` and `h` are valid for `2·dim·len` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_framing_new(
    dim: usize,
    len: usize,
    g: *const f64,
    h: *const f64,
    out: *mut *mut FdFraming,
) -> FdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let n = 2 * dim * len;
        let (g, h) = (doubles(g, n, "g")?, doubles(h, n, "h")?);
        let vectors = |data: &[f64]| -> Vec<CVector> {
            (0..len)
                .map(|k| CVector::from_fn(dim, |i, _| complex_at(data, k * dim + i)))
                .collect()
        };
        let inner = Framing::new(dim, vectors(g), vectors(h))?;
        *out = boxed(FdFraming { inner });
        Ok(())
    })
}

/// # Safety
/// `fr` is null or a live framing handle.
#[no_mangle]
pub unsafe extern "C" fn fd_framing_free(fr: *mut FdFraming) {
    free_boxed(fr);
}

/// Writes the `dim × dim` synthesis matrix `Σ h_n g_n*`.
///
/// # Safety
/// `fr` is a live handle; `out` is valid for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_framing_synthesis(fr: *const FdFraming, out: *mut f64, out_len: usize) -> FdStatus {
    guard(|| {
        let fr = handle(fr, "framing")?;
        write_matrix(&framing::synthesis_operator(&fr.inner), out, out_len)
    })
}

/// Dimension of `F_max`.
///
/// # Safety
/// `fr` is a live handle; `dim_out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_framing_fmax_dim(
    fr: *const FdFraming,
    tol: FdTolerance,
    dim_out: *mut usize,
) -> FdStatus {
    guard(|| {
        let fr = handle(fr, "framing")?;
        let out = out_ptr(dim_out)?;
        *out = framing::compute_fmax(&fr.inner, &tolerance(tol)?).rank();
        Ok(())
    })
}

/// POVM with `atoms` outcomes on `C^dim`; `data` holds the atoms one after
/// another, each a row-major `dim × dim` matrix.
///
/// # Safety
/// `data` is valid for `2·atoms·dim·dim` doubles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_povm_new(
    dim: usize,
    atoms: usize,
    data: *const f64,
    tol: FdTolerance,
    out: *mut *mut FdPovm,
) -> FdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let block = 2 * dim * dim;
        let data = doubles(data, block * atoms, "atoms")?;
        let mats = (0..atoms)
            .map(|a| matrix(&data[a * block..(a + 1) * block], dim, dim))
            .collect();
        let inner = Povm::new(dim, mats, &tolerance(tol)?)?;
        *out = boxed(FdPovm { inner });
        Ok(())
    })
}

/// # Safety
/// `p` is null or a live POVM handle.
#[no_mangle]
pub unsafe extern "C" fn fd_povm_free(p: *mut FdPovm) {
    free_boxed(p);
}

/// Naimark dilation of a POVM.
///
/// # Safety
/// `p` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_naimark_dilate(
    p: *const FdPovm,
    tol: FdTolerance,
    out: *mut *mut FdPvmDilation,
) -> FdStatus {
    guard(|| {
        let p = handle(p, "POVM")?;
        let out = out_ptr(out)?;
        let inner = naimark::naimark_dilate(&p.inner, &tolerance(tol)?)?;
        *out = boxed(FdPvmDilation { inner });
        Ok(())
    })
}

/// # Safety
/// `pd` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_pvm_free(pd: *mut FdPvmDilation) {
    free_boxed(pd);
}

/// Dimension of the dilation space `K`, or 0 for a null handle.
///
/// # Safety
/// `pd` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_pvm_k_dim(pd: *const FdPvmDilation) -> usize {
    pd.as_ref().map_or(0, |pd| pd.inner.k_dim())
}

/// Writes the `k × k` projection `Φ(σ)` for the subset with bitmask `mask`.
///
/// # Safety
/// `pd` is a live handle; `out` is valid for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_pvm_projection(
    pd: *const FdPvmDilation,
    mask: usize,
    out: *mut f64,
    out_len: usize,
) -> FdStatus {
    guard(|| {
        let pd = &handle(pd, "dilation")?.inner;
        let n = pd.projections().len();
        if mask >= n {
            return fail(FdStatus::InvalidArgument, format!("mask {mask} out of range for {n} subsets"));
        }
        write_matrix(pd.projection(mask), out, out_len)
    })
}

/// Writes `V`, a `k × dim` matrix with `φ(σ) = V*·Φ(σ)·V`.
///
/// # Safety
/// `pd` is a live handle; `out` is valid for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_pvm_v(pd: *const FdPvmDilation, out: *mut f64, out_len: usize) -> FdStatus {
    guard(|| write_matrix(handle(pd, "dilation")?.inner.v(), out, out_len))
}

/// Runs every projection-valued-measure check; `passed_out` receives the
/// verdict and `max_residual_out`, if not null, the largest residual.
///
/// # Safety
/// `pd` is a live handle; `passed_out` is writable; `max_residual_out` is
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn fd_pvm_verify(
    pd: *const FdPvmDilation,
    tol: FdTolerance,
    passed_out: *mut bool,
    max_residual_out: *mut f64,
) -> FdStatus {
    guard(|| {
        let pd = handle(pd, "dilation")?;
        let passed = out_ptr(passed_out)?;
        let r = naimark::verify_pvm(&pd.inner, &tolerance(tol)?)?;
        *passed = r.passed;
        if let Some(m) = max_residual_out.as_mut() {
            *m = [
                r.idempotency,
                r.self_adjointness,
                r.commutation,
                r.multiplicativity,
                r.additivity,
                r.factorization,
            ]
            .into_iter()
            .fold(0.0, f64::max);
        }
        Ok(())
    })
}

/// Operator map from its JSON form
/// `{"semigroup": …, "dimF": …, "dimE": …, "phi": {…}}`.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_operator_map_from_json(json: *const c_char, out: *mut *mut FdOperatorMap) -> FdStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let inner: OperatorMap = serde_json::from_str(text(json, "json")?)
            .map_err(|e| Failure(FdStatus::InvalidArgument, e.to_string()))?;
        inner.semigroup().ensure_valid()?;
        *out = boxed(FdOperatorMap { inner });
        Ok(())
    })
}

/// # Safety
/// `om` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_operator_map_free(om: *mut FdOperatorMap) {
    free_boxed(om);
}

/// Minimal dilation of a positive-definite operator map.
///
/// # Safety
/// `om` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_dilation_build(
    om: *const FdOperatorMap,
    tol: FdTolerance,
    out: *mut *mut FdDilation,
) -> FdStatus {
    guard(|| {
        let om = handle(om, "operator map")?;
        let out = out_ptr(out)?;
        let inner = dilation::build_dilation(&om.inner, &tolerance(tol)?)?;
        *out = boxed(FdDilation {
            map: om.inner.clone(),
            inner,
        });
        Ok(())
    })
}

/// # Safety
/// `dil` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_dilation_free(dil: *mut FdDilation) {
    free_boxed(dil);
}

/// Dimension of the dilation space, or 0 for a null handle.
///
/// # Safety
/// `dil` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fd_dilation_rank(dil: *const FdDilation) -> usize {
    dil.as_ref().map_or(0, |d| d.inner.rank())
}

/// Writes the `r × r` matrix `Φ(u)`.
///
/// # Safety
/// `dil` is a live handle; `out` is valid for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fd_dilation_phi(dil: *const FdDilation, u: usize, out: *mut f64, out_len: usize) -> FdStatus {
    guard(|| {
        let d = &handle(dil, "dilation")?.inner;
        let n = d.phis().len();
        if u >= n {
            return fail(FdStatus::InvalidArgument, format!("element {u} out of range for {n} elements"));
        }
        write_matrix(d.phi(u), out, out_len)
    })
}

/// Verifies the dilation identities; `passed_out` receives the verdict.
///
/// # Safety
/// `dil` is a live handle; `passed_out` is writable.
#[no_mangle]
pub unsafe extern "C" fn fd_dilation_verify(dil: *const FdDilation, tol: FdTolerance, passed_out: *mut bool) -> FdStatus {
    guard(|| {
        let d = handle(dil, "dilation")?;
        let passed = out_ptr(passed_out)?;
        *passed = dilation::verify_dilation(&d.inner, &d.map, &tolerance(tol)?)?.passed;
        Ok(())
    })
}

/// Runs a problem file given as JSON text, as the command line would.
/// `report_out` receives the JSON report (free with [`fd_string_free`]) and
/// `exit_code_out` the command-line exit code. Malformed input yields
/// [`FdStatus::InvalidArgument`], exit code 2 and no report.
///
/// # Safety
/// `problem` is a NUL-terminated string; both outputs are writable.
#[no_mangle]
pub unsafe extern "C" fn fd_run_problem_json(
    problem: *const c_char,
    report_out: *mut *mut c_char,
    exit_code_out: *mut i32,
) -> FdStatus {
    guard(|| {
        let report_out = out_ptr(report_out)?;
        let code = out_ptr(exit_code_out)?;
        *report_out = ptr::null_mut();
        let outcome = cli::run_problem_text("problem", text(problem, "problem")?, None, &Flags::default());
        *code = cli::exit_code(&outcome);
        let mut report = outcome.map_err(|e| Failure(FdStatus::InvalidArgument, e.to_string()))?;
        report.stamp();
        *report_out = CString::new(report.to_json())
            .map_err(|_| Failure(FdStatus::Numerical, "report contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` is null or a string from [`fd_run_problem_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
