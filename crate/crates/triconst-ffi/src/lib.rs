//! C ABI for `triconst`.
//!
//! Every fallible function returns a [`TriconstStatus`] and writes results
//! through out-pointers. Objects are opaque handles released by their
//! `*_free` function; strings returned to the caller are released with
//! [`triconst_string_free`]. Panics never cross the boundary: they are
//! reported as [`TriconstStatus::Panic`]. The message of the last failure on
//! the calling thread is available from [`triconst_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use triconst::eigen::{discrete_upper_bound, max_gen_eig, poly_subspace_constant, PolynomialSubspaceSpec};
use triconst::geometry::{circumradius, k_constant, normalize_shape, Triangle, TriangleShape};
use triconst::interval::certify_eigen_bound;
use triconst::mesh::{assemble, AssembledPencil, Space};
use triconst::symbolic::rational::{format_rational, parse_rational, to_f64};
use triconst::verify::{lambda_threshold, run_sweep, verify_point, Mode, SweepConfig, VerificationReport, Verdict};
use triconst::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriconstStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Degenerate = 4,
    InvalidArgument = 5,
    NotPositiveDefinite = 6,
    Internal = 7,
    Io = 8,
    Panic = 9,
}

/// Which verification grid a threshold belongs to.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriconstMode {
    /// The regular `(a, b)` grid, j = 1..4.
    Thm61 = 0,
    /// The small-`b` grid at `b = 1/10`, j = 1..3.
    Thm62 = 1,
}

impl From<TriconstMode> for Mode {
    fn from(m: TriconstMode) -> Mode {
        match m {
            TriconstMode::Thm61 => Mode::Thm61,
            TriconstMode::Thm62 => Mode::Thm62,
        }
    }
}

/// A triangle shape `T_{a,b}` with exact rational parameters.
pub struct TriconstShape {
    inner: TriangleShape,
}

/// An exactly assembled matrix pencil `(A, B)`.
pub struct TriconstPencil {
    inner: AssembledPencil,
}

/// The result of a verification sweep.
pub struct TriconstReport {
    inner: VerificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TriconstStatus {
    match e {
        Error::Parse(_) => TriconstStatus::Parse,
        Error::Degenerate(_) => TriconstStatus::Degenerate,
        Error::InvalidArgument(_) | Error::UnknownVariable(_) | Error::DivisionByZero(_) => TriconstStatus::InvalidArgument,
        Error::NotPositiveDefinite(_) => TriconstStatus::NotPositiveDefinite,
        Error::Io(_) => TriconstStatus::Io,
        Error::Internal(_) => TriconstStatus::Internal,
    }
}

type Fallible = std::result::Result<(), (TriconstStatus, String)>;

fn lib(e: Error) -> (TriconstStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (TriconstStatus, String) {
    (TriconstStatus::NullPointer, format!("null pointer: {what}"))
}

fn guard(f: impl FnOnce() -> Fallible) -> TriconstStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TriconstStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            TriconstStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> std::result::Result<&'a str, (TriconstStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (TriconstStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> std::result::Result<&'a mut T, (TriconstStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, (TriconstStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize) -> &'a [T] {
    if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(p, len)
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn triconst_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn triconst_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn triconst_status_message(status: TriconstStatus) -> *const c_char {
    let s: &'static str = match status {
        TriconstStatus::Ok => "ok\0",
        TriconstStatus::NullPointer => "null pointer argument\0",
        TriconstStatus::InvalidUtf8 => "string argument is not UTF-8\0",
        TriconstStatus::Parse => "malformed input\0",
        TriconstStatus::Degenerate => "degenerate triangle\0",
        TriconstStatus::InvalidArgument => "invalid argument\0",
        TriconstStatus::NotPositiveDefinite => "matrix not positive definite\0",
        TriconstStatus::Internal => "internal error\0",
        TriconstStatus::Io => "i/o error\0",
        TriconstStatus::Panic => "panic inside the library\0",
    };
    s.as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn triconst_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates `T_{a,b}` from exact rationals written as `"p/q"` or decimals.
///
/// # Safety
/// `a`, `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn triconst_shape_new(a: *const c_char, b: *const c_char, out: *mut *mut TriconstShape) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let a = parse_rational(str_arg(a, "a")?).map_err(lib)?;
        let b = parse_rational(str_arg(b, "b")?).map_err(lib)?;
        if b == num_zero() {
            return Err(lib(Error::Degenerate("b = 0".into())));
        }
        *out = Box::into_raw(Box::new(TriconstShape {
            inner: TriangleShape::new(a, b),
        }));
        Ok(())
    })
}

fn num_zero() -> triconst::symbolic::rational::Rational {
    triconst::symbolic::rational::int(0)
}

/// Creates the canonical shape of the triangle with vertices
/// `(xy[0], xy[1]), (xy[2], xy[3]), (xy[4], xy[5])` (doubles taken exactly).
///
/// # Safety
/// `xy` must point to six doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn triconst_shape_from_vertices(xy: *const f64, out: *mut *mut TriconstShape) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if xy.is_null() {
            return Err(null("xy"));
        }
        let v = slice_arg(xy, 6);
        let tri = Triangle::from_f64([[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]]).map_err(lib)?;
        let norm = normalize_shape(&tri).map_err(lib)?;
        *out = Box::into_raw(Box::new(TriconstShape { inner: norm.shape }));
        Ok(())
    })
}

/// Releases a shape. NULL is ignored.
///
/// # Safety
/// `shape` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn triconst_shape_free(shape: *mut TriconstShape) {
    if !shape.is_null() {
        drop(Box::from_raw(shape));
    }
}

/// Nearest doubles of the shape parameters.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_shape_params(shape: *const TriconstShape, a: *mut f64, b: *mut f64) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        *out_arg(a, "a")? = to_f64(&s.inner.a);
        *out_arg(b, "b")? = to_f64(&s.inner.b);
        Ok(())
    })
}

/// Closed-form bound `K_j(T_{a,b})`, j = 1..4.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_k_constant(shape: *const TriconstShape, j: u32, out: *mut f64) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        *out_arg(out, "out")? = k_constant(j as usize, &s.inner.triangle()).map_err(lib)?;
        Ok(())
    })
}

/// Circumradius of `T_{a,b}`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_circumradius(shape: *const TriconstShape, out: *mut f64) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        *out_arg(out, "out")? = circumradius(&s.inner.triangle()).map_err(lib)?;
        Ok(())
    })
}

/// Floating-point upper bound `C̄_j⁽ⁿ⁾(T_{a,b})`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_upper_bound(shape: *const TriconstShape, j: u32, n: usize, out: *mut f64) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        *out_arg(out, "out")? = discrete_upper_bound(j as usize, n, &s.inner).map_err(lib)?;
        Ok(())
    })
}

/// Lower estimate `C̃_j(T_{a,b})` over polynomials of the given degree.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_lower_bound(shape: *const TriconstShape, j: u32, degree: u32, out: *mut f64) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        let space = Space::for_constant(j as usize).map_err(lib)?;
        let spec = PolynomialSubspaceSpec { degree, space };
        *out_arg(out, "out")? = poly_subspace_constant(j as usize, &s.inner, spec).map_err(lib)?;
        Ok(())
    })
}

/// Assembles the level-`n` pencil of `C_j` exactly.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_pencil_new(
    shape: *const TriconstShape,
    j: u32,
    n: usize,
    out: *mut *mut TriconstPencil,
) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = ref_arg(shape, "shape")?;
        let j = j as usize;
        let space = Space::for_constant(j).map_err(lib)?;
        let inner = assemble(space, j, n, &s.inner).map_err(lib)?;
        *out = Box::into_raw(Box::new(TriconstPencil { inner }));
        Ok(())
    })
}

/// Releases a pencil. NULL is ignored.
///
/// # Safety
/// `pencil` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn triconst_pencil_free(pencil: *mut TriconstPencil) {
    if !pencil.is_null() {
        drop(Box::from_raw(pencil));
    }
}

/// Matrix order of the pencil (0 for NULL).
///
/// # Safety
/// `pencil` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_pencil_dim(pencil: *const TriconstPencil) -> usize {
    pencil.as_ref().map_or(0, |p| p.inner.dim)
}

/// Floating-point `λ_max(A, B)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_pencil_max_eigenvalue(pencil: *const TriconstPencil, out: *mut f64) -> TriconstStatus {
    guard(|| {
        let p = ref_arg(pencil, "pencil")?;
        *out_arg(out, "out")? = max_gen_eig(&p.inner.a, &p.inner.b).map_err(lib)?.value;
        Ok(())
    })
}

/// Sets `*verified` to whether `λB − A` was proven positive definite for the
/// exact rational `lambda` (`"p/q"` or decimal). `false` means "not
/// certified", not "false".
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_pencil_certify(
    pencil: *const TriconstPencil,
    lambda: *const c_char,
    verified: *mut bool,
) -> TriconstStatus {
    guard(|| {
        let p = ref_arg(pencil, "pencil")?;
        let lam = parse_rational(str_arg(lambda, "lambda")?).map_err(lib)?;
        *out_arg(verified, "verified")? = certify_eigen_bound(&p.inner, &lam);
        Ok(())
    })
}

/// Exact certification threshold as a newly allocated `"p/q"` string.
///
/// # Safety
/// Pointers must be valid; release `*out` with [`triconst_string_free`].
#[no_mangle]
pub unsafe extern "C" fn triconst_lambda_threshold(
    shape: *const TriconstShape,
    j: u32,
    n: usize,
    mode: TriconstMode,
    out: *mut *mut c_char,
) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let s = ref_arg(shape, "shape")?;
        let lam = lambda_threshold(j as usize, &s.inner, mode.into(), n).map_err(lib)?;
        *out = c_string(format_rational(&lam));
        Ok(())
    })
}

/// Certifies one grid point at its threshold.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_verify_point(
    shape: *const TriconstShape,
    j: u32,
    n: usize,
    mode: TriconstMode,
    verified: *mut bool,
) -> TriconstStatus {
    guard(|| {
        let s = ref_arg(shape, "shape")?;
        let verified = out_arg(verified, "verified")?;
        let (_, v) = verify_point(j as usize, n, &s.inner, mode.into()).map_err(lib)?;
        *verified = v == Verdict::Verified;
        Ok(())
    })
}

/// Runs a sweep. `js` lists the constants (`nj` entries). A NULL `ks` or
/// `ls` selects the whole range; a non-NULL pointer with length 0 selects
/// nothing. `threads == 0` uses the default pool.
///
/// # Safety
/// Array pointers must hold the stated number of elements; `out` must be
/// writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn triconst_sweep_run(
    mode: TriconstMode,
    js: *const u32,
    nj: usize,
    n: usize,
    ks: *const usize,
    nk: usize,
    ls: *const usize,
    nl: usize,
    threads: usize,
    out: *mut *mut TriconstReport,
) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        if js.is_null() && nj > 0 {
            return Err(null("js"));
        }
        let mut config = SweepConfig::new(mode.into(), slice_arg(js, nj).iter().map(|&j| j as usize).collect(), n);
        config.ks = (!ks.is_null()).then(|| slice_arg(ks, nk).to_vec());
        config.ls = (!ls.is_null()).then(|| slice_arg(ls, nl).to_vec());
        config.threads = (threads > 0).then_some(threads);
        let inner = run_sweep(&config).map_err(lib)?;
        *out = Box::into_raw(Box::new(TriconstReport { inner }));
        Ok(())
    })
}

/// Releases a report. NULL is ignored.
///
/// # Safety
/// `report` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn triconst_report_free(report: *mut TriconstReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Point counts of a report; any out-pointer may be NULL.
///
/// # Safety
/// `report` must be valid.
#[no_mangle]
pub unsafe extern "C" fn triconst_report_counts(
    report: *const TriconstReport,
    total: *mut usize,
    verified: *mut usize,
    pending: *mut usize,
) -> TriconstStatus {
    guard(|| {
        let r = ref_arg(report, "report")?;
        let s = &r.inner.summary;
        for (p, v) in [(total, s.total), (verified, s.verified), (pending, s.pending)] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// The report as JSON in a newly allocated string.
///
/// # Safety
/// Pointers must be valid; release `*out` with [`triconst_string_free`].
#[no_mangle]
pub unsafe extern "C" fn triconst_report_json(report: *const TriconstReport, out: *mut *mut c_char) -> TriconstStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let r = ref_arg(report, "report")?;
        *out = c_string(r.inner.to_json().map_err(lib)?);
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn shape_and_constants() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(triconst_shape_new(cs("0").as_ptr(), cs("1").as_ptr(), &mut s), TriconstStatus::Ok);
            let mut k = 0.0;
            assert_eq!(triconst_k_constant(s, 1, &mut k), TriconstStatus::Ok);
            assert!((k - 0.3340766).abs() < 1e-6);
            assert_eq!(triconst_k_constant(s, 7, &mut k), TriconstStatus::InvalidArgument);
            assert!(!triconst_last_error().is_null());
            let mut r = 0.0;
            assert_eq!(triconst_circumradius(s, &mut r), TriconstStatus::Ok);
            assert!((r - 2f64.sqrt() / 2.0).abs() < 1e-12);
            triconst_shape_free(s);
        }
    }

    #[test]
    fn error_codes() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(triconst_shape_new(cs("x").as_ptr(), cs("1").as_ptr(), &mut s), TriconstStatus::Parse);
            assert!(s.is_null());
            assert_eq!(triconst_shape_new(cs("0").as_ptr(), cs("0").as_ptr(), &mut s), TriconstStatus::Degenerate);
            assert_eq!(triconst_shape_new(ptr::null(), cs("1").as_ptr(), &mut s), TriconstStatus::NullPointer);
            let bad = [0xffu8, 0];
            assert_eq!(triconst_shape_new(bad.as_ptr().cast(), cs("1").as_ptr(), &mut s), TriconstStatus::InvalidUtf8);
            let v = [0.0, 0.0, 1.0, 0.0, 2.0, 0.0];
            assert_eq!(triconst_shape_from_vertices(v.as_ptr(), &mut s), TriconstStatus::Degenerate);
            let mut k = 0.0;
            assert_eq!(triconst_k_constant(ptr::null(), 1, &mut k), TriconstStatus::NullPointer);
            assert_eq!(triconst_pencil_dim(ptr::null()), 0);
            let msg = CStr::from_ptr(triconst_status_message(TriconstStatus::Panic)).to_str().unwrap();
            assert!(msg.contains("panic"));
            assert!(CStr::from_ptr(triconst_version()).to_str().unwrap().starts_with("0."));
        }
    }

    #[test]
    fn pencil_certificate_brackets_lambda_max() {
        unsafe {
            let mut s = ptr::null_mut();
            let v = [0.0, 0.0, 0.0, 1.0, 1.0, 0.0];
            assert_eq!(triconst_shape_from_vertices(v.as_ptr(), &mut s), TriconstStatus::Ok);
            let (mut a, mut b) = (0.0, 0.0);
            triconst_shape_params(s, &mut a, &mut b);
            assert_eq!((a, b), (0.5, 0.5));
            let mut p = ptr::null_mut();
            assert_eq!(triconst_pencil_new(s, 1, 4, &mut p), TriconstStatus::Ok);
            assert!(triconst_pencil_dim(p) > 0);
            let mut lam = 0.0;
            assert_eq!(triconst_pencil_max_eigenvalue(p, &mut lam), TriconstStatus::Ok);
            let mut ok = false;
            let above = cs(&format!("{:.12}", lam * 1.01));
            let below = cs(&format!("{:.12}", lam * 0.99));
            triconst_pencil_certify(p, above.as_ptr(), &mut ok);
            assert!(ok);
            triconst_pencil_certify(p, below.as_ptr(), &mut ok);
            assert!(!ok);
            triconst_pencil_free(p);
            let mut t = ptr::null_mut();
            assert_eq!(triconst_lambda_threshold(s, 4, 20, TriconstMode::Thm61, &mut t), TriconstStatus::Ok);
            assert!(CStr::from_ptr(t).to_str().unwrap().contains('/'));
            triconst_string_free(t);
            assert_eq!(
                triconst_lambda_threshold(s, 4, 20, TriconstMode::Thm62, &mut t),
                TriconstStatus::InvalidArgument
            );
            triconst_shape_free(s);
        }
    }

    #[test]
    fn sweep_report() {
        unsafe {
            let js = [1u32];
            let ls = [0usize, 250];
            let mut r = ptr::null_mut();
            let st = triconst_sweep_run(TriconstMode::Thm62, js.as_ptr(), 1, 4, ptr::null(), 0, ls.as_ptr(), 2, 1, &mut r);
            assert_eq!(st, TriconstStatus::Ok);
            let (mut total, mut pending) = (0, 7);
            triconst_report_counts(r, &mut total, ptr::null_mut(), &mut pending);
            assert_eq!((total, pending), (2, 0));
            let mut js_out = ptr::null_mut();
            triconst_report_json(r, &mut js_out);
            assert!(CStr::from_ptr(js_out).to_str().unwrap().contains("\"schema_version\""));
            triconst_string_free(js_out);
            triconst_report_free(r);
            let ks = [0usize];
            let st = triconst_sweep_run(TriconstMode::Thm61, js.as_ptr(), 1, 4, ks.as_ptr(), 1, ptr::null(), 0, 1, &mut r);
            assert_eq!(st, TriconstStatus::InvalidArgument);
            assert!(r.is_null());
        }
    }
}
