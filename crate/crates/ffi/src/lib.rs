//! C ABI for the per-mode solver and the scalar diagnostics of `primeq`.
//!
//! Parameters and solutions live behind opaque handles created and freed by
//! this library. Every fallible function returns a [`PrimeqStatus`]; on
//! failure a message is available from [`primeq_last_error`] on the same
//! thread until the next call into the library from that thread.
//!
//! Complex arrays are passed as [`PrimeqComplex`] with length `k`, the
//! vertical truncation order.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use primeq::estimates::m_sigma;
use primeq::profile::sobolev_norm_zeta;
use primeq::solver::solve_mode;
use primeq::time::counterexample_multiplier;
use primeq::vertical::inverse_integral_one;
use primeq::{make_spectral_point, Error, HorizontalMode, ModeRHS, ModeSolution, PhysicalParams, SobolevIndex, VerticalProfile};

/// Result of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeqStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is outside the domain of the operation.
    InvalidArgument = 2,
    /// The frequency is degenerate or the linear solve failed.
    Solver = 3,
    /// The caller's buffer is shorter than the data.
    BufferTooSmall = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// A double-precision complex number, layout-compatible with C99
/// `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PrimeqComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for PrimeqComplex {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<PrimeqComplex> for Complex64 {
    fn from(c: PrimeqComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Profile selector for [`primeq_solution_profile`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeqField {
    U = 0,
    V = 1,
    Theta = 2,
}

/// Physical constants `a, nu, alpha, beta, gamma`.
pub struct PrimeqParams(PhysicalParams);

/// Solution of one `(i tau, zeta)` problem.
pub struct PrimeqModeSolution(ModeSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(PrimeqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DegenerateFrequency
            | Error::DegenerateDenominator { .. }
            | Error::Singular
            | Error::NotConverged { .. } => PrimeqStatus::Solver,
            _ => PrimeqStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(PrimeqStatus::NullPointer, format!("{name} is null"))
}

/// Run `f` with the error slot cleared, mapping failures and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PrimeqStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PrimeqStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {message}"));
            PrimeqStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or points to a live value of `T`.
unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

/// # Safety
/// `out` is null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `data` is null or valid for reads of `k` values.
unsafe fn profile(data: *const PrimeqComplex, k: usize, name: &str) -> Result<VerticalProfile, Failure> {
    if k == 0 {
        return Err(Error::EmptyTruncation.into());
    }
    if data.is_null() {
        return Err(null(name));
    }
    let values = std::slice::from_raw_parts(data, k);
    Ok(VerticalProfile::new(values.iter().map(|c| Complex64::from(*c)).collect())?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn primeq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null when the last
/// call succeeded. The pointer stays valid until the next library call on
/// this thread.
#[no_mangle]
pub extern "C" fn primeq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Validated parameters; free with [`primeq_params_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn primeq_params_new(
    a: f64,
    nu: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    out: *mut *mut PrimeqParams,
) -> PrimeqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = PhysicalParams::new(a, nu, alpha, beta, gamma)?;
        out.write(Box::into_raw(Box::new(PrimeqParams(p))));
        Ok(())
    })
}

/// The defaults `a = 1, nu = 0.1, alpha = beta = gamma = 1`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn primeq_params_default(out: *mut *mut PrimeqParams) -> PrimeqStatus {
    guard(|| write(out, Box::into_raw(Box::new(PrimeqParams(PhysicalParams::default()))), "out"))
}

/// # Safety
/// `params` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn primeq_params_free(params: *mut PrimeqParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// `||f||_{sigma, zeta}` of a profile of order `k`.
///
/// # Safety
/// `params` is a live handle, `coeffs` holds `k` values and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_sobolev_norm(
    params: *const PrimeqParams,
    coeffs: *const PrimeqComplex,
    k: usize,
    sigma: f64,
    xi: i64,
    eta: i64,
    out: *mut f64,
) -> PrimeqStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let f = profile(coeffs, k, "coeffs")?;
        write(out, sobolev_norm_zeta(&f, SobolevIndex(sigma), HorizontalMode::new(xi, eta), p), "out")
    })
}

/// `M_sigma` at `lambda = i tau`.
///
/// # Safety
/// `params` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_m_sigma(
    params: *const PrimeqParams,
    sigma: f64,
    tau: f64,
    xi: i64,
    eta: i64,
    out: *mut f64,
) -> PrimeqStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let sp = make_spectral_point(Complex64::new(0.0, tau), HorizontalMode::new(xi, eta), p)?;
        write(out, m_sigma(sigma, &sp)?, "out")
    })
}

/// `int_0^a (omega^2 - nu d_zz)^{-1}[1] dz` at `lambda = i tau`, in closed form.
///
/// # Safety
/// `params` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_inverse_integral_one(
    params: *const PrimeqParams,
    tau: f64,
    xi: i64,
    eta: i64,
    out: *mut PrimeqComplex,
) -> PrimeqStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        let sp = make_spectral_point(Complex64::new(0.0, tau), HorizontalMode::new(xi, eta), p)?;
        write(out, inverse_integral_one(&sp, p).into(), "out")
    })
}

/// Counter-example multiplier `m(tau)` for `alpha` in `(-1, 0)`.
///
/// # Safety
/// `params` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_counterexample_multiplier(
    params: *const PrimeqParams,
    tau: f64,
    alpha: f64,
    out: *mut PrimeqComplex,
) -> PrimeqStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if !(alpha > -1.0 && alpha < 0.0) || !tau.is_finite() {
            return Err(Failure(
                PrimeqStatus::InvalidArgument,
                format!("need finite tau and alpha in (-1, 0), got tau = {tau}, alpha = {alpha}"),
            ));
        }
        write(out, counterexample_multiplier(tau, alpha, p).into(), "out")
    })
}

/// Solve one mode at `lambda = i tau` with forcing `(f1, f2, f3)` of order
/// `k`; free the result with [`primeq_solution_free`].
///
/// # Safety
/// `params` is a live handle, each of `f1`, `f2`, `f3` holds `k` values and
/// `out` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn primeq_solve_mode(
    params: *const PrimeqParams,
    tau: f64,
    xi: i64,
    eta: i64,
    k: usize,
    f1: *const PrimeqComplex,
    f2: *const PrimeqComplex,
    f3: *const PrimeqComplex,
    out: *mut *mut PrimeqModeSolution,
) -> PrimeqStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = ModeRHS::new(profile(f1, k, "f1")?, profile(f2, k, "f2")?, profile(f3, k, "f3")?)?;
        let sp = make_spectral_point(Complex64::new(0.0, tau), HorizontalMode::new(xi, eta), p)?;
        let sol = solve_mode(&f, &sp, p)?;
        out.write(Box::into_raw(Box::new(PrimeqModeSolution(sol))));
        Ok(())
    })
}

/// Truncation order of a solution, 0 for null.
///
/// # Safety
/// `sol` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn primeq_solution_order(sol: *const PrimeqModeSolution) -> usize {
    sol.as_ref().map_or(0, |s| s.0.order())
}

/// Copy the profile selected by `field`, a [`PrimeqField`] value, into
/// `buf`, which must hold at least the order.
///
/// # Safety
/// `sol` is a live handle and `buf` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn primeq_solution_profile(
    sol: *const PrimeqModeSolution,
    field: i32,
    buf: *mut PrimeqComplex,
    len: usize,
) -> PrimeqStatus {
    guard(|| {
        let s = &deref(sol, "sol")?.0;
        let src = match field {
            f if f == PrimeqField::U as i32 => &s.u,
            f if f == PrimeqField::V as i32 => &s.v,
            f if f == PrimeqField::Theta as i32 => &s.theta,
            _ => return Err(Failure(PrimeqStatus::InvalidArgument, format!("unknown field {field}"))),
        };
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < src.order() {
            return Err(Failure(
                PrimeqStatus::BufferTooSmall,
                format!("buffer holds {len} values, the profile has {}", src.order()),
            ));
        }
        for (i, c) in src.coeffs().iter().enumerate() {
            buf.add(i).write((*c).into());
        }
        Ok(())
    })
}

/// Trace constant `p0` of the pressure.
///
/// # Safety
/// `sol` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_solution_pressure_constant(
    sol: *const PrimeqModeSolution,
    out: *mut PrimeqComplex,
) -> PrimeqStatus {
    guard(|| write(out, deref(sol, "sol")?.0.p0.into(), "out"))
}

/// Forward residual norm and `|int_0^a (i xi u + i eta v) dz|`.
///
/// # Safety
/// `sol` is a live handle; `residual` and `divergence` are writable.
#[no_mangle]
pub unsafe extern "C" fn primeq_solution_diagnostics(
    sol: *const PrimeqModeSolution,
    residual: *mut f64,
    divergence: *mut f64,
) -> PrimeqStatus {
    guard(|| {
        let s = &deref(sol, "sol")?.0;
        if divergence.is_null() {
            return Err(null("divergence"));
        }
        write(residual, s.residual_norm, "residual")?;
        divergence.write(s.divergence.norm());
        Ok(())
    })
}

/// # Safety
/// `sol` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn primeq_solution_free(sol: *mut PrimeqModeSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}
