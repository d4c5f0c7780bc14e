//! C ABI over the `nharmonic` library.
//!
//! Every function returns an [`NhStatus`] and writes results through out
//! pointers. On failure the message is available from
//! [`nh_last_error_message`] on the same thread. Minimizer plans are owned by
//! an opaque [`NhMinimizer`] handle released with [`nh_minimizer_free`];
//! strings returned by the library are released with [`nh_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nharmonic::energy::{minimal_energy, MapShape, MinimalityStatus, MinimizerPlan};
use nharmonic::geometry::{modulus, sphere_area, Annulus, Dimension, Modulus};
use nharmonic::nitsche::{classify, constants, lower_nitsche, upper_nitsche, Regime};
use nharmonic::principal::{principal_sample, PrincipalKind};
use nharmonic::ser::report_json;
use nharmonic::Error;

/// Outcome of a call. Values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhStatus {
    Ok = 0,
    /// Null pointer or malformed argument.
    InvalidArgument = 2,
    /// Input outside the mathematical domain, or a failed precondition.
    Domain = 3,
    /// An iterative method did not converge.
    Numerical = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhKind {
    IdentityLike = 0,
    InversionLike = 1,
    Plus = 2,
    Minus = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhRegime {
    ContractingBelow = 0,
    ContractingWithin = 1,
    Conformal = 2,
    ExpandingWithin = 3,
    ExpandingAbove = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NhMinimality {
    ProvenMinimal = 0,
    RadialUnproven = 1,
}

/// Strain data of a radial profile at radius `t`; `eta` may be infinite.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NhStrainSample {
    pub t: f64,
    pub h: f64,
    pub hdot: f64,
    pub eta: f64,
}

/// Parameters of a minimizer `t -> lambda * H_kind(k t)`. For a hammering
/// composite, radii in `[source inner, rho)` collapse onto `hammer_to`;
/// otherwise both fields are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NhRadialMap {
    pub kind: NhKind,
    pub lambda: f64,
    pub k: f64,
    pub rho: f64,
    pub hammer_to: f64,
}

/// Opaque minimizer plan.
pub struct NhMinimizer {
    plan: MinimizerPlan,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: NhStatus, msg: &str) -> NhStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> NhStatus {
    let status = match e {
        Error::Numerical { .. } => NhStatus::Numerical,
        _ => NhStatus::Domain,
    };
    fail(status, &e.to_string())
}

/// Runs `f` behind a panic guard, mapping library errors to status codes.
fn guard(f: impl FnOnce() -> Result<(), NhStatus>) -> NhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NhStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => fail(NhStatus::Internal, "panic inside nharmonic"),
    }
}

fn lib<T>(r: nharmonic::Result<T>) -> Result<T, NhStatus> {
    r.map_err(from_error)
}

fn write<T>(out: *mut T, value: T) -> Result<(), NhStatus> {
    if out.is_null() {
        return Err(fail(NhStatus::InvalidArgument, "null output pointer"));
    }
    // SAFETY: caller guarantees `out` points to writable storage for a `T`.
    unsafe { out.write(value) };
    Ok(())
}

fn handle<'a>(h: *const NhMinimizer) -> Result<&'a NhMinimizer, NhStatus> {
    // SAFETY: non-null handles come from `nh_minimize` and stay valid until freed.
    unsafe { h.as_ref() }.ok_or_else(|| fail(NhStatus::InvalidArgument, "null minimizer handle"))
}

fn dim(n: u32) -> Result<Dimension, NhStatus> {
    lib(Dimension::new(n))
}

fn kind_of(k: NhKind) -> PrincipalKind {
    match k {
        NhKind::IdentityLike => PrincipalKind::IdentityLike,
        NhKind::InversionLike => PrincipalKind::InversionLike,
        NhKind::Plus => PrincipalKind::Plus,
        NhKind::Minus => PrincipalKind::Minus,
    }
}

fn nh_kind(k: PrincipalKind) -> NhKind {
    match k {
        PrincipalKind::IdentityLike => NhKind::IdentityLike,
        PrincipalKind::InversionLike => NhKind::InversionLike,
        PrincipalKind::Plus => NhKind::Plus,
        PrincipalKind::Minus => NhKind::Minus,
    }
}

fn nh_regime(r: Regime) -> NhRegime {
    match r {
        Regime::ContractingBelow => NhRegime::ContractingBelow,
        Regime::ContractingWithin => NhRegime::ContractingWithin,
        Regime::Conformal => NhRegime::Conformal,
        Regime::ExpandingWithin => NhRegime::ExpandingWithin,
        Regime::ExpandingAbove => NhRegime::ExpandingAbove,
    }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn nh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Area of the unit sphere in R^n.
#[no_mangle]
pub extern "C" fn nh_sphere_area(n: u32, out: *mut f64) -> NhStatus {
    guard(|| write(out, sphere_area(dim(n)?)))
}

/// Conformal modulus of the annulus `inner < |x| < outer`.
#[no_mangle]
pub extern "C" fn nh_modulus(n: u32, inner: f64, outer: f64, out: *mut f64) -> NhStatus {
    guard(|| {
        let a = lib(Annulus::new(inner, outer))?;
        write(out, modulus(&a, dim(n)?).value)
    })
}

/// Principal radial solution of the given kind at `t > 0`.
#[no_mangle]
pub extern "C" fn nh_principal_sample(kind: NhKind, t: f64, n: u32, out: *mut NhStrainSample) -> NhStatus {
    guard(|| {
        let s = lib(principal_sample(kind_of(kind), t, dim(n)?))?;
        write(out, NhStrainSample { t: s.t, h: s.h, hdot: s.hdot, eta: s.eta })
    })
}

#[no_mangle]
pub extern "C" fn nh_h_plus(t: f64, n: u32, out: *mut NhStrainSample) -> NhStatus {
    nh_principal_sample(NhKind::Plus, t, n, out)
}

#[no_mangle]
pub extern "C" fn nh_h_minus(t: f64, n: u32, out: *mut NhStrainSample) -> NhStatus {
    nh_principal_sample(NhKind::Minus, t, n, out)
}

/// Largest elasticity admitting a radial minimizer; infinite for n = 2, 3.
#[no_mangle]
pub extern "C" fn nh_alpha_n(n: u32, out: *mut f64) -> NhStatus {
    guard(|| write(out, lib(constants(dim(n)?))?.alpha_n))
}

#[no_mangle]
pub extern "C" fn nh_gamma_n(n: u32, out: *mut f64) -> NhStatus {
    guard(|| write(out, lib(constants(dim(n)?))?.gamma_n))
}

/// Defined for n >= 4; smaller `n` gives `NH_STATUS_DOMAIN`.
#[no_mangle]
pub extern "C" fn nh_delta_n(n: u32, out: *mut f64) -> NhStatus {
    guard(|| write(out, lib(nharmonic::nitsche::delta_n(dim(n)?))?))
}

/// Lower Nitsche bound for a source of modulus `mod_source`.
#[no_mangle]
pub extern "C" fn nh_lower_nitsche(n: u32, mod_source: f64, out: *mut f64) -> NhStatus {
    guard(|| {
        let n = dim(n)?;
        write(out, lib(lower_nitsche(Modulus::from_value(mod_source, n), n))?.value)
    })
}

/// Upper Nitsche bound; infinite for n <= 3.
#[no_mangle]
pub extern "C" fn nh_upper_nitsche(n: u32, mod_source: f64, out: *mut f64) -> NhStatus {
    guard(|| {
        let n = dim(n)?;
        write(out, lib(upper_nitsche(Modulus::from_value(mod_source, n), n))?.value)
    })
}

#[no_mangle]
pub extern "C" fn nh_classify(
    n: u32,
    source_inner: f64,
    source_outer: f64,
    target_inner: f64,
    target_outer: f64,
    out: *mut NhRegime,
) -> NhStatus {
    guard(|| {
        let s = lib(Annulus::new(source_inner, source_outer))?;
        let t = lib(Annulus::new(target_inner, target_outer))?;
        write(out, nh_regime(lib(classify(&s, &t, dim(n)?))?.regime))
    })
}

/// Builds the energy-minimal radial map between two annuli. On success `*out`
/// holds a handle that must be released with `nh_minimizer_free`.
#[no_mangle]
pub extern "C" fn nh_minimize(
    n: u32,
    source_inner: f64,
    source_outer: f64,
    target_inner: f64,
    target_outer: f64,
    out: *mut *mut NhMinimizer,
) -> NhStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(NhStatus::InvalidArgument, "null output pointer"));
        }
        let s = lib(Annulus::new(source_inner, source_outer))?;
        let t = lib(Annulus::new(target_inner, target_outer))?;
        let plan = lib(minimal_energy(&s, &t, dim(n)?))?;
        write(out, Box::into_raw(Box::new(NhMinimizer { plan })))
    })
}

#[no_mangle]
pub extern "C" fn nh_minimizer_energy(h: *const NhMinimizer, out: *mut f64) -> NhStatus {
    guard(|| write(out, handle(h)?.plan.energy.value))
}

#[no_mangle]
pub extern "C" fn nh_minimizer_regime(h: *const NhMinimizer, out: *mut NhRegime) -> NhStatus {
    guard(|| write(out, nh_regime(handle(h)?.plan.regime)))
}

#[no_mangle]
pub extern "C" fn nh_minimizer_status(h: *const NhMinimizer, out: *mut NhMinimality) -> NhStatus {
    guard(|| {
        let s = match handle(h)?.plan.status {
            MinimalityStatus::ProvenMinimal => NhMinimality::ProvenMinimal,
            MinimalityStatus::RadialUnproven => NhMinimality::RadialUnproven,
        };
        write(out, s)
    })
}

#[no_mangle]
pub extern "C" fn nh_minimizer_map(h: *const NhMinimizer, out: *mut NhRadialMap) -> NhStatus {
    guard(|| {
        let plan = &handle(h)?.plan;
        let m = plan.map;
        let (rho, hammer_to) = match (plan.shape, plan.rho, m.hammer_to) {
            (MapShape::HammeringComposite, Some(rho), Some(to)) => (rho, to),
            _ => (f64::NAN, f64::NAN),
        };
        write(out, NhRadialMap { kind: nh_kind(m.kind), lambda: m.lambda, k: m.k, rho, hammer_to })
    })
}

/// Full plan as a JSON document; release with `nh_string_free`.
#[no_mangle]
pub extern "C" fn nh_minimizer_to_json(h: *const NhMinimizer, out: *mut *mut c_char) -> NhStatus {
    guard(|| {
        let text = report_json(&handle(h)?.plan);
        let c = CString::new(text).map_err(|_| fail(NhStatus::Internal, "interior nul in JSON"))?;
        write(out, c.into_raw())
    })
}

/// Releases a handle from `nh_minimize`. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from `nh_minimize` that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nh_minimizer_free(h: *mut NhMinimizer) {
    if !h.is_null() {
        // SAFETY: `h` was produced by `Box::into_raw` in `nh_minimize` and is freed once.
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nh_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

