//! C ABI for the `uav-outage` library.
//!
//! Every fallible function returns a [`UoStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`uo_last_error_message`]. Scenarios are opaque handles
//! created by [`uo_scenario_parse`] or [`uo_scenario_load`] and released with
//! [`uo_scenario_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use uav_outage::analysis::{crossing_point, optimal_height};
use uav_outage::channel::FadingEnv;
use uav_outage::config::{load_scenario, parse_scenario};
use uav_outage::montecarlo::{simulate_outage, SimConfig};
use uav_outage::outage::{outage_total, OutageBreakdown};
use uav_outage::scenario::Scenario;
use uav_outage::specfun::{self, Accuracy};
use uav_outage::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UoStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidParameter = 3,
    ZeroDistance = 4,
    NonConvergence = 5,
    NoCrossing = 6,
    Config = 7,
    Io = 8,
    Panic = 9,
}

/// Propagation state requested for a link.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UoEnv {
    /// Drawn from the link's LoS probability.
    Drawn = 0,
    Los = 1,
    Nlos = 2,
}

/// Opaque scenario handle.
pub struct UoScenario {
    inner: Scenario,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UoBreakdown {
    pub p_ll: f64,
    pub p_ln: f64,
    pub p_nl: f64,
    pub p_nn: f64,
    pub w_ll: f64,
    pub w_ln: f64,
    pub w_nl: f64,
    pub w_nn: f64,
    pub total: f64,
}

impl From<OutageBreakdown> for UoBreakdown {
    fn from(b: OutageBreakdown) -> Self {
        UoBreakdown {
            p_ll: b.p_ll,
            p_ln: b.p_ln,
            p_nl: b.p_nl,
            p_nn: b.p_nn,
            w_ll: b.w_ll,
            w_ln: b.w_ln,
            w_nl: b.w_nl,
            w_nn: b.w_nn,
            total: b.total,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UoEstimate {
    pub p_hat: f64,
    /// Binomial standard error of `p_hat`.
    pub std_error: f64,
    pub trials: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UoCrossing {
    pub v_prime: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub residual: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UoHeightOptimum {
    pub height: f64,
    pub outage: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> UoStatus {
    match err {
        Error::InvalidParameter { .. } => UoStatus::InvalidParameter,
        Error::ZeroDistance => UoStatus::ZeroDistance,
        Error::NonConvergence { .. } => UoStatus::NonConvergence,
        Error::NoCrossing { .. } => UoStatus::NoCrossing,
        Error::Config { .. } => UoStatus::Config,
        Error::Io(_) => UoStatus::Io,
    }
}

struct Failure(UoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(UoStatus::NullPointer, format!("{what} is null"))
}

// Runs `f`, records any error or panic and converts it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            UoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(UoStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn scenario_arg<'a>(s: *const UoScenario) -> Result<&'a Scenario, Failure> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("scenario"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn env_arg(e: UoEnv) -> Option<FadingEnv> {
    match e {
        UoEnv::Drawn => None,
        UoEnv::Los => Some(FadingEnv::LoS),
        UoEnv::Nlos => Some(FadingEnv::NLoS),
    }
}

fn force_arg(main: UoEnv, interferer: UoEnv) -> Result<Option<(FadingEnv, FadingEnv)>, Failure> {
    match (env_arg(main), env_arg(interferer)) {
        (None, None) => Ok(None),
        (Some(m), Some(i)) => Ok(Some((m, i))),
        _ => Err(Failure(
            UoStatus::InvalidParameter,
            "both links must be forced, or neither".to_string(),
        )),
    }
}

/// Message of the last failed call on this thread, or null if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn uo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Parses a scenario from configuration text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_scenario_parse(
    text: *const c_char,
    out: *mut *mut UoScenario,
) -> UoStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let inner = parse_scenario(text)?;
        write_out(out, Box::into_raw(Box::new(UoScenario { inner })))
    })
}

/// Loads a scenario from a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_scenario_load(
    path: *const c_char,
    out: *mut *mut UoScenario,
) -> UoStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let inner = load_scenario(Path::new(path))?;
        write_out(out, Box::into_raw(Box::new(UoScenario { inner })))
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn uo_scenario_free(s: *mut UoScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Replaces the main link's vertical distance (UAV height) in place.
///
/// # Safety
/// `s` must be a live scenario handle.
#[no_mangle]
pub unsafe extern "C" fn uo_scenario_set_main_height(s: *mut UoScenario, height: f64) -> UoStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        s.inner = s.inner.with_main_height(height)?;
        Ok(())
    })
}

/// Closed-form outage probability with its per-case breakdown.
///
/// Pass `UoEnv::Drawn` for both links to mix over the LoS probabilities,
/// or force both.
///
/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_outage(
    s: *const UoScenario,
    main_env: UoEnv,
    interferer_env: UoEnv,
    out: *mut UoBreakdown,
) -> UoStatus {
    guard(|| {
        let mut pair = scenario_arg(s)?.link_pair()?;
        if let Some((m, i)) = force_arg(main_env, interferer_env)? {
            pair = pair.forced(m, i);
        }
        write_out(out, outage_total(&pair)?.into())
    })
}

/// Monte Carlo outage estimate. `workers = 0` uses one chunk per thread.
/// The result depends only on `trials`, `seed` and the forcing.
///
/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_simulate(
    s: *const UoScenario,
    trials: u64,
    seed: u64,
    workers: usize,
    main_env: UoEnv,
    interferer_env: UoEnv,
    out: *mut UoEstimate,
) -> UoStatus {
    guard(|| {
        let pair = scenario_arg(s)?.link_pair()?;
        let cfg = SimConfig::new(trials, seed)?
            .with_workers(workers)
            .with_force_env(force_arg(main_env, interferer_env)?);
        let est = simulate_outage(&pair, &cfg)?;
        write_out(
            out,
            UoEstimate {
                p_hat: est.p_hat,
                std_error: est.stderr,
                trials: est.trials,
            },
        )
    })
}

/// Height in `[h_min, h_max]` minimising the total outage probability.
///
/// # Safety
/// `s` must be a live scenario handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_optimal_height(
    s: *const UoScenario,
    h_min: f64,
    h_max: f64,
    out: *mut UoHeightOptimum,
) -> UoStatus {
    guard(|| {
        let best = optimal_height(scenario_arg(s)?, h_min, h_max)?;
        write_out(
            out,
            UoHeightOptimum {
                height: best.height,
                outage: best.outage,
            },
        )
    })
}

/// Power ratio at which the LoS/LoS and NLoS/NLoS outage curves cross.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_crossing(
    k_main: f64,
    k_interferer: f64,
    gamma_t: f64,
    out: *mut UoCrossing,
) -> UoStatus {
    guard(|| {
        let c = crossing_point(k_main, k_interferer, gamma_t)?;
        write_out(
            out,
            UoCrossing {
                v_prime: c.v_prime,
                bracket_lo: c.bracket.0,
                bracket_hi: c.bracket.1,
                residual: c.residual,
            },
        )
    })
}

#[no_mangle]
pub extern "C" fn uo_bessel_i0(x: f64) -> f64 {
    specfun::bessel_i0(x)
}

#[no_mangle]
pub extern "C" fn uo_bessel_i1(x: f64) -> f64 {
    specfun::bessel_i1(x)
}

/// `e^{-x} I0(x)`, finite for every finite `x >= 0`.
#[no_mangle]
pub extern "C" fn uo_bessel_i0_scaled(x: f64) -> f64 {
    specfun::bessel_i0_scaled(x)
}

/// `e^{-x} I1(x)`, finite for every finite `x >= 0`.
#[no_mangle]
pub extern "C" fn uo_bessel_i1_scaled(x: f64) -> f64 {
    specfun::bessel_i1_scaled(x)
}

/// First-order Marcum Q-function at the default accuracy.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_marcum_q1(a: f64, b: f64, out: *mut f64) -> UoStatus {
    guard(|| write_out(out, specfun::marcum_q1(a, b, Accuracy::default())?))
}

/// `1 − Q1(a, b)`, accurate where Q1 is close to one.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn uo_marcum_p1(a: f64, b: f64, out: *mut f64) -> UoStatus {
    guard(|| write_out(out, specfun::marcum_p1(a, b, Accuracy::default())?))
}
