//! C ABI over `coset_mac`.
//!
//! Every fallible function returns one of the `COSET_MAC_*` status codes and writes
//! its result through an out pointer. On failure a message is kept per thread and
//! can be read with [`coset_mac_last_error`]. Handles are opaque and must be
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use coset_mac::codesim::{simulate_mac, MacParams, SimParams};
use coset_mac::info::binary_entropy;
use coset_mac::regions::{
    best_sum_rate, beta_f_sum_rate, catalog, families, parse_channel_config, qdd_closed_forms,
    ChannelSpec, SearchFamily, SearchOptions, TestChannel,
};
use coset_mac::Error;

pub const COSET_MAC_OK: i32 = 0;
/// Invalid input; see the last error message.
pub const COSET_MAC_ERR_VALIDATION: i32 = 1;
/// The request exceeds a size or enumeration cap.
pub const COSET_MAC_ERR_BUDGET: i32 = 2;
pub const COSET_MAC_ERR_INTERNAL: i32 = 3;
pub const COSET_MAC_ERR_NULL: i32 = 4;
/// A string argument is not valid UTF-8.
pub const COSET_MAC_ERR_UTF8: i32 = 5;
/// The library panicked; the call had no effect on its out pointers.
pub const COSET_MAC_ERR_PANIC: i32 = 6;

/// `family` values of [`coset_mac_best_sum_rate`].
pub const COSET_MAC_FAMILY_ALPHA: i32 = 0;
pub const COSET_MAC_FAMILY_BETA_F: i32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Validation(_) => COSET_MAC_ERR_VALIDATION,
            Error::Budget { .. } => COSET_MAC_ERR_BUDGET,
            Error::Internal(_) => COSET_MAC_ERR_INTERNAL,
        };
        Failure(code, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => COSET_MAC_OK,
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("panic inside coset_mac");
            COSET_MAC_ERR_PANIC
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(COSET_MAC_ERR_NULL, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(COSET_MAC_ERR_UTF8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or an empty string. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn coset_mac_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// A channel with states known at the two transmitters.
pub struct CosetMacChannel {
    inner: Arc<ChannelSpec>,
}

/// A test channel: per-user conditionals composed with a channel.
pub struct CosetMacTestChannel {
    inner: TestChannel,
}

/// Looks up a catalog channel by name (e.g. "bdd", "qdd", "example2").
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_channel_catalog(
    name: *const c_char,
    out: *mut *mut CosetMacChannel,
) -> i32 {
    guard(|| {
        let name = str_arg(name, "name")?;
        let out = out_arg(out, "out")?;
        let ch = catalog(name)?;
        *out = Box::into_raw(Box::new(CosetMacChannel {
            inner: Arc::new(ch),
        }));
        Ok(())
    })
}

/// Parses a channel from the plain-text description format.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_channel_from_config(
    text: *const c_char,
    out: *mut *mut CosetMacChannel,
) -> i32 {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let ch = parse_channel_config(text)?;
        *out = Box::into_raw(Box::new(CosetMacChannel {
            inner: Arc::new(ch),
        }));
        Ok(())
    })
}

/// Releases a channel; null is ignored.
///
/// # Safety
/// `ch` must come from a `coset_mac_channel_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_channel_free(ch: *mut CosetMacChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Alphabet sizes of a channel: states, inputs (two each) and the output.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CosetMacChannelShape {
    pub state_sizes: [usize; 2],
    pub input_sizes: [usize; 2],
    pub output_size: usize,
}

/// # Safety
/// `ch` must be a live channel handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_channel_shape(
    ch: *const CosetMacChannel,
    out: *mut CosetMacChannelShape,
) -> i32 {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| null("ch"))?;
        let out = out_arg(out, "out")?;
        *out = CosetMacChannelShape {
            state_sizes: ch.inner.state_sizes(),
            input_sizes: ch.inner.input_sizes(),
            output_size: ch.inner.output_size(),
        };
        Ok(())
    })
}

/// h_b(p) in bits.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_binary_entropy(p: f64, out: *mut f64) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = binary_entropy(p)?;
        Ok(())
    })
}

/// Closed-form sum rates of the quaternary doubly dirty MAC.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CosetMacQddForms {
    pub alpha: f64,
    pub beta_f: f64,
    pub beta_g: f64,
    pub i_s: f64,
    pub h_x: f64,
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_qdd_closed_forms(tau: f64, out: *mut CosetMacQddForms) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = qdd_closed_forms(tau)?;
        *out = CosetMacQddForms {
            alpha: c.alpha,
            beta_f: c.beta_f,
            beta_g: c.beta_g,
            i_s: c.i_s,
            h_x: c.h_x,
        };
        Ok(())
    })
}

/// Grid search of the best sum rate at each cost in `taus` (strictly increasing,
/// length `len`). Writes the values before time sharing to `pre_envelope` and after
/// it to `envelope`, each of length `len`. `budget` caps the number of test channel
/// pairs.
///
/// # Safety
/// `ch` must be a live handle; `taus`, `pre_envelope` and `envelope` must point to
/// `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_best_sum_rate(
    ch: *const CosetMacChannel,
    family: i32,
    taus: *const f64,
    len: usize,
    step: f64,
    aux_size: usize,
    budget: u64,
    pre_envelope: *mut f64,
    envelope: *mut f64,
) -> i32 {
    guard(|| {
        let ch = ch.as_ref().ok_or_else(|| null("ch"))?;
        if taus.is_null() || pre_envelope.is_null() || envelope.is_null() {
            return Err(null("array argument"));
        }
        let family = match family {
            COSET_MAC_FAMILY_ALPHA => SearchFamily::Alpha,
            COSET_MAC_FAMILY_BETA_F => SearchFamily::BetaF,
            other => {
                return Err(Failure(
                    COSET_MAC_ERR_VALIDATION,
                    format!("unknown family {other}"),
                ))
            }
        };
        let taus = std::slice::from_raw_parts(taus, len);
        let opts = SearchOptions {
            step,
            aux_size,
            pair_budget: budget as u128,
        };
        let curve = best_sum_rate(&ch.inner, family, taus, &opts)?;
        let pre = std::slice::from_raw_parts_mut(pre_envelope, len);
        pre.copy_from_slice(&curve.pre_envelope);
        let env = std::slice::from_raw_parts_mut(envelope, len);
        env.copy_from_slice(&curve.sum_rates());
        Ok(())
    })
}

/// Builds a named parametric test channel (e.g. "bdd-linear", "qdd-group").
///
/// # Safety
/// `name` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_test_channel_named(
    name: *const c_char,
    tau: f64,
    out: *mut *mut CosetMacTestChannel,
) -> i32 {
    guard(|| {
        let name = str_arg(name, "name")?;
        let out = out_arg(out, "out")?;
        let tc = families::named(name, tau)?;
        *out = Box::into_raw(Box::new(CosetMacTestChannel { inner: tc }));
        Ok(())
    })
}

/// Releases a test channel; null is ignored.
///
/// # Safety
/// `tc` must come from [`coset_mac_test_channel_named`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_test_channel_free(tc: *mut CosetMacTestChannel) {
    if !tc.is_null() {
        drop(Box::from_raw(tc));
    }
}

/// Linear coset code sum rate of a test channel over a finite field.
///
/// # Safety
/// `tc` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_beta_f_sum_rate(
    tc: *const CosetMacTestChannel,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let tc = tc.as_ref().ok_or_else(|| null("tc"))?;
        let out = out_arg(out, "out")?;
        *out = beta_f_sum_rate(&tc.inner)?;
        Ok(())
    })
}

/// Simulation settings; `k` and `l` are the inner and message dimensions per user.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CosetMacSimConfig {
    pub n: usize,
    pub k: [usize; 2],
    pub l: [usize; 2],
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    /// Nonzero to reuse one code in every trial.
    pub fixed_code: i32,
}

/// Simulation result, as rates over the trials.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CosetMacSimResult {
    pub rate_sum: f64,
    pub enc_fail: [f64; 2],
    pub dec_err: f64,
    pub cost: [f64; 2],
}

/// Monte Carlo run of random nested coset codes with the sum decoder.
///
/// # Safety
/// `tc` must be a live handle; `cfg` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn coset_mac_simulate(
    tc: *const CosetMacTestChannel,
    cfg: *const CosetMacSimConfig,
    out: *mut CosetMacSimResult,
) -> i32 {
    guard(|| {
        let tc = tc.as_ref().ok_or_else(|| null("tc"))?;
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let out = out_arg(out, "out")?;
        let mut p = SimParams::new(
            cfg.n,
            MacParams { k: cfg.k, l: cfg.l },
            cfg.delta,
            cfg.trials,
            cfg.seed,
        );
        p.fixed_code = cfg.fixed_code != 0;
        let r = simulate_mac(&tc.inner, &p)?;
        *out = CosetMacSimResult {
            rate_sum: r.rate_sum,
            enc_fail: [r.enc_fail_rate(0), r.enc_fail_rate(1)],
            dec_err: r.dec_err_rate(),
            cost: r.cost,
        };
        Ok(())
    })
}

#[doc(hidden)]
pub fn last_error_string() -> String {
    // SAFETY: the pointer comes from a live thread-local CString.
    unsafe { CStr::from_ptr(coset_mac_last_error()) }
        .to_string_lossy()
        .into_owned()
}
