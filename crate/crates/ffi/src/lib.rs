//! C ABI over `pilotcap`.
//!
//! Channels and capacity curves are opaque heap handles created by
//! `pilotcap_*_new`/`pilotcap_sweep` and released with the matching
//! `*_free`. Every fallible call returns a [`PilotcapStatus`]; on failure a
//! message is available from [`pilotcap_last_error_message`] on the same
//! thread. Status codes match the CLI exit codes.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pilotcap::capacity::capacity;
use pilotcap::estimation::error_covariance;
use pilotcap::montecarlo::{run_estimation_sim, SimConfig};
use pilotcap::optimizer::{sweep, CapacityCurve};
use pilotcap::{ChannelStats, Error, ErrorClass, LinkBudget, SymMatrix, TrainingPlan};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PilotcapStatus {
    Ok = 0,
    NullPointer = 1,
    ParseError = 2,
    InvalidMatrix = 3,
    InvalidConfig = 4,
    NumericFailure = 5,
    Panic = 6,
}

impl From<&Error> for PilotcapStatus {
    fn from(e: &Error) -> Self {
        match e.class() {
            ErrorClass::Parse => PilotcapStatus::ParseError,
            ErrorClass::InvalidMatrix => PilotcapStatus::InvalidMatrix,
            ErrorClass::InvalidConfig => PilotcapStatus::InvalidConfig,
            ErrorClass::Numeric => PilotcapStatus::NumericFailure,
        }
    }
}

/// Opaque channel covariance handle.
pub struct PilotcapChannel {
    stats: ChannelStats,
}

/// Opaque capacity curve handle.
pub struct PilotcapCurve {
    curve: CapacityCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), PilotcapStatus>) -> PilotcapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PilotcapStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside pilotcap");
            PilotcapStatus::Panic
        }
    }
}

fn fail(e: Error) -> PilotcapStatus {
    set_last_error(e.to_string());
    PilotcapStatus::from(&e)
}

fn null(what: &str) -> PilotcapStatus {
    set_last_error(format!("null pointer: {what}"));
    PilotcapStatus::NullPointer
}

fn budget(power: f64, block_length: u64) -> Result<LinkBudget, PilotcapStatus> {
    LinkBudget::new(power, block_length).map_err(fail)
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pilotcap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a channel from `dim * dim` row-major covariance entries.
///
/// # Safety
/// `entries` must point to `dim * dim` readable doubles and `out` to a
/// writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_channel_new(
    entries: *const f64,
    dim: usize,
    out: *mut *mut PilotcapChannel,
) -> PilotcapStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if dim == 0 {
            return Err(fail(Error::EmptyMatrix));
        }
        let data = std::slice::from_raw_parts(entries, dim * dim);
        let rows: Vec<&[f64]> = data.chunks(dim).collect();
        let c = SymMatrix::from_rows(&rows).map_err(fail)?;
        let stats = ChannelStats::new(c).map_err(fail)?;
        *out = Box::into_raw(Box::new(PilotcapChannel { stats }));
        Ok(())
    })
}

/// Loads a channel covariance from a matrix file (text rows or JSON).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_channel_from_file(
    path: *const c_char,
    out: *mut *mut PilotcapChannel,
) -> PilotcapStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path).to_string_lossy().into_owned();
        let c = pilotcap::io::parse_matrix_file(path).map_err(fail)?;
        let stats = ChannelStats::new(c).map_err(fail)?;
        *out = Box::into_raw(Box::new(PilotcapChannel { stats }));
        Ok(())
    })
}

/// # Safety
/// `channel` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_channel_free(channel: *mut PilotcapChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Number of receive antennas, or 0 for NULL.
///
/// # Safety
/// `channel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_channel_dim(channel: *const PilotcapChannel) -> usize {
    channel.as_ref().map_or(0, |c| c.stats.antennas())
}

/// Capacity in bits per block. `t_tau = 0` yields `-INFINITY`.
///
/// # Safety
/// `channel` must be a live handle and `out_bits` writable.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_capacity(
    channel: *const PilotcapChannel,
    power: f64,
    block_length: u64,
    t_tau: u64,
    out_bits: *mut f64,
) -> PilotcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out_bits.is_null() {
            return Err(null("out_bits"));
        }
        let b = budget(power, block_length)?;
        let v = capacity(&ch.stats, &b, &TrainingPlan::new(t_tau)).map_err(fail)?;
        *out_bits = v.bits_per_block;
        Ok(())
    })
}

/// Writes the `m × m` estimation error covariance row-major into `out`.
///
/// # Safety
/// `channel` must be a live handle and `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_error_covariance(
    channel: *const PilotcapChannel,
    power: f64,
    block_length: u64,
    t_tau: u64,
    out: *mut f64,
    out_len: usize,
) -> PilotcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = ch.stats.antennas();
        if out_len < m * m {
            return Err(fail(Error::DimensionMismatch {
                expected: m * m,
                actual: out_len,
            }));
        }
        let b = budget(power, block_length)?;
        let ct = error_covariance(&ch.stats, &b, &TrainingPlan::new(t_tau)).map_err(fail)?;
        std::slice::from_raw_parts_mut(out, m * m).copy_from_slice(ct.as_matrix().as_slice());
        Ok(())
    })
}

/// Capacity at every `t_tau` in `[1, block_length]`.
///
/// # Safety
/// `channel` must be a live handle and `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_sweep(
    channel: *const PilotcapChannel,
    power: f64,
    block_length: u64,
    out: *mut *mut PilotcapCurve,
) -> PilotcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = budget(power, block_length)?;
        let curve = sweep(&ch.stats, &b).map_err(fail)?;
        *out = Box::into_raw(Box::new(PilotcapCurve { curve }));
        Ok(())
    })
}

/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_curve_len(curve: *const PilotcapCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.entries.len())
}

/// Smallest capacity-maximizing `t_tau`, or 0 for NULL.
///
/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_curve_argmax(curve: *const PilotcapCurve) -> u64 {
    curve.as_ref().map_or(0, |c| c.curve.argmax_t_tau)
}

/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_curve_max_bits(curve: *const PilotcapCurve) -> f64 {
    curve.as_ref().map_or(f64::NAN, |c| c.curve.max_bits)
}

/// Reads entry `index` (0-based, ascending `t_tau`).
///
/// # Safety
/// `curve` must be a live handle; `out_t_tau` and `out_bits` writable.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_curve_get(
    curve: *const PilotcapCurve,
    index: usize,
    out_t_tau: *mut u64,
    out_bits: *mut f64,
) -> PilotcapStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        if out_t_tau.is_null() || out_bits.is_null() {
            return Err(null("output"));
        }
        let e = c.curve.entries.get(index).ok_or_else(|| {
            fail(Error::InvalidConfig(format!(
                "index {index} out of range for curve of length {}",
                c.curve.entries.len()
            )))
        })?;
        *out_t_tau = e.t_tau;
        *out_bits = e.bits_per_block;
        Ok(())
    })
}

/// # Safety
/// `curve` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_curve_free(curve: *mut PilotcapCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Runs the seeded estimator simulation and returns its report as a JSON
/// string, to be released with [`pilotcap_string_free`].
///
/// # Safety
/// `channel` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_simulate_json(
    channel: *const PilotcapChannel,
    power: f64,
    block_length: u64,
    t_tau: u64,
    seed: u64,
    trials: u64,
    out_json: *mut *mut c_char,
) -> PilotcapStatus {
    guard(|| {
        let ch = channel.as_ref().ok_or_else(|| null("channel"))?;
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let config = SimConfig {
            seed,
            num_trials: trials,
            stats: ch.stats.clone(),
            budget: budget(power, block_length)?,
            plan: TrainingPlan::new(t_tau),
        };
        let report = run_estimation_sim(&config).map_err(fail)?;
        let json = serde_json::to_string(&report).expect("serializable report");
        *out_json = CString::new(json).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pilotcap_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
