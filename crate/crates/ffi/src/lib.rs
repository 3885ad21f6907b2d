//! C ABI for the pomcp-budget planner.
//!
//! Callers parse a JSON experiment configuration into an opaque handle, run
//! seeded episodes against it, and read back flat metric structs. Every
//! fallible call returns a [`PbStatus`]; on failure a thread-local message
//! with the details is available through [`pb_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pomcp_budget::harness::{build_environment, run_episode, Environment, ExperimentConfig};
use pomcp_budget::Error;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbStatus {
    /// The call succeeded.
    PbOk = 0,
    /// A required pointer argument was null.
    PbNullArgument = 1,
    /// A string argument was not valid UTF-8.
    PbInvalidUtf8 = 2,
    /// The configuration JSON failed to parse or validate.
    PbInvalidConfig = 3,
    /// A numeric routine failed (ill-conditioned Gram matrix).
    PbNumericError = 4,
    /// Any other runtime failure; see `pb_last_error`.
    PbRuntimeError = 5,
    /// A Rust panic was caught at the boundary.
    PbPanic = 6,
}

/// Opaque experiment handle: a validated configuration plus the environment
/// built from it. Created by `pb_config_from_json`, released by
/// `pb_config_free`.
pub struct PbConfig {
    config: ExperimentConfig,
    environment: Environment,
}

/// Flat per-episode metrics filled in by `pb_episode_run`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PbEpisodeMetrics {
    /// Number of environment steps taken.
    pub steps: u64,
    /// Sum of per-step rewards under the pre-update belief.
    pub total_reward: f64,
    /// Sum of ground-truth field values along the executed trajectory.
    pub total_truth: f64,
    /// Rollouts actually spent planning over the episode.
    pub total_rollouts: u64,
    /// Steps on which the planner was invoked (the rest executed a
    /// previously committed action for free).
    pub planning_calls: u64,
    /// Planning wall-clock time in milliseconds.
    pub total_wall_ms: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message.into());
}

fn status_for(err: &Error) -> PbStatus {
    match err {
        Error::Json(_) | Error::Config(_) | Error::InvalidKernel(_) => PbStatus::PbInvalidConfig,
        Error::IllConditioned { .. } => PbStatus::PbNumericError,
        _ => PbStatus::PbRuntimeError,
    }
}

fn fail(err: &Error) -> PbStatus {
    set_error(err.to_string());
    status_for(err)
}

/// Runs `body` with panics converted to `PbPanic` so unwinding never crosses
/// the C boundary.
fn guarded(body: impl FnOnce() -> PbStatus) -> PbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            PbStatus::PbPanic
        }
    }
}

/// Parses and validates a JSON experiment configuration.
///
/// On success writes a heap-allocated handle to `out` and returns `PbOk`;
/// the caller owns the handle and must release it with `pb_config_free`.
/// On failure `out` is untouched.
///
/// # Safety
/// `json` must point to a nul-terminated string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pb_config_from_json(json: *const c_char, out: *mut *mut PbConfig) -> PbStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            set_error("null argument");
            return PbStatus::PbNullArgument;
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(text) => text,
            Err(_) => {
                set_error("configuration string is not valid UTF-8");
                return PbStatus::PbInvalidUtf8;
            }
        };
        let config = match ExperimentConfig::from_json(text) {
            Ok(config) => config,
            Err(err) => return fail(&err),
        };
        let environment = match build_environment(&config) {
            Ok(environment) => environment,
            Err(err) => return fail(&err),
        };
        let handle = Box::new(PbConfig { config, environment });
        unsafe { out.write(Box::into_raw(handle)) };
        PbStatus::PbOk
    })
}

/// Releases a handle returned by `pb_config_from_json`. A null handle is a
/// no-op.
///
/// # Safety
/// `handle` must be null or a pointer obtained from `pb_config_from_json`
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn pb_config_free(handle: *mut PbConfig) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Runs one seeded episode and fills `metrics`. The handle is not mutated,
/// so episodes for different seeds may run concurrently on one handle.
///
/// # Safety
/// `handle` must be a live pointer from `pb_config_from_json` and `metrics`
/// must point to writable storage for one `PbEpisodeMetrics`.
#[no_mangle]
pub unsafe extern "C" fn pb_episode_run(
    handle: *const PbConfig,
    seed: u64,
    metrics: *mut PbEpisodeMetrics,
) -> PbStatus {
    guarded(|| {
        if handle.is_null() || metrics.is_null() {
            set_error("null argument");
            return PbStatus::PbNullArgument;
        }
        let pb = unsafe { &*handle };
        let log = match run_episode(&pb.config, &pb.environment, seed) {
            Ok(log) => log,
            Err(err) => return fail(&err),
        };
        let planning_calls = log.rows.iter().filter(|row| row.rollouts_used > 0).count() as u64;
        unsafe {
            metrics.write(PbEpisodeMetrics {
                steps: log.rows.len() as u64,
                total_reward: log.total_reward,
                total_truth: log.total_truth,
                total_rollouts: log.total_rollouts as u64,
                planning_calls,
                total_wall_ms: log.total_wall_ms,
            });
        }
        PbStatus::PbOk
    })
}

/// Copies the message for the most recent failure on this thread into `buf`
/// (truncated to `len - 1` bytes, always nul-terminated when `len > 0`) and
/// returns the full message length in bytes, excluding the terminator. Call
/// with a null `buf` or zero `len` to query the required size.
///
/// # Safety
/// When non-null, `buf` must point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn pb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        if !buf.is_null() && len > 0 {
            let n = message.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(message.as_ptr(), buf.cast(), n);
                buf.add(n).write(0);
            }
        }
        message.len()
    })
}

/// Library version as a static nul-terminated string; the caller must not
/// free it.
#[no_mangle]
pub extern "C" fn pb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
