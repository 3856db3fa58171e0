//! C ABI for the simulator.
//!
//! Configuration lives behind an opaque handle created by
//! `cusbf_config_new` or `cusbf_config_parse` and released by
//! `cusbf_config_free`. Every fallible call returns a [`CusbfStatus`];
//! the per-thread detail message for the most recent failure is available
//! through `cusbf_last_error_message`. Strings returned by the library
//! are released with `cusbf_string_free`.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use cusbf::metrics::monte_carlo;
use cusbf::scheduling::Scheme;
use cusbf::sweep::{run_sweep, SweepSpec, SweepVariable};
use cusbf::ScenarioConfig;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CusbfStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument failed to parse (key, value, scheme, or variable).
    InvalidArgument = 2,
    /// The configuration violates an invariant.
    InvalidConfig = 3,
    /// The simulation itself failed; see `cusbf_last_error_message`.
    ComputationFailed = 4,
}

/// Scheduling/beamforming scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CusbfScheme {
    Cusbf = 0,
    Gwc = 1,
    Jsdm = 2,
}

impl From<CusbfScheme> for Scheme {
    fn from(s: CusbfScheme) -> Scheme {
        match s {
            CusbfScheme::Cusbf => Scheme::Cusbf,
            CusbfScheme::Gwc => Scheme::Gwc,
            CusbfScheme::Jsdm => Scheme::Jsdm,
        }
    }
}

/// Monte Carlo aggregate over the configured drops.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CusbfRunSummary {
    /// Mean sum rate in bits/s/Hz.
    pub sum_rate_mean: f64,
    /// Standard error of the sum-rate mean.
    pub sum_rate_stderr: f64,
    /// Mean rate per served user in bits/s/Hz.
    pub per_user_rate_mean: f64,
    /// Mean number of served users.
    pub n_selected_mean: f64,
    /// Number of Monte Carlo drops evaluated.
    pub drops: u64,
    /// Master seed the runs derived their streams from.
    pub seed: u64,
}

/// Opaque scenario configuration handle.
pub struct CusbfConfig {
    inner: ScenarioConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

/// Detail message of the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cusbf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

// ---------------------------------------------------------------------------
// Configuration handle
// ---------------------------------------------------------------------------

/// New configuration with the library defaults. Never null.
#[no_mangle]
pub extern "C" fn cusbf_config_new() -> *mut CusbfConfig {
    Box::into_raw(Box::new(CusbfConfig {
        inner: ScenarioConfig::default(),
    }))
}

/// Parse a `key = value` configuration text (same format as the CLI
/// config file). Returns null on error, with the detail in
/// `cusbf_last_error_message`.
#[no_mangle]
pub unsafe extern "C" fn cusbf_config_parse(text: *const c_char) -> *mut CusbfConfig {
    let Some(text) = cstr_arg(text) else {
        set_last_error("config text is null or not UTF-8");
        return std::ptr::null_mut();
    };
    match ScenarioConfig::from_kv_text(text) {
        Ok(inner) => Box::into_raw(Box::new(CusbfConfig { inner })),
        Err(e) => {
            set_last_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Set one field by name; keys match the config-file keys.
#[no_mangle]
pub unsafe extern "C" fn cusbf_config_set(
    config: *mut CusbfConfig,
    key: *const c_char,
    value: *const c_char,
) -> CusbfStatus {
    let Some(config) = config.as_mut() else {
        return CusbfStatus::NullArgument;
    };
    let (Some(key), Some(value)) = (cstr_arg(key), cstr_arg(value)) else {
        set_last_error("key/value must be non-null UTF-8");
        return CusbfStatus::NullArgument;
    };
    match config.inner.set_field(key, value) {
        Ok(()) => CusbfStatus::Ok,
        Err(e) => {
            set_last_error(e.to_string());
            CusbfStatus::InvalidArgument
        }
    }
}

/// Check every configuration invariant.
#[no_mangle]
pub unsafe extern "C" fn cusbf_config_validate(config: *const CusbfConfig) -> CusbfStatus {
    let Some(config) = config.as_ref() else {
        return CusbfStatus::NullArgument;
    };
    match config.inner.validate() {
        Ok(()) => CusbfStatus::Ok,
        Err(e) => {
            set_last_error(e.to_string());
            CusbfStatus::InvalidConfig
        }
    }
}

/// Release a configuration handle. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cusbf_config_free(config: *mut CusbfConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

// ---------------------------------------------------------------------------
// Simulation entry points
// ---------------------------------------------------------------------------

/// Receiver noise power in watts for this configuration.
#[no_mangle]
pub unsafe extern "C" fn cusbf_noise_power_w(
    config: *const CusbfConfig,
    out: *mut f64,
) -> CusbfStatus {
    let (Some(config), Some(out)) = (config.as_ref(), out.as_mut()) else {
        return CusbfStatus::NullArgument;
    };
    *out = cusbf::geometry::noise_power(&config.inner);
    CusbfStatus::Ok
}

/// Run the configured Monte Carlo experiment for one scheme.
#[no_mangle]
pub unsafe extern "C" fn cusbf_monte_carlo(
    config: *const CusbfConfig,
    scheme: CusbfScheme,
    out: *mut CusbfRunSummary,
) -> CusbfStatus {
    let (Some(config), Some(out)) = (config.as_ref(), out.as_mut()) else {
        return CusbfStatus::NullArgument;
    };
    if let Err(e) = config.inner.validate() {
        set_last_error(e.to_string());
        return CusbfStatus::InvalidConfig;
    }
    match monte_carlo(&config.inner, scheme.into()) {
        Ok(report) => {
            *out = CusbfRunSummary {
                sum_rate_mean: report.sum_rate_mean,
                sum_rate_stderr: report.sum_rate_stderr,
                per_user_rate_mean: report.per_user_rate_mean,
                n_selected_mean: report.n_selected_mean,
                drops: report.drops as u64,
                seed: report.seed,
            };
            CusbfStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            CusbfStatus::ComputationFailed
        }
    }
}

/// Run a sweep and return the CSV table as a newly allocated string, or
/// null on error. `variable` is one of `epsilon`, `K`, `K_s`,
/// `power_dBm`, `M`. Release the string with `cusbf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cusbf_sweep_csv(
    config: *const CusbfConfig,
    variable: *const c_char,
    values: *const f64,
    n_values: usize,
    schemes: *const CusbfScheme,
    n_schemes: usize,
) -> *mut c_char {
    let Some(config) = config.as_ref() else {
        set_last_error("config is null");
        return std::ptr::null_mut();
    };
    let Some(variable) = cstr_arg(variable) else {
        set_last_error("variable is null or not UTF-8");
        return std::ptr::null_mut();
    };
    if values.is_null() || n_values == 0 || schemes.is_null() || n_schemes == 0 {
        set_last_error("values/schemes must be non-empty");
        return std::ptr::null_mut();
    }
    let Some(variable) = SweepVariable::parse(variable) else {
        set_last_error(format!("unknown sweep variable `{variable}`"));
        return std::ptr::null_mut();
    };
    let values = std::slice::from_raw_parts(values, n_values).to_vec();
    let schemes = std::slice::from_raw_parts(schemes, n_schemes)
        .iter()
        .map(|&s| s.into())
        .collect();
    let spec = SweepSpec {
        variable,
        values,
        schemes,
        base: config.inner.clone(),
    };
    match run_sweep(&spec) {
        Ok(csv) => match CString::new(csv) {
            Ok(c) => c.into_raw(),
            Err(_) => {
                set_last_error("CSV contained an interior NUL byte");
                std::ptr::null_mut()
            }
        },
        Err(e) => {
            set_last_error(e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Release a string returned by this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cusbf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
