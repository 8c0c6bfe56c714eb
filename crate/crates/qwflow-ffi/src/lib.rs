//! C ABI for the walk toolkit.
//!
//! Conventions: opaque handles behind pointers, integer status codes, no
//! panics across the boundary (everything is wrapped in `catch_unwind`),
//! and out-parameters that are written only on `QWF_STATUS_OK`. Sizes and
//! times are `uint64_t` so the header is identical across platforms.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};

use qwflow_core::analysis as analysis;
use qwflow_core::graph::{evolve, ModelConfig, TailMode};
use qwflow_core::reduced::{evolve_reduced, Epsilon};
use qwflow_core::series::TimeSeries;
use qwflow_core::spectral::{decompose, Branch};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwfStatus {
    /// Success; out-parameters are valid.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range (bad size, bad index, bad theta, ...).
    InvalidArgument = 2,
    /// The computation failed numerically (degenerate spectrum, ...).
    NumericFailure = 3,
    /// Filesystem failure.
    IoFailure = 4,
    /// A panic was caught at the boundary; state may be incomplete.
    Panic = 5,
}

/// Observable column of a time series.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwfColumn {
    /// Relative probability at the marked vertex.
    NuMarked = 0,
    /// Relative probability at one unmarked vertex.
    NuUnmarked = 1,
    /// Internal-graph norm of the state.
    NormKn = 2,
}

/// Opaque time-series handle; create with `qwf_series_reduced` or
/// `qwf_series_simulate`, release with `qwf_series_free`.
pub struct QwfSeries {
    inner: TimeSeries,
}

fn status_of(err: &qwflow_core::Error) -> QwfStatus {
    match err.exit_code() {
        2 => QwfStatus::InvalidArgument,
        4 => QwfStatus::IoFailure,
        _ => QwfStatus::NumericFailure,
    }
}

fn guarded(body: impl FnOnce() -> QwfStatus + UnwindSafe) -> QwfStatus {
    catch_unwind(body).unwrap_or(QwfStatus::Panic)
}

fn hand_out(out: *mut *mut QwfSeries, series: TimeSeries) -> QwfStatus {
    let handle = Box::new(QwfSeries { inner: series });
    unsafe { *out = Box::into_raw(handle) };
    QwfStatus::Ok
}

/// Version of the underlying toolkit as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qwf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Runs the reduced recursion for `t = 0..=t_max` on a graph with `n`
/// vertices and stores a new series handle in `*out`.
#[no_mangle]
pub extern "C" fn qwf_series_reduced(
    n: u64,
    t_max: u64,
    out: *mut *mut QwfSeries,
) -> QwfStatus {
    if out.is_null() {
        return QwfStatus::NullPointer;
    }
    guarded(|| match Epsilon::from_n(n as usize) {
        Ok(eps) => hand_out(out, evolve_reduced(&eps, t_max as usize)),
        Err(e) => status_of(&e),
    })
}

/// Runs the full arc-space simulation (truncated tails when `source_sink`
/// is false) and stores a new series handle in `*out`.
#[no_mangle]
pub extern "C" fn qwf_series_simulate(
    n: u64,
    marked: u64,
    t_max: u64,
    source_sink: bool,
    out: *mut *mut QwfSeries,
) -> QwfStatus {
    if out.is_null() {
        return QwfStatus::NullPointer;
    }
    guarded(|| {
        let mode = if source_sink {
            TailMode::SourceSink
        } else {
            TailMode::TruncatedTails
        };
        let run = ModelConfig::new(n as usize, marked as usize, t_max as usize, mode)
            .and_then(|config| evolve(&config));
        match run {
            Ok(series) => hand_out(out, series),
            Err(e) => status_of(&e),
        }
    })
}

/// Number of records in a series; 0 for a null handle.
#[no_mangle]
pub extern "C" fn qwf_series_len(series: *const QwfSeries) -> u64 {
    if series.is_null() {
        return 0;
    }
    unsafe { (*series).inner.len() as u64 }
}

/// Reads one observable at step `t` into `*out`.
#[no_mangle]
pub extern "C" fn qwf_series_value(
    series: *const QwfSeries,
    t: u64,
    column: QwfColumn,
    out: *mut f64,
) -> QwfStatus {
    if series.is_null() || out.is_null() {
        return QwfStatus::NullPointer;
    }
    let inner = unsafe { &(*series).inner };
    let Some(record) = inner.records.get(t as usize) else {
        return QwfStatus::InvalidArgument;
    };
    let value = match column {
        QwfColumn::NuMarked => record.nu_marked,
        QwfColumn::NuUnmarked => record.nu_unmarked,
        QwfColumn::NormKn => record.norm_kn,
    };
    unsafe { *out = value };
    QwfStatus::Ok
}

/// Releases a series handle; a null handle is a no-op.
#[no_mangle]
pub extern "C" fn qwf_series_free(series: *mut QwfSeries) {
    if !series.is_null() {
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Stationary relative probability at the marked vertex.
#[no_mangle]
pub extern "C" fn qwf_stationary_nu(n: u64, out: *mut f64) -> QwfStatus {
    if out.is_null() {
        return QwfStatus::NullPointer;
    }
    guarded(|| match analysis::limit_marked_probability(n as usize) {
        Ok(nu) => {
            unsafe { *out = nu };
            QwfStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Mixing time to accuracy `e^(-theta)`; writes the last violating step to
/// `*t_theta_out` and the horizon certificate to `*converged_out`.
#[no_mangle]
pub extern "C" fn qwf_mixing_time(
    n: u64,
    theta: f64,
    horizon_factor: f64,
    t_theta_out: *mut u64,
    converged_out: *mut bool,
) -> QwfStatus {
    if t_theta_out.is_null() || converged_out.is_null() {
        return QwfStatus::NullPointer;
    }
    guarded(
        || match analysis::mixing_time(n as usize, theta, horizon_factor) {
            Ok(result) => {
                unsafe {
                    *t_theta_out = result.t_theta as u64;
                    *converged_out = result.converged;
                }
                QwfStatus::Ok
            }
            Err(e) => status_of(&e),
        },
    )
}

/// Eigenvalues of the reduced update matrix, ordered as the real branch
/// near −1 followed by the conjugate pair (positive imaginary part first).
/// `re_out` and `im_out` must point to arrays of 3 doubles.
#[no_mangle]
pub extern "C" fn qwf_eigenvalues(n: u64, re_out: *mut f64, im_out: *mut f64) -> QwfStatus {
    if re_out.is_null() || im_out.is_null() {
        return QwfStatus::NullPointer;
    }
    guarded(|| {
        let run = Epsilon::from_n(n as usize).and_then(|eps| decompose(eps.value()));
        match run {
            Ok(decomp) => {
                for (i, branch) in Branch::ALL.iter().enumerate() {
                    let lam = decomp.eigenvalue(*branch);
                    unsafe {
                        *re_out.add(i) = lam.re;
                        *im_out.add(i) = lam.im;
                    }
                }
                QwfStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Damped-oscillation profile of the marked-vertex probability; NaN for
/// sizes below the smallest admissible graph.
#[no_mangle]
pub extern "C" fn qwf_pulsation_formula(t: f64, n: u64) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    catch_unwind(|| analysis::pulsation_formula(t, n as usize)).unwrap_or(f64::NAN)
}

/// Refit of the profile with the corrected envelope decay; NaN for sizes
/// below the smallest admissible graph.
#[no_mangle]
pub extern "C" fn qwf_refined_pulsation_formula(t: f64, n: u64) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    catch_unwind(|| analysis::refined_pulsation_formula(t, n as usize)).unwrap_or(f64::NAN)
}
