//! C ABI for `latclock`.
//!
//! Objects cross the boundary as opaque handles created by `lc_*_new` /
//! `lc_*_load` style functions and released with the matching `lc_*_free`.
//! Every fallible call returns an [`LcStatus`]; on failure a message is
//! available from [`lc_last_error`] on the same thread. Null handles and
//! output pointers are rejected with `LC_STATUS_NULL_POINTER`, and panics
//! never unwind into C.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use latclock::commands::prepare;
use latclock::lattice::{trap_depth, LatticeConfig, LatticeGeometry};
use latclock::noise::synthesize;
use latclock::scenario::{load_scenario, Scenario};
use latclock::servo::qpn_limit;
use latclock::spectroscopy::{fourier_limited_fwhm, rabi_probability};
use latclock::stability::{overlapping_allan, StabilityCurve, TauGrid};
use latclock::{Error, FrequencyTrace, Isotope, NoiseSpec, RngStream};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    UnknownScenario = 4,
    Io = 5,
    Divergence = 6,
    Degenerate = 7,
    Utf8 = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// A resolved scenario.
pub struct LcScenario(Scenario);

/// A fractional-frequency time series.
pub struct LcTrace(FrequencyTrace);

/// An Allan deviation curve.
pub struct LcCurve(StabilityCurve);

/// Noise coefficients on `S_y(f) = h0 + h-1/f + h-2/f²` plus linear drift.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LcNoiseSpec {
    pub white_fm_h0: f64,
    pub flicker_fm_hm1: f64,
    pub random_walk_hm2: f64,
    pub linear_drift: f64,
    pub flicker_floor_sigma: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LcPrepResult {
    pub atom_number: f64,
    /// K
    pub temperature: f64,
    pub transfer_fraction: f64,
    /// K
    pub lattice_depth: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LcStatus {
    match e {
        Error::InvalidInput(_) | Error::StageOrder { .. } => LcStatus::InvalidInput,
        Error::Config { .. } | Error::Parse(_) => LcStatus::Config,
        Error::UnknownScenario(_) => LcStatus::UnknownScenario,
        Error::Io { .. } => LcStatus::Io,
        Error::Divergence { .. } => LcStatus::Divergence,
        Error::Degenerate(_) => LcStatus::Degenerate,
    }
}

enum Fail {
    Null(&'static str),
    Utf8(&'static str),
    Range(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            LcStatus::NullPointer
        }
        Ok(Err(Fail::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            LcStatus::Utf8
        }
        Ok(Err(Fail::Range(msg))) => {
            set_error(msg);
            LcStatus::OutOfRange
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            LcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in
/// bytes excluding the terminator, or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads scenario `name` from the TOML file at `path`, or from the built-in
/// scenarios when `path` is null.
///
/// # Safety
/// `name` and a non-null `path` must be NUL-terminated strings; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_scenario_load(
    name: *const c_char,
    path: *const c_char,
    out_scenario: *mut *mut LcScenario,
) -> LcStatus {
    guard(|| {
        let slot = out(out_scenario, "out_scenario")?;
        *slot = ptr::null_mut();
        let name = str_arg(name, "name")?;
        let path = if path.is_null() {
            None
        } else {
            Some(str_arg(path, "path")?)
        };
        let s = load_scenario(path.map(Path::new), name)?;
        *slot = Box::into_raw(Box::new(LcScenario(s)));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from [`lc_scenario_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_scenario_free(scenario: *mut LcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle; `out_seed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_scenario_seed(scenario: *const LcScenario, out_seed: *mut u64) -> LcStatus {
    guard(|| {
        let s = handle(scenario, "scenario")?;
        *out(out_seed, "out_seed")? = s.0.seed();
        Ok(())
    })
}

/// Clock transition frequency of the scenario's species, Hz.
///
/// # Safety
/// `scenario` must be a live handle; `out_hz` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_scenario_clock_frequency(scenario: *const LcScenario, out_hz: *mut f64) -> LcStatus {
    guard(|| {
        let s = handle(scenario, "scenario")?;
        *out(out_hz, "out_hz")? = s.0.nu0();
        Ok(())
    })
}

/// Runs the scenario's preparation chain.
///
/// # Safety
/// `scenario` must be a live handle; `out_result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_prep_run(scenario: *const LcScenario, out_result: *mut LcPrepResult) -> LcStatus {
    guard(|| {
        let s = handle(scenario, "scenario")?;
        let slot = out(out_result, "out_result")?;
        let r = prepare(&s.0)?;
        *slot = LcPrepResult {
            atom_number: r.final_state.atom_number,
            temperature: r.final_state.temperature,
            transfer_fraction: r.transfer_fraction,
            lattice_depth: r.lattice_depth,
        };
        Ok(())
    })
}

/// Synthesizes `n` samples spaced `dt` seconds.
///
/// # Safety
/// `spec` must point to a valid [`LcNoiseSpec`]; `out_trace` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_noise_synthesize(
    spec: *const LcNoiseSpec,
    n: usize,
    dt: f64,
    seed: u64,
    stream_id: u64,
    out_trace: *mut *mut LcTrace,
) -> LcStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        let c = handle(spec, "spec")?;
        let spec = NoiseSpec {
            white_fm_h0: c.white_fm_h0,
            flicker_fm_hm1: c.flicker_fm_hm1,
            random_walk_hm2: c.random_walk_hm2,
            linear_drift: c.linear_drift,
            flicker_floor_sigma: c.flicker_floor_sigma,
        };
        let mut rng = RngStream::new(seed, stream_id);
        let t = synthesize(&spec, n, dt, &mut rng)?;
        *slot = Box::into_raw(Box::new(LcTrace(t)));
        Ok(())
    })
}

/// Wraps caller-owned samples in a new trace (the data are copied).
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out_trace` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_from_samples(
    samples: *const f64,
    len: usize,
    dt: f64,
    out_trace: *mut *mut LcTrace,
) -> LcStatus {
    guard(|| {
        let slot = out(out_trace, "out_trace")?;
        *slot = ptr::null_mut();
        if samples.is_null() {
            return Err(Fail::Null("samples"));
        }
        let data = std::slice::from_raw_parts(samples, len).to_vec();
        let t = FrequencyTrace::new(data, dt, "external")?;
        *slot = Box::into_raw(Box::new(LcTrace(t)));
        Ok(())
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_len(trace: *const LcTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// Sample interval in seconds, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_dt(trace: *const LcTrace) -> f64 {
    trace.as_ref().map_or(0.0, |t| t.0.dt)
}

/// Copies all samples into `buf`, which must hold at least
/// [`lc_trace_len`] doubles.
///
/// # Safety
/// `trace` must be a live handle; `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_copy(trace: *const LcTrace, buf: *mut f64, len: usize) -> LcStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        if len < t.0.len() {
            return Err(Fail::Range(format!(
                "buffer holds {len} values, trace has {}",
                t.0.len()
            )));
        }
        ptr::copy_nonoverlapping(t.0.samples.as_ptr(), buf, t.0.len());
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_trace_free(trace: *mut LcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Overlapping Allan deviation at `taus` (seconds, ascending multiples of
/// the sample interval). A null `taus` selects the octave grid.
///
/// # Safety
/// `trace` must be a live handle; `taus` must be null or point to `n_taus`
/// doubles; `out_curve` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_allan_overlapping(
    trace: *const LcTrace,
    taus: *const f64,
    n_taus: usize,
    out_curve: *mut *mut LcCurve,
) -> LcStatus {
    guard(|| {
        let slot = out(out_curve, "out_curve")?;
        *slot = ptr::null_mut();
        let t = &handle(trace, "trace")?.0;
        let grid = if taus.is_null() {
            TauGrid::Octave.resolve(t.dt, t.len())
        } else {
            std::slice::from_raw_parts(taus, n_taus).to_vec()
        };
        let curve = overlapping_allan(t, &grid)?;
        *slot = Box::into_raw(Box::new(LcCurve(curve)));
        Ok(())
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_curve_len(curve: *const LcCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.len())
}

/// Reads point `index`.
///
/// # Safety
/// `curve` must be a live handle; the output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_curve_get(
    curve: *const LcCurve,
    index: usize,
    out_tau: *mut f64,
    out_sigma: *mut f64,
) -> LcStatus {
    guard(|| {
        let c = &handle(curve, "curve")?.0;
        let tau = out(out_tau, "out_tau")?;
        let sigma = out(out_sigma, "out_sigma")?;
        if index >= c.len() {
            return Err(Fail::Range(format!(
                "index {index} out of range for {} points",
                c.len()
            )));
        }
        *tau = c.taus[index];
        *sigma = c.sigmas[index];
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_curve_free(curve: *mut LcCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Rabi excitation probability; angular detuning and Rabi frequency.
#[no_mangle]
pub extern "C" fn lc_rabi_probability(detuning: f64, rabi: f64, pulse_time: f64) -> f64 {
    rabi_probability(detuning, rabi, pulse_time)
}

/// FWHM (Hz) of a π-pulse Rabi line of length `pulse_time`.
///
/// # Safety
/// `out_hz` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_fourier_limited_fwhm(pulse_time: f64, out_hz: *mut f64) -> LcStatus {
    guard(|| {
        let slot = out(out_hz, "out_hz")?;
        *slot = fourier_limited_fwhm(pulse_time)?;
        Ok(())
    })
}

/// Lattice depth in kelvin for the default depth calibration. `species` is
/// an isotope label such as `"Sr88"`; the wavelength must lie near its magic
/// wavelength.
///
/// # Safety
/// `species` must be a NUL-terminated string; `out_kelvin` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_trap_depth(
    species: *const c_char,
    input_power: f64,
    waist: f64,
    wavelength: f64,
    enhancement_factor: f64,
    out_kelvin: *mut f64,
) -> LcStatus {
    guard(|| {
        let slot = out(out_kelvin, "out_kelvin")?;
        let isotope: Isotope = str_arg(species, "species")?.parse()?;
        let cfg = LatticeConfig {
            input_power,
            waist,
            wavelength,
            enhancement_factor,
            geometry: LatticeGeometry::default(),
            depth_coefficient: None,
        };
        cfg.validate()?;
        *slot = trap_depth(&cfg, &latclock::species::species(isotope))?;
        Ok(())
    })
}

/// Projection-noise instability at averaging time `tau`.
///
/// # Safety
/// `out_sigma` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_qpn_limit(
    fwhm: f64,
    nu0: f64,
    atoms: f64,
    cycle_time: f64,
    tau: f64,
    out_sigma: *mut f64,
) -> LcStatus {
    guard(|| {
        let slot = out(out_sigma, "out_sigma")?;
        if !(tau > 0.0) {
            return Err(Fail::Core(Error::InvalidInput("tau must be > 0".into())));
        }
        *slot = qpn_limit(fwhm, nu0, atoms, cycle_time)?.sigma(tau);
        Ok(())
    })
}
