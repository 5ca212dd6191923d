//! C ABI over `ahmass`.
//!
//! Every function returns an [`AhmStatus`]; on failure the message is kept
//! per thread and read with [`ahm_last_error_message`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use ahmass::cli::{cmd_check, cmd_flux_sweep, cmd_gauge_demo, cmd_mass, RunConfig};
use ahmass::conformal::{compactify, decompactify};
use ahmass::gauge::{apply_radial_gauge, predicted_gauge_mass};
use ahmass::mass::{
    default_radii, flux_at_radius, invariant_mass, mass_integral, momentum_vector, Classification, LimitStatus,
    MassResult, MassSettings, MomentumCovector, ZERO_TOLERANCE,
};
use ahmass::reference::families::{builtin_metric, default_background, Family};
use ahmass::reference::{nb_basis, Background};
use ahmass::{Error, MetricField};

/// Result codes shared by all entry points.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ChartDomain = 4,
    DegenerateMetric = 5,
    BoundaryMismatch = 6,
    MetricSingularity = 7,
    BasisUnknown = 8,
    NoAnalyticDerivatives = 9,
    Divergent = 10,
    BoundaryConditions = 11,
    NotLorentz = 12,
    InvalidUtf8 = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

/// Causal class of a mass covector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhmClassification {
    TimelikeFuture = 0,
    TimelikePast = 1,
    NullFuture = 2,
    NullPast = 3,
    Spacelike = 4,
    Zero = 5,
}

/// Extrapolation outcome, worst over the covector components.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhmLimitStatus {
    Converged = 0,
    Unconverged = 1,
    Divergent = 2,
}

/// A metric together with the background its mass is measured against.
pub struct AhmMetric {
    metric: Arc<dyn MetricField>,
    background: Background,
}

/// Mass covector, invariant mass and diagnostics.
pub struct AhmMassResult {
    momentum: MomentumCovector,
    mass: MassResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> AhmStatus {
    match e {
        Error::DegenerateMetric { .. } => AhmStatus::DegenerateMetric,
        Error::ChartDomain { .. } => AhmStatus::ChartDomain,
        Error::BoundaryMismatch(_) => AhmStatus::BoundaryMismatch,
        Error::MetricSingularity(_) => AhmStatus::MetricSingularity,
        Error::BasisUnknown(_) => AhmStatus::BasisUnknown,
        Error::NoAnalyticDerivatives(_) => AhmStatus::NoAnalyticDerivatives,
        Error::DimensionMismatch { .. } => AhmStatus::DimensionMismatch,
        Error::InvalidArgument(_) => AhmStatus::InvalidArgument,
        Error::Divergent(_) => AhmStatus::Divergent,
        Error::BoundaryConditions(_) => AhmStatus::BoundaryConditions,
        Error::NotLorentz(_) => AhmStatus::NotLorentz,
    }
}

struct Failure(AhmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AhmStatus::NullPointer, format!("`{what}` is NULL"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AhmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AhmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            AhmStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn metric_ref<'a>(m: *const AhmMetric) -> Result<&'a AhmMetric, Failure> {
    m.as_ref().ok_or_else(|| null("metric"))
}

unsafe fn result_ref<'a>(r: *const AhmMassResult) -> Result<&'a AhmMassResult, Failure> {
    r.as_ref().ok_or_else(|| null("result"))
}

unsafe fn str_arg<'a>(s: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(AhmStatus::InvalidUtf8, format!("`{name}`: {e}")))
}

unsafe fn radii_arg(radii: *const f64, len: usize) -> Result<Vec<f64>, Failure> {
    if radii.is_null() {
        return if len == 0 { Ok(default_radii()) } else { Err(null("radii")) };
    }
    Ok(std::slice::from_raw_parts(radii, len).to_vec())
}

fn new_metric(family: Family, background: Background, out: *mut *mut AhmMetric) -> Result<(), Failure> {
    let metric = builtin_metric(&family)?;
    let handle = Box::into_raw(Box::new(AhmMetric { metric, background }));
    // SAFETY: `out` was checked by the caller.
    unsafe { out.write(handle) };
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ahm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ahm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Hyperbolic space `H^n` over the round sphere.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_hyperbolic(n: usize, out: *mut *mut AhmMetric) -> AhmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        new_metric(Family::Hyperbolic { n }, Background::hyperbolic(n)?, out)
    })
}

/// Two-dimensional Kottler metric `dr²/(r² − η) + r² dφ²`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_kottler2d(eta: f64, out: *mut *mut AhmMetric) -> AhmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        new_metric(Family::Kottler2d { eta }, Background::hyperbolic(2)?, out)
    })
}

/// `dr²/(r² + k − 2m r^{2−n}) + r² h̆` over the default boundary for `(k, n)`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_schwarzschild_ads(
    n: usize,
    k: i32,
    m_param: f64,
    out: *mut *mut AhmMetric,
) -> AhmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        new_metric(Family::SchwarzschildAds { n, m_param, k }, default_background(k, n)?, out)
    })
}

/// New handle for `metric` pulled back by `r ↦ r + γ r^{1−n/2}`.
///
/// # Safety
/// `metric` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_apply_gauge(
    metric: *const AhmMetric,
    gamma: f64,
    out: *mut *mut AhmMetric,
) -> AhmStatus {
    guard(|| {
        let m = metric_ref(metric)?;
        let gauge = apply_radial_gauge(m.metric.clone(), &m.background, gamma)?;
        let handle = Box::new(AhmMetric {
            metric: Arc::new(gauge),
            background: m.background.clone(),
        });
        write(out, Box::into_raw(handle), "out")
    })
}

/// # Safety
/// `metric` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_free(metric: *mut AhmMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Number of basis potentials `V₍μ₎` (the covector length).
///
/// # Safety
/// `metric` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ahm_metric_basis_len(metric: *const AhmMetric, out: *mut usize) -> AhmStatus {
    guard(|| {
        let m = metric_ref(metric)?;
        write(out, nb_basis(&m.background)?.len(), "out")
    })
}

/// Flux of `V₍μ₎` through `{r = radius}` with its quadrature error estimate.
///
/// # Safety
/// `metric` must be a live handle; `value` and `quad_err` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ahm_flux(
    metric: *const AhmMetric,
    mu: usize,
    radius: f64,
    value: *mut f64,
    quad_err: *mut f64,
) -> AhmStatus {
    guard(|| {
        let m = metric_ref(metric)?;
        if value.is_null() || quad_err.is_null() {
            return Err(null("value/quad_err"));
        }
        let basis = nb_basis(&m.background)?;
        let v = basis.get(mu).ok_or_else(|| {
            Failure(AhmStatus::InvalidArgument, format!("mu = {mu} but the basis has {} elements", basis.len()))
        })?;
        let s = flux_at_radius(
            m.metric.as_ref(),
            &m.background,
            v,
            MassSettings::default().scheme,
            radius,
            MassSettings::default().integrand,
        )?;
        value.write(s.value);
        quad_err.write(s.quad_err);
        Ok(())
    })
}

/// Mass covector and invariant mass; `radii` may be NULL with
/// `n_radii = 0` for the default schedule.
///
/// # Safety
/// `metric` must be a live handle, `radii` valid for `n_radii` reads,
/// `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ahm_mass(
    metric: *const AhmMetric,
    radii: *const f64,
    n_radii: usize,
    out: *mut *mut AhmMassResult,
) -> AhmStatus {
    guard(|| {
        let m = metric_ref(metric)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let settings = MassSettings {
            radii: radii_arg(radii, n_radii)?,
            ..Default::default()
        };
        let momentum = momentum_vector(m.metric.as_ref(), &m.background, &settings)?;
        let mass = invariant_mass(&momentum, m.background.k(), ZERO_TOLERANCE)?;
        out.write(Box::into_raw(Box::new(AhmMassResult { momentum, mass })));
        Ok(())
    })
}

/// Copies the covector into `buf`; `len` receives its length. Fails with
/// `BufferTooSmall` (after setting `len`) when `cap` is too small.
///
/// # Safety
/// `result` must be a live handle, `buf` valid for `cap` writes, `len` for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn ahm_mass_result_components(
    result: *const AhmMassResult,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> AhmStatus {
    guard(|| {
        let r = result_ref(result)?;
        let c = &r.momentum.components;
        write(len, c.len(), "len")?;
        if cap < c.len() {
            return Err(Failure(AhmStatus::BufferTooSmall, format!("need {} slots, got {cap}", c.len())));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(c.as_ptr(), buf, c.len());
        Ok(())
    })
}

/// `m²`, the signed mass `m` (with `has_m = false` when spacelike), and the
/// causal class.
///
/// # Safety
/// `result` must be a live handle; the out pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ahm_mass_result_invariants(
    result: *const AhmMassResult,
    m2: *mut f64,
    m: *mut f64,
    has_m: *mut bool,
    class: *mut AhmClassification,
) -> AhmStatus {
    guard(|| {
        let r = result_ref(result)?;
        write(m2, r.mass.m2, "m2")?;
        write(m, r.mass.m.unwrap_or(f64::NAN), "m")?;
        write(has_m, r.mass.m.is_some(), "has_m")?;
        let c = match r.mass.classification {
            Classification::TimelikeFuture => AhmClassification::TimelikeFuture,
            Classification::TimelikePast => AhmClassification::TimelikePast,
            Classification::NullFuture => AhmClassification::NullFuture,
            Classification::NullPast => AhmClassification::NullPast,
            Classification::Spacelike => AhmClassification::Spacelike,
            Classification::Zero => AhmClassification::Zero,
        };
        write(class, c, "class")
    })
}

/// Worst extrapolation status over the covector components.
///
/// # Safety
/// `result` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ahm_mass_result_status(result: *const AhmMassResult, out: *mut AhmLimitStatus) -> AhmStatus {
    guard(|| {
        let r = result_ref(result)?;
        let worst = r.momentum.diagnostics.iter().fold(AhmLimitStatus::Converged, |acc, d| {
            let s = match d.status {
                LimitStatus::Converged => AhmLimitStatus::Converged,
                LimitStatus::Unconverged => AhmLimitStatus::Unconverged,
                LimitStatus::Divergent => AhmLimitStatus::Divergent,
            };
            if s as i32 > acc as i32 {
                s
            } else {
                acc
            }
        });
        write(out, worst, "out")
    })
}

/// # Safety
/// `result` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ahm_mass_result_free(result: *mut AhmMassResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Computed `H(V₍₀₎)` of the γ-deformed `H^n` and its closed-form value.
///
/// # Safety
/// `computed` and `predicted` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ahm_gauge_demo(n: usize, gamma: f64, computed: *mut f64, predicted: *mut f64) -> AhmStatus {
    guard(|| {
        if computed.is_null() || predicted.is_null() {
            return Err(null("computed/predicted"));
        }
        let bg = Background::hyperbolic(n)?;
        let g = apply_radial_gauge(Arc::new(bg.metric()), &bg, gamma)?;
        let v0 = nb_basis(&bg)?.swap_remove(0);
        let limit = mass_integral(&g, &bg, &v0, &MassSettings::default())?;
        computed.write(limit.value);
        predicted.write(predicted_gauge_mass(n, gamma));
        Ok(())
    })
}

/// `x = 2/(r + √(r² + k))`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ahm_compactify(r: f64, k: i32, out: *mut f64) -> AhmStatus {
    guard(|| write(out, compactify(r, k)?, "out"))
}

/// `r = (1 − kx²/4)/x`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ahm_decompactify(x: f64, k: i32, out: *mut f64) -> AhmStatus {
    guard(|| write(out, decompactify(x, k)?, "out"))
}

/// Runs a CLI command (`mass`, `gauge-demo`, `check`, `flux-sweep`) on a JSON
/// config. `report` receives the JSON report (free with
/// [`ahm_string_free`]) and `exit_code` the code the binary would return.
///
/// # Safety
/// `command` and `config_json` must be NUL-terminated strings; `report` and
/// `exit_code` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ahm_run_json(
    command: *const c_char,
    config_json: *const c_char,
    report: *mut *mut c_char,
    exit_code: *mut i32,
) -> AhmStatus {
    guard(|| {
        let command = str_arg(command, "command")?;
        let config = RunConfig::from_json(str_arg(config_json, "config_json")?)?;
        if report.is_null() || exit_code.is_null() {
            return Err(null("report/exit_code"));
        }
        let outcome = match command {
            "mass" => cmd_mass(&config)?,
            "gauge-demo" => cmd_gauge_demo(&config)?,
            "check" => cmd_check(&config)?,
            "flux-sweep" => cmd_flux_sweep(&config)?,
            other => {
                return Err(Failure(AhmStatus::InvalidArgument, format!("unknown command `{other}`")));
            }
        };
        let text = CString::new(outcome.json).map_err(|e| Failure(AhmStatus::InvalidArgument, e.to_string()))?;
        report.write(text.into_raw());
        exit_code.write(outcome.exit_code);
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ahm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
