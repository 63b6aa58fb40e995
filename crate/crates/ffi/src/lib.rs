//! C ABI for `dpgraph`.
//!
//! Every fallible function returns a [`DpgStatus`]; on failure a message is
//! kept per thread and can be read with [`dpg_last_error_message`]. Objects
//! created by the library are opaque handles released with the matching
//! `*_free` function. Strings passed in must be NUL-terminated UTF-8.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dpgraph::edgelist::{parse_edge_list, write_edge_list, LoadOptions};
use dpgraph::generators::{
    generate_pa_transmission, generate_sir_transmission, GeneratorError, PaTransmissionParams, SirParams,
};
use dpgraph::harness::{self, HarnessError};
use dpgraph::mechanisms::{self, MechanismConfig, MechanismError, MechanismKind, ReleaseSeries, SeriesValues};
use dpgraph::sensitivity::{self, SensitivityError};
use dpgraph::statistics::{self, StatError};
use dpgraph::{DegreeBounds, GraphError, GraphSequence, ProjectionError, ProjectionThresholds, StatisticQuery};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    GraphError = 5,
    BoundViolation = 6,
    Unsupported = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpgMechanism {
    SensDiff = 0,
    ComposeBounded = 1,
    ComposeProjection = 2,
}

/// Opaque graph sequence.
pub struct DpgSequence {
    inner: GraphSequence,
}

/// Opaque released series.
pub struct DpgRelease {
    width: usize,
    values: Vec<f64>,
    sensitivity: u64,
    noise_scale: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DpgSynthetic1Params {
    pub m0: usize,
    pub per_year: usize,
    pub years: usize,
    pub refs: usize,
    pub p_isolated: f64,
    pub decay: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DpgSynthetic2Params {
    pub population: usize,
    pub attach: usize,
    pub p_recover: f64,
    pub p_infect: f64,
    pub initial_infected: usize,
    pub max_steps: usize,
    pub seed: u64,
}

/// `bounds` and `projection_thresholds` are optional: `"D"` or
/// `"D_in:D_out"`, NULL to derive them from the data.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DpgReleaseConfig {
    pub statistic: *const c_char,
    pub mechanism: DpgMechanism,
    pub epsilon: f64,
    pub bounds: *const c_char,
    pub projection_thresholds: *const c_char,
    pub seed: u64,
    pub trial: u64,
    pub zero_noise: bool,
}

struct Failure {
    status: DpgStatus,
    msg: String,
}

impl Failure {
    fn new(status: DpgStatus, msg: impl Into<String>) -> Self {
        Failure {
            status,
            msg: msg.into(),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::Parse { .. } => DpgStatus::ParseError,
            _ => DpgStatus::GraphError,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<StatError> for Failure {
    fn from(e: StatError) -> Self {
        Failure::new(DpgStatus::InvalidArgument, e.to_string())
    }
}

impl From<ProjectionError> for Failure {
    fn from(e: ProjectionError) -> Self {
        let status = match e {
            ProjectionError::Parse(_) => DpgStatus::ParseError,
            _ => DpgStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<SensitivityError> for Failure {
    fn from(e: SensitivityError) -> Self {
        let status = match e {
            SensitivityError::UnsupportedBaselineQuery(_) => DpgStatus::Unsupported,
            _ => DpgStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<GeneratorError> for Failure {
    fn from(e: GeneratorError) -> Self {
        Failure::new(DpgStatus::InvalidArgument, e.to_string())
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Graph(g) => g.into(),
            HarnessError::Statistic(s) => s.into(),
            other => Failure::new(DpgStatus::InvalidArgument, other.to_string()),
        }
    }
}

impl From<MechanismError> for Failure {
    fn from(e: MechanismError) -> Self {
        let msg = e.to_string();
        let status = match e {
            MechanismError::BoundViolation(_) => DpgStatus::BoundViolation,
            MechanismError::UnsupportedQuery(_) => DpgStatus::Unsupported,
            MechanismError::Sensitivity(s) => Failure::from(s).status,
            MechanismError::Graph(g) => Failure::from(g).status,
            _ => DpgStatus::InvalidArgument,
        };
        Failure::new(status, msg)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DpgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            DpgStatus::Ok
        }
        Ok(Err(fail)) => {
            set_error(&fail.msg);
            fail.status
        }
        Err(_) => {
            set_error("internal panic");
            DpgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(DpgStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(DpgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn seq_arg<'a>(p: *const DpgSequence) -> Result<&'a GraphSequence, Failure> {
    p.as_ref()
        .map(|s| &s.inner)
        .ok_or_else(|| Failure::new(DpgStatus::NullPointer, "sequence handle is NULL"))
}

fn out_arg<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(DpgStatus::NullPointer, "output pointer is NULL"))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn dpg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the text edge-list format.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_from_edge_list(
    text: *const c_char,
    time_origin: *const i64,
    out: *mut *mut DpgSequence,
) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let text = str_arg(text, "text")?;
        let opts = LoadOptions {
            time_origin: time_origin.as_ref().copied(),
        };
        let inner = parse_edge_list(text, &opts)?;
        *out = Box::into_raw(Box::new(DpgSequence { inner }));
        Ok(())
    })
}

/// # Safety
/// `seq` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_free(seq: *mut DpgSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Number of time steps, 0 for NULL.
///
/// # Safety
/// `seq` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_horizon(seq: *const DpgSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.inner.horizon())
}

/// # Safety
/// `seq` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_node_count(seq: *const DpgSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.inner.node_count())
}

/// # Safety
/// `seq` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_edge_count(seq: *const DpgSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.inner.edge_count())
}

#[no_mangle]
pub extern "C" fn dpg_synthetic1_default_params() -> DpgSynthetic1Params {
    let d = PaTransmissionParams::default();
    DpgSynthetic1Params {
        m0: d.m0,
        per_year: d.per_year,
        years: d.years,
        refs: d.k,
        p_isolated: d.p_isolated,
        decay: d.decay,
        seed: d.seed,
    }
}

#[no_mangle]
pub extern "C" fn dpg_synthetic2_default_params() -> DpgSynthetic2Params {
    let d = SirParams::default();
    DpgSynthetic2Params {
        population: d.population,
        attach: d.attach,
        p_recover: d.p_recover,
        p_infect: d.p_infect,
        initial_infected: d.initial_infected,
        max_steps: d.max_steps,
        seed: d.seed,
    }
}

/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dpg_generate_synthetic1(
    params: *const DpgSynthetic1Params,
    out: *mut *mut DpgSequence,
) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let p = params
            .as_ref()
            .ok_or_else(|| Failure::new(DpgStatus::NullPointer, "params is NULL"))?;
        let inner = generate_pa_transmission(&PaTransmissionParams {
            m0: p.m0,
            per_year: p.per_year,
            years: p.years,
            k: p.refs,
            p_isolated: p.p_isolated,
            decay: p.decay,
            seed: p.seed,
        })?;
        *out = Box::into_raw(Box::new(DpgSequence { inner }));
        Ok(())
    })
}

/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dpg_generate_synthetic2(
    params: *const DpgSynthetic2Params,
    out: *mut *mut DpgSequence,
) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let p = params
            .as_ref()
            .ok_or_else(|| Failure::new(DpgStatus::NullPointer, "params is NULL"))?;
        let inner = generate_sir_transmission(&SirParams {
            population: p.population,
            attach: p.attach,
            p_recover: p.p_recover,
            p_infect: p.p_infect,
            initial_infected: p.initial_infected,
            max_steps: p.max_steps,
            seed: p.seed,
        })?;
        *out = Box::into_raw(Box::new(DpgSequence { inner }));
        Ok(())
    })
}

/// Serializes to the edge-list format. Free the result with
/// [`dpg_string_free`].
///
/// # Safety
/// `seq` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dpg_sequence_to_edge_list(seq: *const DpgSequence, out: *mut *mut c_char) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let text = write_edge_list(seq_arg(seq)?);
        *out = CString::new(text)
            .map_err(|_| Failure::new(DpgStatus::InvalidArgument, "node id contains NUL"))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dpg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact values `f(G_1), …, f(G_T)` of a scalar statistic. Writes at most
/// `cap` values and stores the horizon in `len`; fails with
/// `BufferTooSmall` when `cap` is less than the horizon.
///
/// # Safety
/// `out` must have room for `cap` doubles; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dpg_statistic_series(
    seq: *const DpgSequence,
    statistic: *const c_char,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> DpgStatus {
    guard(|| {
        out_arg(len)?;
        let seq = seq_arg(seq)?;
        let query: StatisticQuery = str_arg(statistic, "statistic")?.parse()?;
        if query.is_histogram() {
            return Err(Failure::new(DpgStatus::Unsupported, "histograms have no scalar series"));
        }
        let values = statistics::exact_series(seq, &query)?;
        *len = values.len();
        if cap < values.len() {
            return Err(Failure::new(
                DpgStatus::BufferTooSmall,
                format!("need {} values", values.len()),
            ));
        }
        if !values.is_empty() {
            out_arg(out)?;
        }
        for (i, v) in values.iter().enumerate() {
            *out.add(i) = v.as_scalar().expect("scalar query") as f64;
        }
        Ok(())
    })
}

/// Difference-sequence sensitivity for `bounds` (`"D"` or `"D_in:D_out"`).
///
/// # Safety
/// String arguments must be valid C strings; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dpg_diff_sensitivity(
    statistic: *const c_char,
    bounds: *const c_char,
    out: *mut u64,
) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let query: StatisticQuery = str_arg(statistic, "statistic")?.parse()?;
        let bounds: DegreeBounds = str_arg(bounds, "bounds")?.parse()?;
        *out = sensitivity::diff_sequence_sensitivity(&query, &bounds)?.value;
        Ok(())
    })
}

/// Runs one mechanism once.
///
/// # Safety
/// `seq` must be a live handle, `cfg` and `out` valid pointers and the
/// strings in `cfg` NULL or valid C strings.
#[no_mangle]
pub unsafe extern "C" fn dpg_release(
    seq: *const DpgSequence,
    cfg: *const DpgReleaseConfig,
    out: *mut *mut DpgRelease,
) -> DpgStatus {
    guard(|| {
        out_arg(out)?;
        let seq = seq_arg(seq)?;
        let cfg = cfg
            .as_ref()
            .ok_or_else(|| Failure::new(DpgStatus::NullPointer, "config is NULL"))?;
        let query: StatisticQuery = str_arg(cfg.statistic, "statistic")?.parse()?;
        let bounds = match opt_str_arg(cfg.bounds, "bounds")? {
            Some(s) => s.parse::<DegreeBounds>()?,
            None => harness::derive_bounds(seq, 5)?,
        };
        let kind = match cfg.mechanism {
            DpgMechanism::SensDiff => MechanismKind::SensDiff,
            DpgMechanism::ComposeBounded => MechanismKind::ComposeBounded,
            DpgMechanism::ComposeProjection => MechanismKind::ComposeProjection {
                candidates: match opt_str_arg(cfg.projection_thresholds, "projection_thresholds")? {
                    Some(s) => vec![s.parse::<ProjectionThresholds>()?],
                    None => harness::default_tuning_grid(seq, 5)?,
                },
            },
        };
        let series = mechanisms::release(
            seq,
            &query,
            &MechanismConfig {
                epsilon: cfg.epsilon,
                kind,
                bounds,
                seed: cfg.seed,
                trial_id: cfg.trial,
                zero_noise: cfg.zero_noise,
            },
        )?;
        *out = Box::into_raw(Box::new(flatten(&series)));
        Ok(())
    })
}

fn flatten(series: &ReleaseSeries) -> DpgRelease {
    let (width, values) = match &series.releases {
        SeriesValues::Scalar(v) => (1, v.clone()),
        SeriesValues::Histogram(rows) => {
            let width = rows.first().map_or(0, Vec::len);
            (width, rows.iter().flatten().copied().collect())
        }
    };
    DpgRelease {
        width,
        values,
        sensitivity: series.sensitivity.value,
        noise_scale: series.noise_scale,
    }
}

/// Number of releases.
///
/// # Safety
/// `rel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_len(rel: *const DpgRelease) -> usize {
    rel.as_ref()
        .map_or(0, |r| r.values.len().checked_div(r.width).unwrap_or(0))
}

/// Values per release: 1 for scalars, the degree range for histograms.
///
/// # Safety
/// `rel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_width(rel: *const DpgRelease) -> usize {
    rel.as_ref().map_or(0, |r| r.width)
}

/// Pointer to `len * width` values in release-major order, owned by `rel`.
///
/// # Safety
/// `rel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_values(rel: *const DpgRelease) -> *const f64 {
    rel.as_ref().map_or(ptr::null(), |r| r.values.as_ptr())
}

/// # Safety
/// `rel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_sensitivity(rel: *const DpgRelease) -> u64 {
    rel.as_ref().map_or(0, |r| r.sensitivity)
}

/// # Safety
/// `rel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_noise_scale(rel: *const DpgRelease) -> f64 {
    rel.as_ref().map_or(0.0, |r| r.noise_scale)
}

/// # Safety
/// `rel` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dpg_release_free(rel: *mut DpgRelease) {
    if !rel.is_null() {
        drop(Box::from_raw(rel));
    }
}
