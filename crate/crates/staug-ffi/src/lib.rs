//! C ABI for the staug library.
//!
//! All functions return a [`StaugStatus`] code (or a pointer that is null on
//! failure); the most recent failure message is available per thread through
//! [`staug_last_error`]. Handles are opaque and must be released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use staug::augment::{precompute, staug_sample, AugmentConfig, DecompositionCache};
use staug::data::{load_csv, synth_generate, SynthSpec, Tone};
use staug::emd::{decompose, ChannelDecomposition, EmdConfig, WindowPart};
use staug::pipeline::{run_experiment, AugMethod, ExperimentConfig};
use staug::sampling::RandomSource;
use staug::series::{enumerate_windows, MultivariateSeries, WindowPair};
use staug::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaugStatus {
    /// Success.
    StaugOk = 0,
    /// A null pointer or invalid handle was passed.
    StaugNullArgument = 1,
    /// Invalid configuration, bounds, shape, or input data.
    StaugConfigError = 2,
    /// Numerical failure (divergence, degenerate envelope).
    StaugNumericalError = 3,
    /// An output buffer was too small for the requested data.
    StaugBufferTooSmall = 4,
}

/// Augmentation method selector for experiment runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaugAug {
    StaugAugNone = 0,
    StaugAugStaug = 1,
    StaugAugNofreq = 2,
    StaugAugNotime = 3,
    StaugAugFilter = 4,
    StaugAugPermute = 5,
}

/// EMD sifting and termination parameters; mirror of the library defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaugEmdConfig {
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
    pub residue_energy_ratio: f64,
    pub boundary_extrema: usize,
}

/// One train/evaluate run on a series already held in a handle.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaugExperimentConfig {
    pub context: usize,
    pub horizon: usize,
    pub stride: usize,
    pub aug: StaugAug,
    pub alpha: f64,
    pub weight_low: f64,
    pub weight_high: f64,
    pub train_fraction: f64,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: f64,
}

/// Forecast error on the test split.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct StaugMetrics {
    pub mse: f64,
    pub mae: f64,
}

/// Opaque multivariate series handle.
pub struct StaugSeries {
    inner: MultivariateSeries,
}

/// Opaque single-channel decomposition handle.
pub struct StaugDecomposition {
    inner: ChannelDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> StaugStatus {
    match err.exit_code() {
        3 => StaugStatus::StaugNumericalError,
        _ => StaugStatus::StaugConfigError,
    }
}

fn fail(err: Error) -> StaugStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn fail_null(what: &str) -> StaugStatus {
    set_error(format!("{what} must not be null"));
    StaugStatus::StaugNullArgument
}

/// Message for the most recent error on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn staug_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null(), |c| c.as_ptr())
    })
}

/// Library defaults for [`StaugEmdConfig`].
#[no_mangle]
pub extern "C" fn staug_emd_config_default() -> StaugEmdConfig {
    let d = EmdConfig::default();
    StaugEmdConfig {
        sd_threshold: d.sd_threshold,
        max_sift_iters: d.max_sift_iters,
        max_imfs: d.max_imfs,
        residue_energy_ratio: d.residue_energy_ratio,
        boundary_extrema: d.boundary_extrema,
    }
}

/// Library defaults for [`StaugExperimentConfig`] (96-step context/horizon,
/// no augmentation, seed 0).
#[no_mangle]
pub extern "C" fn staug_experiment_config_default() -> StaugExperimentConfig {
    let d = ExperimentConfig::new(96, 96, AugMethod::None, 0);
    StaugExperimentConfig {
        context: d.context,
        horizon: d.horizon,
        stride: d.stride,
        aug: StaugAug::StaugAugNone,
        alpha: d.alpha,
        weight_low: d.weight_low,
        weight_high: d.weight_high,
        train_fraction: d.train_fraction,
        seed: d.seed,
        epochs: d.epochs,
        batch_size: d.batch_size,
        learning_rate: d.learning_rate,
        lr_decay: d.lr_decay,
    }
}

fn emd_config(cfg: &StaugEmdConfig) -> EmdConfig {
    EmdConfig {
        sd_threshold: cfg.sd_threshold,
        max_sift_iters: cfg.max_sift_iters,
        max_imfs: cfg.max_imfs,
        residue_energy_ratio: cfg.residue_energy_ratio,
        boundary_extrema: cfg.boundary_extrema,
    }
}

/// Build a series from a channel-major buffer of `channels * length` values
/// (channel 0 first). Returns null on failure.
///
/// # Safety
/// `values` must point to `channels * length` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn staug_series_new(
    values: *const f64,
    channels: usize,
    length: usize,
) -> *mut StaugSeries {
    if values.is_null() {
        fail_null("values");
        return ptr::null_mut();
    }
    let data = std::slice::from_raw_parts(values, channels.saturating_mul(length));
    let columns: Vec<Vec<f64>> = (0..channels)
        .map(|c| data[c * length..(c + 1) * length].to_vec())
        .collect();
    match MultivariateSeries::from_values(columns) {
        Ok(inner) => Box::into_raw(Box::new(StaugSeries { inner })),
        Err(err) => {
            fail(err);
            ptr::null_mut()
        }
    }
}

/// Load a series from a CSV file (header row, timestamp first column).
/// Returns null on failure.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn staug_series_from_csv(path: *const c_char) -> *mut StaugSeries {
    if path.is_null() {
        fail_null("path");
        return ptr::null_mut();
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("path is not valid UTF-8".into());
            return ptr::null_mut();
        }
    };
    match load_csv(path) {
        Ok(inner) => Box::into_raw(Box::new(StaugSeries { inner })),
        Err(err) => {
            fail(err);
            ptr::null_mut()
        }
    }
}

/// Generate the synthetic tones + trend + noise series used by the test
/// harness. Returns null on failure.
#[no_mangle]
pub extern "C" fn staug_series_synth(
    length: usize,
    channels: usize,
    noise_std: f64,
    seed: u64,
) -> *mut StaugSeries {
    let spec = SynthSpec {
        length,
        channels,
        tones: vec![
            Tone { freq: 0.04, amplitude: 1.0 },
            Tone { freq: 0.25, amplitude: 0.4 },
        ],
        trend_slope: 0.001,
        noise_std,
        seed,
    };
    match synth_generate(&spec) {
        Ok(inner) => Box::into_raw(Box::new(StaugSeries { inner })),
        Err(err) => {
            fail(err);
            ptr::null_mut()
        }
    }
}

/// Release a series handle. Null is ignored.
///
/// # Safety
/// `series` must come from a `staug_series_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn staug_series_free(series: *mut StaugSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Number of time steps, or 0 for a null handle.
///
/// # Safety
/// `series` must be a live series handle or null.
#[no_mangle]
pub unsafe extern "C" fn staug_series_len(series: *const StaugSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.len())
}

/// Number of channels, or 0 for a null handle.
///
/// # Safety
/// `series` must be a live series handle or null.
#[no_mangle]
pub unsafe extern "C" fn staug_series_channels(series: *const StaugSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.channels())
}

/// Decompose one channel into IMFs plus residue. Returns null on failure.
///
/// # Safety
/// `series` must be a live series handle; `cfg` null means library defaults.
#[no_mangle]
pub unsafe extern "C" fn staug_decompose(
    series: *const StaugSeries,
    channel: usize,
    cfg: *const StaugEmdConfig,
) -> *mut StaugDecomposition {
    let Some(series) = series.as_ref() else {
        fail_null("series");
        return ptr::null_mut();
    };
    if channel >= series.inner.channels() {
        fail(Error::Bounds(format!(
            "channel {channel} out of range: series has {} channels",
            series.inner.channels()
        )));
        return ptr::null_mut();
    }
    let cfg = cfg
        .as_ref()
        .map_or_else(EmdConfig::default, emd_config);
    if let Err(err) = cfg.validate() {
        fail(err);
        return ptr::null_mut();
    }
    let inner = decompose(series.inner.channel(channel), &cfg);
    Box::into_raw(Box::new(StaugDecomposition { inner }))
}

/// Release a decomposition handle. Null is ignored.
///
/// # Safety
/// `dec` must come from [`staug_decompose`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn staug_decomposition_free(dec: *mut StaugDecomposition) {
    if !dec.is_null() {
        drop(Box::from_raw(dec));
    }
}

/// Number of IMFs, or 0 for a null handle.
///
/// # Safety
/// `dec` must be a live decomposition handle or null.
#[no_mangle]
pub unsafe extern "C" fn staug_decomposition_imf_count(dec: *const StaugDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.inner.imfs.len())
}

/// Signal length, or 0 for a null handle.
///
/// # Safety
/// `dec` must be a live decomposition handle or null.
#[no_mangle]
pub unsafe extern "C" fn staug_decomposition_len(dec: *const StaugDecomposition) -> usize {
    dec.as_ref().map_or(0, |d| d.inner.source_length)
}

/// Copy IMF `index` (or the residue when `index` equals the IMF count) into
/// `out`, which must hold `out_len >= staug_decomposition_len(dec)` doubles.
///
/// # Safety
/// `dec` must be a live decomposition handle; `out` must point to `out_len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn staug_decomposition_component(
    dec: *const StaugDecomposition,
    index: usize,
    out: *mut f64,
    out_len: usize,
) -> StaugStatus {
    let Some(dec) = dec.as_ref() else {
        return fail_null("dec");
    };
    if out.is_null() {
        return fail_null("out");
    }
    let component = if index < dec.inner.imfs.len() {
        &dec.inner.imfs[index]
    } else if index == dec.inner.imfs.len() {
        &dec.inner.residue
    } else {
        return fail(Error::Bounds(format!(
            "component {index} out of range: {} IMFs plus residue",
            dec.inner.imfs.len()
        )));
    };
    if out_len < component.len() {
        set_error(format!(
            "output buffer holds {out_len} values, component needs {}",
            component.len()
        ));
        return StaugStatus::StaugBufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(component.as_ptr(), out, component.len());
    StaugStatus::StaugOk
}

/// Produce one augmented window (frequency recombination + mix-up) from the
/// stride-1 window at `offset`. History and future are written channel-major
/// into buffers of `channels * context` and `channels * horizon` doubles.
///
/// # Safety
/// `series` must be a live series handle; `out_history` and `out_future` must
/// point to buffers of the stated sizes.
#[no_mangle]
pub unsafe extern "C" fn staug_augment_window(
    series: *const StaugSeries,
    context: usize,
    horizon: usize,
    offset: usize,
    seed: u64,
    out_history: *mut f64,
    out_future: *mut f64,
) -> StaugStatus {
    let Some(series) = series.as_ref() else {
        return fail_null("series");
    };
    if out_history.is_null() {
        return fail_null("out_history");
    }
    if out_future.is_null() {
        return fail_null("out_future");
    }
    let windows = match enumerate_windows(&series.inner, context, horizon, 1) {
        Ok(w) => w,
        Err(err) => return fail(err),
    };
    let index = match windows.iter().position(|w| w.source_offset == offset) {
        Some(i) => i,
        None => {
            return fail(Error::Bounds(format!(
                "no window starts at offset {offset}; series hosts {} windows",
                windows.len()
            )))
        }
    };
    let cfg = AugmentConfig::default();
    let cache: DecompositionCache = precompute(0, &windows, WindowPart::Full, &EmdConfig::default());
    let mut rng = RandomSource::new(seed);
    let wp: WindowPair = match staug_sample(index, &windows, &cache, 0, &cfg, &mut rng) {
        Ok(wp) => wp,
        Err(err) => return fail(err),
    };
    for (c, channel) in wp.history.iter().enumerate() {
        std::ptr::copy_nonoverlapping(channel.as_ptr(), out_history.add(c * context), context);
    }
    for (c, channel) in wp.future.iter().enumerate() {
        std::ptr::copy_nonoverlapping(channel.as_ptr(), out_future.add(c * horizon), horizon);
    }
    StaugStatus::StaugOk
}

/// Run a full train/evaluate experiment and write test metrics to `out`.
///
/// # Safety
/// `series` must be a live series handle; `cfg` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn staug_run_experiment(
    series: *const StaugSeries,
    cfg: *const StaugExperimentConfig,
    out: *mut StaugMetrics,
) -> StaugStatus {
    let Some(series) = series.as_ref() else {
        return fail_null("series");
    };
    let Some(cfg) = cfg.as_ref() else {
        return fail_null("cfg");
    };
    if out.is_null() {
        return fail_null("out");
    }
    let aug = match cfg.aug {
        StaugAug::StaugAugNone => AugMethod::None,
        StaugAug::StaugAugStaug => AugMethod::Staug,
        StaugAug::StaugAugNofreq => AugMethod::StaugNofreq,
        StaugAug::StaugAugNotime => AugMethod::StaugNotime,
        StaugAug::StaugAugFilter => AugMethod::Filter,
        StaugAug::StaugAugPermute => AugMethod::Permute,
    };
    let mut exp = ExperimentConfig::new(cfg.context, cfg.horizon, aug, cfg.seed);
    exp.stride = cfg.stride;
    exp.alpha = cfg.alpha;
    exp.weight_low = cfg.weight_low;
    exp.weight_high = cfg.weight_high;
    exp.train_fraction = cfg.train_fraction;
    exp.epochs = cfg.epochs;
    exp.batch_size = cfg.batch_size;
    exp.learning_rate = cfg.learning_rate;
    exp.lr_decay = cfg.lr_decay;
    match run_experiment(&series.inner, &exp) {
        Ok(result) => {
            *out = StaugMetrics {
                mse: result.metrics.mse,
                mae: result.metrics.mae,
            };
            StaugStatus::StaugOk
        }
        Err(err) => fail(err),
    }
}
