//! C ABI for the modulo-sample recovery pipeline.
//!
//! All functions are `#[no_mangle] extern "C"`, return a [`ModrecStatus`]
//! code (never unwind), and write results through caller-provided buffers.
//! The recovered continuous function is handed out as an opaque heap handle
//! that must be released with [`modrec_recovered_free`]. The generated
//! header lives in `include/modrec.h` and is refreshed by the build script.

use modrec::experiments;
use modrec::quasi_interpolant::RecoveredFunction;
use modrec::signal_model::UniformGrid;
use modrec::{
    build_qi, denoise, knn_denoise, unwrap_phases, Error, FractionalPhase, Kernel, KnnConfig,
    LpConfig, UnwrappedSamples,
};
use std::ffi::c_char;
use std::slice;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModrecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The local-polynomial moment matrix fell below its eigenvalue floor.
    IllConditioned = 3,
    /// Too few samples for the requested interpolation degree.
    InsufficientSamples = 4,
}

/// Kernel selector for the local-polynomial denoiser.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModrecKernel {
    Epanechnikov = 0,
    Box = 1,
    Triangular = 2,
}

impl From<ModrecKernel> for Kernel {
    fn from(k: ModrecKernel) -> Kernel {
        match k {
            ModrecKernel::Epanechnikov => Kernel::Epanechnikov,
            ModrecKernel::Box => Kernel::Box,
            ModrecKernel::Triangular => Kernel::Triangular,
        }
    }
}

/// Opaque handle to a recovered continuous function on [0, 1].
pub struct ModrecRecovered {
    inner: RecoveredFunction,
}

fn status_of(e: &Error) -> ModrecStatus {
    match e {
        Error::IllConditioned { .. } => ModrecStatus::IllConditioned,
        Error::InsufficientSamples { .. } => ModrecStatus::InsufficientSamples,
        Error::Stage { source, .. } => status_of(source),
        _ => ModrecStatus::InvalidArgument,
    }
}

/// Version string of the underlying library; static storage, do not free.
#[no_mangle]
pub extern "C" fn modrec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Neighbor-count rule `k = ceil(0.09 n^(2/3) (ln n)^(1/3))`, clamped to
/// `1..=n`; returns 0 only for `n = 0`.
#[no_mangle]
pub extern "C" fn modrec_knn_auto_k(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    modrec::auto_k(n)
}

/// Bandwidth rule `const * (ln n / n)^(beta/(2 beta + 1))`; NaN for n < 2.
#[no_mangle]
pub extern "C" fn modrec_practical_bandwidth(constant: f64, beta: f64, n: usize) -> f64 {
    if n < 2 || !constant.is_finite() || beta.is_nan() || beta <= 0.0 {
        return f64::NAN;
    }
    modrec::practical_bandwidth(constant, beta, n)
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

fn samples_from(values: &[f64]) -> Result<modrec::ModuloSamples, ModrecStatus> {
    if values.is_empty() {
        return Err(ModrecStatus::InvalidArgument);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ModrecStatus::InvalidArgument);
    }
    let grid = UniformGrid::new(values.len()).map_err(|_| ModrecStatus::InvalidArgument)?;
    // inputs are reduced mod 1 so callers may pass raw wrapped readings
    let values = values
        .iter()
        .map(|&v| FractionalPhase::wrap(v).value())
        .collect();
    Ok(modrec::ModuloSamples { grid, values })
}

/// Local-polynomial denoising of `n` modulo-1 samples (values outside
/// `[0, 1)` are reduced). Writes `n` fractional phases to `out_phases`;
/// `out_min_eig` (optional) receives the smallest moment-matrix eigenvalue.
///
/// # Safety
/// `y` must point to `n` readable doubles and `out_phases` to `n` writable
/// doubles; `out_min_eig` must be null or point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn modrec_lp_denoise(
    y: *const f64,
    n: usize,
    order: u32,
    bandwidth: f64,
    kernel: ModrecKernel,
    min_eig_floor: f64,
    out_phases: *mut f64,
    out_min_eig: *mut f64,
) -> ModrecStatus {
    let Some(values) = slice_arg(y, n) else {
        return ModrecStatus::NullPointer;
    };
    if out_phases.is_null() {
        return ModrecStatus::NullPointer;
    }
    let samples = match samples_from(values) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let cfg = match LpConfig::new(order, bandwidth, kernel.into()) {
        Ok(c) => c.with_min_eig_floor(if min_eig_floor > 0.0 {
            min_eig_floor
        } else {
            LpConfig::DEFAULT_MIN_EIG_FLOOR
        }),
        Err(_) => return ModrecStatus::InvalidArgument,
    };
    match denoise(&samples, &cfg) {
        Ok(den) => {
            let out = slice::from_raw_parts_mut(out_phases, n);
            for (o, p) in out.iter_mut().zip(&den.phases) {
                *o = p.value();
            }
            if !out_min_eig.is_null() {
                *out_min_eig = den.min_eig_overall.unwrap_or(f64::NAN);
            }
            ModrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// k-nearest-neighbor denoising of `n` modulo-1 samples; `k = 0` selects the
/// automatic rule. Writes `n` fractional phases to `out_phases`.
///
/// # Safety
/// `y` must point to `n` readable doubles and `out_phases` to `n` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn modrec_knn_denoise(
    y: *const f64,
    n: usize,
    k: usize,
    out_phases: *mut f64,
) -> ModrecStatus {
    let Some(values) = slice_arg(y, n) else {
        return ModrecStatus::NullPointer;
    };
    if out_phases.is_null() {
        return ModrecStatus::NullPointer;
    }
    let samples = match samples_from(values) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let cfg = if k == 0 {
        KnnConfig::auto()
    } else {
        KnnConfig::fixed(k)
    };
    match knn_denoise(&samples, &cfg) {
        Ok(den) => {
            let out = slice::from_raw_parts_mut(out_phases, n);
            for (o, p) in out.iter_mut().zip(&den.phases) {
                *o = p.value();
            }
            ModrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Sequential unwrapping of `n` fractional phases (all in `[0, 1)`) into
/// real-valued samples, written to `out_values`.
///
/// # Safety
/// `phases` must point to `n` readable doubles and `out_values` to `n`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn modrec_unwrap(
    phases: *const f64,
    n: usize,
    out_values: *mut f64,
) -> ModrecStatus {
    let Some(values) = slice_arg(phases, n) else {
        return ModrecStatus::NullPointer;
    };
    if out_values.is_null() {
        return ModrecStatus::NullPointer;
    }
    let mut lifted = Vec::with_capacity(n);
    for &v in values {
        match FractionalPhase::new(v) {
            Ok(p) => lifted.push(p),
            Err(_) => return ModrecStatus::InvalidArgument,
        }
    }
    let grid = match UniformGrid::new(n) {
        Ok(g) => g,
        Err(_) => return ModrecStatus::InvalidArgument,
    };
    match unwrap_phases(&lifted, &grid) {
        Ok(unw) => {
            let out = slice::from_raw_parts_mut(out_values, n);
            out.copy_from_slice(&unw.values);
            ModrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Builds the continuous estimate from `n` unwrapped samples on the uniform
/// grid `x_i = i/n` and stores an owned handle in `*out`.
///
/// # Safety
/// `values` must point to `n` readable doubles; `out` must be a valid
/// non-null destination for the handle pointer.
#[no_mangle]
pub unsafe extern "C" fn modrec_recover_build(
    values: *const f64,
    n: usize,
    degree: usize,
    out: *mut *mut ModrecRecovered,
) -> ModrecStatus {
    let Some(vals) = slice_arg(values, n) else {
        return ModrecStatus::NullPointer;
    };
    if out.is_null() {
        return ModrecStatus::NullPointer;
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return ModrecStatus::InvalidArgument;
    }
    let grid = match UniformGrid::new(n) {
        Ok(g) => g,
        Err(_) => return ModrecStatus::InvalidArgument,
    };
    let samples = UnwrappedSamples {
        grid,
        values: vals.to_vec(),
    };
    match build_qi(&samples, degree) {
        Ok(rec) => {
            *out = Box::into_raw(Box::new(ModrecRecovered { inner: rec }));
            ModrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Evaluates a recovered function at `x` in [0, 1].
///
/// # Safety
/// `rec` must be a live handle from [`modrec_recover_build`] or
/// [`modrec_lp_pipeline`]; `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn modrec_recovered_eval(
    rec: *const ModrecRecovered,
    x: f64,
    out: *mut f64,
) -> ModrecStatus {
    if rec.is_null() || out.is_null() {
        return ModrecStatus::NullPointer;
    }
    if !(0.0..=1.0).contains(&x) {
        return ModrecStatus::InvalidArgument;
    }
    *out = (*rec).inner.eval(x);
    ModrecStatus::Ok
}

/// Evaluates a recovered function at `len` abscissae.
///
/// # Safety
/// `rec` must be a live handle; `xs` must point to `len` readable doubles in
/// [0, 1] and `out` to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn modrec_recovered_eval_many(
    rec: *const ModrecRecovered,
    xs: *const f64,
    len: usize,
    out: *mut f64,
) -> ModrecStatus {
    if rec.is_null() || xs.is_null() || out.is_null() {
        return ModrecStatus::NullPointer;
    }
    let xs = slice::from_raw_parts(xs, len);
    let out = slice::from_raw_parts_mut(out, len);
    for (o, &x) in out.iter_mut().zip(xs) {
        if !(0.0..=1.0).contains(&x) {
            return ModrecStatus::InvalidArgument;
        }
        *o = (*rec).inner.eval(x);
    }
    ModrecStatus::Ok
}

/// Releases a handle returned by [`modrec_recover_build`] or
/// [`modrec_lp_pipeline`]. Null is a no-op.
///
/// # Safety
/// `rec` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn modrec_recovered_free(rec: *mut ModrecRecovered) {
    if !rec.is_null() {
        drop(Box::from_raw(rec));
    }
}

/// One-shot pipeline: lp-denoise `n` modulo samples, unwrap, and build the
/// continuous estimate. `out_unwrapped` (optional) receives the `n`
/// unwrapped sample estimates; `out` (optional) receives the function
/// handle.
///
/// # Safety
/// `y` must point to `n` readable doubles; `out_unwrapped` must be null or
/// point to `n` writable doubles; `out` must be null or a valid destination
/// for the handle pointer.
#[no_mangle]
pub unsafe extern "C" fn modrec_lp_pipeline(
    y: *const f64,
    n: usize,
    order: u32,
    bandwidth: f64,
    kernel: ModrecKernel,
    min_eig_floor: f64,
    qi_degree: usize,
    out_unwrapped: *mut f64,
    out: *mut *mut ModrecRecovered,
) -> ModrecStatus {
    let Some(values) = slice_arg(y, n) else {
        return ModrecStatus::NullPointer;
    };
    let samples = match samples_from(values) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let cfg = match LpConfig::new(order, bandwidth, kernel.into()) {
        Ok(c) => c.with_min_eig_floor(if min_eig_floor > 0.0 {
            min_eig_floor
        } else {
            LpConfig::DEFAULT_MIN_EIG_FLOOR
        }),
        Err(_) => return ModrecStatus::InvalidArgument,
    };
    let den = match denoise(&samples, &cfg) {
        Ok(d) => d,
        Err(e) => return status_of(&e),
    };
    let unw = match unwrap_phases(&den.phases, &samples.grid) {
        Ok(u) => u,
        Err(e) => return status_of(&e),
    };
    if !out_unwrapped.is_null() {
        slice::from_raw_parts_mut(out_unwrapped, n).copy_from_slice(&unw.values);
    }
    if !out.is_null() {
        match build_qi(&unw, qi_degree) {
            Ok(rec) => *out = Box::into_raw(Box::new(ModrecRecovered { inner: rec })),
            Err(e) => return status_of(&e),
        }
    }
    ModrecStatus::Ok
}

/// Seed-mixing rule used by sweeps (exposed so bindings can reproduce CSV
/// rows exactly).
#[no_mangle]
pub extern "C" fn modrec_derive_run_seed(base_seed: u64, n: usize) -> u64 {
    experiments::derive_run_seed(base_seed, n)
}
