//! Recovery of smooth functions from noisy modulo-1 samples.
//!
//! Given observations `y_i = (f(x_i) + eta_i) mod 1` on the uniform grid
//! `x_i = i/n`, the estimate of `f` (up to one global integer shift) is built
//! in three stages:
//!
//! 1. **Denoise** ([`lp_denoiser`], baseline [`knn_denoiser`]): lift the
//!    samples onto the unit circle and smooth them with a local polynomial
//!    (or k-nearest-neighbor) estimator, then project back and read off
//!    denoised fractional phases.
//! 2. **Unwrap** ([`unwrapper`]): integrate consecutive phase differences,
//!    compensating wraps, to get real-valued sample estimates.
//! 3. **Recover** ([`quasi_interpolant`]): build a continuous function on
//!    `[0, 1]` from the unwrapped samples with a local, polynomial-reproducing
//!    linear operator.
//!
//! [`signal_model`] generates reproducible synthetic data, [`metrics_bounds`]
//! provides wrap-around/shift-aligned error metrics plus calculators for the
//! theoretical bandwidth and error bounds, and [`experiments`] orchestrates
//! parameter sweeps with CSV artifacts. The `modrec` binary exposes all of it
//! on the command line.

pub mod circle;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod knn_denoiser;
pub mod lp_denoiser;
pub mod metrics_bounds;
pub mod quasi_interpolant;
pub mod signal_model;
pub mod unwrapper;

pub use circle::{wrap_distance, CirclePoint, FractionalPhase};
pub use error::{Error, Result};
pub use kernel::Kernel;
pub use knn_denoiser::{auto_k, knn_denoise, KnnConfig};
pub use lp_denoiser::{denoise, DenoisedModulo, LpConfig, LpWeights};
pub use metrics_bounds::{
    a_sigma, aligned_error, practical_bandwidth, theoretical_bandwidth, theoretical_delta,
    wrap_rmse, ErrorReport, TheoryConstants,
};
pub use quasi_interpolant::{build_qi, QiOperator, RecoveredFunction};
pub use signal_model::{
    holder_seminorm_estimate, sample_modulo, ModuloSamples, NoiseModel, SmoothnessParams,
    TestFunction, UniformGrid,
};
pub use unwrapper::{check_unwrap_feasibility, unwrap_phases, UnwrappedSamples};
