//! Stage 2: sequential unwrapping of denoised fractional phases into
//! real-valued sample estimates, defined up to one global integer shift.
//!
//! Walking the grid left to right, a consecutive phase difference larger
//! than 1/2 in magnitude is treated as a wrap and compensated by ±1. The
//! running compensation is accumulated as an exact integer, so every output
//! differs from its input phase by an integer and consecutive outputs never
//! jump by more than 1/2.

use crate::circle::FractionalPhase;
use crate::error::{Error, Result};
use crate::signal_model::{SmoothnessParams, UniformGrid};

/// Real-valued sample estimates from unwrapping; `values[i]` equals the
/// input phase plus an integer.
#[derive(Debug, Clone, PartialEq)]
pub struct UnwrappedSamples {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

/// Sequential unwrapping along the grid order.
///
/// For `d_i = g(x_i) - g(x_{i-1})`: step by `d_i` when `|d_i| < 1/2`, by
/// `1 + d_i` when `d_i < -1/2`, by `-1 + d_i` when `d_i > 1/2`. The
/// measure-zero boundary `|d_i| = 1/2` takes the no-wrap branch so the
/// procedure is total.
pub fn unwrap_phases(phases: &[FractionalPhase], grid: &UniformGrid) -> Result<UnwrappedSamples> {
    if phases.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot unwrap an empty sequence".into(),
        ));
    }
    if phases.len() != grid.n() {
        return Err(Error::InvalidConfig(format!(
            "phase count {} does not match grid size {}",
            phases.len(),
            grid.n()
        )));
    }
    let mut values = Vec::with_capacity(phases.len());
    let mut shift: i64 = 0; // integer so residues are preserved exactly
    values.push(phases[0].value());
    for w in phases.windows(2) {
        let d = w[1].value() - w[0].value();
        if d > 0.5 {
            shift -= 1;
        } else if d < -0.5 {
            shift += 1;
        }
        values.push(w[1].value() + shift as f64);
    }
    Ok(UnwrappedSamples {
        grid: grid.clone(),
        values,
    })
}

/// Advisory check of the unwrapping hypothesis
/// `delta_n + 2L / n^{min(beta, 1)} < 1`; unwrapping itself never fails.
pub fn check_unwrap_feasibility(delta_n: f64, smoothness: &SmoothnessParams, n: usize) -> bool {
    let beta = smoothness.beta();
    let l = smoothness.lipschitz_scale();
    delta_n + 2.0 * l / (n as f64).powf(beta.min(1.0)) < 1.0
}
