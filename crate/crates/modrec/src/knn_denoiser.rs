//! Baseline Stage-1 denoiser: average the k nearest circle-lifted samples
//! and project back.
//!
//! On a uniform grid the k nearest neighbors of a grid point form a
//! contiguous index window, so neighborhoods are computed arithmetically
//! (no spatial index). Equidistant ties break toward the smaller index and
//! boundary windows shift inward so every point has exactly k neighbors.

use crate::circle::FractionalPhase;
use crate::error::{Error, Result};
use crate::lp_denoiser::DenoisedModulo;
use crate::signal_model::ModuloSamples;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    /// Explicit neighbor count; ignored when `auto_rule` is set.
    pub k: Option<usize>,
    /// Use `k = ceil(0.09 n^{2/3} (ln n)^{1/3})`.
    pub auto_rule: bool,
}

impl KnnConfig {
    pub fn fixed(k: usize) -> Self {
        KnnConfig {
            k: Some(k),
            auto_rule: false,
        }
    }

    pub fn auto() -> Self {
        KnnConfig {
            k: None,
            auto_rule: true,
        }
    }

    /// Resolves the neighbor count for a grid of size `n`.
    pub fn resolve_k(&self, n: usize) -> Result<usize> {
        let k = if self.auto_rule {
            auto_k(n)
        } else {
            self.k.ok_or_else(|| {
                Error::InvalidConfig("kNN config needs either k or the auto rule".into())
            })?
        };
        if k == 0 || k > n {
            return Err(Error::InvalidConfig(format!(
                "k = {k} out of range 1..={n}"
            )));
        }
        Ok(k)
    }
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig::auto()
    }
}

/// Neighbor-count rule `k = ceil(0.09 n^{2/3} (ln n)^{1/3})`, natural log,
/// clamped into `1..=n`.
pub fn auto_k(n: usize) -> usize {
    let nf = n as f64;
    let k = (0.09 * nf.powf(2.0 / 3.0) * nf.ln().powf(1.0 / 3.0)).ceil();
    (k as usize).clamp(1, n)
}

/// Contiguous index window of the k nearest grid points around `i`.
fn neighbor_window(points: &[f64], i: usize, k: usize) -> (usize, usize) {
    let n = points.len();
    let (mut lo, mut hi) = (i, i);
    while hi - lo + 1 < k {
        if lo == 0 {
            hi += 1;
        } else if hi == n - 1 {
            lo -= 1;
        } else {
            let dl = points[i] - points[lo - 1];
            let dr = points[hi + 1] - points[i];
            if dl <= dr {
                lo -= 1; // ties go to the smaller index
            } else {
                hi += 1;
            }
        }
    }
    (lo, hi)
}

/// Stage-1 kNN pass: `h(x_i)` is the projected mean of the k nearest lifted
/// samples; phases follow by arg extraction.
pub fn knn_denoise(samples: &ModuloSamples, cfg: &KnnConfig) -> Result<DenoisedModulo> {
    let n = samples.grid.n();
    let k = cfg.resolve_k(n)?;
    let z: Vec<Complex64> = samples
        .values
        .iter()
        .map(|&y| {
            let p = FractionalPhase::wrap(y).lift();
            Complex64::new(p.re(), p.im())
        })
        .collect();
    let points = samples.grid.points();
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = neighbor_window(points, i, k);
        let mut acc = Complex64::new(0.0, 0.0);
        for zj in &z[lo..=hi] {
            acc += zj;
        }
        raw.push(acc / k as f64);
    }
    Ok(DenoisedModulo::from_raw(samples.grid.clone(), raw, None))
}
