//! Compactly supported smoothing kernels.
//!
//! Every kernel here vanishes outside `[-1, 1]` and satisfies a two-sided
//! bound `k_min·1{|u| <= delta} <= K(u) <= k_max·1{|u| <= 1}` with the
//! constants exposed so bound calculators can consume them. Unbounded-support
//! kernels (e.g. Gaussian) are deliberately absent.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Epanechnikov,
    Box,
    Triangular,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Epanechnikov, Kernel::Box, Kernel::Triangular];

    /// Evaluates the kernel; zero outside the closed support `[-1, 1]`.
    pub fn eval(self, u: f64) -> f64 {
        if u.abs() > 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Epanechnikov => 0.75 * (1.0 - u * u),
            Kernel::Box => 0.5,
            Kernel::Triangular => 1.0 - u.abs(),
        }
    }

    /// Inner support radius: `eval(u) >= k_min` whenever `|u| <= delta`.
    pub fn delta(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.5,
            Kernel::Box => 1.0,
            Kernel::Triangular => 0.5,
        }
    }

    /// Lower bound attained on `|u| <= delta`.
    pub fn k_min(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.5625,
            Kernel::Box => 0.5,
            Kernel::Triangular => 0.5,
        }
    }

    /// Global upper bound.
    pub fn k_max(self) -> f64 {
        match self {
            Kernel::Epanechnikov => 0.75,
            Kernel::Box => 0.5,
            Kernel::Triangular => 1.0,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Box => "box",
            Kernel::Triangular => "triangular",
        };
        f.write_str(s)
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "box" => Ok(Kernel::Box),
            "triangular" => Ok(Kernel::Triangular),
            other => Err(Error::Parse {
                what: "kernel id".into(),
                detail: format!(
                    "unknown kernel {other:?} (expected epanechnikov, box or triangular)"
                ),
            }),
        }
    }
}
