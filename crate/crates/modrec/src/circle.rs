//! Unit-circle geometry: lifting fractional values onto the circle,
//! projecting noisy complex estimates back, phase extraction, and the
//! wrap-around metric.
//!
//! A value `t` in `[0, 1)` and the point `e^{i 2π t}` are two views of the
//! same thing; everything modulo-1 in this crate goes through these two
//! representations.

use crate::error::{Error, Result};
use std::f64::consts::TAU;

/// A point on the unit circle, `re² + im² = 1` up to roundoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    re: f64,
    im: f64,
}

/// A fractional phase, i.e. a real number in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalPhase(f64);

impl FractionalPhase {
    /// Wraps `t` if it is already in `[0, 1)`, errors otherwise.
    pub fn new(t: f64) -> Result<Self> {
        if (0.0..1.0).contains(&t) {
            Ok(FractionalPhase(t))
        } else {
            Err(Error::InvalidConfig(format!(
                "fractional phase must lie in [0, 1), got {t}"
            )))
        }
    }

    /// Mathematical modulo of any finite real into `[0, 1)`: negative inputs
    /// map to their nonnegative representative (`-0.3 -> 0.7`).
    pub fn wrap(v: f64) -> Self {
        assert!(v.is_finite(), "cannot wrap non-finite value {v}");
        let t = v.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        FractionalPhase(if t >= 1.0 { 0.0 } else { t })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Maps `t` to `e^{i 2π t}` on the unit circle.
    pub fn lift(self) -> CirclePoint {
        let a = TAU * self.0;
        CirclePoint {
            re: a.cos(),
            im: a.sin(),
        }
    }
}

impl CirclePoint {
    pub fn re(self) -> f64 {
        self.re
    }

    pub fn im(self) -> f64 {
        self.im
    }

    /// Radial projection of an arbitrary complex number onto the circle.
    ///
    /// Zero projects to `(1, 0)` by convention, so the operation is total.
    pub fn project(u_re: f64, u_im: f64) -> CirclePoint {
        let norm = u_re.hypot(u_im);
        if norm > 0.0 {
            CirclePoint {
                re: u_re / norm,
                im: u_im / norm,
            }
        } else {
            CirclePoint { re: 1.0, im: 0.0 }
        }
    }

    /// Fractional phase `arg(p) / 2π` mapped into `[0, 1)`.
    pub fn phase(self) -> FractionalPhase {
        let mut t = self.im.atan2(self.re) / TAU;
        if t < 0.0 {
            t += 1.0;
        }
        if t >= 1.0 {
            t = 0.0;
        }
        FractionalPhase(t)
    }
}

/// Wrap-around distance between two fractional phases:
/// `min{|t - s|, 1 - |t - s|}`, valued in `[0, 1/2]`.
///
/// Some writeups display this metric with a `max`; only the `min` form is
/// consistent with the `[0, 1/2]` codomain and with the chord relation
/// `|lift(t) - lift(s)| = 2 sin(π d_w)`.
pub fn wrap_distance(t: FractionalPhase, s: FractionalPhase) -> f64 {
    let d = (t.0 - s.0).abs();
    d.min(1.0 - d)
}
