//! Ground-truth functions, uniform grids, seeded Gaussian noise, and
//! modulo-1 observations.
//!
//! Observations follow `y_i = (f(x_i) + eta_i) mod 1` on the grid
//! `x_i = i/n`, with `eta_i ~ N(0, sigma^2)` drawn from a seeded ChaCha8
//! stream so identical `(seed, n)` pairs give bit-identical noise vectors.

use crate::circle::FractionalPhase;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Sample locations `x_i = i/n` for `i = 1..n`, covering `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    n: usize,
    points: Vec<f64>,
}

impl UniformGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("grid needs at least one point".into()));
        }
        let nf = n as f64;
        let points = (1..=n).map(|i| i as f64 / nf).collect();
        Ok(UniformGrid { n, points })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Grid spacing `1/n`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Smoothness description of a function class: `l` continuous derivatives
/// whose `l`-th one is `alpha`-Hölder with constant `holder_m`, and a uniform
/// derivative bound `kappa` on all orders up to `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessParams {
    pub l: u32,
    pub alpha: f64,
    pub holder_m: f64,
    pub kappa: f64,
}

impl SmoothnessParams {
    pub fn new(l: u32, alpha: f64, holder_m: f64, kappa: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if holder_m.is_nan() || holder_m <= 0.0 || kappa.is_nan() || kappa <= 0.0 {
            return Err(Error::InvalidConfig(
                "holder_m and kappa must be positive".into(),
            ));
        }
        Ok(SmoothnessParams {
            l,
            alpha,
            holder_m,
            kappa,
        })
    }

    /// Smoothness index `beta = l + alpha`.
    pub fn beta(&self) -> f64 {
        self.l as f64 + self.alpha
    }

    /// Scale constant of `|f(x) - f(y)| <= L |x - y|^{min(beta, 1)}`:
    /// the Hölder constant itself when `beta <= 1`, the derivative bound
    /// otherwise.
    pub fn lipschitz_scale(&self) -> f64 {
        if self.beta() <= 1.0 {
            self.holder_m
        } else {
            self.kappa
        }
    }
}

/// Built-in ground-truth function catalogue, addressable by string id
/// (`paper_fn`, `constant:0.25`, `linear:2,0`, `poly:1,0,-2`, `cos_k:3`).
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    /// `4x cos(2πx)² − 2 sin(2πx)² + 4.7`, the benchmark signal.
    PaperFn,
    Constant(f64),
    /// `slope · x + intercept`
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// Coefficients from the constant term upward: `poly:1,0,-2` is `1 − 2x²`.
    Poly(Vec<f64>),
    /// `cos(2πkx)`
    CosK(u32),
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::PaperFn => {
                let a = std::f64::consts::TAU * x;
                let (s, c) = a.sin_cos();
                4.0 * x * c * c - 2.0 * s * s + 4.7
            }
            TestFunction::Constant(c) => *c,
            TestFunction::Linear { slope, intercept } => slope * x + intercept,
            TestFunction::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            TestFunction::CosK(k) => (std::f64::consts::TAU * *k as f64 * x).cos(),
        }
    }

    /// Smoothness parameters for this function.
    ///
    /// Analytic where closed forms are easy (`linear`, `poly`, `cos_k`);
    /// for the benchmark function the Hölder constant and derivative bound
    /// are frozen empirical witnesses from a finite-difference probe
    /// (`n_probe = 2000`: M ≈ 1313.8 for (l, alpha) = (2, 0.4),
    /// sup|f''| ≈ 473.8), rounded up.
    pub fn smoothness(&self) -> SmoothnessParams {
        let p = |l, alpha, m: f64, kappa: f64| SmoothnessParams {
            l,
            alpha,
            holder_m: m.max(1e-9),
            kappa: kappa.max(1e-9),
        };
        match self {
            TestFunction::PaperFn => p(2, 0.4, 1314.0, 474.0),
            TestFunction::Constant(c) => p(0, 1.0, 1e-9, c.abs()),
            TestFunction::Linear { slope, intercept } => {
                let sup = intercept.abs().max((slope + intercept).abs());
                p(0, 1.0, slope.abs(), sup.max(slope.abs()))
            }
            TestFunction::Poly(coeffs) => {
                let deg = coeffs.len().saturating_sub(1) as u32;
                if deg == 0 {
                    return TestFunction::Constant(coeffs.first().copied().unwrap_or(0.0))
                        .smoothness();
                }
                // f^{(deg-1)} is linear with exact Hölder constant |deg! c_deg|;
                // kappa from sups of the lower derivatives on a probe grid.
                let l = deg - 1;
                let m = (1..=deg as u64).product::<u64>() as f64 * coeffs[deg as usize].abs();
                let mut kappa: f64 = 0.0;
                let mut d = coeffs.clone();
                for _ in 0..=l {
                    for i in 0..=1000 {
                        let x = i as f64 / 1000.0;
                        let v = d.iter().rev().fold(0.0, |acc, &c| acc * x + c).abs();
                        kappa = kappa.max(v);
                    }
                    d = differentiate(&d);
                }
                p(l, 1.0, m, kappa)
            }
            TestFunction::CosK(k) => {
                let w = std::f64::consts::TAU * *k as f64;
                p(2, 1.0, w * w * w, (w * w).max(1.0))
            }
        }
    }
}

fn differentiate(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::PaperFn => write!(f, "paper_fn"),
            TestFunction::Constant(c) => write!(f, "constant:{c}"),
            TestFunction::Linear { slope, intercept } => write!(f, "linear:{slope},{intercept}"),
            TestFunction::Poly(coeffs) => {
                write!(f, "poly:")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            TestFunction::CosK(k) => write!(f, "cos_k:{k}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            what: format!("test function id {s:?}"),
            detail,
        };
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let floats = |a: &str| -> Result<Vec<f64>> {
            a.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| bad(format!("bad number {v:?}: {e}")))
                })
                .collect()
        };
        match (name, args) {
            ("paper_fn", None) => Ok(TestFunction::PaperFn),
            ("constant", Some(a)) => {
                let v = floats(a)?;
                if v.len() != 1 {
                    return Err(bad("constant takes one argument".into()));
                }
                Ok(TestFunction::Constant(v[0]))
            }
            ("linear", Some(a)) => {
                let v = floats(a)?;
                if v.len() != 2 {
                    return Err(bad("linear takes slope,intercept".into()));
                }
                Ok(TestFunction::Linear {
                    slope: v[0],
                    intercept: v[1],
                })
            }
            ("poly", Some(a)) => {
                let v = floats(a)?;
                if v.is_empty() {
                    return Err(bad("poly needs at least one coefficient".into()));
                }
                Ok(TestFunction::Poly(v))
            }
            ("cos_k", Some(a)) => {
                let k = a
                    .trim()
                    .parse::<u32>()
                    .map_err(|e| bad(format!("bad frequency {a:?}: {e}")))?;
                Ok(TestFunction::CosK(k))
            }
            _ => Err(bad(
                "expected paper_fn, constant:<c>, linear:<a>,<b>, poly:<c0>,<c1>,.. or cos_k:<k>"
                    .into(),
            )),
        }
    }
}

/// Additive Gaussian noise with an explicit seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "sigma must be a nonnegative finite real, got {sigma}"
            )));
        }
        Ok(NoiseModel { sigma, seed })
    }
}

/// Modulo-1 observations on a uniform grid; every value lies in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuloSamples {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

/// Draws `y_i = (f(x_i) + eta_i) mod 1` over the grid.
///
/// Pure in `(f, grid, noise)` including the seed: one ChaCha8 stream per
/// call, consumed in grid order.
pub fn sample_modulo(f: &TestFunction, grid: &UniformGrid, noise: &NoiseModel) -> ModuloSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let normal = Normal::new(0.0, noise.sigma).expect("NoiseModel guarantees sigma >= 0");
    let values = grid
        .points()
        .iter()
        .map(|&x| FractionalPhase::wrap(f.eval(x) + normal.sample(&mut rng)).value())
        .collect();
    ModuloSamples {
        grid: grid.clone(),
        values,
    }
}

/// Numeric witness for the Hölder seminorm of `f`'s `l`-th derivative:
/// the maximum of `|f^(l)(x) - f^(l)(y)| / |x - y|^alpha` over probe pairs
/// with `|x - y| <= 0.1`, derivatives taken by iterated central differences
/// with step `1/n_probe`.
///
/// A lower-bound witness for the true seminorm; adequate for property tests,
/// not for publication-grade constants.
pub fn holder_seminorm_estimate(
    f: impl Fn(f64) -> f64,
    l: u32,
    alpha: f64,
    n_probe: usize,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if n_probe < 10 * (l as usize + 2) {
        return Err(Error::InvalidConfig(format!(
            "n_probe = {n_probe} too coarse for l = {l} (need at least {})",
            10 * (l as usize + 2)
        )));
    }
    let h = 1.0 / n_probe as f64;
    let denom = (2.0 * h).powi(l as i32);
    if denom < 1e-300 {
        return Err(Error::InvalidConfig(format!(
            "derivative order l = {l} too large for probe step {h:e} (denominator underflow)"
        )));
    }

    // l-fold central difference: sum_k (-1)^k C(l,k) f(x + (l-2k) h) / (2h)^l
    let li = l as i64;
    let mut binom = vec![0.0f64; l as usize + 1];
    binom[0] = 1.0;
    for k in 1..=l as usize {
        binom[k] = binom[k - 1] * (l as usize - k + 1) as f64 / k as f64;
    }
    let deriv = |x: f64| -> f64 {
        let mut acc = 0.0;
        for (k, &c) in binom.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * c * f(x + (li - 2 * k as i64) as f64 * h);
        }
        acc / denom
    };

    // probe points where the stencil stays inside [0, 1]
    let margin = l as f64 * h;
    let probes: Vec<(f64, f64)> = (0..=n_probe)
        .map(|j| j as f64 * h)
        .filter(|&x| x - margin >= -1e-12 && x + margin <= 1.0 + 1e-12)
        .map(|x| (x, deriv(x)))
        .collect();

    let window = (0.1 / h).ceil() as usize;
    let mut best = 0.0f64;
    for (i, &(xi, di)) in probes.iter().enumerate() {
        for &(xj, dj) in probes.iter().skip(i + 1).take(window) {
            let gap = (xj - xi).abs();
            if gap > 0.1 || gap == 0.0 {
                continue;
            }
            best = best.max((dj - di).abs() / gap.powf(alpha));
        }
    }
    Ok(best)
}
