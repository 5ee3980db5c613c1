//! Error metrics (wrap-around and shift-aligned) and calculators for the
//! theoretical quantities of the denoising analysis: the circular-moment
//! factor `A(sigma)`, the rate-optimal bandwidth, and the high-probability
//! uniform error bound `delta(n)`.
//!
//! The exponential convention is fixed by the Gaussian characteristic
//! function `E[e^{i 2π η}] = e^{-2π²σ²}` for `η ~ N(0, σ²)`; tests verify it
//! by Monte Carlo rather than trusting the formula. Natural logarithm is
//! used everywhere a `log n` appears.

use crate::circle::{wrap_distance, FractionalPhase};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// User-supplied constants feeding the bound calculators.
///
/// `m_prime` (Hölder constant of the circle components) and `lambda0`
/// (moment-matrix eigenvalue floor) have no computable closed form; they are
/// inputs, typically empirical witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub sigma: f64,
    /// Probability exponent, at least 2.
    pub c: f64,
    pub m_prime: f64,
    pub k_max: f64,
    pub lambda0: f64,
    pub l: u32,
    pub beta: f64,
}

impl TheoryConstants {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_nan() || self.c < 2.0 {
            return Err(Error::InvalidConfig(format!(
                "probability exponent c must be >= 2, got {}",
                self.c
            )));
        }
        for (name, v) in [
            ("sigma", self.sigma),
            ("m_prime", self.m_prime),
            ("k_max", self.k_max),
            ("lambda0", self.lambda0),
            ("beta", self.beta),
        ] {
            if !v.is_finite() || (name != "sigma" && v <= 0.0) || v < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "constant {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Error summary of one recovery run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub wrap_rmse: f64,
    pub wrap_max: f64,
    pub aligned_rmse: f64,
    pub aligned_max: f64,
    /// Integer shift at which the aligned errors were measured.
    pub shift_q: i64,
}

impl ErrorReport {
    /// Computes all metrics between estimated and true phases/values.
    pub fn compute(
        est_phases: &[FractionalPhase],
        truth_phases: &[FractionalPhase],
        est_values: &[f64],
        truth_values: &[f64],
    ) -> Result<ErrorReport> {
        let (wrap_rmse_v, wrap_max) = wrap_stats(est_phases, truth_phases)?;
        let aligned = aligned_error(est_values, truth_values)?;
        Ok(ErrorReport {
            wrap_rmse: wrap_rmse_v,
            wrap_max,
            aligned_rmse: aligned.rmse,
            aligned_max: aligned.max,
            shift_q: aligned.shift_q,
        })
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b || a == 0 {
        return Err(Error::InvalidConfig(format!(
            "metric inputs must have equal nonzero lengths, got {a} and {b}"
        )));
    }
    Ok(())
}

/// Root mean square of the wrap-around distances.
pub fn wrap_rmse(est: &[FractionalPhase], truth: &[FractionalPhase]) -> Result<f64> {
    wrap_stats(est, truth).map(|(rmse, _)| rmse)
}

/// `(rmse, max)` of the wrap-around distances.
pub fn wrap_stats(est: &[FractionalPhase], truth: &[FractionalPhase]) -> Result<(f64, f64)> {
    check_lengths(est.len(), truth.len())?;
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for (e, t) in est.iter().zip(truth) {
        let d = wrap_distance(*e, *t);
        sum += d * d;
        max = max.max(d);
    }
    Ok(((sum / est.len() as f64).sqrt(), max))
}

/// Shift-aligned error: RMSE and max-abs after adding the RMSE-optimal
/// integer to the estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignedError {
    pub rmse: f64,
    pub max: f64,
    pub shift_q: i64,
}

/// The RMSE over integer shifts is a convex quadratic in the shift, so the
/// integer minimizer is one of the two integers bracketing the mean
/// difference; both are tried.
pub fn aligned_error(est: &[f64], truth: &[f64]) -> Result<AlignedError> {
    check_lengths(est.len(), truth.len())?;
    let n = est.len() as f64;
    let mean_diff = est.iter().zip(truth).map(|(e, t)| t - e).sum::<f64>() / n;
    let lo = mean_diff.floor();
    let hi = mean_diff.ceil();
    let eval = |q: f64| {
        let mut sum = 0.0;
        let mut max = 0.0f64;
        for (e, t) in est.iter().zip(truth) {
            let d = e + q - t;
            sum += d * d;
            max = max.max(d.abs());
        }
        ((sum / n).sqrt(), max)
    };
    let (rmse_lo, max_lo) = eval(lo);
    let (rmse_hi, max_hi) = eval(hi);
    let (rmse, max, q) = if rmse_lo <= rmse_hi {
        (rmse_lo, max_lo, lo)
    } else {
        (rmse_hi, max_hi, hi)
    };
    Ok(AlignedError {
        rmse,
        max,
        shift_q: q as i64,
    })
}

/// Circular-moment factor
/// `A(σ) = sqrt(e^{4π²σ²} − 1) + 1 + e^{2π²σ²}`; equals 2 at σ = 0.
pub fn a_sigma(sigma: f64) -> f64 {
    let t = 2.0 * std::f64::consts::PI.powi(2) * sigma * sigma;
    (2.0 * t).exp_m1().sqrt() + 1.0 + t.exp()
}

fn factorial(l: u32) -> f64 {
    (1..=l as u64).map(|v| v as f64).product()
}

/// Rate-optimal bandwidth
/// `b* = (c A(σ) l! / (β M'))^{2/(2β+1)} (ln n / n)^{1/(2β+1)}`.
///
/// Exposed as a calculator; its constants are theoretical and practical runs
/// use [`practical_bandwidth`] instead.
pub fn theoretical_bandwidth(consts: &TheoryConstants, n: usize) -> f64 {
    let beta = consts.beta;
    let prefactor =
        (consts.c * a_sigma(consts.sigma) * factorial(consts.l)) / (beta * consts.m_prime);
    let nf = n as f64;
    prefactor.powf(2.0 / (2.0 * beta + 1.0)) * (nf.ln() / nf).powf(1.0 / (2.0 * beta + 1.0))
}

/// Workhorse bandwidth rule `b = const · (ln n / n)^{β/(2β+1)}`.
///
/// Note the exponent applies to the whole ratio, unlike the rate-optimal
/// `b*` whose exponent is `1/(2β+1)`; this variant (with const 0.1) is what
/// the numerical experiments use.
pub fn practical_bandwidth(constant: f64, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    constant * (nf.ln() / nf).powf(beta / (2.0 * beta + 1.0))
}

/// High-probability uniform denoising bound
/// `δ(n) = (32 M' K_max / (l! λ0))^{1/(2β+1)}
///        · (64 c K_max A(σ) / λ0)^{2β/(2β+1)}
///        · [(2β)^{−2β/(2β+1)} + (2β)^{1/(2β+1)}]
///        · (ln n / n)^{β/(2β+1)}`.
///
/// Advisory output for feasibility checks and reports; with practical
/// constants it is often far above the realized error (and can exceed 1).
pub fn theoretical_delta(consts: &TheoryConstants, n: usize) -> f64 {
    let beta = consts.beta;
    let e1 = 1.0 / (2.0 * beta + 1.0);
    let e2 = 2.0 * beta / (2.0 * beta + 1.0);
    let g1 = 32.0 * consts.m_prime * consts.k_max / (factorial(consts.l) * consts.lambda0);
    let g2 = 64.0 * consts.c * consts.k_max * a_sigma(consts.sigma) / consts.lambda0;
    let bracket = (2.0 * beta).powf(-e2) + (2.0 * beta).powf(e1);
    let nf = n as f64;
    g1.powf(e1) * g2.powf(e2) * bracket * (nf.ln() / nf).powf(beta * e1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn ph(vals: &[f64]) -> Vec<FractionalPhase> {
        vals.iter().map(|&v| FractionalPhase::wrap(v)).collect()
    }

    #[test]
    fn wrap_rmse_examples() {
        let a = ph(&[0.2, 0.8, 0.5]);
        assert_eq!(wrap_rmse(&a, &a).unwrap(), 0.0);

        let est = ph(&[0.6, 0.1, 0.95]);
        let truth = ph(&[0.1, 0.6, 0.45]);
        assert!((wrap_rmse(&est, &truth).unwrap() - 0.5).abs() < 1e-12);

        let est = ph(&[0.9, 0.2]);
        let truth = ph(&[0.1, 0.2]);
        assert!((wrap_rmse(&est, &truth).unwrap() - (0.04f64 / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wrap_stats_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        use rand::Rng;
        for _ in 0..200 {
            let n = rng.random_range(1..40);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let (rmse, max) = wrap_stats(&ph(&a), &ph(&b)).unwrap();
            assert!(rmse <= max + 1e-15);
            assert!(max <= 0.5 + 1e-15);
        }
    }

    #[test]
    fn aligned_error_examples() {
        let truth = vec![0.3, 1.1, -0.4, 2.2];
        let est: Vec<f64> = truth.iter().map(|t| t - 3.0).collect();
        let r = aligned_error(&est, &truth).unwrap();
        assert_eq!(r.shift_q, 3);
        assert!(r.rmse < 1e-12 && r.max < 1e-12);

        let r = aligned_error(&truth, &truth).unwrap();
        assert_eq!(r.shift_q, 0);

        let est: Vec<f64> = truth
            .iter()
            .enumerate()
            .map(|(i, t)| t - 3.0 + if i % 2 == 0 { 0.01 } else { -0.01 })
            .collect();
        let r = aligned_error(&est, &truth).unwrap();
        assert_eq!(r.shift_q, 3);
        assert!((r.max - 0.01).abs() < 1e-12);
    }

    #[test]
    fn aligned_error_absorbs_integer_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        use rand::Rng;
        let truth: Vec<f64> = (0..50).map(|_| rng.random_range(-2.0..2.0)).collect();
        let est: Vec<f64> = truth
            .iter()
            .map(|t| t + rng.random_range(-0.1..0.1))
            .collect();
        let base = aligned_error(&est, &truth).unwrap();
        for q in [-4i64, -1, 2, 7] {
            let shifted: Vec<f64> = est.iter().map(|e| e + q as f64).collect();
            let r = aligned_error(&shifted, &truth).unwrap();
            assert_eq!(r.shift_q, base.shift_q - q);
            assert!((r.rmse - base.rmse).abs() < 1e-12);
            assert!((r.max - base.max).abs() < 1e-12);
        }
    }

    #[test]
    fn a_sigma_values_and_monotonicity() {
        assert_eq!(a_sigma(0.0), 2.0);
        // sqrt(e^{0.56848} - 1) + 1 + e^{0.28424}
        assert!((a_sigma(0.12) - 3.2037422537).abs() < 1e-9);
        let mut prev = a_sigma(0.0);
        for i in 1..=30 {
            let v = a_sigma(i as f64 * 0.05);
            assert!(v > prev);
            prev = v;
        }
    }

    /// Monte-Carlo check of the exponential convention:
    /// `E[e^{i 2π η}] = e^{-2π²σ²}` to one unit in the third significant
    /// digit with 10^6 draws.
    #[test]
    fn circular_moment_matches_characteristic_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for sigma in [0.05, 0.12, 0.3] {
            let normal = Normal::new(0.0, sigma).unwrap();
            let (mut re, mut im) = (0.0f64, 0.0f64);
            let draws = 1_000_000;
            for _ in 0..draws {
                let eta: f64 = normal.sample(&mut rng);
                let (s, c) = (std::f64::consts::TAU * eta).sin_cos();
                re += c;
                im += s;
            }
            re /= draws as f64;
            im /= draws as f64;
            let theory = (-2.0 * std::f64::consts::PI.powi(2) * sigma * sigma).exp();
            let tol = 10f64.powi(theory.abs().log10().floor() as i32 - 2);
            assert!(
                (re - theory).abs() <= tol,
                "sigma {sigma}: {re} vs {theory} (tol {tol})"
            );
            assert!(im.abs() <= 2e-3, "imaginary part {im} at sigma {sigma}");
        }
    }

    #[test]
    fn bandwidth_prefactor_one_case() {
        // c A(0) l! = 2*2*2 = 8 = beta m' when m' = 8/2.4
        let consts = TheoryConstants {
            sigma: 0.0,
            c: 2.0,
            m_prime: 8.0 / 2.4,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        };
        consts.validate().unwrap();
        for n in [10usize, 100, 600] {
            let nf = n as f64;
            let want = (nf.ln() / nf).powf(1.0 / 5.8);
            assert!((theoretical_bandwidth(&consts, n) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn practical_rule_at_benchmark_scale() {
        let b = practical_bandwidth(0.1, 2.4, 600);
        assert!((b - 0.0152730457).abs() < 1e-8, "got {b}");
    }

    #[test]
    fn bandwidth_decreases_with_n() {
        let consts = TheoryConstants {
            sigma: 0.12,
            c: 2.0,
            m_prime: 1314.0,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        };
        let mut prev = theoretical_bandwidth(&consts, 16);
        for n in [32usize, 64, 128, 256, 512] {
            let b = theoretical_bandwidth(&consts, n);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn delta_unit_constants_case() {
        // both prefactor groups equal 1: 32 m' k_max/(l! λ0) = 1 and
        // 64 c k_max A(0)/λ0 = 1 with l = 0, beta = 1/2
        let consts = TheoryConstants {
            sigma: 0.0,
            c: 2.0,
            m_prime: 8.0,
            k_max: 1.0,
            lambda0: 256.0,
            l: 0,
            beta: 0.5,
        };
        for n in [100usize, 1000] {
            let nf = n as f64;
            let want = 2.0 * (nf.ln() / nf).powf(0.25);
            assert!((theoretical_delta(&consts, n) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_rate_identity() {
        let consts = TheoryConstants {
            sigma: 0.12,
            c: 2.0,
            m_prime: 1314.0,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        };
        for n in [50usize, 200, 800] {
            let ratio = theoretical_delta(&consts, 4 * n) / theoretical_delta(&consts, n);
            let nf = n as f64;
            let want = (((4.0 * nf).ln() / (4.0 * nf)) / (nf.ln() / nf)).powf(2.4 / 5.8);
            assert!((ratio - want).abs() < 1e-12);
        }
    }

    /// At benchmark constants the bound is a valid positive number; its
    /// magnitude (>1 here) is diagnostic only.
    #[test]
    fn delta_benchmark_constants_recorded() {
        let consts = TheoryConstants {
            sigma: 0.12,
            c: 2.0,
            m_prime: 1314.0,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        };
        let d = theoretical_delta(&consts, 600);
        assert!(d.is_finite() && d > 0.0);
        assert!(
            d > 1.0,
            "with these loose constants delta(600) = {d} exceeds 1"
        );
    }

    #[test]
    fn constants_validation() {
        let mut c = TheoryConstants {
            sigma: 0.1,
            c: 2.0,
            m_prime: 1.0,
            k_max: 0.75,
            lambda0: 0.1,
            l: 2,
            beta: 2.4,
        };
        assert!(c.validate().is_ok());
        c.c = 1.5;
        assert!(c.validate().is_err());
        c.c = 2.0;
        c.lambda0 = 0.0;
        assert!(c.validate().is_err());
    }
}
