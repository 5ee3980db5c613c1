//! Stage 1: local polynomial denoising of the circle-lifted signal.
//!
//! Observations `y_i` are lifted to `z_i = e^{i 2π y_i}` and an order-`l`
//! local polynomial estimator is fit at every grid point: at query `x` the
//! estimate is the intercept of the kernel-weighted least-squares polynomial
//! in the scaled offsets `(x_i - x)/b`. Equivalently, the intercept is the
//! linear smoother `Σ_i z_i W_i(x)` with
//!
//! ```text
//! W_i(x) = (1/nb) · U(0)ᵀ B⁻¹ U((x_i-x)/b) K((x_i-x)/b),
//! B     = (1/nb) · Σ_i U((x_i-x)/b) U((x_i-x)/b)ᵀ K((x_i-x)/b),
//! U(u)  = (1, u, u²/2!, …, u^l/l!)ᵀ.
//! ```
//!
//! Real and imaginary parts are fit jointly (the objective separates, so the
//! result equals two independent real fits). The fitted complex value is
//! projected back onto the circle and its phase is the denoised modulo
//! estimate. `B`'s smallest eigenvalue is tracked everywhere; a value below
//! the configured floor is reported as an error rather than regularized
//! silently.

use crate::circle::{CirclePoint, FractionalPhase};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::signal_model::{ModuloSamples, UniformGrid};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Configuration of the order-`l` local polynomial fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpConfig {
    /// Polynomial order `l` (0 = locally constant).
    pub order: u32,
    /// Kernel bandwidth `b`; windows are `|x_i - x| <= b`.
    pub bandwidth: f64,
    pub kernel: Kernel,
    /// Smallest acceptable eigenvalue of the moment matrix.
    pub min_eig_floor: f64,
}

impl LpConfig {
    pub const DEFAULT_MIN_EIG_FLOOR: f64 = 1e-8;

    pub fn new(order: u32, bandwidth: f64, kernel: Kernel) -> Result<Self> {
        if bandwidth.is_nan() || bandwidth <= 0.0 || bandwidth.is_infinite() {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be a positive finite real, got {bandwidth}"
            )));
        }
        Ok(LpConfig {
            order,
            bandwidth,
            kernel,
            min_eig_floor: Self::DEFAULT_MIN_EIG_FLOOR,
        })
    }

    pub fn with_min_eig_floor(mut self, floor: f64) -> Self {
        self.min_eig_floor = floor;
        self
    }
}

/// Effective linear-smoother weights at one query point.
#[derive(Debug, Clone)]
pub struct LpWeights {
    pub center_x: f64,
    /// Grid indices with `|x_i - x| <= b`, in increasing order.
    pub indices: Vec<usize>,
    /// Weights aligned with `indices`; all other grid points have weight 0.
    pub weights: Vec<f64>,
    /// Smallest eigenvalue of the moment matrix at this point.
    pub min_eig: f64,
}

impl LpWeights {
    /// Weight of grid index `i` (zero outside the window).
    pub fn weight_for(&self, i: usize) -> f64 {
        match self.indices.binary_search(&i) {
            Ok(pos) => self.weights[pos],
            Err(_) => 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Output of a denoising pass: the raw complex fits, their circle
/// projections, and the extracted fractional phases.
#[derive(Debug, Clone)]
pub struct DenoisedModulo {
    pub grid: UniformGrid,
    /// Pre-projection estimates `h~(x_i)`.
    pub raw: Vec<Complex64>,
    /// `project(raw[i])`.
    pub circle: Vec<CirclePoint>,
    /// `phase(circle[i])`, the denoised modulo values.
    pub phases: Vec<FractionalPhase>,
    /// Smallest moment-matrix eigenvalue seen across the grid
    /// (None for denoisers without a conditioning notion, e.g. kNN).
    pub min_eig_overall: Option<f64>,
}

impl DenoisedModulo {
    pub(crate) fn from_raw(
        grid: UniformGrid,
        raw: Vec<Complex64>,
        min_eig_overall: Option<f64>,
    ) -> Self {
        let circle: Vec<CirclePoint> = raw
            .iter()
            .map(|z| CirclePoint::project(z.re, z.im))
            .collect();
        let phases = circle.iter().map(|p| p.phase()).collect();
        DenoisedModulo {
            grid,
            raw,
            circle,
            phases,
            min_eig_overall,
        }
    }

    pub fn phase_values(&self) -> Vec<f64> {
        self.phases.iter().map(|p| p.value()).collect()
    }
}

/// Monomial design vector `U(u) = (1, u, u²/2!, …, u^l/l!)`.
pub fn design_vector(u: f64, order: u32) -> Vec<f64> {
    let mut v = Vec::with_capacity(order as usize + 1);
    v.push(1.0);
    let mut term = 1.0;
    for k in 1..=order as u64 {
        term *= u / k as f64;
        v.push(term);
    }
    v
}

/// Inclusive index bounds of the window `|x_i - x| <= b`, or None if empty.
fn window_bounds(points: &[f64], x: f64, b: f64) -> Option<(usize, usize)> {
    let n = points.len();
    let nf = n as f64;
    // arithmetic guess, then exact comparisons
    let mut lo = (((x - b) * nf - 1.0).ceil().max(0.0) as usize).min(n - 1);
    let mut hi = (((x + b) * nf - 1.0).floor().max(0.0) as usize).min(n - 1);
    while lo > 0 && (points[lo - 1] - x).abs() <= b {
        lo -= 1;
    }
    while lo < n - 1 && (points[lo] - x).abs() > b {
        lo += 1;
    }
    while hi < n - 1 && (points[hi + 1] - x).abs() <= b {
        hi += 1;
    }
    while hi > 0 && (points[hi] - x).abs() > b {
        hi -= 1;
    }
    if lo > hi || (points[lo] - x).abs() > b || (points[hi] - x).abs() > b {
        None
    } else {
        Some((lo, hi))
    }
}

/// Kernel-weighted moment matrix `B = (1/nb) Σ U_i U_iᵀ K_i` at `x`.
///
/// Summation runs in fixed index order so results are independent of any
/// outer parallelism. An empty window yields the zero matrix; degeneracy is
/// detected downstream.
pub fn build_bnx(grid: &UniformGrid, x: f64, cfg: &LpConfig) -> DMatrix<f64> {
    let m = cfg.order as usize + 1;
    let mut mat = DMatrix::<f64>::zeros(m, m);
    let points = grid.points();
    if let Some((lo, hi)) = window_bounds(points, x, cfg.bandwidth) {
        for &point in &points[lo..=hi] {
            let u = (point - x) / cfg.bandwidth;
            let k = cfg.kernel.eval(u);
            if k == 0.0 {
                continue;
            }
            let uv = design_vector(u, cfg.order);
            for r in 0..m {
                for c in r..m {
                    mat[(r, c)] += uv[r] * uv[c] * k;
                }
            }
        }
        let scale = 1.0 / (grid.n() as f64 * cfg.bandwidth);
        for r in 0..m {
            for c in r..m {
                mat[(r, c)] *= scale;
                mat[(c, r)] = mat[(r, c)];
            }
        }
    }
    mat
}

/// Symmetric eigendecomposition of the moment matrix with the floor check.
struct MomentSolve {
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
    min_eig: f64,
}

impl MomentSolve {
    fn new(bnx: DMatrix<f64>, x: f64, floor: f64) -> Result<Self> {
        let eig = nalgebra::SymmetricEigen::new(bnx);
        let min_eig = eig.eigenvalues.min();
        if min_eig.is_nan() || min_eig < floor {
            return Err(Error::IllConditioned { x, min_eig, floor });
        }
        Ok(MomentSolve {
            eigvecs: eig.eigenvectors,
            eigvals: eig.eigenvalues,
            min_eig,
        })
    }

    /// Solves `B s = rhs` through the decomposition (no explicit inverse).
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut coefs = self.eigvecs.transpose() * rhs;
        coefs.component_div_assign(&self.eigvals);
        &self.eigvecs * coefs
    }
}

/// Linear-smoother weights `W_i(x)` at a query point.
///
/// Errors with [`Error::IllConditioned`] when the smallest eigenvalue of the
/// moment matrix falls below `cfg.min_eig_floor`.
pub fn lp_weights(grid: &UniformGrid, x: f64, cfg: &LpConfig) -> Result<LpWeights> {
    let solve = MomentSolve::new(build_bnx(grid, x, cfg), x, cfg.min_eig_floor)?;
    let m = cfg.order as usize + 1;
    let mut e1 = DVector::<f64>::zeros(m);
    e1[0] = 1.0;
    let w = solve.solve(&e1);

    let points = grid.points();
    let scale = 1.0 / (grid.n() as f64 * cfg.bandwidth);
    let (lo, hi) = window_bounds(points, x, cfg.bandwidth)
        .expect("nonempty window: the moment matrix passed the floor check");
    let mut indices = Vec::with_capacity(hi - lo + 1);
    let mut weights = Vec::with_capacity(hi - lo + 1);
    for (i, &point) in points.iter().enumerate().take(hi + 1).skip(lo) {
        let u = (point - x) / cfg.bandwidth;
        let k = cfg.kernel.eval(u);
        let uv = design_vector(u, cfg.order);
        let dot: f64 = uv.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
        indices.push(i);
        weights.push(scale * dot * k);
    }
    Ok(LpWeights {
        center_x: x,
        indices,
        weights,
        min_eig: solve.min_eig,
    })
}

/// Fits the local polynomial smoother to arbitrary complex samples at every
/// grid point, returning the intercepts and the smallest moment-matrix
/// eigenvalue seen.
pub fn lp_fit_complex(
    values: &[Complex64],
    grid: &UniformGrid,
    cfg: &LpConfig,
) -> Result<(Vec<Complex64>, f64)> {
    if values.len() != grid.n() {
        return Err(Error::InvalidConfig(format!(
            "sample count {} does not match grid size {}",
            values.len(),
            grid.n()
        )));
    }
    let mut raw = Vec::with_capacity(grid.n());
    let mut min_eig_overall = f64::INFINITY;
    for &x in grid.points() {
        let w = lp_weights(grid, x, cfg)?;
        min_eig_overall = min_eig_overall.min(w.min_eig);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&i, &wi) in w.indices.iter().zip(&w.weights) {
            acc += values[i] * wi;
        }
        raw.push(acc);
    }
    Ok((raw, min_eig_overall))
}

/// Full Stage-1 pass: lift the modulo samples onto the circle, fit, project
/// back, and extract phases.
///
/// Requires `bandwidth >= 1/(2n)` so that every window can contain a point.
pub fn denoise(samples: &ModuloSamples, cfg: &LpConfig) -> Result<DenoisedModulo> {
    let n = samples.grid.n() as f64;
    if cfg.bandwidth < 1.0 / (2.0 * n) {
        return Err(Error::InvalidConfig(format!(
            "bandwidth {} below 1/(2n) = {}",
            cfg.bandwidth,
            1.0 / (2.0 * n)
        )));
    }
    let z: Vec<Complex64> = samples
        .values
        .iter()
        .map(|&y| {
            let p = FractionalPhase::wrap(y).lift();
            Complex64::new(p.re(), p.im())
        })
        .collect();
    let (raw, min_eig) = lp_fit_complex(&z, &samples.grid, cfg)?;
    Ok(DenoisedModulo::from_raw(
        samples.grid.clone(),
        raw,
        Some(min_eig),
    ))
}

/// Weighted least-squares coefficient vector at one query point: the
/// minimizer of `Σ_i |z_i - θᵀ U((x_i-x)/b)|² K((x_i-x)/b)`.
///
/// Its first component is the intercept and must agree with
/// `Σ_i z_i W_i(x)`; that equivalence is covered by tests.
pub fn weighted_ls_solve(
    targets: &[Complex64],
    grid: &UniformGrid,
    x: f64,
    cfg: &LpConfig,
) -> Result<Vec<Complex64>> {
    if targets.len() != grid.n() {
        return Err(Error::InvalidConfig(format!(
            "target count {} does not match grid size {}",
            targets.len(),
            grid.n()
        )));
    }
    let solve = MomentSolve::new(build_bnx(grid, x, cfg), x, cfg.min_eig_floor)?;
    let m = cfg.order as usize + 1;
    let points = grid.points();
    let scale = 1.0 / (grid.n() as f64 * cfg.bandwidth);
    let mut rhs_re = DVector::<f64>::zeros(m);
    let mut rhs_im = DVector::<f64>::zeros(m);
    if let Some((lo, hi)) = window_bounds(points, x, cfg.bandwidth) {
        for (&point, target) in points[lo..=hi].iter().zip(&targets[lo..=hi]) {
            let u = (point - x) / cfg.bandwidth;
            let k = cfg.kernel.eval(u);
            if k == 0.0 {
                continue;
            }
            let uv = design_vector(u, cfg.order);
            for (r, &ur) in uv.iter().enumerate() {
                rhs_re[r] += target.re * ur * k;
                rhs_im[r] += target.im * ur * k;
            }
        }
    }
    rhs_re *= scale;
    rhs_im *= scale;
    let th_re = solve.solve(&rhs_re);
    let th_im = solve.solve(&rhs_im);
    Ok((0..m).map(|r| Complex64::new(th_re[r], th_im[r])).collect())
}
