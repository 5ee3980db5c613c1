//! Stage 3: a continuous estimate on `[0, 1]` from unwrapped grid samples.
//!
//! The operator is a blended local Lagrange interpolant: each grid node
//! carries the Lagrange polynomial through the `degree + 1` nodes nearest to
//! it (ties toward the smaller index, windows clamped at the boundary), and
//! between consecutive nodes the two node polynomials are mixed with the
//! linear weight `(x - x_i)/(x_{i+1} - x_i)`. The result is linear in the
//! samples, continuous, interpolates every node, reproduces polynomials up
//! to `degree`, and only looks at samples within `(degree + 2)/n` of the
//! evaluation point. Below the first node the first window extrapolates.

use crate::error::{Error, Result};
use crate::signal_model::UniformGrid;
use crate::unwrapper::UnwrappedSamples;

/// Linear sample-to-function operator: per-node Lagrange windows over a
/// uniform grid.
#[derive(Debug, Clone)]
pub struct QiOperator {
    degree: usize,
    grid: UniformGrid,
    /// Start index of the window attached to each node.
    window_starts: Vec<usize>,
    values: Vec<f64>,
}

/// A continuous function on `[0, 1]` produced by [`build_qi`].
#[derive(Debug, Clone)]
pub struct RecoveredFunction {
    qi: QiOperator,
}

/// Builds the quasi-interpolant of the given local degree over the samples.
///
/// Needs at least `degree + 1` samples.
pub fn build_qi(samples: &UnwrappedSamples, degree: usize) -> Result<RecoveredFunction> {
    let n = samples.grid.n();
    if n < degree + 1 {
        return Err(Error::InsufficientSamples {
            got: n,
            needed: degree + 1,
            degree,
        });
    }
    let w = degree + 1;
    let window_starts = (0..n).map(|j| j.saturating_sub(w / 2).min(n - w)).collect();
    Ok(RecoveredFunction {
        qi: QiOperator {
            degree,
            grid: samples.grid.clone(),
            window_starts,
            values: samples.values.clone(),
        },
    })
}

impl QiOperator {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    /// Lagrange polynomial of node `j`'s window, evaluated at `x`.
    fn node_poly(&self, j: usize, x: f64) -> f64 {
        let s = self.window_starts[j];
        let nodes = &self.grid.points()[s..s + self.degree + 1];
        let vals = &self.values[s..s + self.degree + 1];
        let mut acc = 0.0;
        for (m, &vm) in vals.iter().enumerate() {
            let mut basis = 1.0;
            for (k, &xk) in nodes.iter().enumerate() {
                if k != m {
                    basis *= (x - xk) / (nodes[m] - xk);
                }
            }
            acc += vm * basis;
        }
        acc
    }

    /// l1 norm of node `j`'s Lagrange basis at `x` (for stability bounds).
    fn node_basis_l1(&self, j: usize, x: f64) -> f64 {
        let s = self.window_starts[j];
        let nodes = &self.grid.points()[s..s + self.degree + 1];
        let mut acc = 0.0;
        for m in 0..nodes.len() {
            let mut basis = 1.0;
            for (k, &xk) in nodes.iter().enumerate() {
                if k != m {
                    basis *= (x - xk) / (nodes[m] - xk);
                }
            }
            acc += basis.abs();
        }
        acc
    }

    /// Segment index `j` with `x` in `[x_{j+1}, x_{j+2}]` (0-based nodes),
    /// clamped to the grid hull.
    fn segment(&self, x: f64) -> usize {
        let n = self.grid.n();
        let pts = self.grid.points();
        let mut j = ((x * n as f64).floor() as isize - 1).clamp(0, n as isize - 2) as usize;
        while j > 0 && x < pts[j] {
            j -= 1;
        }
        while j + 2 < n && x > pts[j + 1] {
            j += 1;
        }
        j
    }
}

impl RecoveredFunction {
    /// Evaluates the estimate at `x` in `[0, 1]`.
    ///
    /// At grid nodes the value equals the input sample; below the first node
    /// the first window extrapolates.
    pub fn eval(&self, x: f64) -> f64 {
        let pts = self.qi.grid.points();
        if x <= pts[0] {
            return self.qi.node_poly(0, x);
        }
        let last = self.qi.grid.n() - 1;
        if x >= pts[last] {
            return self.qi.node_poly(last, x);
        }
        let j = self.qi.segment(x);
        let t = (x - pts[j]) / (pts[j + 1] - pts[j]);
        (1.0 - t) * self.qi.node_poly(j, x) + t * self.qi.node_poly(j + 1, x)
    }

    /// Pointwise l1 sensitivity to sample perturbations at `x`: a Lebesgue
    /// function for the blended operator. `sup_x` of this bounds
    /// `‖Q(s) − Q(t)‖∞ / max_i |s_i − t_i|`.
    pub fn lebesgue_function(&self, x: f64) -> f64 {
        let pts = self.qi.grid.points();
        if x <= pts[0] {
            return self.qi.node_basis_l1(0, x);
        }
        let last = self.qi.grid.n() - 1;
        if x >= pts[last] {
            return self.qi.node_basis_l1(last, x);
        }
        let j = self.qi.segment(x);
        let t = (x - pts[j]) / (pts[j + 1] - pts[j]);
        (1.0 - t) * self.qi.node_basis_l1(j, x) + t * self.qi.node_basis_l1(j + 1, x)
    }

    pub fn degree(&self) -> usize {
        self.qi.degree
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.qi.grid
    }

    /// The input samples the operator was built from.
    pub fn samples(&self) -> &[f64] {
        &self.qi.values
    }

    /// Dense evaluation table over `[0, 1]` with `resolution + 1` rows.
    pub fn table(&self, resolution: usize) -> Vec<(f64, f64)> {
        let res = resolution.max(1);
        (0..=res)
            .map(|i| {
                let x = i as f64 / res as f64;
                (x, self.eval(x))
            })
            .collect()
    }
}
