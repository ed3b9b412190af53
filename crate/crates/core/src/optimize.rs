//! Derivative-free-gradient ascent used by the region sweeps.
//!
//! Gradients are central differences; steps follow a Barzilai–Borwein
//! schedule safeguarded by Armijo backtracking. Probability vectors are
//! parameterized by softmax logits and complex vectors are renormalized after
//! every accepted step.

use serde::{Deserialize, Serialize};

/// Settings shared by the frontier sweeps, the oracles' callers and the
/// degrading-map search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Random restarts per optimization problem.
    pub restarts: usize,
    /// Iteration cap per barrier stage.
    pub max_iterations: usize,
    /// First trial step length.
    pub initial_step: f64,
    /// Relative change in objective below which a stage is converged.
    pub tolerance: f64,
    pub seed: u64,
    /// Number of common-rate grid points in a frontier sweep.
    pub grid_points: usize,
    /// Decreasing log-barrier weights for the common-rate constraint.
    pub barrier_schedule: Vec<f64>,
    /// Central-difference step.
    pub fd_step: f64,
    /// Auxiliary alphabet size; `None` uses the applicable cardinality bound.
    pub t_size: Option<usize>,
    /// Upper bound on `(|B||C|)^k · |T|` before a sweep refuses to run.
    pub matrix_budget: usize,
    /// Residual at or below which a degrading map certifies degradedness.
    pub degraded_threshold: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iterations: 400,
            initial_step: 0.5,
            tolerance: 1e-11,
            seed: 7,
            grid_points: 33,
            barrier_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
            fd_step: 1e-5,
            t_size: None,
            matrix_budget: 1 << 14,
            degraded_threshold: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = self.restarts > 0
            && self.max_iterations > 0
            && self.initial_step > 0.0
            && self.tolerance > 0.0
            && self.grid_points >= 2
            && !self.barrier_schedule.is_empty()
            && self.barrier_schedule.iter().all(|m| *m > 0.0)
            && self.fd_step > 0.0
            && self.t_size.is_none_or(|t| t > 0)
            && self.matrix_budget > 0
            && self.degraded_threshold > 0.0;
        if positive {
            Ok(())
        } else {
            Err(crate::Error::InvalidArgument(format!("optimizer settings must be positive: {self:?}")))
        }
    }
}

/// Outcome of one ascent run.
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn central_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `f` from `x0`. `project` is applied after every accepted step
/// (renormalization of vector blocks); it must leave `f` unchanged.
pub fn ascend(
    f: &dyn Fn(&[f64]) -> f64,
    project: &dyn Fn(&mut [f64]),
    x0: Vec<f64>,
    max_iterations: usize,
    initial_step: f64,
    tolerance: f64,
    fd_step: f64,
) -> AscentResult {
    let mut x = x0;
    project(&mut x);
    let mut fx = f(&x);
    let mut g = central_gradient(f, &x, fd_step);
    let mut step = initial_step;
    let mut quiet = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let gn2 = dot(&g, &g);
        if gn2 < 1e-24 {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut trial = step;
        while trial > 1e-16 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + trial * gi).collect();
            project(&mut cand);
            let fc = f(&cand);
            if fc.is_finite() && fc >= fx + 1e-4 * trial * gn2 {
                accepted = Some((cand, fc));
                break;
            }
            trial *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            converged = true;
            break;
        };
        let g_new = central_gradient(f, &x_new, fd_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy < 0.0 { (dot(&s, &s) / -sy).clamp(1e-6, 1e4) } else { (trial * 2.0).min(1e4) };
        let gain = f_new - fx;
        x = x_new;
        fx = f_new;
        g = g_new;
        if gain <= tolerance * (1.0 + fx.abs()) {
            quiet += 1;
            if quiet >= 5 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    AscentResult { x, value: fx, iterations, converged }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

/// Logits whose softmax is `p` (zeros mapped to a large negative logit).
pub fn logits_of(p: &[f64]) -> Vec<f64> {
    p.iter().map(|v| if *v > 1e-30 { v.ln() } else { -70.0 }).collect()
}
