//! Constrained sweep over a grid of common rates.
//!
//! Each target `R` is handled as an interior-point problem: a start is first
//! pushed into `{min_i I_i > R}`, then `personal + nu * sum_i log(I_i - R)` is
//! maximized for a decreasing schedule of `nu`. Starting inside the feasible
//! set matters: at parameters where `T` and the input are independent, every
//! `I_i` has zero gradient, so a penalty that only acts once the constraint
//! is violated cannot recover from there.

use rayon::prelude::*;

use crate::error::Result;
use crate::optimize::{ascend, OptimizerConfig};
use crate::random;
use crate::region::problems::{RateProblem, Rates, SNAP_THRESHOLDS};
use crate::region::RatePoint;

/// A grid target counts as met when the achieved common rate is this close.
pub const TARGET_SLACK: f64 = 1e-6;
/// Below this the region has no common-rate extent.
const FLAT_REGION: f64 = 1e-9;
/// Width of the quadratic extension of the log barrier.
const BARRIER_EDGE: f64 = 1e-10;

fn mix_seed(seed: u64, stage: u64, index: u64) -> u64 {
    // splitmix64 finalizer over a combined key
    let mut z = seed ^ stage.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `ln g`, continued below `BARRIER_EDGE` by its second-order Taylor
/// polynomial so finite differences straddling the boundary stay finite.
fn ext_log(g: f64) -> f64 {
    if g >= BARRIER_EDGE {
        g.ln()
    } else {
        let u = (g - BARRIER_EDGE) / BARRIER_EDGE;
        BARRIER_EDGE.ln() + u - 0.5 * u * u
    }
}

#[derive(Clone)]
struct Candidate {
    x: Vec<f64>,
    rates: Rates,
}

fn run_stage(f: &dyn Fn(&[f64]) -> f64, project: &dyn Fn(&mut [f64]), x: Vec<f64>, cfg: &OptimizerConfig) -> Vec<f64> {
    ascend(f, project, x, cfg.max_iterations, cfg.initial_step, cfg.tolerance, cfg.fd_step).x
}

/// Replaces the parameters by a snapped version when `better` prefers it.
fn polish<P: RateProblem>(problem: &P, mut c: Candidate, better: impl Fn(&Rates, &Rates) -> bool) -> Candidate {
    for threshold in SNAP_THRESHOLDS {
        if let Some(x) = problem.snapped(&c.x, threshold) {
            let rates = problem.evaluate(&x);
            if better(&rates, &c.rates) {
                c = Candidate { x, rates };
            }
        }
    }
    c
}

fn barrier_value(target: f64, rates: &Rates) -> f64 {
    rates.constraints.iter().map(|i| ext_log(i - target)).sum()
}

/// Maximizes the personal rate subject to `min_i I_i >= target`.
fn solve_at<P: RateProblem>(problem: &P, target: f64, x0: Vec<f64>, cfg: &OptimizerConfig) -> Candidate {
    let project = |z: &mut [f64]| problem.project(z);
    let mut x = x0;
    if target <= 0.0 {
        let f = |z: &[f64]| problem.evaluate(z).personal;
        x = run_stage(&f, &project, x, cfg);
        let rates = problem.evaluate(&x);
        return polish(problem, Candidate { x, rates }, |a, b| a.personal > b.personal);
    }
    if problem.evaluate(&x).common() <= target {
        let goal = target + 1e-3 * target.max(1e-3);
        let f = |z: &[f64]| -problem.evaluate(z).constraints.iter().map(|i| (goal - i).max(0.0).powi(2)).sum::<f64>();
        x = run_stage(&f, &project, x, cfg);
        let rates = problem.evaluate(&x);
        let c = polish(problem, Candidate { x, rates }, |a, b| a.common() > b.common());
        if c.rates.common() <= target {
            return c;
        }
        x = c.x;
    }
    for &nu in &cfg.barrier_schedule {
        let f = |z: &[f64]| {
            let r = problem.evaluate(z);
            r.personal + nu * barrier_value(target, &r)
        };
        x = run_stage(&f, &project, x, cfg);
    }
    let rates = problem.evaluate(&x);
    polish(problem, Candidate { x, rates }, |a, b| a.common() >= target && a.personal > b.personal)
}

/// Smooth lower bound on `min_i v_i` with temperature `tau`.
fn soft_min(v: &[f64], tau: f64) -> f64 {
    let m = v.iter().copied().fold(f64::INFINITY, f64::min);
    if v.len() == 1 {
        return m;
    }
    m - tau * v.iter().map(|x| (-(x - m) / tau).exp()).sum::<f64>().ln()
}

/// Maximizes the common rate through a log-sum-exp smoothing of the minimum,
/// sharpened along `cfg.barrier_schedule`.
fn solve_max_common<P: RateProblem>(problem: &P, x0: Vec<f64>, cfg: &OptimizerConfig) -> Candidate {
    let project = |z: &mut [f64]| problem.project(z);
    let mut x = x0;
    for &tau in &cfg.barrier_schedule {
        let f = |z: &[f64]| soft_min(&problem.evaluate(z).constraints, tau);
        x = run_stage(&f, &project, x, cfg);
    }
    let rates = problem.evaluate(&x);
    polish(problem, Candidate { x, rates }, |a, b| a.common() > b.common())
}

/// Index of the best candidate under `better`, earliest index on ties.
fn pick(cands: &[Candidate], better: impl Fn(&Candidate, &Candidate) -> bool) -> usize {
    let mut best = 0;
    for (i, c) in cands.iter().enumerate().skip(1) {
        if better(c, &cands[best]) {
            best = i;
        }
    }
    best
}

fn grid_better(target: f64) -> impl Fn(&Candidate, &Candidate) -> bool {
    move |a, b| {
        let ma = a.rates.common() >= target - TARGET_SLACK;
        let mb = b.rates.common() >= target - TARGET_SLACK;
        match (ma, mb) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => a.rates.personal > b.rates.personal,
            (false, false) => a.rates.common() > b.rates.common(),
        }
    }
}

/// Traces the upper boundary of a rate region.
///
/// First finds the largest common rate `R_max`, then maximizes the personal
/// rate on `cfg.grid_points` equally spaced common-rate targets from 0 to
/// `R_max` (the last one backed off by `1e-7` so it has an interior). Each
/// target is attacked from `cfg.restarts` random starts, the previous
/// target's solution and the `R_max` solution. Returns the raw points (not
/// yet Pareto-cleaned) and the number of targets no start could meet.
pub fn sweep<P: RateProblem>(problem: &P, cfg: &OptimizerConfig) -> Result<(Vec<RatePoint>, usize)> {
    sweep_seeded(problem, cfg, &[])
}

/// [`sweep`] with extra starting parameters. The seed with the largest
/// common rate joins the `R_max` stage; at each target the seed with the
/// best personal rate among those meeting it (or, failing that, the one
/// closest to meeting it) joins the starts.
pub fn sweep_seeded<P: RateProblem>(problem: &P, cfg: &OptimizerConfig, seeds: &[Vec<f64>]) -> Result<(Vec<RatePoint>, usize)> {
    cfg.validate()?;
    if let Some(bad) = seeds.iter().find(|s| s.len() != problem.dim()) {
        return Err(crate::Error::DimensionMismatch { expected: problem.dim(), found: bad.len() });
    }
    let seeds: Vec<Candidate> = seeds.iter().map(|x| Candidate { x: x.clone(), rates: problem.evaluate(x) }).collect();
    let restarts = cfg.restarts as u64;
    let mut starts: Vec<Vec<f64>> = (0..restarts)
        .map(|r| problem.initial(&mut random::seeded(mix_seed(cfg.seed, 0, r))))
        .collect();
    if !seeds.is_empty() {
        starts.push(seeds[pick(&seeds, |a, b| a.rates.common() > b.rates.common())].x.clone());
    }
    let top: Vec<Candidate> = starts.into_par_iter().map(|x0| solve_max_common(problem, x0, cfg)).collect();
    let best_top = top[pick(&top, |a, b| a.rates.common() > b.rates.common())].clone();
    let r_max = best_top.rates.common().max(0.0);

    let mut points = vec![to_point(problem, &best_top)];
    let mut unmet = 0;
    let mut warm: Option<Vec<f64>> = None;
    let n = if r_max <= FLAT_REGION { 1 } else { cfg.grid_points };
    for j in 0..n {
        let target = if j + 1 == n && j > 0 { r_max - 1e-7 * r_max.max(1.0) } else { r_max * j as f64 / (n - 1).max(1) as f64 };
        let mut starts: Vec<Vec<f64>> = (0..restarts)
            .map(|r| problem.initial(&mut random::seeded(mix_seed(cfg.seed, j as u64 + 1, r))))
            .collect();
        if let Some(w) = &warm {
            starts.push(w.clone());
        }
        starts.push(best_top.x.clone());
        if !seeds.is_empty() {
            starts.push(seeds[pick(&seeds, grid_better(target))].x.clone());
        }
        let cands: Vec<Candidate> = starts.into_par_iter().map(|x0| solve_at(problem, target, x0, cfg)).collect();
        let best = &cands[pick(&cands, grid_better(target))];
        if best.rates.common() < target - TARGET_SLACK {
            unmet += 1;
        }
        points.push(to_point(problem, best));
        warm = Some(best.x.clone());
    }
    // once the last target is met the common-rate maximizer only adds a
    // cliff of width TARGET_SLACK at the right edge
    if n > 1 && points.len() > 1 {
        let last = &points[points.len() - 1];
        if last.witness.raw_common >= r_max - TARGET_SLACK && last.witness.raw_personal >= points[0].witness.raw_personal {
            points.remove(0);
        }
    }
    Ok((points, unmet))
}

fn to_point<P: RateProblem>(problem: &P, c: &Candidate) -> RatePoint {
    RatePoint::new(c.rates.common(), c.rates.personal, problem.witness(&c.x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_log_is_continuous_and_increasing() {
        let a = ext_log(BARRIER_EDGE * (1.0 + 1e-12));
        let b = ext_log(BARRIER_EDGE * (1.0 - 1e-12));
        assert!((a - b).abs() < 1e-9);
        assert!(ext_log(-1.0).is_finite());
        assert!(ext_log(-1.0) < ext_log(-0.5));
    }

    #[test]
    fn soft_min_brackets_the_minimum() {
        let v = [0.3, 0.5, 0.31];
        let s = soft_min(&v, 1e-2);
        assert!(s <= 0.3 && s > 0.3 - 1e-2 * 3f64.ln());
        assert_eq!(soft_min(&[0.4], 1.0), 0.4);
    }

    #[test]
    fn seeds_differ_across_stage_and_index() {
        assert_ne!(mix_seed(7, 0, 1), mix_seed(7, 1, 0));
        assert_ne!(mix_seed(7, 1, 1), mix_seed(8, 1, 1));
    }
}
