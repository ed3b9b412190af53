//! Public region computations.

use serde::{Deserialize, Serialize};

use crate::channel::{BroadcastChannel, CqBroadcastChannel, BOB, CHARLIE, INPUT};
use crate::degrade::{degradedness_residual, max_commutator, DegradednessReport, DegradingProblem, COMMUTATOR_TOL};
use crate::error::{Error, Result};
use crate::info;
use crate::linalg;
use crate::optimize::{logits_of, OptimizerConfig};
use crate::region::problems::{CqProblem, DephasingProblem, EnsembleProblem, RateProblem, Rates};
use crate::region::sweep::{sweep, sweep_seeded};
use crate::region::{Frontier, FrontierMeta, RatePoint, RegionKind, WitnessParams};
use crate::state::{DensityMatrix, PureState};

/// Reference labels for [`independent_rates`].
pub const REF_BOB: &str = "A_B";
pub const REF_CHARLIE: &str = "A_C";

/// Channel a frontier was computed for, used to re-evaluate witnesses.
#[derive(Debug, Clone, Copy)]
pub enum RegionChannel<'a> {
    Cq(&'a CqBroadcastChannel),
    Quantum(&'a BroadcastChannel),
}

fn check_budget(db: usize, dc: usize, k: usize, t_size: usize, cfg: &OptimizerConfig) -> Result<()> {
    let cost = (db as f64 * dc as f64).powi(k as i32) * t_size as f64;
    if cost > cfg.matrix_budget as f64 {
        return Err(Error::Budget(format!(
            "(|B||C|)^k·|T| = ({db}·{dc})^{k}·{t_size} = {cost} exceeds the matrix budget {}",
            cfg.matrix_budget
        )));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("block length k must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn pow_sat(base: usize, exp: usize) -> usize {
    (0..exp).fold(1usize, |acc, _| acc.saturating_mul(base))
}

/// `min{|X|^k, |B|^{2k} + |C|^{2k} - 1}`.
pub fn cq_cardinality_bound(nx: usize, db: usize, dc: usize, k: usize) -> usize {
    pow_sat(nx, k).min(pow_sat(db, 2 * k).saturating_add(pow_sat(dc, 2 * k)).saturating_sub(1))
}

/// `min{|A'|^{2k}, |B|^{2k} + |C|^{2k} - 1}`.
pub fn ensemble_cardinality_bound(din: usize, db: usize, dc: usize, k: usize) -> usize {
    pow_sat(din, 2 * k).min(pow_sat(db, 2 * k).saturating_add(pow_sat(dc, 2 * k)).saturating_sub(1))
}

fn run<P: RateProblem>(problem: &P, meta: FrontierMeta, cfg: &OptimizerConfig) -> Result<Frontier> {
    let (points, unmet) = sweep(problem, cfg)?;
    let mut f = Frontier::from_points(points, meta);
    f.meta.unmet_targets = unmet;
    Ok(f)
}

/// Common rate `min{I(T;B^k), I(T;C^k)}/k` against Bob's rate
/// `I(X^k;B^k|T)/k`, for a cq broadcast channel used `k` times.
///
/// For `k > 1` the sweep is also started from products of single-letter
/// witnesses, which reproduce the single-letter rates (or a time-sharing
/// blend of two neighbouring ones) exactly.
pub fn cq_broadcast_frontier(w: &CqBroadcastChannel, k: usize, cfg: &OptimizerConfig) -> Result<Frontier> {
    check_k(k)?;
    let t = cfg.t_size.unwrap_or_else(|| cq_cardinality_bound(w.alphabet_size(), w.b_dim(), w.c_dim(), k));
    check_budget(w.b_dim(), w.c_dim(), k, t, cfg)?;
    let wk = w.tensor_power(k)?;
    let problem = CqProblem::new(wk, k, t, false)?;
    let meta = FrontierMeta::new(RegionKind::CqBroadcast, k, t, Some(cfg.clone()));
    if k == 1 {
        return run(&problem, meta, cfg);
    }
    let seeds = product_seeds(w, k, t, cfg)?;
    let (points, unmet) = sweep_seeded(&problem, cfg, &seeds)?;
    let mut f = Frontier::from_points(points, meta);
    f.meta.unmet_targets = unmet;
    Ok(f)
}

/// Largest `s >= 1` with `s^k <= t`.
fn integer_root(t: usize, k: usize) -> usize {
    let mut s = 1;
    while pow_sat(s + 1, k) <= t {
        s += 1;
    }
    s
}

/// Logits of `p_a^{⊗m} ⊗ p_b^{⊗(k-m)}` over adjacent single-letter witnesses
/// `a, b` and `m = 0..=k`, laid out for `T^k X^k` with `T` padded to `t`.
fn product_seeds(w: &CqBroadcastChannel, k: usize, t: usize, cfg: &OptimizerConfig) -> Result<Vec<Vec<f64>>> {
    let nx = w.alphabet_size();
    let t1 = integer_root(t, k).min(cq_cardinality_bound(nx, w.b_dim(), w.c_dim(), 1));
    let single = cq_broadcast_frontier(w, 1, &OptimizerConfig { t_size: Some(t1), ..cfg.clone() })?;
    let letters: Vec<&Vec<f64>> = single
        .points
        .iter()
        .filter_map(|pt| match &pt.witness.params {
            WitnessParams::Distribution { p, .. } => Some(p),
            _ => None,
        })
        .collect();
    let nxk = pow_sat(nx, k);
    let mut seeds = Vec::new();
    let pairs: Vec<(&Vec<f64>, &Vec<f64>)> = match letters.as_slice() {
        [only] => vec![(*only, *only)],
        _ => letters.windows(2).map(|p| (p[0], p[1])).collect(),
    };
    for (a, b) in pairs {
        for m in 0..=k {
            let factors: Vec<&Vec<f64>> = (0..k).map(|i| if i < m { a } else { b }).collect();
            let mut joint = vec![0.0; t * nxk];
            for tt in 0..pow_sat(t1, k) {
                for xx in 0..nxk {
                    let (mut ti, mut xi, mut v) = (tt, xx, 1.0);
                    for f in factors.iter().rev() {
                        v *= f[(ti % t1) * nx + xi % nx];
                        ti /= t1;
                        xi /= nx;
                    }
                    joint[tt * nxk + xx] = v;
                }
            }
            seeds.push(logits_of(&joint.iter().map(|v| v.max(1e-12)).collect::<Vec<_>>()));
        }
    }
    Ok(seeds)
}

/// Outcome of [`certify_single_letter_cq`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationReport {
    pub max_commutator: f64,
    pub commuting: bool,
    /// Search for a map taking Bob's states to Charlie's.
    pub degradedness: DegradednessReport,
    pub certified: bool,
    /// Degraded-form frontier when certified, general single-letter frontier
    /// otherwise.
    pub frontier: Frontier,
}

/// Checks that Bob's states commute and that Charlie's output is a degraded
/// version of Bob's; if so, the single-letter region is the capacity region
/// and is recomputed with the constraint `I(T;C)` alone and
/// `|T| <= min{|X|, |B|^2}`.
pub fn certify_single_letter_cq(w: &CqBroadcastChannel, cfg: &OptimizerConfig) -> Result<CertificationReport> {
    let b_mats: Vec<_> = w.b_states().iter().map(|s| s.matrix().clone()).collect();
    let max_comm = max_commutator(&b_mats);
    let commuting = max_comm <= COMMUTATOR_TOL;
    let problem = DegradingProblem::from_cq(w)?;
    let degradedness = degradedness_residual(&problem, w.b_dim() * w.c_dim(), cfg)?;
    let certified = commuting && degradedness.certified;
    let frontier = if certified {
        let t = cfg.t_size.unwrap_or(w.alphabet_size().min(w.b_dim() * w.b_dim()));
        check_budget(w.b_dim(), w.c_dim(), 1, t, cfg)?;
        let problem = CqProblem::new(w.clone(), 1, t, true)?;
        run(&problem, FrontierMeta::new(RegionKind::CqBroadcastDegraded, 1, t, Some(cfg.clone())), cfg)?
    } else {
        cq_broadcast_frontier(w, 1, cfg)?
    };
    Ok(CertificationReport { max_commutator: max_comm, commuting, degradedness, certified, frontier })
}

/// Common classical rate `min{I(T;B^k), I(T;C^k)}/k` against the quantum rate
/// `I(A>B^k T)/k` over pure-state ensembles.
pub fn cq_entanglement_frontier(n: &BroadcastChannel, k: usize, cfg: &OptimizerConfig) -> Result<Frontier> {
    check_k(k)?;
    let t = cfg.t_size.unwrap_or_else(|| ensemble_cardinality_bound(n.input_dim(), n.b_dim(), n.c_dim(), k));
    check_budget(n.b_dim(), n.c_dim(), k, t, cfg)?;
    let nk = n.tensor_power(k)?;
    let problem = EnsembleProblem::new(&nk, k, t)?;
    run(&problem, FrontierMeta::new(RegionKind::CqEntanglement, k, t, Some(cfg.clone())), cfg)
}

/// `Q = H(X|T) - H(CE|T)` against `R = I(T;C)` for a generalized dephasing
/// channel, optimized over `p(t, x)` with `|T| <= |X|`.
pub fn dephasing_cq_frontier(u: &BroadcastChannel, cfg: &OptimizerConfig) -> Result<Frontier> {
    let spec = u.dephasing_spec().ok_or(Error::MissingDephasingSpec)?;
    let t = cfg.t_size.unwrap_or(spec.basis_size());
    check_budget(u.b_dim(), u.c_dim(), 1, t, cfg)?;
    let problem = DephasingProblem::new(spec, t)?;
    run(&problem, FrontierMeta::new(RegionKind::Dephasing, 1, t, Some(cfg.clone())), cfg)
}

/// Common quantum rate against Bob's quantum rate for an isometric channel:
/// the entanglement frontier with relabelled rates, or the dephasing form
/// when the channel carries a [`crate::DephasingSpec`] and `k == 1`.
pub fn qq_frontier(u: &BroadcastChannel, k: usize, cfg: &OptimizerConfig) -> Result<Frontier> {
    check_k(k)?;
    if !u.is_isometry() {
        return Err(Error::InvalidArgument(
            "common/personal quantum rates need an isometric channel (single Kraus operator with V†V = I)".into(),
        ));
    }
    let mut f = if k == 1 && u.dephasing_spec().is_some() {
        dephasing_cq_frontier(u, cfg)?
    } else {
        cq_entanglement_frontier(u, k, cfg)?
    };
    let relabelled = FrontierMeta::new(RegionKind::QuantumQuantum, f.meta.k, f.meta.t_size, f.meta.config.clone());
    f.meta = FrontierMeta { unmet_targets: f.meta.unmet_targets, ..relabelled };
    Ok(f)
}

/// Boundary point of the pinching channel's region at parameter `p`:
/// personal `Q_B = p`, common `R = 1` for `p <= 1/2` and `H2(p)` above.
pub fn pinching_boundary(p: f64) -> Result<RatePoint> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("boundary parameter p = {p} outside [0, 1]")));
    }
    let r = if p <= 0.5 { 1.0 } else { linalg::binary_entropy(p) };
    Ok(RatePoint::new(r, p, WitnessParams::ClosedForm { p }))
}

/// Rates of a witness, recomputed from scratch.
pub fn reevaluate_witness(kind: RegionKind, channel: RegionChannel<'_>, k: usize, params: &WitnessParams) -> Result<Rates> {
    check_k(k)?;
    let t_size = match params {
        WitnessParams::Distribution { t_size, .. } => *t_size,
        WitnessParams::Ensemble { weights, .. } => weights.len(),
        WitnessParams::ClosedForm { p } => {
            let pt = pinching_boundary(*p)?;
            return Ok(Rates { personal: pt.witness.raw_personal, constraints: vec![pt.witness.raw_common] });
        }
    };
    match (kind, channel) {
        (RegionKind::CqBroadcast | RegionKind::GridOracle, RegionChannel::Cq(w)) => {
            CqProblem::new(w.tensor_power(k)?, k, t_size, false)?.evaluate_witness(params)
        }
        (RegionKind::CqBroadcastDegraded, RegionChannel::Cq(w)) => CqProblem::new(w.clone(), 1, t_size, true)?.evaluate_witness(params),
        (RegionKind::Dephasing, RegionChannel::Quantum(u)) => {
            DephasingProblem::new(u.dephasing_spec().ok_or(Error::MissingDephasingSpec)?, t_size)?.evaluate_witness(params)
        }
        (RegionKind::QuantumQuantum, RegionChannel::Quantum(u)) if k == 1 && u.dephasing_spec().is_some() => {
            DephasingProblem::new(u.dephasing_spec().unwrap(), t_size)?.evaluate_witness(params)
        }
        (RegionKind::CqEntanglement | RegionKind::QuantumQuantum, RegionChannel::Quantum(u)) => {
            EnsembleProblem::new(&u.tensor_power(k)?, k, t_size)?.evaluate_witness(params)
        }
        (kind, _) => Err(Error::InvalidArgument(format!("cannot re-evaluate a {kind:?} witness on this channel type"))),
    }
}

/// Entanglement-generation rates of the state `(id ⊗ N)(psi)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergingRates {
    /// `I(A>BC)`: entanglement rate with the reference when Bob merges to
    /// Charlie.
    pub q_c_bound: f64,
    /// `I(B>C)`: Bob–Charlie entanglement distillation rate.
    pub bc_distill: f64,
    /// `I(B>C)` is positive (beyond `1e-9`).
    pub feasible: bool,
    pub state: DensityMatrix,
}

pub const FEASIBILITY_TOL: f64 = 1e-9;

fn push_through(n: &BroadcastChannel, psi_in: &PureState) -> Result<DensityMatrix> {
    let d = psi_in.layout().dim_of(INPUT)?;
    if d != n.input_dim() {
        return Err(Error::DimensionMismatch { expected: n.input_dim(), found: d });
    }
    n.channel().apply_on(&psi_in.projector(), &[INPUT])
}

/// `I(A>BC)` and `I(B>C)` on `(id ⊗ N)(psi)`, where `psi` lives on reference
/// systems plus the channel input `A'`.
pub fn merging_rates(n: &BroadcastChannel, psi_in: &PureState) -> Result<MergingRates> {
    let sigma = push_through(n, psi_in)?;
    let refs: Vec<String> = sigma.layout().labels().filter(|l| *l != BOB && *l != CHARLIE).map(String::from).collect();
    let refs: Vec<&str> = refs.iter().map(String::as_str).collect();
    let q_c_bound = info::coherent_information(&sigma, &refs, &[BOB, CHARLIE])?;
    let bc_distill = info::coherent_information(&sigma, &[BOB], &[CHARLIE])?;
    Ok(MergingRates { q_c_bound, bc_distill, feasible: bc_distill > FEASIBILITY_TOL, state: sigma })
}

/// `I(A_B>B)` and `I(A_C>C)` on `(id ⊗ N)(psi)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependentRates {
    pub rate_b: f64,
    pub rate_c: f64,
    /// Non-positive rates are reported as computed; only zero is achievable
    /// there.
    pub feasible_b: bool,
    pub feasible_c: bool,
}

pub fn independent_rates(n: &BroadcastChannel, psi_in: &PureState) -> Result<IndependentRates> {
    for l in [REF_BOB, REF_CHARLIE] {
        psi_in.layout().position(l)?;
    }
    let sigma = push_through(n, psi_in)?;
    let rate_b = info::coherent_information(&sigma, &[REF_BOB], &[BOB])?;
    let rate_c = info::coherent_information(&sigma, &[REF_CHARLIE], &[CHARLIE])?;
    Ok(IndependentRates { rate_b, rate_c, feasible_b: rate_b > FEASIBILITY_TOL, feasible_c: rate_c > FEASIBILITY_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{bsc, make_classical_degraded_cq};
    use crate::optimize::softmax;

    #[test]
    fn integer_roots() {
        assert_eq!(integer_root(4, 2), 2);
        assert_eq!(integer_root(8, 2), 2);
        assert_eq!(integer_root(9, 2), 3);
        assert_eq!(integer_root(3, 2), 1);
        assert_eq!(integer_root(27, 3), 3);
    }

    #[test]
    fn product_seeds_average_single_letter_rates() {
        let w = make_classical_degraded_cq(&bsc(0.1), &bsc(0.2)).unwrap();
        let cfg = OptimizerConfig { restarts: 2, grid_points: 3, ..OptimizerConfig::default() };
        let single = cq_broadcast_frontier(&w, 1, &OptimizerConfig { t_size: Some(2), ..cfg.clone() }).unwrap();
        let seeds = product_seeds(&w, 2, 4, &cfg).unwrap();
        let problem = CqProblem::new(w.tensor_power(2).unwrap(), 2, 4, false).unwrap();
        let one = CqProblem::new(w.clone(), 1, 2, false).unwrap();
        let rates: Vec<Rates> = single.points.iter().map(|p| one.evaluate_witness(&p.witness.params).unwrap()).collect();
        // seeds come in runs of k + 1 per adjacent pair: b⊗b, a⊗b, a⊗a
        assert_eq!(seeds.len(), 3 * (rates.len() - 1));
        for (i, pair) in rates.windows(2).enumerate() {
            for m in 0..=2 {
                let got = problem.rates_of(&softmax(&seeds[3 * i + m]));
                let lambda = m as f64 / 2.0;
                let want = lambda * pair[0].personal + (1.0 - lambda) * pair[1].personal;
                assert!((got.personal - want).abs() < 1e-8, "personal {} vs {}", got.personal, want);
                for (g, (a, b)) in got.constraints.iter().zip(pair[0].constraints.iter().zip(&pair[1].constraints)) {
                    assert!((g - (lambda * a + (1.0 - lambda) * b)).abs() < 1e-8);
                }
            }
        }
    }
}
