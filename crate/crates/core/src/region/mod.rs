//! Rate-region frontiers.
//!
//! Every region here is a union of rectangles `[0, common] × [0, personal]`
//! over some parameter set, so its upper boundary is traced by maximizing the
//! personal rate at each fixed common rate. Frontier points carry the
//! parameters that achieve them ([`Witness`]) and can be re-evaluated.

mod ops;
mod problems;
mod sweep;

pub use ops::{
    certify_single_letter_cq, cq_broadcast_frontier, cq_cardinality_bound, cq_entanglement_frontier, dephasing_cq_frontier,
    ensemble_cardinality_bound, independent_rates, merging_rates, pinching_boundary, qq_frontier, reevaluate_witness,
    CertificationReport, IndependentRates, MergingRates, RegionChannel, FEASIBILITY_TOL, REF_BOB, REF_CHARLIE,
};
pub use problems::{CqProblem, DephasingProblem, EnsembleProblem, RateProblem, Rates};
pub use sweep::{sweep, sweep_seeded};

use serde::{Deserialize, Serialize};

use crate::optimize::OptimizerConfig;

/// Rates within this distance of zero are reported as zero.
pub const CLIP_TOL: f64 = 1e-9;

/// Which rate formula a frontier traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// Common classical rate vs. Bob's private classical rate over cq inputs.
    CqBroadcast,
    /// As [`RegionKind::CqBroadcast`] with only Charlie's constraint, valid
    /// when Bob's states commute and Charlie's output is degraded.
    CqBroadcastDegraded,
    /// Common classical rate vs. quantum rate to Bob over pure-state ensembles.
    CqEntanglement,
    /// Closed distribution-only form for generalized dephasing channels.
    Dephasing,
    /// Common quantum rate vs. Bob's quantum rate for isometric channels.
    QuantumQuantum,
    /// Exhaustive grid enumeration.
    GridOracle,
    /// Shannon-entropy enumeration for classical degraded channels.
    ClassicalOracle,
    /// Exact boundary formula.
    ClosedForm,
}

/// Parameters achieving a rate pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum WitnessParams {
    /// Joint `p(t, x)` row-major in `t`.
    Distribution { t_size: usize, x_size: usize, p: Vec<f64> },
    /// `p(t)` with pure states on reference ⊗ input, amplitudes as `[re, im]`
    /// with the reference index most significant.
    Ensemble { ref_dim: usize, input_dim: usize, weights: Vec<f64>, states: Vec<Vec<[f64; 2]>> },
    /// A closed-form boundary parameter.
    ClosedForm { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub id: usize,
    /// Unclipped rates as evaluated from `params`.
    pub raw_common: f64,
    pub raw_personal: f64,
    pub params: WitnessParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub common_rate: f64,
    pub personal_rate: f64,
    pub witness: Witness,
}

impl RatePoint {
    pub fn new(raw_common: f64, raw_personal: f64, params: WitnessParams) -> Self {
        Self {
            common_rate: clip(raw_common),
            personal_rate: clip(raw_personal),
            witness: Witness { id: 0, raw_common, raw_personal, params },
        }
    }
}

/// Maps round-off around zero to exact zero; larger negatives are kept so the
/// caller can see them.
pub fn clip(v: f64) -> f64 {
    if v.abs() <= CLIP_TOL {
        0.0
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierMeta {
    pub kind: RegionKind,
    pub k: usize,
    pub t_size: usize,
    pub config: Option<OptimizerConfig>,
    pub common_label: String,
    pub personal_label: String,
    /// Grid points where no restart met the common-rate target within 1e-6.
    pub unmet_targets: usize,
}

impl FrontierMeta {
    pub fn new(kind: RegionKind, k: usize, t_size: usize, config: Option<OptimizerConfig>) -> Self {
        let (common, personal) = match kind {
            RegionKind::CqBroadcast | RegionKind::CqBroadcastDegraded | RegionKind::GridOracle | RegionKind::ClassicalOracle => ("R", "R_B"),
            RegionKind::CqEntanglement | RegionKind::Dephasing => ("R", "Q"),
            RegionKind::QuantumQuantum => ("Q", "Q_B"),
            RegionKind::ClosedForm => ("R", "Q_B"),
        };
        Self {
            kind,
            k,
            t_size,
            config,
            common_label: common.into(),
            personal_label: personal.into(),
            unmet_targets: 0,
        }
    }
}

/// Pareto-ordered rate points: common rate strictly increasing, personal
/// rate strictly decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub points: Vec<RatePoint>,
    pub meta: FrontierMeta,
}

impl Frontier {
    /// Drops dominated points and renumbers witnesses in output order.
    pub fn from_points(mut points: Vec<RatePoint>, meta: FrontierMeta) -> Self {
        points.retain(|p| p.common_rate.is_finite() && p.personal_rate.is_finite());
        points.sort_by(|a, b| {
            b.common_rate
                .total_cmp(&a.common_rate)
                .then(b.personal_rate.total_cmp(&a.personal_rate))
        });
        let mut kept: Vec<RatePoint> = Vec::with_capacity(points.len());
        for p in points {
            match kept.last() {
                Some(last) if p.personal_rate <= last.personal_rate => {}
                _ => kept.push(p),
            }
        }
        kept.reverse();
        for (i, p) in kept.iter_mut().enumerate() {
            p.witness.id = i;
        }
        Self { points: kept, meta }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_common(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.common_rate)
    }

    pub fn max_personal(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.personal_rate)
    }

    /// `(common, personal)` pairs in order.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.common_rate, p.personal_rate)).collect()
    }

    /// Largest personal rate of a point whose common rate is at least `r`
    /// (boundary of the union of rectangles).
    pub fn staircase_at(&self, r: f64) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| p.common_rate >= r)
            .map(|p| p.personal_rate)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    }

    /// Boundary of the convex hull of the rectangles (time sharing): the
    /// upper concave envelope of the points together with `(0, max personal)`.
    /// `None` beyond the largest common rate.
    pub fn value_at(&self, r: f64) -> Option<f64> {
        envelope_at(&self.pairs(), r)
    }

    /// Distance from `(common, personal)` to the boundary of the convex
    /// region: zero for points on the boundary, positive otherwise.
    pub fn distance_to_boundary(&self, common: f64, personal: f64) -> f64 {
        let hull = upper_hull(&self.pairs());
        if hull.is_empty() {
            return (common * common + personal * personal).sqrt();
        }
        let r_max = hull.last().unwrap().0;
        // The boundary: the hull polyline, the vertical drop at r_max and the
        // segment (0, 0)-(0, max personal).
        let mut segs: Vec<((f64, f64), (f64, f64))> = hull.windows(2).map(|w| (w[0], w[1])).collect();
        segs.push(((r_max, hull.last().unwrap().1), (r_max, 0.0)));
        segs.push(((0.0, 0.0), hull[0]));
        segs.push(((0.0, 0.0), (r_max, 0.0)));
        segs.iter().map(|(a, b)| segment_distance((common, personal), *a, *b)).fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Upper concave hull of `points ∪ {(0, max personal)}`, sorted by the first
/// coordinate and restricted to its non-increasing part.
pub fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.is_empty() {
        return Vec::new();
    }
    let top = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.push((0.0, top));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        if let Some(last) = hull.last() {
            if p.0 == last.0 {
                continue;
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Evaluates the concave envelope of `points` (see [`Frontier::value_at`]).
pub fn envelope_at(points: &[(f64, f64)], r: f64) -> Option<f64> {
    let hull = upper_hull(points);
    let last = *hull.last()?;
    if r > last.0 + 1e-15 || r < 0.0 {
        return None;
    }
    if r >= last.0 {
        return Some(last.1);
    }
    let i = hull.partition_point(|p| p.0 <= r);
    if i == 0 {
        return Some(hull[0].1);
    }
    let (a, b) = (hull[i - 1], hull[i]);
    let t = (r - a.0) / (b.0 - a.0);
    Some(a.1 + t * (b.1 - a.1))
}

/// `n` equally spaced values from `0` to `max` inclusive.
pub fn shared_grid(max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
}

/// Largest `|a(r) - b(r)|` over `n` grid values of `r` in `[0, min(max_a, max_b)]`.
pub fn max_envelope_gap(a: &Frontier, b: &Frontier, n: usize) -> f64 {
    let top = a.max_common().min(b.max_common());
    shared_grid(top, n)
        .into_iter()
        .map(|r| (a.value_at(r).unwrap_or(0.0) - b.value_at(r).unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
