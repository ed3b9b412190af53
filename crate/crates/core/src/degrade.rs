//! Numerical search for degrading maps.
//!
//! A degrading map `M: B -> C` must send every source operator to its target.
//! The search minimizes the squared Frobenius mismatch over a probe set by
//! Riemannian descent on the isometry of `M`'s Stinespring form (QR
//! retraction); the reported residual is the largest trace-norm mismatch over
//! the probes. When all source states commute, the search is restricted to
//! measure-and-prepare maps in their common eigenbasis.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{BroadcastChannel, CqBroadcastChannel, KrausChannel, BOB, CHARLIE};
use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::{self, c, CMatrix};
use crate::optimize::OptimizerConfig;
use crate::random;

pub const COMMUTATOR_TOL: f64 = 1e-9;

/// Source/target operator pairs a degrading map has to reproduce.
#[derive(Debug, Clone)]
pub struct DegradingProblem {
    sources: Vec<CMatrix>,
    targets: Vec<CMatrix>,
    source_layout: SystemLayout,
    target_layout: SystemLayout,
    /// Common eigenbasis (columns) of the sources when they commute.
    classical_basis: Option<CMatrix>,
}

/// Outcome of [`degradedness_residual`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegradednessReport {
    pub residual: f64,
    pub map: KrausChannel,
    pub certified: bool,
    pub threshold: f64,
    /// The search ran over measure-and-prepare maps only.
    pub classical_search: bool,
}

/// Density matrices spanning all `d × d` matrices: `|i><i|` and, for `i < j`,
/// the projectors onto `(|i> + |j>)/√2` and `(|i> + i|j>)/√2`.
pub fn spanning_probes(d: usize) -> Vec<CMatrix> {
    let mut probes = Vec::with_capacity(d * d);
    for i in 0..d {
        probes.push(linalg::matrix_unit(d, i, i));
    }
    let h = 1.0 / 2f64.sqrt();
    for i in 0..d {
        for j in i + 1..d {
            for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
                let mut v = linalg::CVector::zeros(d);
                v[i] = c(h, 0.0);
                v[j] = phase * h;
                probes.push(&v * v.adjoint());
            }
        }
    }
    probes
}

impl DegradingProblem {
    /// Does `to_c` factor through `to_b`? Probes span the input space.
    pub fn from_marginals(to_b: &KrausChannel, to_c: &KrausChannel) -> Result<Self> {
        if to_b.input().dim() != to_c.input().dim() {
            return Err(Error::DimensionMismatch { expected: to_b.input().dim(), found: to_c.input().dim() });
        }
        let probes = spanning_probes(to_b.input().dim());
        Ok(Self {
            sources: probes.iter().map(|p| linalg::hermitize(&to_b.apply_matrix(p))).collect(),
            targets: probes.iter().map(|p| linalg::hermitize(&to_c.apply_matrix(p))).collect(),
            source_layout: to_b.output().clone(),
            target_layout: to_c.output().clone(),
            classical_basis: None,
        })
    }

    /// Bob-to-Charlie degradedness of a broadcast channel.
    pub fn from_broadcast(bc: &BroadcastChannel) -> Result<Self> {
        let (b, c) = bc.marginals();
        Self::from_marginals(&b, &c)
    }

    /// Charlie-to-Bob degradedness of a broadcast channel.
    pub fn reversed_broadcast(bc: &BroadcastChannel) -> Result<Self> {
        let (b, c) = bc.marginals();
        Self::from_marginals(&c, &b)
    }

    /// Needs `M(rho_x^B) = rho_x^C` for every input letter. Commuting
    /// `{rho_x^B}` switch the search to measure-and-prepare maps.
    pub fn from_cq(w: &CqBroadcastChannel) -> Result<Self> {
        let sources: Vec<CMatrix> = w.b_states().iter().map(|s| s.matrix().clone()).collect();
        let targets: Vec<CMatrix> = w.c_states().iter().map(|s| s.matrix().clone()).collect();
        let classical_basis = if max_commutator(&sources) <= COMMUTATOR_TOL { Some(common_eigenbasis(&sources)) } else { None };
        Ok(Self {
            sources,
            targets,
            source_layout: SystemLayout::single(BOB, w.b_dim())?,
            target_layout: SystemLayout::single(CHARLIE, w.c_dim())?,
            classical_basis,
        })
    }

    pub fn is_classical(&self) -> bool {
        self.classical_basis.is_some()
    }

    pub fn source_dim(&self) -> usize {
        self.source_layout.dim()
    }

    pub fn target_dim(&self) -> usize {
        self.target_layout.dim()
    }

    /// Largest trace-norm mismatch `|M(source) - target|_1` over the probes.
    pub fn residual_of(&self, map: &KrausChannel) -> f64 {
        self.sources
            .iter()
            .zip(&self.targets)
            .map(|(s, t)| linalg::trace_norm(&linalg::hermitize(&(map.apply_matrix(s) - t))))
            .fold(0.0, f64::max)
    }

    fn frobenius_loss(&self, kraus: &[CMatrix]) -> (f64, Vec<CMatrix>) {
        let mut loss = 0.0;
        let mut diffs = Vec::with_capacity(self.sources.len());
        for (s, t) in self.sources.iter().zip(&self.targets) {
            let mut out = -t.clone();
            for k in kraus {
                out += k * s * k.adjoint();
            }
            loss += out.iter().map(|z| z.norm_sqr()).sum::<f64>();
            diffs.push(out);
        }
        (loss, diffs)
    }

    fn to_channel(&self, kraus: Vec<CMatrix>) -> Result<KrausChannel> {
        KrausChannel::new(kraus, self.source_layout.clone(), self.target_layout.clone())
    }
}

/// Largest pairwise commutator (Frobenius norm).
pub fn max_commutator(ops: &[CMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let comm = a * b - b * a;
            worst = worst.max(comm.norm());
        }
    }
    worst
}

/// Eigenbasis of a generic real combination of commuting Hermitian operators.
fn common_eigenbasis(ops: &[CMatrix]) -> CMatrix {
    let d = ops[0].nrows();
    let mut combo = CMatrix::zeros(d, d);
    for (i, op) in ops.iter().enumerate() {
        // Incommensurate weights split joint eigenspaces generically.
        let w = ((i as f64 + 1.0) * std::f64::consts::SQRT_2).fract() + 0.1 * (i as f64 + 1.0).sqrt();
        combo += op * c(w, 0.0);
    }
    linalg::hermitian_eigen(&combo).1
}

/// Searches for a degrading map with at most `env_dim` Kraus operators,
/// smallest count first (ignored for the measure-and-prepare search, which
/// uses the source dimension).
///
/// Failure to certify is reported in the result, not as an error.
pub fn degradedness_residual(problem: &DegradingProblem, env_dim: usize, cfg: &OptimizerConfig) -> Result<DegradednessReport> {
    cfg.validate()?;
    if env_dim == 0 {
        return Err(Error::InvalidArgument("degrading map needs at least one Kraus operator".into()));
    }
    // Kraus ranks in increasing order: an environment larger than the
    // optimum needs makes the minimum degenerate and descent crawls there.
    let (db, dc) = (problem.source_dim(), problem.target_dim());
    let ranks: Vec<usize> = match problem.classical_basis {
        Some(_) => vec![env_dim],
        None => (db.div_ceil(dc).min(env_dim)..=env_dim).collect(),
    };
    let mut best: Option<(f64, KrausChannel)> = None;
    'search: for rank in ranks {
        for restart in 0..cfg.restarts {
            let mut rng = random::seeded(cfg.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(restart as u64 + 1)));
            let map = match &problem.classical_basis {
                Some(basis) => search_measure_prepare(problem, basis, restart, &mut rng, cfg)?,
                None => search_stinespring(problem, rank, restart, &mut rng, cfg)?,
            };
            let residual = problem.residual_of(&map);
            if best.as_ref().is_none_or(|(r, _)| residual < *r) {
                best = Some((residual, map));
            }
            if residual <= cfg.degraded_threshold {
                break 'search;
            }
        }
    }
    let (residual, map) = best.expect("at least one restart");
    Ok(DegradednessReport {
        residual,
        map,
        certified: residual <= cfg.degraded_threshold,
        threshold: cfg.degraded_threshold,
        classical_search: problem.is_classical(),
    })
}

/// Riemannian steepest descent with Barzilai–Borwein steps and Armijo
/// backtracking. `tangent` projects a Euclidean gradient at `x`; `retract`
/// maps `x + d` back onto the manifold.
fn manifold_descent(
    mut x: CMatrix,
    eval: &dyn Fn(&CMatrix) -> (f64, CMatrix),
    tangent: &dyn Fn(&CMatrix, &CMatrix) -> CMatrix,
    retract: &dyn Fn(&CMatrix) -> CMatrix,
    max_iterations: usize,
    target_loss: f64,
) -> CMatrix {
    let (mut fx, g) = eval(&x);
    let mut rg = tangent(&x, &g);
    let mut step = 0.1;
    for _ in 0..max_iterations {
        let gn2 = rg.norm_squared();
        if fx <= target_loss || gn2 < 1e-30 {
            break;
        }
        let mut trial = step;
        let mut accepted = None;
        while trial > 1e-14 {
            let cand = retract(&(&x - &rg * c(trial, 0.0)));
            let (fc, gc) = eval(&cand);
            if fc <= fx - 1e-4 * trial * gn2 {
                accepted = Some((cand, fc, gc));
                break;
            }
            trial *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else { break };
        let rg_new = tangent(&x_new, &g_new);
        let s = &x_new - &x;
        let y = &rg_new - &rg;
        let sy = s.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        step = if sy > 0.0 { (s.norm_squared() / sy).clamp(1e-6, 1e3) } else { trial * 2.0 };
        x = x_new;
        fx = f_new;
        rg = rg_new;
    }
    x
}

/// Squared-Frobenius loss small enough that every probe's trace-norm
/// mismatch sits two orders of magnitude below the certification threshold.
fn target_loss(problem: &DegradingProblem, cfg: &OptimizerConfig) -> f64 {
    let t = 1e-2 * cfg.degraded_threshold;
    t * t / problem.target_dim() as f64
}

fn kraus_blocks(v: &CMatrix, n: usize, dout: usize) -> Vec<CMatrix> {
    (0..n).map(|k| v.view((k * dout, 0), (dout, v.ncols())).into_owned()).collect()
}

fn search_stinespring<R: Rng>(
    problem: &DegradingProblem,
    env_dim: usize,
    restart: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<KrausChannel> {
    let (db, dc) = (problem.source_dim(), problem.target_dim());
    let rows = env_dim * dc;
    if rows < db {
        return Err(Error::InvalidArgument(format!(
            "{env_dim} Kraus operators of size {dc}×{db} cannot form a channel"
        )));
    }
    // First restart: the identity embedding, exact when B and C agree.
    let v0 = if restart == 0 && db == dc {
        CMatrix::from_fn(rows, db, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    } else {
        random::isometry(rng, rows, db)
    };
    let eval = |v: &CMatrix| {
        let kraus = kraus_blocks(v, env_dim, dc);
        let (loss, diffs) = problem.frobenius_loss(&kraus);
        let mut grad = CMatrix::zeros(rows, db);
        for (k, kr) in kraus.iter().enumerate() {
            let mut gk = CMatrix::zeros(dc, db);
            for (d, s) in diffs.iter().zip(&problem.sources) {
                gk += d * kr * s;
            }
            grad.view_mut((k * dc, 0), (dc, db)).copy_from(&(gk * c(4.0, 0.0)));
        }
        (loss, grad)
    };
    let tangent = |v: &CMatrix, g: &CMatrix| {
        let vg = v.adjoint() * g;
        g - v * linalg::hermitize(&vg)
    };
    let retract = |v: &CMatrix| linalg::qr_isometry(v);
    let v = manifold_descent(v0, &eval, &tangent, &retract, cfg.max_iterations * 50, target_loss(problem, cfg));
    problem.to_channel(kraus_blocks(&v, env_dim, dc))
}

/// `M(sigma) = sum_b <e_b|sigma|e_b> tau_b` with `tau_b = W_b W_b^dag`,
/// `|W_b|_F = 1`. The blocks `W_b` are stacked vertically.
fn search_measure_prepare<R: Rng>(
    problem: &DegradingProblem,
    basis: &CMatrix,
    _restart: usize,
    rng: &mut R,
    cfg: &OptimizerConfig,
) -> Result<KrausChannel> {
    let (db, dc) = (problem.source_dim(), problem.target_dim());
    // q[x][b] = <e_b|rho_x|e_b>
    let q: Vec<Vec<f64>> = problem
        .sources
        .iter()
        .map(|s| (0..db).map(|b| (basis.column(b).adjoint() * s * basis.column(b))[(0, 0)].re).collect())
        .collect();
    let normalize_blocks = |w: &CMatrix| {
        let mut out = w.clone();
        for b in 0..db {
            let mut blk = out.view_mut((b * dc, 0), (dc, dc));
            let n = blk.norm();
            blk /= c(n, 0.0);
        }
        out
    };
    let w0 = normalize_blocks(&random::gaussian_matrix(rng, db * dc, dc));
    let eval = |w: &CMatrix| {
        let taus: Vec<CMatrix> = (0..db)
            .map(|b| {
                let blk = w.view((b * dc, 0), (dc, dc));
                blk * blk.adjoint()
            })
            .collect();
        let mut loss = 0.0;
        let mut grad = CMatrix::zeros(db * dc, dc);
        for (qx, t) in q.iter().zip(&problem.targets) {
            let mut d = -t.clone();
            for (b, tau) in taus.iter().enumerate() {
                d += tau * c(qx[b], 0.0);
            }
            loss += d.norm_squared();
            for b in 0..db {
                let blk = w.view((b * dc, 0), (dc, dc));
                let gb = &d * blk * c(4.0 * qx[b], 0.0);
                let mut target = grad.view_mut((b * dc, 0), (dc, dc));
                target += gb;
            }
        }
        (loss, grad)
    };
    let tangent = |w: &CMatrix, g: &CMatrix| {
        let mut out = g.clone();
        for b in 0..db {
            let wb = w.view((b * dc, 0), (dc, dc));
            let gb = g.view((b * dc, 0), (dc, dc));
            let radial = wb.iter().zip(gb.iter()).map(|(a, z)| (a.conj() * z).re).sum::<f64>();
            let mut ob = out.view_mut((b * dc, 0), (dc, dc));
            ob -= wb * c(radial, 0.0);
        }
        out
    };
    let w = manifold_descent(w0, &eval, &tangent, &normalize_blocks, cfg.max_iterations * 50, target_loss(problem, cfg));
    let mut kraus = Vec::new();
    for b in 0..db {
        let blk = w.view((b * dc, 0), (dc, dc));
        let e_b = basis.column(b).adjoint();
        for j in 0..dc {
            kraus.push(blk.column(j) * &e_b);
        }
    }
    problem.to_channel(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_classical_degraded_cq, make_pinching, bsc};

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 4, ..OptimizerConfig::default() }
    }

    #[test]
    fn identical_marginals_are_degraded_by_identity() {
        let l = SystemLayout::single("B", 2).unwrap();
        let mut rng = random::seeded(3);
        let ch = random::channel(&mut rng, SystemLayout::single("A'", 2).unwrap(), l, 2);
        let p = DegradingProblem::from_marginals(&ch, &ch).unwrap();
        let r = degradedness_residual(&p, 1, &quick()).unwrap();
        assert!(r.certified, "residual {}", r.residual);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn explicit_measure_prepare_map_degrades_pinching() {
        // N_d(sigma) = sum_x <x|sigma|x> psi_x with psi = |0>, |0>, |1>.
        let pinching = make_pinching();
        let c_layout = SystemLayout::single(CHARLIE, 2).unwrap();
        let psi = [0usize, 0, 1];
        let kraus: Vec<CMatrix> = (0..3)
            .map(|x| {
                let mut k = CMatrix::zeros(2, 3);
                k[(psi[x], x)] = c(1.0, 0.0);
                k
            })
            .collect();
        let map = KrausChannel::new(kraus, SystemLayout::single(BOB, 3).unwrap(), c_layout).unwrap();
        let p = DegradingProblem::from_broadcast(&pinching).unwrap();
        assert!(p.residual_of(&map) < 1e-14);
    }

    #[test]
    fn pinching_is_degraded_towards_charlie_only() {
        let pinching = make_pinching();
        let forward = degradedness_residual(&DegradingProblem::from_broadcast(&pinching).unwrap(), 3, &quick()).unwrap();
        assert!(forward.certified, "residual {}", forward.residual);
        let backward = degradedness_residual(&DegradingProblem::reversed_broadcast(&pinching).unwrap(), 3, &quick()).unwrap();
        assert!(!backward.certified);
        assert!(backward.residual > 0.1);
    }

    #[test]
    fn classical_cascade_uses_measure_prepare_search() {
        let w = make_classical_degraded_cq(&bsc(0.1), &bsc(0.2)).unwrap();
        let p = DegradingProblem::from_cq(&w).unwrap();
        assert!(p.is_classical());
        let r = degradedness_residual(&p, 1, &quick()).unwrap();
        assert!(r.classical_search);
        assert!(r.certified, "residual {}", r.residual);
    }

    #[test]
    fn probes_span_matrix_space() {
        let probes = spanning_probes(3);
        assert_eq!(probes.len(), 9);
        // Rank of the stacked vectorizations must be 9.
        let m = CMatrix::from_fn(9, 9, |i, j| probes[j][(i / 3, i % 3)]);
        let svals = m.singular_values();
        assert!(svals.iter().all(|s| *s > 1e-8));
    }
}
