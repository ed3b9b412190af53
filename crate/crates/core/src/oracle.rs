//! Exhaustive grid enumeration over joint distributions `p(t, x)`.
//!
//! Every distribution whose entries are multiples of `1/mesh` is evaluated;
//! the oracle frontier is the Pareto frontier of the results. The mesh error
//! is estimated a posteriori as the largest envelope gap between meshes `m`
//! and `m/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::CqBroadcastChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::region::{max_envelope_gap, Frontier, FrontierMeta, RatePoint, RegionKind, WitnessParams};

pub const MAX_ALPHABET: usize = 3;
pub const MAX_T_SIZE: usize = 4;
pub const MAX_MESH: usize = 12;
/// Cap on enumerated distributions for [`cardinality_probe`], whose extended
/// alphabet may exceed [`MAX_T_SIZE`].
pub const MAX_ENUMERATION: u64 = 2_500_000;
/// Common-rate grid size used for the mesh-error estimate.
pub const DEFAULT_R_GRID: usize = 33;

/// Number of compositions of `mesh` into `parts` non-negative parts.
pub fn composition_count(mesh: usize, parts: usize) -> u64 {
    if parts == 0 {
        return u64::from(mesh == 0);
    }
    // C(mesh + parts - 1, parts - 1)
    let (n, k) = ((mesh + parts - 1) as u64, (parts - 1) as u64);
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All compositions, flattened with stride `parts`, in lexicographic order.
pub fn compositions(mesh: usize, parts: usize) -> Vec<u8> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; parts];
    fn rec(i: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<u8>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.extend_from_slice(cur);
            return;
        }
        for v in 0..=left {
            cur[i] = v as u8;
            rec(i + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, mesh, &mut cur, &mut out);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleFrontier {
    pub frontier: Frontier,
    /// Largest envelope gap between this mesh and half of it.
    pub mesh_error: f64,
    pub enumerated: u64,
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|v| **v > 1e-15).map(|v| -v * v.log2()).sum()
}

/// Entropies of mixtures of fixed Hermitian matrices, evaluated directly.
struct MatrixMixer {
    mats: Vec<CMatrix>,
    diag: bool,
    own: Vec<f64>,
}

impl MatrixMixer {
    fn new(mats: Vec<CMatrix>) -> Self {
        let diag = mats.iter().all(|m| (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0)));
        let mut s = Self { mats, diag, own: Vec::new() };
        s.own = (0..s.mats.len()).map(|x| s.entropy(&unit(s.mats.len(), x))).collect();
        s
    }

    fn entropy(&self, w: &[f64]) -> f64 {
        let d = self.mats[0].nrows();
        if self.diag {
            let mut acc = vec![0.0; d];
            for (wi, m) in w.iter().zip(&self.mats) {
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += wi * m[(i, i)].re;
                }
            }
            return shannon(&acc);
        }
        let mut m = CMatrix::zeros(d, d);
        for (wi, mx) in w.iter().zip(&self.mats) {
            m += mx * c(*wi, 0.0);
        }
        let m = (&m + m.adjoint()) * c(0.5, 0.0);
        let vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        shannon(&vals)
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
}

/// `(min{I(T;B), I(T;C)}, I(X;B|T))` of a joint distribution.
fn cq_rates(b: &MatrixMixer, cm: &MatrixMixer, p: &[f64], nx: usize) -> (f64, f64) {
    let mut px = vec![0.0; nx];
    let (mut hb_t, mut hc_t, mut hb_x) = (0.0, 0.0, 0.0);
    let mut cond = vec![0.0; nx];
    for row in p.chunks(nx) {
        let pt: f64 = row.iter().sum();
        row.iter().zip(px.iter_mut()).for_each(|(v, a)| *a += v);
        if pt <= 0.0 {
            continue;
        }
        row.iter().zip(cond.iter_mut()).for_each(|(v, cx)| *cx = v / pt);
        hb_t += pt * b.entropy(&cond);
        hc_t += pt * cm.entropy(&cond);
        hb_x += pt * cond.iter().zip(&b.own).map(|(a, h)| a * h).sum::<f64>();
    }
    let common = (b.entropy(&px) - hb_t).min(cm.entropy(&px) - hc_t);
    (common, hb_t - hb_x)
}

fn check_budget(nx: usize, t_size: usize, mesh: usize) -> Result<()> {
    if nx > MAX_ALPHABET || t_size > MAX_T_SIZE || mesh > MAX_MESH || t_size == 0 || mesh == 0 {
        return Err(Error::Budget(format!(
            "grid oracle needs 1 <= |X| <= {MAX_ALPHABET}, 1 <= |T| <= {MAX_T_SIZE}, 1 <= mesh <= {MAX_MESH}; got |X| = {nx}, |T| = {t_size}, mesh = {mesh}"
        )));
    }
    Ok(())
}

fn enumerate(
    cells: usize,
    mesh: usize,
    t_size: usize,
    x_size: usize,
    kind: RegionKind,
    eval: &(dyn Fn(&[f64]) -> (f64, f64) + Sync),
) -> (Frontier, u64) {
    let comps = compositions(mesh, cells);
    let n = (comps.len() / cells) as u64;
    let scale = 1.0 / mesh as f64;
    let points: Vec<RatePoint> = comps
        .par_chunks(cells * 4096)
        .flat_map_iter(|chunk| {
            let mut local: Vec<(f64, f64, Vec<f64>)> = Vec::new();
            for comp in chunk.chunks(cells) {
                let p: Vec<f64> = comp.iter().map(|v| *v as f64 * scale).collect();
                let (common, personal) = eval(&p);
                local.push((common, personal, p));
            }
            pareto_raw(local)
                .into_iter()
                .map(|(cm, ps, p)| RatePoint::new(cm, ps, WitnessParams::Distribution { t_size, x_size, p }))
        })
        .collect();
    (Frontier::from_points(points, FrontierMeta::new(kind, 1, t_size, None)), n)
}

/// Keeps the non-dominated entries (ties broken by first occurrence).
fn pareto_raw(mut v: Vec<(f64, f64, Vec<f64>)>) -> Vec<(f64, f64, Vec<f64>)> {
    v.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut out: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for e in v {
        if out.last().is_none_or(|l| e.1 > l.1) {
            out.push(e);
        }
    }
    out
}

fn with_mesh_error(
    mesh: usize,
    r_grid: usize,
    run: impl Fn(usize) -> (Frontier, u64),
) -> OracleFrontier {
    let (frontier, enumerated) = run(mesh);
    let mesh_error = if mesh >= 2 { max_envelope_gap(&frontier, &run(mesh / 2).0, r_grid.max(2)) } else { f64::INFINITY };
    OracleFrontier { frontier, mesh_error, enumerated }
}

/// Exhaustive frontier of `(min{I(T;B), I(T;C)}, I(X;B|T))` for a cq channel.
pub fn grid_cq_frontier(w: &CqBroadcastChannel, t_size: usize, mesh: usize, r_grid: usize) -> Result<OracleFrontier> {
    let nx = w.alphabet_size();
    check_budget(nx, t_size, mesh)?;
    Ok(grid_cq_unchecked(w, t_size, mesh, r_grid))
}

fn grid_cq_unchecked(w: &CqBroadcastChannel, t_size: usize, mesh: usize, r_grid: usize) -> OracleFrontier {
    let nx = w.alphabet_size();
    let b = MatrixMixer::new(w.b_states().iter().map(|s| s.matrix().clone()).collect());
    let cm = MatrixMixer::new(w.c_states().iter().map(|s| s.matrix().clone()).collect());
    let eval = |p: &[f64]| cq_rates(&b, &cm, p, nx);
    with_mesh_error(mesh, r_grid, |m| enumerate(t_size * nx, m, t_size, nx, RegionKind::GridOracle, &eval))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CardinalityReport {
    pub bound: usize,
    pub extra: usize,
    pub mesh: usize,
    /// Largest distance from a frontier point with `bound + extra` letters to
    /// the region with `bound` letters (zero when inside).
    pub improvement: f64,
    /// The extended-alphabet point achieving `improvement`.
    pub improving_point: Option<RatePoint>,
    /// Mesh error of the `bound`-letter frontier.
    pub mesh_error: f64,
    pub base: Frontier,
    pub extended: Frontier,
}

/// Compares grid frontiers with `|T| = bound` and `|T| = bound + extra`.
pub fn cardinality_probe(w: &CqBroadcastChannel, bound: usize, extra: usize, mesh: usize) -> Result<CardinalityReport> {
    let nx = w.alphabet_size();
    check_budget(nx, bound, mesh)?;
    let t_ext = bound + extra;
    let count = composition_count(mesh, t_ext * nx);
    if count > MAX_ENUMERATION {
        return Err(Error::Budget(format!(
            "|T| = {t_ext} at mesh {mesh} enumerates {count} distributions (limit {MAX_ENUMERATION})"
        )));
    }
    let base = grid_cq_unchecked(w, bound, mesh, DEFAULT_R_GRID);
    let b = MatrixMixer::new(w.b_states().iter().map(|s| s.matrix().clone()).collect());
    let cm = MatrixMixer::new(w.c_states().iter().map(|s| s.matrix().clone()).collect());
    let eval = |p: &[f64]| cq_rates(&b, &cm, p, nx);
    let (extended, _) = enumerate(t_ext * nx, mesh, t_ext, nx, RegionKind::GridOracle, &eval);
    let mut improvement = 0.0;
    let mut improving_point = None;
    for p in &extended.points {
        let inside = base.frontier.value_at(p.common_rate).is_some_and(|v| v >= p.personal_rate);
        let d = if inside { 0.0 } else { base.frontier.distance_to_boundary(p.common_rate, p.personal_rate) };
        if d > improvement {
            improvement = d;
            improving_point = Some(p.clone());
        }
    }
    Ok(CardinalityReport {
        bound,
        extra,
        mesh,
        improvement,
        improving_point,
        mesh_error: base.mesh_error,
        base: base.frontier,
        extended,
    })
}

fn check_stochastic(m: &[Vec<f64>], name: &str) -> Result<(usize, usize)> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument(format!("{name} must be a non-empty rectangular matrix")));
    }
    for j in 0..cols {
        let s: f64 = m.iter().map(|r| r[j]).sum();
        if (s - 1.0).abs() > 1e-12 || m.iter().any(|r| r[j] < 0.0) {
            return Err(Error::InvalidArgument(format!("{name} column {j} is not a probability vector (sum {s})")));
        }
    }
    Ok((rows, cols))
}

/// `(I(T;Z), I(X;Y|T))` of a joint `p(t, x)` with `Z` obtained from `Y`.
fn classical_rates(pyx: &[Vec<f64>], pzx: &[Vec<f64>], p: &[f64], nx: usize) -> (f64, f64) {
    let push = |m: &[Vec<f64>], q: &[f64]| -> Vec<f64> { m.iter().map(|row| row.iter().zip(q).map(|(a, b)| a * b).sum()).collect() };
    let mut px = vec![0.0; nx];
    let (mut hz_t, mut hy_t, mut hy_x) = (0.0, 0.0, 0.0);
    for row in p.chunks(nx) {
        let pt: f64 = row.iter().sum();
        row.iter().zip(px.iter_mut()).for_each(|(v, a)| *a += v);
        if pt <= 0.0 {
            continue;
        }
        let cond: Vec<f64> = row.iter().map(|v| v / pt).collect();
        hy_t += pt * shannon(&push(pyx, &cond));
        hz_t += pt * shannon(&push(pzx, &cond));
        for (x, q) in cond.iter().enumerate() {
            let col: Vec<f64> = pyx.iter().map(|r| r[x]).collect();
            hy_x += pt * q * shannon(&col);
        }
    }
    (shannon(&push(pzx, &px)) - hz_t, hy_t - hy_x)
}

/// Exhaustive frontier of `(I(T;Z), I(X;Y|T))` for the degraded classical
/// broadcast channel `X -> Y -> Z`; matrices are indexed `[output][input]`.
pub fn classical_degraded_region(
    p_y_given_x: &[Vec<f64>],
    p_z_given_y: &[Vec<f64>],
    t_size: usize,
    mesh: usize,
    r_grid: usize,
) -> Result<OracleFrontier> {
    let (ny, nx) = check_stochastic(p_y_given_x, "p(y|x)")?;
    let (_, ny2) = check_stochastic(p_z_given_y, "p(z|y)")?;
    if ny2 != ny {
        return Err(Error::DimensionMismatch { expected: ny, found: ny2 });
    }
    check_budget(nx, t_size, mesh)?;
    let pzx: Vec<Vec<f64>> = p_z_given_y
        .iter()
        .map(|zrow| (0..nx).map(|x| zrow.iter().enumerate().map(|(y, v)| v * p_y_given_x[y][x]).sum()).collect())
        .collect();
    let eval = |p: &[f64]| classical_rates(p_y_given_x, &pzx, p, nx);
    Ok(with_mesh_error(mesh, r_grid, |m| enumerate(t_size * nx, m, t_size, nx, RegionKind::ClassicalOracle, &eval)))
}
