//! Parameterized rate functionals.
//!
//! A problem maps a real parameter vector to a personal rate and one or more
//! common-rate constraints; the common rate is their minimum.

use rand::Rng;

use crate::channel::{BroadcastChannel, CqBroadcastChannel, DephasingSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, ZERO};
use crate::optimize::{logits_of, softmax};
use crate::random::{self, SeededRng};
use crate::region::WitnessParams;
use crate::state::{validate_distribution, CqState, DensityMatrix};

/// Rates of one parameter setting (already divided by the block length).
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub personal: f64,
    pub constraints: Vec<f64>,
}

impl Rates {
    pub fn common(&self) -> f64 {
        self.constraints.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub trait RateProblem: Sync {
    /// Length of the parameter vector.
    fn dim(&self) -> usize;
    fn initial(&self, rng: &mut SeededRng) -> Vec<f64>;
    /// Renormalizes vector blocks; must not change [`RateProblem::evaluate`].
    fn project(&self, _x: &mut [f64]) {}
    fn evaluate(&self, x: &[f64]) -> Rates;
    fn witness(&self, x: &[f64]) -> WitnessParams;
    fn evaluate_witness(&self, w: &WitnessParams) -> Result<Rates>;
    fn t_size(&self) -> usize;
    /// Parameters with near-zero probabilities set to (numerically) exact
    /// zeros, or `None` when nothing would change. Softmax gradients vanish
    /// as a probability approaches zero, so optima on simplex faces are
    /// otherwise only approached slowly.
    fn snapped(&self, _x: &[f64], _threshold: f64) -> Option<Vec<f64>> {
        None
    }
}

/// Thresholds tried by the sweep when snapping small probabilities to zero.
pub const SNAP_THRESHOLDS: [f64; 3] = [1e-6, 1e-4, 1e-2];
const ZERO_LOGIT: f64 = -70.0;

fn snap_logits(logits: &[f64], threshold: f64) -> Option<Vec<f64>> {
    let p = softmax(logits);
    if !p.iter().any(|v| *v < threshold && *v > 1e-25) || p.iter().all(|v| *v < threshold) {
        return None;
    }
    Some(logits.iter().zip(&p).map(|(z, v)| if *v < threshold { ZERO_LOGIT.min(*z) } else { *z }).collect())
}

fn entropy_of_matrix(m: &CMatrix) -> f64 {
    linalg::entropy_bits(&linalg::hermitian_eigenvalues(m))
}

fn is_diagonal(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() == 0.0))
}

/// Entropy of `sum_j v_j v_j^dag` via whichever of the outer-product or Gram
/// matrix is smaller.
pub(crate) fn gram_entropy(vectors: &[CVector]) -> f64 {
    let n = vectors.len();
    if n == 0 {
        return 0.0;
    }
    let d = vectors[0].len();
    if n < d {
        let g = CMatrix::from_fn(n, n, |i, j| vectors[i].dotc(&vectors[j]));
        entropy_of_matrix(&g)
    } else {
        let mut outer = CMatrix::zeros(d, d);
        for v in vectors {
            outer += v * v.adjoint();
        }
        entropy_of_matrix(&outer)
    }
}

/// Joint distribution `p(t, x)` from logits, row-major in `t`.
fn joint_from_logits(x: &[f64]) -> Vec<f64> {
    softmax(x)
}

fn check_distribution_witness(w: &WitnessParams, t: usize, nx: usize) -> Result<Vec<f64>> {
    match w {
        WitnessParams::Distribution { t_size, x_size, p } if *t_size == t && *x_size == nx && p.len() == t * nx => {
            validate_distribution(p)?;
            Ok(p.clone())
        }
        WitnessParams::Distribution { t_size, x_size, .. } => Err(Error::InvalidArgument(format!(
            "witness distribution is {t_size}×{x_size}, expected {t}×{nx}"
        ))),
        _ => Err(Error::InvalidArgument("witness is not a joint distribution".into())),
    }
}

fn random_joint_logits(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    // Sparse-ish Dirichlet draws reach the simplex faces where optima sit.
    let p: Vec<f64> = random::distribution(rng, n).into_iter().map(|v| v.powf(1.0 + 2.0 * rng.random::<f64>())).collect();
    let total: f64 = p.iter().sum();
    logits_of(&p.iter().map(|v| (v / total).max(1e-9)).collect::<Vec<_>>())
}

/// Entropies of mixtures of fixed states, with a diagonal fast path.
#[derive(Debug, Clone)]
struct Mixer {
    states: Vec<CMatrix>,
    diagonals: Option<Vec<Vec<f64>>>,
    entropies: Vec<f64>,
}

impl Mixer {
    fn new(states: Vec<CMatrix>) -> Self {
        let diagonals = states
            .iter()
            .all(is_diagonal)
            .then(|| states.iter().map(|s| (0..s.nrows()).map(|i| s[(i, i)].re).collect()).collect());
        let entropies = states.iter().map(entropy_of_matrix).collect();
        Self { states, diagonals, entropies }
    }

    fn mixture_entropy(&self, w: &[f64]) -> f64 {
        if let Some(diags) = &self.diagonals {
            let d = diags[0].len();
            let mut acc = vec![0.0; d];
            for (wi, di) in w.iter().zip(diags) {
                for (a, v) in acc.iter_mut().zip(di) {
                    *a += wi * v;
                }
            }
            return linalg::entropy_bits(&acc);
        }
        let d = self.states[0].nrows();
        let mut m = CMatrix::zeros(d, d);
        for (wi, s) in w.iter().zip(&self.states) {
            if *wi != 0.0 {
                m += s * c(*wi, 0.0);
            }
        }
        entropy_of_matrix(&m)
    }

    fn average_entropy(&self, w: &[f64]) -> f64 {
        w.iter().zip(&self.entropies).map(|(a, b)| a * b).sum()
    }
}

/// `R_B = I(X;B|T)`, common constraints `I(T;B)` and `I(T;C)` (or `I(T;C)`
/// alone for the degraded form), on a cq channel's `k`-th power.
#[derive(Debug, Clone)]
pub struct CqProblem {
    channel: CqBroadcastChannel,
    k: usize,
    t_size: usize,
    charlie_only: bool,
    b: Mixer,
    c: Mixer,
}

impl CqProblem {
    /// `channel` must already be the `k`-th tensor power.
    pub fn new(channel: CqBroadcastChannel, k: usize, t_size: usize, charlie_only: bool) -> Result<Self> {
        if t_size == 0 || k == 0 {
            return Err(Error::InvalidArgument("t_size and k must be positive".into()));
        }
        let b = Mixer::new(channel.b_states().iter().map(|s| s.matrix().clone()).collect());
        let c = Mixer::new(channel.c_states().iter().map(|s| s.matrix().clone()).collect());
        Ok(Self { channel, k, t_size, charlie_only, b, c })
    }

    pub fn alphabet_size(&self) -> usize {
        self.channel.alphabet_size()
    }

    /// Rates of a joint distribution via the block formulas.
    pub fn rates_of(&self, p: &[f64]) -> Rates {
        let nx = self.alphabet_size();
        let mut px = vec![0.0; nx];
        let (mut hb_t, mut hc_t, mut hb_x) = (0.0, 0.0, 0.0);
        let mut cond = vec![0.0; nx];
        for row in p.chunks(nx) {
            let pt: f64 = row.iter().sum();
            for (a, v) in px.iter_mut().zip(row) {
                *a += v;
            }
            if pt <= 0.0 {
                continue;
            }
            for (cx, v) in cond.iter_mut().zip(row) {
                *cx = v / pt;
            }
            hb_t += pt * self.b.mixture_entropy(&cond);
            hc_t += pt * self.c.mixture_entropy(&cond);
            hb_x += pt * self.b.average_entropy(&cond);
        }
        let k = self.k as f64;
        let personal = (hb_t - hb_x) / k;
        let i_tc = (self.c.mixture_entropy(&px) - hc_t) / k;
        let constraints = if self.charlie_only {
            vec![i_tc]
        } else {
            vec![(self.b.mixture_entropy(&px) - hb_t) / k, i_tc]
        };
        Rates { personal, constraints }
    }

    /// Same rates computed on the full embedded state `T ⊗ X ⊗ B ⊗ C` with the
    /// generic entropy engine.
    pub fn rates_embedded(&self, p: &[f64]) -> Result<Rates> {
        let nx = self.alphabet_size();
        let x_layout = crate::layout::SystemLayout::single("X", nx)?;
        let flagged = (0..nx)
            .map(|x| DensityMatrix::basis(x_layout.clone(), x)?.tensor(&self.channel.conditionals()[x]))
            .collect::<Result<Vec<_>>>()?;
        let mut weights = Vec::with_capacity(self.t_size);
        let mut conds = Vec::with_capacity(self.t_size);
        for row in p.chunks(nx) {
            let pt: f64 = row.iter().sum();
            weights.push(pt);
            let cond: Vec<f64> = if pt > 0.0 { row.iter().map(|v| v / pt).collect() } else { (0..nx).map(|x| (x == 0) as u8 as f64).collect() };
            conds.push(DensityMatrix::mixture(&cond, &flagged)?);
        }
        let sigma = CqState::new(weights, conds)?.embed("T")?;
        let k = self.k as f64;
        let personal = crate::info::conditional_mutual_information(&sigma, &["X"], &["B"], &["T"])? / k;
        let i_tc = crate::info::mutual_information(&sigma, &["T"], &["C"])? / k;
        let constraints = if self.charlie_only {
            vec![i_tc]
        } else {
            vec![crate::info::mutual_information(&sigma, &["T"], &["B"])? / k, i_tc]
        };
        Ok(Rates { personal, constraints })
    }
}

impl RateProblem for CqProblem {
    fn dim(&self) -> usize {
        self.t_size * self.alphabet_size()
    }

    fn initial(&self, rng: &mut SeededRng) -> Vec<f64> {
        random_joint_logits(rng, self.dim())
    }

    fn evaluate(&self, x: &[f64]) -> Rates {
        self.rates_of(&joint_from_logits(x))
    }

    fn witness(&self, x: &[f64]) -> WitnessParams {
        WitnessParams::Distribution { t_size: self.t_size, x_size: self.alphabet_size(), p: joint_from_logits(x) }
    }

    fn evaluate_witness(&self, w: &WitnessParams) -> Result<Rates> {
        let p = check_distribution_witness(w, self.t_size, self.alphabet_size())?;
        Ok(self.rates_of(&p))
    }

    fn t_size(&self) -> usize {
        self.t_size
    }

    fn snapped(&self, x: &[f64], threshold: f64) -> Option<Vec<f64>> {
        snap_logits(x, threshold)
    }
}

/// `Q = H(X|T) - H(CE|T)`, common constraint `I(T;C)`, over `p(t, x)` for a
/// generalized dephasing channel.
#[derive(Debug, Clone)]
pub struct DephasingProblem {
    env_vectors: Vec<CVector>,
    charlie: Mixer,
    t_size: usize,
}

impl DephasingProblem {
    pub fn new(spec: &DephasingSpec, t_size: usize) -> Result<Self> {
        if t_size == 0 {
            return Err(Error::InvalidArgument("t_size must be positive".into()));
        }
        let env_vectors = spec.env_vectors().iter().map(|v| v.amplitudes().clone()).collect();
        let charlie = Mixer::new(spec.charlie_states().iter().map(|s| s.matrix().clone()).collect());
        Ok(Self { env_vectors, charlie, t_size })
    }

    fn nx(&self) -> usize {
        self.env_vectors.len()
    }

    pub fn rates_of(&self, p: &[f64]) -> Rates {
        let nx = self.nx();
        let mut px = vec![0.0; nx];
        let (mut h_x_t, mut h_ce_t, mut h_c_t) = (0.0, 0.0, 0.0);
        let mut cond = vec![0.0; nx];
        let mut scaled: Vec<CVector> = Vec::with_capacity(nx);
        for row in p.chunks(nx) {
            let pt: f64 = row.iter().sum();
            for (a, v) in px.iter_mut().zip(row) {
                *a += v;
            }
            if pt <= 0.0 {
                continue;
            }
            for (cx, v) in cond.iter_mut().zip(row) {
                *cx = v / pt;
            }
            h_x_t += pt * linalg::entropy_bits(&cond);
            scaled.clear();
            for (w, v) in cond.iter().zip(&self.env_vectors) {
                if *w > 0.0 {
                    scaled.push(v * c(w.sqrt(), 0.0));
                }
            }
            h_ce_t += pt * gram_entropy(&scaled);
            h_c_t += pt * self.charlie.mixture_entropy(&cond);
        }
        Rates { personal: h_x_t - h_ce_t, constraints: vec![self.charlie.mixture_entropy(&px) - h_c_t] }
    }
}

impl RateProblem for DephasingProblem {
    fn dim(&self) -> usize {
        self.t_size * self.nx()
    }

    fn initial(&self, rng: &mut SeededRng) -> Vec<f64> {
        random_joint_logits(rng, self.dim())
    }

    fn evaluate(&self, x: &[f64]) -> Rates {
        self.rates_of(&joint_from_logits(x))
    }

    fn witness(&self, x: &[f64]) -> WitnessParams {
        WitnessParams::Distribution { t_size: self.t_size, x_size: self.nx(), p: joint_from_logits(x) }
    }

    fn evaluate_witness(&self, w: &WitnessParams) -> Result<Rates> {
        let p = check_distribution_witness(w, self.t_size, self.nx())?;
        Ok(self.rates_of(&p))
    }

    fn t_size(&self) -> usize {
        self.t_size
    }

    fn snapped(&self, x: &[f64], threshold: f64) -> Option<Vec<f64>> {
        snap_logits(x, threshold)
    }
}

/// `Q = I(A>BT)`, common constraints `I(T;B)` and `I(T;C)`, over ensembles of
/// pure states on reference ⊗ input pushed through a broadcast channel.
///
/// Parameters: `t_size` logits followed by, per `t`, the real and imaginary
/// parts of the amplitudes (reference index most significant).
#[derive(Debug, Clone)]
pub struct EnsembleProblem {
    /// Transposed Kraus operators `K_i^T` (input × output).
    kraus_t: Vec<CMatrix>,
    din: usize,
    db: usize,
    dc: usize,
    k: usize,
    t_size: usize,
}

/// Per-`t` quantities of `(id ⊗ N)(phi_t)`.
struct Branch {
    rho_b: CMatrix,
    rho_c: CMatrix,
    h_b: f64,
    h_ab: f64,
}

impl EnsembleProblem {
    /// `channel` must already be the `k`-th tensor power.
    pub fn new(channel: &BroadcastChannel, k: usize, t_size: usize) -> Result<Self> {
        if t_size == 0 || k == 0 {
            return Err(Error::InvalidArgument("t_size and k must be positive".into()));
        }
        Ok(Self {
            kraus_t: channel.channel().kraus().iter().map(|m| m.transpose()).collect(),
            din: channel.input_dim(),
            db: channel.b_dim(),
            dc: channel.c_dim(),
            k,
            t_size,
        })
    }

    fn block(&self) -> usize {
        2 * self.din * self.din
    }

    fn amplitudes(&self, x: &[f64], t: usize) -> CMatrix {
        let off = self.t_size + t * self.block();
        let d = self.din;
        CMatrix::from_fn(d, d, |a, i| {
            let j = 2 * (a * d + i);
            c(x[off + j], x[off + j + 1])
        })
    }

    fn branch(&self, m: &CMatrix) -> Branch {
        let (da, db, dc) = (self.din, self.db, self.dc);
        let mut rho_b = CMatrix::zeros(db, db);
        let mut rho_c = CMatrix::zeros(dc, dc);
        // Vectors on A⊗B, one per (Kraus index, c).
        let mut ab_vectors: Vec<CVector> = Vec::with_capacity(self.kraus_t.len() * dc);
        for kt in &self.kraus_t {
            // psi[a, b*dc + c]
            let psi = m * kt;
            for cc in 0..dc {
                let v = CVector::from_fn(da * db, |idx, _| psi[(idx / db, (idx % db) * dc + cc)]);
                if v.norm_squared() > 0.0 {
                    ab_vectors.push(v);
                }
            }
            for a in 0..da {
                for b1 in 0..db {
                    for b2 in 0..db {
                        let mut acc = ZERO;
                        for cc in 0..dc {
                            acc += psi[(a, b1 * dc + cc)] * psi[(a, b2 * dc + cc)].conj();
                        }
                        rho_b[(b1, b2)] += acc;
                    }
                }
                for c1 in 0..dc {
                    for c2 in 0..dc {
                        let mut acc = ZERO;
                        for b in 0..db {
                            acc += psi[(a, b * dc + c1)] * psi[(a, b * dc + c2)].conj();
                        }
                        rho_c[(c1, c2)] += acc;
                    }
                }
            }
        }
        let h_b = entropy_of_matrix(&rho_b);
        let h_ab = gram_entropy(&ab_vectors);
        Branch { rho_b, rho_c, h_b, h_ab }
    }

    fn rates_of(&self, weights: &[f64], states: &[CMatrix]) -> Rates {
        let (mut q, mut hb_t, mut hc_t) = (0.0, 0.0, 0.0);
        let mut avg_b = CMatrix::zeros(self.db, self.db);
        let mut avg_c = CMatrix::zeros(self.dc, self.dc);
        for (w, m) in weights.iter().zip(states) {
            if *w <= 0.0 {
                continue;
            }
            let br = self.branch(m);
            q += w * (br.h_b - br.h_ab);
            let h_c = entropy_of_matrix(&br.rho_c);
            hb_t += w * br.h_b;
            hc_t += w * h_c;
            avg_b += br.rho_b * c(*w, 0.0);
            avg_c += br.rho_c * c(*w, 0.0);
        }
        let k = self.k as f64;
        Rates {
            personal: q / k,
            constraints: vec![(entropy_of_matrix(&avg_b) - hb_t) / k, (entropy_of_matrix(&avg_c) - hc_t) / k],
        }
    }
}

impl RateProblem for EnsembleProblem {
    fn dim(&self) -> usize {
        self.t_size * (1 + self.block())
    }

    fn initial(&self, rng: &mut SeededRng) -> Vec<f64> {
        let mut x = random_joint_logits(rng, self.t_size);
        for _ in 0..self.t_size {
            // Random Schmidt rank: low ranks seed product-like inputs.
            let rank = rng.random_range(1..=self.din);
            let g = random::gaussian_matrix(rng, self.din, rank) * random::gaussian_matrix(rng, rank, self.din);
            for a in 0..self.din {
                for i in 0..self.din {
                    x.push(g[(a, i)].re);
                    x.push(g[(a, i)].im);
                }
            }
        }
        self.project(&mut x);
        x
    }

    fn project(&self, x: &mut [f64]) {
        let b = self.block();
        for t in 0..self.t_size {
            let blk = &mut x[self.t_size + t * b..self.t_size + (t + 1) * b];
            let n = blk.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                blk.iter_mut().for_each(|v| *v /= n);
            } else {
                blk[0] = 1.0;
            }
        }
    }

    fn evaluate(&self, x: &[f64]) -> Rates {
        let weights = softmax(&x[..self.t_size]);
        let b = self.block();
        let states: Vec<CMatrix> = (0..self.t_size)
            .map(|t| {
                let m = self.amplitudes(x, t);
                let n = x[self.t_size + t * b..self.t_size + (t + 1) * b].iter().map(|v| v * v).sum::<f64>().sqrt();
                m * c(1.0 / n, 0.0)
            })
            .collect();
        self.rates_of(&weights, &states)
    }

    fn witness(&self, x: &[f64]) -> WitnessParams {
        let weights = softmax(&x[..self.t_size]);
        let b = self.block();
        let states = (0..self.t_size)
            .map(|t| x[self.t_size + t * b..self.t_size + (t + 1) * b].chunks(2).map(|z| [z[0], z[1]]).collect())
            .collect();
        WitnessParams::Ensemble { ref_dim: self.din, input_dim: self.din, weights, states }
    }

    fn evaluate_witness(&self, w: &WitnessParams) -> Result<Rates> {
        let WitnessParams::Ensemble { ref_dim, input_dim, weights, states } = w else {
            return Err(Error::InvalidArgument("witness is not a pure-state ensemble".into()));
        };
        if *ref_dim != self.din || *input_dim != self.din || weights.len() != self.t_size || states.len() != self.t_size {
            return Err(Error::InvalidArgument(format!(
                "witness ensemble shape ({} states, {ref_dim}×{input_dim}) does not match {}×{}×{}",
                states.len(),
                self.t_size,
                self.din,
                self.din
            )));
        }
        validate_distribution(weights)?;
        let mats = states
            .iter()
            .map(|s| {
                if s.len() != self.din * self.din {
                    return Err(Error::DimensionMismatch { expected: self.din * self.din, found: s.len() });
                }
                let norm = s.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return Err(Error::NotNormalized { norm });
                }
                Ok(CMatrix::from_fn(self.din, self.din, |a, i| {
                    let z = s[a * self.din + i];
                    c(z[0], z[1])
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.rates_of(weights, &mats))
    }

    fn t_size(&self) -> usize {
        self.t_size
    }

    /// Snaps small weights and, per `t`, input basis directions carrying a
    /// fraction of the state's norm below `threshold`.
    fn snapped(&self, x: &[f64], threshold: f64) -> Option<Vec<f64>> {
        let mut out = x.to_vec();
        let mut changed = false;
        if let Some(weights) = snap_logits(&x[..self.t_size], threshold) {
            out[..self.t_size].copy_from_slice(&weights);
            changed = true;
        }
        let d = self.din;
        for t in 0..self.t_size {
            let off = self.t_size + t * self.block();
            let m = self.amplitudes(x, t);
            let total = m.norm_squared();
            for i in 0..d {
                let col: f64 = (0..d).map(|a| m[(a, i)].norm_sqr()).sum();
                if col > 0.0 && col < threshold * total {
                    for a in 0..d {
                        let j = off + 2 * (a * d + i);
                        out[j] = 0.0;
                        out[j + 1] = 0.0;
                    }
                    changed = true;
                }
            }
        }
        changed.then_some(out)
    }
}
