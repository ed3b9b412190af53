//! Kraus channels, isometric extensions and broadcast channels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::{self, CMatrix};
use crate::state::{DensityMatrix, PureState};

pub const TRACE_PRESERVING_TOL: f64 = 1e-9;
pub const ISOMETRY_TOL: f64 = 1e-9;

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    input: SystemLayout,
    output: SystemLayout,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>, input: SystemLayout, output: SystemLayout) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus set".into()));
        }
        let (din, dout) = (input.dim(), output.dim());
        for k in &kraus {
            if k.nrows() != dout {
                return Err(Error::DimensionMismatch { expected: dout, found: k.nrows() });
            }
            if k.ncols() != din {
                return Err(Error::DimensionMismatch { expected: din, found: k.ncols() });
            }
        }
        let deviation = tp_deviation(&kraus, din);
        if deviation > TRACE_PRESERVING_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { kraus, input, output })
    }

    /// Identity map between two layouts of equal total dimension.
    pub fn identity_between(input: SystemLayout, output: SystemLayout) -> Result<Self> {
        if input.dim() != output.dim() {
            return Err(Error::DimensionMismatch { expected: input.dim(), found: output.dim() });
        }
        let d = input.dim();
        Self::new(vec![linalg::identity(d)], input, output)
    }

    pub fn identity(layout: SystemLayout) -> Self {
        Self::identity_between(layout.clone(), layout).expect("identity is trace preserving")
    }

    /// Completely dephasing map in the computational basis.
    pub fn completely_dephasing(layout: SystemLayout) -> Self {
        let d = layout.dim();
        let kraus = (0..d).map(|i| linalg::matrix_unit(d, i, i)).collect();
        Self::new(kraus, layout.clone(), layout).expect("projectors sum to identity")
    }

    /// Trace-and-replace map `rho -> tr(rho) sigma`.
    pub fn constant(input: SystemLayout, state: &DensityMatrix) -> Self {
        let din = input.dim();
        let dout = state.dim();
        let (vals, vecs) = linalg::hermitian_eigen(state.matrix());
        let mut kraus = Vec::new();
        for (k, &lambda) in vals.iter().enumerate() {
            if lambda <= 1e-15 {
                continue;
            }
            for i in 0..din {
                let mut m = CMatrix::zeros(dout, din);
                for o in 0..dout {
                    m[(o, i)] = vecs[(o, k)] * lambda.sqrt();
                }
                kraus.push(m);
            }
        }
        Self::new(kraus, input, state.layout().clone()).expect("eigen-decomposition gives a Kraus set")
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn input(&self) -> &SystemLayout {
        &self.input
    }

    pub fn output(&self) -> &SystemLayout {
        &self.output
    }

    pub fn trace_preservation_deviation(&self) -> f64 {
        tp_deviation(&self.kraus, self.input.dim())
    }

    /// `sum_i K_i rho K_i^dag`, Hermitized. The state must match the input
    /// dimensions; the result carries the output layout.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.layout().dims() != self.input.dims() {
            return Err(Error::DimensionMismatch { expected: self.input.dim(), found: rho.dim() });
        }
        Ok(DensityMatrix::from_trusted(self.apply_matrix(rho.matrix()), self.output.clone()))
    }

    /// Raw action on an arbitrary (not necessarily positive) matrix.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.output.dim(), self.output.dim());
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// Applies the channel to the contiguous subsystems `labels` of a larger
    /// state; those factors are replaced by the output layout.
    pub fn apply_on(&self, rho: &DensityMatrix, labels: &[&str]) -> Result<DensityMatrix> {
        let (out_layout, start) = rho.layout().splice(labels, &self.output)?;
        let din = rho.layout().dim_of_all(labels)?;
        if din != self.input.dim() {
            return Err(Error::DimensionMismatch { expected: self.input.dim(), found: din });
        }
        let (before, after) = rho.layout().surrounding_dims(start, labels.len());
        let mut out = CMatrix::zeros(out_layout.dim(), out_layout.dim());
        let (ib, ia) = (linalg::identity(before), linalg::identity(after));
        for k in &self.kraus {
            let full = linalg::kron(&linalg::kron(&ib, k), &ia);
            out += &full * rho.matrix() * full.adjoint();
        }
        Ok(DensityMatrix::from_trusted(out, out_layout))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &KrausChannel) -> Result<Self> {
        if self.output.dim() != next.input.dim() {
            return Err(Error::DimensionMismatch { expected: next.input.dim(), found: self.output.dim() });
        }
        let kraus = next
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b * a))
            .collect();
        Self::new(kraus, self.input.clone(), next.output.clone())
    }

    /// `self ⊗ other`, layouts concatenated.
    pub fn tensor(&self, other: &KrausChannel) -> Result<Self> {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| linalg::kron(a, b)))
            .collect();
        Self::new(kraus, self.input.concat(&other.input)?, self.output.concat(&other.output)?)
    }

    /// The canonical extension `V = sum_i K_i ⊗ |i>^E`.
    pub fn isometric_extension(&self, env_label: &str) -> Result<IsometricExtension> {
        let n = self.kraus.len();
        let (din, dout) = (self.input.dim(), self.output.dim());
        let mut v = CMatrix::zeros(dout * n, din);
        for (i, k) in self.kraus.iter().enumerate() {
            for o in 0..dout {
                for a in 0..din {
                    v[(o * n + i, a)] = k[(o, a)];
                }
            }
        }
        IsometricExtension::new(v, self.input.clone(), self.output.clone(), SystemLayout::single(env_label, n)?)
    }

    /// Channel to the environment of the canonical isometric extension.
    pub fn complementary(&self, env_label: &str) -> Result<Self> {
        self.isometric_extension(env_label)?.complementary()
    }

    /// Single Kraus operator with `V^dag V = I`.
    pub fn is_isometry(&self) -> bool {
        self.kraus.len() == 1 && tp_deviation(&self.kraus, self.input.dim()) <= ISOMETRY_TOL
    }
}

fn tp_deviation(kraus: &[CMatrix], din: usize) -> f64 {
    let mut sum = CMatrix::zeros(din, din);
    for k in kraus {
        sum += k.adjoint() * k;
    }
    linalg::max_abs_entry(&(sum - linalg::identity(din)))
}

/// Stinespring isometry `V: in -> out ⊗ env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometricExtension {
    isometry: CMatrix,
    input: SystemLayout,
    output: SystemLayout,
    env: SystemLayout,
}

impl IsometricExtension {
    pub fn new(isometry: CMatrix, input: SystemLayout, output: SystemLayout, env: SystemLayout) -> Result<Self> {
        let rows = output.dim() * env.dim();
        if isometry.nrows() != rows || isometry.ncols() != input.dim() {
            return Err(Error::DimensionMismatch { expected: rows, found: isometry.nrows() });
        }
        let deviation = linalg::max_abs_entry(&(isometry.adjoint() * &isometry - linalg::identity(input.dim())));
        if deviation > ISOMETRY_TOL {
            return Err(Error::NotIsometric { deviation });
        }
        output.concat(&env)?;
        Ok(Self { isometry, input, output, env })
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.isometry
    }

    pub fn input(&self) -> &SystemLayout {
        &self.input
    }

    pub fn output(&self) -> &SystemLayout {
        &self.output
    }

    pub fn env(&self) -> &SystemLayout {
        &self.env
    }

    /// `V rho V^dag` on `output ⊗ env`.
    pub fn apply_full(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.as_channel()?.apply(rho)
    }

    /// The isometry itself as a single-Kraus channel onto `output ⊗ env`.
    pub fn as_channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(vec![self.isometry.clone()], self.input.clone(), self.output.concat(&self.env)?)
    }

    /// The extended channel `tr_env V(.)V^dag`.
    pub fn channel(&self) -> Result<KrausChannel> {
        let (dout, de) = (self.output.dim(), self.env.dim());
        let kraus = (0..de)
            .map(|e| CMatrix::from_fn(dout, self.input.dim(), |o, a| self.isometry[(o * de + e, a)]))
            .collect();
        KrausChannel::new(kraus, self.input.clone(), self.output.clone())
    }

    /// The complementary channel `tr_out V(.)V^dag`.
    pub fn complementary(&self) -> Result<KrausChannel> {
        let (dout, de) = (self.output.dim(), self.env.dim());
        let kraus = (0..dout)
            .map(|o| CMatrix::from_fn(de, self.input.dim(), |e, a| self.isometry[(o * de + e, a)]))
            .collect();
        KrausChannel::new(kraus, self.input.clone(), self.env.clone())
    }
}

/// Environment vectors `|psi_x>` of a generalized dephasing extension
/// `U = sum_x |x>^B |psi_x>^{CE} <x|^{A'}`.
///
/// The vectors live on a layout whose first factor is Charlie's share `C`;
/// any remaining factors form the unobserved environment `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DephasingSpec {
    env_vectors: Vec<PureState>,
}

impl DephasingSpec {
    pub fn new(env_vectors: Vec<PureState>) -> Result<Self> {
        let first = env_vectors.first().ok_or_else(|| Error::InvalidArgument("no environment vectors".into()))?;
        let layout = first.layout().clone();
        if layout.systems().first().map(|(l, _)| l.as_str()) != Some(CHARLIE) {
            return Err(Error::InvalidArgument(format!(
                "environment layout {layout} must start with Charlie's system {CHARLIE}"
            )));
        }
        for v in &env_vectors {
            if v.layout() != &layout {
                return Err(Error::InvalidArgument(format!("environment vector layout {} differs from {layout}", v.layout())));
            }
            let norm = v.amplitudes().norm();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::NotNormalized { norm });
            }
        }
        Ok(Self { env_vectors })
    }

    pub fn basis_size(&self) -> usize {
        self.env_vectors.len()
    }

    pub fn env_vectors(&self) -> &[PureState] {
        &self.env_vectors
    }

    /// Layout of Charlie's share plus residual environment.
    pub fn env_layout(&self) -> &SystemLayout {
        self.env_vectors[0].layout()
    }

    pub fn charlie_dim(&self) -> usize {
        self.env_layout().systems()[0].1
    }

    /// Dimension of the part of the environment Charlie does not hold.
    pub fn residual_env_dim(&self) -> usize {
        self.env_layout().dim() / self.charlie_dim()
    }

    /// Projectors `psi_x^{CE}` as density matrices.
    pub fn env_states(&self) -> Vec<DensityMatrix> {
        self.env_vectors.iter().map(PureState::projector).collect()
    }

    /// Reduced states `psi_x^C`.
    pub fn charlie_states(&self) -> Vec<DensityMatrix> {
        self.env_states()
            .iter()
            .map(|s| s.partial_trace(&[CHARLIE]).expect("layout starts with C"))
            .collect()
    }

    /// `U = sum_x |x>^B |psi_x>^{CE} <x|^{A'}` with output `B ⊗ C` and
    /// environment `E` (dimension 1 when Charlie holds everything).
    pub fn isometric_extension(&self) -> Result<IsometricExtension> {
        let nx = self.basis_size();
        let dce = self.env_layout().dim();
        let mut u = CMatrix::zeros(nx * dce, nx);
        for (x, psi) in self.env_vectors.iter().enumerate() {
            for k in 0..dce {
                u[(x * dce + k, x)] = psi.amplitudes()[k];
            }
        }
        let input = SystemLayout::single(INPUT, nx)?;
        let output = SystemLayout::new([(BOB, nx), (CHARLIE, self.charlie_dim())])?;
        let env = SystemLayout::single(ENV, self.residual_env_dim())?;
        IsometricExtension::new(u, input, output, env)
    }
}

pub const INPUT: &str = "A'";
pub const REFERENCE: &str = "A";
pub const BOB: &str = "B";
pub const CHARLIE: &str = "C";
pub const ENV: &str = "E";

/// Quantum broadcast channel `A' -> B ⊗ C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastChannel {
    channel: KrausChannel,
    dephasing: Option<DephasingSpec>,
}

impl BroadcastChannel {
    /// The channel's output layout must be exactly `[B, C]`.
    pub fn new(channel: KrausChannel) -> Result<Self> {
        let labels: Vec<&str> = channel.output().labels().collect();
        if labels != [BOB, CHARLIE] {
            return Err(Error::InvalidArgument(format!(
                "broadcast output layout must be {BOB}⊗{CHARLIE}, found {}",
                channel.output()
            )));
        }
        Ok(Self { channel, dephasing: None })
    }

    /// Broadcast channel from an isometry onto `B ⊗ C`.
    pub fn from_isometry(v: CMatrix, input_dim: usize, b_dim: usize, c_dim: usize) -> Result<Self> {
        let input = SystemLayout::single(INPUT, input_dim)?;
        let output = SystemLayout::new([(BOB, b_dim), (CHARLIE, c_dim)])?;
        Self::new(KrausChannel::new(vec![v], input, output)?)
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn dephasing_spec(&self) -> Option<&DephasingSpec> {
        self.dephasing.as_ref()
    }

    /// Drops the dephasing description (forces the generic code paths).
    pub fn without_dephasing_spec(&self) -> Self {
        Self { channel: self.channel.clone(), dephasing: None }
    }

    pub fn input_dim(&self) -> usize {
        self.channel.input().dim()
    }

    pub fn b_dim(&self) -> usize {
        self.channel.output().systems()[0].1
    }

    pub fn c_dim(&self) -> usize {
        self.channel.output().systems()[1].1
    }

    pub fn is_isometry(&self) -> bool {
        self.channel.is_isometry()
    }

    /// `(tr_C N, tr_B N)` as Kraus channels.
    pub fn marginals(&self) -> (KrausChannel, KrausChannel) {
        let (db, dc) = (self.b_dim(), self.c_dim());
        let din = self.input_dim();
        let mut to_b = Vec::new();
        let mut to_c = Vec::new();
        for k in self.channel.kraus() {
            for j in 0..dc {
                to_b.push(CMatrix::from_fn(db, din, |b, a| k[(b * dc + j, a)]));
            }
            for j in 0..db {
                to_c.push(CMatrix::from_fn(dc, din, |cc, a| k[(j * dc + cc, a)]));
            }
        }
        let input = self.channel.input().clone();
        let b = KrausChannel::new(to_b, input.clone(), SystemLayout::single(BOB, db).expect("valid"))
            .expect("marginal of a channel is a channel");
        let c = KrausChannel::new(to_c, input, SystemLayout::single(CHARLIE, dc).expect("valid"))
            .expect("marginal of a channel is a channel");
        (b, c)
    }

    /// `N^{⊗k}` with the `k` Bob outputs merged into `B` and the Charlie
    /// outputs into `C`. A dephasing description is carried along for `k = 1`.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("tensor power k must be >= 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let (db, dc, din) = (self.b_dim(), self.c_dim(), self.input_dim());
        let mut kraus = self.channel.kraus().to_vec();
        for _ in 1..k {
            kraus = kraus
                .iter()
                .flat_map(|a| self.channel.kraus().iter().map(move |b| linalg::kron(a, b)))
                .collect();
        }
        let perm = bc_regroup_permutation(db, dc, k);
        let kraus = kraus.iter().map(|m| linalg::permute_rows(m, &perm)).collect();
        let input = SystemLayout::single(INPUT, din.pow(k as u32))?;
        let output = SystemLayout::new([(BOB, db.pow(k as u32)), (CHARLIE, dc.pow(k as u32))])?;
        Self::new(KrausChannel::new(kraus, input, output)?)
    }
}

/// Permutation taking `(B1 C1)(B2 C2)...` to `(B1 B2 ...)(C1 C2 ...)`.
fn bc_regroup_permutation(db: usize, dc: usize, k: usize) -> Vec<usize> {
    let dims: Vec<usize> = (0..k).flat_map(|_| [db, dc]).collect();
    let order: Vec<usize> = (0..k).map(|i| 2 * i).chain((0..k).map(|i| 2 * i + 1)).collect();
    linalg::factor_permutation(&dims, &order)
}

/// Classical-quantum broadcast channel `x -> rho_x^{BC}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqBroadcastChannel {
    conditionals: Vec<DensityMatrix>,
}

impl CqBroadcastChannel {
    pub fn new(conditionals: Vec<DensityMatrix>) -> Result<Self> {
        let first = conditionals.first().ok_or_else(|| Error::InvalidArgument("empty input alphabet".into()))?;
        let labels: Vec<&str> = first.layout().labels().collect();
        if labels != [BOB, CHARLIE] {
            return Err(Error::InvalidArgument(format!(
                "cq conditionals must live on {BOB}⊗{CHARLIE}, found {}",
                first.layout()
            )));
        }
        for rho in &conditionals {
            if rho.layout() != first.layout() {
                return Err(Error::InvalidArgument(format!(
                    "conditional layout {} differs from {}",
                    rho.layout(),
                    first.layout()
                )));
            }
        }
        Ok(Self { conditionals })
    }

    /// Product conditionals `rho_x^B ⊗ rho_x^C`.
    pub fn from_product(b_states: &[DensityMatrix], c_states: &[DensityMatrix]) -> Result<Self> {
        if b_states.len() != c_states.len() {
            return Err(Error::DimensionMismatch { expected: b_states.len(), found: c_states.len() });
        }
        let conds = b_states
            .iter()
            .zip(c_states)
            .map(|(b, cc)| {
                let b = b.with_layout(SystemLayout::single(BOB, b.dim())?)?;
                let cc = cc.with_layout(SystemLayout::single(CHARLIE, cc.dim())?)?;
                b.tensor(&cc)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(conds)
    }

    /// Restriction of a quantum broadcast channel to computational-basis inputs.
    pub fn from_basis_inputs(bc: &BroadcastChannel) -> Result<Self> {
        let input = bc.channel().input().clone();
        let conds = (0..input.dim())
            .map(|x| bc.channel().apply(&DensityMatrix::basis(input.clone(), x)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(conds)
    }

    pub fn conditionals(&self) -> &[DensityMatrix] {
        &self.conditionals
    }

    pub fn alphabet_size(&self) -> usize {
        self.conditionals.len()
    }

    pub fn b_dim(&self) -> usize {
        self.conditionals[0].layout().systems()[0].1
    }

    pub fn c_dim(&self) -> usize {
        self.conditionals[0].layout().systems()[1].1
    }

    pub fn b_states(&self) -> Vec<DensityMatrix> {
        self.conditionals.iter().map(|r| r.partial_trace(&[BOB]).expect("layout is B⊗C")).collect()
    }

    pub fn c_states(&self) -> Vec<DensityMatrix> {
        self.conditionals.iter().map(|r| r.partial_trace(&[CHARLIE]).expect("layout is B⊗C")).collect()
    }

    /// `x^k -> ⊗_i rho_{x_i}` regrouped onto `B^k ⊗ C^k`; inputs indexed
    /// lexicographically with `x_1` most significant.
    pub fn tensor_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("tensor power k must be >= 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let (db, dc) = (self.b_dim(), self.c_dim());
        let mut mats: Vec<CMatrix> = self.conditionals.iter().map(|r| r.matrix().clone()).collect();
        for _ in 1..k {
            mats = mats
                .iter()
                .flat_map(|a| self.conditionals.iter().map(move |b| linalg::kron(a, b.matrix())))
                .collect();
        }
        let perm = bc_regroup_permutation(db, dc, k);
        let layout = SystemLayout::new([(BOB, db.pow(k as u32)), (CHARLIE, dc.pow(k as u32))])?;
        let conds = mats
            .iter()
            .map(|m| DensityMatrix::from_trusted(linalg::permute_square(m, &perm), layout.clone()))
            .collect();
        Self::new(conds)
    }
}

/// Zeroes the off-diagonal elements of the named subsystem.
pub fn completely_dephase(rho: &DensityMatrix, label: &str) -> Result<DensityMatrix> {
    let dim = rho.layout().dim_of(label)?;
    let layout = SystemLayout::single(label, dim)?;
    KrausChannel::completely_dephasing(layout).apply_on(rho, &[label])
}

/// Builds the broadcast channel `A' -> B ⊗ C` of a generalized dephasing
/// extension, tracing out any residual environment.
pub fn make_generalized_dephasing(spec: DephasingSpec) -> Result<BroadcastChannel> {
    let channel = spec.isometric_extension()?.channel()?;
    let mut bc = BroadcastChannel::new(channel)?;
    bc.dephasing = Some(spec);
    Ok(bc)
}

/// The 3×3 pinching channel to Bob with Charlie holding its entire
/// environment: `psi_0 = psi_1 = |0>`, `psi_2 = |1>`.
pub fn make_pinching() -> BroadcastChannel {
    let c_layout = SystemLayout::single(CHARLIE, 2).expect("valid");
    let zero = PureState::basis(c_layout.clone(), 0).expect("valid");
    let one = PureState::basis(c_layout, 1).expect("valid");
    let spec = DephasingSpec::new(vec![zero.clone(), zero, one]).expect("basis vectors are normalized");
    make_generalized_dephasing(spec).expect("pinching extension is an isometry")
}

/// Basis inputs of [`make_pinching`] as a cq channel: `x -> |x><x| ⊗ psi_x`.
pub fn make_pinching_cq() -> CqBroadcastChannel {
    CqBroadcastChannel::from_basis_inputs(&make_pinching()).expect("basis inputs are states")
}

/// Copying isometry `|x> -> |x>^B |x>^C` on a qubit.
pub fn make_ghz_copy() -> BroadcastChannel {
    let c_layout = SystemLayout::single(CHARLIE, 2).expect("valid");
    let spec = DephasingSpec::new(vec![
        PureState::basis(c_layout.clone(), 0).expect("valid"),
        PureState::basis(c_layout, 1).expect("valid"),
    ])
    .expect("basis vectors are normalized");
    make_generalized_dephasing(spec).expect("copy map is an isometry")
}

/// Identity from a `d`-dimensional input to Bob; Charlie's system is trivial.
pub fn make_identity_to_bob(d: usize) -> BroadcastChannel {
    BroadcastChannel::from_isometry(linalg::identity(d), d, d, 1).expect("identity is an isometry")
}

/// Trace-and-replace broadcast channel outputting `|0><0| ⊗ |0><0|`.
pub fn make_constant_broadcast(input_dim: usize, b_dim: usize, c_dim: usize) -> Result<BroadcastChannel> {
    let out = SystemLayout::new([(BOB, b_dim), (CHARLIE, c_dim)])?;
    let state = DensityMatrix::basis(out, 0)?;
    BroadcastChannel::new(KrausChannel::constant(SystemLayout::single(INPUT, input_dim)?, &state))
}

/// Noiseless classical bit to both receivers: `x -> |x><x| ⊗ |x><x|`.
pub fn make_noiseless_bit_cq() -> CqBroadcastChannel {
    let b = SystemLayout::single(BOB, 2).expect("valid");
    let cl = SystemLayout::single(CHARLIE, 2).expect("valid");
    let bs: Vec<_> = (0..2).map(|x| DensityMatrix::basis(b.clone(), x).expect("valid")).collect();
    let cs: Vec<_> = (0..2).map(|x| DensityMatrix::basis(cl.clone(), x).expect("valid")).collect();
    CqBroadcastChannel::from_product(&bs, &cs).expect("valid")
}

/// Binary cq channel whose outputs do not depend on the input.
pub fn make_constant_cq() -> CqBroadcastChannel {
    let b = SystemLayout::single(BOB, 2).expect("valid");
    let cl = SystemLayout::single(CHARLIE, 2).expect("valid");
    let rb = DensityMatrix::diagonal(b, &[0.3, 0.7]).expect("valid");
    let rc = DensityMatrix::maximally_mixed(cl);
    CqBroadcastChannel::from_product(&[rb.clone(), rb], &[rc.clone(), rc]).expect("valid")
}

/// Classical broadcast channel `x -> (y, z)` with `p(y, z | x) = p(y|x) p(z|y)`
/// embedded as diagonal conditionals on `B ⊗ C`. Matrices are indexed
/// `[output][input]` (columns sum to one).
pub fn make_classical_degraded_cq(p_y_given_x: &[Vec<f64>], p_z_given_y: &[Vec<f64>]) -> Result<CqBroadcastChannel> {
    let ny = p_y_given_x.len();
    let nz = p_z_given_y.len();
    let nx = p_y_given_x.first().map(Vec::len).unwrap_or(0);
    if nx == 0 || p_z_given_y.iter().any(|row| row.len() != ny) || p_y_given_x.iter().any(|r| r.len() != nx) {
        return Err(Error::InvalidArgument("stochastic matrix shapes do not chain".into()));
    }
    let layout = SystemLayout::new([(BOB, ny), (CHARLIE, nz)])?;
    let conds = (0..nx)
        .map(|x| {
            let mut probs = vec![0.0; ny * nz];
            for y in 0..ny {
                for z in 0..nz {
                    probs[y * nz + z] = p_y_given_x[y][x] * p_z_given_y[z][y];
                }
            }
            DensityMatrix::diagonal(layout.clone(), &probs)
        })
        .collect::<Result<Vec<_>>>()?;
    CqBroadcastChannel::new(conds)
}

/// Binary symmetric channel matrix `[output][input]`.
pub fn bsc(flip: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]]
}
