//! Density matrices, pure states and classical-quantum states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::linalg::{self, c, CMatrix, CVector};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-10;

/// Positive semidefinite, unit-trace Hermitian matrix on a labelled layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: SystemLayout,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(matrix: CMatrix, layout: SystemLayout) -> Result<Self> {
        check_square(&matrix, layout.dim())?;
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = linalg::hermitize(&matrix);
        let trace = linalg::trace(&matrix).re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix, layout })
    }

    /// Wraps a matrix produced by a trusted computation (channel output,
    /// partial trace); only Hermitizes.
    pub(crate) fn from_trusted(matrix: CMatrix, layout: SystemLayout) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.dim());
        Self { matrix: linalg::hermitize(&matrix), layout }
    }

    pub fn maximally_mixed(layout: SystemLayout) -> Self {
        let d = layout.dim();
        Self { matrix: linalg::identity(d) * c(1.0 / d as f64, 0.0), layout }
    }

    /// Diagonal state with the given probabilities in the computational basis.
    pub fn diagonal(layout: SystemLayout, probs: &[f64]) -> Result<Self> {
        if probs.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), found: probs.len() });
        }
        Self::new(linalg::real_diagonal(probs), layout)
    }

    /// Computational basis projector `|i><i|`.
    pub fn basis(layout: SystemLayout, index: usize) -> Result<Self> {
        let d = layout.dim();
        if index >= d {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dimension {d}")));
        }
        Ok(Self { matrix: linalg::matrix_unit(d, index, index), layout })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn into_parts(self) -> (CMatrix, SystemLayout) {
        (self.matrix, self.layout)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Same matrix on a relabelled layout of identical dimensions.
    pub fn with_layout(&self, layout: SystemLayout) -> Result<Self> {
        if layout.dims() != self.layout.dims() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: layout.dim() });
        }
        Ok(Self { matrix: self.matrix.clone(), layout })
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self { matrix: self.matrix.clone(), layout: self.layout.relabel(from, to)? })
    }

    /// `self ⊗ other`, layouts concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self { matrix: linalg::kron(&self.matrix, &other.matrix), layout })
    }

    /// Reduced state on `keep`, returned in this layout's factor order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let kept_layout = self.layout.restrict(keep)?;
        if kept_layout.len() == self.layout.len() {
            return Ok(self.clone());
        }
        let dims = self.layout.dims();
        let kept: Vec<bool> = self.layout.labels().map(|l| keep.contains(&l)).collect();
        let d = self.dim();
        let dk = kept_layout.dim();
        let dt = d / dk;
        let (kept_index, traced_index) = split_indices(&dims, &kept);
        // Group full indices by their traced part.
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dt];
        for i in 0..d {
            groups[traced_index[i]].push((i, kept_index[i]));
        }
        let mut out = CMatrix::zeros(dk, dk);
        for group in &groups {
            for &(i, ki) in group {
                for &(j, kj) in group {
                    out[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Self::from_trusted(out, kept_layout))
    }

    /// Reduced state after tracing out the listed labels.
    pub fn trace_out(&self, drop: &[&str]) -> Result<Self> {
        for l in drop {
            self.layout.position(l)?;
        }
        let keep: Vec<&str> = self.layout.labels().filter(|l| !drop.contains(l)).collect();
        self.partial_trace(&keep)
    }

    /// A purification on layout `reference ⊗ self.layout`, with the reference
    /// dimension equal to the dimension of this state.
    pub fn purify(&self, reference: &str) -> Result<PureState> {
        let d = self.dim();
        let layout = SystemLayout::single(reference, d)?.concat(&self.layout)?;
        let (vals, vecs) = linalg::hermitian_eigen(&self.matrix);
        let mut amps = CVector::zeros(d * d);
        for (k, &lambda) in vals.iter().enumerate() {
            let w = lambda.max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for a in 0..d {
                amps[k * d + a] = vecs[(a, k)] * w;
            }
        }
        let norm = amps.norm();
        PureState::new(amps / c(norm, 0.0), layout)
    }

    /// von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        linalg::entropy_bits(&self.eigenvalues())
    }

    /// Trace norm `|self - other|_1`, in `[0, 2]`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        check_same_dims(self, other)?;
        Ok(linalg::trace_norm(&linalg::hermitize(&(&self.matrix - &other.matrix))))
    }

    /// Squared fidelity `|sqrt(rho) sqrt(sigma)|_1^2`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        check_same_dims(self, other)?;
        // singular values of W_rho^dag W_sigma, the factors restricted to the
        // supports, avoid square roots of round-off eigenvalues
        let a = linalg::psd_root_factor(&self.matrix);
        let b = linalg::psd_root_factor(&other.matrix);
        if a.ncols() == 0 || b.ncols() == 0 {
            return Ok(0.0);
        }
        let s = linalg::trace_norm(&(a.adjoint() * b));
        Ok((s * s).clamp(0.0, 1.0))
    }

    /// Expectation `tr(op · rho)` (real part).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        linalg::trace(&(op * &self.matrix)).re
    }

    /// Mixture `sum_i w_i rho_i` of states sharing a layout.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch { expected: states.len(), found: weights.len() });
        }
        validate_distribution(weights)?;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            check_same_dims(first, s)?;
            m += &s.matrix * c(*w, 0.0);
        }
        Ok(Self::from_trusted(m, first.layout.clone()))
    }
}

/// Unit vector on a labelled layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: CVector,
    layout: SystemLayout,
}

impl PureState {
    pub fn new(amplitudes: CVector, layout: SystemLayout) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch { expected: layout.dim(), found: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, layout })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(amplitudes: CVector, layout: SystemLayout) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amplitudes / c(norm, 0.0), layout)
    }

    pub fn basis(layout: SystemLayout, index: usize) -> Result<Self> {
        let d = layout.dim();
        if index >= d {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for dimension {d}")));
        }
        Ok(Self { amplitudes: linalg::basis_vector(d, index), layout })
    }

    /// `(|00> + |11> + ...)/sqrt(d)` on `a ⊗ b`, both of dimension `d`.
    pub fn maximally_entangled(a: &str, b: &str, d: usize) -> Result<Self> {
        let layout = SystemLayout::new([(a, d), (b, d)])?;
        let mut amps = CVector::zeros(d * d);
        for i in 0..d {
            amps[i * d + i] = c(1.0 / (d as f64).sqrt(), 0.0);
        }
        Self::new(amps, layout)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let amps = CVector::from_fn(self.amplitudes.len() * other.amplitudes.len(), |i, _| {
            self.amplitudes[i / other.amplitudes.len()] * other.amplitudes[i % other.amplitudes.len()]
        });
        Ok(Self { amplitudes: amps, layout })
    }

    pub fn projector(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_trusted(m, self.layout.clone())
    }
}

/// Block-diagonal state `⊕_x p(x) rho_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqState {
    weights: Vec<f64>,
    conditionals: Vec<DensityMatrix>,
}

impl CqState {
    pub fn new(weights: Vec<f64>, conditionals: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != conditionals.len() || weights.is_empty() {
            return Err(Error::DimensionMismatch { expected: conditionals.len(), found: weights.len() });
        }
        validate_distribution(&weights)?;
        let layout = conditionals[0].layout();
        for cond in &conditionals[1..] {
            if cond.layout() != layout {
                return Err(Error::InvalidArgument(format!(
                    "conditional layout {} differs from {}",
                    cond.layout(),
                    layout
                )));
            }
        }
        Ok(Self { weights, conditionals })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn conditionals(&self) -> &[DensityMatrix] {
        &self.conditionals
    }

    pub fn alphabet_size(&self) -> usize {
        self.weights.len()
    }

    pub fn quantum_layout(&self) -> &SystemLayout {
        self.conditionals[0].layout()
    }

    /// Average state `sum_x p(x) rho_x`.
    pub fn average(&self) -> DensityMatrix {
        DensityMatrix::mixture(&self.weights, &self.conditionals).expect("validated at construction")
    }

    /// Embedding `sum_x p(x) |x><x| ⊗ rho_x` with the classical register first.
    pub fn embed(&self, classical_label: &str) -> Result<DensityMatrix> {
        let nx = self.alphabet_size();
        let layout = SystemLayout::single(classical_label, nx)?.concat(self.quantum_layout())?;
        let dq = self.quantum_layout().dim();
        let mut m = CMatrix::zeros(nx * dq, nx * dq);
        for (x, (w, rho)) in self.weights.iter().zip(&self.conditionals).enumerate() {
            let block = rho.matrix() * c(*w, 0.0);
            m.view_mut((x * dq, x * dq), (dq, dq)).copy_from(&block);
        }
        Ok(DensityMatrix::from_trusted(m, layout))
    }
}

pub(crate) fn validate_distribution(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= -1e-12 && **w <= 1.0 + 1e-9)) {
        return Err(Error::InvalidDistribution(format!("weight {w} outside [0, 1]")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(())
}

fn check_square(m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: m.nrows().max(m.ncols()) });
    }
    Ok(())
}

fn check_same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.layout.dims() != b.layout.dims() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// For every full index, its (kept, traced) multi-index components as flat indices.
fn split_indices(dims: &[usize], kept: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let d: usize = dims.iter().product();
    let mut kept_index = vec![0; d];
    let mut traced_index = vec![0; d];
    for i in 0..d {
        let mut rem = i;
        let mut k = 0;
        let mut t = 0;
        let mut k_stride = 1;
        let mut t_stride = 1;
        for (pos, &dim) in dims.iter().enumerate().rev() {
            let digit = rem % dim;
            rem /= dim;
            if kept[pos] {
                k += digit * k_stride;
                k_stride *= dim;
            } else {
                t += digit * t_stride;
                t_stride *= dim;
            }
        }
        kept_index[i] = k;
        traced_index[i] = t;
    }
    (kept_index, traced_index)
}

/// Free-function forms of the state operations.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    a.tensor(b)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    rho.purify("R")
}

pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.trace_distance(sigma)
}

pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.fidelity(sigma)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.entropy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn qubit(label: &str) -> SystemLayout {
        SystemLayout::single(label, 2).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = DensityMatrix::basis(qubit("A"), 0).unwrap();
        let one = DensityMatrix::basis(qubit("B"), 1).unwrap();
        let t = zero.tensor(&one).unwrap();
        let expected = DensityMatrix::basis(SystemLayout::new([("A", 2), ("B", 2)]).unwrap(), 1).unwrap();
        assert_eq!(t.matrix(), expected.matrix());
        assert_eq!(t.layout().labels().collect::<Vec<_>>(), vec!["A", "B"]);
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        let t = DensityMatrix::maximally_mixed(qubit("A"))
            .tensor(&DensityMatrix::maximally_mixed(qubit("B")))
            .unwrap();
        let quarter = DensityMatrix::maximally_mixed(SystemLayout::single("AB", 4).unwrap());
        assert!(linalg::max_abs_entry(&(t.matrix() - quarter.matrix())) < 1e-15);
    }

    #[test]
    fn tensor_of_diagonals_is_pairwise_product() {
        let a = DensityMatrix::diagonal(qubit("A"), &[0.3, 0.7]).unwrap();
        let b = DensityMatrix::diagonal(qubit("B"), &[0.6, 0.4]).unwrap();
        let t = a.tensor(&b).unwrap();
        // Oracle: p_a[i] * p_b[j] at flat index 2i + j.
        let pa = [0.3, 0.7];
        let pb = [0.6, 0.4];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(t.matrix()[(2 * i + j, 2 * i + j)].re, pa[i] * pb[j], 1e-15));
            }
        }
        let diag: Vec<f64> = t.matrix().diagonal().iter().map(|z| z.re).collect();
        for (x, y) in diag.iter().zip([0.18, 0.12, 0.42, 0.28]) {
            assert!(close(*x, y, 1e-15));
        }
    }

    #[test]
    fn epr_marginal_is_maximally_mixed() {
        let epr = PureState::maximally_entangled("A", "B", 2).unwrap().projector();
        let a = epr.partial_trace(&["A"]).unwrap();
        assert!(linalg::max_abs_entry(&(a.matrix() - linalg::identity(2) * c(0.5, 0.0))) < 1e-15);
        assert_eq!(epr.partial_trace(&["Z"]), Err(Error::LabelNotFound("Z".into())));
    }

    #[test]
    fn product_marginal_recovers_factor() {
        let ra = DensityMatrix::diagonal(qubit("A"), &[0.25, 0.75]).unwrap();
        let rb = DensityMatrix::diagonal(SystemLayout::single("B", 3).unwrap(), &[0.2, 0.3, 0.5]).unwrap();
        let joint = ra.tensor(&rb).unwrap();
        assert!(linalg::max_abs_entry(&(joint.partial_trace(&["A"]).unwrap().matrix() - ra.matrix())) < 1e-15);
        assert!(linalg::max_abs_entry(&(joint.partial_trace(&["B"]).unwrap().matrix() - rb.matrix())) < 1e-15);
    }

    #[test]
    fn diagonal_marginal_matches_double_loop() {
        // p(a, b) on 2 ⊗ 3, flat index 3a + b.
        let p = [0.05, 0.10, 0.15, 0.20, 0.25, 0.25];
        let joint = DensityMatrix::diagonal(SystemLayout::new([("A", 2), ("B", 3)]).unwrap(), &p).unwrap();
        let mut pa = [0.0; 2];
        let mut pb = [0.0; 3];
        for a in 0..2 {
            for b in 0..3 {
                pa[a] += p[3 * a + b];
                pb[b] += p[3 * a + b];
            }
        }
        let ma = joint.partial_trace(&["A"]).unwrap();
        let mb = joint.partial_trace(&["B"]).unwrap();
        for a in 0..2 {
            assert!(close(ma.matrix()[(a, a)].re, pa[a], 1e-15));
        }
        for b in 0..3 {
            assert!(close(mb.matrix()[(b, b)].re, pb[b], 1e-15));
        }
    }

    #[test]
    fn purify_maximally_mixed_is_maximally_entangled() {
        let psi = DensityMatrix::maximally_mixed(qubit("A")).purify("R").unwrap();
        let rho = psi.projector();
        assert!(close(rho.partial_trace(&["R"]).unwrap().entropy(), 1.0, 1e-12));
        assert!(close(rho.entropy(), 0.0, 1e-12));
    }

    #[test]
    fn purify_pure_input_is_product() {
        let psi = DensityMatrix::basis(qubit("A"), 0).unwrap().purify("R").unwrap();
        let rho = psi.projector();
        assert!(close(rho.partial_trace(&["A"]).unwrap().entropy(), 0.0, 1e-12));
    }

    #[test]
    fn purify_diagonal_has_schmidt_coefficients() {
        let rho = DensityMatrix::diagonal(qubit("A"), &[0.7, 0.3]).unwrap();
        let psi = rho.purify("R").unwrap();
        let mut mags: Vec<f64> = psi.amplitudes().iter().map(|z| z.norm()).filter(|m| *m > 1e-12).collect();
        mags.sort_by(f64::total_cmp);
        assert!(close(mags[0], 0.3f64.sqrt(), 1e-12));
        assert!(close(mags[1], 0.7f64.sqrt(), 1e-12));
        let back = psi.projector().partial_trace(&["A"]).unwrap();
        assert!(back.trace_distance(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::diagonal(qubit("A"), &[0.8, 0.2]).unwrap();
        let b = DensityMatrix::diagonal(qubit("A"), &[0.5, 0.5]).unwrap();
        assert!(close(a.trace_distance(&a).unwrap(), 0.0, 1e-15));
        // Oracle: sum of |eigenvalue differences| of commuting states.
        assert!(close(a.trace_distance(&b).unwrap(), 0.3 + 0.3, 1e-12));
        let zero = DensityMatrix::basis(qubit("A"), 0).unwrap();
        let one = DensityMatrix::basis(qubit("A"), 1).unwrap();
        assert!(close(zero.trace_distance(&one).unwrap(), 2.0, 1e-12));
        let big = DensityMatrix::maximally_mixed(SystemLayout::single("A", 3).unwrap());
        assert!(matches!(zero.trace_distance(&big), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fidelity_examples() {
        let zero = DensityMatrix::basis(qubit("A"), 0).unwrap();
        assert!(close(zero.fidelity(&zero).unwrap(), 1.0, 1e-12));
        assert!(close(zero.fidelity(&DensityMatrix::maximally_mixed(qubit("A"))).unwrap(), 0.5, 1e-12));
        let a = DensityMatrix::diagonal(qubit("A"), &[0.8, 0.2]).unwrap();
        let b = DensityMatrix::diagonal(qubit("A"), &[0.5, 0.5]).unwrap();
        // Oracle: classical fidelity (sum_i sqrt(p_i q_i))^2.
        let classical = ((0.8f64 * 0.5).sqrt() + (0.2f64 * 0.5).sqrt()).powi(2);
        assert!(close(a.fidelity(&b).unwrap(), classical, 1e-12));
        assert!(close(classical, 0.9, 1e-12));
    }

    #[test]
    fn entropy_examples() {
        assert!(close(DensityMatrix::maximally_mixed(qubit("A")).entropy(), 1.0, 1e-14));
        assert!(PureState::maximally_entangled("A", "B", 2).unwrap().projector().entropy().abs() < 1e-12);
        let d = DensityMatrix::diagonal(SystemLayout::single("A", 3).unwrap(), &[0.5, 0.25, 0.25]).unwrap();
        assert!(close(d.entropy(), 1.5, 1e-14));
    }

    #[test]
    fn constructor_rejects_invalid_matrices() {
        let l = qubit("A");
        let bad_trace = linalg::real_diagonal(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(bad_trace, l.clone()), Err(Error::BadTrace { .. })));
        let negative = linalg::real_diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(negative, l.clone()), Err(Error::NotPositive { .. })));
        let mut skew = linalg::real_diagonal(&[0.5, 0.5]);
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(skew, l.clone()), Err(Error::NotHermitian { .. })));
        let unnormalized = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(PureState::new(unnormalized, l), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn cq_embedding_is_block_diagonal() {
        let zero = DensityMatrix::basis(qubit("B"), 0).unwrap();
        let mixed = DensityMatrix::maximally_mixed(qubit("B"));
        let cq = CqState::new(vec![0.25, 0.75], vec![zero, mixed]).unwrap();
        let e = cq.embed("X").unwrap();
        assert_eq!(e.layout().dims(), vec![2, 2]);
        assert!(close(e.matrix()[(0, 0)].re, 0.25, 1e-15));
        assert!(close(e.matrix()[(2, 2)].re, 0.375, 1e-15));
        assert_eq!(e.matrix()[(0, 2)], ZERO);
        let x = e.partial_trace(&["X"]).unwrap();
        assert!(close(x.matrix()[(1, 1)].re, 0.75, 1e-15));
        assert!(CqState::new(vec![0.5, 0.6], cq.conditionals().to_vec()).is_err());
    }
}
