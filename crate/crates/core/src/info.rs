//! Entropic functionals on labelled states. All values are in bits.

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::state::{CqState, DensityMatrix};

/// `H(labels)`; the empty set has zero entropy.
pub fn entropy_of(rho: &DensityMatrix, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(rho.partial_trace(labels)?.entropy())
}

fn check_disjoint(rho: &DensityMatrix, sets: &[&[&str]]) -> Result<()> {
    for (i, set) in sets.iter().enumerate() {
        for l in *set {
            rho.layout().position(l)?;
            if set.iter().filter(|m| *m == l).count() > 1 {
                return Err(Error::OverlappingLabels(l.to_string()));
            }
            for other in &sets[i + 1..] {
                if other.contains(l) {
                    return Err(Error::OverlappingLabels(l.to_string()));
                }
            }
        }
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b.iter()).copied().collect()
}

/// `H(A|B) = H(AB) - H(B)`.
pub fn conditional_entropy(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(rho, &[a, b])?;
    Ok(entropy_of(rho, &union(a, b))? - entropy_of(rho, b)?)
}

/// `I(A>B) = -H(A|B)`.
pub fn coherent_information(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    Ok(-conditional_entropy(rho, a, b)?)
}

/// `I(A;B) = H(A) + H(B) - H(AB)`.
pub fn mutual_information(rho: &DensityMatrix, a: &[&str], b: &[&str]) -> Result<f64> {
    check_disjoint(rho, &[a, b])?;
    Ok(entropy_of(rho, a)? + entropy_of(rho, b)? - entropy_of(rho, &union(a, b))?)
}

/// `I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)`.
pub fn conditional_mutual_information(rho: &DensityMatrix, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    check_disjoint(rho, &[a, b, c])?;
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    Ok(entropy_of(rho, &ac)? + entropy_of(rho, &bc)? - entropy_of(rho, &abc)? - entropy_of(rho, c)?)
}

/// `I_c(rho, N) = I(R>B)` evaluated on `(id ⊗ N)(phi)` for a purification `phi`
/// of `rho` with reference `R`.
pub fn channel_coherent_information(rho_in: &DensityMatrix, ch: &KrausChannel) -> Result<f64> {
    if rho_in.layout().dims() != ch.input().dims() {
        return Err(Error::DimensionMismatch { expected: ch.input().dim(), found: rho_in.dim() });
    }
    let reference = fresh_label("R", rho_in, ch);
    let phi = rho_in.purify(&reference)?.projector();
    let inputs: Vec<&str> = rho_in.layout().labels().collect();
    let out = ch.apply_on(&phi, &inputs)?;
    let outputs: Vec<&str> = ch.output().labels().collect();
    coherent_information(&out, &[reference.as_str()], &outputs)
}

fn fresh_label(base: &str, rho: &DensityMatrix, ch: &KrausChannel) -> String {
    let mut label = base.to_string();
    while rho.layout().contains(&label) || ch.output().contains(&label) {
        label.push('\'');
    }
    label
}

/// Holevo quantity `I(X;Q) = H(sum_x p_x rho_x^Q) - sum_x p_x H(rho_x^Q)`
/// computed blockwise; `q_labels` selects the quantum subsystems.
pub fn holevo_information(cq: &CqState, q_labels: &[&str]) -> Result<f64> {
    let reduced = cq
        .conditionals()
        .iter()
        .map(|r| r.partial_trace(q_labels))
        .collect::<Result<Vec<_>>>()?;
    let avg = DensityMatrix::mixture(cq.weights(), &reduced)?;
    let inner: f64 = cq.weights().iter().zip(&reduced).map(|(p, r)| p * r.entropy()).sum();
    Ok(avg.entropy() - inner)
}

/// The same quantity through the full block-diagonal embedding.
pub fn holevo_information_embedded(cq: &CqState, x_label: &str, q_labels: &[&str]) -> Result<f64> {
    let embedded = cq.embed(x_label)?;
    mutual_information(&embedded, &[x_label], q_labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::SystemLayout;
    use crate::linalg::{binary_entropy, CVector};
    use crate::state::PureState;

    fn epr() -> DensityMatrix {
        PureState::maximally_entangled("A", "B", 2).unwrap().projector()
    }

    fn ghz() -> DensityMatrix {
        let layout = SystemLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let mut v = CVector::zeros(8);
        v[0] = crate::linalg::c(0.5f64.sqrt(), 0.0);
        v[7] = crate::linalg::c(0.5f64.sqrt(), 0.0);
        PureState::new(v, layout).unwrap().projector()
    }

    #[test]
    fn epr_conditional_entropy_is_minus_one() {
        assert!((conditional_entropy(&epr(), &["A"], &["B"]).unwrap() + 1.0).abs() < 1e-12);
        assert!((coherent_information(&epr(), &["A"], &["B"]).unwrap() - 1.0).abs() < 1e-12);
        assert!((mutual_information(&epr(), &["A"], &["B"]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_quantities() {
        let a = DensityMatrix::diagonal(SystemLayout::single("A", 2).unwrap(), &[0.25, 0.75]).unwrap();
        let b = DensityMatrix::diagonal(SystemLayout::single("B", 2).unwrap(), &[0.5, 0.5]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let ha = binary_entropy(0.25);
        assert!((conditional_entropy(&ab, &["A"], &["B"]).unwrap() - ha).abs() < 1e-12);
        assert!((coherent_information(&ab, &["A"], &["B"]).unwrap() + ha).abs() < 1e-12);
        assert!(mutual_information(&ab, &["A"], &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn classically_correlated_bits_have_zero_conditional_entropy() {
        let layout = SystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = DensityMatrix::diagonal(layout, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        // Shannon oracle: H(A|B) = sum_b p(b) H(A|B=b) = 0.
        assert!(conditional_entropy(&rho, &["A"], &["B"]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ghz_quantities() {
        let g = ghz();
        // H(BC) - H(ABC) = 1 - 0.
        assert!((coherent_information(&g, &["A"], &["B", "C"]).unwrap() - 1.0).abs() < 1e-12);
        // H(AC) + H(BC) - H(ABC) - H(C) = 1 + 1 - 0 - 1.
        assert!((conditional_mutual_information(&g, &["A"], &["B"], &["C"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bsc_mutual_information_matches_shannon() {
        let f = 0.11;
        let layout = SystemLayout::new([("X", 2), ("Y", 2)]).unwrap();
        let rho = DensityMatrix::diagonal(layout, &[0.5 * (1.0 - f), 0.5 * f, 0.5 * f, 0.5 * (1.0 - f)]).unwrap();
        let shannon = 1.0 - binary_entropy(f);
        assert!((mutual_information(&rho, &["X"], &["Y"]).unwrap() - shannon).abs() < 1e-12);
        assert!((shannon - 0.5).abs() < 1e-3);
    }

    #[test]
    fn decoupled_and_trivial_conditioners() {
        let c = DensityMatrix::diagonal(SystemLayout::single("C", 2).unwrap(), &[0.4, 0.6]).unwrap();
        let abc = epr().tensor(&c).unwrap();
        let cmi = conditional_mutual_information(&abc, &["A"], &["B"], &["C"]).unwrap();
        assert!((cmi - 2.0).abs() < 1e-12);
        let trivial = epr().tensor(&DensityMatrix::maximally_mixed(SystemLayout::single("T", 1).unwrap())).unwrap();
        let cmi = conditional_mutual_information(&trivial, &["A"], &["B"], &["T"]).unwrap();
        assert!((cmi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_labels_are_rejected() {
        assert_eq!(
            mutual_information(&epr(), &["A"], &["A", "B"]),
            Err(Error::OverlappingLabels("A".into()))
        );
        assert_eq!(
            conditional_mutual_information(&ghz(), &["A"], &["B"], &["B"]),
            Err(Error::OverlappingLabels("B".into()))
        );
        assert_eq!(conditional_entropy(&epr(), &["Q"], &["B"]), Err(Error::LabelNotFound("Q".into())));
    }

    #[test]
    fn channel_coherent_information_examples() {
        let q = SystemLayout::single("A'", 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(q.clone());
        let id = KrausChannel::identity(q.clone());
        assert!((channel_coherent_information(&mixed, &id).unwrap() - 1.0).abs() < 1e-12);
        let deph = KrausChannel::completely_dephasing(q.clone());
        // Dephased EPR is diag(1/2, 0, 0, 1/2): H(B) - H(RB) = 1 - 1.
        assert!(channel_coherent_information(&mixed, &deph).unwrap().abs() < 1e-12);
        let input = DensityMatrix::diagonal(q.clone(), &[0.8, 0.2]).unwrap();
        let constant = KrausChannel::constant(q, &DensityMatrix::basis(SystemLayout::single("B", 2).unwrap(), 0).unwrap());
        let ic = channel_coherent_information(&input, &constant).unwrap();
        assert!((ic + binary_entropy(0.2)).abs() < 1e-12);
    }

    #[test]
    fn holevo_examples() {
        let l = SystemLayout::single("Q", 2).unwrap();
        let zero = DensityMatrix::basis(l.clone(), 0).unwrap();
        let one = DensityMatrix::basis(l.clone(), 1).unwrap();
        let plus = PureState::normalized(
            CVector::from_vec(vec![crate::linalg::c(1.0, 0.0), crate::linalg::c(1.0, 0.0)]),
            l.clone(),
        )
        .unwrap()
        .projector();
        let orth = CqState::new(vec![0.5, 0.5], vec![zero.clone(), one]).unwrap();
        assert!((holevo_information(&orth, &["Q"]).unwrap() - 1.0).abs() < 1e-12);
        let same = CqState::new(vec![0.3, 0.7], vec![zero.clone(), zero.clone()]).unwrap();
        assert!(holevo_information(&same, &["Q"]).unwrap().abs() < 1e-12);
        let bb84 = CqState::new(vec![0.5, 0.5], vec![zero, plus]).unwrap();
        // Average state has eigenvalues cos^2(pi/8), sin^2(pi/8).
        let expected = binary_entropy((std::f64::consts::PI / 8.0).cos().powi(2));
        assert!((holevo_information(&bb84, &["Q"]).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.6009).abs() < 1e-4);
        for cq in [&orth, &same, &bb84] {
            let a = holevo_information(cq, &["Q"]).unwrap();
            let b = holevo_information_embedded(cq, "X", &["Q"]).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
}
