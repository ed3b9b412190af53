//! Seeded sweeps of entropy and distance inequalities. Each check reports the
//! largest violation `lhs - rhs` over its samples (negative means slack).

use qbroadcast::info::{conditional_entropy, coherent_information, conditional_mutual_information, mutual_information};
use qbroadcast::linalg::binary_entropy;
use qbroadcast::random::{self, SeededRng};
use qbroadcast::{DensityMatrix, SystemLayout};

pub const SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub violations: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn layout(parts: &[(&str, usize)]) -> SystemLayout {
    SystemLayout::new(parts.iter().map(|(l, d)| (l.to_string(), *d))).unwrap()
}

/// Mixed, low-rank and pure states in rotation.
fn state(rng: &mut SeededRng, l: SystemLayout, i: usize) -> DensityMatrix {
    let d = l.dim();
    match i % 4 {
        0 => random::pure_state(rng, l).projector(),
        1 => random::density_matrix_with_rank(rng, l, 2.min(d)),
        _ => random::density_matrix(rng, l),
    }
}

fn blend(a: &DensityMatrix, b: &DensityMatrix, lambda: f64) -> DensityMatrix {
    DensityMatrix::mixture(&[1.0 - lambda, lambda], &[a.clone(), b.clone()]).unwrap()
}

fn run(name: &'static str, samples: usize, seed: u64, f: impl Fn(&mut SeededRng, usize) -> Option<f64>) -> CheckOutcome {
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut counted = 0;
    for i in 0..samples {
        let mut rng = random::seeded(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64));
        if let Some(v) = f(&mut rng, i) {
            counted += 1;
            worst = worst.max(v);
            if v > SLACK {
                violations += 1;
            }
        }
    }
    CheckOutcome { name, samples: counted, worst, violations }
}

pub fn strong_subadditivity(samples: usize, seed: u64) -> CheckOutcome {
    run("strong subadditivity", samples, seed, |rng, i| {
        let rho = state(rng, layout(&[("A", 2), ("B", 2), ("C", 2)]), i);
        Some(-conditional_mutual_information(&rho, &["A"], &["B"], &["C"]).unwrap())
    })
}

pub fn conditioning_reduces_entropy(samples: usize, seed: u64) -> CheckOutcome {
    run("conditioning reduces entropy", samples, seed, |rng, i| {
        let rho = state(rng, layout(&[("A", 2), ("B", 2), ("C", 2)]), i);
        Some(conditional_entropy(&rho, &["A"], &["B", "C"]).unwrap() - conditional_entropy(&rho, &["A"], &["B"]).unwrap())
    })
}

fn processed_pair(rng: &mut SeededRng, i: usize) -> (DensityMatrix, DensityMatrix) {
    let db = 2 + i % 2;
    let rho = state(rng, layout(&[("A", 2), ("B", db)]), i);
    let ch = random::channel(rng, layout(&[("B", db)]), layout(&[("B", 2)]), 1 + i % 3 + usize::from(db > 2));
    let out = ch.apply_on(&rho, &["B"]).unwrap();
    (rho, out)
}

pub fn data_processing_mutual(samples: usize, seed: u64) -> CheckOutcome {
    run("data processing (mutual information)", samples, seed, |rng, i| {
        let (rho, out) = processed_pair(rng, i);
        Some(mutual_information(&out, &["A"], &["B"]).unwrap() - mutual_information(&rho, &["A"], &["B"]).unwrap())
    })
}

pub fn data_processing_coherent(samples: usize, seed: u64) -> CheckOutcome {
    run("data processing (coherent information)", samples, seed, |rng, i| {
        let (rho, out) = processed_pair(rng, i);
        Some(coherent_information(&out, &["A"], &["B"]).unwrap() - coherent_information(&rho, &["A"], &["B"]).unwrap())
    })
}

pub fn quadripartite(samples: usize, seed: u64) -> CheckOutcome {
    run("quadripartite subadditivity", samples, seed, |rng, i| {
        let rho = state(rng, layout(&[("A1", 2), ("A2", 2), ("B1", 2), ("B2", 2)]), i);
        let joint = conditional_entropy(&rho, &["A1", "A2"], &["B1", "B2"]).unwrap();
        let split = conditional_entropy(&rho, &["A1"], &["B1"]).unwrap() + conditional_entropy(&rho, &["A2"], &["B2"]).unwrap();
        Some(joint - split)
    })
}

fn distance_pair(rng: &mut SeededRng, i: usize) -> (DensityMatrix, DensityMatrix) {
    let d = 2 + i % 3;
    let rho = state(rng, layout(&[("A", d)]), i);
    let other = state(rng, layout(&[("A", d)]), i / 4);
    // alternate far pairs with nearby ones
    let lambda = if i.is_multiple_of(2) { 1.0 } else { 0.05 * rng_unit(rng) };
    (rho.clone(), blend(&rho, &other, lambda))
}

fn rng_unit(rng: &mut SeededRng) -> f64 {
    random::distribution(rng, 2)[0]
}

pub fn fidelity_from_trace_distance(samples: usize, seed: u64) -> CheckOutcome {
    run("F >= 1 - |rho - sigma|_1", samples, seed, |rng, i| {
        let (r, s) = distance_pair(rng, i);
        let f = r.fidelity(&s).unwrap();
        let d = r.trace_distance(&s).unwrap();
        Some((1.0 - d) - f)
    })
}

pub fn trace_distance_from_fidelity(samples: usize, seed: u64) -> CheckOutcome {
    run("|rho - sigma|_1 <= 2 sqrt(1 - F)", samples, seed, |rng, i| {
        let (r, s) = distance_pair(rng, i);
        let f = r.fidelity(&s).unwrap();
        let d = r.trace_distance(&s).unwrap();
        Some(d - 2.0 * (1.0 - f).max(0.0).sqrt())
    })
}

/// Pairs on `A ⊗ B` within trace distance `1/e`.
fn close_bipartite(rng: &mut SeededRng, i: usize) -> Option<(DensityMatrix, DensityMatrix, f64)> {
    let l = layout(&[("A", 2), ("B", 2 + i % 2)]);
    let rho = state(rng, l.clone(), i);
    let tau = state(rng, l, i + 1);
    let lambda = 0.15 * rng_unit(rng);
    let sigma = blend(&rho, &tau, lambda);
    let delta = rho.trace_distance(&sigma).unwrap();
    (delta <= 1.0 / std::f64::consts::E).then_some((rho, sigma, delta))
}

pub fn continuity_conditional(samples: usize, seed: u64) -> CheckOutcome {
    run("continuity of H(A|B) (2, 4)", samples, seed, |rng, i| {
        let (rho, sigma, delta) = close_bipartite(rng, i)?;
        let dim = rho.dim() as f64;
        let gap = (conditional_entropy(&rho, &["A"], &["B"]).unwrap() - conditional_entropy(&sigma, &["A"], &["B"]).unwrap()).abs();
        Some(gap - (2.0 * binary_entropy(delta) + 4.0 * delta * dim.log2()))
    })
}

pub fn continuity_mutual(samples: usize, seed: u64) -> CheckOutcome {
    run("continuity of I(A;B) (3, 6)", samples, seed, |rng, i| {
        let (rho, sigma, delta) = close_bipartite(rng, i)?;
        let dim = rho.dim() as f64;
        let gap = (mutual_information(&rho, &["A"], &["B"]).unwrap() - mutual_information(&sigma, &["A"], &["B"]).unwrap()).abs();
        Some(gap - (3.0 * binary_entropy(delta) + 6.0 * delta * dim.log2()))
    })
}

pub fn effect_expectation_shift(samples: usize, seed: u64) -> CheckOutcome {
    run("tr L sigma >= tr L rho - |rho - sigma|_1", samples, seed, |rng, i| {
        let (rho, sigma) = distance_pair(rng, i);
        let effect = random::effect(rng, rho.dim());
        Some(rho.expectation(&effect) - rho.trace_distance(&sigma).unwrap() - sigma.expectation(&effect))
    })
}

pub fn product_fidelity(samples: usize, seed: u64) -> CheckOutcome {
    run("F(rho, psi ⊗ sigma) lower bound", samples, seed, |rng, i| {
        let la = layout(&[("A", 2)]);
        let lb = layout(&[("B", 2 + i % 2)]);
        let psi = random::pure_state(rng, la.clone());
        let sigma_b = random::density_matrix(rng, lb.clone());
        let target = psi.projector().tensor(&sigma_b).unwrap();
        // perturbations of the product make the bound non-trivial
        let noise = state(rng, la.concat(&lb).unwrap(), i);
        let rho = if i % 3 == 0 { noise } else { blend(&target, &noise, 0.1 * rng_unit(rng)) };
        let sigma = if i % 2 == 0 { sigma_b } else { blend(&sigma_b, &random::density_matrix(rng, lb), 0.1 * rng_unit(rng)) };
        let rho_a = rho.partial_trace(&["A"]).unwrap();
        let rho_b = rho.partial_trace(&["B"]).unwrap();
        let rhs = 1.0 - 3.0 * (1.0 - psi.projector().fidelity(&rho_a).unwrap()) - rho_b.trace_distance(&sigma).unwrap();
        let lhs = rho.fidelity(&psi.projector().tensor(&sigma).unwrap()).unwrap();
        Some(rhs - lhs)
    })
}

/// The checks run by the inequality suite, `samples` states each.
pub fn suite(samples: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![
        strong_subadditivity(samples, seed),
        conditioning_reduces_entropy(samples, seed + 1),
        data_processing_mutual(samples, seed + 2),
        data_processing_coherent(samples, seed + 3),
        quadripartite(samples, seed + 4),
        fidelity_from_trace_distance(samples, seed + 5),
        trace_distance_from_fidelity(samples, seed + 6),
        continuity_conditional(samples, seed + 7),
        continuity_mutual(samples, seed + 8),
        effect_expectation_shift(samples, seed + 9),
        product_fidelity(samples, seed + 10),
    ]
}
