use proptest::prelude::*;
use qbroadcast::channel::*;
use qbroadcast::degrade::{degradedness_residual, spanning_probes, DegradingProblem};
use qbroadcast::linalg::{self, c, CMatrix};
use qbroadcast::random;
use qbroadcast::{DensityMatrix, OptimizerConfig, PureState, SystemLayout};

fn qubit(label: &str) -> SystemLayout {
    SystemLayout::single(label, 2).unwrap()
}

/// Largest entry difference of two maps on a spanning probe set.
fn action_gap(a: &KrausChannel, b: &KrausChannel) -> f64 {
    spanning_probes(a.input().dim())
        .iter()
        .map(|p| linalg::max_abs_entry(&(a.apply_matrix(p) - b.apply_matrix(p))))
        .fold(0.0, f64::max)
}

fn plus_state() -> DensityMatrix {
    let m = CMatrix::from_element(2, 2, c(0.5, 0.0));
    DensityMatrix::new(m, qubit(INPUT)).unwrap()
}

/// The basis-register channel `A' -> B` and its complement `A' -> CE`.
fn split_dephasing(spec: &DephasingSpec) -> (impl Fn(&DensityMatrix) -> DensityMatrix, impl Fn(&DensityMatrix) -> DensityMatrix) {
    let full = spec.isometric_extension().unwrap().as_channel().unwrap();
    let full2 = full.clone();
    (
        move |rho: &DensityMatrix| full.apply(rho).unwrap().partial_trace(&[BOB]).unwrap(),
        move |rho: &DensityMatrix| full2.apply(rho).unwrap().partial_trace(&[CHARLIE, ENV]).unwrap(),
    )
}

fn random_spec(seed: u64) -> DephasingSpec {
    let mut rng = random::seeded(seed);
    let nx = 2 + (seed % 3) as usize;
    let env = SystemLayout::new([(CHARLIE, 2), (ENV, 2)]).unwrap();
    DephasingSpec::new((0..nx).map(|_| random::pure_state(&mut rng, env.clone())).collect()).unwrap()
}

#[test]
fn identity_channel_fixes_states() {
    let mut rng = random::seeded(1);
    let rho = random::density_matrix(&mut rng, SystemLayout::single(INPUT, 3).unwrap());
    let out = KrausChannel::identity(rho.layout().clone()).apply(&rho).unwrap();
    assert!(linalg::max_abs_entry(&(out.matrix() - rho.matrix())) < 1e-14);
}

#[test]
fn dephasing_qubit_channel_sends_plus_to_maximally_mixed() {
    let out = KrausChannel::completely_dephasing(qubit(INPUT)).apply(&plus_state()).unwrap();
    assert!(linalg::max_abs_entry(&(out.matrix() - linalg::identity(2) * c(0.5, 0.0))) < 1e-15);
}

#[test]
fn pinching_zero_pattern() {
    let (to_b, _) = make_pinching().marginals();
    let rho = DensityMatrix::new(CMatrix::from_element(3, 3, c(1.0 / 3.0, 0.0)), SystemLayout::single(INPUT, 3).unwrap()).unwrap();
    let out = to_b.apply(&rho).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let zeroed = (i == 2) != (j == 2);
            let expected = if zeroed { 0.0 } else { 1.0 / 3.0 };
            assert!((out.matrix()[(i, j)] - c(expected, 0.0)).norm() < 1e-14, "entry ({i},{j})");
        }
    }
}

#[test]
fn completely_dephase_examples() {
    let layout = SystemLayout::single(INPUT, 3).unwrap();
    let diag = DensityMatrix::diagonal(layout.clone(), &[0.2, 0.3, 0.5]).unwrap();
    let fixed = completely_dephase(&diag, INPUT).unwrap();
    assert!(linalg::max_abs_entry(&(fixed.matrix() - diag.matrix())) < 1e-15);

    let plus = completely_dephase(&plus_state(), INPUT).unwrap();
    assert!(linalg::max_abs_entry(&(plus.matrix() - linalg::identity(2) * c(0.5, 0.0))) < 1e-15);

    let rho = random::density_matrix(&mut random::seeded(2), layout);
    let out = completely_dephase(&rho, INPUT).unwrap();
    let mask = CMatrix::from_fn(3, 3, |i, j| if i == j { rho.matrix()[(i, i)] } else { c(0.0, 0.0) });
    assert!(linalg::max_abs_entry(&(out.matrix() - mask)) < 1e-15);
    assert!(completely_dephase(&rho, "Z").is_err());
}

#[test]
fn completely_dephase_acts_on_one_factor() {
    let mut rng = random::seeded(3);
    let rho = random::density_matrix(&mut rng, SystemLayout::new([(BOB, 2), (CHARLIE, 3)]).unwrap());
    let out = completely_dephase(&rho, BOB).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let same_b = i / 3 == j / 3;
            let expected = if same_b { rho.matrix()[(i, j)] } else { c(0.0, 0.0) };
            assert!((out.matrix()[(i, j)] - expected).norm() < 1e-15);
        }
    }
}

#[test]
fn extension_of_identity_has_trivial_environment() {
    let id = KrausChannel::identity(qubit(INPUT));
    let ext = id.isometric_extension(ENV).unwrap();
    assert_eq!(ext.env().dim(), 1);
    assert!(linalg::max_abs_entry(&(ext.isometry() - linalg::identity(2))) < 1e-15);
}

#[test]
fn dephasing_extension_has_block_form() {
    let spec = random_spec(4);
    let ext = spec.isometric_extension().unwrap();
    let de = spec.env_layout().dim();
    let v = ext.isometry();
    for x in 0..spec.basis_size() {
        for b in 0..spec.basis_size() {
            for e in 0..de {
                let expected = if b == x { spec.env_vectors()[x].amplitudes()[e] } else { c(0.0, 0.0) };
                assert!((v[(b * de + e, x)] - expected).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn two_kraus_extension_reconstructs_the_channel() {
    let mut rng = random::seeded(5);
    let ch = random::channel(&mut rng, qubit(INPUT), qubit(BOB), 2);
    let ext = ch.isometric_extension(ENV).unwrap();
    let vv = ext.isometry().adjoint() * ext.isometry();
    assert!(linalg::max_abs_entry(&(vv - linalg::identity(2))) < 1e-9);
    for _ in 0..20 {
        let rho = random::density_matrix(&mut rng, qubit(INPUT));
        let full = ext.apply_full(&rho).unwrap();
        let reduced = full.partial_trace(&[BOB]).unwrap();
        let direct = ch.apply(&rho).unwrap();
        assert!(linalg::max_abs_entry(&(reduced.matrix() - direct.matrix())) < 1e-8);
    }
}

#[test]
fn complementary_of_identity_is_constant() {
    let comp = KrausChannel::identity(qubit(INPUT)).complementary(ENV).unwrap();
    assert_eq!(comp.output().dim(), 1);
    let out = comp.apply(&plus_state()).unwrap();
    assert!((out.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn complementary_of_dephasing_prepares_environment_states() {
    let spec = random_spec(6);
    let (_, comp) = split_dephasing(&spec);
    let nx = spec.basis_size();
    let rho = random::density_matrix(&mut random::seeded(7), SystemLayout::single(INPUT, nx).unwrap());
    let out = comp(&rho);
    let weights: Vec<f64> = (0..nx).map(|x| rho.matrix()[(x, x)].re).collect();
    let expected = DensityMatrix::mixture(&weights, &spec.env_states()).unwrap();
    assert!(linalg::max_abs_entry(&(out.matrix() - expected.matrix())) < 1e-12);
}

#[test]
fn complementary_outputs_share_entropy_on_pure_inputs() {
    let mut rng = random::seeded(8);
    for _ in 0..10 {
        let ch = random::channel(&mut rng, SystemLayout::single(INPUT, 3).unwrap(), qubit(BOB), 3);
        let comp = ch.complementary(ENV).unwrap();
        let psi = random::pure_state(&mut rng, SystemLayout::single(INPUT, 3).unwrap()).projector();
        let hb = ch.apply(&psi).unwrap().entropy();
        let he = comp.apply(&psi).unwrap().entropy();
        assert!((hb - he).abs() < 1e-9, "{hb} vs {he}");
    }
}

#[test]
fn trivial_charlie_marginal_is_the_channel() {
    let bc = make_identity_to_bob(2);
    let (to_b, to_c) = bc.marginals();
    assert!(action_gap(&to_b, &KrausChannel::identity(qubit(INPUT))) < 1e-14);
    assert_eq!(to_c.output().dim(), 1);
}

#[test]
fn ghz_copy_marginals_dephase() {
    let (to_b, to_c) = make_ghz_copy().marginals();
    let deph = KrausChannel::completely_dephasing(qubit(INPUT));
    assert!(action_gap(&to_b, &deph) < 1e-14);
    assert!(action_gap(&to_c, &deph) < 1e-14);
}

#[test]
fn pinching_extension_marginal_is_pinching() {
    let bc = make_pinching();
    assert_eq!((bc.b_dim(), bc.c_dim()), (3, 2));
    let (to_b, _) = bc.marginals();
    let probes = spanning_probes(3);
    for p in &probes {
        let out = to_b.apply_matrix(p);
        let expected = CMatrix::from_fn(3, 3, |i, j| if (i == 2) == (j == 2) { p[(i, j)] } else { c(0.0, 0.0) });
        assert!(linalg::max_abs_entry(&(out - expected)) < 1e-14);
    }
}

#[test]
fn dephasing_constructor_extremes() {
    let cl = SystemLayout::single(CHARLIE, 3).unwrap();
    let same = PureState::basis(cl.clone(), 0).unwrap();
    let equal = make_generalized_dephasing(DephasingSpec::new(vec![same.clone(), same.clone(), same]).unwrap()).unwrap();
    let id3 = KrausChannel::identity(SystemLayout::single(INPUT, 3).unwrap());
    assert!(action_gap(&equal.marginals().0, &id3) < 1e-14);

    let ortho: Vec<_> = (0..3).map(|x| PureState::basis(cl.clone(), x).unwrap()).collect();
    let full = make_generalized_dephasing(DephasingSpec::new(ortho).unwrap()).unwrap();
    let deph = KrausChannel::completely_dephasing(SystemLayout::single(INPUT, 3).unwrap());
    assert!(action_gap(&full.marginals().0, &deph) < 1e-14);
}

#[test]
fn dephasing_spec_rejects_unnormalized_vectors() {
    let cl = qubit(CHARLIE);
    let v = qbroadcast::linalg::CVector::from_vec(vec![c(1.0, 0.0), c(0.5, 0.0)]);
    assert!(PureState::new(v, cl).is_err());
}

#[test]
fn pinching_action_on_matrix_units() {
    let (to_b, _) = make_pinching().marginals();
    let diag = linalg::real_diagonal(&[0.2, 0.3, 0.5]);
    assert!(linalg::max_abs_entry(&(to_b.apply_matrix(&diag) - &diag)) < 1e-15);
    let e01 = linalg::matrix_unit(3, 0, 1);
    assert!(linalg::max_abs_entry(&(to_b.apply_matrix(&e01) - &e01)) < 1e-15);
    let e02 = linalg::matrix_unit(3, 0, 2);
    assert!(linalg::max_abs_entry(&to_b.apply_matrix(&e02)) < 1e-15);
}

#[test]
fn equal_marginals_are_degraded_with_small_residual() {
    let cfg = OptimizerConfig { restarts: 2, ..OptimizerConfig::default() };
    let report = degradedness_residual(&DegradingProblem::from_broadcast(&make_ghz_copy()).unwrap(), 2, &cfg).unwrap();
    assert!(report.certified, "residual {}", report.residual);
}

fn eq3_gap(seed: u64) -> f64 {
    let spec = random_spec(seed);
    let (_, comp) = split_dephasing(&spec);
    let nx = spec.basis_size();
    let layout = SystemLayout::single(INPUT, nx).unwrap();
    spanning_probes(nx)
        .into_iter()
        .map(|p| {
            let rho = DensityMatrix::new(p, layout.clone()).unwrap();
            let dephased = completely_dephase(&rho, INPUT).unwrap();
            let a = comp(&dephased);
            let b = comp(&rho);
            linalg::max_abs_entry(&(a.matrix() - b.matrix()))
        })
        .fold(0.0, f64::max)
}

fn eq4_slack(seed: u64) -> f64 {
    let spec = random_spec(seed);
    let (to_b, _) = split_dephasing(&spec);
    let layout = SystemLayout::single(INPUT, spec.basis_size()).unwrap();
    let rho = random::density_matrix(&mut random::seeded(seed ^ 0xabcdef), layout);
    completely_dephase(&rho, INPUT).unwrap().entropy() - to_b(&rho).entropy()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn environment_ignores_coherences(seed in any::<u64>()) {
        prop_assert!(eq3_gap(seed) <= 1e-9);
    }

    #[test]
    fn dephasing_output_entropy_is_at_most_the_dephased_input(seed in any::<u64>()) {
        prop_assert!(eq4_slack(seed) >= -1e-9);
    }

    #[test]
    fn stinespring_reconstruction(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, nk in 1usize..4) {
        prop_assume!(dout * nk >= din);
        let mut rng = random::seeded(seed);
        let ch = random::channel(&mut rng, SystemLayout::single(INPUT, din).unwrap(), SystemLayout::single(BOB, dout).unwrap(), nk);
        let ext = ch.isometric_extension(ENV).unwrap();
        let rho = random::density_matrix(&mut rng, ch.input().clone());
        let reduced = ext.apply_full(&rho).unwrap().partial_trace(&[BOB]).unwrap();
        let direct = ch.apply(&rho).unwrap();
        prop_assert!(linalg::max_abs_entry(&(reduced.matrix() - direct.matrix())) <= 1e-8);
    }

    #[test]
    fn marginals_commute_with_partial_trace(seed in any::<u64>(), db in 1usize..4, dc in 1usize..4) {
        let mut rng = random::seeded(seed);
        let out = SystemLayout::new([(BOB, db), (CHARLIE, dc)]).unwrap();
        let bc = BroadcastChannel::new(random::channel(&mut rng, qubit(INPUT), out, 2)).unwrap();
        let (to_b, to_c) = bc.marginals();
        let rho = random::density_matrix(&mut rng, qubit(INPUT));
        let joint = bc.channel().apply(&rho).unwrap();
        let b = joint.partial_trace(&[BOB]).unwrap();
        let cc = joint.partial_trace(&[CHARLIE]).unwrap();
        prop_assert!(linalg::max_abs_entry(&(b.matrix() - to_b.apply(&rho).unwrap().matrix())) <= 1e-9);
        prop_assert!(linalg::max_abs_entry(&(cc.matrix() - to_c.apply(&rho).unwrap().matrix())) <= 1e-9);
    }

    #[test]
    fn kraus_channels_preserve_trace(seed in any::<u64>(), din in 1usize..5, dout in 1usize..5, nk in 1usize..5) {
        prop_assume!(dout * nk >= din);
        let mut rng = random::seeded(seed);
        let ch = random::channel(&mut rng, SystemLayout::single(INPUT, din).unwrap(), SystemLayout::single(BOB, dout).unwrap(), nk);
        let rho = random::density_matrix(&mut rng, ch.input().clone());
        let out = ch.apply(&rho).unwrap();
        prop_assert!((linalg::trace(out.matrix()).re - 1.0).abs() <= 1e-9);
    }
}
