use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pqcsearch::hamiltonian::{exact_ground_energy, PauliSum};
use pqcsearch::metrics::{meyer_wallach, Caps, MetricKind};
use pqcsearch::search::{CircuitSpace, DecisionSpace, ProposerKind, SearchConfig};
use pqcsearch::sim::{fidelity, Circuit, GateKind, PauliString, StateVector};

const N: usize = 4;

fn arb_gate(n: usize) -> impl Strategy<Value = (GateKind, Vec<usize>)> {
    (0..GateKind::ALL.len(), Just(n)).prop_flat_map(|(k, n)| {
        let kind = GateKind::ALL[k];
        let arity = kind.arity().min(n);
        (
            Just(kind),
            Just(arity),
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), arity),
        )
            .prop_flat_map(|(kind, _, qs)| (Just(kind), Just(qs.clone()).prop_shuffle()))
    })
}

fn arb_circuit(n: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(arb_gate(n), 0..max_gates).prop_map(move |gates| {
        let mut c = Circuit::new(n);
        for (kind, qs) in gates {
            if kind.arity() <= n {
                c.push_fresh(kind, &qs);
            }
        }
        c
    })
}

fn arb_theta(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-7.0..7.0f64, len)
}

fn arb_state(n: usize) -> impl Strategy<Value = StateVector> {
    any::<u64>().prop_map(move |s| StateVector::haar_random(n, &mut ChaCha8Rng::seed_from_u64(s)))
}

fn arb_pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    let term = (
        -2.0..2.0f64,
        prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n),
    );
    prop::collection::vec(term, 1..6).prop_map(|ts| {
        PauliSum::new(
            ts.into_iter()
                .map(|(c, ops)| (c, PauliString::new(&ops.into_iter().collect::<String>()).unwrap()))
                .collect(),
        )
        .unwrap()
    })
}

fn random_single_qubit_layer(n: usize, seed: u64) -> (Circuit, Vec<f64>) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push_fresh(GateKind::R, &[q]).push_fresh(GateKind::RZ, &[q]);
    }
    let theta = (0..c.n_params).map(|_| rng.random_range(0.0..6.3)).collect();
    (c, theta)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn circuits_preserve_norm((c, theta, psi) in arb_circuit(N, 12)
        .prop_flat_map(|c| { let p = c.n_params; (Just(c), arb_theta(p), arb_state(N)) }))
    {
        let out = c.apply(&theta, &psi).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn inverse_undoes_circuit((c, theta, psi) in arb_circuit(N, 12)
        .prop_flat_map(|c| { let p = c.n_params; (Just(c), arb_theta(p), arb_state(N)) }))
    {
        let back = c.apply_inverse(&theta, &c.apply(&theta, &psi).unwrap()).unwrap();
        prop_assert!(back.max_distance_up_to_phase(&psi).unwrap() < 1e-10);
        let diff = back.amplitudes().iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in arb_state(3), b in arb_state(3)) {
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_sums_are_hermitian(h in arb_pauli_sum(3)) {
        let m = h.to_dense();
        let d = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn energy_is_linear(h1 in arb_pauli_sum(3), h2 in arb_pauli_sum(3), a in -3.0..3.0f64, psi in arb_state(3)) {
        let lhs = h1.scaled(a).plus(&h2).unwrap().energy(&psi).unwrap();
        let rhs = a * h1.energy(&psi).unwrap() + h2.energy(&psi).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn variational_bound(h in arb_pauli_sum(3), psi in arb_state(3)) {
        let (e0, g) = exact_ground_energy(&h).unwrap();
        prop_assert!(h.energy(&psi).unwrap() >= e0 - 1e-9);
        prop_assert!((h.energy(&g).unwrap() - e0).abs() < 1e-9);
    }

    #[test]
    fn meyer_wallach_is_local_invariant(psi in arb_state(3), seed in any::<u64>()) {
        let (c, theta) = random_single_qubit_layer(3, seed);
        let q = meyer_wallach(&psi);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
        prop_assert!((meyer_wallach(&c.apply(&theta, &psi).unwrap()) - q).abs() < 1e-10);
    }

    #[test]
    fn excitations_conserve_particle_number(bits in 0usize..16, t1 in -4.0..4.0f64, t2 in -4.0..4.0f64, t3 in -4.0..4.0f64) {
        let mut c = Circuit::new(4);
        c.push_fresh(GateKind::SingleExc, &[0, 2])
            .push_fresh(GateKind::DoubleExc, &[0, 1, 2, 3])
            .push_fresh(GateKind::SingleExc, &[3, 1]);
        let psi = StateVector::basis(4, bits);
        let out = c.apply(&[t1, t2, t3], &psi).unwrap();
        let num = PauliSum::number_operator(4);
        prop_assert!((num.energy(&out).unwrap() - bits.count_ones() as f64).abs() < 1e-10);
        for (j, a) in out.amplitudes().iter().enumerate() {
            if j.count_ones() != bits.count_ones() {
                prop_assert!(a.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sampled_circuits_respect_caps(seed in any::<u64>(), theta_max in 1usize..5, g_max in 1usize..7, d_max in 1usize..5) {
        use rand::Rng;
        let cfg = SearchConfig {
            n: 3,
            gate_pool: vec![GateKind::RX, GateKind::RZ, GateKind::CX, GateKind::CRZ, GateKind::R],
            topology: None,
            caps: Caps::new(theta_max, g_max, d_max),
            theta_min: 0,
            n_trials: 1,
            objectives: vec![MetricKind::Expr],
            metric: Default::default(),
            noise: Default::default(),
            observable: None,
            duplicate_prune_limit: 10,
            seed: 0,
            proposer: ProposerKind::Random,
            tpe: Default::default(),
            batch_size: 1,
            spin_conserving_excitations: true,
        };
        let space = CircuitSpace::from_config(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = space.sample(&mut |_, card| rng.random_range(0..card));
        let c = match space.build(&d, 0).unwrap() {
            pqcsearch::search::BuildOutcome::Valid(c) => c,
            pqcsearch::search::BuildOutcome::Invalid { circuit, .. } => circuit,
        };
        c.validate().unwrap();
        prop_assert!(cfg.caps.admits(&c));
        prop_assert!(c.n_params <= theta_max && c.gate_count() <= g_max && c.depth() <= d_max);
    }
}

#[test]
fn haar_single_qubit_purity_at_two_qubits() {
    // Lubkin: E[Tr ρ²] = (d_A + d_B)/(d_A d_B + 1) = 4/5
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let k = 20_000;
    let mut acc = 0.0;
    for _ in 0..k {
        let s = StateVector::haar_random(2, &mut rng);
        let (p0, p1, off) = s.single_qubit_rdm(0);
        acc += p0 * p0 + p1 * p1 + 2.0 * off.norm_sqr();
    }
    let mean = acc / k as f64;
    assert!((mean - 0.8).abs() < 0.02, "{mean}");
}

#[test]
fn ghz_meyer_wallach_is_one() {
    for n in 2..=6 {
        let mut c = Circuit::new(n);
        c.push(GateKind::H, &[0], &[]);
        for q in 1..n {
            c.push(GateKind::CX, &[0, q], &[]);
        }
        let q = meyer_wallach(&c.apply(&[], &StateVector::zero(n)).unwrap());
        assert!((q - 1.0).abs() < 1e-12, "n = {n}: {q}");
    }
}
