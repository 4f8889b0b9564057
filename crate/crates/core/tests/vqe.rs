use std::path::PathBuf;

use pqcsearch::hamiltonian::{exact_ground_energy, load_pauli_sum, PauliSum};
use pqcsearch::sim::Circuit;
use pqcsearch::vqe::{geometry_sweep, h2_excitation_ansatz, prepare_reference, run_vqe, InitParams, VqeConfig};

// FCI energies from an independent quantum-chemistry package (RHF/STO-3G, Hartree)
const H2_FCI: [(&str, f64); 5] = [
    ("0.50", -1.05515979),
    ("0.75", -1.13711707),
    ("1.00", -1.10115033),
    ("1.50", -0.99814935),
    ("2.00", -0.94864111),
];

fn data(bond: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../data/h2_sto3g_{bond}.txt"))
}

fn cfg(h: PathBuf) -> VqeConfig {
    VqeConfig {
        hamiltonian: h,
        ansatz: h2_excitation_ansatz(),
        reference: "1010".into(),
        init: InitParams::Zeros,
        optimizer: Default::default(),
        seed: 0,
    }
}

#[test]
fn shipped_hamiltonians_match_fci() {
    for (bond, fci) in H2_FCI {
        let h = load_pauli_sum(data(bond)).unwrap();
        assert_eq!(h.n_qubits(), 4);
        let (e0, _) = exact_ground_energy(&h).unwrap();
        assert!((e0 - fci).abs() < 1e-7, "{bond}: {e0} vs {fci}");
    }
}

#[test]
fn hartree_fock_energy_at_equilibrium() {
    let h = load_pauli_sum(data("0.75")).unwrap();
    let e = h.energy(&prepare_reference("1010").unwrap()).unwrap();
    assert!((e - -1.11615145).abs() < 1e-7, "{e}");
}

#[test]
fn geometry_sweep_reaches_every_ground_state() {
    let paths: Vec<PathBuf> = H2_FCI.iter().map(|(b, _)| data(b)).collect();
    let traces = geometry_sweep(&cfg(paths[0].clone()), &paths).unwrap();
    assert_eq!(traces.len(), paths.len());
    for ((bond, _), t) in H2_FCI.iter().zip(&traces) {
        assert!(t.gap.abs() < 1e-3, "{bond}: gap {}", t.gap);
        assert!(t.iterations.iter().all(|i| i.energy >= t.exact_energy - 1e-9), "{bond}");
    }
}

#[test]
fn uniform_start_is_seeded() {
    let mut c = cfg(data("1.00"));
    c.init = InitParams::Uniform;
    c.seed = 3;
    let a = run_vqe(&c).unwrap();
    let b = run_vqe(&c).unwrap();
    assert_eq!(a, b);
    assert!(a.iterations.iter().all(|i| i.energy >= a.exact_energy - 1e-9));
}

#[test]
fn ansatz_without_double_cannot_reach_correlated_ground_state() {
    let mut singles = Circuit::new(4);
    singles
        .push_fresh(pqcsearch::GateKind::SingleExc, &[0, 1])
        .push_fresh(pqcsearch::GateKind::SingleExc, &[2, 3]);
    let mut c = cfg(data("2.00"));
    c.ansatz = singles;
    let t = run_vqe(&c).unwrap();
    assert!(t.gap > 1e-2, "gap {}", t.gap);
}

#[test]
fn particle_number_of_vqe_state() {
    let h = load_pauli_sum(data("0.75")).unwrap();
    let c = cfg(data("0.75"));
    let t = run_vqe(&c).unwrap();
    let psi = c
        .ansatz
        .apply(&t.final_theta, &prepare_reference("1010").unwrap())
        .unwrap();
    let num = PauliSum::number_operator(4);
    assert!((num.energy(&psi).unwrap() - 2.0).abs() < 1e-10);
    assert!((h.energy(&psi).unwrap() - t.final_energy).abs() < 1e-12);
}
