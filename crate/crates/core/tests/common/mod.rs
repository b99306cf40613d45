//! Shared instance generators and independent oracles for the acceptance
//! suite. Everything is seeded so the panels are identical on every run.

use clockham::circuit::{Circuit, Gate, GateKind, StateVector};
use clockham::linalg;
use clockham::rng::SplitMix64;
use clockham::sat::CnfFormula;
use ndarray::Array2;
use num_complex::Complex64 as C64;

pub const ONE_QUBIT_GATES: [GateKind; 7] = [
    GateKind::I,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::T,
];
pub const TWO_QUBIT_GATES: [GateKind; 3] = [GateKind::Cnot, GateKind::Cz, GateKind::Swap];
/// Diagonal single-qubit gates: these never change a computational-basis
/// value, so circuits built from them on the output qubit reject or accept
/// deterministically.
pub const DIAGONAL_GATES: [GateKind; 4] = [GateKind::I, GateKind::Z, GateKind::S, GateKind::T];

pub fn random_gate_on(qubits: &[usize], m: usize, rng: &mut SplitMix64) -> Gate {
    if qubits.len() >= 2 && rng.next_f64() < 0.4 {
        let a = qubits[rng.next_index(qubits.len())];
        let mut b = qubits[rng.next_index(qubits.len())];
        while b == a {
            b = qubits[rng.next_index(qubits.len())];
        }
        Gate::new(TWO_QUBIT_GATES[rng.next_index(TWO_QUBIT_GATES.len())], &[a, b]).unwrap()
    } else {
        let q = qubits[rng.next_index(qubits.len())];
        let _ = m;
        Gate::new(ONE_QUBIT_GATES[rng.next_index(ONE_QUBIT_GATES.len())], &[q]).unwrap()
    }
}

/// A fully random circuit with n = 1 input bit "0".
pub fn random_circuit(m: usize, t: usize, rng: &mut SplitMix64) -> Circuit {
    let all: Vec<usize> = (0..m).collect();
    let gates: Vec<Gate> = (0..t).map(|_| random_gate_on(&all, m, rng)).collect();
    Circuit::new(m, "0", gates, 0).unwrap()
}

/// A circuit that accepts with probability exactly 1 for every witness: the
/// first gate flips the output qubit to |1⟩ and the remaining gates either
/// avoid qubit 0 or act diagonally on it.
pub fn exactly_accepting_circuit(m: usize, t: usize, rng: &mut SplitMix64) -> Circuit {
    let mut gates = vec![Gate::new(GateKind::X, &[0]).unwrap()];
    let others: Vec<usize> = (1..m).collect();
    for _ in 1..t {
        if !others.is_empty() && rng.next_f64() < 0.7 {
            gates.push(random_gate_on(&others, m, rng));
        } else {
            gates.push(
                Gate::new(
                    DIAGONAL_GATES[rng.next_index(DIAGONAL_GATES.len())],
                    &[0],
                )
                .unwrap(),
            );
        }
    }
    Circuit::new(m, "0", gates, 0).unwrap()
}

/// A circuit that rejects deterministically for every witness: input bit 0 is
/// "0" and no gate can change the output qubit's value (diagonal gates on
/// qubit 0, anything elsewhere).
pub fn deterministically_rejecting_circuit(m: usize, t: usize, rng: &mut SplitMix64) -> Circuit {
    let others: Vec<usize> = (1..m).collect();
    let gates: Vec<Gate> = (0..t)
        .map(|_| {
            if !others.is_empty() && rng.next_f64() < 0.6 {
                random_gate_on(&others, m, rng)
            } else if m >= 2 && rng.next_f64() < 0.3 {
                // CZ touching qubit 0 stays diagonal on it
                let other = 1 + rng.next_index(m - 1);
                Gate::new(GateKind::Cz, &[0, other]).unwrap()
            } else {
                Gate::new(
                    DIAGONAL_GATES[rng.next_index(DIAGONAL_GATES.len())],
                    &[0],
                )
                .unwrap()
            }
        })
        .collect();
    Circuit::new(m, "0", gates, 0).unwrap()
}

pub fn random_state(m: usize, rng: &mut SplitMix64) -> StateVector {
    let dim = 1usize << m;
    let mut amps: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.next_symmetric(), rng.next_symmetric()))
        .collect();
    let norm = linalg::norm2(&amps);
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(m, amps).unwrap()
}

/// The witness maximizing the acceptance probability: top eigenvector of the
/// acceptance Gram operator.
pub fn best_witness(circuit: &Circuit) -> StateVector {
    let gram = clockham::circuit::acceptance_operator(circuit).unwrap();
    let (vals, vecs) = linalg::eigh(&gram).unwrap();
    let top = vals.len() - 1;
    let mut amps: Vec<C64> = vecs.column(top).to_vec();
    let norm = linalg::norm2(&amps);
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(circuit.witness_qubits(), amps).unwrap()
}

/// Random PSD matrix of operator norm 1 whose null space has dimension at
/// least `dim - rank`.
pub fn random_psd_with_null(dim: usize, rank: usize, rng: &mut SplitMix64) -> Array2<C64> {
    let mut b = Array2::zeros((rank, dim));
    for i in 0..rank {
        for j in 0..dim {
            b[(i, j)] = C64::new(rng.next_symmetric(), rng.next_symmetric());
        }
    }
    let psd = linalg::mat_mul(&linalg::adjoint(&b), &b);
    let vals = linalg::eigvalsh(&psd).unwrap();
    let top = vals[vals.len() - 1].max(1e-12);
    psd.mapv(|z| z / top)
}

/// Random PSD local-term matrix with norm at most 1.
pub fn random_psd_term_matrix(dim: usize, rng: &mut SplitMix64) -> Array2<C64> {
    let mut b = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            b[(i, j)] = C64::new(rng.next_symmetric(), rng.next_symmetric());
        }
    }
    let psd = linalg::mat_mul(&linalg::adjoint(&b), &b);
    let vals = linalg::eigvalsh(&psd).unwrap();
    let scale = vals[vals.len() - 1].max(1e-12) * (1.0 + rng.next_f64());
    psd.mapv(|z| z / scale)
}

/// Random CNF formula with distinct variables per clause.
pub fn random_formula(n_vars: usize, n_clauses: usize, rng: &mut SplitMix64) -> CnfFormula {
    let clauses: Vec<Vec<i32>> = (0..n_clauses)
        .map(|_| {
            let width = 1 + rng.next_index(3.min(n_vars));
            let mut vars: Vec<usize> = (1..=n_vars).collect();
            for i in 0..width {
                let j = i + rng.next_index(n_vars - i);
                vars.swap(i, j);
            }
            vars[..width]
                .iter()
                .map(|&v| if rng.next_f64() < 0.5 { v as i32 } else { -(v as i32) })
                .collect()
        })
        .collect();
    CnfFormula::new(n_vars, clauses).unwrap()
}

/// Exhaustive oracle: minimum number of unsatisfied clauses over all
/// assignments.
pub fn brute_force_min_unsat(formula: &CnfFormula) -> usize {
    (0..(1usize << formula.n_vars()))
        .map(|z| formula.unsatisfied_count(z))
        .min()
        .unwrap()
}

pub fn report(number: usize, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance criterion {number:2} [{}] {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}
