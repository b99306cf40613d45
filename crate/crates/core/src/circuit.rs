//! Quantum circuit representation and exact statevector simulation.
//!
//! A circuit is an ordered list of one- and two-qubit gates on `m` qubits,
//! with the first `n` qubits fixed to a classical input bit string and the
//! remainder carrying the witness. Qubit 0 is the most significant bit of a
//! basis-state index, so the output qubit (qubit 0 by default) selects the
//! top/bottom half of the amplitude array.

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::bits::{accumulate_embedded, qubit_value, EmbeddingMap};
use crate::error::{Error, Result};
use crate::linalg;

/// Max-entry tolerance for the unitarity check ‖G†G − I‖.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Tolerance on |‖v‖² − 1| for state vectors.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cnot,
    Cz,
    Swap,
    Custom,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Custom => "CUSTOM",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "I" => GateKind::I,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "H" => GateKind::H,
            "S" => GateKind::S,
            "T" => GateKind::T,
            "CNOT" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            "SWAP" => GateKind::Swap,
            "CUSTOM" => GateKind::Custom,
            _ => return None,
        })
    }

    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::I
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::T => Some(1),
            GateKind::Cnot | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::Custom => None,
        }
    }

    fn standard_matrix(&self) -> Option<Array2<C64>> {
        let re = |x: f64| C64::new(x, 0.0);
        let im = |x: f64| C64::new(0.0, x);
        Some(match self {
            GateKind::I => array![[re(1.0), re(0.0)], [re(0.0), re(1.0)]],
            GateKind::X => array![[re(0.0), re(1.0)], [re(1.0), re(0.0)]],
            GateKind::Y => array![[re(0.0), im(-1.0)], [im(1.0), re(0.0)]],
            GateKind::Z => array![[re(1.0), re(0.0)], [re(0.0), re(-1.0)]],
            GateKind::H => array![
                [re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)],
                [re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2)]
            ],
            GateKind::S => array![[re(1.0), re(0.0)], [re(0.0), im(1.0)]],
            GateKind::T => array![
                [re(1.0), re(0.0)],
                [re(0.0), C64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]
            ],
            GateKind::Cnot => {
                let mut m = Array2::zeros((4, 4));
                m[(0, 0)] = re(1.0);
                m[(1, 1)] = re(1.0);
                m[(2, 3)] = re(1.0);
                m[(3, 2)] = re(1.0);
                m
            }
            GateKind::Cz => {
                let mut m = Array2::eye(4);
                m[(3, 3)] = re(-1.0);
                m
            }
            GateKind::Swap => {
                let mut m = Array2::zeros((4, 4));
                m[(0, 0)] = re(1.0);
                m[(1, 2)] = re(1.0);
                m[(2, 1)] = re(1.0);
                m[(3, 3)] = re(1.0);
                m
            }
            GateKind::Custom => return None,
        })
    }
}

/// A gate with resolved matrix. The target list is ordered: `targets[0]` is
/// the most significant bit of the gate's local basis index (the control for
/// CNOT/CZ).
#[derive(Debug, Clone)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    matrix: Array2<C64>,
}

fn check_targets(targets: &[usize]) -> Result<()> {
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(Error::DuplicateTargets(targets.to_vec()));
    }
    Ok(())
}

fn unitarity_deviation(m: &Array2<C64>) -> f64 {
    let d = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += m[(k, i)].conj() * m[(k, j)];
            }
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((acc - C64::new(expect, 0.0)).norm());
        }
    }
    dev
}

impl Gate {
    /// A named gate from the standard library.
    pub fn new(kind: GateKind, targets: &[usize]) -> Result<Self> {
        let arity = kind.arity().ok_or(Error::BadArity {
            name: "CUSTOM",
            expected: 0,
            got: targets.len(),
        })?;
        if targets.len() != arity {
            return Err(Error::BadArity {
                name: kind.name(),
                expected: arity,
                got: targets.len(),
            });
        }
        check_targets(targets)?;
        Ok(Self {
            kind,
            targets: targets.to_vec(),
            matrix: kind.standard_matrix().expect("named gate has a matrix"),
        })
    }

    /// A gate with an explicit unitary matrix on 1 or 2 qubits.
    pub fn custom(targets: &[usize], matrix: Array2<C64>) -> Result<Self> {
        if targets.is_empty() || targets.len() > 2 {
            return Err(Error::BadArity {
                name: "CUSTOM",
                expected: 2,
                got: targets.len(),
            });
        }
        check_targets(targets)?;
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::BadMatrixShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(Self {
            kind: GateKind::Custom,
            targets: targets.to_vec(),
            matrix,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn adjoint_matrix(&self) -> Array2<C64> {
        linalg::adjoint(&self.matrix)
    }
}

/// A verification circuit: `m` qubits, input bits on qubits 0..n-1, ordered
/// gates, and a designated output qubit.
#[derive(Debug, Clone)]
pub struct Circuit {
    m: usize,
    input_bits: Vec<bool>,
    gates: Vec<Gate>,
    output_qubit: usize,
}

impl Circuit {
    pub fn new(m: usize, input_bits: &str, gates: Vec<Gate>, output_qubit: usize) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        let mut bits = Vec::with_capacity(input_bits.len());
        for c in input_bits.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::BadInputBits {
                        bits: input_bits.to_string(),
                        got: input_bits.len(),
                        qubits: m,
                    })
                }
            }
        }
        if bits.len() > m {
            return Err(Error::BadInputBits {
                bits: input_bits.to_string(),
                got: bits.len(),
                qubits: m,
            });
        }
        if output_qubit >= m {
            return Err(Error::QubitOutOfRange {
                index: output_qubit,
                n_qubits: m,
            });
        }
        for gate in &gates {
            for &t in gate.targets() {
                if t >= m {
                    return Err(Error::QubitOutOfRange {
                        index: t,
                        n_qubits: m,
                    });
                }
            }
            let dev = unitarity_deviation(gate.matrix());
            if dev > UNITARITY_TOL {
                return Err(Error::NotUnitary { deviation: dev });
            }
        }
        Ok(Self {
            m,
            input_bits: bits,
            gates,
            output_qubit,
        })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    /// Number of classical input bits n.
    pub fn input_len(&self) -> usize {
        self.input_bits.len()
    }

    pub fn input_bits(&self) -> &[bool] {
        &self.input_bits
    }

    pub fn input_bit_string(&self) -> String {
        self.input_bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Number of witness qubits m - n.
    pub fn witness_qubits(&self) -> usize {
        self.m - self.input_bits.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of time steps T.
    pub fn t_steps(&self) -> usize {
        self.gates.len()
    }

    pub fn output_qubit(&self) -> usize {
        self.output_qubit
    }

    /// Basis index of the input bit block (qubits 0..n-1).
    fn input_index(&self) -> usize {
        self.input_bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

/// Complex amplitude array over the 2^m computational basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    m: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |idx⟩ on m qubits. m = 0 gives the trivial one-dimensional state.
    pub fn basis_state(m: usize, idx: usize) -> Result<Self> {
        let dim = 1usize << m;
        if idx >= dim {
            return Err(Error::QubitOutOfRange {
                index: idx,
                n_qubits: m,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(Self { m, amps })
    }

    pub fn zero_state(m: usize) -> Self {
        Self::basis_state(m, 0).expect("index 0 always valid")
    }

    pub fn from_amplitudes(m: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = 1usize << m;
        if amps.len() != dim {
            return Err(Error::BadStateLength {
                got: amps.len(),
                expected: dim,
            });
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { m, amps })
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    /// Probability that `qubit` reads 1.
    pub fn probability_of_one(&self, qubit: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| qubit_value(*idx, self.m, qubit) == 1)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Apply `gate` to `state`, returning the new state: (G ⊗ I)|state⟩.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    for &t in gate.targets() {
        if t >= state.m {
            return Err(Error::QubitOutOfRange {
                index: t,
                n_qubits: state.m,
            });
        }
    }
    let map = EmbeddingMap::new(state.m, gate.targets());
    let mut out = vec![C64::new(0.0, 0.0); state.amps.len()];
    accumulate_embedded(gate.matrix(), &map, &state.amps, &mut out);
    Ok(StateVector {
        m: state.m,
        amps: out,
    })
}

/// Tensor the input bit block with the witness: |x⟩ ⊗ |witness⟩.
pub fn initial_state(circuit: &Circuit, witness: &StateVector) -> Result<StateVector> {
    let w = circuit.witness_qubits();
    if witness.qubits() != w {
        return Err(Error::DimensionMismatch {
            context: format!(
                "witness has {} qubits, circuit expects {}",
                witness.qubits(),
                w
            ),
        });
    }
    let dim = 1usize << circuit.m;
    let x_block = circuit.input_index() << w;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for (i, &a) in witness.amplitudes().iter().enumerate() {
        amps[x_block | i] = a;
    }
    Ok(StateVector {
        m: circuit.m,
        amps,
    })
}

/// Run the circuit on |x⟩ ⊗ |witness⟩ and return the final state.
pub fn run_circuit(circuit: &Circuit, witness: &StateVector) -> Result<StateVector> {
    let mut state = initial_state(circuit, witness)?;
    for gate in circuit.gates() {
        state = apply_gate(&state, gate)?;
    }
    Ok(state)
}

/// All T+1 intermediate states, from |γ₀⟩ through U_T…U_1|γ₀⟩.
pub fn run_circuit_trajectory(circuit: &Circuit, witness: &StateVector) -> Result<Vec<StateVector>> {
    let mut states = Vec::with_capacity(circuit.t_steps() + 1);
    states.push(initial_state(circuit, witness)?);
    for gate in circuit.gates() {
        let next = apply_gate(states.last().unwrap(), gate)?;
        states.push(next);
    }
    Ok(states)
}

/// Probability that the output qubit reads 1 after running the circuit.
pub fn acceptance_probability(circuit: &Circuit, witness: &StateVector) -> Result<f64> {
    let final_state = run_circuit(circuit, witness)?;
    Ok(final_state.probability_of_one(circuit.output_qubit()))
}

/// Gram matrix of acceptance amplitudes over the witness basis:
/// M[j, k] = ⟨φ_j| Π₁ |φ_k⟩ with |φ_j⟩ the final state for witness basis
/// state j. Its largest eigenvalue is the best acceptance probability over
/// all witness states.
pub fn acceptance_operator(circuit: &Circuit) -> Result<Array2<C64>> {
    let w = circuit.witness_qubits();
    let wdim = 1usize << w;
    let mut finals = Vec::with_capacity(wdim);
    for j in 0..wdim {
        let witness = StateVector::basis_state(w, j)?;
        finals.push(run_circuit(circuit, &witness)?);
    }
    let out = circuit.output_qubit();
    let m = circuit.m;
    let mut gram = Array2::zeros((wdim, wdim));
    for j in 0..wdim {
        for k in 0..wdim {
            let mut acc = C64::new(0.0, 0.0);
            for idx in 0..(1usize << m) {
                if qubit_value(idx, m, out) == 1 {
                    acc += finals[j].amplitudes()[idx].conj() * finals[k].amplitudes()[idx];
                }
            }
            gram[(j, k)] = acc;
        }
    }
    Ok(gram)
}
