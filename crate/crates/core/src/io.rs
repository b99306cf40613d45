//! JSON file formats and a reproducible writer.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! lists. All floating-point values are written with 17 significant digits in
//! scientific notation, which round-trips `f64` exactly and makes outputs
//! byte-identical across runs.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind, StateVector};
use crate::compile::{ClockFactor, ClockRegisterTerm, RegisterClockHamiltonian, UnaryHamiltonian};
use crate::error::{Error, Result};
use crate::ops::{HamiltonianSpec, LocalTerm};

pub type ComplexEntry = [f64; 2];
pub type MatrixEntries = Vec<Vec<ComplexEntry>>;

fn matrix_to_entries(m: &Array2<C64>) -> MatrixEntries {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn entries_to_matrix(rows: &MatrixEntries) -> Result<Array2<C64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::BadMatrixShape {
            rows: n,
            cols: rows.first().map_or(0, |r| r.len()),
            dim: n,
        });
    }
    let mut m = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// circuit files

#[derive(Debug, Serialize, Deserialize)]
pub struct GateFile {
    pub name: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixEntries>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CircuitFile {
    pub qubits: usize,
    #[serde(default)]
    pub input_bits: String,
    #[serde(default)]
    pub output_qubit: usize,
    pub gates: Vec<GateFile>,
}

impl CircuitFile {
    pub fn from_circuit(circuit: &Circuit) -> Self {
        Self {
            qubits: circuit.qubits(),
            input_bits: circuit.input_bit_string(),
            output_qubit: circuit.output_qubit(),
            gates: circuit
                .gates()
                .iter()
                .map(|g| GateFile {
                    name: g.kind().name().to_string(),
                    targets: g.targets().to_vec(),
                    matrix: (g.kind() == GateKind::Custom).then(|| matrix_to_entries(g.matrix())),
                })
                .collect(),
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let kind = GateKind::from_name(&g.name)
                .ok_or_else(|| Error::Format(format!("unknown gate name {:?}", g.name)))?;
            let gate = if kind == GateKind::Custom {
                let rows = g.matrix.as_ref().ok_or(Error::BadMatrixShape {
                    rows: 0,
                    cols: 0,
                    dim: 1 << g.targets.len(),
                })?;
                Gate::custom(&g.targets, entries_to_matrix(rows)?)?
            } else {
                Gate::new(kind, &g.targets)?
            };
            gates.push(gate);
        }
        Circuit::new(self.qubits, &self.input_bits, gates, self.output_qubit)
    }
}

// ---------------------------------------------------------------------------
// state files

#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub qubits: usize,
    pub amplitudes: Vec<ComplexEntry>,
}

impl StateFile {
    pub fn from_state(state: &StateVector) -> Self {
        Self {
            qubits: state.qubits(),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let amps = self.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect();
        StateVector::from_amplitudes(self.qubits, amps)
    }
}

// ---------------------------------------------------------------------------
// Hamiltonian files (term-list form)

#[derive(Debug, Serialize, Deserialize)]
pub struct TermFile {
    pub qubits: Vec<usize>,
    pub matrix: MatrixEntries,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamMetadata {
    pub encoding: String,
    pub t_steps: usize,
    pub system_qubits: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub single_clock_qubit_edge_case: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HamiltonianFile {
    pub n_qubits: usize,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub terms: Vec<TermFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<HamMetadata>,
}

impl HamiltonianFile {
    pub fn from_spec(spec: &HamiltonianSpec, metadata: Option<HamMetadata>) -> Self {
        let (a, b) = spec.thresholds();
        Self {
            n_qubits: spec.n_qubits(),
            a,
            b,
            terms: spec
                .terms()
                .iter()
                .map(|t| TermFile {
                    qubits: t.qubits().to_vec(),
                    matrix: matrix_to_entries(t.matrix()),
                })
                .collect(),
            metadata,
        }
    }

    pub fn from_unary(unary: &UnaryHamiltonian) -> Result<Self> {
        let spec = unary.to_spec()?;
        let metadata = HamMetadata {
            encoding: "unary".into(),
            t_steps: unary.t_steps(),
            system_qubits: unary.system_qubits(),
            single_clock_qubit_edge_case: unary.is_single_clock_qubit_edge_case(),
        };
        Ok(Self::from_spec(&spec, Some(metadata)))
    }

    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm::new(t.qubits.clone(), entries_to_matrix(&t.matrix)?))
            .collect::<Result<Vec<_>>>()?;
        HamiltonianSpec::new(self.n_qubits, terms, self.a, self.b)
    }
}

// ---------------------------------------------------------------------------
// register-clock Hamiltonian files

#[derive(Debug, Serialize, Deserialize)]
pub struct ClockFactorFile {
    pub system_matrix: MatrixEntries,
    pub clock_matrix: MatrixEntries,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterTermFile {
    pub system_qubits: Vec<usize>,
    pub factors: Vec<ClockFactorFile>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegisterClockFile {
    pub system_qubits: usize,
    pub clock_dim: usize,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub in_terms: Vec<RegisterTermFile>,
    pub out_term: RegisterTermFile,
    pub prop_terms: Vec<RegisterTermFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<HamMetadata>,
}

fn term_to_file(term: &ClockRegisterTerm) -> RegisterTermFile {
    RegisterTermFile {
        system_qubits: term.system_qubits().to_vec(),
        factors: term
            .factors()
            .iter()
            .map(|f| ClockFactorFile {
                system_matrix: matrix_to_entries(&f.system_matrix),
                clock_matrix: matrix_to_entries(&f.clock_matrix),
            })
            .collect(),
    }
}

fn file_to_term(file: &RegisterTermFile, clock_dim: usize) -> Result<ClockRegisterTerm> {
    let factors = file
        .factors
        .iter()
        .map(|f| {
            Ok(ClockFactor {
                system_matrix: entries_to_matrix(&f.system_matrix)?,
                clock_matrix: entries_to_matrix(&f.clock_matrix)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ClockRegisterTerm::new(file.system_qubits.clone(), factors, clock_dim)
}

impl RegisterClockFile {
    pub fn from_hamiltonian(ham: &RegisterClockHamiltonian) -> Self {
        let (a, b) = ham.thresholds();
        Self {
            system_qubits: ham.system_qubits(),
            clock_dim: ham.clock_dim(),
            a,
            b,
            in_terms: ham.in_terms().iter().map(term_to_file).collect(),
            out_term: term_to_file(ham.out_term()),
            prop_terms: ham.prop_terms().iter().map(term_to_file).collect(),
            metadata: Some(HamMetadata {
                encoding: "register".into(),
                t_steps: ham.t_steps(),
                system_qubits: ham.system_qubits(),
                single_clock_qubit_edge_case: false,
            }),
        }
    }

    pub fn to_hamiltonian(&self) -> Result<RegisterClockHamiltonian> {
        let in_terms = self
            .in_terms
            .iter()
            .map(|t| file_to_term(t, self.clock_dim))
            .collect::<Result<Vec<_>>>()?;
        let out_term = file_to_term(&self.out_term, self.clock_dim)?;
        let prop_terms = self
            .prop_terms
            .iter()
            .map(|t| file_to_term(t, self.clock_dim))
            .collect::<Result<Vec<_>>>()?;
        RegisterClockHamiltonian::from_parts(
            self.system_qubits,
            self.clock_dim,
            in_terms,
            out_term,
            prop_terms,
            self.a,
            self.b,
        )
    }
}

// ---------------------------------------------------------------------------
// writer

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Serialize to a JSON string with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}
