//! Command-line front end: compile circuits to local Hamiltonians, encode
//! 3-SAT, compute ground energies, run the verification protocol, and audit
//! completeness/soundness bounds.
//!
//! Human-readable summaries go to stdout; the JSON report goes to `--out`
//! when given, otherwise to stdout (with the summary moved to stderr so the
//! JSON stays parseable). Exit codes: 0 success, 2 parse error, 3 compile
//! refusal, 4 undecided energy classification, 5 dense dimension cap.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use clockham::circuit::{acceptance_probability, Circuit, StateVector};
use clockham::compile::{
    compile_register_clock, compile_unary, history_state, ClockEncoding,
};
use clockham::io::{
    to_json_string, CircuitFile, HamiltonianFile, RegisterClockFile, StateFile,
};
use clockham::linalg;
use clockham::spectral::{
    clock_walk, dense_eigh, geometric_lemma_check, lanczos_min_eig, null_space, principal_angle,
    soundness_audit, AngleReport, NULL_SPACE_TOL,
};
use clockham::verify::protocol_accept_probability;
use clockham::Error;

const EXIT_PARSE: u8 = 2;
const EXIT_COMPILE: u8 = 3;
const EXIT_UNDECIDED: u8 = 4;
const EXIT_DENSE_CAP: u8 = 5;

#[derive(Parser)]
#[command(
    name = "clockham",
    about = "Compile verification circuits to local Hamiltonians and certify their spectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Register,
    Unary,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Dense,
    Lanczos,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit JSON file into a Hamiltonian file.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        /// Clock encoding of the emitted Hamiltonian.
        #[arg(long, value_enum, default_value = "unary")]
        clock: ClockArg,
        /// Override the circuit file's input bit string.
        #[arg(long)]
        input_bits: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest eigenvalue and YES/NO/UNDECIDED classification.
    Energy {
        #[arg(long)]
        ham: PathBuf,
        #[arg(long, value_enum, default_value = "dense")]
        method: MethodArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Classification tolerance around the thresholds.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a DIMACS CNF file as a 3-local Hamiltonian.
    Sat2ham {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification protocol on a Hamiltonian and witness state.
    Verify {
        #[arg(long)]
        ham: PathBuf,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completeness, clock-walk, angle, lemma, and soundness report for a
    /// circuit.
    Audit {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        input_bits: Option<String>,
        #[arg(long, default_value_t = NULL_SPACE_TOL)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the clock-walk report for a given T.
    Clock {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::DenseDimensionCap { .. } => EXIT_DENSE_CAP,
        _ => EXIT_PARSE,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_PARSE
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: cannot parse {}: {e}", path.display());
        EXIT_PARSE
    })
}

fn load_circuit(path: &Path, input_bits: Option<&str>) -> Result<Circuit, u8> {
    let mut file: CircuitFile = read_json(path)?;
    if let Some(bits) = input_bits {
        file.input_bits = bits.to_string();
    }
    file.to_circuit().map_err(|e| {
        eprintln!("error: invalid circuit: {e}");
        EXIT_PARSE
    })
}

/// Write the JSON report. With --out the summary already went to stdout;
/// without it the JSON itself is the stdout payload.
fn emit(json: &str, out: Option<&Path>) -> Result<(), u8> {
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n")).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_PARSE
        }),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

/// stdout when a report file captures the JSON, stderr otherwise.
fn summary(line: &str, out: Option<&Path>) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn cmd_compile(
    circuit_path: &Path,
    clock: ClockArg,
    input_bits: Option<&str>,
    out: Option<&Path>,
) -> Result<(), u8> {
    let circuit = load_circuit(circuit_path, input_bits)?;
    let json = match clock {
        ClockArg::Unary => {
            let unary = compile_unary(&circuit).map_err(|e| {
                eprintln!("error: compilation refused: {e}");
                EXIT_COMPILE
            })?;
            summary(
                &format!(
                    "compiled unary instance: {} qubits ({} system + {} clock), {} terms{}",
                    unary.n_qubits(),
                    unary.system_qubits(),
                    unary.t_steps(),
                    unary.to_spec().map(|s| s.term_count()).unwrap_or(0),
                    if unary.is_single_clock_qubit_edge_case() {
                        " [single-clock-qubit edge case]"
                    } else {
                        ""
                    }
                ),
                out,
            );
            let file = HamiltonianFile::from_unary(&unary).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_COMPILE
            })?;
            to_json_string(&file)
        }
        ClockArg::Register => {
            let ham = compile_register_clock(&circuit).map_err(|e| {
                eprintln!("error: compilation refused: {e}");
                EXIT_COMPILE
            })?;
            summary(
                &format!(
                    "compiled register-clock instance: {} system qubits, clock dimension {}, {} terms",
                    ham.system_qubits(),
                    ham.clock_dim(),
                    ham.term_count()
                ),
                out,
            );
            let file = RegisterClockFile::from_hamiltonian(&ham);
            to_json_string(&file)
        }
    }
    .map_err(|e| {
        eprintln!("error: {e}");
        EXIT_COMPILE
    })?;
    emit(&json, out)
}

enum LoadedHamiltonian {
    Terms(clockham::ops::HamiltonianSpec),
    RegisterClock(clockham::compile::RegisterClockHamiltonian),
}

fn load_hamiltonian(path: &Path) -> Result<LoadedHamiltonian, u8> {
    let value: serde_json::Value = read_json(path)?;
    let convert = |e: Error| {
        eprintln!("error: invalid Hamiltonian file: {e}");
        EXIT_PARSE
    };
    if value.get("clock_dim").is_some() {
        let file: RegisterClockFile = serde_json::from_value(value).map_err(|e| {
            eprintln!("error: cannot parse {}: {e}", path.display());
            EXIT_PARSE
        })?;
        Ok(LoadedHamiltonian::RegisterClock(
            file.to_hamiltonian().map_err(convert)?,
        ))
    } else {
        let file: HamiltonianFile = serde_json::from_value(value).map_err(|e| {
            eprintln!("error: cannot parse {}: {e}", path.display());
            EXIT_PARSE
        })?;
        Ok(LoadedHamiltonian::Terms(file.to_spec().map_err(convert)?))
    }
}

fn cmd_energy(
    ham_path: &Path,
    method: MethodArg,
    seed: u64,
    tolerance: f64,
    out: Option<&Path>,
) -> Result<(), u8> {
    let loaded = load_hamiltonian(ham_path)?;
    let (thresholds, report) = match (&loaded, method) {
        (LoadedHamiltonian::Terms(spec), MethodArg::Dense) => {
            let dense = spec.dense().map_err(|e| {
                eprintln!("error: {e}");
                exit_code_for(&e)
            })?;
            (spec.thresholds(), dense_eigh(&dense))
        }
        (LoadedHamiltonian::Terms(spec), MethodArg::Lanczos) => {
            (spec.thresholds(), lanczos_min_eig(spec, seed))
        }
        (LoadedHamiltonian::RegisterClock(ham), MethodArg::Dense) => {
            let dense = ham.dense().map_err(|e| {
                eprintln!("error: {e}");
                exit_code_for(&e)
            })?;
            (ham.thresholds(), dense_eigh(&dense))
        }
        (LoadedHamiltonian::RegisterClock(ham), MethodArg::Lanczos) => {
            (ham.thresholds(), lanczos_min_eig(ham, seed))
        }
    };
    let report = report.map_err(|e| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    })?;
    let lambda_min = report.min_eigenvalue();
    let (a, b) = thresholds;
    let classification = match (a, b) {
        (Some(a), _) if lambda_min <= a + tolerance => "YES",
        (_, Some(b)) if lambda_min >= b - tolerance => "NO",
        _ => "UNDECIDED",
    };
    let payload = json!({
        "lambda_min": lambda_min,
        "classification": classification,
        "a": a,
        "b": b,
        "method": match method { MethodArg::Dense => "dense", MethodArg::Lanczos => "lanczos" },
        "seed": seed,
        "residual": report.residual,
        "iterations": report.iterations,
        "converged": report.converged,
    });
    summary(
        &format!("lambda_min = {lambda_min:.12e}  classification = {classification}"),
        out,
    );
    let json = to_json_string(&payload).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    emit(&json, out)?;
    if classification == "UNDECIDED" {
        return Err(EXIT_UNDECIDED);
    }
    Ok(())
}

fn cmd_sat2ham(cnf_path: &Path, out: Option<&Path>) -> Result<(), u8> {
    let text = std::fs::read_to_string(cnf_path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", cnf_path.display());
        EXIT_PARSE
    })?;
    let formula = clockham::sat::parse_dimacs(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    let spec = clockham::sat::encode(&formula).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    summary(
        &format!(
            "encoded {} variables, {} clauses -> {} terms on {} qubits (a = 0, b = 1)",
            formula.n_vars(),
            formula.clauses().len(),
            spec.term_count(),
            spec.n_qubits()
        ),
        out,
    );
    let file = HamiltonianFile::from_spec(&spec, None);
    let json = to_json_string(&file).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    emit(&json, out)
}

fn cmd_verify(
    ham_path: &Path,
    witness_path: &Path,
    shots: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), u8> {
    let loaded = load_hamiltonian(ham_path)?;
    let spec = match loaded {
        LoadedHamiltonian::Terms(spec) => spec,
        LoadedHamiltonian::RegisterClock(_) => {
            eprintln!("error: verify expects a term-list Hamiltonian file");
            return Err(EXIT_PARSE);
        }
    };
    let state_file: StateFile = read_json(witness_path)?;
    let state = state_file.to_state().map_err(|e| {
        eprintln!("error: invalid witness state: {e}");
        EXIT_PARSE
    })?;
    let estimate = protocol_accept_probability(&spec, &state, shots, seed).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    summary(
        &format!(
            "exact acceptance = {:.12}{}",
            estimate.exact_probability,
            estimate
                .sampled_frequency
                .map(|s| format!(", sampled = {s:.6} ({shots} shots)"))
                .unwrap_or_default()
        ),
        out,
    );
    let json = to_json_string(&estimate).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    emit(&json, out)
}

fn cmd_audit(
    circuit_path: &Path,
    input_bits: Option<&str>,
    tolerance: f64,
    out: Option<&Path>,
) -> Result<(), u8> {
    let circuit = load_circuit(circuit_path, input_bits)?;
    let register = compile_register_clock(&circuit).map_err(|e| {
        eprintln!("error: compilation refused: {e}");
        EXIT_COMPILE
    })?;
    let unary = compile_unary(&circuit).map_err(|e| {
        eprintln!("error: compilation refused: {e}");
        EXIT_COMPILE
    })?;
    let dense_err = |e: Error| {
        eprintln!("error: {e}");
        exit_code_for(&e)
    };

    // completeness: history state of the best witness
    let gram = clockham::circuit::acceptance_operator(&circuit).map_err(dense_err)?;
    let gram_eig = dense_eigh(&gram).map_err(dense_err)?;
    let top = gram_eig.eigenvalues.len() - 1;
    let best_acceptance = gram_eig.eigenvalues[top].clamp(0.0, 1.0);
    let witness_amps: Vec<_> = gram_eig
        .eigenvectors
        .as_ref()
        .expect("dense report carries vectors")
        .column(top)
        .to_vec();
    let witness = StateVector::from_amplitudes(circuit.witness_qubits(), witness_amps)
        .map_err(dense_err)?;
    let epsilon = 1.0 - acceptance_probability(&circuit, &witness).map_err(dense_err)?;

    let eta_register = history_state(&circuit, &witness, ClockEncoding::Register).map_err(dense_err)?;
    let eta_unary = history_state(&circuit, &witness, ClockEncoding::Unary).map_err(dense_err)?;
    let register_energy = {
        let hv = register.apply_slice(eta_register.amplitudes()).map_err(dense_err)?;
        linalg::inner(eta_register.amplitudes(), &hv).re
    };
    let unary_spec = unary.to_spec().map_err(dense_err)?;
    let unary_energy = {
        let hv = unary_spec.apply_slice(eta_unary.amplitudes()).map_err(dense_err)?;
        linalg::inner(eta_unary.amplitudes(), &hv).re
    };
    let prop_residual_register = {
        let hv = register.apply_prop(eta_register.amplitudes()).map_err(dense_err)?;
        linalg::norm2(&hv)
    };
    let prop_residual_unary = {
        let prop = unary.prop_spec().map_err(dense_err)?;
        let hv = prop.apply_slice(eta_unary.amplitudes()).map_err(dense_err)?;
        linalg::norm2(&hv)
    };

    // clock walk
    let walk = clock_walk(circuit.t_steps()).map_err(dense_err)?;

    // angle between null(H_in + H_out) and null(H_prop)
    let h1 = register.in_out_dense().map_err(dense_err)?;
    let hp = register.prop_dense().map_err(dense_err)?;
    let n1 = null_space(&h1, tolerance).map_err(dense_err)?;
    let n2 = null_space(&hp, tolerance).map_err(dense_err)?;
    let angle = principal_angle(&n1, &n2).map_err(dense_err)?;
    let angle_bound = AngleReport::time_bound(circuit.t_steps());

    let lemma = geometric_lemma_check(&h1, &hp).map_err(dense_err)?;

    // soundness section only for verifiably rejecting instances
    let soundness = match soundness_audit(&circuit, &register) {
        Ok(audit) => Some(audit),
        Err(Error::AuditRefused { .. }) => None,
        Err(e) => return Err(dense_err(e)),
    };

    let payload = json!({
        "t_steps": circuit.t_steps(),
        "completeness": {
            "best_acceptance": best_acceptance,
            "epsilon": epsilon,
            "history_energy_register": register_energy,
            "history_energy_unary": unary_energy,
            "prop_residual_register": prop_residual_register,
            "prop_residual_unary": prop_residual_unary,
        },
        "clock": {
            "t_steps": walk.t_steps,
            "conductance": walk.conductance,
            "gap_bound": walk.gap_bound,
            "second_smallest": walk.second_smallest,
            "gap_holds": walk.gap_holds,
        },
        "angle": {
            "dim_n1": angle.dim_n1,
            "dim_n2": angle.dim_n2,
            "cos_theta": angle.cos_theta,
            "theta": angle.theta,
            "sin2_half_theta": angle.sin2_half_theta,
            "bound": angle_bound,
            "bound_holds": angle.sin2_half_theta >= angle_bound - 1e-9,
        },
        "lemma": lemma,
        "soundness": soundness,
    });
    summary(
        &format!(
            "audit: epsilon = {epsilon:.6e}, history energy (register) = {register_energy:.6e}, clock gap holds = {}{}",
            walk.gap_holds,
            soundness
                .as_ref()
                .map(|s| format!(", soundness holds = {}", s.holds))
                .unwrap_or_else(|| ", soundness skipped (instance not verifiably rejecting)".into())
        ),
        out,
    );
    let json = to_json_string(&payload).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    emit(&json, out)
}

fn cmd_clock(t: usize, out: Option<&Path>) -> Result<(), u8> {
    let walk = clock_walk(t).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    summary(
        &format!(
            "clock walk T = {t}: second smallest = {:.12e}, bound = {:.12e}, holds = {}",
            walk.second_smallest, walk.gap_bound, walk.gap_holds
        ),
        out,
    );
    let json = to_json_string(&walk).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_PARSE
    })?;
    emit(&json, out)
}

fn run() -> Result<(), u8> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Compile {
            circuit,
            clock,
            input_bits,
            out,
        } => cmd_compile(circuit, *clock, input_bits.as_deref(), out.as_deref()),
        Command::Energy {
            ham,
            method,
            seed,
            tolerance,
            out,
        } => cmd_energy(ham, *method, *seed, *tolerance, out.as_deref()),
        Command::Sat2ham { cnf, out } => cmd_sat2ham(cnf, out.as_deref()),
        Command::Verify {
            ham,
            witness,
            shots,
            seed,
            out,
        } => cmd_verify(ham, witness, *shots, *seed, out.as_deref()),
        Command::Audit {
            circuit,
            input_bits,
            tolerance,
            out,
        } => cmd_audit(circuit, input_bits.as_deref(), *tolerance, out.as_deref()),
        Command::Clock { t, out } => cmd_clock(*t, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
