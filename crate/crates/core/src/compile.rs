//! The circuit → Hamiltonian reduction.
//!
//! Two clock encodings are emitted for a circuit with gates U_1 … U_T on m
//! qubits and input bits x:
//!
//! * **Register clock**: terms act on at most two system qubits tensored with
//!   a (T+1)-dimensional clock register. H = H_in + H_out + H_prop with
//!   H_in = Σ_i Π^{¬x_i}_i ⊗ |0⟩⟨0|, H_out = Π^{0}_out ⊗ |T⟩⟨T| and
//!   H_prop(t) = ½(I⊗|t⟩⟨t| + I⊗|t−1⟩⟨t−1| − U_t⊗|t⟩⟨t−1| − U_t†⊗|t−1⟩⟨t|).
//! * **Unary clock**: time t is the string 1^t 0^{T−t} on T extra qubits, so
//!   every clock operator touches at most three adjacent clock qubits and all
//!   terms are 5-local. Invalid clock strings are penalized by
//!   H_clock = Σ_t |01⟩⟨01| on adjacent clock pairs.
//!
//! The history state (1/√(T+1)) Σ_t U_t…U_1|x,ξ⟩ ⊗ |t⟩ witnesses
//! completeness; the rotation R = Σ_t U_t…U_1 ⊗ |t⟩⟨t| maps H_prop to
//! I ⊗ A with A the clock-walk matrix analyzed in [`crate::spectral`].
//!
//! Thresholds are a = 1/T^10 and b = 1/(4(T+1)^3); for T < 2 the pair
//! degenerates (a ≥ b) and is refused, terms are still emitted.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::bits::{embed_dense, kron, EmbeddingMap};
use crate::circuit::{run_circuit_trajectory, Circuit, StateVector};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ops::{HamiltonianSpec, LocalTerm, DENSE_DIM_CAP};

/// Hermiticity / PSD / norm tolerance for emitted terms.
const TERM_TOL: f64 = 1e-10;

/// Which clock layout a compiled instance or history state uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockEncoding {
    Register,
    Unary,
}

impl ClockEncoding {
    pub fn name(&self) -> &'static str {
        match self {
            ClockEncoding::Register => "register",
            ClockEncoding::Unary => "unary",
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn basis_matrix(dim: usize, row: usize, col: usize) -> Array2<C64> {
    let mut m = Array2::zeros((dim, dim));
    m[(row, col)] = c(1.0);
    m
}

/// One product factor A ⊗ C of a register-clock term: `system_matrix` acts on
/// the listed system qubits, `clock_matrix` on the (T+1)-dimensional clock.
#[derive(Debug, Clone)]
pub struct ClockFactor {
    pub system_matrix: Array2<C64>,
    pub clock_matrix: Array2<C64>,
}

/// A term of the register-clock Hamiltonian: a short sum Σ_j A_j ⊗ C_j over
/// the same system qubits. Input/output terms need one factor; each
/// propagation term needs three. The term as a whole must be Hermitian PSD
/// with norm at most 1.
#[derive(Debug, Clone)]
pub struct ClockRegisterTerm {
    system_qubits: Vec<usize>,
    factors: Vec<ClockFactor>,
    clock_dim: usize,
}

impl ClockRegisterTerm {
    pub fn new(
        system_qubits: Vec<usize>,
        factors: Vec<ClockFactor>,
        clock_dim: usize,
    ) -> Result<Self> {
        if system_qubits.is_empty() || system_qubits.len() > 2 {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "register-clock term must act on 1 or 2 system qubits, got {}",
                    system_qubits.len()
                ),
            });
        }
        if system_qubits.len() == 2 && system_qubits[0] == system_qubits[1] {
            return Err(Error::DuplicateTargets(system_qubits));
        }
        if factors.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "register-clock term needs at least one factor".into(),
            });
        }
        let sys_dim = 1usize << system_qubits.len();
        for f in &factors {
            if f.system_matrix.nrows() != sys_dim || f.system_matrix.ncols() != sys_dim {
                return Err(Error::BadMatrixShape {
                    rows: f.system_matrix.nrows(),
                    cols: f.system_matrix.ncols(),
                    dim: sys_dim,
                });
            }
            if f.clock_matrix.nrows() != clock_dim || f.clock_matrix.ncols() != clock_dim {
                return Err(Error::BadMatrixShape {
                    rows: f.clock_matrix.nrows(),
                    cols: f.clock_matrix.ncols(),
                    dim: clock_dim,
                });
            }
        }
        let term = Self {
            system_qubits,
            factors,
            clock_dim,
        };
        let joint = term.joint_matrix();
        let dev = linalg::hermiticity_deviation(&joint);
        if dev > TERM_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let vals = linalg::eigvalsh(&joint)?;
        if vals[0] < -TERM_TOL {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: vals[0],
            });
        }
        if vals[vals.len() - 1] > 1.0 + TERM_TOL {
            return Err(Error::NormExceedsOne {
                norm: vals[vals.len() - 1],
            });
        }
        Ok(term)
    }

    pub fn system_qubits(&self) -> &[usize] {
        &self.system_qubits
    }

    pub fn factors(&self) -> &[ClockFactor] {
        &self.factors
    }

    pub fn clock_dim(&self) -> usize {
        self.clock_dim
    }

    /// Dense matrix on (system qubits of the term) ⊗ clock.
    pub fn joint_matrix(&self) -> Array2<C64> {
        let sys_dim = 1usize << self.system_qubits.len();
        let dim = sys_dim * self.clock_dim;
        let mut joint = Array2::zeros((dim, dim));
        for f in &self.factors {
            joint += &kron(&f.system_matrix, &f.clock_matrix);
        }
        joint
    }

    /// Eigenvalues of the joint matrix, ascending.
    pub fn joint_eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::eigvalsh(&self.joint_matrix())?.to_vec())
    }

    /// Accumulate (term ⊗ I)|v⟩ into `out` for a full-space vector indexed as
    /// s·(T+1)+t on m system qubits.
    fn accumulate(&self, m: usize, v: &[C64], out: &mut [C64]) {
        let cd = self.clock_dim;
        let sys_dim = 1usize << m;
        debug_assert_eq!(v.len(), sys_dim * cd);
        let map = EmbeddingMap::new(m, &self.system_qubits);
        let mut column = vec![c(0.0); sys_dim];
        let mut acc = vec![c(0.0); sys_dim];
        for f in &self.factors {
            // sparse walk over clock-matrix entries
            for t_out in 0..cd {
                for t_in in 0..cd {
                    let w = f.clock_matrix[(t_out, t_in)];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    for s in 0..sys_dim {
                        column[s] = v[s * cd + t_in];
                    }
                    for a in acc.iter_mut() {
                        *a = c(0.0);
                    }
                    crate::bits::accumulate_embedded(&f.system_matrix, &map, &column, &mut acc);
                    for s in 0..sys_dim {
                        out[s * cd + t_out] += w * acc[s];
                    }
                }
            }
        }
    }

    /// Dense contribution on the full system ⊗ clock space.
    fn dense_full(&self, m: usize) -> Array2<C64> {
        let cd = self.clock_dim;
        let sys_dim = 1usize << m;
        let dim = sys_dim * cd;
        let map = EmbeddingMap::new(m, &self.system_qubits);
        let mut out = Array2::zeros((dim, dim));
        for f in &self.factors {
            let sys_full = embed_dense(&f.system_matrix, &map);
            for t_out in 0..cd {
                for t_in in 0..cd {
                    let w = f.clock_matrix[(t_out, t_in)];
                    if w.norm_sqr() == 0.0 {
                        continue;
                    }
                    for s_out in 0..sys_dim {
                        for s_in in 0..sys_dim {
                            let a = sys_full[(s_out, s_in)];
                            if a.norm_sqr() != 0.0 {
                                out[(s_out * cd + t_out, s_in * cd + t_in)] += w * a;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// The compiled register-clock instance H = H_in + H_out + H_prop on m system
/// qubits and a (T+1)-dimensional clock, joint index s·(T+1)+t.
#[derive(Debug, Clone)]
pub struct RegisterClockHamiltonian {
    m: usize,
    clock_dim: usize,
    in_terms: Vec<ClockRegisterTerm>,
    out_term: ClockRegisterTerm,
    prop_terms: Vec<ClockRegisterTerm>,
    a: Option<f64>,
    b: Option<f64>,
}

impl RegisterClockHamiltonian {
    /// Reassemble an instance from validated parts (used by deserialization).
    pub fn from_parts(
        m: usize,
        clock_dim: usize,
        in_terms: Vec<ClockRegisterTerm>,
        out_term: ClockRegisterTerm,
        prop_terms: Vec<ClockRegisterTerm>,
        a: Option<f64>,
        b: Option<f64>,
    ) -> Result<Self> {
        if clock_dim < 2 {
            return Err(Error::DimensionMismatch {
                context: "clock dimension must be at least 2".into(),
            });
        }
        for term in in_terms.iter().chain(std::iter::once(&out_term)).chain(&prop_terms) {
            if term.clock_dim() != clock_dim {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "term clock dimension {} vs instance {}",
                        term.clock_dim(),
                        clock_dim
                    ),
                });
            }
            for &q in term.system_qubits() {
                if q >= m {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits: m,
                    });
                }
            }
        }
        if let (Some(a), Some(b)) = (a, b) {
            if b - a <= 0.0 {
                return Err(Error::BadThresholds { a, b });
            }
        }
        Ok(Self {
            m,
            clock_dim,
            in_terms,
            out_term,
            prop_terms,
            a,
            b,
        })
    }

    pub fn system_qubits(&self) -> usize {
        self.m
    }

    pub fn clock_dim(&self) -> usize {
        self.clock_dim
    }

    pub fn t_steps(&self) -> usize {
        self.clock_dim - 1
    }

    pub fn dim(&self) -> usize {
        (1usize << self.m) * self.clock_dim
    }

    pub fn in_terms(&self) -> &[ClockRegisterTerm] {
        &self.in_terms
    }

    pub fn out_term(&self) -> &ClockRegisterTerm {
        &self.out_term
    }

    pub fn prop_terms(&self) -> &[ClockRegisterTerm] {
        &self.prop_terms
    }

    pub fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        (self.a, self.b)
    }

    pub fn term_count(&self) -> usize {
        self.in_terms.len() + 1 + self.prop_terms.len()
    }

    fn terms(&self) -> impl Iterator<Item = &ClockRegisterTerm> {
        self.in_terms
            .iter()
            .chain(std::iter::once(&self.out_term))
            .chain(self.prop_terms.iter())
    }

    pub fn apply_slice(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: format!("vector length {} vs dimension {}", v.len(), self.dim()),
            });
        }
        let mut out = vec![c(0.0); v.len()];
        for term in self.terms() {
            term.accumulate(self.m, v, &mut out);
        }
        Ok(out)
    }

    fn dense_cap_check(&self) -> Result<()> {
        if self.dim() > DENSE_DIM_CAP {
            return Err(Error::DenseDimensionCap {
                dim: self.dim(),
                cap: DENSE_DIM_CAP,
            });
        }
        Ok(())
    }

    pub fn dense(&self) -> Result<Array2<C64>> {
        self.dense_cap_check()?;
        let mut out = Array2::zeros((self.dim(), self.dim()));
        for term in self.terms() {
            out += &term.dense_full(self.m);
        }
        Ok(out)
    }

    /// Dense H_in + H_out.
    pub fn in_out_dense(&self) -> Result<Array2<C64>> {
        self.dense_cap_check()?;
        let mut out = Array2::zeros((self.dim(), self.dim()));
        for term in self.in_terms.iter().chain(std::iter::once(&self.out_term)) {
            out += &term.dense_full(self.m);
        }
        Ok(out)
    }

    /// Dense H_prop.
    pub fn prop_dense(&self) -> Result<Array2<C64>> {
        self.dense_cap_check()?;
        let mut out = Array2::zeros((self.dim(), self.dim()));
        for term in &self.prop_terms {
            out += &term.dense_full(self.m);
        }
        Ok(out)
    }

    /// H_prop|v⟩ only.
    pub fn apply_prop(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: format!("vector length {} vs dimension {}", v.len(), self.dim()),
            });
        }
        let mut out = vec![c(0.0); v.len()];
        for term in &self.prop_terms {
            term.accumulate(self.m, v, &mut out);
        }
        Ok(out)
    }

    /// H_in|v⟩ only.
    pub fn apply_in(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: format!("vector length {} vs dimension {}", v.len(), self.dim()),
            });
        }
        let mut out = vec![c(0.0); v.len()];
        for term in &self.in_terms {
            term.accumulate(self.m, v, &mut out);
        }
        Ok(out)
    }
}

/// Thresholds a = 1/T^10, b = 1/(4(T+1)^3), defined only for T ≥ 2 where
/// a < b holds.
pub fn thresholds(t_steps: usize) -> (Option<f64>, Option<f64>) {
    if t_steps < 2 {
        return (None, None);
    }
    let t = t_steps as f64;
    (Some(t.powi(-10)), Some(0.25 * (t + 1.0).powi(-3)))
}

/// Compile the register-clock Hamiltonian for `circuit` with its input bits.
pub fn compile_register_clock(circuit: &Circuit) -> Result<RegisterClockHamiltonian> {
    let m = circuit.qubits();
    let t_steps = circuit.t_steps();
    let clock_dim = t_steps + 1;

    let proj = |bit: usize| -> Array2<C64> { basis_matrix(2, bit, bit) };

    let mut in_terms = Vec::with_capacity(circuit.input_len());
    for (i, &bit) in circuit.input_bits().iter().enumerate() {
        let wrong = if bit { 0 } else { 1 };
        in_terms.push(ClockRegisterTerm::new(
            vec![i],
            vec![ClockFactor {
                system_matrix: proj(wrong),
                clock_matrix: basis_matrix(clock_dim, 0, 0),
            }],
            clock_dim,
        )?);
    }

    let out_term = ClockRegisterTerm::new(
        vec![circuit.output_qubit()],
        vec![ClockFactor {
            system_matrix: proj(0),
            clock_matrix: basis_matrix(clock_dim, t_steps, t_steps),
        }],
        clock_dim,
    )?;

    let mut prop_terms = Vec::with_capacity(t_steps);
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let t = idx + 1;
        let sys_dim = 1usize << gate.targets().len();
        let mut leaf_pair = Array2::zeros((clock_dim, clock_dim));
        leaf_pair[(t, t)] = c(0.5);
        leaf_pair[(t - 1, t - 1)] = c(0.5);
        let factors = vec![
            ClockFactor {
                system_matrix: Array2::eye(sys_dim),
                clock_matrix: leaf_pair,
            },
            ClockFactor {
                system_matrix: gate.matrix().mapv(|z| z * -0.5),
                clock_matrix: basis_matrix(clock_dim, t, t - 1),
            },
            ClockFactor {
                system_matrix: gate.adjoint_matrix().mapv(|z| z * -0.5),
                clock_matrix: basis_matrix(clock_dim, t - 1, t),
            },
        ];
        prop_terms.push(ClockRegisterTerm::new(
            gate.targets().to_vec(),
            factors,
            clock_dim,
        )?);
    }

    let (a, b) = thresholds(t_steps);
    Ok(RegisterClockHamiltonian {
        m,
        clock_dim,
        in_terms,
        out_term,
        prop_terms,
        a,
        b,
    })
}

/// The compiled 5-local unary-clock instance on m + T qubits: clock qubit c_t
/// (t = 1..T) sits at qubit index m + t − 1 and time t is |1^t 0^{T−t}⟩.
#[derive(Debug, Clone)]
pub struct UnaryHamiltonian {
    m: usize,
    t_steps: usize,
    in_terms: Vec<LocalTerm>,
    out_term: LocalTerm,
    prop_terms: Vec<LocalTerm>,
    clock_terms: Vec<LocalTerm>,
    a: Option<f64>,
    b: Option<f64>,
    /// T = 1 leaves a single clock qubit; both edge rules collide and the
    /// emitted propagation term does not follow the 3-clock-qubit pattern.
    single_clock_qubit_edge_case: bool,
}

impl UnaryHamiltonian {
    pub fn system_qubits(&self) -> usize {
        self.m
    }

    pub fn t_steps(&self) -> usize {
        self.t_steps
    }

    pub fn n_qubits(&self) -> usize {
        self.m + self.t_steps
    }

    pub fn in_terms(&self) -> &[LocalTerm] {
        &self.in_terms
    }

    pub fn out_term(&self) -> &LocalTerm {
        &self.out_term
    }

    pub fn prop_terms(&self) -> &[LocalTerm] {
        &self.prop_terms
    }

    pub fn clock_terms(&self) -> &[LocalTerm] {
        &self.clock_terms
    }

    pub fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        (self.a, self.b)
    }

    pub fn is_single_clock_qubit_edge_case(&self) -> bool {
        self.single_clock_qubit_edge_case
    }

    /// All terms in fixed order (in, out, prop by t, clock by t) as a plain
    /// Hamiltonian.
    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        let mut terms =
            Vec::with_capacity(self.in_terms.len() + 1 + self.prop_terms.len() + self.clock_terms.len());
        terms.extend(self.in_terms.iter().cloned());
        terms.push(self.out_term.clone());
        terms.extend(self.prop_terms.iter().cloned());
        terms.extend(self.clock_terms.iter().cloned());
        HamiltonianSpec::new(self.n_qubits(), terms, self.a, self.b)
    }

    /// H'_prop alone, for residual checks.
    pub fn prop_spec(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.n_qubits(), self.prop_terms.clone(), None, None)
    }

    /// H'_clock alone.
    pub fn clock_spec(&self) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.n_qubits(), self.clock_terms.clone(), None, None)
    }

    /// Basis index of the valid unary clock string for time t, within the T
    /// clock qubits (c_1 most significant).
    pub fn unary_clock_index(&self, t: usize) -> usize {
        unary_code(self.t_steps, t)
    }
}

/// 1^t 0^{T-t} as a T-bit integer with c_1 the most significant bit.
pub fn unary_code(t_steps: usize, t: usize) -> usize {
    debug_assert!(t <= t_steps);
    if t == 0 {
        0
    } else {
        ((1usize << t) - 1) << (t_steps - t)
    }
}

/// Is `code` a valid unary clock string 1^t 0^{T-t}?
pub fn is_valid_unary(t_steps: usize, code: usize) -> bool {
    (0..=t_steps).any(|t| unary_code(t_steps, t) == code)
}

/// Compile the 5-local unary-clock Hamiltonian.
pub fn compile_unary(circuit: &Circuit) -> Result<UnaryHamiltonian> {
    let m = circuit.qubits();
    let t_steps = circuit.t_steps();
    let clock_qubit = |t: usize| m + t - 1; // c_t, t in 1..=T

    // H'_in: wrong input bit at time 0, indicated by c_1 = 0.
    let mut in_terms = Vec::with_capacity(circuit.input_len());
    for (i, &bit) in circuit.input_bits().iter().enumerate() {
        let wrong = if bit { 0 } else { 1 };
        let matrix = kron(&basis_matrix(2, wrong, wrong), &basis_matrix(2, 0, 0));
        in_terms.push(LocalTerm::new(vec![i, clock_qubit(1)], matrix)?);
    }

    // H'_out: output qubit reads 0 at time T, indicated by c_T = 1.
    let out_matrix = kron(&basis_matrix(2, 0, 0), &basis_matrix(2, 1, 1));
    let out_term = LocalTerm::new(
        vec![circuit.output_qubit(), clock_qubit(t_steps)],
        out_matrix,
    )?;

    // H'_prop(t): clock factors on qubits (c_{t-1}, c_t, c_{t+1}) with the
    // first/last bit dropped at the edges.
    let mut prop_terms = Vec::with_capacity(t_steps);
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let t = idx + 1;
        let u = gate.matrix();
        let u_dag = gate.adjoint_matrix();
        let sys_eye = Array2::eye(u.nrows());

        // (clock qubits, stay projectors (two diag indices), hop (row, col))
        let (clock_qubits, stay, hop): (Vec<usize>, (usize, usize), (usize, usize)) =
            if t_steps == 1 {
                // single clock qubit: ½(I⊗I − U⊗|1⟩⟨0| − U†⊗|0⟩⟨1|)
                (vec![clock_qubit(1)], (1, 0), (1, 0))
            } else if t == 1 {
                // |10⟩⟨00| on (c_1, c_2)
                (vec![clock_qubit(1), clock_qubit(2)], (0b10, 0b00), (0b10, 0b00))
            } else if t == t_steps {
                // |11⟩⟨10| on (c_{T-1}, c_T)
                (
                    vec![clock_qubit(t_steps - 1), clock_qubit(t_steps)],
                    (0b11, 0b10),
                    (0b11, 0b10),
                )
            } else {
                // |110⟩⟨100| on (c_{t-1}, c_t, c_{t+1})
                (
                    vec![clock_qubit(t - 1), clock_qubit(t), clock_qubit(t + 1)],
                    (0b110, 0b100),
                    (0b110, 0b100),
                )
            };

        let cdim = 1usize << clock_qubits.len();
        let (after, before) = stay;
        let mut clock_stay = Array2::<C64>::zeros((cdim, cdim));
        clock_stay[(after, after)] = c(1.0);
        clock_stay[(before, before)] = c(1.0);
        let forward = basis_matrix(cdim, hop.0, hop.1);
        let backward = basis_matrix(cdim, hop.1, hop.0);

        let mut matrix = kron(&sys_eye, &clock_stay);
        matrix -= &kron(u, &forward);
        matrix -= &kron(&u_dag, &backward);
        let matrix = matrix.mapv(|z| z * 0.5);

        let mut qubits = gate.targets().to_vec();
        qubits.extend_from_slice(&clock_qubits);
        prop_terms.push(LocalTerm::new(qubits, matrix)?);
    }

    // H'_clock: forbid the pattern |01⟩ on adjacent clock qubits.
    let mut clock_terms = Vec::with_capacity(t_steps.saturating_sub(1));
    for t in 1..t_steps {
        let matrix = basis_matrix(4, 0b01, 0b01);
        clock_terms.push(LocalTerm::new(
            vec![clock_qubit(t), clock_qubit(t + 1)],
            matrix,
        )?);
    }

    let (a, b) = thresholds(t_steps);
    Ok(UnaryHamiltonian {
        m,
        t_steps,
        in_terms,
        out_term,
        prop_terms,
        clock_terms,
        a,
        b,
        single_clock_qubit_edge_case: t_steps == 1,
    })
}

/// The uniform superposition over time leafs of a computation's history.
#[derive(Debug, Clone)]
pub struct HistoryState {
    encoding: ClockEncoding,
    m: usize,
    t_steps: usize,
    amps: Vec<C64>,
}

impl HistoryState {
    pub fn encoding(&self) -> ClockEncoding {
        self.encoding
    }

    pub fn system_qubits(&self) -> usize {
        self.m
    }

    pub fn t_steps(&self) -> usize {
        self.t_steps
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared weight on time leaf t.
    pub fn leaf_weight(&self, t: usize) -> f64 {
        let sys_dim = 1usize << self.m;
        match self.encoding {
            ClockEncoding::Register => {
                let cd = self.t_steps + 1;
                (0..sys_dim).map(|s| self.amps[s * cd + t].norm_sqr()).sum()
            }
            ClockEncoding::Unary => {
                let code = unary_code(self.t_steps, t);
                let cdim = 1usize << self.t_steps;
                (0..sys_dim)
                    .map(|s| self.amps[s * cdim + code].norm_sqr())
                    .sum()
            }
        }
    }

    /// For the unary encoding the history state is a genuine state vector on
    /// m + T qubits.
    pub fn as_statevector(&self) -> Result<StateVector> {
        match self.encoding {
            ClockEncoding::Unary => {
                StateVector::from_amplitudes(self.m + self.t_steps, self.amps.clone())
            }
            ClockEncoding::Register => Err(Error::DimensionMismatch {
                context: "register-clock history state is not a qubit state".into(),
            }),
        }
    }
}

/// Build the history state (1/√(T+1)) Σ_t U_t…U_1 |x, ξ⟩ ⊗ |t⟩ for the given
/// witness ξ and clock encoding.
pub fn history_state(
    circuit: &Circuit,
    witness: &StateVector,
    encoding: ClockEncoding,
) -> Result<HistoryState> {
    let trajectory = run_circuit_trajectory(circuit, witness)?;
    let m = circuit.qubits();
    let t_steps = circuit.t_steps();
    let sys_dim = 1usize << m;
    let weight = c(1.0 / ((t_steps + 1) as f64).sqrt());
    let amps = match encoding {
        ClockEncoding::Register => {
            let cd = t_steps + 1;
            let mut amps = vec![c(0.0); sys_dim * cd];
            for (t, state) in trajectory.iter().enumerate() {
                for (s, &a) in state.amplitudes().iter().enumerate() {
                    amps[s * cd + t] = weight * a;
                }
            }
            amps
        }
        ClockEncoding::Unary => {
            let cdim = 1usize << t_steps;
            let mut amps = vec![c(0.0); sys_dim * cdim];
            for (t, state) in trajectory.iter().enumerate() {
                let code = unary_code(t_steps, t);
                for (s, &a) in state.amplitudes().iter().enumerate() {
                    amps[s * cdim + code] = weight * a;
                }
            }
            amps
        }
    };
    Ok(HistoryState {
        encoding,
        m,
        t_steps,
        amps,
    })
}

/// The block rotation R = Σ_t U_t…U_1 ⊗ |t⟩⟨t| as a dense unitary on the
/// register-clock space, refused above the dense dimension cap.
pub fn rotation(circuit: &Circuit) -> Result<Array2<C64>> {
    let m = circuit.qubits();
    let t_steps = circuit.t_steps();
    let cd = t_steps + 1;
    let sys_dim = 1usize << m;
    let dim = sys_dim * cd;
    if dim > DENSE_DIM_CAP {
        return Err(Error::DenseDimensionCap {
            dim,
            cap: DENSE_DIM_CAP,
        });
    }
    let mut r = Array2::zeros((dim, dim));
    let mut prefix: Array2<C64> = Array2::eye(sys_dim);
    for t in 0..=t_steps {
        if t > 0 {
            let gate = &circuit.gates()[t - 1];
            let map = EmbeddingMap::new(m, gate.targets());
            let full = embed_dense(gate.matrix(), &map);
            prefix = linalg::mat_mul(&full, &prefix);
        }
        for s_out in 0..sys_dim {
            for s_in in 0..sys_dim {
                let v = prefix[(s_out, s_in)];
                if v.norm_sqr() != 0.0 {
                    r[(s_out * cd + t, s_in * cd + t)] = v;
                }
            }
        }
    }
    Ok(r)
}
