//! Local Hermitian terms and their extension to the full register: the shared
//! operator algebra behind the encoder, compiler, and verifier.
//!
//! A `LocalTerm` is a small Hermitian PSD matrix with operator norm at most 1
//! together with the ordered qubits it acts on. A `HamiltonianSpec` is a sum
//! of such terms on N qubits, optionally carrying the decision thresholds
//! (a, b). Sums are applied term by term in a fixed order so results are
//! reproducible bit for bit.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::bits::{accumulate_embedded, embed_dense, EmbeddingMap};
use crate::circuit::StateVector;
use crate::error::{Error, Result};
use crate::linalg;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;
/// Dense materialization is refused above this dimension (2^12).
pub const DENSE_DIM_CAP: usize = 4096;

/// A Hermitian positive semi-definite matrix of norm ≤ 1 acting on the listed
/// qubits. The first listed qubit is the most significant bit of the matrix's
/// basis index.
#[derive(Debug, Clone)]
pub struct LocalTerm {
    qubits: Vec<usize>,
    matrix: Array2<C64>,
}

impl LocalTerm {
    pub fn new(qubits: Vec<usize>, matrix: Array2<C64>) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "term must act on at least one qubit".into(),
            });
        }
        let mut sorted = qubits.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qubits.len() {
            return Err(Error::DuplicateTargets(qubits));
        }
        let dim = 1usize << qubits.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::BadMatrixShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let vals = linalg::eigvalsh(&matrix)?;
        let min = vals[0];
        let max = vals[vals.len() - 1];
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: min,
            });
        }
        if max > 1.0 + NORM_TOL {
            return Err(Error::NormExceedsOne { norm: max });
        }
        Ok(Self { qubits, matrix })
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// Extend the term to an operator on `n_qubits` qubits (identity on the
    /// spectators).
    pub fn embed(&self, n_qubits: usize) -> Result<Embedded<'_>> {
        for &q in &self.qubits {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
        }
        Ok(Embedded {
            matrix: &self.matrix,
            map: EmbeddingMap::new(n_qubits, &self.qubits),
        })
    }
}

/// A term extended to the full register: matrix-free action always, dense
/// materialization below the dimension cap.
#[derive(Debug)]
pub struct Embedded<'a> {
    matrix: &'a Array2<C64>,
    map: EmbeddingMap,
}

impl Embedded<'_> {
    pub fn dim(&self) -> usize {
        1usize << self.map.n
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        self.accumulate(v, &mut out);
        out
    }

    pub fn accumulate(&self, v: &[C64], out: &mut [C64]) {
        accumulate_embedded(self.matrix, &self.map, v, out);
    }

    pub fn dense(&self) -> Result<Array2<C64>> {
        let dim = self.dim();
        if dim > DENSE_DIM_CAP {
            return Err(Error::DenseDimensionCap {
                dim,
                cap: DENSE_DIM_CAP,
            });
        }
        Ok(embed_dense(self.matrix, &self.map))
    }
}

/// H = Σ_i H_i on `n_qubits` qubits with optional thresholds a < b.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<LocalTerm>,
    a: Option<f64>,
    b: Option<f64>,
}

impl HamiltonianSpec {
    pub fn new(
        n_qubits: usize,
        terms: Vec<LocalTerm>,
        a: Option<f64>,
        b: Option<f64>,
    ) -> Result<Self> {
        for term in &terms {
            for &q in term.qubits() {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange {
                        index: q,
                        n_qubits,
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
            n_qubits,
            terms,
            a,
            b,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        (self.a, self.b)
    }

    /// Σ_i (H_i ⊗ I)|v⟩, summed in term order.
    pub fn apply_slice(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: format!("vector length {} vs dimension {}", v.len(), self.dim()),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for term in &self.terms {
            term.embed(self.n_qubits)?.accumulate(v, &mut out);
        }
        Ok(out)
    }

    /// Dense assembly of the full matrix, refused above the dimension cap.
    pub fn dense(&self) -> Result<Array2<C64>> {
        let dim = self.dim();
        if dim > DENSE_DIM_CAP {
            return Err(Error::DenseDimensionCap {
                dim,
                cap: DENSE_DIM_CAP,
            });
        }
        let mut out = Array2::zeros((dim, dim));
        for term in &self.terms {
            out += &term.embed(self.n_qubits)?.dense()?;
        }
        Ok(out)
    }
}

/// H|state⟩ as a raw amplitude vector (not generally normalized).
pub fn apply_hamiltonian(spec: &HamiltonianSpec, state: &StateVector) -> Result<Vec<C64>> {
    if state.qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "state on {} qubits, Hamiltonian on {}",
                state.qubits(),
                spec.n_qubits()
            ),
        });
    }
    spec.apply_slice(state.amplitudes())
}

/// ⟨state|H|state⟩. A state that is off unit norm beyond tolerance is
/// normalized (with a warning); an imaginary residue above 1e-8 is an error.
pub fn expectation(spec: &HamiltonianSpec, state: &StateVector) -> Result<f64> {
    if state.qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "state on {} qubits, Hamiltonian on {}",
                state.qubits(),
                spec.n_qubits()
            ),
        });
    }
    let norm_sq = state.norm_sq();
    let mut amps = state.amplitudes().to_vec();
    if (norm_sq - 1.0).abs() > 1e-10 {
        log::warn!("expectation on non-unit state (norm^2 = {norm_sq}); normalizing");
        let norm = norm_sq.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
    }
    let hv = spec.apply_slice(&amps)?;
    let val = linalg::inner(&amps, &hv);
    if val.im.abs() > 1e-8 {
        return Err(Error::ImaginaryExpectation { imag: val.im });
    }
    Ok(val.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{adjoint, mat_mul, mat_vec};
    use crate::rng::SplitMix64;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn projector_one() -> Array2<C64> {
        array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
    }

    fn random_psd(k: usize, rng: &mut SplitMix64) -> Array2<C64> {
        let d = 1usize << k;
        let mut b = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                b[(i, j)] = c(rng.next_symmetric(), rng.next_symmetric());
            }
        }
        let psd = mat_mul(&adjoint(&b), &b);
        let vals = linalg::eigvalsh(&psd).unwrap();
        let scale = vals[vals.len() - 1].max(1e-12);
        psd.mapv(|z| z / scale)
    }

    fn random_vec(dim: usize, rng: &mut SplitMix64) -> Vec<C64> {
        (0..dim)
            .map(|_| c(rng.next_symmetric(), rng.next_symmetric()))
            .collect()
    }

    /// Brute-force oracle: kron(M, I) on a chosen qubit ordering, conjugated
    /// by the explicit permutation matrix back to natural order.
    fn kron_permutation_oracle(matrix: &Array2<C64>, qubits: &[usize], n: usize) -> Array2<C64> {
        use crate::bits::kron;
        let k = qubits.len();
        let mut order: Vec<usize> = qubits.to_vec();
        for q in 0..n {
            if !order.contains(&q) {
                order.push(q);
            }
        }
        let mut big = matrix.clone();
        for _ in 0..(n - k) {
            big = kron(&big, &Array2::eye(2));
        }
        let dim = 1usize << n;
        let mut perm = Array2::<C64>::zeros((dim, dim));
        for src in 0..dim {
            let mut dst = 0usize;
            for (pos, &q) in order.iter().enumerate() {
                let bit = (src >> (n - 1 - pos)) & 1;
                dst |= bit << (n - 1 - q);
            }
            perm[(dst, src)] = c(1.0, 0.0);
        }
        mat_mul(&mat_mul(&perm, &big), &adjoint(&perm))
    }

    #[test]
    fn projector_embedding_on_basis_states() {
        let term = LocalTerm::new(vec![0], projector_one()).unwrap();
        let embedded = term.embed(2).unwrap();
        let v10: Vec<C64> = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let out = embedded.apply(&v10);
        assert!((out[2] - c(1.0, 0.0)).norm() < 1e-15);
        let v01: Vec<C64> = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = embedded.apply(&v01);
        assert!(out.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn identity_embeds_to_identity() {
        let mut rng = SplitMix64::new(3);
        let term = LocalTerm::new(vec![1, 3], Array2::eye(4)).unwrap();
        let embedded = term.embed(4).unwrap();
        let v = random_vec(16, &mut rng);
        let out = embedded.apply(&v);
        for (a, b) in v.iter().zip(&out) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn embed_matches_kron_permutation_oracle() {
        let mut rng = SplitMix64::new(17);
        let matrix = random_psd(2, &mut rng);
        let term = LocalTerm::new(vec![2, 0], matrix.clone()).unwrap();
        let dense = term.embed(3).unwrap().dense().unwrap();
        let oracle = kron_permutation_oracle(&matrix, &[2, 0], 3);
        for i in 0..8 {
            for j in 0..8 {
                assert!(
                    (dense[(i, j)] - oracle[(i, j)]).norm() < 1e-12,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn empty_spec_applies_to_zero() {
        let spec = HamiltonianSpec::new(2, vec![], None, None).unwrap();
        let state = StateVector::basis_state(2, 1).unwrap();
        let out = apply_hamiltonian(&spec, &state).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn projector_term_on_eigenvector() {
        let term = LocalTerm::new(vec![0], projector_one()).unwrap();
        let spec = HamiltonianSpec::new(1, vec![term], None, None).unwrap();
        let state = StateVector::basis_state(1, 1).unwrap();
        let out = apply_hamiltonian(&spec, &state).unwrap();
        assert!((out[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(out[0].norm() < 1e-12);
        assert!((expectation(&spec, &state).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spec_application_matches_dense_assembly() {
        let mut rng = SplitMix64::new(23);
        let terms = vec![
            LocalTerm::new(vec![0, 2], random_psd(2, &mut rng)).unwrap(),
            LocalTerm::new(vec![1], random_psd(1, &mut rng)).unwrap(),
            LocalTerm::new(vec![3, 1], random_psd(2, &mut rng)).unwrap(),
        ];
        // oracle assembly, independent of HamiltonianSpec::dense
        let mut assembled = Array2::<C64>::zeros((16, 16));
        for term in &terms {
            assembled += &kron_permutation_oracle(term.matrix(), term.qubits(), 4);
        }
        let spec = HamiltonianSpec::new(4, terms, None, None).unwrap();
        let v = random_vec(16, &mut rng);
        let fast = spec.apply_slice(&v).unwrap();
        let slow = mat_vec(&assembled, &v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        // expectation route agrees on a unit state
        let norm = linalg::norm2(&v);
        let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
        let state = StateVector::from_amplitudes(4, unit.clone()).unwrap();
        let direct = expectation(&spec, &state).unwrap();
        let oracle = linalg::inner(&unit, &mat_vec(&assembled, &unit)).re;
        assert!((direct - oracle).abs() < 1e-12);
    }

    #[test]
    fn zero_hamiltonian_expectation() {
        let spec = HamiltonianSpec::new(3, vec![], None, None).unwrap();
        let state = StateVector::basis_state(3, 5).unwrap();
        assert_eq!(expectation(&spec, &state).unwrap(), 0.0);
    }

    #[test]
    fn validator_rejects_bad_terms() {
        let non_hermitian = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(
            LocalTerm::new(vec![0], non_hermitian),
            Err(Error::NotHermitian { .. })
        ));
        let negative = array![[c(-0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            LocalTerm::new(vec![0], negative),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
        let too_big = array![[c(2.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(
            LocalTerm::new(vec![0], too_big),
            Err(Error::NormExceedsOne { .. })
        ));
        let dup = LocalTerm::new(vec![1, 1], Array2::eye(4));
        assert!(dup.is_err());
    }

    #[test]
    fn embedding_is_a_homomorphism_on_sums() {
        let mut rng = SplitMix64::new(8);
        let m1 = random_psd(1, &mut rng);
        let m2 = random_psd(2, &mut rng);
        let t1 = LocalTerm::new(vec![2], m1).unwrap();
        let t2 = LocalTerm::new(vec![0, 1], m2).unwrap();
        let v = random_vec(8, &mut rng);
        let mut sum = t1.embed(3).unwrap().apply(&v);
        for (s, x) in sum.iter_mut().zip(t2.embed(3).unwrap().apply(&v)) {
            *s += x;
        }
        let spec = HamiltonianSpec::new(3, vec![t1, t2], None, None).unwrap();
        let joint = spec.apply_slice(&v).unwrap();
        for (a, b) in sum.iter().zip(&joint) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn qubit_order_swap_conjugation() {
        let mut rng = SplitMix64::new(12);
        let m = random_psd(2, &mut rng);
        // SWAP-conjugate the matrix and swap the qubit list; the embedded
        // operators must agree.
        let mut swap = Array2::<C64>::zeros((4, 4));
        swap[(0, 0)] = c(1.0, 0.0);
        swap[(1, 2)] = c(1.0, 0.0);
        swap[(2, 1)] = c(1.0, 0.0);
        swap[(3, 3)] = c(1.0, 0.0);
        let m_swapped = mat_mul(&mat_mul(&swap, &m), &swap);
        let t_ij = LocalTerm::new(vec![1, 3], m).unwrap();
        let t_ji = LocalTerm::new(vec![3, 1], m_swapped).unwrap();
        let a = t_ij.embed(4).unwrap().dense().unwrap();
        let b = t_ji.embed(4).unwrap().dense().unwrap();
        for i in 0..16 {
            for j in 0..16 {
                assert!((a[(i, j)] - b[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn thresholds_must_be_ordered() {
        assert!(HamiltonianSpec::new(1, vec![], Some(0.5), Some(0.5)).is_err());
        assert!(HamiltonianSpec::new(1, vec![], Some(0.1), Some(0.9)).is_ok());
        assert!(HamiltonianSpec::new(1, vec![], None, Some(0.9)).is_ok());
    }

    #[test]
    fn dense_cap_enforced() {
        let term = LocalTerm::new(vec![0], projector_one()).unwrap();
        let spec = HamiltonianSpec::new(13, vec![term], None, None).unwrap();
        assert!(matches!(
            spec.dense(),
            Err(Error::DenseDimensionCap { .. })
        ));
    }
}
