//! The randomized verification protocol and amplification planning.
//!
//! Given H = Σ_i H_i with r PSD terms of norm at most 1, the verifier picks a
//! term index uniformly, attaches an ancilla qubit, applies the unitary that
//! rotates each eigenvector |α_j⟩ of H_i by √w_j |0⟩ + √(1−w_j) |1⟩ on the
//! ancilla, and measures the ancilla. The ancilla reads 1 with probability
//! 1 − ⟨η|H_i|η⟩, so the overall acceptance probability is
//! 1 − ⟨η|H|η⟩/r. Repetition counts for amplifying a (c, s) gap follow the
//! two-sided Hoeffding bound 2·exp(−m(c−s)²/2) ≤ δ.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::circuit::StateVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::ops::{expectation, HamiltonianSpec, LocalTerm};
use crate::rng::SplitMix64;

/// Spectral decomposition of a local term: H_i = Σ_j w_j |α_j⟩⟨α_j| with
/// eigenvalues in [0, 1].
#[derive(Debug, Clone)]
pub struct TermDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `eigenvalues`.
    pub eigenvectors: Array2<C64>,
}

impl TermDecomposition {
    /// Σ_j w_j |α_j⟩⟨α_j| reassembled.
    pub fn reconstruct(&self) -> Array2<C64> {
        let dim = self.eigenvectors.nrows();
        let mut out = Array2::zeros((dim, dim));
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            for i in 0..dim {
                for j in 0..dim {
                    out[(i, j)] +=
                        C64::new(w, 0.0) * self.eigenvectors[(i, k)] * self.eigenvectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a term, with eigenvalues checked against [0, 1].
pub fn decompose_term(term: &LocalTerm) -> Result<TermDecomposition> {
    let (vals, vecs) = linalg::eigh(term.matrix())?;
    for &v in vals.iter() {
        if !(-1e-10..=1.0 + 1e-10).contains(&v) {
            return Err(Error::EigenvalueOutOfRange { value: v });
        }
    }
    let eigenvalues: Vec<f64> = vals.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Ok(TermDecomposition {
        eigenvalues,
        eigenvectors: vecs,
    })
}

/// Probability that the ancilla coin reads 1 for term H_i on `state`:
/// exactly 1 − ⟨state|H_i|state⟩.
pub fn coin_probability(term: &LocalTerm, state: &StateVector) -> Result<f64> {
    let spec = HamiltonianSpec::new(state.qubits(), vec![term.clone()], None, None)?;
    let e = expectation(&spec, state)?;
    let p = 1.0 - e;
    if !(-1e-10..=1.0 + 1e-10).contains(&p) {
        return Err(Error::EigenvalueOutOfRange { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Exact and optionally sampled acceptance probability of the protocol.
#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceEstimate {
    #[serde(rename = "exact")]
    pub exact_probability: f64,
    #[serde(rename = "sampled")]
    pub sampled_frequency: Option<f64>,
    pub shots: u64,
    pub seed: u64,
    #[serde(rename = "stderr")]
    pub standard_error: f64,
}

/// Run the verification protocol on `state`. The exact probability averages
/// the per-term coin probabilities; with `shots` > 0, Monte Carlo rounds draw
/// a uniform term index and a Bernoulli coin from a per-shot stream derived
/// from (seed, shot).
pub fn protocol_accept_probability(
    spec: &HamiltonianSpec,
    state: &StateVector,
    shots: u64,
    seed: u64,
) -> Result<AcceptanceEstimate> {
    let r = spec.term_count();
    if r == 0 {
        return Err(Error::EmptySpec);
    }
    if state.qubits() != spec.n_qubits() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "state on {} qubits, Hamiltonian on {}",
                state.qubits(),
                spec.n_qubits()
            ),
        });
    }
    let mut coins = Vec::with_capacity(r);
    for term in spec.terms() {
        coins.push(coin_probability(term, state)?);
    }
    let exact = coins.iter().sum::<f64>() / r as f64;

    let (sampled, standard_error) = if shots > 0 {
        let mut accepted = 0u64;
        for shot in 0..shots {
            let mut stream = SplitMix64::stream(seed, shot);
            let i = stream.next_index(r);
            if stream.next_f64() < coins[i] {
                accepted += 1;
            }
        }
        (
            Some(accepted as f64 / shots as f64),
            (exact * (1.0 - exact) / shots as f64).sqrt(),
        )
    } else {
        (None, 0.0)
    };

    Ok(AcceptanceEstimate {
        exact_probability: exact,
        sampled_frequency: sampled,
        shots,
        seed,
        standard_error,
    })
}

/// Parallel-repetition plan: run the verifier m times and accept when the
/// accept count exceeds (c+s)/2 · m.
#[derive(Debug, Clone, Serialize)]
pub struct AmplificationPlan {
    pub completeness: f64,
    pub soundness: f64,
    pub target_error: f64,
    pub repetitions: u64,
    pub decision_threshold: f64,
}

/// Smallest m with 2·exp(−m(c−s)²/2) ≤ δ; a target error of 1 or more is
/// vacuous and needs a single run.
pub fn plan_amplification(c: f64, s: f64, delta: f64) -> Result<AmplificationPlan> {
    if c <= s {
        return Err(Error::BadAmplificationGap { c, s });
    }
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&c) {
        return Err(Error::BadAmplificationGap { c, s });
    }
    if delta <= 0.0 {
        return Err(Error::BadTargetError { delta });
    }
    let repetitions = if delta >= 1.0 {
        1
    } else {
        let gap = c - s;
        let m = (2.0 * (2.0 / delta).ln() / (gap * gap)).ceil();
        (m as u64).max(1)
    };
    Ok(AmplificationPlan {
        completeness: c,
        soundness: s,
        target_error: delta,
        repetitions,
        decision_threshold: (c + s) / 2.0 * repetitions as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::kron;
    use crate::ops::apply_hamiltonian;
    use crate::rng::SplitMix64;
    use crate::sat;
    use ndarray::{array, Array2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_psd_term(qubits: Vec<usize>, rng: &mut SplitMix64) -> LocalTerm {
        let d = 1usize << qubits.len();
        let mut b = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                b[(i, j)] = c(rng.next_symmetric(), rng.next_symmetric());
            }
        }
        let psd = linalg::mat_mul(&linalg::adjoint(&b), &b);
        let vals = linalg::eigvalsh(&psd).unwrap();
        let scale = vals[vals.len() - 1].max(1e-12) * (1.0 + 0.5 * rng.next_f64());
        LocalTerm::new(qubits, psd.mapv(|z| z / scale)).unwrap()
    }

    fn random_state(m: usize, rng: &mut SplitMix64) -> StateVector {
        let dim = 1usize << m;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| c(rng.next_symmetric(), rng.next_symmetric()))
            .collect();
        let norm = linalg::norm2(&amps);
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::from_amplitudes(m, amps).unwrap()
    }

    #[test]
    fn decompose_projector() {
        let term = sat::clause_to_term(&[1, 2, -3]).unwrap();
        let decomp = decompose_term(&term).unwrap();
        let ones: Vec<usize> = decomp
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &w)| (w - 1.0).abs() < 1e-12)
            .map(|(k, _)| k)
            .collect();
        assert_eq!(ones.len(), 1);
        // the w = 1 eigenvector is |001⟩
        let k = ones[0];
        assert!((decomp.eigenvectors[(1, k)].norm() - 1.0).abs() < 1e-10);
        assert!(decomp.eigenvalues.iter().filter(|&&w| w < 1e-12).count() == 7);
    }

    #[test]
    fn decompose_scalar_half() {
        let half = array![[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.5, 0.0)]];
        let term = LocalTerm::new(vec![0], half).unwrap();
        let decomp = decompose_term(&term).unwrap();
        assert!(decomp.eigenvalues.iter().all(|&w| (w - 0.5).abs() < 1e-12));
    }

    #[test]
    fn decompose_reconstructs_random_terms() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..10 {
            let term = random_psd_term(vec![0, 1], &mut rng);
            let decomp = decompose_term(&term).unwrap();
            let rec = decomp.reconstruct();
            for i in 0..4 {
                for j in 0..4 {
                    assert!((rec[(i, j)] - term.matrix()[(i, j)]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn coin_probability_trivial_cases() {
        // zero term always outputs 1
        let zero = LocalTerm::new(vec![0], Array2::zeros((2, 2))).unwrap();
        let state = StateVector::basis_state(1, 0).unwrap();
        assert!((coin_probability(&zero, &state).unwrap() - 1.0).abs() < 1e-15);

        // eigenstate with w = 1 never outputs 1
        let proj = LocalTerm::new(
            vec![0],
            array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap();
        let one = StateVector::basis_state(1, 1).unwrap();
        assert!(coin_probability(&proj, &one).unwrap() < 1e-15);
    }

    /// Explicit ancilla oracle: build the coin unitary
    /// T = Σ_j |α_j⟩⟨α_j| ⊗ R(w_j) on (term qubits) + ancilla by brute-force
    /// dense algebra on N+1 qubits, apply it to state ⊗ |0⟩ and accumulate
    /// the probability of ancilla = 1.
    fn ancilla_oracle(term: &LocalTerm, state: &StateVector) -> f64 {
        let n = state.qubits();
        let decomp = decompose_term(term).unwrap();
        let k = term.arity();
        let local_dim = 1usize << k;
        // coin unitary on k+1 qubits, ancilla least significant
        let mut coin = Array2::<C64>::zeros((2 * local_dim, 2 * local_dim));
        for (j, &w) in decomp.eigenvalues.iter().enumerate() {
            let root_w = w.sqrt();
            let root_not = (1.0 - w).sqrt();
            let rot = array![
                [c(root_w, 0.0), c(-root_not, 0.0)],
                [c(root_not, 0.0), c(root_w, 0.0)]
            ];
            let mut alpha = Array2::<C64>::zeros((local_dim, local_dim));
            for a in 0..local_dim {
                for b in 0..local_dim {
                    alpha[(a, b)] =
                        decomp.eigenvectors[(a, j)] * decomp.eigenvectors[(b, j)].conj();
                }
            }
            coin += &kron(&alpha, &rot);
        }
        // embed over n+1 qubits: term qubits keep their indices, ancilla is
        // qubit n (least significant)
        let mut qubits = term.qubits().to_vec();
        qubits.push(n);
        let full = {
            use crate::bits::{embed_dense, EmbeddingMap};
            let map = EmbeddingMap::new(n + 1, &qubits);
            embed_dense(&coin, &map)
        };
        // state ⊗ |0⟩ on the ancilla
        let mut big = vec![c(0.0, 0.0); 1 << (n + 1)];
        for (idx, &a) in state.amplitudes().iter().enumerate() {
            big[idx << 1] = a;
        }
        let evolved = linalg::mat_vec(&full, &big);
        evolved
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & 1 == 1)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    #[test]
    fn coin_probability_matches_ancilla_oracle() {
        let mut rng = SplitMix64::new(99);
        for trial in 0..20 {
            let n = 3;
            let qubits = if trial % 2 == 0 { vec![1] } else { vec![2, 0] };
            let term = random_psd_term(qubits, &mut rng);
            let state = random_state(n, &mut rng);
            let fast = coin_probability(&term, &state).unwrap();
            let oracle = ancilla_oracle(&term, &state);
            assert!(
                (fast - oracle).abs() < 1e-10,
                "trial {trial}: {fast} vs {oracle}"
            );
        }
    }

    #[test]
    fn exact_probability_on_projector_null_vector() {
        let proj = LocalTerm::new(
            vec![0],
            array![[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        )
        .unwrap();
        let spec = HamiltonianSpec::new(1, vec![proj], None, None).unwrap();
        let zero = StateVector::basis_state(1, 0).unwrap();
        let est = protocol_accept_probability(&spec, &zero, 0, 0).unwrap();
        assert!((est.exact_probability - 1.0).abs() < 1e-15);
        assert!(est.sampled_frequency.is_none());
    }

    #[test]
    fn contradiction_sat_instance_accepts_half() {
        let formula = sat::CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
        let spec = sat::encode(&formula).unwrap();
        let state = StateVector::basis_state(1, 0).unwrap();
        let est = protocol_accept_probability(&spec, &state, 0, 0).unwrap();
        assert!((est.exact_probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_matches_expectation_formula() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..10 {
            let n = 3;
            let terms = vec![
                random_psd_term(vec![0, 1], &mut rng),
                random_psd_term(vec![2], &mut rng),
                random_psd_term(vec![1, 2], &mut rng),
            ];
            let spec = HamiltonianSpec::new(n, terms, None, None).unwrap();
            let state = random_state(n, &mut rng);
            let est = protocol_accept_probability(&spec, &state, 0, 0).unwrap();
            let formula = 1.0 - expectation(&spec, &state).unwrap() / spec.term_count() as f64;
            assert!((est.exact_probability - formula).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        let mut rng = SplitMix64::new(8);
        let spec = HamiltonianSpec::new(
            2,
            vec![
                random_psd_term(vec![0], &mut rng),
                random_psd_term(vec![0, 1], &mut rng),
            ],
            None,
            None,
        )
        .unwrap();
        let state = random_state(2, &mut rng);
        let a = protocol_accept_probability(&spec, &state, 50_000, 42).unwrap();
        let b = protocol_accept_probability(&spec, &state, 50_000, 42).unwrap();
        assert_eq!(a.sampled_frequency, b.sampled_frequency);
        let sampled = a.sampled_frequency.unwrap();
        assert!(
            (sampled - a.exact_probability).abs() <= 5.0 * a.standard_error,
            "sampled {sampled} vs exact {} (se {})",
            a.exact_probability,
            a.standard_error
        );
        let c = protocol_accept_probability(&spec, &state, 50_000, 43).unwrap();
        assert_ne!(a.sampled_frequency, c.sampled_frequency);
    }

    #[test]
    fn empty_spec_is_rejected() {
        let spec = HamiltonianSpec::new(1, vec![], None, None).unwrap();
        let state = StateVector::basis_state(1, 0).unwrap();
        assert!(matches!(
            protocol_accept_probability(&spec, &state, 0, 0),
            Err(Error::EmptySpec)
        ));
    }

    #[test]
    fn shot_average_linearity_over_terms() {
        // the exact path is the uniform average of per-term coins, which is
        // 1 − Σ⟨H_i⟩/r by linearity
        let mut rng = SplitMix64::new(21);
        let terms: Vec<LocalTerm> = (0..4).map(|_| random_psd_term(vec![0, 1], &mut rng)).collect();
        let spec = HamiltonianSpec::new(2, terms, None, None).unwrap();
        let state = random_state(2, &mut rng);
        let per_term: f64 = spec
            .terms()
            .iter()
            .map(|t| coin_probability(t, &state).unwrap())
            .sum::<f64>()
            / 4.0;
        let hv = apply_hamiltonian(&spec, &state).unwrap();
        let total = 1.0 - linalg::inner(state.amplitudes(), &hv).re / 4.0;
        assert!((per_term - total).abs() < 1e-12);
    }

    #[test]
    fn amplification_plan_examples() {
        let plan = plan_amplification(2.0 / 3.0, 1.0 / 3.0, 1e-9).unwrap();
        assert_eq!(plan.repetitions, 386);
        assert!((plan.decision_threshold - 0.5 * 386.0).abs() < 1e-12);

        let plan = plan_amplification(1.0, 0.0, 0.5).unwrap();
        assert_eq!(plan.repetitions, 3);

        let plan = plan_amplification(0.9, 0.1, 1.0).unwrap();
        assert_eq!(plan.repetitions, 1);
    }

    #[test]
    fn amplification_plan_monotonicity() {
        // m nonincreasing in the gap
        let mut last = u64::MAX;
        for gap in [0.1, 0.2, 0.4, 0.8] {
            let plan = plan_amplification(0.5 + gap / 2.0, 0.5 - gap / 2.0, 1e-6).unwrap();
            assert!(plan.repetitions <= last);
            last = plan.repetitions;
        }
        // m nondecreasing as delta shrinks
        let mut last = 0u64;
        for delta in [1e-2, 1e-4, 1e-8, 1e-12] {
            let plan = plan_amplification(0.75, 0.25, delta).unwrap();
            assert!(plan.repetitions >= last);
            last = plan.repetitions;
        }
    }

    #[test]
    fn amplification_rejects_bad_parameters() {
        assert!(plan_amplification(0.3, 0.3, 0.1).is_err());
        assert!(plan_amplification(0.2, 0.5, 0.1).is_err());
        assert!(plan_amplification(0.8, 0.2, 0.0).is_err());
    }
}
