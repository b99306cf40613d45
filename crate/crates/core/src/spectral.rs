//! Eigenvalue machinery and the numerical side of the soundness argument.
//!
//! Smallest eigenvalues come from either a dense Hermitian eigendecomposition
//! or a seeded Lanczos iteration with full reorthogonalization. The clock
//! walk analysis exposes the tridiagonal matrix A = I − B whose complement B
//! is the transition matrix of a lazy-at-the-ends random walk on the time
//! line; its spectral gap is bounded below by φ²/2 with conductance
//! φ = 1/(T+1). Principal angles between null spaces feed the geometrical
//! lemma λ_min(H₁+H₂) ≥ λ·sin²(θ/2), and `soundness_audit` assembles the
//! whole lower-bound chain for a compiled rejecting instance.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::circuit::{acceptance_operator, Circuit};
use crate::compile::RegisterClockHamiltonian;
use crate::error::{Error, Result};
use crate::linalg;
use crate::ops::DENSE_DIM_CAP;
use crate::rng::SplitMix64;

/// Eigenvalues below this threshold count as zero when extracting null
/// spaces: an order of magnitude above solver residual, far below the
/// smallest clock gap at desk scale.
pub const NULL_SPACE_TOL: f64 = 1e-9;
/// Hermiticity tolerance on dense eigensolver inputs.
pub const DENSE_HERMITICITY_TOL: f64 = 1e-8;
/// Residual demanded of reported eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Lanczos iteration cap.
pub const LANCZOS_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

/// Result of an eigenvalue computation. Dense runs carry the full ascending
/// spectrum and eigenvectors; Lanczos runs carry the smallest-eigenvalue
/// estimate and its Ritz vector.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub method: Method,
    /// Ascending eigenvalues (dense) or the single smallest estimate
    /// (lanczos).
    pub eigenvalues: Vec<f64>,
    /// ‖Hv − λv‖ for the reported ground pair.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip)]
    pub eigenvectors: Option<Array2<C64>>,
}

impl SpectralReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Full spectrum and eigenvectors of a dense Hermitian matrix.
pub fn dense_eigh(matrix: &Array2<C64>) -> Result<SpectralReport> {
    let dim = matrix.nrows();
    if matrix.ncols() != dim {
        return Err(Error::BadMatrixShape {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
            dim,
        });
    }
    if dim > DENSE_DIM_CAP {
        return Err(Error::DenseDimensionCap {
            dim,
            cap: DENSE_DIM_CAP,
        });
    }
    let dev = linalg::hermiticity_deviation(matrix);
    if dev > DENSE_HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (vals, vecs) = linalg::eigh(matrix)?;
    let ground: Vec<C64> = vecs.column(0).to_vec();
    let hv = linalg::mat_vec(matrix, &ground);
    let residual = hv
        .iter()
        .zip(&ground)
        .map(|(h, v)| (h - v * vals[0]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(SpectralReport {
        method: Method::Dense,
        eigenvalues: vals.to_vec(),
        residual,
        iterations: 0,
        converged: true,
        eigenvectors: Some(vecs),
    })
}

/// A Hermitian operator given by its action on vectors.
pub trait HermitianOp {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[C64]) -> Vec<C64>;
}

impl HermitianOp for Array2<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        linalg::mat_vec(self, v)
    }
}

impl HermitianOp for crate::ops::HamiltonianSpec {
    fn dim(&self) -> usize {
        crate::ops::HamiltonianSpec::dim(self)
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.apply_slice(v).expect("dimension checked by caller")
    }
}

impl HermitianOp for RegisterClockHamiltonian {
    fn dim(&self) -> usize {
        RegisterClockHamiltonian::dim(self)
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.apply_slice(v).expect("dimension checked by caller")
    }
}

fn smallest_ritz_pair(alphas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>)> {
    let k = alphas.len();
    let mut tri = Array2::<f64>::zeros((k, k));
    for i in 0..k {
        tri[(i, i)] = alphas[i];
        if i + 1 < k {
            tri[(i, i + 1)] = betas[i];
            tri[(i + 1, i)] = betas[i];
        }
    }
    let (vals, vecs) = linalg::eigh_real(&tri)?;
    Ok((vals[0], vecs.column(0).to_vec()))
}

/// Smallest eigenvalue of a matrix-free Hermitian operator by Lanczos
/// iteration with full reorthogonalization. Deterministic for a given seed;
/// non-convergence is reported, never silent.
pub fn lanczos_min_eig(op: &dyn HermitianOp, seed: u64) -> Result<SpectralReport> {
    let dim = op.dim();
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            context: "operator dimension is zero".into(),
        });
    }
    if dim == 1 {
        let v = vec![C64::new(1.0, 0.0)];
        let hv = op.apply(&v);
        let val = hv[0].re;
        return Ok(SpectralReport {
            method: Method::Lanczos,
            eigenvalues: vec![val],
            residual: hv[0].im.abs(),
            iterations: 1,
            converged: true,
            eigenvectors: Some(Array2::from_shape_vec((1, 1), v).unwrap()),
        });
    }

    let mut rng = SplitMix64::new(seed);
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.next_symmetric(), rng.next_symmetric()))
        .collect();
    let norm = linalg::norm2(&v);
    for x in &mut v {
        *x /= norm;
    }

    let max_iter = LANCZOS_MAX_ITER.min(dim);
    let mut basis: Vec<Vec<C64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    for j in 0..max_iter {
        let vj = basis[j].clone();
        let mut w = op.apply(&vj);
        let alpha = linalg::inner(&vj, &w).re;
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&vj) {
            *wi -= vi * alpha;
        }
        if j > 0 {
            let beta_prev = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * beta_prev;
            }
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for u in &basis {
                let overlap = linalg::inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ui * overlap;
                }
            }
        }
        let beta = linalg::norm2(&w);

        // exact invariant subspace: the tridiagonal eigenpair is exact
        if beta < 1e-13 {
            break;
        }
        if j + 1 == max_iter {
            break;
        }
        betas.push(beta);
        for x in &mut w {
            *x /= beta;
        }
        basis.push(w);

        // cheap convergence probe on the Ritz residual estimate
        if (j + 1) % 10 == 0 {
            let (_, ritz) = smallest_ritz_pair(&alphas, &betas[..alphas.len() - 1])?;
            let est = beta * ritz[ritz.len() - 1].abs();
            if est < 1e-11 {
                break;
            }
        }
    }

    let k = alphas.len();
    let (theta, ritz) = smallest_ritz_pair(&alphas, &betas[..k - 1])?;
    let mut ground = vec![C64::new(0.0, 0.0); dim];
    for (coeff, vec) in ritz.iter().zip(&basis) {
        for (g, x) in ground.iter_mut().zip(vec) {
            *g += x * *coeff;
        }
    }
    let gnorm = linalg::norm2(&ground);
    for g in &mut ground {
        *g /= gnorm;
    }
    let hv = op.apply(&ground);
    let residual = hv
        .iter()
        .zip(&ground)
        .map(|(h, g)| (h - g * theta).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let converged = residual <= RESIDUAL_TOL;
    Ok(SpectralReport {
        method: Method::Lanczos,
        eigenvalues: vec![theta],
        residual,
        iterations: k,
        converged,
        eigenvectors: Some(
            Array2::from_shape_vec((dim, 1), ground).expect("ground vector shape"),
        ),
    })
}

/// The clock-walk pair: tridiagonal A with diagonal (½, 1, …, 1, ½) and
/// off-diagonals −½, and the stochastic complement B = I − A.
#[derive(Debug, Clone, Serialize)]
pub struct ClockWalk {
    pub t_steps: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    pub conductance: f64,
    /// φ²/2 = 1/(2(T+1)²).
    pub gap_bound: f64,
    /// Second-smallest eigenvalue of A, computed numerically.
    pub second_smallest: f64,
    /// second_smallest ≥ gap_bound within 1e-10.
    pub gap_holds: bool,
    #[serde(skip)]
    a_matrix: Array2<f64>,
    #[serde(skip)]
    b_matrix: Array2<f64>,
}

impl ClockWalk {
    pub fn a_matrix(&self) -> &Array2<f64> {
        &self.a_matrix
    }

    pub fn b_matrix(&self) -> &Array2<f64> {
        &self.b_matrix
    }
}

/// Build and analyze the clock walk for T ≥ 1 time steps.
pub fn clock_walk(t_steps: usize) -> Result<ClockWalk> {
    if t_steps < 1 {
        return Err(Error::DimensionMismatch {
            context: "clock walk needs T >= 1".into(),
        });
    }
    let n = t_steps + 1;
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        a[(i, i)] = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        if i + 1 < n {
            a[(i, i + 1)] = -0.5;
            a[(i + 1, i)] = -0.5;
        }
    }
    let b = {
        let mut b = Array2::<f64>::eye(n);
        b -= &a;
        b
    };
    let (vals, _) = linalg::eigh_real(&a)?;
    let conductance = 1.0 / n as f64;
    let gap_bound = conductance * conductance / 2.0;
    let second_smallest = vals[1];
    Ok(ClockWalk {
        t_steps,
        a: to_rows(&a),
        b: to_rows(&b),
        conductance,
        gap_bound,
        second_smallest,
        gap_holds: second_smallest >= gap_bound - 1e-10,
        a_matrix: a,
        b_matrix: b,
    })
}

fn to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).to_vec()).collect()
}

/// Orthonormal basis (columns) of the eigenspace with eigenvalues below
/// `tol`, for a Hermitian PSD matrix.
pub fn null_space(matrix: &Array2<C64>, tol: f64) -> Result<Array2<C64>> {
    let report = dense_eigh(matrix)?;
    if report.eigenvalues[0] < -tol {
        return Err(Error::NotPositiveSemiDefinite {
            min_eigenvalue: report.eigenvalues[0],
        });
    }
    let vecs = report.eigenvectors.expect("dense report carries vectors");
    let count = report.eigenvalues.iter().take_while(|&&v| v < tol).count();
    let dim = matrix.nrows();
    let mut basis = Array2::zeros((dim, count));
    for k in 0..count {
        for i in 0..dim {
            basis[(i, k)] = vecs[(i, k)];
        }
    }
    Ok(basis)
}

/// Principal angle between two subspaces given by orthonormal column bases:
/// cos θ is the largest singular value of B₁†B₂, the cosine of the minimal
/// angle between the subspaces.
#[derive(Debug, Clone, Serialize)]
pub struct AngleReport {
    pub dim_n1: usize,
    pub dim_n2: usize,
    pub cos_theta: f64,
    pub theta: f64,
    pub sin2_half_theta: f64,
}

impl AngleReport {
    /// Check sin²(θ/2) against the time-dependent lower bound 1/(2(T+1)).
    pub fn time_bound(t_steps: usize) -> f64 {
        1.0 / (2.0 * (t_steps as f64 + 1.0))
    }

    pub fn meets_time_bound(&self, t_steps: usize, tol: f64) -> bool {
        self.sin2_half_theta >= Self::time_bound(t_steps) - tol
    }
}

fn check_orthonormal(basis: &Array2<C64>) -> Result<()> {
    let k = basis.ncols();
    if k == 0 {
        return Err(Error::EmptySubspace);
    }
    let gram = linalg::adjoint_mul(basis, basis);
    let mut dev: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - C64::new(expect, 0.0)).norm());
        }
    }
    if dev > 1e-8 {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    Ok(())
}

pub fn principal_angle(n1_basis: &Array2<C64>, n2_basis: &Array2<C64>) -> Result<AngleReport> {
    if n1_basis.nrows() != n2_basis.nrows() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "ambient dimensions differ: {} vs {}",
                n1_basis.nrows(),
                n2_basis.nrows()
            ),
        });
    }
    check_orthonormal(n1_basis)?;
    check_orthonormal(n2_basis)?;
    let overlap = linalg::adjoint_mul(n1_basis, n2_basis);
    let svals = linalg::singular_values(&overlap)?;
    let raw = svals[0];
    if raw > 1.0 + 1e-12 {
        return Err(Error::Linalg(format!(
            "largest singular value {raw} exceeds 1 beyond tolerance"
        )));
    }
    let cos_theta = raw.clamp(0.0, 1.0);
    let theta = cos_theta.acos();
    Ok(AngleReport {
        dim_n1: n1_basis.ncols(),
        dim_n2: n2_basis.ncols(),
        cos_theta,
        theta,
        sin2_half_theta: (1.0 - cos_theta) / 2.0,
    })
}

/// λ_min(H₁+H₂) ≥ λ·sin²(θ/2) with λ the smaller of the two second
/// eigenvalues and θ the principal angle between the null spaces.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lambda: f64,
    pub theta: f64,
    pub bound: f64,
    pub actual_min: f64,
    pub holds: bool,
    /// True when either null space is empty and the lemma says nothing.
    pub vacuous: bool,
}

fn second_eigenvalue(eigenvalues: &[f64], tol: f64) -> f64 {
    eigenvalues.iter().copied().find(|&v| v >= tol).unwrap_or(0.0)
}

pub fn geometric_lemma_check(h1: &Array2<C64>, h2: &Array2<C64>) -> Result<LemmaReport> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("H1 is {:?}, H2 is {:?}", h1.dim(), h2.dim()),
        });
    }
    let e1 = dense_eigh(h1)?;
    let e2 = dense_eigh(h2)?;
    for report in [&e1, &e2] {
        if report.eigenvalues[0] < -NULL_SPACE_TOL {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: report.eigenvalues[0],
            });
        }
    }
    let sum = h1 + h2;
    let actual_min = dense_eigh(&sum)?.eigenvalues[0];

    let n1 = null_space(h1, NULL_SPACE_TOL)?;
    let n2 = null_space(h2, NULL_SPACE_TOL)?;
    if n1.ncols() == 0 || n2.ncols() == 0 {
        return Ok(LemmaReport {
            lambda: 0.0,
            theta: 0.0,
            bound: 0.0,
            actual_min,
            holds: true,
            vacuous: true,
        });
    }
    let angle = principal_angle(&n1, &n2)?;
    let lambda = second_eigenvalue(&e1.eigenvalues, NULL_SPACE_TOL)
        .min(second_eigenvalue(&e2.eigenvalues, NULL_SPACE_TOL));
    let bound = lambda * angle.sin2_half_theta;
    Ok(LemmaReport {
        lambda,
        theta: angle.theta,
        bound,
        actual_min,
        holds: actual_min >= bound - 1e-10,
        vacuous: false,
    })
}

/// Numerical audit of the soundness lower bound for a compiled rejecting
/// register-clock instance.
#[derive(Debug, Clone, Serialize)]
pub struct SoundnessAudit {
    pub t_steps: usize,
    /// Largest acceptance probability over all witness states.
    pub max_acceptance: f64,
    pub lambda_min: f64,
    /// 1/(4(T+1)³).
    pub bound: f64,
    /// λ_min ≥ bound within 1e-10.
    pub holds: bool,
    pub h1_second_eigenvalue: f64,
    pub h1_gap_ok: bool,
    pub prop_second_eigenvalue: f64,
    /// 1/(2(T+1)²).
    pub prop_gap_bound: f64,
    pub prop_gap_ok: bool,
    pub sin2_half_theta: f64,
    /// 1/(2(T+1)) — the angle-lemma constant as stated; see `angle_bound_ok`.
    pub angle_bound: f64,
    pub angle_bound_ok: bool,
    pub lemma: LemmaReport,
}

/// Run the full soundness audit. Refused unless the circuit verifiably
/// rejects: the acceptance operator norm over the witness space must be at
/// most 1e-6.
pub fn soundness_audit(
    circuit: &Circuit,
    instance: &RegisterClockHamiltonian,
) -> Result<SoundnessAudit> {
    let gram = acceptance_operator(circuit)?;
    let acc_vals = linalg::eigvalsh(&gram)?;
    let max_acceptance = acc_vals[acc_vals.len() - 1].max(0.0);
    if max_acceptance > 1e-6 {
        return Err(Error::AuditRefused { max_acceptance });
    }

    let t_steps = instance.t_steps();
    let t1 = t_steps as f64 + 1.0;
    let h1 = instance.in_out_dense()?;
    let hp = instance.prop_dense()?;
    let h = &h1 + &hp;

    let e1 = dense_eigh(&h1)?;
    let ep = dense_eigh(&hp)?;
    let eh = dense_eigh(&h)?;

    let h1_second = second_eigenvalue(&e1.eigenvalues, NULL_SPACE_TOL);
    let prop_second = second_eigenvalue(&ep.eigenvalues, NULL_SPACE_TOL);
    let prop_gap_bound = 1.0 / (2.0 * t1 * t1);

    let n1 = null_space(&h1, NULL_SPACE_TOL)?;
    let n2 = null_space(&hp, NULL_SPACE_TOL)?;
    let angle = principal_angle(&n1, &n2)?;
    let angle_bound = AngleReport::time_bound(t_steps);

    let lemma = geometric_lemma_check(&h1, &hp)?;

    let lambda_min = eh.eigenvalues[0];
    let bound = 1.0 / (4.0 * t1 * t1 * t1);
    Ok(SoundnessAudit {
        t_steps,
        max_acceptance,
        lambda_min,
        bound,
        holds: lambda_min >= bound - 1e-10,
        h1_second_eigenvalue: h1_second,
        h1_gap_ok: h1_second >= 1.0 - 1e-9,
        prop_second_eigenvalue: prop_second,
        prop_gap_bound,
        prop_gap_ok: prop_second >= prop_gap_bound - 1e-10,
        sin2_half_theta: angle.sin2_half_theta,
        angle_bound,
        angle_bound_ok: angle.sin2_half_theta >= angle_bound - 1e-9,
        lemma,
    })
}
