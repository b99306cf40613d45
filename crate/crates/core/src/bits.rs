//! Basis-index bookkeeping for embedding small operators into an n-qubit
//! register. Qubit 0 is the most significant bit of a basis index, so qubit q
//! occupies bit position n - 1 - q.

use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Bit position (shift) of qubit `q` in an `n`-qubit basis index.
#[inline]
pub fn bit_position(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Value of qubit `q` in basis index `idx` of an `n`-qubit register.
#[inline]
pub fn qubit_value(idx: usize, n: usize, q: usize) -> usize {
    (idx >> bit_position(n, q)) & 1
}

/// Spread `rest` over the bit positions *not* listed in `holes_asc`, leaving
/// zeros at the holes. `holes_asc` must be sorted ascending.
#[inline]
fn spread(rest: usize, holes_asc: &[usize]) -> usize {
    let mut x = rest;
    for &p in holes_asc {
        let low = x & ((1usize << p) - 1);
        x = ((x >> p) << (p + 1)) | low;
    }
    x
}

/// Precomputed index map for a k-qubit operator acting on `qubits` (ordered,
/// first entry = most significant local bit) inside an n-qubit register.
#[derive(Debug, Clone)]
pub struct EmbeddingMap {
    pub n: usize,
    pub local_dim: usize,
    pub rest_dim: usize,
    target_shifts: Vec<usize>,
    hole_positions: Vec<usize>,
}

impl EmbeddingMap {
    /// `qubits` must be distinct and < n; callers validate beforehand.
    pub fn new(n: usize, qubits: &[usize]) -> Self {
        let k = qubits.len();
        let target_shifts: Vec<usize> = qubits.iter().map(|&q| bit_position(n, q)).collect();
        let mut hole_positions = target_shifts.clone();
        hole_positions.sort_unstable();
        Self {
            n,
            local_dim: 1 << k,
            rest_dim: 1 << (n - k),
            target_shifts,
            hole_positions,
        }
    }

    /// Global basis index for spectator configuration `rest` and local
    /// operator index `local`.
    #[inline]
    pub fn global_index(&self, rest: usize, local: usize) -> usize {
        let mut idx = spread(rest, &self.hole_positions);
        let k = self.target_shifts.len();
        for (i, &shift) in self.target_shifts.iter().enumerate() {
            idx |= ((local >> (k - 1 - i)) & 1) << shift;
        }
        idx
    }
}

/// Accumulate `out += (M ⊗ I_rest) v` where `M` acts on `qubits` of an
/// n-qubit register. `v` and `out` have length 2^n.
pub fn accumulate_embedded(
    matrix: &Array2<C64>,
    map: &EmbeddingMap,
    v: &[C64],
    out: &mut [C64],
) {
    let d = map.local_dim;
    let mut gathered = vec![C64::new(0.0, 0.0); d];
    let mut indices = vec![0usize; d];
    for rest in 0..map.rest_dim {
        for l in 0..d {
            let g = map.global_index(rest, l);
            indices[l] = g;
            gathered[l] = v[g];
        }
        for row in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..d {
                acc += matrix[(row, col)] * gathered[col];
            }
            out[indices[row]] += acc;
        }
    }
}

/// Dense 2^n x 2^n matrix acting as `M` on `qubits` and identity elsewhere.
pub fn embed_dense(matrix: &Array2<C64>, map: &EmbeddingMap) -> Array2<C64> {
    let dim = 1usize << map.n;
    let d = map.local_dim;
    let mut out = Array2::zeros((dim, dim));
    for rest in 0..map.rest_dim {
        for row in 0..d {
            let g_row = map.global_index(rest, row);
            for col in 0..d {
                out[(g_row, map.global_index(rest, col))] = matrix[(row, col)];
            }
        }
    }
    out
}

/// Kronecker product with the first factor on the most significant bits.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}
