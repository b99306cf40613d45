//! 3-SAT to 3-local Hamiltonian encoding.
//!
//! Each clause becomes the rank-1 projector onto its unique unsatisfying
//! assignment, so H|z⟩ = q|z⟩ where q counts the clauses assignment z
//! falsifies. The formula is satisfiable exactly when the ground energy is
//! zero, and the thresholds are a = 0, b = 1.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::ops::{HamiltonianSpec, LocalTerm};

/// A CNF formula with at most three literals per clause. Literals are signed
/// 1-based variable indices, DIMACS style.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    /// Duplicate literals within a clause are collapsed; a clause holding a
    /// variable and its negation is rejected.
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(clauses.len());
        for clause in clauses {
            cleaned.push(clean_clause(&clause, n_vars)?);
        }
        Ok(Self {
            n_vars,
            clauses: cleaned,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Number of clauses `assignment` falsifies; bit v-1 of `assignment`
    /// (counting from the most significant of n_vars bits) is variable v.
    pub fn unsatisfied_count(&self, assignment: usize) -> usize {
        self.clauses
            .iter()
            .filter(|clause| {
                !clause.iter().any(|&lit| {
                    let var = lit.unsigned_abs() as usize;
                    let bit = (assignment >> (self.n_vars - var)) & 1;
                    (lit > 0) == (bit == 1)
                })
            })
            .count()
    }
}

fn clean_clause(clause: &[i32], n_vars: usize) -> Result<Vec<i32>> {
    let mut lits: Vec<i32> = clause.to_vec();
    lits.sort_unstable_by_key(|l| (l.unsigned_abs(), *l < 0));
    lits.dedup();
    if lits.is_empty() || lits.len() > 3 {
        return Err(Error::BadClauseWidth {
            clause: clause.to_vec(),
            got: lits.len(),
        });
    }
    for window in lits.windows(2) {
        if window[0].unsigned_abs() == window[1].unsigned_abs() {
            return Err(Error::TautologicalClause {
                clause: clause.to_vec(),
            });
        }
    }
    for &lit in &lits {
        if lit == 0 || lit.unsigned_abs() as usize > n_vars {
            return Err(Error::LiteralOutOfRange {
                literal: lit,
                n_vars,
            });
        }
    }
    Ok(lits)
}

/// Parse the standard DIMACS CNF format: `c` comment lines, a `p cnf V C`
/// header, and clauses as 0-terminated literal lists (possibly spanning
/// lines). A `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut n_vars: Option<usize> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();

    'lines: for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if n_vars.is_some() {
                return Err(Error::Dimacs("duplicate problem line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Dimacs(format!("bad problem line: {line:?}")));
            }
            let vars: usize = parts[2]
                .parse()
                .map_err(|_| Error::Dimacs(format!("bad variable count: {:?}", parts[2])))?;
            let _declared_clauses: usize = parts[3]
                .parse()
                .map_err(|_| Error::Dimacs(format!("bad clause count: {:?}", parts[3])))?;
            n_vars = Some(vars);
            continue;
        }
        if n_vars.is_none() {
            return Err(Error::Dimacs(format!(
                "clause data before problem line: {line:?}"
            )));
        }
        for token in line.split_whitespace() {
            if token == "%" {
                break 'lines;
            }
            let lit: i32 = token
                .parse()
                .map_err(|_| Error::Dimacs(format!("bad literal: {token:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        return Err(Error::Dimacs("unterminated clause at end of input".into()));
    }
    let n_vars = n_vars.ok_or_else(|| Error::Dimacs("missing problem line".into()))?;
    CnfFormula::new(n_vars, clauses)
}

/// The rank-1 projector onto the clause's unique unsatisfying assignment,
/// acting on the clause's variables in ascending order (variable v on qubit
/// v-1).
pub fn clause_to_term(clause: &[i32]) -> Result<LocalTerm> {
    let mut lits = clause.to_vec();
    lits.sort_unstable_by_key(|l| l.unsigned_abs());
    lits.dedup();
    if lits.is_empty() || lits.len() > 3 {
        return Err(Error::BadClauseWidth {
            clause: clause.to_vec(),
            got: lits.len(),
        });
    }
    for window in lits.windows(2) {
        if window[0].unsigned_abs() == window[1].unsigned_abs() {
            return Err(Error::TautologicalClause {
                clause: clause.to_vec(),
            });
        }
    }
    let k = lits.len();
    // The unsatisfying assignment sets each positive literal to 0 and each
    // negated literal to 1; the first (smallest) variable is the most
    // significant bit.
    let mut unsat_index = 0usize;
    let mut qubits = Vec::with_capacity(k);
    for (i, &lit) in lits.iter().enumerate() {
        if lit == 0 {
            return Err(Error::LiteralOutOfRange {
                literal: lit,
                n_vars: 0,
            });
        }
        qubits.push(lit.unsigned_abs() as usize - 1);
        if lit < 0 {
            unsat_index |= 1 << (k - 1 - i);
        }
    }
    let dim = 1usize << k;
    let mut matrix = Array2::<C64>::zeros((dim, dim));
    matrix[(unsat_index, unsat_index)] = C64::new(1.0, 0.0);
    LocalTerm::new(qubits, matrix)
}

/// Encode the formula as a 3-local Hamiltonian with one projector per clause
/// (duplicate clauses keep their multiplicity) and thresholds a = 0, b = 1.
pub fn encode(formula: &CnfFormula) -> Result<HamiltonianSpec> {
    let terms = formula
        .clauses()
        .iter()
        .map(|clause| clause_to_term(clause))
        .collect::<Result<Vec<_>>>()?;
    HamiltonianSpec::new(formula.n_vars(), terms, Some(0.0), Some(1.0))
}
