//! Compiler and numerical certification toolkit for translating quantum
//! verification circuits into local Hamiltonian instances.
//!
//! The crate covers the full pipeline at desk scale:
//!
//! * exact statevector simulation of small circuits ([`circuit`]),
//! * local Hermitian term algebra and full-register embedding ([`ops`]),
//! * 3-SAT → 3-local Hamiltonian encoding ([`sat`]),
//! * circuit → Hamiltonian compilation in both the register-clock and the
//!   5-local unary-clock form, history states, and the leaf rotation
//!   ([`compile`]),
//! * dense and Lanczos eigensolvers, clock-walk gap analysis, principal
//!   angles, and the soundness audit ([`spectral`]),
//! * the randomized verification protocol and amplification planning
//!   ([`verify`]),
//! * JSON file formats with reproducible float formatting ([`io`]).

pub mod bits;
pub mod circuit;
pub mod compile;
pub mod error;
pub mod io;
pub mod linalg;
pub mod ops;
pub mod rng;
pub mod sat;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
