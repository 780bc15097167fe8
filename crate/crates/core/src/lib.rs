//! Certificates for 2-blind spin-lattice Hamiltonians.
//!
//! Builds the quantum compass (Bacon-Shor) and toric-code Hamiltonians,
//! diagonalizes them densely, and checks that every state in the degenerate
//! ground space has the same few-site reduced density matrices. The spin
//! construction is carried into fermionic Fock space, where the same ground
//! space gives two orthogonal N-fermion states with one extreme 2-RDM.

pub mod blindness;
pub mod error;
pub mod fermion;
pub mod lattice;
pub mod linalg;
pub mod marginals;
pub mod pauli;
pub mod report;
pub mod spectral;
pub mod symplectic;

pub use error::{Error, Result};
