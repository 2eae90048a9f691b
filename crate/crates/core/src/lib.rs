//! Exact polyvector-field toolkit for multi-Hamiltonian (Nambu) mechanics.
//!
//! The layers, bottom up:
//!
//! * [`poly`]: exact multivariate polynomials and their text format.
//! * [`exterior`]: differential forms and polyvector fields with polynomial
//!   coefficients, including the homotopy operator that inverts `d`.
//! * [`nambu`]: Hamiltonian polyvector fields, Nambu brackets, vector
//!   Hamiltonians and the structural identities around them.
//! * [`flows`]: explicit ODE systems, RK4 integration and invariant drift.
//! * [`lax`]: polynomial matrices and Lax pair verification.
//! * [`ring`]: generalized Pauli matrices and the ring systems they generate.
//! * [`scenario`]: scenario files and the `verify` driver used by the CLI.

pub mod exterior;
pub mod flows;
pub mod lax;
pub mod nambu;
pub mod poly;
pub mod report;
pub mod ring;
pub mod scenario;

pub use poly::{Poly, Polynomial, Vars};
