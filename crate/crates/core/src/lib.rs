//! Certified product-state bounds on the extremal eigenvalues of k-local
//! qubit Hamiltonians.
//!
//! A Hamiltonian given as a weighted Pauli sum is mapped to a low-degree
//! polynomial on the Boolean cube by evaluating it on tensor products of the
//! four tetrahedral single-qubit states ([`qc_map`]). Every point of the cube
//! is a product state, so any value the polynomial attains is attained by
//! `⟨ψ|H|ψ⟩` for an explicit `ψ`. On that polynomial we run
//!
//! * a greedy coefficient-elimination optimizer whose result is guaranteed to
//!   exceed `f̂(∅) + W/(2dℓ)` ([`greedy`]), giving ground-state energy (and
//!   top eigenvalue) bounds, and
//! * a seeded random sampler certifying operator-norm lower bounds
//!   ([`sampler`]).
//!
//! [`exact`] provides the small-instance ground truth (matrix-free Lanczos,
//! exhaustive product-state and diagonal scans) used to cross-check both.

pub mod cli;
pub mod error;
pub mod exact;
pub mod greedy;
pub mod instances;
pub mod pauli;
pub mod poly;
pub mod qc_map;
pub mod sampler;
pub mod verify;

pub use error::{Error, Result};
pub use greedy::{greedy_maximize, max_energy_bound, min_energy_bound, BoundCertificate, EnergyBound};
pub use pauli::{Hamiltonian, HamiltonianStats, Pauli, PauliString};
pub use poly::{Assignment, BooleanPolynomial, Monomial};
pub use qc_map::{hamiltonian_to_poly, ProductState, TetrahedronState};
pub use sampler::{sample_norm_bound, SampleReport};
