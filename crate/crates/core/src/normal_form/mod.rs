//! The resonant normal form of the quintic NLS Hamiltonian.
//!
//! Polynomials are written in the Fourier variables `(ξ_j, η_j)`; on physical states
//! `η_j = conj(ξ_j)` and the actions are `I_j = ξ_j η_j`. The order-6 resonant part `Z6`
//! is the sum over all ordered resonance tuples of `ξ_{j1} ξ_{j2} ξ_{j3} η_{l1} η_{l2} η_{l3}`.

mod decompose;
mod identities;
mod polynomial;
mod spectrum;

pub use decompose::{decompose_z6, external_slots, ResonantMonomial, Z6Decomposition};
pub use identities::{
    chi_coefficient, chi_from_divisor, k_polynomials, reduced_hamiltonian_polynomial, w4k_closed,
    w4k_direct, z4_closed, z4_direct, z6_direct, z6e, z6e_polynomial, z6i_closed, z6i_direct,
    ActionMap, KPolynomials,
};
pub use polynomial::{poisson_bracket, vector_field_norm_check, Coeff, Monomial, SparsePolynomial};
pub use spectrum::{norm_rho, ModeSpectrum};
