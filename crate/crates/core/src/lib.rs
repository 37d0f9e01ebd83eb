//! Resonant energy exchange in the quintic nonlinear Schrödinger equation on the circle.
//!
//! This crate holds the pure, allocation-light part of the laboratory:
//!
//! - [`resonance`]: exact integer arithmetic on order-6 resonance tuples, recognition of
//!   the four-mode resonant sets `{n, n+k, n+3k, n+4k}` and their external partner pairs.
//! - [`normal_form`]: sparse polynomials in `(ξ_j, η_j)` with an exact Poisson bracket, the
//!   closed-form action identities of the resonant normal form and its decomposition
//!   relative to a resonant set.
//! - [`reduced`]: the integrable one-degree-of-freedom model `(φ, K)`, its equilibria,
//!   separatrices, half periods and action integral.
//!
//! The crate is `no_std` and needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod normal_form;
pub mod numerics;
pub mod reduced;
pub mod resonance;

pub use error::{CoreError, Result};
pub use resonance::{PartnerPair, ResonanceTuple, ResonantSet};
