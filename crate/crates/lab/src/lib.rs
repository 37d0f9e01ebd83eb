//! The std side of the laboratory: a split-step spectral solver for the quintic NLS,
//! JSON and CSV formats, PDE-versus-model verification and the `beating` command line.

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod solver;
pub mod verify;
