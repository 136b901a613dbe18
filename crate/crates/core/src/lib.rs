//! Giant atoms coupled to a discretized one-dimensional waveguide, beyond the
//! rotating-wave approximation.
//!
//! The field is expanded in periodic eigenmodes ([`field_model`]), mapped onto a
//! harmonic chain by Lanczos tridiagonalization ([`chain_builder`]) and the
//! atom plus chain is simulated with matrix-product states ([`mps_engine`]).
//! [`observables`] extracts populations, occupations, overlaps and the field
//! energy density. [`reference_models`] holds the independent checks: a
//! single-excitation propagator, closed-form dark-state amplitudes and a
//! brute-force diagonalization of small truncated systems.
//!
//! The crate is `no_std` compatible (it needs `alloc`); the default `std`
//! feature only switches the float intrinsics from `libm` to the platform.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chain_builder;
pub mod error;
pub mod field_model;
pub mod krylov;
pub mod linalg;
pub mod mps_engine;
pub mod observables;
pub mod reference_models;
pub mod table;

mod float;

pub use error::{Error, Result};
pub use table::ObservableTable;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
