// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fermionic coherent-state path integrals with constraints.

pub mod coherent;
pub mod config;
pub mod constraints;
pub mod error;
pub mod fock;
pub mod grassmann;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod projector;
pub mod propagator;
pub mod ring;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type C64 = num_complex::Complex<f64>;
pub type Grassmann = grassmann::GrassmannElement<f64>;
pub type FockOp = fock::FockOperator<f64>;
pub type GrassmannOp = fock::GrassmannOperator<f64>;
