// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fermion and truncated boson Fock spaces with dense operator matrices.

mod ladder;
mod operator;
mod polynomial;
mod spec;
pub mod text;

pub use ladder::{
    boson_annihilator, boson_number, boson_ops, fermion_annihilator, fermion_number, fermion_ops, fermion_ops_with,
    SignConvention,
};
pub use operator::{EntryParity, FockOperator, GrassmannOperator, Operator};
pub use polynomial::{number_polynomial, parse_tokens, Ladder, OperatorPolynomial, Species, Term};
pub use spec::{max_dim, HilbertSpec, DEFAULT_MAX_DIM, MAX_DIM_ENV};
