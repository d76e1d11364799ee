// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Finite complex Grassmann algebra: generators, elements, Berezin calculus.

mod element;
mod registry;
pub mod text;

pub use element::{GrassmannElement, Parity};
pub use registry::{Generator, GeneratorRegistry, RegistryBuilder, MAX_GENERATORS};
