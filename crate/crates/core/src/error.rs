// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("elements belong to different generator registries")]
    RegistryMismatch,
    #[error("registry is limited to {max} generators, requested {requested}")]
    RegistryFull { max: usize, requested: usize },
    #[error("generator label `{0}` registered twice")]
    DuplicateLabel(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` has no declared conjugate partner")]
    UnpairedGenerator(String),
    #[error("expected an even element, found {0} parity")]
    ParityMismatch(&'static str),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),
    #[error("{kind} mode index {index} out of range 1..={max}")]
    ModeOutOfRange {
        kind: &'static str,
        index: usize,
        max: usize,
    },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("exponential of a self-adjoint operator failed the unitarity check (deviation {0:e})")]
    NotUnitary(f64),
    #[error("operator has mixed Grassmann parity")]
    MixedParity,
    #[error("polynomial term is not normal-ordered: {0}")]
    NotNormalOrdered(String),

    #[error("constraint set is empty")]
    EmptyConstraintSet,
    #[error("constraint `{0}` is not self-adjoint and has no adjoint partner")]
    NotSelfAdjoint(String),
    #[error("self-adjoint odd constraint `{0}` squares to zero and is therefore the zero operator")]
    TrivialOddConstraint(String),
    #[error("spectrum is not integer (offending eigenvalue {0})")]
    NonIntegerSpectrum(f64),
    #[error("projector certificate failed: {0}")]
    Certificate(String),
    #[error("Grassmann-shifted constraint `{0}` has no complex kernel; use the odd-pair route")]
    GrassmannShifted(String),
    #[error("anticommutator {{chi, chi^dagger}} is singular; the constraint is not second class")]
    SingularAnticommutator,
    #[error("anticommutator does not commute with the constraint (deviation {0:e})")]
    NonCommutingAnticommutator(f64),
    #[error("matrix is not positive definite (eigenvalue {0})")]
    NotPositiveDefinite(f64),
    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("quadrature with {k} points is too small; need at least {need}")]
    QuadratureTooSmall { k: usize, need: usize },
    #[error("slice generators are absent from both kernels")]
    SliceMismatch,
    #[error("inconsistent lattice plan: {0}")]
    InconsistentPlan(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
