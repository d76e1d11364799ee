// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Floating-point scalar abstraction shared by every algebra in the crate.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type underlying all complex coefficients (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Coefficients whose magnitude does not exceed this value are dropped
    /// after every Grassmann operation.
    fn prune_threshold() -> Self;

    /// Converts an `f64` literal. Never fails for finite input.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f64 {
    fn prune_threshold() -> Self {
        1e-14
    }
}

impl Real for f32 {
    fn prune_threshold() -> Self {
        1e-6
    }
}

/// Complex number over `F`.
pub type Cplx<F> = Complex<F>;

/// Real literal as a complex number.
pub(crate) fn re<F: Real>(x: f64) -> Complex<F> {
    Complex::new(F::lit(x), F::zero())
}

pub(crate) fn to_c64<F: Real>(z: Complex<F>) -> Complex<f64> {
    Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

pub(crate) fn from_c64<F: Real>(z: Complex<f64>) -> Complex<F> {
    Complex::new(F::lit(z.re), F::lit(z.im))
}
