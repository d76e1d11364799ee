// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Coefficient rings for dense matrices: complex numbers and Grassmann elements.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::grassmann::GrassmannElement;
use crate::scalar::Real;

/// Associative unital ring over `Complex<Self::Real>`, with a submultiplicative norm.
pub trait Ring: Clone + Debug + PartialEq {
    type Real: Real;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: Complex<Self::Real>) -> Self;
    fn norm1(&self) -> Self::Real;
    fn is_zero(&self) -> bool;
}

impl<F: Real> Ring for Complex<F> {
    type Real = F;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: Complex<F>) -> Self {
        self * c
    }
    fn norm1(&self) -> F {
        self.norm()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl<F: Real> Ring for GrassmannElement<F> {
    type Real = F;

    fn zero() -> Self {
        GrassmannElement::zero()
    }
    fn one() -> Self {
        GrassmannElement::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: Complex<F>) -> Self {
        GrassmannElement::scale(self, c)
    }
    fn norm1(&self) -> F {
        GrassmannElement::norm1(self)
    }
    fn is_zero(&self) -> bool {
        GrassmannElement::is_zero(self)
    }
}
