// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex;

use super::spec::HilbertSpec;
use crate::error::{Error, Result};
use crate::grassmann::{GrassmannElement, Parity};
use crate::matrix::DenseMatrix;
use crate::ring::Ring;
use crate::scalar::Real;

/// Operator on a [`HilbertSpec`] with entries in a coefficient ring.
///
/// Grassmann-valued operators are stored as `Σ |m⟩ A_mn ⟨n|`: the
/// coefficient sits between the basis ket and bra, so composition and action on
/// states are plain ordered matrix products with no extra signs.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T> {
    spec: HilbertSpec,
    matrix: DenseMatrix<T>,
    parity: Option<Parity>,
}

/// Numeric operator.
pub type FockOperator<F> = Operator<Complex<F>>;
/// Operator whose matrix entries are Grassmann elements.
pub type GrassmannOperator<F> = Operator<GrassmannElement<F>>;

/// Grassmann degree carried by each entry of an operator, beyond its basis degrees.
pub trait EntryParity {
    /// Bitmask of entry degrees present: bit 0 even, bit 1 odd.
    fn degrees(&self) -> u8;
}

impl<F: Real> EntryParity for Complex<F> {
    fn degrees(&self) -> u8 {
        if self.re == F::zero() && self.im == F::zero() {
            0
        } else {
            1
        }
    }
}

impl<F: Real> EntryParity for GrassmannElement<F> {
    fn degrees(&self) -> u8 {
        self.terms()
            .iter()
            .fold(0, |acc, (m, _)| acc | (1 << (m.count_ones() % 2)))
    }
}

impl<T: Ring + EntryParity> Operator<T> {
    pub fn new(spec: HilbertSpec, matrix: DenseMatrix<T>) -> Result<Self> {
        let dim = spec.validate()?;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on a space of dimension {dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let parity = infer_parity(&spec, &matrix);
        Ok(Self { spec, matrix, parity })
    }

    /// Like [`Self::new`], additionally requiring the given parity.
    pub fn with_parity(spec: HilbertSpec, matrix: DenseMatrix<T>, parity: Parity) -> Result<Self> {
        let op = Self::new(spec, matrix)?;
        op.require_parity(parity)?;
        Ok(op)
    }

    pub fn identity(spec: HilbertSpec) -> Result<Self> {
        let dim = spec.validate()?;
        Self::new(spec, DenseMatrix::identity(dim))
    }

    pub fn zero(spec: HilbertSpec) -> Result<Self> {
        let dim = spec.validate()?;
        Self::new(spec, DenseMatrix::zeros(dim, dim))
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Total Grassmann parity (basis plus entry degrees); `None` when mixed.
    /// The zero operator reports even.
    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn require_parity(&self, p: Parity) -> Result<()> {
        if self.matrix.data().iter().all(|x| x.is_zero()) || self.parity == Some(p) {
            Ok(())
        } else {
            Err(Error::MixedParity)
        }
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::DimensionMismatch(format!(
                "operators on {:?} and {:?}",
                self.spec, other.spec
            )));
        }
        Ok(())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        Self::new(self.spec, self.matrix.try_mul(&other.matrix)?)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        Self::new(self.spec, self.matrix.try_add(&other.matrix)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        Self::new(self.spec, self.matrix.try_sub(&other.matrix)?)
    }

    pub fn scale(&self, c: Complex<T::Real>) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.scale(c),
            parity: self.parity,
        }
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.add(&other.compose(self)?)
    }

    /// Graded commutator: anticommutator when both operators are odd.
    pub fn supercommutator(&self, other: &Self) -> Result<Self> {
        if self.parity == Some(Parity::Odd) && other.parity == Some(Parity::Odd) {
            self.anticommutator(other)
        } else {
            self.commutator(other)
        }
    }

    pub fn max_deviation(&self, other: &Self) -> Result<T::Real> {
        self.check_spec(other)?;
        self.matrix.max_deviation(&other.matrix)
    }

    pub fn max_norm(&self) -> T::Real {
        self.matrix.max_norm()
    }

    /// `exp(scale · self)`.
    pub fn expm(&self, scale: Complex<T::Real>) -> Result<Self> {
        Self::new(self.spec, self.matrix.expm(scale)?)
    }
}

fn infer_parity<T: Ring + EntryParity>(spec: &HilbertSpec, m: &DenseMatrix<T>) -> Option<Parity> {
    let mut seen = 0u8;
    for i in 0..m.rows() {
        let di = spec.fermion_number(i) % 2;
        for j in 0..m.cols() {
            let dj = spec.fermion_number(j) % 2;
            let deg = m.get(i, j).degrees();
            let shift = ((di + dj) % 2) as u8;
            if deg & 1 != 0 {
                seen |= 1 << shift;
            }
            if deg & 2 != 0 {
                seen |= 1 << (1 - shift);
            }
        }
    }
    match seen {
        0 | 1 => Some(Parity::Even),
        2 => Some(Parity::Odd),
        _ => None,
    }
}

impl<F: Real> FockOperator<F> {
    pub fn from_diagonal(spec: HilbertSpec, values: &[Complex<F>]) -> Result<Self> {
        Self::new(spec, DenseMatrix::diagonal(values))
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.conj_transpose(),
            parity: self.parity,
        }
    }

    pub fn is_self_adjoint(&self, tol: F) -> bool {
        self.matrix
            .max_deviation(&self.matrix.conj_transpose())
            .map(|d| d <= tol)
            .unwrap_or(false)
    }

    pub fn trace(&self) -> Complex<F> {
        self.matrix.trace()
    }

    /// Entrywise embedding into Grassmann-valued operators.
    pub fn lift(&self) -> GrassmannOperator<F> {
        Operator {
            spec: self.spec,
            matrix: self.matrix.map(|&z| GrassmannElement::scalar(z)),
            parity: self.parity,
        }
    }

    /// Tensor product `self ⊗ other` with `self` on a pure boson space. The
    /// bosons of `self` become the outermost (highest-numbered) boson modes.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.spec, other.spec);
        if a.n_fermions != 0 {
            return Err(Error::InvalidSpace(
                "left tensor factor must be a pure boson space".into(),
            ));
        }
        if b.n_bosons > 0 && a.boson_cutoff != b.boson_cutoff {
            return Err(Error::InvalidSpace("boson cutoffs differ".into()));
        }
        let spec = HilbertSpec::mixed(b.n_fermions, a.n_bosons + b.n_bosons, a.boson_cutoff);
        spec.validate()?;
        Self::new(spec, self.matrix.kron(&other.matrix))
    }

    /// Fermion-number parity operator `(−1)^{N_f}`.
    pub fn fermion_parity(spec: HilbertSpec) -> Result<Self> {
        let dim = spec.validate()?;
        let values: Vec<_> = (0..dim)
            .map(|i| {
                if spec.fermion_number(i).is_multiple_of(2) {
                    Complex::new(F::one(), F::zero())
                } else {
                    Complex::new(-F::one(), F::zero())
                }
            })
            .collect();
        Self::from_diagonal(spec, &values)
    }

    /// Largest deviation from unitarity, `‖U†U − 𝟏‖_max`.
    pub fn unitarity_defect(&self) -> F {
        let n = self.dim();
        self.matrix
            .conj_transpose()
            .try_mul(&self.matrix)
            .and_then(|p| p.max_deviation(&DenseMatrix::identity(n)))
            .unwrap_or(F::infinity())
    }

    /// `exp(−i s · self)` for self-adjoint `self`, with a unitarity check.
    pub fn unitary_exp(&self, s: F) -> Result<Self> {
        let u = self.expm(Complex::new(F::zero(), -s))?;
        let defect = u.unitarity_defect();
        if defect > F::lit(1e-12) * (F::one() + s.abs() * self.max_norm()) {
            return Err(Error::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(u)
    }
}

impl<F: Real> GrassmannOperator<F> {
    /// Adjoint for Grassmann-valued operators: transpose plus the
    /// coefficient involution. Requires paired generators.
    pub fn adjoint(&self) -> Result<Self> {
        let t = self.matrix.transpose();
        let data = t.data().iter().map(|x| x.involute()).collect::<Result<Vec<_>>>()?;
        Self::new(self.spec, DenseMatrix::from_row_major(t.rows(), t.cols(), data)?)
    }

    /// The operator `x·𝟏` for a Grassmann number `x`. Moving an odd monomial
    /// of `x` past the basis ket `|m⟩` contributes `(−1)^{deg m}`.
    pub fn grassmann_scalar(spec: HilbertSpec, x: &GrassmannElement<F>) -> Result<Self> {
        let dim = spec.validate()?;
        let even = x.even_part();
        let odd = x.odd_part();
        let flipped = -&odd;
        let matrix = DenseMatrix::from_fn(dim, dim, |i, j| {
            if i != j {
                GrassmannElement::zero()
            } else if spec.fermion_number(i).is_multiple_of(2) {
                &even + &odd
            } else {
                &even + &flipped
            }
        });
        Self::new(spec, matrix)
    }

    /// Largest coefficient deviation, entrywise.
    pub fn max_coefficient_deviation(&self, other: &Self) -> Result<F> {
        self.check_spec(other)?;
        let mut worst = F::zero();
        for (a, b) in self.matrix.data().iter().zip(other.matrix.data()) {
            worst = worst.max(a.max_deviation(b)?);
        }
        Ok(worst)
    }

    /// Numeric part when every entry is a pure scalar.
    pub fn to_numeric(&self) -> Option<FockOperator<F>> {
        if self.matrix.data().iter().all(|x| x.is_scalar()) {
            Some(Operator {
                spec: self.spec,
                matrix: self.matrix.map(|x| x.scalar_part()),
                parity: self.parity,
            })
        } else {
            None
        }
    }

    /// Body: entrywise scalar part.
    pub fn body(&self) -> FockOperator<F> {
        Operator {
            spec: self.spec,
            matrix: self.matrix.map(|x| x.scalar_part()),
            parity: None,
        }
        .reinfer()
    }
}

impl<T: Ring + EntryParity> Operator<T> {
    fn reinfer(mut self) -> Self {
        self.parity = infer_parity(&self.spec, &self.matrix);
        self
    }
}
