// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::registry::{Generator, GeneratorRegistry};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Grassmann parity of an element or operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn of_degree(degree: u32) -> Parity {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        }
    }

    /// Combines the parities of two factors of a product.
    pub fn times(self, other: Parity) -> Parity {
        match (self, other) {
            (Parity::Mixed, _) | (_, Parity::Mixed) => Parity::Mixed,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }
}

/// Sign of reordering the concatenation `a·b` of two disjoint canonical
/// monomials into canonical order: one transposition per pair `i∈a, j∈b, i>j`.
#[inline]
pub(crate) fn merge_sign(a: u64, b: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += a.checked_shr(j + 1).unwrap_or(0).count_ones();
        rest &= rest - 1;
    }
    swaps % 2 == 1
}

/// Element of the complex Grassmann algebra over a [`GeneratorRegistry`].
///
/// Terms are kept sorted by monomial mask, with all reordering signs folded
/// into the coefficients. Pure scalars may omit the registry; they adopt the
/// registry of whatever they are combined with.
#[derive(Clone)]
pub struct GrassmannElement<F: Real> {
    registry: Option<Arc<GeneratorRegistry>>,
    terms: Vec<(u64, Complex<F>)>,
}

impl<F: Real> GrassmannElement<F> {
    pub fn zero() -> Self {
        Self {
            registry: None,
            terms: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::scalar(Complex::one())
    }

    pub fn scalar(c: Complex<F>) -> Self {
        Self::from_map(None, [(0u64, c)])
    }

    pub fn real(x: F) -> Self {
        Self::scalar(Complex::new(x, F::zero()))
    }

    pub fn generator(registry: &Arc<GeneratorRegistry>, g: Generator) -> Self {
        Self {
            registry: Some(registry.clone()),
            terms: vec![(g.bit(), Complex::one())],
        }
    }

    /// `c · g₁ g₂ ⋯ gₖ` with the generators in the order given; the product is
    /// canonicalized (zero if a generator repeats).
    pub fn monomial(registry: &Arc<GeneratorRegistry>, c: Complex<F>, generators: &[Generator]) -> Self {
        let mut mask = 0u64;
        let mut negative = false;
        for g in generators {
            if mask & g.bit() != 0 {
                return Self::zero().with_registry(registry);
            }
            negative ^= merge_sign(mask, g.bit());
            mask |= g.bit();
        }
        let c = if negative { -c } else { c };
        Self::from_map(Some(registry.clone()), [(mask, c)])
    }

    pub(crate) fn from_map(
        registry: Option<Arc<GeneratorRegistry>>,
        terms: impl IntoIterator<Item = (u64, Complex<F>)>,
    ) -> Self {
        let mut acc: HashMap<u64, Complex<F>> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Complex::zero) += c;
        }
        let mut el = Self {
            registry,
            terms: acc.into_iter().collect(),
        };
        el.normalize();
        el
    }

    fn normalize(&mut self) {
        let eps = F::prune_threshold();
        self.terms.retain(|(_, c)| c.norm() > eps);
        self.terms.sort_unstable_by_key(|(m, _)| *m);
    }

    pub fn with_registry(mut self, registry: &Arc<GeneratorRegistry>) -> Self {
        self.registry = Some(registry.clone());
        self
    }

    pub fn registry(&self) -> Option<&Arc<GeneratorRegistry>> {
        self.registry.as_ref()
    }

    /// `(mask, coefficient)` pairs in ascending mask order.
    pub fn terms(&self) -> &[(u64, Complex<F>)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u64) -> Complex<F> {
        match self.terms.binary_search_by_key(&mask, |(m, _)| *m) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex::zero(),
        }
    }

    /// Coefficient of the canonical monomial formed by `generators` (any order;
    /// the reordering sign is applied).
    pub fn coefficient_of(&self, generators: &[Generator]) -> Complex<F> {
        let mut mask = 0u64;
        let mut negative = false;
        for g in generators {
            if mask & g.bit() != 0 {
                return Complex::zero();
            }
            negative ^= merge_sign(mask, g.bit());
            mask |= g.bit();
        }
        let c = self.coefficient(mask);
        if negative {
            -c
        } else {
            c
        }
    }

    pub fn scalar_part(&self) -> Complex<F> {
        self.coefficient(0)
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.iter().all(|(m, _)| *m == 0)
    }

    /// Union of all generators appearing in any term.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m)
    }

    pub fn contains_generator(&self, g: Generator) -> bool {
        self.support() & g.bit() != 0
    }

    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for (m, _) in &self.terms {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn even_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 0)
    }

    pub fn odd_part(&self) -> Self {
        self.filter(|m| m.count_ones() % 2 == 1)
    }

    fn filter(&self, keep: impl Fn(u64) -> bool) -> Self {
        Self {
            registry: self.registry.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(*m)).copied().collect(),
        }
    }

    fn joint_registry(&self, other: &Self) -> Result<Option<Arc<GeneratorRegistry>>> {
        match (&self.registry, &other.registry) {
            (Some(a), Some(b)) => {
                if GeneratorRegistry::same(a, b) {
                    Ok(Some(a.clone()))
                } else {
                    Err(Error::RegistryMismatch)
                }
            }
            (Some(a), None) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let reg = self.joint_registry(other)?;
        Ok(Self::from_map(
            reg,
            self.terms.iter().chain(other.terms.iter()).copied(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let reg = self.joint_registry(other)?;
        Ok(Self::from_map(
            reg,
            self.terms
                .iter()
                .copied()
                .chain(other.terms.iter().map(|&(m, c)| (m, -c))),
        ))
    }

    /// Graded product. Monomials sharing a generator vanish.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let reg = self.joint_registry(other)?;
        let mut acc: HashMap<u64, Complex<F>> = HashMap::with_capacity(self.terms.len() * other.terms.len().min(64));
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let p = ca * cb;
                let p = if merge_sign(ma, mb) { -p } else { p };
                *acc.entry(ma | mb).or_insert_with(Complex::zero) += p;
            }
        }
        let mut el = Self {
            registry: reg,
            terms: acc.into_iter().collect(),
        };
        el.normalize();
        Ok(el)
    }

    pub fn scale(&self, c: Complex<F>) -> Self {
        let mut el = Self {
            registry: self.registry.clone(),
            terms: self.terms.iter().map(|&(m, x)| (m, x * c)).collect(),
        };
        el.normalize();
        el
    }

    pub fn conj_coefficients(&self) -> Self {
        Self {
            registry: self.registry.clone(),
            terms: self.terms.iter().map(|&(m, x)| (m, x.conj())).collect(),
        }
    }

    /// Sum of coefficient magnitudes; submultiplicative under the product.
    pub fn norm1(&self) -> F {
        self.terms.iter().fold(F::zero(), |acc, (_, c)| acc + c.norm())
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> F {
        self.terms.iter().fold(F::zero(), |acc, (_, c)| acc.max(c.norm()))
    }

    /// Largest coefficient-wise deviation between two elements.
    pub fn max_deviation(&self, other: &Self) -> Result<F> {
        let reg = self.joint_registry(other)?;
        let mut acc: HashMap<u64, Complex<F>> = HashMap::new();
        for &(m, c) in &self.terms {
            *acc.entry(m).or_insert_with(Complex::zero) += c;
        }
        for &(m, c) in &other.terms {
            *acc.entry(m).or_insert_with(Complex::zero) -= c;
        }
        let _ = reg;
        Ok(acc.values().fold(F::zero(), |a, c| a.max(c.norm())))
    }

    /// Left Berezin integral `∫dg x`. The differential is odd: `g` is moved to
    /// the front of each monomial (one sign per generator it passes) and removed.
    pub fn berezin_integrate(&self, g: Generator) -> Self {
        let bit = g.bit();
        let below = bit - 1;
        let terms = self.terms.iter().filter(|(m, _)| m & bit != 0).map(|&(m, c)| {
            let c = if (m & below).count_ones() % 2 == 1 { -c } else { c };
            (m & !bit, c)
        });
        let mut el = Self {
            registry: self.registry.clone(),
            terms: terms.collect(),
        };
        el.normalize();
        el
    }

    /// Left derivative `d/dg`; coincides with [`Self::berezin_integrate`].
    pub fn differentiate(&self, g: Generator) -> Self {
        self.berezin_integrate(g)
    }

    /// `∫d ḡ dg x`, with the inner `dg` applied first.
    pub fn integrate_pair(&self, bar: Generator, plain: Generator) -> Self {
        self.berezin_integrate(plain).berezin_integrate(bar)
    }

    /// Exponential of an even element. The scalar part `s` is factored out
    /// analytically as `exp(s)`; the nilpotent remainder's series terminates.
    pub fn exp_even(&self) -> Result<Self> {
        match self.parity() {
            Parity::Even => {}
            p => return Err(Error::ParityMismatch(p.name())),
        }
        let s = self.scalar_part();
        let nil = self.filter(|m| m != 0);
        let mut sum = Self::one();
        let mut term = Self::one();
        let mut k = 1usize;
        loop {
            term = term
                .try_mul(&nil)?
                .scale(Complex::new(F::one() / F::lit(k as f64), F::zero()));
            if term.is_zero() {
                break;
            }
            sum = sum.try_add(&term)?;
            k += 1;
        }
        let mut out = sum.scale(s.exp());
        if out.registry.is_none() {
            out.registry = self.registry.clone();
        }
        Ok(out)
    }

    /// Anti-linear anti-automorphism `c·g₁⋯gₖ ↦ c*·ḡₖ⋯ḡ₁` using the registry's
    /// conjugate pairing.
    pub fn involute(&self) -> Result<Self> {
        let reg = match &self.registry {
            Some(r) => r.clone(),
            None => return Ok(self.conj_coefficients()),
        };
        let mut out = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            let mut mask = 0u64;
            let mut negative = false;
            // walk the monomial from its last generator to its first
            let mut rest = m;
            let mut gens = Vec::new();
            while rest != 0 {
                gens.push(rest.trailing_zeros() as u8);
                rest &= rest - 1;
            }
            for &i in gens.iter().rev() {
                let p = reg
                    .partner(Generator(i))
                    .ok_or_else(|| Error::UnpairedGenerator(reg.label(Generator(i)).to_string()))?;
                negative ^= merge_sign(mask, p.bit());
                mask |= p.bit();
            }
            let c = c.conj();
            out.push((mask, if negative { -c } else { c }));
        }
        Ok(Self::from_map(Some(reg), out))
    }

    /// Re-expresses the element over `target`, matching generators by label.
    pub fn transfer(&self, target: &Arc<GeneratorRegistry>) -> Result<Self> {
        let src = match &self.registry {
            Some(r) => r.clone(),
            None => return Ok(self.clone().with_registry(target)),
        };
        if src.is_prefix_of(target) {
            return Ok(Self {
                registry: Some(target.clone()),
                terms: self.terms.clone(),
            });
        }
        let support = self.support();
        let map: Vec<Option<Generator>> = src
            .generators()
            .map(|g| {
                if support & g.bit() == 0 {
                    Ok(None)
                } else {
                    target.get(src.label(g)).map(Some)
                }
            })
            .collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            let mut mask = 0u64;
            let mut negative = false;
            let mut rest = m;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                let g = map[i].expect("generator in support");
                negative ^= merge_sign(mask, g.bit());
                mask |= g.bit();
                rest &= rest - 1;
            }
            out.push((mask, if negative { -c } else { c }));
        }
        Ok(Self::from_map(Some(target.clone()), out))
    }
}

impl<F: Real> PartialEq for GrassmannElement<F> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<F: Real> fmt::Debug for GrassmannElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::render(self))
    }
}

impl<F: Real> fmt::Display for GrassmannElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::render(self))
    }
}

impl<F: Real> From<Complex<F>> for GrassmannElement<F> {
    fn from(c: Complex<F>) -> Self {
        Self::scalar(c)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl<F: Real> $trait<&GrassmannElement<F>> for &GrassmannElement<F> {
            type Output = GrassmannElement<F>;
            fn $method(self, rhs: &GrassmannElement<F>) -> GrassmannElement<F> {
                self.$try(rhs)
                    .expect("Grassmann operands from different registries")
            }
        }
        impl<F: Real> $trait<GrassmannElement<F>> for GrassmannElement<F> {
            type Output = GrassmannElement<F>;
            fn $method(self, rhs: GrassmannElement<F>) -> GrassmannElement<F> {
                (&self).$method(&rhs)
            }
        }
        impl<F: Real> $trait<&GrassmannElement<F>> for GrassmannElement<F> {
            type Output = GrassmannElement<F>;
            fn $method(self, rhs: &GrassmannElement<F>) -> GrassmannElement<F> {
                (&self).$method(rhs)
            }
        }
        impl<F: Real> $trait<GrassmannElement<F>> for &GrassmannElement<F> {
            type Output = GrassmannElement<F>;
            fn $method(self, rhs: GrassmannElement<F>) -> GrassmannElement<F> {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl<F: Real> AddAssign<&GrassmannElement<F>> for GrassmannElement<F> {
    fn add_assign(&mut self, rhs: &GrassmannElement<F>) {
        *self = &*self + rhs;
    }
}

impl<F: Real> Mul<Complex<F>> for &GrassmannElement<F> {
    type Output = GrassmannElement<F>;
    fn mul(self, rhs: Complex<F>) -> GrassmannElement<F> {
        self.scale(rhs)
    }
}

impl<F: Real> Mul<Complex<F>> for GrassmannElement<F> {
    type Output = GrassmannElement<F>;
    fn mul(self, rhs: Complex<F>) -> GrassmannElement<F> {
        self.scale(rhs)
    }
}

impl<F: Real> Neg for GrassmannElement<F> {
    type Output = GrassmannElement<F>;
    fn neg(self) -> GrassmannElement<F> {
        self.scale(-Complex::one())
    }
}

impl<F: Real> Neg for &GrassmannElement<F> {
    type Output = GrassmannElement<F>;
    fn neg(self) -> GrassmannElement<F> {
        self.scale(-Complex::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::RegistryBuilder;

    type G = GrassmannElement<f64>;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn setup() -> (Arc<GeneratorRegistry>, Generator, Generator, Generator, Generator) {
        let mut b = RegistryBuilder::new();
        let (pb1, p1) = b.pair("ψ̄1", "ψ1").unwrap();
        let (pb2, p2) = b.pair("ψ̄2", "ψ2").unwrap();
        (b.build(), pb1, p1, pb2, p2)
    }

    #[test]
    fn product_antisymmetry_and_nilpotency() {
        let (r, _, p1, _, p2) = setup();
        let a = G::generator(&r, p1);
        let b = G::generator(&r, p2);
        let ab = &a * &b;
        let ba = &b * &a;
        assert_eq!(ab.coefficient_of(&[p1, p2]), c(1.0));
        assert_eq!(ba.coefficient_of(&[p1, p2]), c(-1.0));
        assert!((&a * &a).is_zero());
    }

    #[test]
    fn square_of_one_plus_bilinear() {
        let (r, pb, p, _, _) = setup();
        let x = G::one() + G::monomial(&r, c(1.0), &[pb, p]);
        let sq = &x * &x;
        assert_eq!(sq.scalar_part(), c(1.0));
        assert_eq!(sq.coefficient_of(&[pb, p]), c(2.0));
        assert_eq!(sq.len(), 2);
    }

    #[test]
    fn parity_classification() {
        let (r, pb1, p1, pb2, _) = setup();
        let even = G::one() + G::monomial(&r, c(1.0), &[pb1, p1]);
        let odd = G::generator(&r, p1) + G::generator(&r, pb2);
        let mixed = G::one() + G::generator(&r, p1);
        assert_eq!(even.parity(), Parity::Even);
        assert_eq!(odd.parity(), Parity::Odd);
        assert_eq!(mixed.parity(), Parity::Mixed);
    }

    #[test]
    fn berezin_rules() {
        let (r, pb, p, _, _) = setup();
        let x = G::scalar(c(3.0)) + G::monomial(&r, c(5.0), &[p]);
        assert_eq!(x.berezin_integrate(p), G::scalar(c(5.0)));
        assert!(G::one().berezin_integrate(p).is_zero());
        // inner dψ first: ∫dψ̄dψ ψψ̄ = 1
        let m = G::monomial(&r, c(1.0), &[p, pb]);
        assert_eq!(m.integrate_pair(pb, p), G::one());
    }

    #[test]
    fn derivative_sign() {
        let (r, pb, p, _, _) = setup();
        let x = G::monomial(&r, c(1.0), &[pb, p]);
        let d = x.differentiate(p);
        assert_eq!(d.coefficient_of(&[pb]), c(-1.0));
        assert_eq!(G::generator(&r, p).differentiate(p), G::one());
    }

    #[test]
    fn exp_of_two_bilinears() {
        let (r, pb1, p1, pb2, p2) = setup();
        let x = G::monomial(&r, c(-0.5), &[pb1, p1]) + G::monomial(&r, c(-0.5), &[pb2, p2]);
        let e = x.exp_even().unwrap();
        assert_eq!(e.scalar_part(), c(1.0));
        assert_eq!(e.coefficient_of(&[pb1, p1]), c(-0.5));
        assert_eq!(e.coefficient_of(&[pb2, p2]), c(-0.5));
        assert_eq!(e.coefficient_of(&[pb1, p1, pb2, p2]), c(0.25));
        assert_eq!(e.len(), 4);
        assert_eq!(G::zero().exp_even().unwrap(), G::one());
        assert!(matches!(
            G::generator(&r, p1).exp_even(),
            Err(Error::ParityMismatch("odd"))
        ));
    }

    #[test]
    fn exp_factors_scalar_part() {
        let (r, pb, p, _, _) = setup();
        let x = G::real(2.0) + G::monomial(&r, c(1.0), &[pb, p]);
        let e = x.exp_even().unwrap();
        let e2 = 2.0f64.exp();
        assert!((e.scalar_part() - c(e2)).norm() < 1e-12);
        assert!((e.coefficient_of(&[pb, p]) - c(e2)).norm() < 1e-12);
    }

    #[test]
    fn involution_reverses_and_conjugates() {
        let (r, pb1, p1, pb2, p2) = setup();
        let x = G::monomial(&r, Complex::new(1.0, 2.0), &[p1, p2]);
        let y = x.involute().unwrap();
        assert_eq!(y.coefficient_of(&[pb2, pb1]), Complex::new(1.0, -2.0));
        assert_eq!(y.coefficient_of(&[pb1, pb2]), Complex::new(-1.0, 2.0));
        assert_eq!(y.involute().unwrap(), x);
        assert_eq!(G::one().involute().unwrap(), G::one());
    }

    #[test]
    fn involution_requires_pairing() {
        let mut b = RegistryBuilder::new();
        let t = b.generator("t").unwrap();
        let r = b.build();
        assert!(matches!(
            G::generator(&r, t).involute(),
            Err(Error::UnpairedGenerator(_))
        ));
    }

    #[test]
    fn registry_mismatch_is_an_error() {
        let (r1, _, p1, _, _) = setup();
        let mut b = RegistryBuilder::new();
        let q = b.generator("q").unwrap();
        let r2 = b.build();
        let a = G::generator(&r1, p1);
        let b = G::generator(&r2, q);
        assert_eq!(a.try_mul(&b), Err(Error::RegistryMismatch));
    }

    #[test]
    fn transfer_between_registries_keeps_value() {
        let (r, pb1, p1, _, p2) = setup();
        let x = G::monomial(&r, c(2.0), &[p2, pb1]) + G::generator(&r, p1);
        let mut b = RegistryBuilder::new();
        b.generator("ψ2").unwrap();
        b.pair("ψ̄1", "ψ1").unwrap();
        let r2 = b.build();
        let y = x.transfer(&r2).unwrap();
        let pb1b = r2.get("ψ̄1").unwrap();
        let p2b = r2.get("ψ2").unwrap();
        assert_eq!(y.coefficient_of(&[p2b, pb1b]), c(2.0));
        assert_eq!(y.transfer(&r).unwrap(), x);
    }

    #[test]
    fn merge_sign_counts_inversions() {
        assert!(!merge_sign(0b01, 0b10));
        assert!(merge_sign(0b10, 0b01));
        assert!(!merge_sign(0b110, 0b001));
        assert!(!merge_sign(1 << 63, 0));
        assert!(merge_sign(1 << 63, 1));
    }
}
