// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ladder::{boson_annihilator, fermion_annihilator, SignConvention};
use super::operator::{FockOperator, GrassmannOperator};
use super::spec::HilbertSpec;
use crate::error::{Error, Result};
use crate::grassmann::{Generator, GeneratorRegistry, GrassmannElement, Parity};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Fermion,
    Boson,
}

/// One creation or annihilation operator; `mode` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub species: Species,
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn f(mode: usize) -> Self {
        Self {
            species: Species::Fermion,
            mode,
            dagger: false,
        }
    }

    pub fn fd(mode: usize) -> Self {
        Self {
            dagger: true,
            ..Self::f(mode)
        }
    }

    pub fn b(mode: usize) -> Self {
        Self {
            species: Species::Boson,
            mode,
            dagger: false,
        }
    }

    pub fn bd(mode: usize) -> Self {
        Self {
            dagger: true,
            ..Self::b(mode)
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            dagger: !self.dagger,
            ..self
        }
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.species {
            Species::Fermion => 'f',
            Species::Boson => 'b',
        };
        write!(f, "{s}{}{}", self.mode, if self.dagger { "+" } else { "" })
    }
}

impl FromStr for Ladder {
    type Err = Error;

    /// Tokens `f3`, `f3+`, `b1`, `b1+`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad ladder token `{s}`"));
        let mut chars = s.chars();
        let species = match chars.next() {
            Some('f') => Species::Fermion,
            Some('b') => Species::Boson,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let (digits, dagger) = match rest.strip_suffix('+') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let mode: usize = digits.parse().map_err(|_| bad())?;
        if mode == 0 {
            return Err(bad());
        }
        Ok(Self { species, mode, dagger })
    }
}

/// `coeff · grassmann · factors[0] · factors[1] ⋯`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<F: Real> {
    pub coeff: Complex<F>,
    pub grassmann: Option<GrassmannElement<F>>,
    pub factors: Vec<Ladder>,
}

impl<F: Real> Term<F> {
    pub fn fermion_degree(&self) -> usize {
        self.factors.iter().filter(|l| l.species == Species::Fermion).count()
    }

    /// Creators all to the left of annihilators.
    pub fn is_normal_ordered(&self) -> bool {
        let first_annihilator = self.factors.iter().position(|l| !l.dagger);
        match first_annihilator {
            None => true,
            Some(k) => self.factors[k..].iter().all(|l| !l.dagger),
        }
    }
}

/// Sum of ordered products of ladder operators with complex (and optionally
/// Grassmann) coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorPolynomial<F: Real> {
    terms: Vec<Term<F>>,
}

impl<F: Real> OperatorPolynomial<F> {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[Term<F>] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, coeff: Complex<F>, factors: Vec<Ladder>) -> &mut Self {
        self.terms.push(Term {
            coeff,
            grassmann: None,
            factors,
        });
        self
    }

    /// Adds `coeff · x · factors`, `x` a Grassmann number written leftmost.
    pub fn push_grassmann(&mut self, coeff: Complex<F>, x: GrassmannElement<F>, factors: Vec<Ladder>) -> &mut Self {
        self.terms.push(Term {
            coeff,
            grassmann: Some(x),
            factors,
        });
        self
    }

    /// Builder form: `term(c, "f1+ f1")`.
    pub fn term(mut self, coeff: Complex<F>, tokens: &str) -> Result<Self> {
        let factors = parse_tokens(tokens)?;
        self.push(coeff, factors);
        Ok(self)
    }

    pub fn grassmann_term(mut self, coeff: Complex<F>, x: GrassmannElement<F>, tokens: &str) -> Result<Self> {
        let factors = parse_tokens(tokens)?;
        self.push_grassmann(coeff, x, factors);
        Ok(self)
    }

    pub fn has_grassmann(&self) -> bool {
        self.terms.iter().any(|t| t.grassmann.is_some())
    }

    pub fn is_normal_ordered(&self) -> bool {
        self.terms.iter().all(Term::is_normal_ordered)
    }

    /// Parity from fermion degrees and Grassmann coefficients; `None` if mixed.
    pub fn parity(&self) -> Option<Parity> {
        let mut p: Option<Parity> = None;
        for t in &self.terms {
            let fp = Parity::of_degree(t.fermion_degree() as u32);
            let tp = match &t.grassmann {
                Some(x) => x.parity().times(fp),
                None => fp,
            };
            p = match p {
                None => Some(tp),
                Some(q) if q == tp => Some(q),
                _ => return None,
            };
        }
        Some(p.unwrap_or(Parity::Even))
    }

    /// Term-wise adjoint. `(x P)† = P† x̄` is reordered to `± x̄ P†`.
    pub fn adjoint(&self) -> Result<Self> {
        let mut out = Self::new();
        for t in &self.terms {
            let factors: Vec<_> = t.factors.iter().rev().map(|l| l.adjoint()).collect();
            let coeff = t.coeff.conj();
            match &t.grassmann {
                None => {
                    out.push(coeff, factors);
                }
                Some(x) => {
                    let xb = x.involute()?;
                    let odd_p = t.fermion_degree() % 2 == 1;
                    let even = xb.even_part();
                    let odd = xb.odd_part();
                    if !even.is_zero() {
                        out.push_grassmann(coeff, even, factors.clone());
                    }
                    if !odd.is_zero() {
                        let s = if odd_p { -coeff } else { coeff };
                        out.push_grassmann(s, odd, factors);
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_modes(&self, spec: &HilbertSpec) -> Result<()> {
        for t in &self.terms {
            for l in &t.factors {
                match l.species {
                    Species::Fermion => spec.check_fermion_mode(l.mode)?,
                    Species::Boson => spec.check_boson_mode(l.mode)?,
                }
            }
        }
        Ok(())
    }

    /// Numeric matrix, products taken in the written order.
    pub fn realize(&self, spec: HilbertSpec) -> Result<FockOperator<F>> {
        self.realize_with(spec, SignConvention::default())
    }

    pub fn realize_with(&self, spec: HilbertSpec, convention: SignConvention) -> Result<FockOperator<F>> {
        if let Some(t) = self.terms.iter().find(|t| t.grassmann.is_some()) {
            return Err(Error::GrassmannShifted(format!(
                "term with factors {:?}",
                t.factors.iter().map(|l| l.to_string()).collect::<Vec<_>>()
            )));
        }
        self.check_modes(&spec)?;
        let ladders = LadderCache::new(spec, convention)?;
        let mut acc = FockOperator::zero(spec)?;
        for t in &self.terms {
            let mut p = FockOperator::identity(spec)?;
            for l in &t.factors {
                p = p.compose(ladders.get(l))?;
            }
            acc = acc.add(&p.scale(t.coeff))?;
        }
        Ok(acc)
    }

    /// Like [`Self::realize`] but requires the given parity.
    pub fn realize_as(&self, spec: HilbertSpec, parity: Parity) -> Result<FockOperator<F>> {
        let op = self.realize(spec)?;
        op.require_parity(parity)?;
        Ok(op)
    }

    /// Grassmann-valued matrix; numeric terms are lifted.
    pub fn realize_grassmann(&self, spec: HilbertSpec) -> Result<GrassmannOperator<F>> {
        self.check_modes(&spec)?;
        let ladders = LadderCache::new(spec, SignConvention::default())?;
        let mut acc = GrassmannOperator::zero(spec)?;
        for t in &self.terms {
            let mut p = FockOperator::identity(spec)?;
            for l in &t.factors {
                p = p.compose(ladders.get(l))?;
            }
            let mut g = p.scale(t.coeff).lift();
            if let Some(x) = &t.grassmann {
                g = GrassmannOperator::grassmann_scalar(spec, x)?.compose(&g)?;
            }
            acc = acc.add(&g)?;
        }
        Ok(acc)
    }

    /// Normal symbol `G(ψ̄, ψ)`: substitutes `f_i† → bar[i−1]`, `f_i → plain[i−1]`
    /// in the written order. Requires normal-ordered fermion-only terms.
    pub fn normal_symbol(
        &self,
        registry: &Arc<GeneratorRegistry>,
        bar: &[Generator],
        plain: &[Generator],
    ) -> Result<GrassmannElement<F>> {
        let mut acc = GrassmannElement::zero().with_registry(registry);
        for t in &self.terms {
            if !t.is_normal_ordered() {
                return Err(Error::NotNormalOrdered(
                    t.factors.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
                ));
            }
            let mut gens = Vec::with_capacity(t.factors.len());
            for l in &t.factors {
                if l.species == Species::Boson {
                    return Err(Error::InvalidSpace(
                        "normal symbol of boson operators is not Grassmann-valued".into(),
                    ));
                }
                let list = if l.dagger { bar } else { plain };
                let g = list.get(l.mode - 1).ok_or(Error::ModeOutOfRange {
                    kind: "fermion",
                    index: l.mode,
                    max: list.len(),
                })?;
                gens.push(*g);
            }
            let mut m = GrassmannElement::monomial(registry, t.coeff, &gens);
            if let Some(x) = &t.grassmann {
                m = x.try_mul(&m)?;
            }
            acc = acc.try_add(&m)?;
        }
        Ok(acc)
    }
}

pub fn parse_tokens(tokens: &str) -> Result<Vec<Ladder>> {
    tokens.split_whitespace().map(str::parse).collect()
}

struct LadderCache<F: Real> {
    fermions: Vec<(FockOperator<F>, FockOperator<F>)>,
    bosons: Vec<(FockOperator<F>, FockOperator<F>)>,
}

impl<F: Real> LadderCache<F> {
    fn new(spec: HilbertSpec, convention: SignConvention) -> Result<Self> {
        let fermions = (1..=spec.n_fermions)
            .map(|i| {
                let f = fermion_annihilator(spec, i, convention)?;
                let fd = f.adjoint();
                Ok((f, fd))
            })
            .collect::<Result<_>>()?;
        let bosons = (1..=spec.n_bosons)
            .map(|i| {
                let b = boson_annihilator(spec, i)?;
                let bd = b.adjoint();
                Ok((b, bd))
            })
            .collect::<Result<_>>()?;
        Ok(Self { fermions, bosons })
    }

    fn get(&self, l: &Ladder) -> &FockOperator<F> {
        let pair = match l.species {
            Species::Fermion => &self.fermions[l.mode - 1],
            Species::Boson => &self.bosons[l.mode - 1],
        };
        if l.dagger {
            &pair.1
        } else {
            &pair.0
        }
    }
}

/// `Σ_i f_i† f_i + c`.
pub fn number_polynomial<F: Real>(n: usize, constant: Complex<F>) -> OperatorPolynomial<F> {
    let mut p = OperatorPolynomial::new();
    for i in 1..=n {
        p.push(Complex::one(), vec![Ladder::fd(i), Ladder::f(i)]);
    }
    if !constant.is_zero() {
        p.push(constant, vec![]);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::RegistryBuilder;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn number_constraint_is_diagonal() {
        let p = number_polynomial(2, c(-1.0));
        let op = p.realize(HilbertSpec::fermions(2)).unwrap();
        let want = FockOperator::from_diagonal(HilbertSpec::fermions(2), &[c(-1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(op.max_deviation(&want).unwrap(), 0.0);
        assert_eq!(p.parity(), Some(Parity::Even));
    }

    #[test]
    fn triple_annihilator_is_rank_one() {
        let p = OperatorPolynomial::new().term(c(1.0), "f1 f2 f3").unwrap();
        let op = p.realize(HilbertSpec::fermions(3)).unwrap();
        let nonzero: Vec<_> = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .filter(|&(i, j)| op.matrix().get(i, j).norm() > 0.0)
            .collect();
        assert_eq!(nonzero, vec![(0, 7)]);
        assert_eq!(op.matrix().get(0, 7).norm(), 1.0);
    }

    #[test]
    fn empty_polynomial_realizes_to_zero() {
        let op = OperatorPolynomial::<f64>::new()
            .realize(HilbertSpec::fermions(2))
            .unwrap();
        assert_eq!(op.max_norm(), 0.0);
    }

    #[test]
    fn mode_out_of_range() {
        let p = OperatorPolynomial::<f64>::new().term(c(1.0), "f3").unwrap();
        assert!(matches!(
            p.realize(HilbertSpec::fermions(2)),
            Err(Error::ModeOutOfRange { .. })
        ));
    }

    #[test]
    fn realize_commutes_with_adjoint() {
        let p = OperatorPolynomial::new()
            .term(Complex::new(0.3, 0.7), "f1+ f2")
            .unwrap()
            .term(c(2.0), "f2 f1 f3+")
            .unwrap();
        let spec = HilbertSpec::fermions(3);
        let lhs = p.realize(spec).unwrap().adjoint();
        let rhs = p.adjoint().unwrap().realize(spec).unwrap();
        assert!(lhs.max_deviation(&rhs).unwrap() < 1e-15);
    }

    #[test]
    fn grassmann_shifted_constraint() {
        let mut b = RegistryBuilder::new();
        let (tb, t) = b.pair("θ̄", "θ").unwrap();
        let r = b.build();
        let theta = GrassmannElement::generator(&r, t);
        let chi = OperatorPolynomial::new()
            .term(c(1.0), "f1")
            .unwrap()
            .grassmann_term(c(-1.0), theta, "")
            .unwrap();
        assert_eq!(chi.parity(), Some(Parity::Odd));
        let spec = HilbertSpec::fermions(1);
        assert!(matches!(chi.realize(spec), Err(Error::GrassmannShifted(_))));
        let g = chi.realize_grassmann(spec).unwrap();
        assert_eq!(g.parity(), Some(Parity::Odd));
        // (f − θ)† = f† − θ̄, both through the polynomial and the matrix
        let adj = g.adjoint().unwrap();
        let via_poly = chi.adjoint().unwrap().realize_grassmann(spec).unwrap();
        assert!(adj.max_coefficient_deviation(&via_poly).unwrap() == 0.0);
        assert_eq!(adj.matrix().get(0, 0).coefficient_of(&[tb]), c(-1.0));
    }

    #[test]
    fn normal_symbol_substitution() {
        let mut b = RegistryBuilder::new();
        let (pb, _) = b.pair("ψ̄″", "ψ″").unwrap();
        let (_, p) = b.pair("ψ̄′", "ψ′").unwrap();
        let r = b.build();
        let poly = OperatorPolynomial::new().term(c(2.0), "f1+ f1").unwrap();
        let sym = poly.normal_symbol(&r, &[pb], &[p]).unwrap();
        assert_eq!(sym.coefficient_of(&[pb, p]), c(2.0));
        let bad = OperatorPolynomial::new().term(c(1.0), "f1 f1+").unwrap();
        assert!(matches!(
            bad.normal_symbol(&r, &[pb], &[p]),
            Err(Error::NotNormalOrdered(_))
        ));
    }

    #[test]
    fn token_parsing() {
        assert_eq!("f12+".parse::<Ladder>().unwrap(), Ladder::fd(12));
        assert_eq!("b1".parse::<Ladder>().unwrap(), Ladder::b(1));
        assert!("f0".parse::<Ladder>().is_err());
        assert!("x1".parse::<Ladder>().is_err());
        assert_eq!(Ladder::bd(3).to_string(), "b3+");
    }
}
