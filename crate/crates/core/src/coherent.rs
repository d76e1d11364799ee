// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fermion coherent states with Grassmann labels, odd coherent states, and
//! truncated boson coherent states.
//!
//! A ket is stored as `Σ |m⟩ v_m` and a bra as `Σ w_n ⟨n|`, with the Grassmann
//! coefficient on the far side of the basis vector. Operator action and
//! overlaps are then plain ordered products; see [`crate::fock::Operator`].

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fock::{fermion_ops, FockOperator, GrassmannOperator, HilbertSpec, OperatorPolynomial};
use crate::grassmann::{Generator, GeneratorRegistry, GrassmannElement, RegistryBuilder};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Ket,
    Bra,
}

/// Per-mode conjugate label pairs `(ψ̄_i, ψ_i)`, mode 1 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeLabels {
    pub bar: Vec<Generator>,
    pub plain: Vec<Generator>,
}

impl ModeLabels {
    /// Registers pairs named `{bar}{i}{suffix}` and `{plain}{i}{suffix}`.
    pub fn register(builder: &mut RegistryBuilder, n: usize, bar: &str, plain: &str, suffix: &str) -> Result<Self> {
        let mut out = Self {
            bar: Vec::with_capacity(n),
            plain: Vec::with_capacity(n),
        };
        for i in 1..=n {
            let (b, p) = builder.pair(format!("{bar}{i}{suffix}"), format!("{plain}{i}{suffix}"))?;
            out.bar.push(b);
            out.plain.push(p);
        }
        Ok(out)
    }

    /// Looks up labels registered by [`Self::register`].
    pub fn lookup(registry: &GeneratorRegistry, n: usize, bar: &str, plain: &str, suffix: &str) -> Result<Self> {
        let mut out = Self {
            bar: Vec::with_capacity(n),
            plain: Vec::with_capacity(n),
        };
        for i in 1..=n {
            out.bar.push(registry.get(&format!("{bar}{i}{suffix}"))?);
            out.plain.push(registry.get(&format!("{plain}{i}{suffix}"))?);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.plain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plain.is_empty()
    }

    /// `Σ_i ψ̄_i ψ_i`.
    pub fn bilinear<F: Real>(&self, registry: &Arc<GeneratorRegistry>) -> GrassmannElement<F> {
        bilinear(registry, &self.bar, &self.plain)
    }
}

/// `Σ_i a_i b_i` for generator lists of equal length.
pub fn bilinear<F: Real>(registry: &Arc<GeneratorRegistry>, a: &[Generator], b: &[Generator]) -> GrassmannElement<F> {
    a.iter()
        .zip(b)
        .fold(GrassmannElement::zero().with_registry(registry), |acc, (&x, &y)| {
            acc + GrassmannElement::monomial(registry, Complex::one(), &[x, y])
        })
}

/// `exp(−½ Σ ψ̄_i ψ_i)`.
pub fn normalization<F: Real>(registry: &Arc<GeneratorRegistry>, labels: &ModeLabels) -> Result<GrassmannElement<F>> {
    labels
        .bilinear::<F>(registry)
        .scale(Complex::new(-F::lit(0.5), F::zero()))
        .exp_even()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentVector<F: Real> {
    spec: HilbertSpec,
    side: Side,
    amplitudes: Vec<GrassmannElement<F>>,
}

impl<F: Real> CoherentVector<F> {
    pub fn new(spec: HilbertSpec, side: Side, amplitudes: Vec<GrassmannElement<F>>) -> Result<Self> {
        let dim = spec.validate()?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes on a space of dimension {dim}",
                amplitudes.len()
            )));
        }
        Ok(Self { spec, side, amplitudes })
    }

    /// Basis vector `|index⟩` or `⟨index|` with unit amplitude.
    pub fn basis(spec: HilbertSpec, side: Side, index: usize) -> Result<Self> {
        let dim = spec.validate()?;
        let amplitudes = (0..dim)
            .map(|i| {
                if i == index {
                    GrassmannElement::one()
                } else {
                    GrassmannElement::zero()
                }
            })
            .collect();
        Self::new(spec, side, amplitudes)
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Stored coefficients `v_m` of `Σ |m⟩ v_m` (or `w_n` of `Σ w_n ⟨n|`).
    pub fn amplitudes(&self) -> &[GrassmannElement<F>] {
        &self.amplitudes
    }

    /// Coefficients written to the left of the basis vector: `Σ a_m |m⟩`.
    /// Moving an odd monomial across an odd basis vector flips its sign.
    pub fn left_amplitudes(&self) -> Vec<GrassmannElement<F>> {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(m, v)| {
                if self.spec.fermion_number(m).is_multiple_of(2) {
                    v.clone()
                } else {
                    &v.even_part() - &v.odd_part()
                }
            })
            .collect()
    }

    fn require(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::DimensionMismatch(format!(
                "expected a {side:?}, found a {:?}",
                self.side
            )));
        }
        Ok(())
    }

    /// `op · ket` for a ket, `bra · op` for a bra.
    pub fn apply(&self, op: &GrassmannOperator<F>) -> Result<Self> {
        if op.spec() != self.spec {
            return Err(Error::DimensionMismatch("operator and state spaces differ".into()));
        }
        let n = self.amplitudes.len();
        let m = op.matrix();
        let amplitudes = match self.side {
            Side::Ket => (0..n)
                .map(|i| {
                    (0..n).try_fold(GrassmannElement::zero(), |acc, j| {
                        acc.try_add(&m.get(i, j).try_mul(&self.amplitudes[j])?)
                    })
                })
                .collect::<Result<_>>()?,
            Side::Bra => (0..n)
                .map(|j| {
                    (0..n).try_fold(GrassmannElement::zero(), |acc, i| {
                        acc.try_add(&self.amplitudes[i].try_mul(m.get(i, j))?)
                    })
                })
                .collect::<Result<_>>()?,
        };
        Self::new(self.spec, self.side, amplitudes)
    }

    pub fn apply_numeric(&self, op: &FockOperator<F>) -> Result<Self> {
        self.apply(&op.lift())
    }

    /// Left multiplication of every amplitude by an even Grassmann number.
    pub fn times_even(&self, x: &GrassmannElement<F>) -> Result<Self> {
        let amplitudes = self.amplitudes.iter().map(|a| x.try_mul(a)).collect::<Result<_>>()?;
        Self::new(self.spec, self.side, amplitudes)
    }

    pub fn max_deviation(&self, other: &Self) -> Result<F> {
        if self.spec != other.spec || self.side != other.side {
            return Err(Error::DimensionMismatch("states differ in shape".into()));
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .try_fold(F::zero(), |w, (a, b)| Ok(w.max(a.max_deviation(b)?)))
    }

    /// Tensor product `boson ⊗ fermion` of a pure boson state and a fermion state.
    pub fn tensor(boson: &Self, fermion: &Self) -> Result<Self> {
        if boson.side != fermion.side {
            return Err(Error::DimensionMismatch("tensor of a bra with a ket".into()));
        }
        let (a, b) = (boson.spec, fermion.spec);
        if a.n_fermions != 0 || b.n_bosons != 0 {
            return Err(Error::InvalidSpace(
                "tensor expects a boson factor and a fermion factor".into(),
            ));
        }
        let spec = HilbertSpec::mixed(b.n_fermions, a.n_bosons, a.boson_cutoff);
        let mut amplitudes = Vec::with_capacity(spec.validate()?);
        for x in &boson.amplitudes {
            if !x.is_scalar() {
                return Err(Error::InvalidSpace("boson amplitudes must be numeric".into()));
            }
            for y in &fermion.amplitudes {
                amplitudes.push(y.scale(x.scalar_part()));
            }
        }
        Self::new(spec, boson.side, amplitudes)
    }
}

/// `⟨bra|ket⟩ = Σ_n w_n v_n`.
pub fn overlap<F: Real>(bra: &CoherentVector<F>, ket: &CoherentVector<F>) -> Result<GrassmannElement<F>> {
    bra.require(Side::Bra)?;
    ket.require(Side::Ket)?;
    if bra.spec != ket.spec {
        return Err(Error::DimensionMismatch("bra and ket spaces differ".into()));
    }
    bra.amplitudes
        .iter()
        .zip(&ket.amplitudes)
        .try_fold(GrassmannElement::zero(), |acc, (w, v)| acc.try_add(&w.try_mul(v)?))
}

/// `⟨bra| op |ket⟩`.
pub fn matrix_element<F: Real>(
    bra: &CoherentVector<F>,
    op: &GrassmannOperator<F>,
    ket: &CoherentVector<F>,
) -> Result<GrassmannElement<F>> {
    overlap(bra, &ket.apply(op)?)
}

/// `⟨bra| G |ket⟩` for a polynomial realized on the ket's space.
pub fn polynomial_element<F: Real>(
    bra: &CoherentVector<F>,
    poly: &OperatorPolynomial<F>,
    ket: &CoherentVector<F>,
) -> Result<GrassmannElement<F>> {
    matrix_element(bra, &poly.realize_grassmann(ket.spec)?, ket)
}

/// `|ket⟩⟨bra|` as a Grassmann-valued operator.
pub fn outer<F: Real>(ket: &CoherentVector<F>, bra: &CoherentVector<F>) -> Result<GrassmannOperator<F>> {
    ket.require(Side::Ket)?;
    bra.require(Side::Bra)?;
    let n = ket.amplitudes.len();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, ket.amplitudes[i].try_mul(&bra.amplitudes[j])?);
        }
    }
    GrassmannOperator::new(ket.spec, m)
}

fn fermion_space(spec: HilbertSpec, labels: &ModeLabels) -> Result<()> {
    if spec.n_bosons != 0 {
        return Err(Error::InvalidSpace(
            "fermion coherent states live on a pure fermion space; use CoherentVector::tensor".into(),
        ));
    }
    if labels.len() != spec.n_fermions || labels.bar.len() != labels.plain.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} label pairs for {} modes",
            labels.len(),
            spec.n_fermions
        )));
    }
    Ok(())
}

fn check_registered(registry: &GeneratorRegistry, labels: &ModeLabels) -> Result<()> {
    for g in labels.bar.iter().chain(&labels.plain) {
        if g.index() >= registry.len() {
            return Err(Error::UnknownGenerator(format!("#{}", g.index())));
        }
    }
    Ok(())
}

/// `|Ψ⟩ = exp(−½ Ψ̄·Ψ) Π_i (1 + f_i† ψ_i) |0⟩`.
pub fn coherent_ket<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    spec: HilbertSpec,
    labels: &ModeLabels,
) -> Result<CoherentVector<F>> {
    fermion_space(spec, labels)?;
    check_registered(registry, labels)?;
    let ops = fermion_ops::<F>(spec)?;
    let mut state = CoherentVector::basis(spec, Side::Ket, 0)?;
    for (i, (_, fd)) in ops.iter().enumerate().rev() {
        let psi = GrassmannElement::generator(registry, labels.plain[i]);
        let step = GrassmannOperator::identity(spec)?
            .add(&fd.lift().compose(&GrassmannOperator::grassmann_scalar(spec, &psi)?)?)?;
        state = state.apply(&step)?;
    }
    state.times_even(&normalization(registry, labels)?)
}

/// `⟨Ψ| = exp(−½ Ψ̄·Ψ) ⟨0| Π_i (1 + ψ̄_i f_i)`.
pub fn coherent_bra<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    spec: HilbertSpec,
    labels: &ModeLabels,
) -> Result<CoherentVector<F>> {
    fermion_space(spec, labels)?;
    check_registered(registry, labels)?;
    let ops = fermion_ops::<F>(spec)?;
    let mut state = CoherentVector::basis(spec, Side::Bra, 0)?;
    for (i, (f, _)) in ops.iter().enumerate() {
        let psib = GrassmannElement::generator(registry, labels.bar[i]);
        let step = GrassmannOperator::identity(spec)?
            .add(&GrassmannOperator::grassmann_scalar(spec, &psib)?.compose(&f.lift())?)?;
        state = state.apply(&step)?;
    }
    state.times_even(&normalization(registry, labels)?)
}

/// Odd coherent state `|θ̄) = exp(½ θ̄θ) (f† − θ̄) |0⟩` of a single mode; an
/// eigenstate of `f†` with eigenvalue `θ̄`.
pub fn odd_coherent_ket<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    theta_bar: Generator,
    theta: Generator,
) -> Result<CoherentVector<F>> {
    let spec = HilbertSpec::fermions(1);
    let (_, fd) = fermion_ops::<F>(spec)?.remove(0);
    let tb = GrassmannElement::generator(registry, theta_bar);
    let op = fd.lift().sub(&GrassmannOperator::grassmann_scalar(spec, &tb)?)?;
    CoherentVector::basis(spec, Side::Ket, 0)?
        .apply(&op)?
        .times_even(&odd_normalization(registry, theta_bar, theta)?)
}

/// `(θ̄| = exp(½ θ̄θ) ⟨0| (f − θ)`.
pub fn odd_coherent_bra<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    theta_bar: Generator,
    theta: Generator,
) -> Result<CoherentVector<F>> {
    let spec = HilbertSpec::fermions(1);
    let (f, _) = fermion_ops::<F>(spec)?.remove(0);
    let t = GrassmannElement::generator(registry, theta);
    let op = f.lift().sub(&GrassmannOperator::grassmann_scalar(spec, &t)?)?;
    CoherentVector::basis(spec, Side::Bra, 0)?
        .apply(&op)?
        .times_even(&odd_normalization(registry, theta_bar, theta)?)
}

fn odd_normalization<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    theta_bar: Generator,
    theta: Generator,
) -> Result<GrassmannElement<F>> {
    GrassmannElement::monomial(registry, Complex::new(F::lit(0.5), F::zero()), &[theta_bar, theta]).exp_even()
}

/// Truncated boson coherent state `Π_i e^{−|z_i|²/2} Σ_n z_iⁿ/√n! |n⟩`.
/// A bra carries the conjugate amplitudes.
pub fn boson_coherent<F: Real>(spec: HilbertSpec, side: Side, z: &[Complex<F>]) -> Result<CoherentVector<F>> {
    let dim = spec.validate()?;
    if spec.n_fermions != 0 {
        return Err(Error::InvalidSpace(
            "boson coherent states need a pure boson space".into(),
        ));
    }
    if z.len() != spec.n_bosons {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} boson modes",
            z.len(),
            spec.n_bosons
        )));
    }
    let per_mode: Vec<Vec<Complex<F>>> = z
        .iter()
        .map(|&zi| {
            let zi = match side {
                Side::Ket => zi,
                Side::Bra => zi.conj(),
            };
            let mut amps = Vec::with_capacity(spec.boson_cutoff + 1);
            let mut a = Complex::new((-zi.norm_sqr() * F::lit(0.5)).exp(), F::zero());
            for n in 0..=spec.boson_cutoff {
                if n > 0 {
                    a = a * zi / F::lit(n as f64).sqrt();
                }
                amps.push(a);
            }
            amps
        })
        .collect();
    let amplitudes = (0..dim)
        .map(|idx| {
            let c = (1..=spec.n_bosons).fold(Complex::one(), |acc: Complex<F>, m| {
                acc * per_mode[m - 1][spec.boson_occupation(idx, m)]
            });
            GrassmannElement::scalar(c)
        })
        .collect();
    CoherentVector::new(spec, side, amplitudes)
}

/// Integrates `|Ψ⟩⟨Ψ|` over every label pair and returns the largest
/// deviation from the identity.
pub fn identity_resolution_check<F: Real>(n_fermions: usize) -> Result<F> {
    let spec = HilbertSpec::fermions(n_fermions);
    let mut b = RegistryBuilder::new();
    let labels = ModeLabels::register(&mut b, n_fermions, "ψ̄", "ψ", "")?;
    let reg = b.build();
    let ket = coherent_ket::<F>(&reg, spec, &labels)?;
    let bra = coherent_bra::<F>(&reg, spec, &labels)?;
    let proj = outer(&ket, &bra)?;
    let dim = spec.validate()?;
    let mut worst = F::zero();
    for i in 0..dim {
        for j in 0..dim {
            let mut x = proj.matrix().get(i, j).clone();
            for k in 0..n_fermions {
                x = x.integrate_pair(labels.bar[k], labels.plain[k]);
            }
            let want = if i == j { Complex::one() } else { Complex::zero() };
            let dev = x.try_sub(&GrassmannElement::scalar(want))?.max_abs();
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Ladder;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn single_mode_ket_left_amplitudes() {
        let mut b = RegistryBuilder::new();
        let l = ModeLabels::register(&mut b, 1, "ψ̄", "ψ", "").unwrap();
        let r = b.build();
        let ket = coherent_ket::<f64>(&r, HilbertSpec::fermions(1), &l).unwrap();
        let e = normalization::<f64>(&r, &l).unwrap();
        let a = ket.left_amplitudes();
        assert_eq!(a[0], e);
        let want = -(&e * &GrassmannElement::generator(&r, l.plain[0]));
        assert_eq!(a[1], want);
    }

    #[test]
    fn two_mode_top_amplitude() {
        let mut b = RegistryBuilder::new();
        let l = ModeLabels::register(&mut b, 2, "ψ̄", "ψ", "").unwrap();
        let r = b.build();
        let ket = coherent_ket::<f64>(&r, HilbertSpec::fermions(2), &l).unwrap();
        let e = normalization::<f64>(&r, &l).unwrap();
        let pp = GrassmannElement::monomial(&r, c(-1.0), &[l.plain[0], l.plain[1]]);
        assert_eq!(ket.left_amplitudes()[3], &e * &pp);
    }

    #[test]
    fn resolution_of_identity() {
        for n in 1..=3 {
            assert!(identity_resolution_check::<f64>(n).unwrap() <= 1e-13);
        }
    }

    #[test]
    fn annihilator_eigenstate() {
        let mut b = RegistryBuilder::new();
        let l = ModeLabels::register(&mut b, 2, "ψ̄", "ψ", "").unwrap();
        let r = b.build();
        let spec = HilbertSpec::fermions(2);
        let ket = coherent_ket::<f64>(&r, spec, &l).unwrap();
        for (i, (f, _)) in fermion_ops::<f64>(spec).unwrap().iter().enumerate() {
            let lhs = ket.apply_numeric(f).unwrap();
            let psi = GrassmannElement::generator(&r, l.plain[i]);
            let rhs = ket
                .apply(&GrassmannOperator::grassmann_scalar(spec, &psi).unwrap())
                .unwrap();
            assert_eq!(lhs.max_deviation(&rhs).unwrap(), 0.0);
        }
    }

    #[test]
    fn odd_state_properties() {
        let mut b = RegistryBuilder::new();
        let (tb, t) = b.pair("θ̄", "θ").unwrap();
        let (pb, p) = b.pair("ψ̄", "ψ").unwrap();
        let r = b.build();
        let spec = HilbertSpec::fermions(1);
        let odd = odd_coherent_ket::<f64>(&r, tb, t).unwrap();
        let (_, fd) = fermion_ops::<f64>(spec).unwrap().remove(0);
        let lhs = odd.apply_numeric(&fd).unwrap();
        let tbe = GrassmannElement::generator(&r, tb);
        let rhs = odd
            .apply(&GrassmannOperator::grassmann_scalar(spec, &tbe).unwrap())
            .unwrap();
        assert_eq!(lhs.max_deviation(&rhs).unwrap(), 0.0);

        let theta = ModeLabels {
            bar: vec![tb],
            plain: vec![t],
        };
        let even_bra = coherent_bra::<f64>(&r, spec, &theta).unwrap();
        assert!(overlap(&even_bra, &odd).unwrap().is_zero());
        let odd_bra = odd_coherent_bra::<f64>(&r, tb, t).unwrap();
        assert_eq!(overlap(&odd_bra, &odd).unwrap(), GrassmannElement::one());

        // ⟨ψ|ψ⟩' = ⟨ψ|θ⟩⟨θ|ψ'⟩ + ⟨ψ|θ̄)(θ̄|ψ'⟩ with ψ on both sides
        let psi = ModeLabels {
            bar: vec![pb],
            plain: vec![p],
        };
        let bra = coherent_bra::<f64>(&r, spec, &psi).unwrap();
        let ket = coherent_ket::<f64>(&r, spec, &psi).unwrap();
        let even_ket = coherent_ket::<f64>(&r, spec, &theta).unwrap();
        let lhs = overlap(&bra, &ket).unwrap();
        let rhs = &overlap(&bra, &even_ket).unwrap() * &overlap(&even_bra, &ket).unwrap()
            + &overlap(&bra, &odd).unwrap() * &overlap(&odd_bra, &ket).unwrap();
        assert!(lhs.max_deviation(&rhs).unwrap() < 1e-15);
    }

    #[test]
    fn number_operator_substitution() {
        let mut b = RegistryBuilder::new();
        let l2 = ModeLabels::register(&mut b, 1, "ψ̄", "ψ", "″").unwrap();
        let l1 = ModeLabels::register(&mut b, 1, "ψ̄", "ψ", "′").unwrap();
        let r = b.build();
        let spec = HilbertSpec::fermions(1);
        let bra = coherent_bra::<f64>(&r, spec, &l2).unwrap();
        let ket = coherent_ket::<f64>(&r, spec, &l1).unwrap();
        let g = OperatorPolynomial::new().term(c(1.0), "f1+ f1").unwrap();
        let lhs = polynomial_element(&bra, &g, &ket).unwrap();
        let sym = g.normal_symbol(&r, &l2.bar, &l1.plain).unwrap();
        let rhs = &sym * &overlap(&bra, &ket).unwrap();
        assert!(lhs.max_deviation(&rhs).unwrap() < 1e-15);
        let _ = Ladder::f(1);
    }

    #[test]
    fn boson_overlap_closed_form() {
        let spec = HilbertSpec::bosons(1, 20);
        let z2: Complex<f64> = Complex::new(0.4, -0.3);
        let z1: Complex<f64> = Complex::new(-0.2, 0.5);
        let bra = boson_coherent(spec, Side::Bra, &[z2]).unwrap();
        let ket = boson_coherent(spec, Side::Ket, &[z1]).unwrap();
        let got = overlap(&bra, &ket).unwrap().scalar_part();
        let want: Complex<f64> = (-(z2.norm_sqr() + z1.norm_sqr()) / 2.0 + z2.conj() * z1).exp();
        assert!((got - want).norm() < 1e-12);
        let vac = boson_coherent::<f64>(spec, Side::Ket, &[c(0.0)]).unwrap();
        assert_eq!(vac, CoherentVector::basis(spec, Side::Ket, 0).unwrap());
    }
}
