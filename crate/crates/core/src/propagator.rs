// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Constrained propagators `⟨Ψ″| E e^{−itEHE} E |Ψ′⟩`: the operator-side
//! evaluation and closed forms for the example systems.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coherent::{
    self, boson_coherent, coherent_bra, coherent_ket, odd_coherent_bra, odd_coherent_ket, CoherentVector, ModeLabels,
    Side,
};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, GrassmannOperator, HilbertSpec};
use crate::grassmann::{Generator, GeneratorRegistry, GrassmannElement};
use crate::models::{ExampleId, ExampleParams, ExampleSystem, KernelLabels};
use crate::scalar::{re as cr, Real};

/// How a kernel was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelRoute {
    /// Matrix elements of the constrained evolution operator.
    Operator,
    /// Closed-form Grassmann expression.
    ClosedForm,
    /// Alternative closed form (the second written form of the same kernel).
    ClosedFormAlt,
    /// Discrete average over the constraint group.
    Quadrature,
    /// Composition of short-time kernels.
    Lattice,
}

impl KernelRoute {
    pub fn name(self) -> &'static str {
        match self {
            KernelRoute::Operator => "operator",
            KernelRoute::ClosedForm => "closed-form",
            KernelRoute::ClosedFormAlt => "closed-form-alt",
            KernelRoute::Quadrature => "quadrature",
            KernelRoute::Lattice => "lattice",
        }
    }
}

impl fmt::Display for KernelRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            KernelRoute::Operator,
            KernelRoute::ClosedForm,
            KernelRoute::ClosedFormAlt,
            KernelRoute::Quadrature,
            KernelRoute::Lattice,
        ]
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| Error::Parse(format!("unknown route '{s}'")))
    }
}

/// A kernel value tagged with its origin.
#[derive(Debug, Clone)]
pub struct ConstrainedKernel<F: Real> {
    pub example: ExampleId,
    pub route: KernelRoute,
    pub value: GrassmannElement<F>,
}

impl<F: Real> ConstrainedKernel<F> {
    /// Largest coefficient deviation, matching generators by label.
    pub fn max_deviation(&self, other: &Self) -> Result<F> {
        kernel_deviation(&self.value, &other.value)
    }
}

/// Coefficient deviation of two Grassmann elements that may live on
/// different registries sharing labels.
pub fn kernel_deviation<F: Real>(a: &GrassmannElement<F>, b: &GrassmannElement<F>) -> Result<F> {
    match (a.registry(), b.registry()) {
        (Some(ra), Some(_)) => a.max_deviation(&b.transfer(ra)?),
        _ => a.max_deviation(b),
    }
}

fn mul<F: Real>(a: &GrassmannElement<F>, b: &GrassmannElement<F>) -> Result<GrassmannElement<F>> {
    a.try_mul(b)
}

/// `E e^{−it EHE} E`.
pub fn constrained_evolution<F: Real>(
    h: &GrassmannOperator<F>,
    e: &GrassmannOperator<F>,
    t: F,
) -> Result<GrassmannOperator<F>> {
    let ehe = e.compose(h)?.compose(e)?;
    let u = ehe.expm(Complex::new(F::zero(), -t))?;
    e.compose(&u)?.compose(e)
}

/// Numeric `E e^{−it EHE} E`.
pub fn constrained_evolution_numeric<F: Real>(
    h: &FockOperator<F>,
    e: &FockOperator<F>,
    t: F,
) -> Result<FockOperator<F>> {
    let ehe = e.compose(h)?.compose(e)?;
    let u = ehe.expm(Complex::new(F::zero(), -t))?;
    e.compose(&u)?.compose(e)
}

/// Coherent bra and ket at the kernel endpoints. Boson labels, if any, are
/// taken from `params`.
pub fn endpoint_states<F: Real>(
    spec: HilbertSpec,
    labels: &KernelLabels,
    params: &ExampleParams,
) -> Result<(CoherentVector<F>, CoherentVector<F>)> {
    let fspec = HilbertSpec::fermions(spec.n_fermions);
    let bra = coherent_bra(&labels.registry, fspec, &labels.bra)?;
    let ket = coherent_ket(&labels.registry, fspec, &labels.ket)?;
    if spec.n_bosons == 0 {
        return Ok((bra, ket));
    }
    let bspec = HilbertSpec::bosons(spec.n_bosons, spec.boson_cutoff);
    let zb = boson_coherent(bspec, Side::Bra, &ExampleParams::z::<F>(&params.z_bra))?;
    let zk = boson_coherent(bspec, Side::Ket, &ExampleParams::z::<F>(&params.z_ket))?;
    Ok((CoherentVector::tensor(&zb, &bra)?, CoherentVector::tensor(&zk, &ket)?))
}

/// `⟨Ψ″| U |Ψ′⟩` between the endpoint coherent states.
pub fn kernel_operator_side<F: Real>(
    spec: HilbertSpec,
    labels: &KernelLabels,
    params: &ExampleParams,
    u: &GrassmannOperator<F>,
) -> Result<GrassmannElement<F>> {
    let (bra, ket) = endpoint_states(spec, labels, params)?;
    coherent::matrix_element(&bra, u, &ket)
}

/// Operator-side kernel of an example.
pub fn operator_kernel<F: Real>(sys: &ExampleSystem<F>) -> Result<ConstrainedKernel<F>> {
    let t = F::lit(sys.params.t);
    let u = if let Some(e) = sys.projector.to_numeric() {
        let h = sys.hamiltonian.realize(sys.spec)?;
        constrained_evolution_numeric(&h, &e, t)?.lift()
    } else {
        constrained_evolution(&sys.hamiltonian_operator()?, &sys.projector, t)?
    };
    Ok(ConstrainedKernel {
        example: sys.id,
        route: KernelRoute::Operator,
        value: kernel_operator_side(sys.spec, &sys.labels, &sys.params, &u)?,
    })
}

/// `⟨Ψ″|Ψ′⟩ = exp(−½Ψ̄″·Ψ″ − ½Ψ̄′·Ψ′ + Ψ̄″·Ψ′)` for arbitrary label sets.
pub fn coherent_overlap<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    bra: &ModeLabels,
    ket: &ModeLabels,
) -> Result<GrassmannElement<F>> {
    let cross = coherent::bilinear::<F>(registry, &bra.bar, &ket.plain).exp_even()?;
    mul(
        &mul(
            &coherent::normalization(registry, bra)?,
            &coherent::normalization(registry, ket)?,
        )?,
        &cross,
    )
}

/// `h = (θ̄| H |θ̄)` for a single-mode Hamiltonian.
pub fn odd_expectation<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    theta_bar: Generator,
    theta: Generator,
    h: &GrassmannOperator<F>,
) -> Result<GrassmannElement<F>> {
    let bra = odd_coherent_bra(registry, theta_bar, theta)?;
    let ket = odd_coherent_ket(registry, theta_bar, theta)?;
    coherent::matrix_element(&bra, h, &ket)
}

/// Closed form of an example kernel. `alternate` selects the second written
/// form where two are known; both must agree.
pub fn closed_form<F: Real>(sys: &ExampleSystem<F>, alternate: bool) -> Result<ConstrainedKernel<F>> {
    let labels = &sys.labels;
    let reg = &labels.registry;
    let p = &sys.params;
    let t = p.t;
    let bar = |i: usize| GrassmannElement::<F>::generator(reg, labels.bra.bar[i]);
    let ket = |i: usize| GrassmannElement::<F>::generator(reg, labels.ket.plain[i]);
    let pair = |i: usize| mul(&bar(i), &ket(i));
    let overlap = || coherent_overlap::<F>(reg, &labels.bra, &labels.ket);
    let ee = || -> Result<GrassmannElement<F>> {
        mul(
            &coherent::normalization(reg, &labels.bra)?,
            &coherent::normalization(reg, &labels.ket)?,
        )
    };
    let cross = || coherent::bilinear::<F>(reg, &labels.bra.bar, &labels.ket.plain);
    let half = cr::<F>(0.5);

    let value = match sys.id {
        ExampleId::NumberConstraint => mul(&ee()?, &cross())?,
        ExampleId::ThreeFermion => {
            let pairs = pair(0)?
                .try_mul(&pair(1)?)?
                .try_add(&pair(1)?.try_mul(&pair(2)?)?)?
                .try_add(&pair(2)?.try_mul(&pair(0)?)?)?;
            if alternate {
                mul(&ee()?, &cross().try_add(&pairs)?)?
            } else {
                mul(&overlap()?, &cross().try_sub(&pairs)?)?
            }
        }
        ExampleId::ShiftedCaseA => {
            let (tb, th) = labels.theta.ok_or(Error::MissingParameter("θ"))?;
            let theta_labels = ModeLabels {
                bar: vec![tb],
                plain: vec![th],
            };
            let symbol = sys.hamiltonian.normal_symbol(reg, &[tb], &[th])?;
            let phase = symbol.scale(Complex::new(F::zero(), -F::lit(t)));
            if alternate {
                let left = coherent_overlap::<F>(reg, &labels.bra, &theta_labels)?;
                let right = coherent_overlap::<F>(reg, &theta_labels, &labels.ket)?;
                mul(&mul(&left, &right)?, &phase.exp_even()?)?
            } else {
                let a = bar(0).try_sub(&GrassmannElement::generator(reg, tb))?;
                let b = ket(0).try_sub(&GrassmannElement::generator(reg, th))?;
                let exponent = mul(&a, &b)?.scale(-Complex::<F>::one()).try_add(&phase)?;
                mul(&overlap()?, &exponent.exp_even()?)?
            }
        }
        ExampleId::ShiftedCaseB => {
            let (tb, th) = labels.theta.ok_or(Error::MissingParameter("θ"))?;
            // anti-normal symbol of ω f†f = ω(1 − f f†) at f → θ, f† → θ̄
            let h = GrassmannElement::scalar(cr::<F>(p.omega)).try_add(&GrassmannElement::monomial(
                reg,
                cr(p.omega),
                &[tb, th],
            ))?;
            let a = bar(0).try_sub(&GrassmannElement::generator(reg, tb))?;
            let b = ket(0).try_sub(&GrassmannElement::generator(reg, th))?;
            let phase = h.scale(Complex::new(F::zero(), -F::lit(t))).exp_even()?;
            mul(&mul(&overlap()?, &mul(&a, &b)?)?, &phase)?
        }
        ExampleId::DifferenceCaseA | ExampleId::DifferenceCaseB => {
            let minus_bar = bar(0).try_sub(&bar(1))?;
            let minus_ket = ket(0).try_sub(&ket(1))?;
            let diff = mul(&minus_bar, &minus_ket)?.scale(half);
            if sys.id == ExampleId::DifferenceCaseA {
                if alternate {
                    let plus = mul(&bar(0).try_add(&bar(1))?, &ket(0).try_add(&ket(1))?)?.scale(half);
                    mul(&ee()?, &GrassmannElement::one().try_add(&plus)?)?
                } else {
                    mul(&overlap()?, &GrassmannElement::one().try_sub(&diff)?)?
                }
            } else if alternate {
                let four = mul(&pair(0)?, &pair(1)?)?;
                mul(&ee()?, &four.try_add(&diff)?)?
            } else {
                mul(&overlap()?, &diff)?
            }
        }
        ExampleId::BoseFermi => bose_fermi_mode_sum(sys)?,
    };
    Ok(ConstrainedKernel {
        example: sys.id,
        route: if alternate {
            KernelRoute::ClosedFormAlt
        } else {
            KernelRoute::ClosedForm
        },
        value,
    })
}

/// `exp(−½Σ|z″|² − ½Σ|z′|²) · exp(−½Ψ̄″·Ψ″ − ½Ψ̄′·Ψ′)`.
fn bose_fermi_normalization<F: Real>(
    labels: &KernelLabels,
    zb: &[Complex<F>],
    zk: &[Complex<F>],
) -> Result<GrassmannElement<F>> {
    let reg = &labels.registry;
    let s: F = zb.iter().chain(zk).fold(F::zero(), |acc, z| acc + z.norm_sqr());
    let boson = Complex::new((-s * F::lit(0.5)).exp(), F::zero());
    Ok(mul(
        &coherent::normalization(reg, &labels.bra)?,
        &coherent::normalization(reg, &labels.ket)?,
    )?
    .scale(boson))
}

/// Truncated mode sum over boson occupations `m` (each `≤ n_max`) and fermion
/// occupations `n` with `Σn = Σm − p`:
/// `𝒩 Σ e^{−iωt(Σm+Σn)} Π (z″*z′)^m/m! · (ψ″ⁿ)‾ · ψ′ⁿ`.
pub fn bose_fermi_mode_sum<F: Real>(sys: &ExampleSystem<F>) -> Result<GrassmannElement<F>> {
    let labels = &sys.labels;
    let reg = &labels.registry;
    let p = &sys.params;
    let zb = ExampleParams::z::<F>(&p.z_bra);
    let zk = ExampleParams::z::<F>(&p.z_ket);
    let (m_modes, n_modes) = (zk.len(), labels.n_modes());
    let radix = p.n_max + 1;
    let n_boson_states = radix.checked_pow(m_modes as u32).ok_or(Error::DimensionCap {
        dim: usize::MAX,
        cap: crate::fock::max_dim(),
    })?;
    let omega_t = F::lit(p.omega * p.t);

    // fermion monomials by occupation bits
    let mut fermion: Vec<(usize, GrassmannElement<F>)> = Vec::with_capacity(1 << n_modes);
    for bits in 0..(1usize << n_modes) {
        let mut left = GrassmannElement::one().with_registry(reg);
        let mut right = GrassmannElement::one().with_registry(reg);
        for i in 0..n_modes {
            if bits >> i & 1 == 1 {
                left = mul(&left, &GrassmannElement::generator(reg, labels.bra.plain[i]))?;
                right = mul(&right, &GrassmannElement::generator(reg, labels.ket.plain[i]))?;
            }
        }
        fermion.push((bits.count_ones() as usize, mul(&left.involute()?, &right)?));
    }

    let mut sum = GrassmannElement::zero().with_registry(reg);
    for idx in 0..n_boson_states {
        let mut rest = idx;
        let mut total_m = 0usize;
        let mut weight = Complex::<F>::one();
        for i in 0..m_modes {
            let m = rest % radix;
            rest /= radix;
            total_m += m;
            let zz = zb[i].conj() * zk[i];
            weight = weight * zz.powu(m as u32) / F::lit(factorial(m));
        }
        for (count, f) in &fermion {
            if *count as i64 != total_m as i64 - p.p {
                continue;
            }
            let phase = Complex::new(F::zero(), -omega_t * F::lit((total_m + count) as f64)).exp();
            sum = sum.try_add(&f.scale(weight * phase))?;
        }
    }
    mul(&bose_fermi_normalization(labels, &zb, &zk)?, &sum)
}

fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, k| acc * k as f64)
}

/// `𝒩 (1/K) Σ_k e^{iφ_k p} B_k exp(e^{−i(ωt−φ_k)} Ψ̄″·Ψ′)` with
/// `φ_k = 2πk/K` and `B_k` the boson factor truncated at `n_max` per mode.
pub fn bose_fermi_quadrature<F: Real>(sys: &ExampleSystem<F>, k: Option<usize>) -> Result<GrassmannElement<F>> {
    let labels = &sys.labels;
    let reg = &labels.registry;
    let p = &sys.params;
    let need = p.min_quadrature(labels.n_modes());
    let k = k.or(p.quadrature).unwrap_or(need);
    if k < need {
        return Err(Error::QuadratureTooSmall { k, need });
    }
    let zb = ExampleParams::z::<F>(&p.z_bra);
    let zk = ExampleParams::z::<F>(&p.z_ket);
    let omega_t = F::lit(p.omega * p.t);
    let cross = coherent::bilinear::<F>(reg, &labels.bra.bar, &labels.ket.plain);
    let mut sum = GrassmannElement::zero().with_registry(reg);
    for j in 0..k {
        let phi = F::TAU() * F::lit(j as f64) / F::lit(k as f64);
        let boson_phase = Complex::new(F::zero(), -(omega_t + phi)).exp();
        let mut b = Complex::<F>::one();
        for (zb, zk) in zb.iter().zip(&zk) {
            b *= truncated_exp(zb.conj() * *zk * boson_phase, p.n_max);
        }
        let fermion_phase = Complex::new(F::zero(), -(omega_t - phi)).exp();
        let f = cross.scale(fermion_phase).exp_even()?;
        let w = Complex::new(F::zero(), phi * F::lit(p.p as f64)).exp() * b;
        sum = sum.try_add(&f.scale(w))?;
    }
    let sum = sum.scale(Complex::new(F::one() / F::lit(k as f64), F::zero()));
    mul(&bose_fermi_normalization(labels, &zb, &zk)?, &sum)
}

/// `Σ_{m ≤ n} xᵐ/m!`.
fn truncated_exp<F: Real>(x: Complex<F>, n: usize) -> Complex<F> {
    let mut term = Complex::<F>::one();
    let mut sum = term;
    for m in 1..=n {
        term = term * x / F::lit(m as f64);
        sum += term;
    }
    sum
}

/// Builds the example and evaluates it along `route` (lattice excluded).
pub fn evaluate<F: Real>(id: ExampleId, params: &ExampleParams, route: KernelRoute) -> Result<ConstrainedKernel<F>> {
    let sys = ExampleSystem::<F>::build(id, params)?;
    evaluate_system(&sys, route)
}

pub fn evaluate_system<F: Real>(sys: &ExampleSystem<F>, route: KernelRoute) -> Result<ConstrainedKernel<F>> {
    match route {
        KernelRoute::Operator => operator_kernel(sys),
        KernelRoute::ClosedForm => closed_form(sys, false),
        KernelRoute::ClosedFormAlt => closed_form(sys, true),
        KernelRoute::Quadrature => {
            if sys.id != ExampleId::BoseFermi {
                return Err(Error::InconsistentPlan(format!(
                    "the quadrature route applies to bose-fermi only, not {}",
                    sys.id
                )));
            }
            Ok(ConstrainedKernel {
                example: sys.id,
                route,
                value: bose_fermi_quadrature(sys, None)?,
            })
        }
        KernelRoute::Lattice => crate::lattice::lattice_kernel(sys),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    fn agree(id: ExampleId, params: &ExampleParams) {
        let sys = ExampleSystem::<f64>::build(id, params).unwrap();
        let op = operator_kernel(&sys).unwrap();
        let cf = closed_form(&sys, false).unwrap();
        let alt = closed_form(&sys, true).unwrap();
        let d1 = op.max_deviation(&cf).unwrap();
        let d2 = cf.max_deviation(&alt).unwrap();
        assert!(
            d1 < TOL,
            "{id}: operator vs closed form {d1:e}\nop={}\ncf={}",
            op.value,
            cf.value
        );
        assert!(d2 < TOL, "{id}: closed forms disagree {d2:e}");
    }

    #[test]
    fn closed_forms_match_operator_side() {
        for id in ExampleId::ALL {
            agree(id, &ExampleParams::default().with_t(0.7));
        }
    }

    #[test]
    fn bose_fermi_offsets() {
        for p in [-1, 0, 1] {
            let params = ExampleParams::default().with_t(0.3).with_p(p);
            agree(ExampleId::BoseFermi, &params);
            let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &params).unwrap();
            let q = bose_fermi_quadrature(&sys, None).unwrap();
            let s = bose_fermi_mode_sum(&sys).unwrap();
            assert!(q.max_deviation(&s).unwrap() < TOL, "p = {p}");
        }
    }

    #[test]
    fn quadrature_below_minimum_is_rejected() {
        let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &ExampleParams::default()).unwrap();
        let need = sys.params.min_quadrature(1);
        assert!(matches!(
            bose_fermi_quadrature(&sys, Some(need - 1)),
            Err(Error::QuadratureTooSmall { .. })
        ));
    }

    #[test]
    fn odd_expectation_of_number_operator() {
        let labels = KernelLabels::new(1, true).unwrap();
        let (tb, th) = labels.theta.unwrap();
        let reg = &labels.registry;
        let h = crate::models::free_fermions::<f64>(1, 1.3)
            .realize(HilbertSpec::fermions(1))
            .unwrap()
            .lift();
        let got = odd_expectation(reg, tb, th, &h).unwrap();
        let want = GrassmannElement::scalar(Complex::new(1.3, 0.0))
            + GrassmannElement::monomial(reg, Complex::new(1.3, 0.0), &[tb, th]);
        assert!(got.max_deviation(&want).unwrap() < TOL, "{got}");
    }
}
