// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time-lattice coherent-state path integrals evaluated by exact Berezin
//! convolution of short-time kernels.
//!
//! Slice `n` carries fresh labels `ψ̄ᵢ_n, ψᵢ_n`. The bra labels play the role
//! of slice `N_t`; the ket labels that of slice 0 unless the projected
//! schedule is used, where slice 0 is integrated against `⟨ψ₀|𝔼|Ψ′⟩`.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coherent::{self, coherent_bra, coherent_ket, ModeLabels};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, GrassmannOperator, HilbertSpec, OperatorPolynomial};
use crate::grassmann::{GeneratorRegistry, GrassmannElement, RegistryBuilder, MAX_GENERATORS};
use crate::models::{ExampleId, ExampleParams, ExampleSystem, KernelLabels};
use crate::propagator::{coherent_overlap, constrained_evolution, ConstrainedKernel, KernelRoute};
use crate::scalar::Real;

/// How `⟨ψ_n| e^{−iεH} |ψ_{n−1}⟩` is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortTimeRule {
    /// `⟨ψ_n|ψ_{n−1}⟩ exp(−iε H(ψ̄_n, ψ_{n−1}))`, first order in `ε`.
    NormalSymbol,
    /// The exact matrix element of the short-time operator.
    Exact,
}

/// Where constraints enter the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// No constraint.
    Unconstrained,
    /// All multipliers zero and one group-average insertion at `τ = 0`.
    Projected,
    /// Per-slice multipliers `η_n` on `Φ`, with the insertion at `τ = 0` kept.
    Multipliers(Vec<f64>),
    /// Projector insertions on every slice, for second-class constraints.
    PerSlice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticePlan {
    pub n_slices: usize,
    pub rule: ShortTimeRule,
    pub schedule: Schedule,
}

impl LatticePlan {
    /// Default plan: the projected schedule with normal-symbol slices for
    /// fermion first-class examples, per-slice insertions with exact slices
    /// for second-class ones, exact slices for the boson–fermion system.
    pub fn for_example(id: ExampleId, n_slices: usize) -> Self {
        let (rule, schedule) = match id {
            ExampleId::NumberConstraint | ExampleId::ThreeFermion => (ShortTimeRule::NormalSymbol, Schedule::Projected),
            ExampleId::BoseFermi => (ShortTimeRule::Exact, Schedule::Projected),
            _ => (ShortTimeRule::Exact, Schedule::PerSlice),
        };
        Self {
            n_slices,
            rule,
            schedule,
        }
    }

    fn check(&self, id: ExampleId) -> Result<()> {
        if self.n_slices == 0 {
            return Err(Error::InconsistentPlan("at least one slice is required".into()));
        }
        match (&self.schedule, id.is_first_class()) {
            (Schedule::PerSlice, true) | (Schedule::Projected | Schedule::Multipliers(_), false) => {
                Err(Error::InconsistentPlan(format!(
                    "schedule {:?} does not fit the constraints of {id}",
                    self.schedule
                )))
            }
            (Schedule::Multipliers(eta), _) if eta.len() != self.n_slices => Err(Error::InconsistentPlan(format!(
                "{} multipliers for {} slices",
                eta.len(),
                self.n_slices
            ))),
            _ => Ok(()),
        }
    }

    /// Whether slice 0 is integrated (projected schedules).
    fn integrates_slice_zero(&self) -> bool {
        matches!(self.schedule, Schedule::Projected | Schedule::Multipliers(_))
    }
}

/// Endpoint labels plus fresh labels for every integrated slice.
#[derive(Debug, Clone)]
pub struct LatticeLabels {
    pub endpoints: KernelLabels,
    /// `slices[n]` for `n = 0..N_t`; `None` where the slice is an endpoint.
    pub slices: Vec<Option<ModeLabels>>,
}

impl LatticeLabels {
    pub fn new(n_modes: usize, theta: bool, plan: &LatticePlan) -> Result<Self> {
        let first = usize::from(!plan.integrates_slice_zero());
        let integrated = plan.n_slices - first;
        let need = 4 * n_modes + 2 * usize::from(theta) + 2 * n_modes * integrated;
        if need > MAX_GENERATORS {
            return Err(Error::InconsistentPlan(format!(
                "{} slices of {n_modes} modes need {need} generators, at most {MAX_GENERATORS} available",
                plan.n_slices
            )));
        }
        let mut b = RegistryBuilder::new();
        let pending = KernelLabels::register(&mut b, n_modes, theta)?;
        let mut slices = vec![None; plan.n_slices + 1];
        for (n, slot) in slices.iter_mut().enumerate().take(plan.n_slices).skip(first) {
            *slot = Some(ModeLabels::register(&mut b, n_modes, "ψ̄", "ψ", &format!("_{n}"))?);
        }
        Ok(Self {
            endpoints: pending.finish(b.build()),
            slices,
        })
    }

    pub fn registry(&self) -> &Arc<GeneratorRegistry> {
        &self.endpoints.registry
    }

    /// Labels at slice `n`: bra labels at the last slice, ket labels at an
    /// unintegrated slice 0.
    pub fn at(&self, n: usize) -> &ModeLabels {
        if n + 1 == self.slices.len() {
            &self.endpoints.bra
        } else {
            self.slices[n].as_ref().unwrap_or(&self.endpoints.ket)
        }
    }

    /// Bitmask of every intermediate generator.
    pub fn intermediate_mask(&self) -> u64 {
        self.slices
            .iter()
            .flatten()
            .flat_map(|m| m.bar.iter().chain(&m.plain))
            .fold(0, |acc, g| acc | 1u64 << g.index())
    }
}

/// One lattice step from slice `n − 1` to slice `n`.
#[derive(Debug, Clone)]
pub enum SliceStep<F: Real> {
    /// Normal-symbol substitution of `G` scaled by `−iε`: the kernel is
    /// `⟨ψ_n|ψ_{n−1}⟩ exp(−iε G(ψ̄_n, ψ_{n−1}))`.
    Symbol { generator: OperatorPolynomial<F>, eps: F },
    /// Exact matrix element `⟨ψ_n| U |ψ_{n−1}⟩` on a fermion space.
    Operator(GrassmannOperator<F>),
}

/// Short-time kernel between the labels `left` (slice `n`) and `right`
/// (slice `n − 1`).
pub fn short_time_kernel<F: Real>(
    registry: &Arc<GeneratorRegistry>,
    left: &ModeLabels,
    right: &ModeLabels,
    step: &SliceStep<F>,
) -> Result<GrassmannElement<F>> {
    match step {
        SliceStep::Symbol { generator, eps } => {
            let overlap = coherent_overlap::<F>(registry, left, right)?;
            if generator.is_empty() {
                return Ok(overlap);
            }
            let symbol = generator.normal_symbol(registry, &left.bar, &right.plain)?;
            let phase = symbol.scale(Complex::new(F::zero(), -*eps)).exp_even()?;
            overlap.try_mul(&phase)
        }
        SliceStep::Operator(u) => {
            let spec = u.spec();
            if spec.n_bosons != 0 {
                return Err(Error::InvalidSpace("lattice slices act on fermion spaces".into()));
            }
            let bra = coherent_bra(registry, spec, left)?;
            let ket = coherent_ket(registry, spec, right)?;
            coherent::matrix_element(&bra, u, &ket)
        }
    }
}

/// `∫ dψ̄_n dψ_n k1 k2` over the generators of one slice.
pub fn convolve<F: Real>(
    k1: &GrassmannElement<F>,
    k2: &GrassmannElement<F>,
    slice: &ModeLabels,
) -> Result<GrassmannElement<F>> {
    let mask = slice
        .bar
        .iter()
        .chain(&slice.plain)
        .fold(0u64, |acc, g| acc | 1u64 << g.index());
    if k1.support() & mask == 0 && k2.support() & mask == 0 {
        return Err(Error::SliceMismatch);
    }
    let mut out = k1.try_mul(k2)?;
    for (&bar, &plain) in slice.bar.iter().zip(&slice.plain) {
        out = out.integrate_pair(bar, plain);
    }
    Ok(out)
}

/// Folds slice kernels `k_1 … k_{N_t}` onto `start`, a function of slice 0.
fn fold<F: Real>(
    labels: &LatticeLabels,
    start: GrassmannElement<F>,
    mut kernel: impl FnMut(usize) -> Result<GrassmannElement<F>>,
) -> Result<GrassmannElement<F>> {
    let n_t = labels.slices.len() - 1;
    let mut acc = start;
    for n in 1..=n_t {
        let k = kernel(n)?;
        acc = match &labels.slices[n - 1] {
            Some(slice) => convolve(&k, &acc, slice)?,
            None => k,
        };
    }
    let leak = acc.support() & labels.intermediate_mask();
    if leak != 0 {
        return Err(Error::InconsistentPlan(format!(
            "intermediate generators survive integration (mask {leak:#x})"
        )));
    }
    Ok(acc)
}

/// Lattice kernel of an example with the default plan of `n_slices` slices.
pub fn lattice_kernel<F: Real>(sys: &ExampleSystem<F>) -> Result<ConstrainedKernel<F>> {
    lattice_kernel_with(sys, DEFAULT_SLICES)
}

pub const DEFAULT_SLICES: usize = 4;

pub fn lattice_kernel_with<F: Real>(sys: &ExampleSystem<F>, n_slices: usize) -> Result<ConstrainedKernel<F>> {
    lattice_propagate(sys.id, &sys.params, &LatticePlan::for_example(sys.id, n_slices))
}

/// Evaluates an example on the lattice. The kernel is returned over the
/// run's registry; compare with other routes by label.
pub fn lattice_propagate<F: Real>(
    id: ExampleId,
    params: &ExampleParams,
    plan: &LatticePlan,
) -> Result<ConstrainedKernel<F>> {
    plan.check(id)?;
    let labels = LatticeLabels::new(id.n_fermions(), id.has_theta(), plan)?;
    let sys = ExampleSystem::<F>::build_with_labels(id, params, labels.endpoints.clone())?;
    let value = if id == ExampleId::BoseFermi {
        bose_fermi_lattice(&sys, &labels, plan)?
    } else {
        fermion_lattice(&sys, &labels, plan)?
    };
    Ok(ConstrainedKernel {
        example: id,
        route: KernelRoute::Lattice,
        value,
    })
}

fn fermion_lattice<F: Real>(
    sys: &ExampleSystem<F>,
    labels: &LatticeLabels,
    plan: &LatticePlan,
) -> Result<GrassmannElement<F>> {
    let reg = labels.registry().clone();
    let spec = sys.spec;
    let eps = F::lit(sys.params.t) / F::lit(plan.n_slices as f64);
    let h = sys.hamiltonian_operator()?;
    match &plan.schedule {
        Schedule::Unconstrained => {
            let step = unconstrained_step(&sys.hamiltonian, &h, plan.rule, eps)?;
            fold(labels, GrassmannElement::one().with_registry(&reg), |n| {
                short_time_kernel(&reg, labels.at(n), labels.at(n - 1), &step)
            })
        }
        Schedule::Projected | Schedule::Multipliers(_) => {
            let etas = match &plan.schedule {
                Schedule::Multipliers(e) => e.clone(),
                _ => vec![0.0; plan.n_slices],
            };
            let terminal = terminal_element(&reg, spec, labels, &sys.projector)?;
            let phi = sys.phi.as_ref();
            fold(labels, terminal, |n| {
                let eta = etas[n - 1];
                let mut generator = sys.hamiltonian.clone();
                if eta != 0.0 {
                    let phi = phi.ok_or(Error::InconsistentPlan("multipliers need an even constraint".into()))?;
                    generator = add_scaled(&generator, phi, eta);
                }
                let op = generator.realize_grassmann(spec)?;
                let step = unconstrained_step(&generator, &op, plan.rule, eps)?;
                short_time_kernel(&reg, labels.at(n), labels.at(n - 1), &step)
            })
        }
        Schedule::PerSlice => {
            let e = &sys.projector;
            let u = match plan.rule {
                ShortTimeRule::Exact => constrained_evolution(&h, e, eps)?,
                // E (1 − iε EHE) E
                ShortTimeRule::NormalSymbol => {
                    let ehe = e.compose(&h)?.compose(e)?;
                    e.sub(&ehe.scale(Complex::new(F::zero(), eps)))?
                }
            };
            let step = SliceStep::Operator(u);
            fold(labels, GrassmannElement::one().with_registry(&reg), |n| {
                short_time_kernel(&reg, labels.at(n), labels.at(n - 1), &step)
            })
        }
    }
}

fn unconstrained_step<F: Real>(
    poly: &OperatorPolynomial<F>,
    op: &GrassmannOperator<F>,
    rule: ShortTimeRule,
    eps: F,
) -> Result<SliceStep<F>> {
    Ok(match rule {
        ShortTimeRule::NormalSymbol => SliceStep::Symbol {
            generator: poly.clone(),
            eps,
        },
        ShortTimeRule::Exact => SliceStep::Operator(op.expm(Complex::new(F::zero(), -eps))?),
    })
}

fn add_scaled<F: Real>(a: &OperatorPolynomial<F>, b: &OperatorPolynomial<F>, s: f64) -> OperatorPolynomial<F> {
    let mut out = a.clone();
    let s = Complex::new(F::lit(s), F::zero());
    for t in b.terms() {
        match &t.grassmann {
            Some(x) => out.push_grassmann(t.coeff * s, x.clone(), t.factors.clone()),
            None => out.push(t.coeff * s, t.factors.clone()),
        };
    }
    out
}

/// `⟨ψ₀| 𝔼 |Ψ′⟩` with slice-0 labels on the bra.
fn terminal_element<F: Real>(
    reg: &Arc<GeneratorRegistry>,
    spec: HilbertSpec,
    labels: &LatticeLabels,
    e: &GrassmannOperator<F>,
) -> Result<GrassmannElement<F>> {
    let bra = coherent_bra(reg, spec, labels.at(0))?;
    let ket = coherent_ket(reg, spec, &labels.endpoints.ket)?;
    coherent::matrix_element(&bra, e, &ket)
}

/// Boson–fermion kernel: the constraint average over `φ_k = 2πk/K` with the
/// fermion factor `⟨Ψ″| e^{−itωN_f} e^{iφ_k N_f} |Ψ′⟩` from a fermion lattice
/// whose terminal carries `e^{iφ_k N_f}`, and the truncated boson factor
/// summed in closed form.
fn bose_fermi_lattice<F: Real>(
    sys: &ExampleSystem<F>,
    labels: &LatticeLabels,
    plan: &LatticePlan,
) -> Result<GrassmannElement<F>> {
    let reg = labels.registry().clone();
    let p = &sys.params;
    let n = sys.spec.n_fermions;
    let fspec = HilbertSpec::fermions(n);
    let k = p.quadrature.unwrap_or_else(|| p.min_quadrature(n));
    let need = p.min_quadrature(n);
    if k < need {
        return Err(Error::QuadratureTooSmall { k, need });
    }
    let h_f = crate::models::free_fermions::<F>(n, p.omega);
    let h_op = h_f.realize_grassmann(fspec)?;
    let eps = F::lit(p.t) / F::lit(plan.n_slices as f64);
    let step = unconstrained_step(&h_f, &h_op, plan.rule, eps)?;
    let n_f = crate::fock::number_polynomial::<F>(n, Complex::new(F::zero(), F::zero())).realize(fspec)?;
    let zb = ExampleParams::z::<F>(&p.z_bra);
    let zk = ExampleParams::z::<F>(&p.z_ket);
    let omega_t = F::lit(p.omega * p.t);

    // slice kernels do not depend on φ
    let kernels: Vec<GrassmannElement<F>> = (1..=plan.n_slices)
        .map(|n| short_time_kernel(&reg, labels.at(n), labels.at(n - 1), &step))
        .collect::<Result<_>>()?;

    let mut sum = GrassmannElement::zero().with_registry(&reg);
    for j in 0..k {
        let phi = F::TAU() * F::lit(j as f64) / F::lit(k as f64);
        let rot: FockOperator<F> = n_f.unitary_exp(-phi)?;
        let terminal = terminal_element(&reg, fspec, labels, &rot.lift())?;
        let fermion = fold(labels, terminal, |n| Ok(kernels[n - 1].clone()))?;
        let boson_phase = Complex::new(F::zero(), -(omega_t + phi)).exp();
        let mut b = Complex::<F>::one();
        for (zb, zk) in zb.iter().zip(&zk) {
            let x = zb.conj() * *zk * boson_phase;
            let (mut term, mut acc) = (Complex::<F>::one(), Complex::<F>::one());
            for m in 1..=p.n_max {
                term = term * x / F::lit(m as f64);
                acc += term;
            }
            let norm = ((zb.norm_sqr() + zk.norm_sqr()) * F::lit(-0.5)).exp();
            b = b * acc * norm;
        }
        let w = Complex::new(F::zero(), phi * F::lit(p.p as f64)).exp() * b / F::lit(k as f64);
        sum = sum.try_add(&fermion.scale(w))?;
    }
    Ok(sum)
}

/// Lattice error against the operator route as a function of `N_t`.
#[derive(Debug, Clone, Serialize)]
pub struct TrotterReport {
    pub points: Vec<(usize, f64)>,
    /// Least-squares slope of `ln error` against `ln N_t`; `None` when some
    /// error vanishes.
    pub slope: Option<f64>,
    pub monotone: bool,
}

/// Sweeps the normal-symbol lattice for `H` on `n_modes` fermions, optionally
/// with a projector inserted at `τ = 0`, against `⟨Ψ″| e^{−itH} 𝔼 |Ψ′⟩`.
pub fn trotter_convergence<F: Real>(
    n_modes: usize,
    h: &OperatorPolynomial<F>,
    e: Option<&FockOperator<F>>,
    t: f64,
    sweep: &[usize],
) -> Result<TrotterReport> {
    let spec = HilbertSpec::fermions(n_modes);
    let h_op = h.realize(spec)?;
    let u = h_op.expm(Complex::new(F::zero(), -F::lit(t)))?;
    let full = match e {
        Some(e) => u.compose(e)?,
        None => u,
    };
    let mut points = Vec::with_capacity(sweep.len());
    for &n_t in sweep {
        let plan = LatticePlan {
            n_slices: n_t,
            rule: ShortTimeRule::NormalSymbol,
            schedule: if e.is_some() {
                Schedule::Projected
            } else {
                Schedule::Unconstrained
            },
        };
        let labels = LatticeLabels::new(n_modes, false, &plan)?;
        let reg = labels.registry().clone();
        let eps = F::lit(t) / F::lit(n_t as f64);
        let step = SliceStep::Symbol {
            generator: h.clone(),
            eps,
        };
        let start = match e {
            Some(e) => terminal_element(&reg, spec, &labels, &e.lift())?,
            None => GrassmannElement::one().with_registry(&reg),
        };
        let lattice = fold(&labels, start, |n| {
            short_time_kernel(&reg, labels.at(n), labels.at(n - 1), &step)
        })?;
        let exact =
            crate::propagator::kernel_operator_side(spec, &labels.endpoints, &ExampleParams::default(), &full.lift())?;
        let err = lattice.max_deviation(&exact)?.to_f64().unwrap_or(f64::NAN);
        points.push((n_t, err));
    }
    Ok(TrotterReport {
        slope: fit_slope(&points),
        monotone: points.windows(2).all(|w| w[1].1 <= w[0].1),
        points,
    })
}

fn fit_slope(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(_, e)| e.is_nan() || e <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{closed_form, kernel_deviation};

    #[test]
    fn number_constraint_is_exact_at_every_slice_count() {
        let params = ExampleParams::default();
        let sys = ExampleSystem::<f64>::build(ExampleId::NumberConstraint, &params).unwrap();
        let want = closed_form(&sys, false).unwrap().value;
        for n_t in 1..=4 {
            let got = lattice_kernel_with(&sys, n_t).unwrap().value;
            let d = kernel_deviation(&want, &got).unwrap();
            assert!(d < 1e-12, "N_t = {n_t}: {d:e}");
        }
    }

    #[test]
    fn shifted_case_a_is_exact() {
        let params = ExampleParams::default().with_t(0.7);
        let sys = ExampleSystem::<f64>::build(ExampleId::ShiftedCaseA, &params).unwrap();
        let want = closed_form(&sys, false).unwrap().value;
        for n_t in 1..=3 {
            let got = lattice_kernel_with(&sys, n_t).unwrap().value;
            assert!(kernel_deviation(&want, &got).unwrap() < 1e-12, "N_t = {n_t}");
        }
    }

    #[test]
    fn convolve_rejects_foreign_slice() {
        let plan = LatticePlan::for_example(ExampleId::NumberConstraint, 2);
        let labels = LatticeLabels::new(1, false, &plan).unwrap();
        let reg = labels.registry();
        let k = coherent_overlap::<f64>(reg, &labels.endpoints.bra, &labels.endpoints.ket).unwrap();
        let slice = labels.slices[1].as_ref().unwrap();
        assert!(matches!(convolve(&k, &k, slice), Err(Error::SliceMismatch)));
    }

    #[test]
    fn plan_must_fit_constraints() {
        let plan = LatticePlan {
            n_slices: 2,
            rule: ShortTimeRule::Exact,
            schedule: Schedule::PerSlice,
        };
        let r = lattice_propagate::<f64>(ExampleId::NumberConstraint, &ExampleParams::default(), &plan);
        assert!(matches!(r, Err(Error::InconsistentPlan(_))));
    }
}
