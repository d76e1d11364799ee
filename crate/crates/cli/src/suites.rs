// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verification suites. Every check compares two independent routes, or a
//! route against an oracle written out here.

use std::sync::Arc;

use clap::ValueEnum;
use fermicon::coherent::{self, coherent_bra, coherent_ket, identity_resolution_check};
use fermicon::config::Tolerances;
use fermicon::constraints::ConstraintSet;
use fermicon::fock::{fermion_ops, FockOperator, HilbertSpec, Ladder, OperatorPolynomial};
use fermicon::grassmann::{text, GeneratorRegistry, GrassmannElement, RegistryBuilder};
use fermicon::lattice::{
    lattice_kernel_with, lattice_propagate, trotter_convergence, LatticeLabels, LatticePlan, Schedule, ShortTimeRule,
};
use fermicon::linalg::hermitian_eigen;
use fermicon::models::{self, ExampleId, ExampleParams, ExampleSystem, KernelLabels};
use fermicon::projector::{project_complement_average, project_group_average, project_kernel};
use fermicon::propagator::{
    bose_fermi_mode_sum, bose_fermi_quadrature, closed_form, evaluate_system, kernel_deviation, KernelRoute,
};
use fermicon::{Grassmann, Result, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::report::Check;

const CASES: usize = 200;
const TIMES: [f64; 3] = [0.0, 0.7, 3.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Grassmann,
    Coherent,
    FirstClass,
    SecondClass,
    BoseFermi,
    Lattice,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::Grassmann => "grassmann",
            Self::Coherent => "coherent",
            Self::FirstClass => "first-class",
            Self::SecondClass => "second-class",
            Self::BoseFermi => "bose-fermi",
            Self::Lattice => "lattice",
            Self::All => "all",
        }
    }
}

pub struct Ctx {
    pub tol: Tolerances,
    pub seed: u64,
}

impl Ctx {
    /// Independent stream per check so adding a check does not shift others.
    fn rng(&self, salt: u64) -> StdRng {
        StdRng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
    }
}

pub fn run(suite: Suite, ctx: &Ctx) -> Vec<Check> {
    match suite {
        Suite::Grassmann => grassmann(ctx),
        Suite::Coherent => coherent_suite(ctx),
        Suite::FirstClass => first_class(ctx),
        Suite::SecondClass => second_class(ctx),
        Suite::BoseFermi => bose_fermi(ctx),
        Suite::Lattice => lattice(ctx),
        Suite::All => [
            Suite::Grassmann,
            Suite::Coherent,
            Suite::FirstClass,
            Suite::SecondClass,
            Suite::BoseFermi,
            Suite::Lattice,
        ]
        .into_iter()
        .flat_map(|s| run(s, ctx))
        .collect(),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn registry(pairs: usize) -> Arc<GeneratorRegistry> {
    let mut b = RegistryBuilder::new();
    for i in 1..=pairs {
        b.pair(format!("η̄{i}"), format!("η{i}")).expect("fresh labels");
    }
    b.build()
}

/// Random element as an explicit sum of left-to-right generator products.
fn random_element(reg: &Arc<GeneratorRegistry>, rng: &mut StdRng, parity: Option<u32>) -> Grassmann {
    let gens: Vec<_> = reg.generators().collect();
    let mut out = GrassmannElement::zero().with_registry(reg);
    for _ in 0..rng.random_range(0..6) {
        let mask: u32 = rng.random_range(0..1 << gens.len());
        if parity.is_some_and(|p| mask.count_ones() % 2 != p) {
            continue;
        }
        let mut m =
            GrassmannElement::scalar(c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).with_registry(reg);
        for (i, &g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m = m * GrassmannElement::generator(reg, g);
            }
        }
        out = out + m;
    }
    out
}

/// Largest value of `f` over [`CASES`] random draws.
fn worst(rng: &mut StdRng, mut f: impl FnMut(&mut StdRng) -> Result<f64>) -> Result<f64> {
    let mut d: f64 = 0.0;
    for _ in 0..CASES {
        d = d.max(f(rng)?);
    }
    Ok(d)
}

fn grassmann(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.kernel;
    let reg = registry(3);
    let r = &reg;
    vec![
        Check::run("grassmann/associativity", ["(ab)c", "a(bc)"], tol, || {
            worst(&mut ctx.rng(1), |rng| {
                let (a, b, x) = (
                    random_element(r, rng, None),
                    random_element(r, rng, None),
                    random_element(r, rng, None),
                );
                (&(&a * &b) * &x).max_deviation(&(&a * &(&b * &x)))
            })
        }),
        Check::run("grassmann/graded-commutativity", ["ab", "±ba"], tol, || {
            worst(&mut ctx.rng(2), |rng| {
                let (pa, pb) = (rng.random_range(0..2u32), rng.random_range(0..2u32));
                let (a, b) = (random_element(r, rng, Some(pa)), random_element(r, rng, Some(pb)));
                let sign = if pa == 1 && pb == 1 { -1.0 } else { 1.0 };
                (&a * &b).max_deviation(&(&b * &a).scale(c(sign, 0.0)))
            })
        }),
        Check::run("grassmann/odd-square", ["a²", "0"], tol, || {
            worst(&mut ctx.rng(3), |rng| {
                let a = random_element(r, rng, Some(1));
                Ok((&a * &a).max_abs())
            })
        }),
        Check::run("grassmann/exp-inverse", ["e^a e^-a", "1"], 1e-9, || {
            let one = GrassmannElement::one().with_registry(r);
            worst(&mut ctx.rng(4), |rng| {
                let a = random_element(r, rng, Some(0));
                let (e, inv) = (a.exp_even()?, (-&a).exp_even()?);
                Ok((&e * &inv).max_deviation(&one)? / (1.0 + e.max_abs() * inv.max_abs()))
            })
        }),
        Check::run("grassmann/involution", ["(ab)*", "b* a*"], tol, || {
            worst(&mut ctx.rng(5), |rng| {
                let (a, b) = (random_element(r, rng, None), random_element(r, rng, None));
                let lhs = (&a * &b).involute()?;
                let rhs = &b.involute()? * &a.involute()?;
                Ok(lhs
                    .max_deviation(&rhs)?
                    .max(a.involute()?.involute()?.max_deviation(&a)?))
            })
        }),
        Check::run("grassmann/integration", ["∫dη", "∂/∂η"], tol, || {
            let gens: Vec<_> = r.generators().collect();
            worst(&mut ctx.rng(6), |rng| {
                let a = random_element(r, rng, None);
                let g = gens[rng.random_range(0..gens.len())];
                a.berezin_integrate(g).max_deviation(&a.differentiate(g))
            })
        }),
        Check::run(
            "grassmann/berezin-conventions",
            ["∫dη̄dη ηη̄", "1"],
            tol,
            || {
                let gens: Vec<_> = r.generators().collect();
                let bar = GrassmannElement::<f64>::generator(r, gens[0]);
                let eta = GrassmannElement::generator(r, gens[1]);
                let a = (&eta * &bar).integrate_pair(gens[0], gens[1]).scalar_part();
                let b = (&bar * &eta).integrate_pair(gens[0], gens[1]).scalar_part();
                Ok((a - c(1.0, 0.0)).norm().max((b + c(1.0, 0.0)).norm()))
            },
        ),
        Check::run("grassmann/text-round-trip", ["render", "parse"], tol, || {
            worst(&mut ctx.rng(7), |rng| {
                let a = random_element(r, rng, None);
                let back: Grassmann = text::parse(&text::render(&a), r)?;
                Ok(a.max_deviation(&back)? / (1.0 + a.max_abs()))
            })
        }),
    ]
}

fn endpoints(
    n: usize,
) -> Result<(
    KernelLabels,
    coherent::CoherentVector<f64>,
    coherent::CoherentVector<f64>,
)> {
    let labels = KernelLabels::new(n, false)?;
    let spec = HilbertSpec::fermions(n);
    let bra = coherent_bra(&labels.registry, spec, &labels.bra)?;
    let ket = coherent_ket(&labels.registry, spec, &labels.ket)?;
    Ok((labels, bra, ket))
}

/// `Π exp(−½ψ̄ᵢ″ψᵢ″) exp(−½ψ̄ᵢ′ψᵢ′) exp(ψ̄ᵢ″ψᵢ′)`.
fn product_overlap(l: &KernelLabels) -> Result<Grassmann> {
    let reg = &l.registry;
    let g = |x| GrassmannElement::<f64>::generator(reg, x);
    let mut out = GrassmannElement::one().with_registry(reg);
    for i in 0..l.n_modes() {
        for (a, b, s) in [
            (l.bra.bar[i], l.bra.plain[i], -0.5),
            (l.ket.bar[i], l.ket.plain[i], -0.5),
            (l.bra.bar[i], l.ket.plain[i], 1.0),
        ] {
            out = &out * &(&g(a) * &g(b)).scale(c(s, 0.0)).exp_even()?;
        }
    }
    Ok(out)
}

fn coherent_suite(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.kernel;
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(Check::run(
            format!("coherent/overlap-n{n}"),
            ["state overlap", "product formula"],
            tol,
            || {
                let (l, bra, ket) = endpoints(n)?;
                coherent::overlap(&bra, &ket)?.max_deviation(&product_overlap(&l)?)
            },
        ));
        out.push(Check::run(
            format!("coherent/identity-resolution-n{n}"),
            ["∫|Ψ⟩⟨Ψ|", "1"],
            tol,
            || identity_resolution_check::<f64>(n),
        ));
    }
    out.push(Check::run(
        "coherent/normal-order-substitution",
        ["⟨Ψ″|G|Ψ′⟩", "G(Ψ̄″,Ψ′)⟨Ψ″|Ψ′⟩"],
        1e-11,
        || {
            worst(&mut ctx.rng(11), |rng| {
                let n = rng.random_range(1..=3usize);
                let mut g = OperatorPolynomial::<f64>::new();
                for _ in 0..rng.random_range(1..5) {
                    let mut factors = Vec::new();
                    for _ in 0..rng.random_range(0..=n) {
                        factors.push(Ladder::fd(rng.random_range(1..=n)));
                    }
                    for _ in 0..rng.random_range(0..=n) {
                        factors.push(Ladder::f(rng.random_range(1..=n)));
                    }
                    g.push(c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)), factors);
                }
                let (l, bra, ket) = endpoints(n)?;
                let lhs = coherent::polynomial_element(&bra, &g, &ket)?;
                let symbol = g.normal_symbol(&l.registry, &l.bra.bar, &l.ket.plain)?;
                lhs.max_deviation(&(&symbol * &product_overlap(&l)?))
            })
        },
    ));
    out
}

fn system(id: ExampleId, t: f64) -> Result<ExampleSystem<f64>> {
    ExampleSystem::build(id, &ExampleParams::default().with_t(t))
}

/// Largest deviation between the operator route and a closed form over `TIMES`.
fn closed_form_check(id: ExampleId, alternate: bool, tol: f64) -> Check {
    let other = if alternate {
        KernelRoute::ClosedFormAlt
    } else {
        KernelRoute::ClosedForm
    };
    Check::run(
        format!("{}/{id}", class_prefix(id)),
        ["operator", other.name()],
        tol,
        || {
            let mut d: f64 = 0.0;
            for t in TIMES {
                let sys = system(id, t)?;
                let op = evaluate_system(&sys, KernelRoute::Operator)?;
                d = d.max(kernel_deviation(&op.value, &closed_form(&sys, alternate)?.value)?);
            }
            Ok(d)
        },
    )
}

fn class_prefix(id: ExampleId) -> &'static str {
    if id.is_first_class() {
        "first-class"
    } else {
        "second-class"
    }
}

fn certificate_check(id: ExampleId, tol: f64) -> Check {
    Check::run(
        format!("{}/{id}/projector", class_prefix(id)),
        ["E² ; E†", "E"],
        tol,
        || {
            let e = system(id, 0.0)?.projector;
            Ok(e.compose(&e)?
                .max_coefficient_deviation(&e)?
                .max(e.adjoint()?.max_coefficient_deviation(&e)?))
        },
    )
}

/// `1.0` for the wrong verdict; the tolerance is zero.
fn verdict(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn first_class(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.kernel;
    let mut out = vec![
        closed_form_check(ExampleId::NumberConstraint, false, tol),
        closed_form_check(ExampleId::ThreeFermion, false, tol),
        closed_form_check(ExampleId::ThreeFermion, true, tol),
        Check::run(
            "first-class/sec42/one-minus-phi",
            ["group average", "1 − Φ"],
            ctx.tol.certificate,
            || {
                let spec = HilbertSpec::fermions(3);
                let phi = models::three_fermion_phi::<f64>()?.realize(spec)?;
                let e = project_group_average(&phi, None)?;
                let want = FockOperator::identity(spec)?.sub(&phi)?;
                Ok(e.op().max_deviation(&want)?.max((e.op().trace() - c(6.0, 0.0)).norm()))
            },
        ),
    ];
    for id in [ExampleId::NumberConstraint, ExampleId::ThreeFermion] {
        let poly = || -> Result<_> {
            Ok(if id == ExampleId::NumberConstraint {
                models::number_constraint::<f64>(2, 1.0)
            } else {
                models::three_fermion_phi()?
            })
        };
        let spec = HilbertSpec::fermions(id.n_fermions());
        out.push(Check::run(
            format!("first-class/{id}/spectral-kernel"),
            ["group-average", "spectral-kernel"],
            ctx.tol.certificate,
            || {
                let phi = poly()?.realize(spec)?;
                let avg = project_group_average(&phi, None)?;
                avg.max_deviation(&project_kernel(spec, &[phi])?)
            },
        ));
        out.push(Check::run(
            format!("first-class/{id}/complement-average"),
            ["group-average", "complement-average"],
            ctx.tol.certificate,
            || {
                let avg = project_group_average(&poly()?.realize(spec)?, None)?;
                avg.max_deviation(&project_complement_average(&avg, 2)?)
            },
        ));
        out.push(certificate_check(id, ctx.tol.certificate));
    }
    out.push(Check::run(
        "first-class/sec42/classification",
        ["{χ,χ†}", "Φ"],
        ctx.tol.closure,
        || {
            let report = system(ExampleId::ThreeFermion, 0.0)?.constraints.classify()?;
            let rel = report
                .relation("χ", "χ†")
                .ok_or(fermicon::Error::MissingParameter("{χ, χ†}"))?;
            // stored as i g Φ, so {χ, χ†} = Φ reads g = −i
            let g = rel.constant("Φ").unwrap_or(c(f64::INFINITY, 0.0));
            Ok(rel
                .residual
                .max((g - c(0.0, -1.0)).norm())
                .max(verdict(report.all_first_class())))
        },
    ));
    out
}

fn second_class(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.kernel;
    let mut out = Vec::new();
    for id in [
        ExampleId::ShiftedCaseA,
        ExampleId::ShiftedCaseB,
        ExampleId::DifferenceCaseA,
        ExampleId::DifferenceCaseB,
    ] {
        out.push(closed_form_check(id, false, tol));
        out.push(closed_form_check(id, true, tol));
        out.push(certificate_check(id, ctx.tol.certificate));
    }
    out.push(Check::run(
        "second-class/shifted/classification",
        ["verdict", "second class"],
        0.0,
        || {
            Ok(verdict(
                system(ExampleId::ShiftedCaseA, 0.0)?
                    .constraints
                    .classify()?
                    .all_second_class(),
            ))
        },
    ));
    out.push(Check::run(
        "second-class/difference-sum/classification",
        ["verdict", "second class"],
        0.0,
        || {
            let spec = HilbertSpec::fermions(2);
            let mut set = ConstraintSet::<f64>::new(spec);
            set.push_odd_pair("χ1", models::difference_chi::<f64>()?.realize(spec)?)?;
            set.push_odd_pair("χ2", models::sum_chi::<f64>()?.realize(spec)?)?;
            Ok(verdict(set.classify()?.all_second_class()))
        },
    ));
    out.push(Check::run(
        "second-class/mixed-annihilators",
        ["{χα,χβ†}", "δαβ"],
        ctx.tol.certificate,
        || {
            let spec = HilbertSpec::fermions(3);
            let ops = fermion_ops::<f64>(spec)?;
            let id = FockOperator::identity(spec)?;
            let zero = FockOperator::zero(spec)?;
            worst(&mut ctx.rng(21), |rng| {
                let m = nalgebra::DMatrix::from_fn(3, 3, |i, j| {
                    c(
                        rng.random_range(-1.0..1.0) + if i == j { 2.0 } else { 0.0 },
                        rng.random_range(-1.0..1.0),
                    )
                });
                let u = m.qr().q();
                let chis = (0..3)
                    .map(|a| (0..3).try_fold(zero.clone(), |acc, i| acc.add(&ops[i].0.scale(u[(a, i)]))))
                    .collect::<Result<Vec<_>>>()?;
                let mut d: f64 = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        d = d.max(chis[a].anticommutator(&chis[b])?.max_norm());
                        let want = if a == b { &id } else { &zero };
                        d = d.max(chis[a].anticommutator(&chis[b].adjoint())?.max_deviation(want)?);
                    }
                }
                Ok(d)
            })
        },
    ));
    out.push(Check::run(
        "second-class/nonlinear-spectrum",
        ["spec {χ,χ†}", "{1, 2}"],
        ctx.tol.closure,
        || {
            let spec = HilbertSpec::fermions(4);
            let chi = models::nonlinear_chi::<f64>()?.realize(spec)?;
            let x = chi.anticommutator(&chi.adjoint())?;
            let values = hermitian_eigen(x.matrix())?.values;
            let off = values
                .iter()
                .fold(0.0f64, |d, v| d.max((v - 1.0).abs().min((v - 2.0).abs())));
            Ok(off.max(verdict(values.iter().any(|v| (v - 2.0).abs() < 0.5))))
        },
    ));
    out
}

fn bose_fermi_params(p: i64, t: f64) -> ExampleParams {
    ExampleParams {
        z_bra: vec![[0.5, 0.2]],
        z_ket: vec![[-0.3, 0.4]],
        ..ExampleParams::default().with_t(t).with_p(p)
    }
}

fn bose_fermi(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.bose_fermi;
    let mut out = Vec::new();
    for p in [-1, 0, 1] {
        for t in [0.0, 1.3] {
            out.push(Check::run(
                format!("bose-fermi/p{p}/t{t}"),
                ["quadrature", "mode sum"],
                tol,
                || {
                    let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &bose_fermi_params(p, t))?;
                    bose_fermi_quadrature(&sys, None)?.max_deviation(&bose_fermi_mode_sum(&sys)?)
                },
            ));
        }
    }
    out.push(Check::run("bose-fermi/operator", ["operator", "mode sum"], tol, || {
        let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &bose_fermi_params(1, 0.3))?;
        evaluate_system(&sys, KernelRoute::Operator)?
            .value
            .max_deviation(&bose_fermi_mode_sum(&sys)?)
    }));
    out.push(Check::run("bose-fermi/lattice", ["lattice", "quadrature"], tol, || {
        let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &bose_fermi_params(1, 0.3))?;
        let quad = bose_fermi_quadrature(&sys, None)?;
        kernel_deviation(&quad, &lattice_kernel_with(&sys, 3)?.value)
    }));
    out
}

fn lattice(ctx: &Ctx) -> Vec<Check> {
    let tol = ctx.tol.kernel;
    let mut out = Vec::new();
    for (id, t) in [
        (ExampleId::NumberConstraint, 0.0),
        (ExampleId::ShiftedCaseA, 0.7),
        (ExampleId::ThreeFermion, 0.0),
    ] {
        out.push(Check::run(
            format!("lattice/{id}/slices-1-8"),
            ["lattice", "closed-form"],
            tol,
            || {
                let sys = system(id, t)?;
                let want = closed_form(&sys, false)?.value;
                (1..=8).try_fold(0.0f64, |d, n_t| {
                    Ok(d.max(kernel_deviation(&want, &lattice_kernel_with(&sys, n_t)?.value)?))
                })
            },
        ));
    }
    out.push(Check::run(
        "lattice/empty-hamiltonian/slice-count",
        ["N_t = 1", "N_t = 2..8"],
        0.0,
        || {
            let id = ExampleId::NumberConstraint;
            let params = ExampleParams::default().with_t(1.3);
            let first = lattice_propagate::<f64>(id, &params, &LatticePlan::for_example(id, 1))?;
            (2..=8).try_fold(0.0f64, |d, n_t| {
                Ok(d.max(first.max_deviation(&lattice_propagate(id, &params, &LatticePlan::for_example(id, n_t))?)?))
            })
        },
    ));
    out.push(Check::run("lattice/multipliers", ["η = 0", "random η"], tol, || {
        let id = ExampleId::NumberConstraint;
        let params = ExampleParams::default().with_t(0.4);
        let base = LatticePlan {
            n_slices: 3,
            rule: ShortTimeRule::Exact,
            schedule: Schedule::Projected,
        };
        let a = lattice_propagate::<f64>(id, &params, &base)?;
        let mut rng = ctx.rng(31);
        (0..20).try_fold(0.0f64, |d, _| {
            let eta = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let plan = LatticePlan {
                schedule: Schedule::Multipliers(eta),
                ..base.clone()
            };
            Ok(d.max(a.max_deviation(&lattice_propagate(id, &params, &plan)?)?))
        })
    }));
    out.push(Check::run(
        "lattice/generator-hygiene",
        ["kernel support", "endpoint generators"],
        0.0,
        || {
            let mut leaks = 0u32;
            for id in ExampleId::ALL {
                let plan = LatticePlan::for_example(id, 3);
                let labels = LatticeLabels::new(id.n_fermions(), id.has_theta(), &plan)?;
                let k = lattice_propagate::<f64>(id, &ExampleParams::default().with_t(0.7), &plan)?;
                leaks += (k.value.support() & labels.intermediate_mask()).count_ones();
            }
            Ok(f64::from(leaks))
        },
    ));
    out.push(Check::run(
        "lattice/trotter-slope",
        ["slope", "−1"],
        ctx.tol.trotter_slope,
        || {
            let h = models::free_fermions::<f64>(1, 1.0);
            let report = trotter_convergence(1, &h, None, 0.9, &[2, 4, 8, 16])?;
            Ok(report.slope.map_or(f64::INFINITY, |s| (s + 1.0).abs()))
        },
    ));
    out
}
