// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use fermicon::lattice::{
    lattice_kernel_with, lattice_propagate, trotter_convergence, LatticeLabels, LatticePlan, Schedule, ShortTimeRule,
};
use fermicon::models::{self, ExampleId, ExampleParams, ExampleSystem, KernelLabels};
use fermicon::propagator::{
    bose_fermi_quadrature, closed_form, constrained_evolution, evaluate, evaluate_system, kernel_deviation,
    kernel_operator_side, KernelRoute,
};
use fermicon::Error;
use proptest::prelude::*;

const TOL: f64 = 1e-12;
const TIMES: [f64; 3] = [0.0, 0.7, 3.1];

#[test]
fn exact_routes_agree_for_every_example() {
    for id in ExampleId::ALL {
        for t in TIMES {
            let params = ExampleParams::default().with_t(t);
            let sys = ExampleSystem::<f64>::build(id, &params).unwrap();
            let op = evaluate_system(&sys, KernelRoute::Operator).unwrap();
            for route in [KernelRoute::ClosedForm, KernelRoute::ClosedFormAlt] {
                let other = evaluate_system(&sys, route).unwrap();
                let d = op.max_deviation(&other).unwrap();
                let tol = if id == ExampleId::BoseFermi { 1e-10 } else { TOL };
                assert!(d <= tol, "{id} {route} t = {t}: {d:e}");
            }
        }
    }
}

#[test]
fn lattice_matches_closed_forms_at_every_slice_count() {
    for (id, t) in [
        (ExampleId::NumberConstraint, 0.0),
        (ExampleId::ShiftedCaseA, 0.7),
        (ExampleId::ShiftedCaseA, 3.1),
    ] {
        let sys = ExampleSystem::<f64>::build(id, &ExampleParams::default().with_t(t)).unwrap();
        let want = closed_form(&sys, false).unwrap().value;
        for n_t in 1..=8 {
            let got = lattice_kernel_with(&sys, n_t).unwrap().value;
            let d = kernel_deviation(&want, &got).unwrap();
            assert!(d <= TOL, "{id} t = {t} N_t = {n_t}: {d:e}");
        }
    }
}

#[test]
fn lattice_default_plans_cover_every_example() {
    for id in ExampleId::ALL {
        let params = ExampleParams::default().with_t(0.7);
        let op = evaluate::<f64>(id, &params, KernelRoute::Operator).unwrap();
        let lat = evaluate::<f64>(id, &params, KernelRoute::Lattice).unwrap();
        let d = op.max_deviation(&lat).unwrap();
        assert!(d <= 1e-10, "{id}: {d:e}");
    }
}

#[test]
fn empty_hamiltonian_lattice_is_slice_count_independent() {
    for id in [ExampleId::NumberConstraint, ExampleId::ThreeFermion] {
        let params = ExampleParams::default().with_t(1.3);
        let first = lattice_propagate::<f64>(id, &params, &LatticePlan::for_example(id, 1)).unwrap();
        for n_t in 2..=5 {
            let k = lattice_propagate::<f64>(id, &params, &LatticePlan::for_example(id, n_t)).unwrap();
            assert_eq!(first.max_deviation(&k).unwrap(), 0.0, "{id} N_t = {n_t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Per-slice multipliers on the even constraint leave the kernel unchanged.
    #[test]
    fn multipliers_drop_out(eta in prop::collection::vec(-3.0..3.0f64, 3)) {
        let id = ExampleId::NumberConstraint;
        let params = ExampleParams::default().with_t(0.4);
        let base = LatticePlan { n_slices: 3, rule: ShortTimeRule::Exact, schedule: Schedule::Projected };
        let with = LatticePlan { schedule: Schedule::Multipliers(eta), ..base.clone() };
        let a = lattice_propagate::<f64>(id, &params, &base).unwrap();
        let b = lattice_propagate::<f64>(id, &params, &with).unwrap();
        prop_assert!(a.max_deviation(&b).unwrap() <= TOL);
    }

    /// `K(Ψ″, Ψ′; t)` and `K(Ψ′, Ψ″; −t)` are related by the involution.
    #[test]
    fn kernels_are_hermitian(t in -3.0..3.0f64, which in 0usize..4) {
        let id = [ExampleId::NumberConstraint, ExampleId::ThreeFermion, ExampleId::ShiftedCaseA, ExampleId::ShiftedCaseB][which];
        let params = ExampleParams::default().with_t(t);
        let sys = ExampleSystem::<f64>::build(id, &params).unwrap();
        let k = evaluate_system(&sys, KernelRoute::Operator).unwrap().value;
        let mut swapped = KernelLabels::new(id.n_fermions(), id.has_theta()).unwrap();
        std::mem::swap(&mut swapped.bra, &mut swapped.ket);
        let back = ExampleSystem::<f64>::build_with_labels(id, &params.clone().with_t(-t), swapped).unwrap();
        let u = constrained_evolution(&back.hamiltonian_operator().unwrap(), &back.projector, -t).unwrap();
        let k_back = kernel_operator_side(back.spec, &back.labels, &back.params, &u).unwrap();
        prop_assert!(kernel_deviation(&k, &k_back.involute().unwrap()).unwrap() <= TOL);
    }
}

#[test]
fn lattice_output_has_no_slice_generators() {
    for id in ExampleId::ALL {
        let plan = LatticePlan::for_example(id, 3);
        let labels = LatticeLabels::new(id.n_fermions(), id.has_theta(), &plan).unwrap();
        let k = lattice_propagate::<f64>(id, &ExampleParams::default().with_t(0.7), &plan).unwrap();
        assert_eq!(k.value.support() & labels.intermediate_mask(), 0, "{id}");
        assert_ne!(labels.intermediate_mask(), 0);
    }
}

#[test]
fn plans_are_validated() {
    let params = ExampleParams::default();
    let too_many = LatticePlan::for_example(ExampleId::ShiftedCaseA, 40);
    assert!(matches!(
        lattice_propagate::<f64>(ExampleId::ShiftedCaseA, &params, &too_many),
        Err(Error::InconsistentPlan(_))
    ));
    let projected = LatticePlan {
        schedule: Schedule::Projected,
        ..LatticePlan::for_example(ExampleId::ShiftedCaseA, 2)
    };
    assert!(lattice_propagate::<f64>(ExampleId::ShiftedCaseA, &params, &projected).is_err());
    let short = LatticePlan {
        schedule: Schedule::Multipliers(vec![0.5]),
        ..LatticePlan::for_example(ExampleId::NumberConstraint, 2)
    };
    assert!(lattice_propagate::<f64>(ExampleId::NumberConstraint, &params, &short).is_err());
    let none = LatticePlan::for_example(ExampleId::NumberConstraint, 0);
    assert!(lattice_propagate::<f64>(ExampleId::NumberConstraint, &params, &none).is_err());
}

#[test]
fn normal_symbol_lattice_converges_at_first_order() {
    let h = models::free_fermions::<f64>(1, 1.0);
    let report = trotter_convergence(1, &h, None, 0.9, &[2, 4, 8, 16]).unwrap();
    let slope = report.slope.expect("errors are nonzero");
    assert!((slope + 1.0).abs() <= 0.2, "slope {slope}, {:?}", report.points);
    assert!(report.monotone);
}

#[test]
fn boson_fermion_lattice_matches_quadrature() {
    let params = ExampleParams::default().with_t(0.3).with_p(1);
    let sys = ExampleSystem::<f64>::build(ExampleId::BoseFermi, &params).unwrap();
    let quad = bose_fermi_quadrature(&sys, None).unwrap();
    for n_t in [1, 3] {
        let lat = lattice_kernel_with(&sys, n_t).unwrap().value;
        let d = kernel_deviation(&quad, &lat).unwrap();
        assert!(d <= 1e-10, "N_t = {n_t}: {d:e}");
    }
    let mut small = params.clone();
    small.quadrature = Some(params.min_quadrature(1) - 1);
    assert!(matches!(
        evaluate::<f64>(ExampleId::BoseFermi, &small, KernelRoute::Quadrature),
        Err(Error::QuadratureTooSmall { .. })
    ));
}

#[test]
fn single_precision_smoke() {
    for id in [ExampleId::NumberConstraint, ExampleId::ShiftedCaseA] {
        let params = ExampleParams::default().with_t(0.7);
        let op = evaluate::<f32>(id, &params, KernelRoute::Operator).unwrap();
        let cf = evaluate::<f32>(id, &params, KernelRoute::ClosedForm).unwrap();
        assert!(op.max_deviation(&cf).unwrap() <= 1e-5, "{id}");
    }
}
