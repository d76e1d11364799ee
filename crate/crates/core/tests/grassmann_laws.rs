// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use fermicon::grassmann::{text, Generator, GeneratorRegistry, GrassmannElement, Parity, RegistryBuilder};
use fermicon::Grassmann;
use num_complex::Complex;
use proptest::prelude::*;

const PAIRS: usize = 3;
const TOL: f64 = 1e-12;

fn registry() -> Arc<GeneratorRegistry> {
    let mut b = RegistryBuilder::new();
    for i in 1..=PAIRS {
        b.pair(format!("η̄{i}"), format!("η{i}")).unwrap();
    }
    b.build()
}

fn gens(reg: &GeneratorRegistry) -> Vec<Generator> {
    reg.generators().collect()
}

/// Builds `Σ c·monomial(mask)` from explicit terms, as an oracle independent
/// of the canonical storage: each monomial is a left-to-right product of
/// single generators.
fn build(reg: &Arc<GeneratorRegistry>, terms: &[(u8, f64, f64)]) -> Grassmann {
    let g = gens(reg);
    let mut out = GrassmannElement::zero().with_registry(reg);
    for &(mask, re, im) in terms {
        let mut m = GrassmannElement::scalar(Complex::new(re, im)).with_registry(reg);
        for (i, gi) in g.iter().enumerate() {
            if mask >> i & 1 == 1 {
                m = m * GrassmannElement::generator(reg, *gi);
            }
        }
        out = out + m;
    }
    out
}

fn terms() -> impl Strategy<Value = Vec<(u8, f64, f64)>> {
    prop::collection::vec((0u8..64, -2.0..2.0f64, -2.0..2.0f64), 0..6)
}

fn homogeneous(parity: u32) -> impl Strategy<Value = Vec<(u8, f64, f64)>> {
    terms().prop_map(move |t| t.into_iter().filter(|(m, _, _)| m.count_ones() % 2 == parity).collect())
}

fn close(a: &Grassmann, b: &Grassmann) -> bool {
    a.max_deviation(b).unwrap() <= TOL
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generators_anticommute(i in 0usize..2 * PAIRS, j in 0usize..2 * PAIRS) {
        let reg = registry();
        let g = gens(&reg);
        let a = GrassmannElement::<f64>::generator(&reg, g[i]);
        let b = GrassmannElement::<f64>::generator(&reg, g[j]);
        let anti = &(&a * &b) + &(&b * &a);
        prop_assert!(anti.is_zero());
    }

    #[test]
    fn product_is_associative_and_distributive(x in terms(), y in terms(), z in terms()) {
        let reg = registry();
        let (a, b, c) = (build(&reg, &x), build(&reg, &y), build(&reg, &z));
        prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
    }

    #[test]
    fn graded_commutativity(
        (pa, pb, x, y) in (0u32..2, 0u32..2)
            .prop_flat_map(|(pa, pb)| (Just(pa), Just(pb), homogeneous(pa), homogeneous(pb)))
    ) {
        let reg = registry();
        let (a, b) = (build(&reg, &x), build(&reg, &y));
        let sign = if pa == 1 && pb == 1 { -1.0 } else { 1.0 };
        let ba = (&b * &a).scale(Complex::new(sign, 0.0));
        prop_assert!(close(&(&a * &b), &ba));
        if !a.is_zero() {
            prop_assert_eq!(a.parity(), if pa == 0 { Parity::Even } else { Parity::Odd });
        }
    }

    #[test]
    fn odd_elements_square_to_zero(x in homogeneous(1)) {
        let reg = registry();
        let a = build(&reg, &x);
        prop_assert!((&a * &a).max_abs() <= TOL);
    }

    #[test]
    fn exp_of_even_has_inverse(x in homogeneous(0)) {
        let reg = registry();
        let a = build(&reg, &x);
        let e = a.exp_even().unwrap();
        let inv = (-&a).exp_even().unwrap();
        let one = GrassmannElement::one().with_registry(&reg);
        prop_assert!((&e * &inv).max_deviation(&one).unwrap() <= 1e-9 * (1.0 + e.max_abs() * inv.max_abs()));
    }

    #[test]
    fn involution_reverses_products(x in terms(), y in terms()) {
        let reg = registry();
        let (a, b) = (build(&reg, &x), build(&reg, &y));
        let lhs = (&a * &b).involute().unwrap();
        let rhs = &b.involute().unwrap() * &a.involute().unwrap();
        prop_assert!(close(&lhs, &rhs));
        prop_assert!(close(&a.involute().unwrap().involute().unwrap(), &a));
    }

    #[test]
    fn integration_is_left_differentiation(x in terms(), i in 0usize..2 * PAIRS) {
        let reg = registry();
        let g = gens(&reg)[i];
        let a = build(&reg, &x);
        prop_assert!(close(&a.berezin_integrate(g), &a.differentiate(g)));
        // ∫dη (η A) = A when A does not contain η
        let without = a.berezin_integrate(g);
        let eta = GrassmannElement::generator(&reg, g);
        prop_assert!(close(&(&eta * &without).berezin_integrate(g), &without));
        // the integral is odd: ∫dη (θ η) = −θ ∫dη η for odd θ ≠ η
        let j = (i + 1) % (2 * PAIRS);
        let theta = GrassmannElement::generator(&reg, gens(&reg)[j]);
        prop_assert!(close(&(&theta * &eta).berezin_integrate(g), &(-&theta)));
    }

    #[test]
    fn text_round_trip(x in terms()) {
        let reg = registry();
        let a = build(&reg, &x);
        let s = text::render(&a);
        let back: Grassmann = text::parse(&s, &reg).unwrap();
        prop_assert!(a.max_deviation(&back).unwrap() <= 1e-12 * (1.0 + a.max_abs()), "{s}");
    }
}

#[test]
fn berezin_conventions() {
    let reg = registry();
    let g = gens(&reg);
    let one = GrassmannElement::<f64>::one().with_registry(&reg);
    let eta = GrassmannElement::generator(&reg, g[1]);
    let bar = GrassmannElement::generator(&reg, g[0]);
    assert!(one.berezin_integrate(g[1]).is_zero());
    assert_eq!(eta.berezin_integrate(g[1]).scalar_part(), Complex::new(1.0, 0.0));
    // inner integral first: ∫dη̄ dη η η̄ = ∫dη̄ η̄ = 1, and ∫dη̄ dη η̄ η = −1
    let a = (&eta * &bar).integrate_pair(g[0], g[1]);
    let b = (&bar * &eta).integrate_pair(g[0], g[1]);
    assert_eq!(a.scalar_part(), Complex::new(1.0, 0.0));
    assert_eq!(b.scalar_part(), Complex::new(-1.0, 0.0));
}

#[test]
fn mixing_registries_is_an_error() {
    let (r1, r2) = (registry(), registry());
    let a = GrassmannElement::<f64>::generator(&r1, gens(&r1)[0]);
    let b = GrassmannElement::<f64>::generator(&r2, gens(&r2)[1]);
    assert!(a.try_mul(&b).is_ok(), "equal label sets are compatible");
    let mut other = RegistryBuilder::new();
    let z = other.generator("ζ").unwrap();
    let c = GrassmannElement::<f64>::generator(&other.build(), z);
    assert!(a.try_mul(&c).is_err());
}
