// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Human-readable rendering and parsing of Grassmann elements.
//!
//! Format: `(+1.0+0.0i)·ψ̄1ψ1 + (-0.5+0.0i)` with terms ordered by degree,
//! then mask. The zero element renders as `0`.

use std::sync::Arc;

use num_complex::Complex;

use super::element::GrassmannElement;
use super::registry::{Generator, GeneratorRegistry};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn render<F: Real>(x: &GrassmannElement<F>) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<_> = x.terms().to_vec();
    terms.sort_by_key(|(m, _)| (m.count_ones(), *m));
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        if i > 0 {
            out.push_str(" + ");
        }
        // adding zero turns -0.0 into +0.0
        out.push_str(&format!("({:+?}{:+?}i)", c.re + F::zero(), c.im + F::zero()));
        if *m != 0 {
            out.push('·');
            let reg = x.registry().expect("non-scalar term without registry");
            let mut rest = *m;
            while rest != 0 {
                let g = Generator(rest.trailing_zeros() as u8);
                out.push_str(reg.label(g));
                rest &= rest - 1;
            }
        }
    }
    out
}

pub fn parse<F: Real>(s: &str, registry: &Arc<GeneratorRegistry>) -> Result<GrassmannElement<F>> {
    let s = s.trim();
    if s == "0" {
        return Ok(GrassmannElement::zero().with_registry(registry));
    }
    let mut labels: Vec<(&str, Generator)> = registry.generators().map(|g| (registry.label(g), g)).collect();
    // greedy longest match, so `ψ1` never shadows `ψ10`
    labels.sort_by_key(|(l, _)| std::cmp::Reverse(l.len()));

    let mut acc = GrassmannElement::zero().with_registry(registry);
    for term in split_terms(s) {
        let term = term.trim();
        let (coef, rest) = parse_coefficient::<F>(term)?;
        let mut gens = Vec::new();
        let mut rest = rest.trim();
        if let Some(r) = rest.strip_prefix('·') {
            rest = r;
            while !rest.is_empty() {
                let (l, g) = labels
                    .iter()
                    .find(|(l, _)| rest.starts_with(l))
                    .ok_or_else(|| Error::Parse(format!("unknown generator at `{rest}`")))?;
                gens.push(*g);
                rest = &rest[l.len()..];
            }
        } else if !rest.is_empty() {
            return Err(Error::Parse(format!("unexpected text `{rest}`")));
        }
        acc = acc + GrassmannElement::monomial(registry, coef, &gens);
    }
    Ok(acc)
}

/// Splits on ` + ` separators that sit outside parentheses.
fn split_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b' ' if depth == 0 && s[i..].starts_with(" + ") => {
                out.push(&s[start..i]);
                i += 3;
                start = i;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out.push(&s[start..]);
    out
}

fn parse_coefficient<F: Real>(term: &str) -> Result<(Complex<F>, &str)> {
    let body = term
        .strip_prefix('(')
        .ok_or_else(|| Error::Parse(format!("term `{term}` must start with `(`")))?;
    let close = body
        .find(')')
        .ok_or_else(|| Error::Parse(format!("unclosed coefficient in `{term}`")))?;
    let inner = &body[..close];
    let inner_no_i = inner
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("coefficient `{inner}` lacks imaginary unit")))?;
    // find the sign that starts the imaginary part, skipping exponent signs
    let split = inner_no_i
        .char_indices()
        .skip(1)
        .filter(|&(i, ch)| (ch == '+' || ch == '-') && !matches!(inner_no_i.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last()
        .ok_or_else(|| Error::Parse(format!("malformed coefficient `{inner}`")))?;
    let re: f64 = inner_no_i[..split]
        .parse()
        .map_err(|_| Error::Parse(format!("bad real part in `{inner}`")))?;
    let im: f64 = inner_no_i[split..]
        .parse()
        .map_err(|_| Error::Parse(format!("bad imaginary part in `{inner}`")))?;
    Ok((Complex::new(F::lit(re), F::lit(im)), &body[close + 1..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::RegistryBuilder;

    #[test]
    fn round_trip() {
        let mut b = RegistryBuilder::new();
        let (pb1, p1) = b.pair("ψ̄1", "ψ1").unwrap();
        let (_, p10) = b.pair("ψ̄10", "ψ10").unwrap();
        let r = b.build();
        let x: GrassmannElement<f64> = GrassmannElement::real(-0.5)
            + GrassmannElement::monomial(&r, Complex::new(1.0, 2.5e-3), &[pb1, p1])
            + GrassmannElement::monomial(&r, Complex::new(0.0, -1.0), &[p10]);
        let s = render(&x);
        assert_eq!(s.split(" + ").count(), 3);
        assert!(s.starts_with("(-0.5+0.0i)"));
        assert_eq!(parse::<f64>(&s, &r).unwrap(), x);
        assert_eq!(render(&GrassmannElement::<f64>::zero()), "0");
        assert!(parse::<f64>("0", &r).unwrap().is_zero());
    }

    #[test]
    fn rejects_garbage() {
        let r = RegistryBuilder::new().build();
        assert!(parse::<f64>("(1.0+0.0i)·x", &r).is_err());
        assert!(parse::<f64>("1.0", &r).is_err());
    }
}
