// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Constraint sets and their first/second-class classification.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, GrassmannOperator, HilbertSpec};
use crate::grassmann::Parity;
use crate::linalg::psd_solve;
use crate::scalar::{to_c64, Real};

/// Residual below which a closure relation counts as satisfied.
pub const CLOSURE_TOLERANCE: f64 = 1e-10;

const SELF_ADJOINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Constraint<F: Real> {
    pub name: String,
    pub op: GrassmannOperator<F>,
    pub parity: Parity,
    pub self_adjoint: bool,
}

impl<F: Real> Constraint<F> {
    /// True when some matrix entry carries Grassmann generators.
    pub fn is_grassmann_shifted(&self) -> bool {
        self.op.to_numeric().is_none()
    }
}

/// Even and odd constraints on one space, plus an optional Hamiltonian.
#[derive(Debug, Clone)]
pub struct ConstraintSet<F: Real> {
    spec: HilbertSpec,
    constraints: Vec<Constraint<F>>,
    hamiltonian: Option<GrassmannOperator<F>>,
}

fn self_adjoint_defect<F: Real>(op: &GrassmannOperator<F>) -> Result<F> {
    op.max_coefficient_deviation(&op.adjoint()?)
}

impl<F: Real> ConstraintSet<F> {
    pub fn new(spec: HilbertSpec) -> Self {
        Self {
            spec,
            constraints: Vec::new(),
            hamiltonian: None,
        }
    }

    pub fn spec(&self) -> HilbertSpec {
        self.spec
    }

    pub fn constraints(&self) -> &[Constraint<F>] {
        &self.constraints
    }

    pub fn evens(&self) -> impl Iterator<Item = &Constraint<F>> {
        self.constraints.iter().filter(|c| c.parity == Parity::Even)
    }

    pub fn odds(&self) -> impl Iterator<Item = &Constraint<F>> {
        self.constraints.iter().filter(|c| c.parity == Parity::Odd)
    }

    pub fn get(&self, name: &str) -> Option<&Constraint<F>> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn hamiltonian(&self) -> Option<&GrassmannOperator<F>> {
        self.hamiltonian.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    fn check_spec(&self, op: &GrassmannOperator<F>) -> Result<()> {
        if op.spec() != self.spec {
            return Err(Error::DimensionMismatch("constraint on a different space".into()));
        }
        Ok(())
    }

    pub fn set_hamiltonian(&mut self, h: impl Into<GrassmannOperator<F>>) -> Result<&mut Self> {
        let h = h.into();
        self.check_spec(&h)?;
        h.require_parity(Parity::Even)?;
        if self_adjoint_defect(&h)? > F::lit(SELF_ADJOINT_TOLERANCE) {
            return Err(Error::NotSelfAdjoint("H".into()));
        }
        self.hamiltonian = Some(h);
        Ok(self)
    }

    /// Adds an even self-adjoint constraint.
    pub fn push_even(&mut self, name: &str, op: impl Into<GrassmannOperator<F>>) -> Result<&mut Self> {
        let op = op.into();
        self.check_spec(&op)?;
        op.require_parity(Parity::Even)?;
        if self_adjoint_defect(&op)? > F::lit(SELF_ADJOINT_TOLERANCE) {
            return Err(Error::NotSelfAdjoint(name.into()));
        }
        self.constraints.push(Constraint {
            name: name.into(),
            op,
            parity: Parity::Even,
            self_adjoint: true,
        });
        Ok(self)
    }

    /// Adds an odd constraint. A non-self-adjoint one must have its adjoint in
    /// the set by the time the set is classified.
    pub fn push_odd(&mut self, name: &str, op: impl Into<GrassmannOperator<F>>) -> Result<&mut Self> {
        let op = op.into();
        self.check_spec(&op)?;
        op.require_parity(Parity::Odd)?;
        let self_adjoint = self_adjoint_defect(&op)? <= F::lit(SELF_ADJOINT_TOLERANCE);
        if self_adjoint {
            let sq = op.compose(&op)?;
            let zero = GrassmannOperator::zero(self.spec)?;
            if sq.max_coefficient_deviation(&zero)? <= F::lit(SELF_ADJOINT_TOLERANCE) {
                return Err(Error::TrivialOddConstraint(name.into()));
            }
        }
        self.constraints.push(Constraint {
            name: name.into(),
            op,
            parity: Parity::Odd,
            self_adjoint,
        });
        Ok(self)
    }

    /// Adds `χ` and `χ†` (named `{name}†`).
    pub fn push_odd_pair(&mut self, name: &str, chi: impl Into<GrassmannOperator<F>>) -> Result<&mut Self> {
        let chi = chi.into();
        let adj = chi.adjoint()?;
        self.push_odd(name, chi)?;
        self.push_odd(&format!("{name}†"), adj)
    }

    /// Every odd constraint is self-adjoint or has its adjoint in the set.
    pub fn validate(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Err(Error::EmptyConstraintSet);
        }
        for c in self.odds().filter(|c| !c.self_adjoint) {
            let adj = c.op.adjoint()?;
            let paired = self.odds().any(|d| {
                d.op.max_coefficient_deviation(&adj)
                    .map(|x| x <= F::lit(SELF_ADJOINT_TOLERANCE))
                    .unwrap_or(false)
            });
            if !paired {
                return Err(Error::NotSelfAdjoint(c.name.clone()));
            }
        }
        Ok(())
    }

    /// Numeric constraint operators; errors on Grassmann-shifted ones.
    pub fn numeric_operators(&self) -> Result<Vec<FockOperator<F>>> {
        self.constraints
            .iter()
            .map(|c| c.op.to_numeric().ok_or_else(|| Error::GrassmannShifted(c.name.clone())))
            .collect()
    }

    /// Fits every closure relation and returns verdicts.
    pub fn classify(&self) -> Result<ClassificationReport> {
        self.validate()?;
        let evens: Vec<&Constraint<F>> = self.evens().collect();
        let odds: Vec<&Constraint<F>> = self.odds().collect();
        let mut relations = Vec::new();

        let mut fit = |kind: RelationKind, a: &Constraint<F>, b_name: &str, b: &GrassmannOperator<F>| -> Result<()> {
            let (target, basis): (GrassmannOperator<F>, &[&Constraint<F>]) = match kind {
                RelationKind::Anticommutator => (a.op.anticommutator(b)?, &evens),
                RelationKind::Commutator => {
                    let t = a.op.commutator(b)?;
                    (t, if a.parity == Parity::Odd { &odds } else { &evens })
                }
            };
            let (coeffs, residual) = least_squares(&target, basis)?;
            relations.push(Relation {
                kind,
                left: a.name.clone(),
                right: b_name.to_string(),
                // relations are written with an explicit factor i
                constants: basis
                    .iter()
                    .zip(coeffs)
                    .map(|(c, z)| (c.name.clone(), [z.im, -z.re]))
                    .collect(),
                residual,
            });
            Ok(())
        };

        for (i, a) in evens.iter().enumerate() {
            for b in &evens[i + 1..] {
                fit(RelationKind::Commutator, a, &b.name, &b.op)?;
            }
        }
        for a in &odds {
            for b in &evens {
                fit(RelationKind::Commutator, a, &b.name, &b.op)?;
            }
        }
        for (i, a) in odds.iter().enumerate() {
            for b in &odds[i..] {
                fit(RelationKind::Anticommutator, a, &b.name, &b.op)?;
            }
        }
        if let Some(h) = &self.hamiltonian {
            for a in evens.iter().chain(odds.iter()) {
                fit(RelationKind::Commutator, a, "H", h)?;
            }
        }

        let verdicts = self
            .constraints
            .iter()
            .map(|c| {
                let ok = relations
                    .iter()
                    .filter(|r| r.left == c.name || r.right == c.name)
                    .all(|r| r.residual <= CLOSURE_TOLERANCE);
                Verdict {
                    name: c.name.clone(),
                    parity: c.parity.name().to_string(),
                    class: if ok {
                        ConstraintClass::FirstClass
                    } else {
                        ConstraintClass::SecondClass
                    },
                }
            })
            .collect();
        Ok(ClassificationReport {
            relations,
            verdicts,
            tolerance: CLOSURE_TOLERANCE,
        })
    }
}

impl<F: Real> From<FockOperator<F>> for GrassmannOperator<F> {
    fn from(op: FockOperator<F>) -> Self {
        op.lift()
    }
}

impl<F: Real> From<&FockOperator<F>> for GrassmannOperator<F> {
    fn from(op: &FockOperator<F>) -> Self {
        op.lift()
    }
}

/// Coordinates of a Grassmann-valued operator over (entry, monomial).
fn coordinates<F: Real>(op: &GrassmannOperator<F>) -> HashMap<(usize, u64), Complex<f64>> {
    let mut out = HashMap::new();
    for (k, x) in op.matrix().data().iter().enumerate() {
        for &(m, c) in x.terms() {
            out.insert((k, m), to_c64(c));
        }
    }
    out
}

/// Least-squares expansion `target ≈ Σ c_k basis_k` in the Frobenius inner
/// product over all Grassmann coefficients. Returns `(c, residual norm)`.
fn least_squares<F: Real>(target: &GrassmannOperator<F>, basis: &[&Constraint<F>]) -> Result<(Vec<Complex<f64>>, f64)> {
    let t = coordinates(target);
    let b: Vec<_> = basis.iter().map(|c| coordinates(&c.op)).collect();
    let dot = |x: &HashMap<(usize, u64), Complex<f64>>, y: &HashMap<(usize, u64), Complex<f64>>| {
        x.iter()
            .filter_map(|(k, a)| y.get(k).map(|b| a.conj() * b))
            .sum::<Complex<f64>>()
    };
    let n = b.len();
    let coeffs: Vec<Complex<f64>> = if n == 0 {
        Vec::new()
    } else {
        let gram = DMatrix::from_fn(n, n, |i, j| dot(&b[i], &b[j]));
        let rhs = DVector::from_fn(n, |i, _| dot(&b[i], &t));
        psd_solve(&gram, &rhs, 1e-12).iter().copied().collect()
    };
    let mut resid = t.clone();
    for (c, bk) in coeffs.iter().zip(&b) {
        for (k, v) in bk {
            *resid.entry(*k).or_default() -= c * v;
        }
    }
    let norm = resid.values().fold(0.0, |a, z| a + z.norm_sqr()).sqrt();
    Ok((coeffs, norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    Commutator,
    Anticommutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintClass {
    FirstClass,
    SecondClass,
}

/// `[left, right} = i Σ_k constants[k] · C_k` up to `residual`.
#[derive(Debug, Clone, Serialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub left: String,
    pub right: String,
    /// Structure constants as `[re, im]`, keyed by basis constraint.
    pub constants: Vec<(String, [f64; 2])>,
    pub residual: f64,
}

impl Relation {
    pub fn constant(&self, name: &str) -> Option<Complex<f64>> {
        self.constants
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, [re, im])| Complex::new(*re, *im))
    }

    pub fn closes(&self) -> bool {
        self.residual <= CLOSURE_TOLERANCE
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub parity: String,
    pub class: ConstraintClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub relations: Vec<Relation>,
    pub verdicts: Vec<Verdict>,
    pub tolerance: f64,
}

impl ClassificationReport {
    pub fn relation(&self, left: &str, right: &str) -> Option<&Relation> {
        self.relations
            .iter()
            .find(|r| (r.left == left && r.right == right) || (r.left == right && r.right == left))
    }

    pub fn class_of(&self, name: &str) -> Option<ConstraintClass> {
        self.verdicts.iter().find(|v| v.name == name).map(|v| v.class)
    }

    pub fn all_first_class(&self) -> bool {
        self.verdicts.iter().all(|v| v.class == ConstraintClass::FirstClass)
    }

    pub fn all_second_class(&self) -> bool {
        self.verdicts.iter().all(|v| v.class == ConstraintClass::SecondClass)
    }

    /// Largest residual among relations that close.
    pub fn max_closing_residual(&self) -> f64 {
        self.relations
            .iter()
            .filter(|r| r.closes())
            .fold(0.0, |a, r| a.max(r.residual))
    }

    /// Plain-text table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            let (open, close) = match r.kind {
                RelationKind::Commutator => ('[', ']'),
                RelationKind::Anticommutator => ('{', '}'),
            };
            let consts: Vec<String> = r
                .constants
                .iter()
                .filter(|(_, [re, im])| re.hypot(*im) > CLOSURE_TOLERANCE)
                .map(|(n, [re, im])| format!("({re:+.6}{im:+.6}i)·{n}"))
                .collect();
            let rhs = if !r.closes() {
                "(does not close)".to_string()
            } else if consts.is_empty() {
                "0".to_string()
            } else {
                format!("i[{}]", consts.join(" + "))
            };
            out.push_str(&format!(
                "{open}{}, {}{close} = {rhs}   residual {:.3e}\n",
                r.left, r.right, r.residual
            ));
        }
        for v in &self.verdicts {
            let class = match v.class {
                ConstraintClass::FirstClass => "first-class",
                ConstraintClass::SecondClass => "second-class",
            };
            out.push_str(&format!("{} ({}): {class}\n", v.name, v.parity));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fermion_ops, OperatorPolynomial};

    #[test]
    fn commuting_pair_is_first_class() {
        let spec = HilbertSpec::fermions(2);
        let phi = crate::fock::number_polynomial(2, Complex::new(-1.0, 0.0))
            .realize(spec)
            .unwrap();
        let h = OperatorPolynomial::new()
            .term(Complex::new(0.7, 0.0), "f1+ f1")
            .unwrap()
            .realize(spec)
            .unwrap();
        let mut cs = ConstraintSet::<f64>::new(spec);
        cs.push_even("Φ", phi).unwrap();
        cs.set_hamiltonian(h).unwrap();
        let rep = cs.classify().unwrap();
        assert!(rep.all_first_class());
        let r = rep.relation("Φ", "H").unwrap();
        assert!(r.constant("Φ").unwrap().norm() < 1e-12);
    }

    #[test]
    fn canonical_pair_is_second_class() {
        let spec = HilbertSpec::fermions(1);
        let (f, _) = fermion_ops::<f64>(spec).unwrap().remove(0);
        let mut cs = ConstraintSet::new(spec);
        cs.push_odd_pair("χ", f).unwrap();
        let rep = cs.classify().unwrap();
        assert!(rep.all_second_class());
    }

    #[test]
    fn empty_and_unpaired_sets_are_rejected() {
        let spec = HilbertSpec::fermions(1);
        let cs = ConstraintSet::<f64>::new(spec);
        assert_eq!(cs.classify().unwrap_err(), Error::EmptyConstraintSet);
        let (f, _) = fermion_ops::<f64>(spec).unwrap().remove(0);
        let mut cs = ConstraintSet::new(spec);
        cs.push_odd("χ", f).unwrap();
        assert!(matches!(cs.classify(), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn self_adjoint_nilpotent_odd_constraint_is_trivial() {
        let spec = HilbertSpec::fermions(2);
        let zero = FockOperator::<f64>::zero(spec).unwrap();
        let mut cs = ConstraintSet::new(spec);
        assert!(matches!(cs.push_odd("χ", zero), Err(Error::TrivialOddConstraint(_))));
    }
}
