// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! The worked example systems: spaces, Hamiltonians, constraints, projectors
//! and the generator labels their kernels are expressed in.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::coherent::ModeLabels;
use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::fock::{GrassmannOperator, HilbertSpec, OperatorPolynomial};
use crate::grassmann::{Generator, GeneratorRegistry, GrassmannElement, RegistryBuilder};
use crate::projector::{project_group_average, project_odd_pair, OddCase};
use crate::scalar::{re as cr, Real};

/// Identifiers of the example kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExampleId {
    /// Two fermions, one particle, `H = 0`.
    #[serde(rename = "eq39")]
    NumberConstraint,
    /// Three fermions, one even and two odd first-class constraints, `H = 0`.
    #[serde(rename = "sec42")]
    ThreeFermion,
    /// `χ = f − θ`, states annihilated by `χ`, `H = ω f†f`.
    #[serde(rename = "eq58")]
    ShiftedCaseA,
    /// `χ = f − θ`, states annihilated by `χ†`, `H = ω f†f`.
    #[serde(rename = "eq63")]
    ShiftedCaseB,
    /// `χ = (f₁ − f₂)/√2`, case A, `H = 0`.
    #[serde(rename = "eq65")]
    DifferenceCaseA,
    /// `χ = (f₁ − f₂)/√2`, case B, `H = 0`.
    #[serde(rename = "eq66")]
    DifferenceCaseB,
    /// Bosons and fermions tied by `b†b − f†f = p`.
    #[serde(rename = "bose-fermi")]
    BoseFermi,
}

impl ExampleId {
    pub const ALL: [ExampleId; 7] = [
        ExampleId::NumberConstraint,
        ExampleId::ThreeFermion,
        ExampleId::ShiftedCaseA,
        ExampleId::ShiftedCaseB,
        ExampleId::DifferenceCaseA,
        ExampleId::DifferenceCaseB,
        ExampleId::BoseFermi,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ExampleId::NumberConstraint => "eq39",
            ExampleId::ThreeFermion => "sec42",
            ExampleId::ShiftedCaseA => "eq58",
            ExampleId::ShiftedCaseB => "eq63",
            ExampleId::DifferenceCaseA => "eq65",
            ExampleId::DifferenceCaseB => "eq66",
            ExampleId::BoseFermi => "bose-fermi",
        }
    }

    pub fn is_first_class(self) -> bool {
        matches!(
            self,
            ExampleId::NumberConstraint | ExampleId::ThreeFermion | ExampleId::BoseFermi
        )
    }

    pub fn n_fermions(self) -> usize {
        match self {
            ExampleId::NumberConstraint => 2,
            ExampleId::ThreeFermion => 3,
            ExampleId::ShiftedCaseA | ExampleId::ShiftedCaseB => 1,
            ExampleId::DifferenceCaseA | ExampleId::DifferenceCaseB => 2,
            ExampleId::BoseFermi => 1,
        }
    }

    pub fn has_theta(self) -> bool {
        matches!(self, ExampleId::ShiftedCaseA | ExampleId::ShiftedCaseB)
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// Numeric parameters shared by all examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleParams {
    pub t: f64,
    pub omega: f64,
    /// Offset in the boson–fermion constraint.
    pub p: i64,
    /// Boson cutoff.
    pub n_max: usize,
    /// Boson labels of the bra, one `[re, im]` per mode.
    pub z_bra: Vec<[f64; 2]>,
    /// Boson labels of the ket.
    pub z_ket: Vec<[f64; 2]>,
    /// Quadrature points for the boson–fermion kernel; `None` picks the minimum.
    pub quadrature: Option<usize>,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self {
            t: 0.0,
            omega: 1.0,
            p: 0,
            n_max: 6,
            z_bra: vec![[0.5, 0.0]],
            z_ket: vec![[0.5, 0.0]],
            quadrature: None,
        }
    }
}

impl ExampleParams {
    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_p(mut self, p: i64) -> Self {
        self.p = p;
        self
    }

    pub fn n_bosons(&self) -> usize {
        self.z_ket.len()
    }

    pub fn z<F: Real>(list: &[[f64; 2]]) -> Vec<Complex<F>> {
        list.iter()
            .map(|[re, im]| Complex::new(F::lit(*re), F::lit(*im)))
            .collect()
    }

    /// Smallest quadrature resolving every charge `m − n − p`.
    pub fn min_quadrature(&self, n_fermions: usize) -> usize {
        2 * (self.n_bosons() * self.n_max + n_fermions + self.p.unsigned_abs() as usize) + 1
    }
}

/// Generator labels of a kernel `⟨Ψ″| … |Ψ′⟩`: bra pairs `ψ̄ᵢ″, ψᵢ″`, ket pairs
/// `ψ̄ᵢ′, ψᵢ′`, and optionally the constraint labels `θ̄, θ`.
#[derive(Debug, Clone)]
pub struct KernelLabels {
    pub registry: Arc<GeneratorRegistry>,
    pub bra: ModeLabels,
    pub ket: ModeLabels,
    pub theta: Option<(Generator, Generator)>,
}

pub const BRA_SUFFIX: &str = "″";
pub const KET_SUFFIX: &str = "′";

impl KernelLabels {
    pub fn new(n: usize, theta: bool) -> Result<Self> {
        let mut b = RegistryBuilder::new();
        let labels = Self::register(&mut b, n, theta)?;
        Ok(labels.finish(b.build()))
    }

    /// Registers the endpoint labels into `b`; more generators may follow.
    pub fn register(b: &mut RegistryBuilder, n: usize, theta: bool) -> Result<PendingLabels> {
        let bra = ModeLabels::register(b, n, "ψ̄", "ψ", BRA_SUFFIX)?;
        let ket = ModeLabels::register(b, n, "ψ̄", "ψ", KET_SUFFIX)?;
        let theta = if theta { Some(b.pair("θ̄", "θ")?) } else { None };
        Ok(PendingLabels { bra, ket, theta })
    }

    pub fn n_modes(&self) -> usize {
        self.bra.len()
    }

    pub fn theta_bar<F: Real>(&self) -> Result<GrassmannElement<F>> {
        let (tb, _) = self.theta.ok_or(Error::MissingParameter("θ"))?;
        Ok(GrassmannElement::generator(&self.registry, tb))
    }

    pub fn element<F: Real>(&self, g: Generator) -> GrassmannElement<F> {
        GrassmannElement::generator(&self.registry, g)
    }
}

/// Labels registered but not yet bound to a finished registry.
#[derive(Debug, Clone)]
pub struct PendingLabels {
    pub bra: ModeLabels,
    pub ket: ModeLabels,
    pub theta: Option<(Generator, Generator)>,
}

impl PendingLabels {
    pub fn finish(self, registry: Arc<GeneratorRegistry>) -> KernelLabels {
        KernelLabels {
            registry,
            bra: self.bra,
            ket: self.ket,
            theta: self.theta,
        }
    }
}

/// `Σ f_i† f_i − m`.
pub fn number_constraint<F: Real>(n: usize, m: f64) -> OperatorPolynomial<F> {
    crate::fock::number_polynomial(n, cr(-m))
}

/// `1 − n₁ − n₂ − n₃ + n₁n₂ + n₂n₃ + n₃n₁`, zero exactly on states with at
/// least one empty and one occupied mode.
pub fn three_fermion_phi<F: Real>() -> Result<OperatorPolynomial<F>> {
    OperatorPolynomial::new()
        .term(cr(1.0), "")?
        .term(cr(-1.0), "f1+ f1")?
        .term(cr(-1.0), "f2+ f2")?
        .term(cr(-1.0), "f3+ f3")?
        .term(cr(1.0), "f1+ f1 f2+ f2")?
        .term(cr(1.0), "f2+ f2 f3+ f3")?
        .term(cr(1.0), "f3+ f3 f1+ f1")
}

/// `χ = f₁f₂f₃`.
pub fn three_fermion_chi<F: Real>() -> Result<OperatorPolynomial<F>> {
    OperatorPolynomial::new().term(cr(1.0), "f1 f2 f3")
}

/// `χ = f − θ`.
pub fn shifted_chi<F: Real>(registry: &Arc<GeneratorRegistry>, theta: Generator) -> Result<OperatorPolynomial<F>> {
    OperatorPolynomial::new().term(cr(1.0), "f1")?.grassmann_term(
        cr(-1.0),
        GrassmannElement::generator(registry, theta),
        "",
    )
}

/// `χ = (f₁ − f₂)/√2`.
pub fn difference_chi<F: Real>() -> Result<OperatorPolynomial<F>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    OperatorPolynomial::new().term(cr(s), "f1")?.term(cr(-s), "f2")
}

/// `χ = (f₁ + f₂)/√2`.
pub fn sum_chi<F: Real>() -> Result<OperatorPolynomial<F>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    OperatorPolynomial::new().term(cr(s), "f1")?.term(cr(s), "f2")
}

/// `χ = f₁ − f₂f₃f₄†` on four modes.
pub fn nonlinear_chi<F: Real>() -> Result<OperatorPolynomial<F>> {
    OperatorPolynomial::new()
        .term(cr(1.0), "f1")?
        .term(cr(-1.0), "f2 f3 f4+")
}

/// `ω Σ f_i† f_i`.
pub fn free_fermions<F: Real>(n: usize, omega: f64) -> OperatorPolynomial<F> {
    let mut p = OperatorPolynomial::new();
    for i in 1..=n {
        p.push(cr(omega), vec![crate::fock::Ladder::fd(i), crate::fock::Ladder::f(i)]);
    }
    p
}

/// `ω (Σ b_i† b_i + Σ f_i† f_i)`.
pub fn bose_fermi_hamiltonian<F: Real>(m: usize, n: usize, omega: f64) -> OperatorPolynomial<F> {
    use crate::fock::Ladder;
    let mut p = OperatorPolynomial::new();
    for i in 1..=m {
        p.push(cr(omega), vec![Ladder::bd(i), Ladder::b(i)]);
    }
    for i in 1..=n {
        p.push(cr(omega), vec![Ladder::fd(i), Ladder::f(i)]);
    }
    p
}

/// `Σ b_i† b_i − Σ f_i† f_i − p`.
pub fn bose_fermi_constraint<F: Real>(m: usize, n: usize, p: i64) -> OperatorPolynomial<F> {
    use crate::fock::Ladder;
    let mut poly = OperatorPolynomial::new();
    for i in 1..=m {
        poly.push(Complex::one(), vec![Ladder::bd(i), Ladder::b(i)]);
    }
    for i in 1..=n {
        poly.push(-Complex::<F>::one(), vec![Ladder::fd(i), Ladder::f(i)]);
    }
    if p != 0 {
        poly.push(cr(-(p as f64)), vec![]);
    }
    poly
}

/// Everything needed to evaluate one example kernel.
#[derive(Debug, Clone)]
pub struct ExampleSystem<F: Real> {
    pub id: ExampleId,
    pub spec: HilbertSpec,
    pub labels: KernelLabels,
    pub hamiltonian: OperatorPolynomial<F>,
    pub constraints: ConstraintSet<F>,
    /// The even constraint `Φ` of first-class examples.
    pub phi: Option<OperatorPolynomial<F>>,
    /// Physical-subspace projector, Grassmann-valued when the constraint is.
    pub projector: GrassmannOperator<F>,
    pub params: ExampleParams,
}

impl<F: Real> ExampleSystem<F> {
    pub fn build(id: ExampleId, params: &ExampleParams) -> Result<Self> {
        let labels = KernelLabels::new(id.n_fermions(), id.has_theta())?;
        Self::build_with_labels(id, params, labels)
    }

    /// Builds the system over an existing label set (for lattice registries).
    pub fn build_with_labels(id: ExampleId, params: &ExampleParams, labels: KernelLabels) -> Result<Self> {
        let n = id.n_fermions();
        let reg = labels.registry.clone();
        let mut phi_poly = None;
        let (spec, hamiltonian, constraints, projector) = match id {
            ExampleId::NumberConstraint | ExampleId::ThreeFermion => {
                let spec = HilbertSpec::fermions(n);
                let mut cs = ConstraintSet::new(spec);
                let poly = if id == ExampleId::NumberConstraint {
                    number_constraint(2, 1.0)
                } else {
                    three_fermion_phi()?
                };
                let phi = poly.realize(spec)?;
                phi_poly = Some(poly);
                cs.push_even("Φ", phi.clone())?;
                if id == ExampleId::ThreeFermion {
                    cs.push_odd_pair("χ", three_fermion_chi()?.realize(spec)?)?;
                }
                let e = project_group_average(&phi, None)?;
                (spec, OperatorPolynomial::new(), cs, e.op().lift())
            }
            ExampleId::ShiftedCaseA | ExampleId::ShiftedCaseB => {
                let spec = HilbertSpec::fermions(1);
                let (_, theta) = labels.theta.ok_or(Error::MissingParameter("θ"))?;
                let chi = shifted_chi(&reg, theta)?.realize_grassmann(spec)?;
                let mut cs = ConstraintSet::new(spec);
                cs.push_odd_pair("χ", chi.clone())?;
                let case = if id == ExampleId::ShiftedCaseA {
                    OddCase::A
                } else {
                    OddCase::B
                };
                let e = project_odd_pair(&chi, case)?;
                (spec, free_fermions(1, params.omega), cs, e.op)
            }
            ExampleId::DifferenceCaseA | ExampleId::DifferenceCaseB => {
                let spec = HilbertSpec::fermions(2);
                let chi = difference_chi()?.realize(spec)?;
                let mut cs = ConstraintSet::new(spec);
                cs.push_odd_pair("χ", chi.clone())?;
                let case = if id == ExampleId::DifferenceCaseA {
                    OddCase::A
                } else {
                    OddCase::B
                };
                let e = project_odd_pair(&chi.lift(), case)?;
                (spec, OperatorPolynomial::new(), cs, e.op)
            }
            ExampleId::BoseFermi => {
                let m = params.n_bosons();
                if params.z_bra.len() != m {
                    return Err(Error::DimensionMismatch(
                        "bra and ket boson labels differ in length".into(),
                    ));
                }
                let spec = HilbertSpec::mixed(n, m, params.n_max);
                let poly = bose_fermi_constraint(m, n, params.p);
                let phi = poly.realize(spec)?;
                phi_poly = Some(poly);
                let mut cs = ConstraintSet::new(spec);
                cs.push_even("Φ", phi.clone())?;
                let e = project_group_average(&phi, None)?;
                (spec, bose_fermi_hamiltonian(m, n, params.omega), cs, e.op().lift())
            }
        };
        let mut constraints = constraints;
        let h = hamiltonian.realize(spec)?;
        if !hamiltonian.is_empty() {
            constraints.set_hamiltonian(h)?;
        }
        Ok(Self {
            id,
            spec,
            labels,
            hamiltonian,
            constraints,
            phi: phi_poly,
            projector,
            params: params.clone(),
        })
    }

    pub fn hamiltonian_operator(&self) -> Result<GrassmannOperator<F>> {
        Ok(self.hamiltonian.realize(self.spec)?.lift())
    }
}
