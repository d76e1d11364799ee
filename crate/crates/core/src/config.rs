// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Declarative JSON configuration: space, Grassmann generators, Hamiltonian,
//! constraints, lattice plan and tolerances. Complex numbers are `[re, im]`
//! and mode indices start at 1.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::constraints::{ConstraintSet, CLOSURE_TOLERANCE};
use crate::error::{Error, Result};
use crate::fock::{parse_tokens, GrassmannOperator, HilbertSpec, OperatorPolynomial};
use crate::grassmann::{GeneratorRegistry, GrassmannElement, Parity, RegistryBuilder};
use crate::lattice::{LatticePlan, Schedule, ShortTimeRule};
use crate::models::{ExampleId, ExampleParams};
use crate::projector::CERTIFICATE_TOLERANCE;
use crate::scalar::Real;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub space: Option<HilbertSpec>,
    /// Conjugate generator pairs `[bar, plain]`.
    #[serde(default)]
    pub grassmann: Vec<[String; 2]>,
    #[serde(default)]
    pub hamiltonian: Vec<TermSpec>,
    #[serde(default)]
    pub constraints: Vec<ConstraintSpec>,
    pub lattice: Option<LatticeConfig>,
    /// Parameters for `kernel` runs.
    pub kernel: Option<ExampleParams>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// `coeff · g₁⋯gₖ · ops`, with Grassmann generators by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: [f64; 2],
    /// Ladder tokens such as `"f1+ f2 b1"`; empty for a constant.
    #[serde(default)]
    pub ops: String,
    #[serde(default)]
    pub grassmann: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySpec {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub name: String,
    pub parity: ParitySpec,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    /// Takes the adjoint of an earlier constraint instead of `terms`.
    pub adjoint_of: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub example: ExampleId,
    pub n_slices: usize,
    #[serde(default)]
    pub t: f64,
    pub schedule: Option<Schedule>,
    pub rule: Option<ShortTimeRule>,
}

impl LatticeConfig {
    pub fn plan(&self) -> LatticePlan {
        let mut plan = LatticePlan::for_example(self.example, self.n_slices);
        if let Some(s) = &self.schedule {
            plan.schedule = s.clone();
        }
        if let Some(r) = self.rule {
            plan.rule = r;
        }
        plan
    }
}

/// Every numeric threshold in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Residual splitting first from second class.
    pub closure: f64,
    /// Coefficient agreement of exact kernel routes.
    pub kernel: f64,
    /// `‖E² − E‖` and `‖E − E†‖`.
    pub certificate: f64,
    /// Quadrature against the truncated mode sum.
    pub bose_fermi: f64,
    /// Allowed distance of the Trotter slope from −1.
    pub trotter_slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            closure: CLOSURE_TOLERANCE,
            kernel: 1e-12,
            certificate: CERTIFICATE_TOLERANCE,
            bose_fermi: 1e-10,
            trotter_slope: 0.2,
        }
    }
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl Config {
    /// Parses JSON; errors carry the offending field path and line/column.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            // serde_json's message already ends with the line and column
            config_error(path, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    /// Registry of the declared generator pairs.
    pub fn registry(&self) -> Result<Option<Arc<GeneratorRegistry>>> {
        if self.grassmann.is_empty() {
            return Ok(None);
        }
        let mut b = RegistryBuilder::new();
        for (i, [bar, plain]) in self.grassmann.iter().enumerate() {
            b.pair(bar.clone(), plain.clone())
                .map_err(|e| config_error(format!("grassmann[{i}]"), e.to_string()))?;
        }
        Ok(Some(b.build()))
    }

    fn space(&self) -> Result<HilbertSpec> {
        let spec = self.space.ok_or_else(|| config_error("space", "missing"))?;
        spec.validate().map_err(|e| config_error("space", e.to_string()))?;
        Ok(spec)
    }

    fn polynomial<F: Real>(
        terms: &[TermSpec],
        registry: Option<&Arc<GeneratorRegistry>>,
        at: &str,
    ) -> Result<OperatorPolynomial<F>> {
        let mut poly = OperatorPolynomial::new();
        for (i, t) in terms.iter().enumerate() {
            let here = format!("{at}[{i}]");
            let coeff = Complex::new(F::lit(t.coeff[0]), F::lit(t.coeff[1]));
            let factors = parse_tokens(&t.ops).map_err(|e| config_error(format!("{here}.ops"), e.to_string()))?;
            if t.grassmann.is_empty() {
                poly.push(coeff, factors);
                continue;
            }
            let reg = registry
                .ok_or_else(|| config_error(format!("{here}.grassmann"), "no generators declared under `grassmann`"))?;
            let gens = t
                .grassmann
                .iter()
                .map(|l| reg.get(l))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| config_error(format!("{here}.grassmann"), e.to_string()))?;
            poly.push_grassmann(
                coeff,
                GrassmannElement::monomial(reg, Complex::new(F::one(), F::zero()), &gens),
                factors,
            );
        }
        Ok(poly)
    }

    fn realize<F: Real>(poly: &OperatorPolynomial<F>, spec: HilbertSpec, at: &str) -> Result<GrassmannOperator<F>> {
        let op = if poly.has_grassmann() {
            poly.realize_grassmann(spec)
        } else {
            poly.realize(spec).map(|o| o.lift())
        };
        op.map_err(|e| config_error(at, e.to_string()))
    }

    pub fn hamiltonian<F: Real>(&self) -> Result<Option<OperatorPolynomial<F>>> {
        if self.hamiltonian.is_empty() {
            return Ok(None);
        }
        let reg = self.registry()?;
        Self::polynomial(&self.hamiltonian, reg.as_ref(), "hamiltonian").map(Some)
    }

    /// The constraint set, with the Hamiltonian attached when present.
    pub fn constraint_set<F: Real>(&self) -> Result<ConstraintSet<F>> {
        let spec = self.space()?;
        if self.constraints.is_empty() {
            return Err(Error::EmptyConstraintSet);
        }
        let reg = self.registry()?;
        let mut set = ConstraintSet::new(spec);
        let mut polys: Vec<(String, OperatorPolynomial<F>)> = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let at = format!("constraints[{i}]");
            let poly = match &c.adjoint_of {
                Some(other) => {
                    if !c.terms.is_empty() {
                        return Err(config_error(at, "give either `terms` or `adjoint_of`, not both"));
                    }
                    let (_, p) = polys.iter().find(|(n, _)| n == other).ok_or_else(|| {
                        config_error(format!("{at}.adjoint_of"), format!("no earlier constraint `{other}`"))
                    })?;
                    p.adjoint()
                        .map_err(|e| config_error(format!("{at}.adjoint_of"), e.to_string()))?
                }
                None => Self::polynomial(&c.terms, reg.as_ref(), &format!("{at}.terms"))?,
            };
            let op = Self::realize(&poly, spec, &at)?;
            let pushed = match c.parity {
                ParitySpec::Even => set.push_even(&c.name, op),
                ParitySpec::Odd => set.push_odd(&c.name, op),
            };
            pushed.map_err(|e| config_error(at.clone(), e.to_string()))?;
            polys.push((c.name.clone(), poly));
        }
        if let Some(h) = self.hamiltonian::<F>()? {
            let op = Self::realize(&h, spec, "hamiltonian")?;
            op.require_parity(Parity::Even)
                .map_err(|e| config_error("hamiltonian", e.to_string()))?;
            set.set_hamiltonian(op)
                .map_err(|e| config_error("hamiltonian", e.to_string()))?;
        }
        Ok(set)
    }
}
