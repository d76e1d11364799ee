// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Projection operators onto physical subspaces.

use std::fmt;

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockOperator, GrassmannOperator, HilbertSpec};
use crate::linalg::{hermitian_eigen, spectral_projector, symmetric_eigen};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Bound on `‖E² − E‖_max` and `‖E† − E‖_max`.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-12;

/// Distance from an integer beyond which a spectrum is rejected.
pub const INTEGER_SPECTRUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectorRoute {
    /// Discrete average of `exp(−iξΦ)` over the circle.
    GroupAverage,
    /// Null space of the stacked constraint operators.
    SpectralKernel,
    /// `X⁻¹ χ χ†`.
    OddPairA,
    /// `X⁻¹ χ† χ`.
    OddPairB,
    /// Discrete average of `exp(−iξ(𝟏 − E))` for a given projector `E`.
    ComplementAverage,
    /// Product of commuting projectors.
    Product,
}

impl ProjectorRoute {
    pub fn name(self) -> &'static str {
        match self {
            ProjectorRoute::GroupAverage => "group-average",
            ProjectorRoute::SpectralKernel => "spectral-kernel",
            ProjectorRoute::OddPairA => "odd-pair-A",
            ProjectorRoute::OddPairB => "odd-pair-B",
            ProjectorRoute::ComplementAverage => "complement-average",
            ProjectorRoute::Product => "product",
        }
    }
}

impl fmt::Display for ProjectorRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A numeric projector together with its certificates.
#[derive(Debug, Clone)]
pub struct Projector<F: Real> {
    op: FockOperator<F>,
    route: ProjectorRoute,
    idempotency_defect: f64,
    hermiticity_defect: f64,
    rank: usize,
}

impl<F: Real> Projector<F> {
    /// Measures the certificates and rejects the operator if either exceeds
    /// [`CERTIFICATE_TOLERANCE`].
    pub fn certify(op: FockOperator<F>, route: ProjectorRoute) -> Result<Self> {
        let idem = op.compose(&op)?.max_deviation(&op)?.to_f64().unwrap_or(f64::NAN);
        let herm = op.max_deviation(&op.adjoint())?.to_f64().unwrap_or(f64::NAN);
        if idem.is_nan() || idem > CERTIFICATE_TOLERANCE {
            return Err(Error::Certificate(format!("‖E²−E‖ = {idem:e} via {route}")));
        }
        if herm.is_nan() || herm > CERTIFICATE_TOLERANCE {
            return Err(Error::Certificate(format!("‖E†−E‖ = {herm:e} via {route}")));
        }
        let rank = op.trace().re.to_f64().unwrap_or(0.0).round().max(0.0) as usize;
        Ok(Self {
            op,
            route,
            idempotency_defect: idem,
            hermiticity_defect: herm,
            rank,
        })
    }

    pub fn op(&self) -> &FockOperator<F> {
        &self.op
    }

    pub fn route(&self) -> ProjectorRoute {
        self.route
    }

    pub fn idempotency_defect(&self) -> f64 {
        self.idempotency_defect
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn spec(&self) -> HilbertSpec {
        self.op.spec()
    }

    pub fn max_deviation(&self, other: &Self) -> Result<F> {
        self.op.max_deviation(&other.op)
    }

    /// Product with a commuting projector.
    pub fn product(&self, other: &Self) -> Result<Self> {
        Self::certify(self.op.compose(&other.op)?, ProjectorRoute::Product)
    }
}

fn integer_spectrum<F: Real>(phi: &FockOperator<F>) -> Result<Vec<f64>> {
    if !phi.is_self_adjoint(F::lit(CERTIFICATE_TOLERANCE)) {
        return Err(Error::NotSelfAdjoint("Φ".into()));
    }
    let eig = hermitian_eigen(phi.matrix())?;
    for &l in &eig.values {
        if (l - l.round()).abs() > INTEGER_SPECTRUM_TOLERANCE {
            return Err(Error::NonIntegerSpectrum(l));
        }
    }
    Ok(eig.values)
}

/// Smallest quadrature that resolves the spectrum: `2⌈max|λ|⌉ + 1`.
pub fn default_quadrature<F: Real>(phi: &FockOperator<F>) -> Result<usize> {
    let values = integer_spectrum(phi)?;
    let max = values.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    Ok(2 * max.ceil() as usize + 1)
}

/// `(1/K) Σ_k exp(−i 2πk/K · Φ)`, exact for integer spectra.
pub fn project_group_average<F: Real>(phi: &FockOperator<F>, k: Option<usize>) -> Result<Projector<F>> {
    let need = default_quadrature(phi)?;
    let k = k.unwrap_or(need);
    if k < need {
        return Err(Error::QuadratureTooSmall { k, need });
    }
    let sum = phase_average(phi, k)?;
    Projector::certify(sum, ProjectorRoute::GroupAverage)
}

fn phase_average<F: Real>(gen: &FockOperator<F>, k: usize) -> Result<FockOperator<F>> {
    let spec = gen.spec();
    let mut sum = FockOperator::zero(spec)?;
    for j in 0..k {
        let xi = F::TAU() * F::lit(j as f64) / F::lit(k as f64);
        sum = sum.add(&gen.unitary_exp(xi)?)?;
    }
    Ok(sum.scale(Complex::new(F::one() / F::lit(k as f64), F::zero())))
}

/// Orthogonal projector onto `∩ ker(op)`.
pub fn project_kernel<F: Real>(spec: HilbertSpec, ops: &[FockOperator<F>]) -> Result<Projector<F>> {
    let mut gram = FockOperator::zero(spec)?;
    for op in ops {
        gram = gram.add(&op.adjoint().compose(op)?)?;
    }
    let eig = hermitian_eigen(gram.matrix())?;
    let scale = eig.values.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    let cut = INTEGER_SPECTRUM_TOLERANCE * scale;
    let p = spectral_projector(&eig, |l| l.abs() <= cut);
    Projector::certify(FockOperator::new(spec, p)?, ProjectorRoute::SpectralKernel)
}

/// Projector for a non-integer spectrum: the kernel of `Φ`.
pub fn project_zero_eigenspace<F: Real>(phi: &FockOperator<F>) -> Result<Projector<F>> {
    match project_group_average(phi, None) {
        Err(Error::NonIntegerSpectrum(_)) => project_kernel(phi.spec(), std::slice::from_ref(phi)),
        other => other,
    }
}

/// `(1/K) Σ_k exp(−i 2πk/K · (𝟏 − E))`.
pub fn project_complement_average<F: Real>(e: &Projector<F>, k: usize) -> Result<Projector<F>> {
    if k < 2 {
        return Err(Error::QuadratureTooSmall { k, need: 2 });
    }
    let id = FockOperator::identity(e.spec())?;
    let gen = id.sub(e.op())?;
    Projector::certify(phase_average(&gen, k)?, ProjectorRoute::ComplementAverage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OddCase {
    /// Physical states annihilated by `χ`.
    A,
    /// Physical states annihilated by `χ†`.
    B,
}

/// `X⁻¹χχ†` or `X⁻¹χ†χ`, possibly Grassmann-valued.
#[derive(Debug, Clone)]
pub struct OddPairProjector<F: Real> {
    pub op: GrassmannOperator<F>,
    pub case: OddCase,
    pub anticommutator: GrassmannOperator<F>,
    /// Present when `χ` carries no Grassmann generators.
    pub numeric: Option<Projector<F>>,
    pub idempotency_defect: f64,
}

impl<F: Real> OddPairProjector<F> {
    pub fn is_grassmann_valued(&self) -> bool {
        self.numeric.is_none()
    }
}

/// Inverse of a Grassmann operator whose body is Hermitian positive definite.
/// The soul is nilpotent, so the Neumann series terminates.
pub fn inverse_positive<F: Real>(x: &GrassmannOperator<F>) -> Result<GrassmannOperator<F>> {
    let spec = x.spec();
    let body = x.body();
    let eig = hermitian_eigen(body.matrix())?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min.abs() <= CERTIFICATE_TOLERANCE {
        return Err(Error::SingularAnticommutator);
    }
    if min < 0.0 {
        return Err(Error::NotPositiveDefinite(min));
    }
    if !body.is_self_adjoint(F::lit(CERTIFICATE_TOLERANCE)) {
        return Err(Error::NotSelfAdjoint("X".into()));
    }
    let n = body.dim();
    let v = &eig.vectors;
    let inv = DenseMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(Complex::<F>::zero(), |acc, k| {
            acc + v.get(i, k) * v.get(j, k).conj() / F::lit(eig.values[k])
        })
    });
    let body_inv = FockOperator::new(spec, inv)?.lift();
    let soul = x.sub(&body.lift())?;
    let step = body_inv.compose(&soul)?.scale(Complex::new(-F::one(), F::zero()));
    let mut term = GrassmannOperator::identity(spec)?;
    let mut sum = term.clone();
    let zero = GrassmannOperator::zero(spec)?;
    for _ in 0..crate::grassmann::MAX_GENERATORS {
        term = term.compose(&step)?;
        if term.max_coefficient_deviation(&zero)? == F::zero() {
            break;
        }
        sum = sum.add(&term)?;
    }
    sum.compose(&body_inv)
}

/// Projector for a second-class odd pair `(χ, χ†)` with `{χ, χ†} = X > 0`.
pub fn project_odd_pair<F: Real>(chi: &GrassmannOperator<F>, case: OddCase) -> Result<OddPairProjector<F>> {
    let spec = chi.spec();
    let chid = chi.adjoint()?;
    let x = chi.anticommutator(&chid)?;
    let tol = F::lit(CERTIFICATE_TOLERANCE);
    let comm = x
        .commutator(chi)?
        .max_coefficient_deviation(&GrassmannOperator::zero(spec)?)?;
    if comm > tol {
        return Err(Error::NonCommutingAnticommutator(comm.to_f64().unwrap_or(f64::NAN)));
    }
    let xinv = inverse_positive(&x)?;
    let pair = match case {
        OddCase::A => chi.compose(&chid)?,
        OddCase::B => chid.compose(chi)?,
    };
    let op = xinv.compose(&pair)?;
    let idem = op
        .compose(&op)?
        .max_coefficient_deviation(&op)?
        .to_f64()
        .unwrap_or(f64::NAN);
    if idem.is_nan() || idem > CERTIFICATE_TOLERANCE {
        return Err(Error::Certificate(format!("‖E²−E‖ = {idem:e} for an odd pair")));
    }
    let numeric = match op.to_numeric() {
        Some(n) => Some(Projector::certify(
            n,
            match case {
                OddCase::A => ProjectorRoute::OddPairA,
                OddCase::B => ProjectorRoute::OddPairB,
            },
        )?),
        None => None,
    };
    Ok(OddPairProjector {
        op,
        case,
        anticommutator: x,
        numeric,
        idempotency_defect: idem,
    })
}

/// Rotates self-adjoint odd constraints with `{χ_α, χ_β} = W_αβ` to
/// `χ′_α = Σ_β D_βα χ_β / √v_α`, where `DᵀWD = diag(v)` and `D ∈ SO(M)`.
pub fn diagonalize_odd<F: Real>(w: &[Vec<f64>], chis: &[GrassmannOperator<F>]) -> Result<Vec<GrassmannOperator<F>>> {
    let m = chis.len();
    if w.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} W for {m} constraints",
            w.len(),
            w.len()
        )));
    }
    let diagonal = (0..m).all(|i| (0..m).all(|j| i == j || w[i][j] == 0.0));
    let (values, d) = if diagonal {
        if w.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("W is not square".into()));
        }
        let d: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        ((0..m).map(|i| w[i][i]).collect::<Vec<_>>(), d)
    } else {
        let (values, mut d) = symmetric_eigen(w)?;
        if determinant(&d) < 0.0 {
            for row in d.iter_mut() {
                row[0] = -row[0];
            }
        }
        (values, d)
    };
    if let Some(&v) = values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite(v));
    }
    let spec = chis.first().map(|c| c.spec()).ok_or(Error::EmptyConstraintSet)?;
    (0..m)
        .map(|a| {
            let mut acc = GrassmannOperator::zero(spec)?;
            for (b, chi) in chis.iter().enumerate() {
                let coeff = d[b][a] / values[a].sqrt();
                if coeff != 0.0 {
                    acc = acc.add(&chi.scale(Complex::new(F::lit(coeff), F::zero())))?;
                }
            }
            Ok(acc)
        })
        .collect()
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::number_polynomial;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn number_constraint_projects_onto_single_occupation() {
        let spec = HilbertSpec::fermions(2);
        let phi = number_polynomial(2, c(-1.0)).realize(spec).unwrap();
        let e = project_group_average(&phi, None).unwrap();
        assert_eq!(e.rank(), 2);
        let want = FockOperator::from_diagonal(spec, &[c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        assert!(e.op().max_deviation(&want).unwrap() < 1e-14);
        let k = project_kernel(spec, std::slice::from_ref(&phi)).unwrap();
        assert!(k.max_deviation(&e).unwrap() < 1e-12);
        let c2 = project_complement_average(&e, 2).unwrap();
        assert!(c2.max_deviation(&e).unwrap() < 1e-12);
    }

    #[test]
    fn empty_kernel_gives_zero_projector() {
        let spec = HilbertSpec::fermions(1);
        let phi = FockOperator::from_diagonal(spec, &[c(1.0), c(2.0)]).unwrap();
        assert_eq!(project_group_average(&phi, None).unwrap().rank(), 0);
    }

    #[test]
    fn zero_operator_kernel_is_identity() {
        let spec = HilbertSpec::fermions(2);
        let z = FockOperator::<f64>::zero(spec).unwrap();
        let e = project_kernel(spec, &[z]).unwrap();
        assert_eq!(e.rank(), 4);
    }

    #[test]
    fn quadrature_and_spectrum_checks() {
        let spec = HilbertSpec::fermions(1);
        let phi = FockOperator::from_diagonal(spec, &[c(-2.0), c(0.0)]).unwrap();
        assert_eq!(
            project_group_average(&phi, Some(3)).unwrap_err(),
            Error::QuadratureTooSmall { k: 3, need: 5 }
        );
        let frac = FockOperator::from_diagonal(spec, &[c(0.5), c(0.0)]).unwrap();
        assert!(matches!(
            project_group_average(&frac, None),
            Err(Error::NonIntegerSpectrum(_))
        ));
        assert_eq!(project_zero_eigenspace(&frac).unwrap().rank(), 1);
    }

    #[test]
    fn diagonal_rescaling() {
        let spec = HilbertSpec::fermions(1);
        let a = FockOperator::from_diagonal(spec, &[c(1.0), c(-1.0)]).unwrap().lift();
        let b = a.scale(c(3.0));
        let out = diagonalize_odd(&[vec![4.0, 0.0], vec![0.0, 1.0]], &[a.clone(), b.clone()]).unwrap();
        assert!(out[0].max_coefficient_deviation(&a.scale(c(0.5))).unwrap() < 1e-15);
        assert!(out[1].max_coefficient_deviation(&b).unwrap() < 1e-15);
        assert!(matches!(
            diagonalize_odd(&[vec![-1.0]], &[a]),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
