// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex;

use super::operator::FockOperator;
use super::spec::HilbertSpec;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

/// Which modes contribute the sign string of a fermion ladder operator.
/// Both choices satisfy the canonical anticommutation relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignConvention {
    /// `f_i` carries `(−1)` per occupied mode `j < i`.
    #[default]
    PrecedingModes,
    /// `f_i` carries `(−1)` per occupied mode `j > i`.
    FollowingModes,
}

/// Annihilator `f_mode` on the full space.
pub fn fermion_annihilator<F: Real>(
    spec: HilbertSpec,
    mode: usize,
    convention: SignConvention,
) -> Result<FockOperator<F>> {
    let dim = spec.validate()?;
    spec.check_fermion_mode(mode)?;
    let bit = 1usize << (mode - 1);
    let string_mask = match convention {
        SignConvention::PrecedingModes => bit - 1,
        SignConvention::FollowingModes => (spec.fermion_dimension() - 1) & !(bit | (bit - 1)),
    };
    let mut m = DenseMatrix::zeros(dim, dim);
    for col in 0..dim {
        if col & bit == 0 {
            continue;
        }
        let sign = if (col & string_mask).count_ones() % 2 == 1 {
            -F::one()
        } else {
            F::one()
        };
        m.set(col & !bit, col, Complex::new(sign, F::zero()));
    }
    FockOperator::new(spec, m)
}

/// `(f_i, f_i†)` for every fermion mode, mode 1 first.
pub fn fermion_ops<F: Real>(spec: HilbertSpec) -> Result<Vec<(FockOperator<F>, FockOperator<F>)>> {
    fermion_ops_with(spec, SignConvention::default())
}

pub fn fermion_ops_with<F: Real>(
    spec: HilbertSpec,
    convention: SignConvention,
) -> Result<Vec<(FockOperator<F>, FockOperator<F>)>> {
    if spec.n_fermions == 0 {
        return Err(Error::InvalidSpace("no fermion modes".into()));
    }
    (1..=spec.n_fermions)
        .map(|i| {
            let f = fermion_annihilator(spec, i, convention)?;
            let fd = f.adjoint();
            Ok((f, fd))
        })
        .collect()
}

/// Truncated annihilator `b_mode`: `b|n⟩ = √n |n−1⟩`.
pub fn boson_annihilator<F: Real>(spec: HilbertSpec, mode: usize) -> Result<FockOperator<F>> {
    let dim = spec.validate()?;
    spec.check_boson_mode(mode)?;
    let stride = spec.fermion_dimension() * (spec.boson_cutoff + 1).pow(mode as u32 - 1);
    let mut m = DenseMatrix::zeros(dim, dim);
    for col in 0..dim {
        let n = spec.boson_occupation(col, mode);
        if n == 0 {
            continue;
        }
        m.set(col - stride, col, Complex::new(F::lit(n as f64).sqrt(), F::zero()));
    }
    FockOperator::new(spec, m)
}

/// `(b_i, b_i†)` for every boson mode.
pub fn boson_ops<F: Real>(spec: HilbertSpec) -> Result<Vec<(FockOperator<F>, FockOperator<F>)>> {
    if spec.n_bosons == 0 {
        return Err(Error::InvalidSpace("no boson modes".into()));
    }
    (1..=spec.n_bosons)
        .map(|i| {
            let b = boson_annihilator(spec, i)?;
            let bd = b.adjoint();
            Ok((b, bd))
        })
        .collect()
}

/// Total fermion number `Σ f_i† f_i`.
pub fn fermion_number<F: Real>(spec: HilbertSpec) -> Result<FockOperator<F>> {
    let dim = spec.validate()?;
    let values: Vec<_> = (0..dim)
        .map(|i| Complex::new(F::lit(spec.fermion_number(i) as f64), F::zero()))
        .collect();
    FockOperator::from_diagonal(spec, &values)
}

/// Total boson number `Σ b_i† b_i`.
pub fn boson_number<F: Real>(spec: HilbertSpec) -> Result<FockOperator<F>> {
    let dim = spec.validate()?;
    let values: Vec<_> = (0..dim)
        .map(|i| Complex::new(F::lit(spec.boson_number(i) as f64), F::zero()))
        .collect();
    FockOperator::from_diagonal(spec, &values)
}

#[cfg(test)]
pub(crate) fn is_zero_matrix<F: Real>(op: &FockOperator<F>, tol: F) -> bool {
    op.matrix().data().iter().all(|z| z.norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Operator;

    type Op = FockOperator<f64>;

    #[test]
    fn car_relations_both_conventions() {
        for conv in [SignConvention::PrecedingModes, SignConvention::FollowingModes] {
            for n in 1..=4 {
                let spec = HilbertSpec::fermions(n);
                let ops = fermion_ops_with::<f64>(spec, conv).unwrap();
                let id = Op::identity(spec).unwrap();
                let zero = Op::zero(spec).unwrap();
                for (i, (fi, fdi)) in ops.iter().enumerate() {
                    for (j, (fj, fdj)) in ops.iter().enumerate() {
                        let want = if i == j { &id } else { &zero };
                        assert!(fi.anticommutator(fdj).unwrap().max_deviation(want).unwrap() <= 1e-15);
                        assert!(fi.anticommutator(fj).unwrap().max_deviation(&zero).unwrap() <= 1e-15);
                        assert!(fdi.anticommutator(fdj).unwrap().max_deviation(&zero).unwrap() <= 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn single_mode_action() {
        let spec = HilbertSpec::fermions(1);
        let (f, _) = fermion_ops::<f64>(spec).unwrap().remove(0);
        assert_eq!(*f.matrix().get(0, 1), Complex::new(1.0, 0.0));
        assert_eq!(f.parity(), Some(crate::grassmann::Parity::Odd));
    }

    #[test]
    fn triple_product_is_nilpotent() {
        let spec = HilbertSpec::fermions(3);
        let ops = fermion_ops::<f64>(spec).unwrap();
        let chi = ops[0].0.compose(&ops[1].0).unwrap().compose(&ops[2].0).unwrap();
        let sq = chi.compose(&chi).unwrap();
        assert!(is_zero_matrix(&sq, 0.0));
    }

    #[test]
    fn boson_ladder_and_truncation_defect() {
        let spec = HilbertSpec::bosons(1, 2);
        let (b, bd) = boson_ops::<f64>(spec).unwrap().remove(0);
        for n in 1..=2usize {
            assert!((bd.matrix().get(n, n - 1).re - (n as f64).sqrt()).abs() < 1e-15);
        }
        let comm = b.commutator(&bd).unwrap();
        let want = Op::from_diagonal(
            spec,
            &[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0)],
        )
        .unwrap();
        assert!(comm.max_deviation(&want).unwrap() < 1e-14);
        let num = bd.compose(&b).unwrap();
        let eig = crate::linalg::hermitian_eigen(num.matrix()).unwrap();
        for (k, v) in eig.values.iter().enumerate() {
            assert!((v - k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn operators_on_mixed_space_commute_across_species() {
        let spec = HilbertSpec::mixed(1, 1, 3);
        let (b, _) = boson_ops::<f64>(spec).unwrap().remove(0);
        let (f, _) = fermion_ops::<f64>(spec).unwrap().remove(0);
        let zero = Operator::zero(spec).unwrap();
        assert!(b.commutator(&f).unwrap().max_deviation(&zero).unwrap() == 0.0);
    }
}
