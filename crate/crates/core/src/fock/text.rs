// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Plain-text operator files:
//!
//! ```text
//! fock-operator
//! spec <n_fermions> <n_bosons> <boson_cutoff>
//! dim <d>
//! <re> <im> <re> <im> …    one line per row
//! ```

use num_complex::Complex;

use super::operator::FockOperator;
use super::spec::HilbertSpec;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

pub fn save<F: Real>(op: &FockOperator<F>) -> String {
    let s = op.spec();
    let mut out = format!(
        "fock-operator\nspec {} {} {}\ndim {}\n",
        s.n_fermions,
        s.n_bosons,
        s.boson_cutoff,
        op.dim()
    );
    for i in 0..op.dim() {
        let row: Vec<String> = (0..op.dim())
            .map(|j| {
                let z = op.matrix().get(i, j);
                format!("{:?} {:?}", z.re, z.im)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn load<F: Real>(text: &str) -> Result<FockOperator<F>> {
    let err = |line: usize, msg: &str| Error::Parse(format!("line {}: {msg}", line + 1));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, l)) if l.trim() == "fock-operator" => {}
        _ => return Err(err(0, "missing `fock-operator` header")),
    }
    let (ln, spec_line) = lines.next().ok_or_else(|| err(1, "missing spec line"))?;
    let nums: Vec<usize> = spec_line
        .strip_prefix("spec ")
        .ok_or_else(|| err(ln, "expected `spec`"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(ln, "bad spec field")))
        .collect::<Result<_>>()?;
    if nums.len() != 3 {
        return Err(err(ln, "spec needs three fields"));
    }
    let spec = HilbertSpec::mixed(nums[0], nums[1], nums[2]);
    let (ln, dim_line) = lines.next().ok_or_else(|| err(2, "missing dim line"))?;
    let dim: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| err(ln, "expected `dim <d>`"))?;
    let mut data = Vec::with_capacity(dim * dim);
    for _ in 0..dim {
        let (ln, row) = lines.next().ok_or_else(|| err(0, "too few rows"))?;
        let vals: Vec<f64> = row
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, "bad number")))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * dim {
            return Err(err(ln, "wrong number of entries"));
        }
        data.extend(vals.chunks(2).map(|p| Complex::new(F::lit(p[0]), F::lit(p[1]))));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing content"));
    }
    FockOperator::new(spec, DenseMatrix::from_row_major(dim, dim, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::fermion_ops;

    #[test]
    fn round_trip_is_exact() {
        let spec = HilbertSpec::fermions(2);
        let (f, fd) = fermion_ops::<f64>(spec).unwrap().remove(1);
        let op = f.add(&fd.scale(Complex::new(0.1, -1.0 / 3.0))).unwrap();
        let text = save(&op);
        assert_eq!(load::<f64>(&text).unwrap(), op);
        assert!(load::<f64>("fock-operator\nspec 1 0 0\ndim 2\n0.0 0.0\n").is_err());
    }
}
