// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "FERMICON_MAX_DIM";

pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Shape of the Hilbert space `(boson modes truncated at n_max) ⊗ ℂ^{2^N}`.
///
/// Basis index = `boson_index · 2^N + fermion_bits`. Bit `i−1` of the fermion
/// part is the occupation of mode `i` (mode 1 fastest); boson modes form a
/// mixed-radix number with mode 1 fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertSpec {
    pub n_fermions: usize,
    #[serde(default)]
    pub n_bosons: usize,
    #[serde(default)]
    pub boson_cutoff: usize,
}

impl HilbertSpec {
    pub fn fermions(n: usize) -> Self {
        Self {
            n_fermions: n,
            n_bosons: 0,
            boson_cutoff: 0,
        }
    }

    pub fn bosons(m: usize, cutoff: usize) -> Self {
        Self {
            n_fermions: 0,
            n_bosons: m,
            boson_cutoff: cutoff,
        }
    }

    pub fn mixed(n_fermions: usize, n_bosons: usize, cutoff: usize) -> Self {
        Self {
            n_fermions,
            n_bosons,
            boson_cutoff: cutoff,
        }
    }

    /// Checks the shape and the dimension cap; returns the dimension.
    pub fn validate(&self) -> Result<usize> {
        if self.n_fermions + self.n_bosons == 0 {
            return Err(Error::InvalidSpace("no modes".into()));
        }
        if self.n_bosons > 0 && self.boson_cutoff == 0 {
            return Err(Error::InvalidSpace("boson cutoff must be at least 1".into()));
        }
        let cap = max_dim();
        let too_big = |dim| Error::DimensionCap { dim, cap };
        if self.n_fermions >= usize::BITS as usize {
            return Err(too_big(usize::MAX));
        }
        let mut dim = 1usize << self.n_fermions;
        for _ in 0..self.n_bosons {
            dim = dim.checked_mul(self.boson_cutoff + 1).ok_or(too_big(usize::MAX))?;
        }
        if dim > cap {
            return Err(too_big(dim));
        }
        Ok(dim)
    }

    /// Dimension without the cap check.
    pub fn dimension(&self) -> usize {
        self.fermion_dimension() * self.boson_dimension()
    }

    pub fn fermion_dimension(&self) -> usize {
        1 << self.n_fermions
    }

    pub fn boson_dimension(&self) -> usize {
        (self.boson_cutoff + 1).pow(self.n_bosons as u32)
    }

    pub fn fermion_bits(&self, index: usize) -> usize {
        index & (self.fermion_dimension() - 1)
    }

    /// Occupation of fermion mode `mode` (1-based) in basis state `index`.
    pub fn fermion_occupation(&self, index: usize, mode: usize) -> bool {
        (index >> (mode - 1)) & 1 == 1
    }

    pub fn fermion_number(&self, index: usize) -> u32 {
        self.fermion_bits(index).count_ones()
    }

    /// Occupation of boson mode `mode` (1-based) in basis state `index`.
    pub fn boson_occupation(&self, index: usize, mode: usize) -> usize {
        let radix = self.boson_cutoff + 1;
        (index >> self.n_fermions) / radix.pow(mode as u32 - 1) % radix
    }

    pub fn boson_number(&self, index: usize) -> usize {
        (1..=self.n_bosons).map(|m| self.boson_occupation(index, m)).sum()
    }

    /// Basis index for the given occupations (`bosons[k]` is mode k+1).
    pub fn index_of(&self, bosons: &[usize], fermions: &[bool]) -> Result<usize> {
        if bosons.len() != self.n_bosons || fermions.len() != self.n_fermions {
            return Err(Error::DimensionMismatch("occupation list length".into()));
        }
        let radix = self.boson_cutoff + 1;
        let mut b = 0usize;
        for &n in bosons.iter().rev() {
            if n > self.boson_cutoff {
                return Err(Error::ModeOutOfRange {
                    kind: "boson occupation",
                    index: n,
                    max: self.boson_cutoff,
                });
            }
            b = b * radix + n;
        }
        let f = fermions
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &occ)| acc | ((occ as usize) << i));
        Ok((b << self.n_fermions) | f)
    }

    pub(crate) fn check_fermion_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.n_fermions {
            return Err(Error::ModeOutOfRange {
                kind: "fermion",
                index: mode,
                max: self.n_fermions,
            });
        }
        Ok(())
    }

    pub(crate) fn check_boson_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.n_bosons {
            return Err(Error::ModeOutOfRange {
                kind: "boson",
                index: mode,
                max: self.n_bosons,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let s = HilbertSpec::mixed(2, 2, 3);
        assert_eq!(s.validate().unwrap(), 64);
        let idx = s.index_of(&[2, 1], &[true, false]).unwrap();
        assert_eq!(s.boson_occupation(idx, 1), 2);
        assert_eq!(s.boson_occupation(idx, 2), 1);
        assert!(s.fermion_occupation(idx, 1));
        assert!(!s.fermion_occupation(idx, 2));
        assert_eq!(s.boson_number(idx), 3);
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            HilbertSpec::fermions(13).validate(),
            Err(Error::DimensionCap { dim: 8192, .. })
        ));
        assert!(HilbertSpec::fermions(0).validate().is_err());
        assert!(HilbertSpec::bosons(1, 0).validate().is_err());
    }
}
