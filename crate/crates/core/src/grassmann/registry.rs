// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Monomials are bitmasks in one machine word.
pub const MAX_GENERATORS: usize = 64;

/// Index of a generator inside its registry. Bit `i` of a monomial mask
/// stands for generator `i`; canonical order is ascending index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(pub(crate) u8);

impl Generator {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn bit(self) -> u64 {
        1u64 << self.0
    }
}

/// Fixed, ordered set of Grassmann generators with optional conjugate pairing.
///
/// Registries are immutable once built; extend one with
/// [`RegistryBuilder::extending`], which keeps every issued index.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorRegistry {
    labels: Vec<String>,
    partners: Vec<Option<u8>>,
    lookup: HashMap<String, u8>,
}

impl GeneratorRegistry {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, g: Generator) -> &str {
        &self.labels[g.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<Generator> {
        self.lookup.get(label).copied().map(Generator)
    }

    pub fn get(&self, label: &str) -> Result<Generator> {
        self.find(label)
            .ok_or_else(|| Error::UnknownGenerator(label.to_string()))
    }

    /// Conjugate partner used by the involution.
    pub fn partner(&self, g: Generator) -> Option<Generator> {
        self.partners[g.index()].map(Generator)
    }

    pub fn generators(&self) -> impl Iterator<Item = Generator> + '_ {
        (0..self.labels.len()).map(|i| Generator(i as u8))
    }

    /// True when every generator of `self` has the same index and label in `other`.
    pub fn is_prefix_of(&self, other: &GeneratorRegistry) -> bool {
        self.labels.len() <= other.labels.len() && self.labels.iter().zip(&other.labels).all(|(a, b)| a == b)
    }

    pub(crate) fn same(a: &Arc<GeneratorRegistry>, b: &Arc<GeneratorRegistry>) -> bool {
        Arc::ptr_eq(a, b) || a.labels == b.labels
    }
}

impl fmt::Debug for GeneratorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.labels).finish()
    }
}

/// Incrementally issues generators; indices are contiguous from zero.
#[derive(Debug, Default, Clone)]
pub struct RegistryBuilder {
    labels: Vec<String>,
    partners: Vec<Option<u8>>,
}

impl RegistryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from an existing registry, keeping all of its indices.
    pub fn extending(base: &GeneratorRegistry) -> Self {
        Self {
            labels: base.labels.clone(),
            partners: base.partners.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn generator(&mut self, label: impl Into<String>) -> Result<Generator> {
        let label = label.into();
        if self.labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        if self.labels.len() >= MAX_GENERATORS {
            return Err(Error::RegistryFull {
                max: MAX_GENERATORS,
                requested: self.labels.len() + 1,
            });
        }
        self.labels.push(label);
        self.partners.push(None);
        Ok(Generator((self.labels.len() - 1) as u8))
    }

    /// Registers a conjugate pair `(bar, plain)`, in that order.
    pub fn pair(&mut self, bar: impl Into<String>, plain: impl Into<String>) -> Result<(Generator, Generator)> {
        let b = self.generator(bar)?;
        let p = self.generator(plain)?;
        self.partners[b.index()] = Some(p.0);
        self.partners[p.index()] = Some(b.0);
        Ok((b, p))
    }

    pub fn build(self) -> Arc<GeneratorRegistry> {
        let lookup = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as u8))
            .collect();
        Arc::new(GeneratorRegistry {
            labels: self.labels,
            partners: self.partners,
            lookup,
        })
    }
}
