//! Free graded Lie algebras inside the truncated tensor algebra.

mod basis;
mod tensor;

pub use basis::{lie_component_basis, LieBasis, LieBases};
pub use tensor::{LieElement, TensorElement};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

/// An ordered, finite list of named homogeneous generators.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
    index: HashMap<String, usize>,
}

impl PartialEq for GeneratorSet {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}
impl Eq for GeneratorSet {}

impl GeneratorSet {
    pub fn new(generators: Vec<Generator>) -> Result<Arc<Self>> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("generator set is empty".into()));
        }
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if g.degree < 0 {
                return Err(Error::InvalidInput(format!(
                    "generator `{}` has negative degree {}",
                    g.name, g.degree
                )));
            }
            if g.name.is_empty() {
                return Err(Error::InvalidInput("empty generator name".into()));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate generator `{}`", g.name)));
            }
        }
        if generators.len() > u16::MAX as usize {
            return Err(Error::InvalidInput("too many generators".into()));
        }
        Ok(Arc::new(GeneratorSet { generators, index }))
    }

    /// Convenience: `[("x", 1), ("y", 0)]`.
    pub fn from_pairs(pairs: &[(&str, i64)]) -> Result<Arc<Self>> {
        Self::new(
            pairs
                .iter()
                .map(|(n, d)| Generator { name: n.to_string(), degree: *d })
                .collect(),
        )
    }

    /// `q` degree-`d` generators named `x1..xq`.
    pub fn uniform(q: usize, degree: i64) -> Result<Arc<Self>> {
        Self::new(
            (1..=q)
                .map(|i| Generator { name: format!("x{i}"), degree })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.generators[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.generators[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn word_degree(&self, w: &Word) -> i64 {
        w.0.iter().map(|&g| self.degree(g as usize)).sum()
    }

    pub fn word_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Word> {
        names
            .iter()
            .map(|n| self.index_of(n.as_ref()).map(|i| i as u16))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn word_names(&self, w: &Word) -> Vec<String> {
        w.0.iter().map(|&g| self.name(g as usize).to_string()).collect()
    }
}

pub(crate) fn same_gens(a: &Arc<GeneratorSet>, b: &Arc<GeneratorSet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A word in the generators, stored as generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u16])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Words longer than `N` are dropped everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightTruncation(usize);

impl WeightTruncation {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TruncationTooSmall(n));
        }
        Ok(WeightTruncation(n))
    }

    pub fn n(self) -> usize {
        self.0
    }
}

/// Parity of the Koszul sign for swapping degrees `a` and `b`.
pub(crate) fn koszul(a: i64, b: i64) -> i64 {
    (a * b).rem_euclid(2)
}
