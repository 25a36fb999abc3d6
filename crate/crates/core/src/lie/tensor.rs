use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{koszul, same_gens, GeneratorSet, WeightTruncation, Word};
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, sign, Scalar};

/// A finite linear combination of words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    gens: Arc<GeneratorSet>,
    terms: BTreeMap<Word, Scalar>,
}

impl TensorElement {
    pub fn zero(gens: &Arc<GeneratorSet>) -> Self {
        TensorElement { gens: gens.clone(), terms: BTreeMap::new() }
    }

    pub fn unit(gens: &Arc<GeneratorSet>) -> Self {
        Self::word(gens, Word::empty(), Scalar::one())
    }

    pub fn generator(gens: &Arc<GeneratorSet>, i: usize) -> Self {
        Self::word(gens, Word::letter(i), Scalar::one())
    }

    pub fn word(gens: &Arc<GeneratorSet>, w: Word, c: Scalar) -> Self {
        let mut t = Self::zero(gens);
        t.add_term(w, c);
        t
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Scalar)>>(gens: &Arc<GeneratorSet>, terms: I) -> Self {
        let mut t = Self::zero(gens);
        for (w, c) in terms {
            t.add_term(w, c);
        }
        t
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    fn check(&self, other: &TensorElement) -> Result<()> {
        if same_gens(&self.gens, &other.gens) {
            Ok(())
        } else {
            Err(Error::MismatchedGenerators)
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &Scalar, other: &TensorElement) -> Result<()> {
        self.check(other)?;
        if c.is_zero() {
            return Ok(());
        }
        for (w, v) in &other.terms {
            self.add_term(w.clone(), c * v);
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        let mut out = self.clone();
        out.add_scaled(&Scalar::one(), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        let mut out = self.clone();
        out.add_scaled(&-Scalar::one(), other)?;
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        if c.is_zero() {
            return Self::zero(&self.gens);
        }
        TensorElement {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> TensorElement {
        self.scale(&-Scalar::one())
    }

    pub fn truncate(&self, trunc: WeightTruncation) -> TensorElement {
        TensorElement {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= trunc.n())
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn weight_part(&self, weight: usize) -> TensorElement {
        TensorElement {
            gens: self.gens.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == weight)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn min_weight(&self) -> Option<usize> {
        self.terms.keys().next().map(Word::len)
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut ws: Vec<usize> = self.terms.keys().map(Word::len).collect();
        ws.dedup();
        ws
    }

    /// Components keyed by `(weight, degree)`.
    pub fn components(&self) -> BTreeMap<(usize, i64), TensorElement> {
        let mut out: BTreeMap<(usize, i64), TensorElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            let key = (w.len(), self.gens.word_degree(w));
            out.entry(key)
                .or_insert_with(|| Self::zero(&self.gens))
                .terms
                .insert(w.clone(), c.clone());
        }
        out
    }

    pub fn degree_components(&self) -> BTreeMap<i64, TensorElement> {
        let mut out: BTreeMap<i64, TensorElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(self.gens.word_degree(w))
                .or_insert_with(|| Self::zero(&self.gens))
                .terms
                .insert(w.clone(), c.clone());
        }
        out
    }

    /// The common degree of all terms; `None` for zero or mixed elements.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|w| self.gens.word_degree(w));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of_degree(&self, d: i64) -> bool {
        self.terms.keys().all(|w| self.gens.word_degree(w) == d)
    }

    /// Word concatenation, dropping words longer than `N`.
    pub fn concat(&self, other: &TensorElement, trunc: WeightTruncation) -> Result<TensorElement> {
        self.check(other)?;
        let mut out = Self::zero(&self.gens);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() > trunc.n() {
                    continue;
                }
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// Graded commutator, computed per pair of homogeneous components.
    pub fn bracket(&self, other: &TensorElement, trunc: WeightTruncation) -> Result<TensorElement> {
        self.check(other)?;
        let mut out = Self::zero(&self.gens);
        let left = self.degree_components();
        let right = other.degree_components();
        for (da, a) in &left {
            for (db, b) in &right {
                let s = sign(koszul(*da, *db));
                for (u, x) in &a.terms {
                    for (v, y) in &b.terms {
                        if u.len() + v.len() > trunc.n() {
                            continue;
                        }
                        let c = x * y;
                        out.add_term(u.concat(v), c.clone());
                        out.add_term(v.concat(u), -(&s * c));
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Δ(a) - 1⊗a - a⊗1` for the unshuffle coproduct with Koszul signs.
    pub fn reduced_coproduct(&self) -> (BTreeMap<(Word, Word), Scalar>, bool) {
        let mut out: BTreeMap<(Word, Word), Scalar> = BTreeMap::new();
        for (w, c) in &self.terms {
            for_each_unshuffle(&self.gens, w, w.len(), |l, r, parity| {
                let key = (l, r);
                let add = sign(parity) * c;
                match out.get_mut(&key) {
                    Some(e) => {
                        *e += add;
                        if e.is_zero() {
                            out.remove(&key);
                        }
                    }
                    None => {
                        out.insert(key, add);
                    }
                }
            });
        }
        let prim = out.is_empty();
        (out, prim)
    }

    pub fn is_primitive(&self) -> bool {
        self.reduced_coproduct().1
    }

    /// Human-readable form, e.g. `x*y - y*x`.
    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (w, c) in &self.terms {
            let word = if w.is_empty() {
                "1".to_string()
            } else {
                self.gens.word_names(w).join("*")
            };
            if c.is_one() {
                parts.push(word);
            } else if *c == -Scalar::one() {
                parts.push(format!("-{word}"));
            } else {
                parts.push(format!("({})*{word}", format_scalar(c)));
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Calls `f(left, right, sign_parity)` for each splitting of `w` into two
/// nonempty complementary subsequences with `left.len() <= max_left`.
pub(crate) fn for_each_unshuffle<F: FnMut(Word, Word, i64)>(
    gens: &GeneratorSet,
    w: &Word,
    max_left: usize,
    mut f: F,
) {
    let n = w.len();
    if n < 2 {
        return;
    }
    let degs: Vec<i64> = w.0.iter().map(|&g| gens.degree(g as usize)).collect();
    for mask in 1u32..((1u32 << n) - 1) {
        if mask.count_ones() as usize > max_left {
            continue;
        }
        let mut l = Vec::new();
        let mut r = Vec::new();
        let mut parity = 0i64;
        // Degree of right letters seen so far; each left letter passes them.
        let mut right_deg = 0i64;
        for p in 0..n {
            if mask & (1 << p) != 0 {
                l.push(w.0[p]);
                parity += right_deg * degs[p];
            } else {
                r.push(w.0[p]);
                right_deg += degs[p];
            }
        }
        f(Word(l), Word(r), parity.rem_euclid(2));
    }
}

/// A primitive tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement(TensorElement);

impl LieElement {
    pub fn new(t: TensorElement) -> Result<Self> {
        if t.is_primitive() {
            Ok(LieElement(t))
        } else {
            Err(Error::InvalidInput(format!("`{}` is not a Lie element", t.display())))
        }
    }

    pub(crate) fn new_unchecked(t: TensorElement) -> Self {
        LieElement(t)
    }

    pub fn zero(gens: &Arc<GeneratorSet>) -> Self {
        LieElement(TensorElement::zero(gens))
    }

    pub fn generator(gens: &Arc<GeneratorSet>, i: usize) -> Self {
        LieElement(TensorElement::generator(gens, i))
    }

    pub fn bracket(&self, other: &LieElement, trunc: WeightTruncation) -> Result<LieElement> {
        Ok(LieElement(self.0.bracket(&other.0, trunc)?))
    }

    pub fn as_tensor(&self) -> &TensorElement {
        &self.0
    }

    pub fn into_tensor(self) -> TensorElement {
        self.0
    }
}
