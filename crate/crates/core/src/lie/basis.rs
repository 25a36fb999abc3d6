use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use super::tensor::for_each_unshuffle;
use super::{GeneratorSet, LieElement, TensorElement, WeightTruncation, Word};
use crate::error::{Error, Result};
use crate::linalg::{kernel, SparseVec};
use crate::scalar::{sign, Scalar};

/// A basis of one (weight, degree) component of the free Lie algebra, in
/// reduced echelon form over word order.
#[derive(Clone, Debug)]
pub struct LieBasis {
    pub weight: usize,
    pub degree: Option<i64>,
    elements: Vec<LieElement>,
    pivots: Vec<Word>,
}

impl LieBasis {
    fn from_elements(weight: usize, degree: Option<i64>, mut elements: Vec<LieElement>) -> Self {
        elements.sort_by(|a, b| leading(a).cmp(leading(b)));
        let pivots = elements.iter().map(|e| leading(e).clone()).collect();
        LieBasis { weight, degree, elements, pivots }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[LieElement] {
        &self.elements
    }

    pub fn pivots(&self) -> &[Word] {
        &self.pivots
    }

    /// Coordinates of an element of this component; read off at the pivots.
    pub fn coordinates(&self, t: &TensorElement) -> Vec<Scalar> {
        self.pivots.iter().map(|p| t.coeff(p)).collect()
    }

    /// Coordinates as a sparse vector, offset by `base`.
    pub(crate) fn sparse_coordinates(&self, t: &TensorElement, base: usize, out: &mut SparseVec) {
        for (k, p) in self.pivots.iter().enumerate() {
            if let Some(c) = t.terms().get(p) {
                if !c.is_zero() {
                    out.insert(base + k, c.clone());
                }
            }
        }
    }
}

fn leading(e: &LieElement) -> &Word {
    e.as_tensor().terms().keys().next().expect("basis elements are nonzero")
}

/// All Lie components of weight `1..=N`, indexed by (weight, degree).
#[derive(Clone, Debug)]
pub struct LieBases {
    gens: Arc<GeneratorSet>,
    trunc: WeightTruncation,
    blocks: BTreeMap<(usize, i64), LieBasis>,
}

impl LieBases {
    pub fn new(gens: &Arc<GeneratorSet>, trunc: WeightTruncation) -> Self {
        let mut blocks = BTreeMap::new();
        for w in 1..=trunc.n() {
            for (d, elems) in weight_component(gens, w) {
                blocks.insert((w, d), LieBasis::from_elements(w, Some(d), elems));
            }
        }
        LieBases { gens: gens.clone(), trunc, blocks }
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.trunc
    }

    pub fn get(&self, weight: usize, degree: i64) -> Option<&LieBasis> {
        self.blocks.get(&(weight, degree)).filter(|b| b.dim() > 0)
    }

    pub fn dim(&self, weight: usize, degree: i64) -> usize {
        self.get(weight, degree).map_or(0, LieBasis::dim)
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, i64), &LieBasis)> {
        self.blocks.iter()
    }
}

/// Basis of the weight-`weight` (optionally degree-`degree`) part of the
/// free Lie algebra, computed as the kernel of the reduced coproduct.
pub fn lie_component_basis(
    gens: &Arc<GeneratorSet>,
    weight: usize,
    degree: Option<i64>,
    trunc: WeightTruncation,
) -> Result<LieBasis> {
    if weight == 0 {
        return Err(Error::InvalidInput("weight must be positive".into()));
    }
    if weight > trunc.n() {
        return Err(Error::WeightOutOfRange { weight, trunc: trunc.n() });
    }
    let mut elems = Vec::new();
    for (d, mut e) in weight_component(gens, weight) {
        if degree.map_or(true, |want| want == d) {
            elems.append(&mut e);
        }
    }
    Ok(LieBasis::from_elements(weight, degree, elems))
}

/// Lie elements of one weight grouped by degree.
fn weight_component(gens: &Arc<GeneratorSet>, weight: usize) -> BTreeMap<i64, Vec<LieElement>> {
    let q = gens.len();
    let mut out: BTreeMap<i64, Vec<LieElement>> = BTreeMap::new();
    if weight == 1 {
        for i in 0..q {
            out.entry(gens.degree(i)).or_default().push(LieElement::generator(gens, i));
        }
        return out;
    }
    // Primitives live in blocks of fixed letter content.
    let mut by_content: BTreeMap<Vec<u16>, Vec<Word>> = BTreeMap::new();
    let total = q.pow(weight as u32);
    for idx in 0..total {
        // base-q digits, most significant first, so words come out in lex order
        let mut letters = vec![0u16; weight];
        let mut r = idx;
        for p in (0..weight).rev() {
            letters[p] = (r % q) as u16;
            r /= q;
        }
        let mut content = letters.clone();
        content.sort_unstable();
        by_content.entry(content).or_default().push(Word(letters));
    }
    for (content, words) in by_content {
        let d: i64 = content.iter().map(|&g| gens.degree(g as usize)).sum();
        let elems = primitive_block(gens, &words);
        out.entry(d).or_default().extend(elems);
    }
    out
}

fn primitive_block(gens: &Arc<GeneratorSet>, words: &[Word]) -> Vec<LieElement> {
    let n = words[0].len();
    let mut rows: HashMap<(Word, Word), usize> = HashMap::new();
    let mut images: Vec<SparseVec> = Vec::with_capacity(words.len());
    for w in words {
        let mut img = SparseVec::new();
        for_each_unshuffle(gens, w, n / 2, |l, r, parity| {
            let next = rows.len();
            let id = *rows.entry((l, r)).or_insert(next);
            let e = img.entry(id).or_insert_with(Scalar::zero);
            *e += sign(parity);
            if e.is_zero() {
                img.remove(&id);
            }
        });
        images.push(img);
    }
    kernel(&images)
        .into_iter()
        .map(|v| {
            LieElement::new_unchecked(TensorElement::from_terms(
                gens,
                v.into_iter().map(|(k, c)| (words[k].clone(), c)),
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: usize) -> WeightTruncation {
        WeightTruncation::new(k).unwrap()
    }

    #[test]
    fn two_even_generators() {
        let g = GeneratorSet::uniform(2, 0).unwrap();
        let b2 = lie_component_basis(&g, 2, None, n(4)).unwrap();
        assert_eq!(b2.dim(), 1);
        let x = TensorElement::generator(&g, 0);
        let y = TensorElement::generator(&g, 1);
        assert_eq!(b2.elements()[0].as_tensor(), &x.bracket(&y, n(4)).unwrap());
        assert_eq!(lie_component_basis(&g, 3, None, n(4)).unwrap().dim(), 2);
    }

    #[test]
    fn one_odd_generator() {
        let g = GeneratorSet::from_pairs(&[("x", 1)]).unwrap();
        let dims: Vec<usize> = (1..=3)
            .map(|w| lie_component_basis(&g, w, None, n(4)).unwrap().dim())
            .collect();
        assert_eq!(dims, vec![1, 1, 0]);
    }

    #[test]
    fn weight_above_truncation_rejected() {
        let g = GeneratorSet::uniform(2, 0).unwrap();
        assert!(matches!(
            lie_component_basis(&g, 5, None, n(4)),
            Err(Error::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn basis_elements_are_primitive_and_echelon() {
        let g = GeneratorSet::from_pairs(&[("a", 0), ("b", 1)]).unwrap();
        let bases = LieBases::new(&g, n(5));
        for (_, b) in bases.blocks() {
            for (k, e) in b.elements().iter().enumerate() {
                assert!(e.as_tensor().is_primitive());
                let coords = b.coordinates(e.as_tensor());
                for (j, c) in coords.iter().enumerate() {
                    assert_eq!(c.is_zero(), j != k);
                }
            }
        }
    }
}
