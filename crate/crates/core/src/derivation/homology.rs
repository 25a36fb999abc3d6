use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use super::group::{exp_derivation, log_automorphism, FilteredAutomorphism};
use super::{ChenDifferential, Derivation};
use crate::error::{Error, Result};
use crate::lie::{GeneratorSet, LieBases, TensorElement, WeightTruncation};
use crate::complex::level_blocks;
use crate::linalg::{Quotient, Solver, SparseVec};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
struct Entry {
    weight: usize,
    gen: usize,
    k: usize,
}

/// A coordinate system on `Der_n` restricted to a set of weights.
///
/// Basis vectors are `x_j -> b` with `b` running through the Lie basis of
/// weight `i + 1` and degree `|x_j| + n`, ordered by weight, then generator,
/// then basis position.
#[derive(Clone, Debug)]
pub struct DerSpace {
    bases: Arc<LieBases>,
    n: i64,
    entries: Vec<Entry>,
    offsets: BTreeMap<(usize, usize), usize>,
}

impl DerSpace {
    pub fn new(bases: &Arc<LieBases>, n: i64, weights: &[usize]) -> Self {
        let gens = bases.gens();
        let mut ws = weights.to_vec();
        ws.sort_unstable();
        ws.dedup();
        let mut entries = Vec::new();
        let mut offsets = BTreeMap::new();
        for &i in &ws {
            if i + 1 > bases.trunc().n() {
                continue;
            }
            for j in 0..gens.len() {
                offsets.insert((i, j), entries.len());
                let dim = bases.dim(i + 1, gens.degree(j) + n);
                for k in 0..dim {
                    entries.push(Entry { weight: i, gen: j, k });
                }
            }
        }
        DerSpace { bases: bases.clone(), n, entries, offsets }
    }

    pub fn degree(&self) -> i64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn weight_of(&self, idx: usize) -> usize {
        self.entries[idx].weight
    }

    fn gens(&self) -> &Arc<GeneratorSet> {
        self.bases.gens()
    }

    pub fn element(&self, idx: usize) -> Derivation {
        let e = &self.entries[idx];
        let gens = self.gens();
        let basis = self
            .bases
            .get(e.weight + 1, gens.degree(e.gen) + self.n)
            .expect("entry refers to a nonempty block");
        let mut images = vec![TensorElement::zero(gens); gens.len()];
        images[e.gen] = basis.elements()[e.k].as_tensor().clone();
        Derivation::new_unchecked(gens, self.n, images, self.bases.trunc())
    }

    pub fn combination(&self, v: &SparseVec) -> Derivation {
        let gens = self.gens();
        let mut images = vec![TensorElement::zero(gens); gens.len()];
        for (idx, c) in v {
            let e = &self.entries[*idx];
            let basis = self
                .bases
                .get(e.weight + 1, gens.degree(e.gen) + self.n)
                .expect("entry refers to a nonempty block");
            images[e.gen]
                .add_scaled(c, basis.elements()[e.k].as_tensor())
                .expect("same generators");
        }
        Derivation::new_unchecked(gens, self.n, images, self.bases.trunc())
    }

    /// Coordinates of the parts of `d` whose weights belong to this space.
    pub fn coords(&self, d: &Derivation) -> SparseVec {
        let gens = self.gens();
        let mut out = SparseVec::new();
        for (&(i, j), &start) in &self.offsets {
            if let Some(basis) = self.bases.get(i + 1, gens.degree(j) + self.n) {
                let part = d.image(j).weight_part(i + 1);
                basis.sparse_coordinates(&part, start, &mut out);
            }
        }
        out
    }
}

/// A requested weight range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightWindow {
    Single(usize),
    Range(usize, usize),
    /// Everything that is stable at the current truncation.
    Stable,
}

/// Homology of `Der_n` in one weight.
#[derive(Clone, Debug)]
pub struct HomologyBlock {
    pub n: i64,
    pub weight: usize,
    pub dim: usize,
    pub chain_dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
    pub representatives: Vec<Derivation>,
    src: DerSpace,
    inc: DerSpace,
    quotient: Quotient,
    solver: Solver,
    lower: Vec<usize>,
}

impl HomologyBlock {
    /// Class coordinates of a weight-`weight` cycle in the representative basis.
    pub fn coords(&self, d: &Derivation) -> Option<Vec<Scalar>> {
        let v = self.src.coords(&d.weight_part(self.weight));
        self.quotient.coords(&v)
    }

    /// Canonical `P` in `Der_{n+1}` with `ad(δ)(P) = d` up to weight `weight`,
    /// if one exists.
    pub fn solve_boundary(&self, d: &Derivation) -> Option<Derivation> {
        let mut v = self.src.coords(d);
        v.retain(|k, _| self.lower.binary_search(k).is_ok());
        self.solver.solve(&v).map(|p| self.inc.combination(&p))
    }
}

#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub n: i64,
    pub trunc: usize,
    pub graded: bool,
    pub stable_max_weight: Option<usize>,
    pub blocks: Vec<HomologyBlock>,
}

impl HomologyReport {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }
}

/// The complex `(Der, ad δ)` for a fixed Chen differential.
#[derive(Clone, Debug)]
pub struct DerivationComplex {
    delta: ChenDifferential,
    bases: Arc<LieBases>,
    /// Weight shift of `ad δ` when δ has a single image weight.
    shift: Option<usize>,
    max_image_weight: usize,
    /// Memoized single-weight blocks; the complex itself never changes.
    memo: Arc<Mutex<BTreeMap<(i64, usize), HomologyBlock>>>,
}

impl DerivationComplex {
    pub fn new(delta: ChenDifferential) -> Self {
        let bases = Arc::new(LieBases::new(delta.gens(), delta.trunc()));
        let ws = delta.image_weights();
        let shift = match ws.as_slice() {
            [] => Some(0),
            [m] => Some(m - 1),
            _ => None,
        };
        let max_image_weight = ws.last().copied().unwrap_or(1);
        DerivationComplex { delta, bases, shift, max_image_weight, memo: Arc::default() }
    }

    pub fn delta(&self) -> &ChenDifferential {
        &self.delta
    }

    pub fn bases(&self) -> &Arc<LieBases> {
        &self.bases
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.delta.trunc()
    }

    pub fn is_graded(&self) -> bool {
        self.shift.is_some()
    }

    /// Smallest truncation at which derivation weight `i` is stable.
    pub fn required_trunc(&self, i: usize) -> usize {
        i + self.max_image_weight
    }

    /// Largest stable derivation weight, if any.
    pub fn stable_max_weight(&self) -> Option<usize> {
        self.trunc().n().checked_sub(self.max_image_weight)
    }

    pub fn space(&self, n: i64, weights: &[usize]) -> DerSpace {
        DerSpace::new(&self.bases, n, weights)
    }

    fn all_weights(&self) -> Vec<usize> {
        (0..self.trunc().n()).collect()
    }

    fn window(&self, window: WeightWindow) -> Result<Vec<usize>> {
        let (lo, hi) = match window {
            WeightWindow::Single(i) => (i, i),
            WeightWindow::Range(a, b) if a <= b => (a, b),
            WeightWindow::Range(..) => {
                return Err(Error::InvalidInput("empty weight window".into()));
            }
            WeightWindow::Stable => match self.stable_max_weight() {
                Some(s) => (0, s),
                None => {
                    return Err(Error::UnstableWindow {
                        trunc: self.trunc().n(),
                        required: self.required_trunc(0),
                    })
                }
            },
        };
        if self.stable_max_weight().map_or(true, |s| hi > s) {
            return Err(Error::UnstableWindow { trunc: self.trunc().n(), required: self.required_trunc(hi) });
        }
        Ok((lo..=hi).collect())
    }

    pub fn homology(&self, n: i64, window: WeightWindow) -> Result<HomologyReport> {
        let weights = self.window(window)?;
        let blocks = match self.shift {
            Some(r) => weights
                .iter()
                .map(|&i| {
                    let src = self.space(n, &[i]);
                    let tgt = self.space(n - 1, &[i + r]);
                    let inc = if i >= r { self.space(n + 1, &[i - r]) } else { self.space(n + 1, &[]) };
                    self.blocks(n, &[i], src, tgt, inc).pop().expect("one block")
                })
                .collect(),
            None => {
                let all = self.all_weights();
                let src = self.space(n, &all);
                let tgt = self.space(n - 1, &all);
                let inc = self.space(n + 1, &all);
                self.blocks(n, &weights, src, tgt, inc)
            }
        };
        Ok(HomologyReport {
            n,
            trunc: self.trunc().n(),
            graded: self.is_graded(),
            stable_max_weight: self.stable_max_weight(),
            blocks,
        })
    }

    pub fn block(&self, n: i64, weight: usize) -> Result<HomologyBlock> {
        if let Some(b) = self.memo.lock().expect("memo lock").get(&(n, weight)) {
            return Ok(b.clone());
        }
        let b = self.homology(n, WeightWindow::Single(weight))?.blocks.pop().expect("one block");
        self.memo.lock().expect("memo lock").insert((n, weight), b.clone());
        Ok(b)
    }

    fn ad_images(&self, from: &DerSpace, to: &DerSpace) -> Vec<SparseVec> {
        (0..from.dim())
            .map(|k| {
                let img = self.delta.ad(&from.element(k)).expect("same generators");
                to.coords(&img)
            })
            .collect()
    }

    fn blocks(&self, n: i64, weights: &[usize], src: DerSpace, tgt: DerSpace, inc: DerSpace) -> Vec<HomologyBlock> {
        let out_images = self.ad_images(&src, &tgt);
        let in_images = self.ad_images(&inc, &src);
        let weight_of: Vec<usize> = (0..src.dim()).map(|k| src.weight_of(k)).collect();
        level_blocks(&weight_of, &out_images, &in_images, weights)
            .into_iter()
            .map(|b| HomologyBlock {
                n,
                weight: b.weight,
                dim: b.dim,
                chain_dim: b.chain_dim,
                cycles: b.cycles,
                boundaries: b.boundaries,
                representatives: b.reps.iter().map(|v| src.combination(v)).collect(),
                lower: (0..src.dim()).filter(|&k| src.weight_of(k) <= b.weight).collect(),
                src: src.clone(),
                inc: inc.clone(),
                quotient: b.quotient,
                solver: b.solver,
            })
            .collect()
    }
}

/// Convenience wrapper building the complex on the fly.
pub fn derivation_homology(delta: &ChenDifferential, n: i64, window: WeightWindow) -> Result<HomologyReport> {
    DerivationComplex::new(delta.clone()).homology(n, window)
}

/// Result of reducing an automorphism modulo `exp(ad δ (Der_1))`.
#[derive(Clone, Debug)]
pub struct QautClass {
    /// First weight with a nonzero class; `None` when trivial through the
    /// stable range.
    pub level: Option<usize>,
    pub coords: Vec<Scalar>,
    pub representative: FilteredAutomorphism,
    pub checked_through: usize,
    pub corrections: Vec<Derivation>,
}

impl QautClass {
    pub fn is_trivial(&self) -> bool {
        self.level.is_none()
    }
}

pub fn qaut_class(phi: &FilteredAutomorphism, complex: &DerivationComplex) -> Result<QautClass> {
    if !phi.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    if !phi.commutes_with(complex.delta())? {
        return Err(Error::NotAutomorphismOfDifferential);
    }
    let top = complex.stable_max_weight().unwrap_or(0);
    let mut cur = phi.clone();
    let mut corrections = Vec::new();
    for i in 1..=top {
        let d = log_automorphism(&cur)?;
        let lead = d.weight_part(i);
        if lead.is_zero() {
            continue;
        }
        let block = complex.block(0, i)?;
        match block.solve_boundary(&lead) {
            Some(p) => {
                let q = complex.delta().ad(&p)?;
                cur = cur.compose(&exp_derivation(&q.neg())?)?;
                corrections.push(p);
            }
            None => {
                let coords = block.coords(&lead).ok_or_else(|| {
                    Error::InvalidInput(format!("leading term at weight {i} is not a cycle"))
                })?;
                return Ok(QautClass { level: Some(i), coords, representative: cur, checked_through: i, corrections });
            }
        }
    }
    Ok(QautClass { level: None, coords: vec![], representative: cur, checked_through: top, corrections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Word;
    use crate::scalar::int;

    fn n(k: usize) -> WeightTruncation {
        WeightTruncation::new(k).unwrap()
    }

    fn sphere(t: WeightTruncation) -> ChenDifferential {
        let g = GeneratorSet::from_pairs(&[("x", 1)]).unwrap();
        ChenDifferential::zero(&g, t)
    }

    fn surface(genus: usize, t: WeightTruncation) -> ChenDifferential {
        let mut pairs = Vec::new();
        let names: Vec<(String, String)> = (1..=genus).map(|i| (format!("x{i}"), format!("y{i}"))).collect();
        for (x, y) in &names {
            pairs.push((x.as_str(), 0));
            pairs.push((y.as_str(), 0));
        }
        pairs.push(("v", 1));
        let g = GeneratorSet::from_pairs(&pairs).unwrap();
        let mut omega = TensorElement::zero(&g);
        for k in 0..genus {
            let x = TensorElement::generator(&g, 2 * k);
            let y = TensorElement::generator(&g, 2 * k + 1);
            omega = omega.add(&x.bracket(&y, t).unwrap()).unwrap();
        }
        let mut images = vec![TensorElement::zero(&g); g.len()];
        images[2 * genus] = omega;
        ChenDifferential::new(Derivation::new(&g, -1, images, t).unwrap()).unwrap()
    }

    #[test]
    fn sphere_homology() {
        let c = DerivationComplex::new(sphere(n(4)));
        let h1 = c.homology(1, WeightWindow::Stable).unwrap();
        assert_eq!(h1.total_dim(), 1);
        let rep = &h1.blocks[1].representatives[0];
        assert_eq!(rep.image(0).coeff(&Word(vec![0, 0])), int(1));
        assert_eq!(c.homology(2, WeightWindow::Stable).unwrap().total_dim(), 0);
        assert_eq!(c.homology(0, WeightWindow::Stable).unwrap().total_dim(), 1);
    }

    #[test]
    fn surface_genus_two() {
        let c = DerivationComplex::new(surface(2, n(4)));
        let b = c.block(0, 1).unwrap();
        assert_eq!(b.dim, 4);
        assert!(c.block(0, 3).is_err());
    }

    #[test]
    fn ad_delta_squares_to_zero() {
        let delta = surface(2, n(4));
        let c = DerivationComplex::new(delta.clone());
        let sp = c.space(1, &[0, 1]);
        for k in 0..sp.dim() {
            let e = sp.element(k);
            let twice = delta.ad(&delta.ad(&e).unwrap()).unwrap();
            assert!(twice.is_zero());
        }
    }

    #[test]
    fn zero_delta_homology_is_everything() {
        let g = GeneratorSet::from_pairs(&[("a", 0), ("b", 1)]).unwrap();
        let delta = ChenDifferential::zero(&g, n(4));
        let c = DerivationComplex::new(delta);
        for deg in -1..=2 {
            let r = c.homology(deg, WeightWindow::Stable).unwrap();
            for b in &r.blocks {
                assert_eq!(b.dim, b.chain_dim);
            }
        }
    }

    #[test]
    fn qaut_of_representative() {
        let delta = surface(2, n(4));
        let c = DerivationComplex::new(delta);
        let b = c.block(0, 1).unwrap();
        for (k, rep) in b.representatives.iter().enumerate() {
            let phi = exp_derivation(rep).unwrap();
            let q = qaut_class(&phi, &c).unwrap();
            assert_eq!(q.level, Some(1));
            for (j, x) in q.coords.iter().enumerate() {
                assert_eq!(*x, if j == k { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn qaut_of_inner_is_trivial() {
        let delta = surface(2, n(4));
        let c = DerivationComplex::new(delta.clone());
        let sp = c.space(1, &[1]);
        let mut p = SparseVec::new();
        p.insert(0, int(1));
        p.insert(sp.dim() - 1, int(-2));
        let q = delta.ad(&sp.combination(&p)).unwrap();
        let phi = exp_derivation(&q).unwrap();
        assert!(qaut_class(&phi, &c).unwrap().is_trivial());
    }
}
