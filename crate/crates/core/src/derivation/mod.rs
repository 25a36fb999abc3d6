//! Derivations of the truncated free Lie algebra, Chen differentials, the
//! exp/log group layer and derivation homology.

mod group;
mod homology;

pub use group::{bch, exp_derivation, log_automorphism, FilteredAutomorphism, LinearIso};
pub use homology::{
    derivation_homology, qaut_class, DerSpace, DerivationComplex, HomologyBlock, HomologyReport,
    QautClass, WeightWindow,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{koszul, same_gens, GeneratorSet, TensorElement, WeightTruncation, Word};
use crate::scalar::{format_scalar, sign, Scalar};

/// A derivation of homological degree `n`, stored by its generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    gens: Arc<GeneratorSet>,
    degree: i64,
    images: Vec<TensorElement>,
    trunc: WeightTruncation,
}

impl Derivation {
    /// `images[i]` is the image of generator `i`. Images are truncated and
    /// must be homogeneous Lie elements of degree `|x_i| + degree`.
    pub fn new(
        gens: &Arc<GeneratorSet>,
        degree: i64,
        images: Vec<TensorElement>,
        trunc: WeightTruncation,
    ) -> Result<Self> {
        if images.len() != gens.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator images, got {}",
                gens.len(),
                images.len()
            )));
        }
        let mut out = Vec::with_capacity(images.len());
        for (i, img) in images.into_iter().enumerate() {
            if !same_gens(img.gens(), gens) {
                return Err(Error::MismatchedGenerators);
            }
            let img = img.truncate(trunc);
            let want = gens.degree(i) + degree;
            if !img.is_homogeneous_of_degree(want) {
                return Err(Error::InvalidInput(format!(
                    "image of `{}` is not homogeneous of degree {want}",
                    gens.name(i)
                )));
            }
            if img.terms().contains_key(&Word::empty()) {
                return Err(Error::InvalidInput(format!(
                    "image of `{}` has a constant term",
                    gens.name(i)
                )));
            }
            if !img.is_primitive() {
                return Err(Error::InvalidInput(format!(
                    "image of `{}` is not a Lie element",
                    gens.name(i)
                )));
            }
            out.push(img);
        }
        Ok(Derivation { gens: gens.clone(), degree, images: out, trunc })
    }

    /// Images keyed by generator name; missing generators map to zero.
    pub fn from_named(
        gens: &Arc<GeneratorSet>,
        degree: i64,
        named: BTreeMap<String, TensorElement>,
        trunc: WeightTruncation,
    ) -> Result<Self> {
        let mut images = vec![TensorElement::zero(gens); gens.len()];
        for (name, img) in named {
            images[gens.index_of(&name)?] = img;
        }
        Self::new(gens, degree, images, trunc)
    }

    pub(crate) fn new_unchecked(
        gens: &Arc<GeneratorSet>,
        degree: i64,
        images: Vec<TensorElement>,
        trunc: WeightTruncation,
    ) -> Self {
        let images = images.into_iter().map(|t| t.truncate(trunc)).collect();
        Derivation { gens: gens.clone(), degree, images, trunc }
    }

    pub fn zero(gens: &Arc<GeneratorSet>, degree: i64, trunc: WeightTruncation) -> Self {
        Derivation {
            gens: gens.clone(),
            degree,
            images: vec![TensorElement::zero(gens); gens.len()],
            trunc,
        }
    }

    /// The derivation sending generator `i` to `image` and the rest to 0.
    pub fn single(
        gens: &Arc<GeneratorSet>,
        i: usize,
        image: TensorElement,
        trunc: WeightTruncation,
    ) -> Result<Self> {
        let degree = image
            .homogeneous_degree()
            .ok_or_else(|| Error::InvalidInput("image must be nonzero and homogeneous".into()))?
            - gens.degree(i);
        let mut images = vec![TensorElement::zero(gens); gens.len()];
        images[i] = image;
        Self::new(gens, degree, images, trunc)
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.trunc
    }

    pub fn image(&self, i: usize) -> &TensorElement {
        &self.images[i]
    }

    pub fn images(&self) -> &[TensorElement] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(TensorElement::is_zero)
    }

    fn check(&self, other: &Derivation) -> Result<()> {
        if !same_gens(&self.gens, &other.gens) {
            return Err(Error::MismatchedGenerators);
        }
        if self.trunc != other.trunc {
            return Err(Error::InvalidInput("derivations use different truncations".into()));
        }
        Ok(())
    }

    /// Leibniz extension: `D(ab) = D(a)b + (-1)^{n|a|} a D(b)`.
    pub fn apply(&self, a: &TensorElement) -> Result<TensorElement> {
        if !same_gens(a.gens(), &self.gens) {
            return Err(Error::MismatchedGenerators);
        }
        let n = self.trunc.n();
        let mut out = TensorElement::zero(&self.gens);
        for (w, c) in a.terms() {
            let mut prefix_deg = 0i64;
            for p in 0..w.len() {
                let g = w.0[p] as usize;
                let img = &self.images[g];
                if !img.is_zero() {
                    let s = sign(koszul(self.degree, prefix_deg)) * c;
                    for (u, d) in img.terms() {
                        if w.len() - 1 + u.len() > n {
                            continue;
                        }
                        let mut word = Vec::with_capacity(w.len() - 1 + u.len());
                        word.extend_from_slice(&w.0[..p]);
                        word.extend_from_slice(&u.0);
                        word.extend_from_slice(&w.0[p + 1..]);
                        out.add_term(Word(word), &s * d);
                    }
                }
                prefix_deg += self.gens.degree(g);
            }
        }
        Ok(out)
    }

    /// `[D1, D2] = D1 D2 - (-1)^{n1 n2} D2 D1`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.check(other)?;
        let s = -sign(koszul(self.degree, other.degree));
        let mut images = Vec::with_capacity(self.images.len());
        for i in 0..self.images.len() {
            let mut img = self.apply(&other.images[i])?;
            img.add_scaled(&s, &other.apply(&self.images[i])?)?;
            images.push(img);
        }
        Ok(Derivation {
            gens: self.gens.clone(),
            degree: self.degree + other.degree,
            images,
            trunc: self.trunc,
        })
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation> {
        self.add_scaled(&Scalar::from_integer(1.into()), other)
    }

    pub fn sub(&self, other: &Derivation) -> Result<Derivation> {
        self.add_scaled(&Scalar::from_integer((-1).into()), other)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Scalar, other: &Derivation) -> Result<Derivation> {
        self.check(other)?;
        if self.degree != other.degree && !other.is_zero() && !self.is_zero() {
            return Err(Error::InvalidInput("cannot add derivations of different degrees".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut images = self.images.clone();
        for (a, b) in images.iter_mut().zip(&other.images) {
            a.add_scaled(c, b)?;
        }
        Ok(Derivation { gens: self.gens.clone(), degree, images, trunc: self.trunc })
    }

    pub fn scale(&self, c: &Scalar) -> Derivation {
        Derivation {
            gens: self.gens.clone(),
            degree: self.degree,
            images: self.images.iter().map(|t| t.scale(c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn neg(&self) -> Derivation {
        self.scale(&Scalar::from_integer((-1).into()))
    }

    /// The weight-`i` part: images restricted to word length `i + 1`.
    pub fn weight_part(&self, i: usize) -> Derivation {
        Derivation {
            gens: self.gens.clone(),
            degree: self.degree,
            images: self.images.iter().map(|t| t.weight_part(i + 1)).collect(),
            trunc: self.trunc,
        }
    }

    /// Derivation weights present (image word length minus one).
    pub fn weights(&self) -> Vec<usize> {
        let mut ws: Vec<usize> = self
            .images
            .iter()
            .flat_map(|t| t.weights())
            .map(|w| w.saturating_sub(1))
            .collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    pub fn min_weight(&self) -> Option<usize> {
        self.weights().first().copied()
    }

    /// Equality after both sides are cut at the same truncation.
    pub fn same_as(&self, other: &Derivation) -> bool {
        same_gens(&self.gens, &other.gens)
            && (self.degree == other.degree || (self.is_zero() && other.is_zero()))
            && self.images == other.images
    }

    /// One line per nonzero generator image.
    pub fn display(&self) -> String {
        let mut lines = Vec::new();
        for (i, t) in self.images.iter().enumerate() {
            if !t.is_zero() {
                lines.push(format!("{} -> {}", self.gens.name(i), t.display()));
            }
        }
        if lines.is_empty() {
            "0".into()
        } else {
            lines.join("; ")
        }
    }
}

/// Outcome of [`check_chen_differential`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChenCheck {
    pub passed: bool,
    pub degree_ok: bool,
    pub weight_ok: bool,
    pub square_zero_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<ChenFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChenFailure {
    pub check: String,
    pub generator: String,
    pub word: Vec<String>,
    pub coeff: String,
}

/// Checks degree -1, image weight >= 2 and `δ∘δ = 0` modulo weight > N.
pub fn check_chen_differential(delta: &Derivation) -> ChenCheck {
    let gens = &delta.gens;
    let mut report = ChenCheck {
        passed: true,
        degree_ok: delta.degree == -1,
        weight_ok: true,
        square_zero_ok: true,
        failure: None,
    };
    if !report.degree_ok {
        report.failure = Some(ChenFailure {
            check: "degree".into(),
            generator: String::new(),
            word: vec![],
            coeff: format!("{}", delta.degree),
        });
    }
    for (i, img) in delta.images.iter().enumerate() {
        if let Some((w, c)) = img.terms().iter().find(|(w, _)| w.len() < 2) {
            report.weight_ok = false;
            if report.failure.is_none() {
                report.failure = Some(ChenFailure {
                    check: "weight".into(),
                    generator: gens.name(i).into(),
                    word: gens.word_names(w),
                    coeff: format_scalar(c),
                });
            }
            break;
        }
    }
    for i in 0..gens.len() {
        let sq = delta.apply(&delta.images[i]).expect("same generator set");
        if let Some((w, c)) = sq.terms().iter().next() {
            report.square_zero_ok = false;
            if report.failure.is_none() {
                report.failure = Some(ChenFailure {
                    check: "square-zero".into(),
                    generator: gens.name(i).into(),
                    word: gens.word_names(w),
                    coeff: format_scalar(c),
                });
            }
            break;
        }
    }
    report.passed = report.degree_ok && report.weight_ok && report.square_zero_ok;
    report
}

/// A derivation that has passed [`check_chen_differential`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChenDifferential(Derivation);

impl ChenDifferential {
    pub fn new(d: Derivation) -> Result<Self> {
        let r = check_chen_differential(&d);
        if r.passed {
            Ok(ChenDifferential(d))
        } else {
            let f = r.failure.expect("failed check names its failure");
            Err(Error::InvalidDifferential(format!(
                "{} check fails at generator `{}` (word {:?}, coefficient {})",
                f.check, f.generator, f.word, f.coeff
            )))
        }
    }

    pub fn zero(gens: &Arc<GeneratorSet>, trunc: WeightTruncation) -> Self {
        ChenDifferential(Derivation::zero(gens, -1, trunc))
    }

    pub fn as_derivation(&self) -> &Derivation {
        &self.0
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.0.gens
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.0.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `ad(δ)(D) = [δ, D]`.
    pub fn ad(&self, d: &Derivation) -> Result<Derivation> {
        self.0.bracket(d)
    }

    /// Image word lengths occurring in δ.
    pub fn image_weights(&self) -> Vec<usize> {
        let mut ws: Vec<usize> = self.0.images.iter().flat_map(|t| t.weights()).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn n(k: usize) -> WeightTruncation {
        WeightTruncation::new(k).unwrap()
    }

    fn gen(g: &Arc<GeneratorSet>, name: &str) -> TensorElement {
        TensorElement::generator(g, g.index_of(name).unwrap())
    }

    fn surface_g1() -> (Arc<GeneratorSet>, ChenDifferential) {
        let g = GeneratorSet::from_pairs(&[("x1", 0), ("y1", 0), ("v", 1)]).unwrap();
        let t = n(4);
        let omega = gen(&g, "x1").bracket(&gen(&g, "y1"), t).unwrap();
        let mut m = BTreeMap::new();
        m.insert("v".to_string(), omega);
        let d = Derivation::from_named(&g, -1, m, t).unwrap();
        (g, ChenDifferential::new(d).unwrap())
    }

    #[test]
    fn sphere_derivation_applies() {
        let g = GeneratorSet::from_pairs(&[("x", 1)]).unwrap();
        let t = n(4);
        let x = gen(&g, "x");
        let xx = x.bracket(&x, t).unwrap();
        let d = Derivation::single(&g, 0, xx.clone(), t).unwrap();
        assert_eq!(d.degree(), 1);
        assert_eq!(d.apply(&x).unwrap(), xx);
        assert!(Derivation::zero(&g, 1, t).apply(&xx).unwrap().is_zero());
    }

    #[test]
    fn leibniz_on_bracket_with_v() {
        let (g, delta) = surface_g1();
        let t = n(4);
        let v = gen(&g, "v");
        let x = gen(&g, "x1");
        let lhs = delta.as_derivation().apply(&v.bracket(&x, t).unwrap()).unwrap();
        let omega = delta.as_derivation().image(2).clone();
        assert_eq!(lhs, omega.bracket(&x, t).unwrap());
    }

    #[test]
    fn ad_delta_of_x_to_v() {
        // D = x1 ∂/∂v has degree -1; [δ, D](v) = δ(x1) + D(ω) = 0 since D kills x1, y1,
        // and [δ, D] vanishes on x1, y1 because D(x1) = 0 and δ(x1) = 0.
        let (g, delta) = surface_g1();
        let t = n(4);
        let d = Derivation::single(&g, 2, gen(&g, "x1"), t).unwrap();
        let ad = delta.ad(&d).unwrap();
        // Hand expansion: [δ,D](v) = δ(D v) - (-1)^{(-1)(-1)} D(δ v) = δ(x1) + D(ω) = 0.
        assert!(ad.is_zero());
        // With E = x1 ∂/∂x1 (degree 0): [δ,E](v) = -E(ω) = -[x1, y1].
        let e = Derivation::single(&g, 0, gen(&g, "x1"), t).unwrap();
        let ad = delta.ad(&e).unwrap();
        let omega = delta.as_derivation().image(2).clone();
        assert_eq!(ad.image(2), &omega.neg());
    }

    #[test]
    fn chen_checks() {
        let (_, delta) = surface_g1();
        assert!(check_chen_differential(delta.as_derivation()).passed);
        let g = GeneratorSet::from_pairs(&[("x1", 0), ("v", 1)]).unwrap();
        let t = n(4);
        let bad = Derivation::single(&g, 1, gen(&g, "x1"), t).unwrap();
        let r = check_chen_differential(&bad);
        assert!(!r.passed && !r.weight_ok);
        assert!(ChenDifferential::new(bad).is_err());
        // [x1, x1] with |x1| = 0 is zero, so this is accepted as δ = 0.
        let x = gen(&g, "x1");
        let z = x.bracket(&x, t).unwrap();
        let mut m = BTreeMap::new();
        m.insert("v".to_string(), z);
        let d = Derivation::from_named(&g, -1, m, t).unwrap();
        assert!(check_chen_differential(&d).passed);
    }

    #[test]
    fn non_lie_images_rejected() {
        let g = GeneratorSet::from_pairs(&[("x", 0), ("y", 0)]).unwrap();
        let t = n(4);
        let xy = gen(&g, "x").concat(&gen(&g, "y"), t).unwrap();
        assert!(Derivation::single(&g, 0, xy, t).is_err());
    }

    #[test]
    fn even_self_bracket_vanishes() {
        let g = GeneratorSet::from_pairs(&[("x", 0), ("y", 0)]).unwrap();
        let t = n(4);
        let d = Derivation::single(&g, 0, gen(&g, "x").bracket(&gen(&g, "y"), t).unwrap(), t).unwrap();
        assert!(d.bracket(&d).unwrap().is_zero());
    }

    fn arb_derivation(g: Arc<GeneratorSet>, t: WeightTruncation) -> impl Strategy<Value = Derivation> {
        // degree-0 derivations of weight 1 or 2 on generators (a:0, b:0, c:1)
        prop::collection::vec((-2i64..3, -2i64..3, -2i64..3), 3).prop_map(move |cs| {
            let a = TensorElement::generator(&g, 0);
            let b = TensorElement::generator(&g, 1);
            let c = TensorElement::generator(&g, 2);
            let ab = a.bracket(&b, t).unwrap();
            let ac = a.bracket(&c, t).unwrap();
            let aab = a.bracket(&ab, t).unwrap();
            let bc = b.bracket(&c, t).unwrap();
            let imgs = vec![
                ab.scale(&int(cs[0].0)).add(&aab.scale(&int(cs[0].1))).unwrap(),
                aab.scale(&int(cs[1].0)).add(&ab.scale(&int(cs[1].2))).unwrap(),
                ac.scale(&int(cs[2].0)).add(&bc.scale(&int(cs[2].1))).unwrap(),
            ];
            Derivation::new(&g, 0, imgs, t).unwrap()
        })
    }

    proptest! {
        #[test]
        fn derivation_jacobi(
            (d1, d2, d3) in {
                let g = GeneratorSet::from_pairs(&[("a", 0), ("b", 0), ("c", 1)]).unwrap();
                let t = n(5);
                (arb_derivation(g.clone(), t), arb_derivation(g.clone(), t), arb_derivation(g, t))
            }
        ) {
            let lhs = d1.bracket(&d2.bracket(&d3).unwrap()).unwrap();
            let r1 = d1.bracket(&d2).unwrap().bracket(&d3).unwrap();
            let r2 = d2.bracket(&d1.bracket(&d3).unwrap()).unwrap();
            prop_assert!(lhs.same_as(&r1.add(&r2).unwrap()));
            let anti = d1.bracket(&d2).unwrap().add(&d2.bracket(&d1).unwrap()).unwrap();
            prop_assert!(anti.is_zero());
        }
    }
}
