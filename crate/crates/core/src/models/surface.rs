use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::derivation::{
    exp_derivation, qaut_class, ChenDifferential, DerSpace, Derivation, DerivationComplex, FilteredAutomorphism,
    LinearIso,
};
use crate::error::{Error, Result};
use crate::lie::{lie_component_basis, GeneratorSet, TensorElement, WeightTruncation};
use crate::linalg::{rank, Matrix, Solver, SparseVec};
use crate::random::{random_derivation, random_vector};
use crate::scalar::{format_scalar, int, Scalar};
use crate::simplicial::{local_cohomology, stepwise_obstruction, FiniteSimplicialSet, FilteredGroupLocalSystem, GroupCochain};

/// `W_0 = <x1, y1, ..., xg, yg>` in degree 0, `W_1 = <v>`, `δv = ω`.
#[derive(Clone, Debug)]
pub struct SurfaceModel {
    genus: usize,
    omega: TensorElement,
    complex: Arc<DerivationComplex>,
}

impl SurfaceModel {
    pub fn new(genus: usize, trunc: WeightTruncation) -> Result<Self> {
        if genus < 2 {
            return Err(Error::GenusTooSmall(genus));
        }
        let names: Vec<(String, String)> = (1..=genus).map(|i| (format!("x{i}"), format!("y{i}"))).collect();
        let mut pairs: Vec<(&str, i64)> = Vec::new();
        for (x, y) in &names {
            pairs.push((x, 0));
            pairs.push((y, 0));
        }
        pairs.push(("v", 1));
        let gens = GeneratorSet::from_pairs(&pairs)?;
        let mut omega = TensorElement::zero(&gens);
        for i in 0..genus {
            let x = TensorElement::generator(&gens, 2 * i);
            let y = TensorElement::generator(&gens, 2 * i + 1);
            omega = omega.add(&x.bracket(&y, trunc)?)?;
        }
        let mut images = vec![TensorElement::zero(&gens); gens.len()];
        images[2 * genus] = omega.clone();
        let delta = ChenDifferential::new(Derivation::new(&gens, -1, images, trunc)?)?;
        Ok(SurfaceModel { genus, omega, complex: Arc::new(DerivationComplex::new(delta)) })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        self.complex.delta().gens()
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.complex.trunc()
    }

    pub fn delta(&self) -> &ChenDifferential {
        self.complex.delta()
    }

    pub fn complex(&self) -> &Arc<DerivationComplex> {
        &self.complex
    }

    pub fn omega(&self) -> &TensorElement {
        &self.omega
    }

    pub fn v(&self) -> usize {
        2 * self.genus
    }

    /// The automorphism acting by `t` on `W_0` and fixing `v`; `t` must
    /// preserve the intersection form.
    pub fn symplectic_iso(&self, t: &Matrix) -> Result<LinearIso> {
        let q = 2 * self.genus;
        if t.rows != q || t.cols != q {
            return Err(Error::InvalidInput(format!("symplectic matrix must be {q}x{q}")));
        }
        let j = intersection_form(self.genus);
        if t.transpose().mul(&j)?.mul(t)? != j {
            return Err(Error::InvalidInput("matrix does not preserve the intersection form".into()));
        }
        let mut m = Matrix::identity(q + 1);
        for r in 0..q {
            for c in 0..q {
                m.set(r, c, t.get(r, c).clone());
            }
        }
        LinearIso::new(self.gens(), m)
    }
}

/// `J[a][b] = <e_a, e_b>` with `<x_i, y_i> = 1`.
pub fn intersection_form(genus: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * genus, 2 * genus);
    for i in 0..genus {
        j.set(2 * i, 2 * i + 1, int(1));
        j.set(2 * i + 1, 2 * i, int(-1));
    }
    j
}

/// Triples `a < b < c` in lexicographic order.
pub fn wedge_basis(q: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..q {
        for b in a + 1..q {
            for c in b + 1..q {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn binomial3(q: usize) -> usize {
    if q < 3 {
        0
    } else {
        q * (q - 1) * (q - 2) / 6
    }
}

/// The identification `Λ^3 W_0 ≅ 𝓗_0^1(δ)`, as matrices in the wedge basis
/// and the representative basis of the homology block.
#[derive(Clone, Debug)]
pub struct MoritaIso {
    pub genus: usize,
    pub wedges: Vec<[usize; 3]>,
    /// Columns are the classes of the wedge basis.
    pub from_wedge: Matrix,
    pub to_wedge: Matrix,
}

impl MoritaIso {
    /// `D(z) = <z,a>[b,c] + <z,b>[c,a] + <z,c>[a,b]` on `W_0`, extended to
    /// `v` by solving `ad(δ)(D) = 0`.
    pub fn wedge_derivation(model: &SurfaceModel, [a, b, c]: [usize; 3]) -> Result<Derivation> {
        let gens = model.gens();
        let t = model.trunc();
        let j = intersection_form(model.genus);
        let e = |i| TensorElement::generator(gens, i);
        let bc = e(b).bracket(&e(c), t)?;
        let ca = e(c).bracket(&e(a), t)?;
        let ab = e(a).bracket(&e(b), t)?;
        let mut images = vec![TensorElement::zero(gens); gens.len()];
        for (z, img) in images.iter_mut().enumerate().take(2 * model.genus) {
            for (w, br) in [(a, &bc), (b, &ca), (c, &ab)] {
                let p = j.get(z, w);
                if !p.is_zero() {
                    img.add_scaled(p, br)?;
                }
            }
        }
        let partial = Derivation::new(gens, 0, images.clone(), t)?;
        // δ(D v) = D(ω) with D v in span{[v, w]}
        let target = partial.apply(model.omega())?;
        let l3 = lie_component_basis(gens, 3, Some(0), t)?;
        let to_vec = |x: &TensorElement| -> SparseVec {
            l3.coordinates(x).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
        };
        let v = model.v();
        let candidates: Vec<TensorElement> =
            (0..2 * model.genus).map(|w| e(v).bracket(&e(w), t)).collect::<Result<_>>()?;
        let images_of: Vec<SparseVec> = candidates
            .iter()
            .map(|u| model.delta().as_derivation().apply(u).map(|x| to_vec(&x)))
            .collect::<Result<_>>()?;
        let sol = Solver::new(&images_of)
            .solve(&to_vec(&target))
            .ok_or_else(|| Error::InvalidInput("wedge derivation does not extend to v".into()))?;
        for (k, x) in sol {
            images[v].add_scaled(&x, &candidates[k])?;
        }
        let d = Derivation::new(gens, 0, images, t)?;
        if !model.delta().ad(&d)?.is_zero() {
            return Err(Error::InvalidInput("wedge derivation is not a cycle".into()));
        }
        Ok(d)
    }

    pub fn new(model: &SurfaceModel) -> Result<Self> {
        let block = model.complex().block(0, 1)?;
        let wedges = wedge_basis(2 * model.genus);
        if block.dim != wedges.len() {
            return Err(Error::InvalidInput(format!(
                "homology has dimension {} but the wedge space has {}",
                block.dim,
                wedges.len()
            )));
        }
        let mut from_wedge = Matrix::zeros(block.dim, wedges.len());
        for (col, &w) in wedges.iter().enumerate() {
            let d = MoritaIso::wedge_derivation(model, w)?;
            let coords = block.coords(&d).ok_or_else(|| Error::InvalidInput("wedge derivation outside homology".into()))?;
            for (row, x) in coords.into_iter().enumerate() {
                from_wedge.set(row, col, x);
            }
        }
        let to_wedge = from_wedge.inverse()?;
        Ok(MoritaIso { genus: model.genus, wedges, from_wedge, to_wedge })
    }

    /// `Λ^3 t` in the wedge basis.
    pub fn wedge_action(&self, t: &Matrix) -> Matrix {
        let idx = |mut s: [usize; 3]| -> Option<(usize, Scalar)> {
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return None;
            }
            let mut sign = Scalar::one();
            for i in 0..3 {
                for j in 0..2 - i {
                    if s[j] > s[j + 1] {
                        s.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            self.wedges.iter().position(|w| *w == s).map(|p| (p, sign))
        };
        let q = 2 * self.genus;
        let mut m = Matrix::zeros(self.wedges.len(), self.wedges.len());
        for (col, &[a, b, c]) in self.wedges.iter().enumerate() {
            for p in 0..q {
                let tp = t.get(p, a);
                if tp.is_zero() {
                    continue;
                }
                for r in 0..q {
                    let tr = t.get(r, b);
                    if tr.is_zero() {
                        continue;
                    }
                    for s in 0..q {
                        let ts = t.get(s, c);
                        if ts.is_zero() {
                            continue;
                        }
                        if let Some((row, sign)) = idx([p, r, s]) {
                            let cur = m.get(row, col).clone();
                            m.set(row, col, cur + sign * tp * tr * ts);
                        }
                    }
                }
            }
        }
        m
    }

    /// The conjugation action of a symplectic `t` on `𝓗_0^1(δ)`.
    pub fn homology_action(model: &SurfaceModel, t: &Matrix) -> Result<Matrix> {
        let iso = model.symplectic_iso(t)?;
        let block = model.complex().block(0, 1)?;
        let mut m = Matrix::zeros(block.dim, block.dim);
        for (col, rep) in block.representatives.iter().enumerate() {
            let moved = iso.transport_derivation(rep)?;
            let coords = block.coords(&moved).ok_or_else(|| Error::InvalidInput("action leaves homology".into()))?;
            for (row, x) in coords.into_iter().enumerate() {
                m.set(row, col, x);
            }
        }
        Ok(m)
    }

    /// `from_wedge ∘ Λ^3 t = ρ(t) ∘ from_wedge`.
    pub fn is_equivariant(&self, model: &SurfaceModel, t: &Matrix) -> Result<bool> {
        let lhs = self.from_wedge.mul(&self.wedge_action(t))?;
        let rhs = MoritaIso::homology_action(model, t)?.mul(&self.from_wedge)?;
        Ok(lhs == rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub bracket_rank: usize,
    pub image_rank: usize,
    pub union_rank: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceH01 {
    pub genus: usize,
    pub trunc: usize,
    pub expected: usize,
    pub homology_dim: usize,
    pub quotient_dim: usize,
    pub lemma: LemmaCheck,
    #[serde(skip)]
    pub morita: MoritaIso,
}

/// `dim Der^1(L W_0 / (ω))` by brute force on `W_0` alone: maps
/// `W_0 -> L_2` whose induced value on `ω` lies in `[W_0, ω]`, modulo the
/// maps into `ℝω`.
pub fn quotient_derivation_dim(genus: usize) -> Result<usize> {
    let q = 2 * genus;
    let t = WeightTruncation::new(3)?;
    let gens = GeneratorSet::uniform(q, 0)?;
    let e = |i| TensorElement::generator(&gens, i);
    let mut omega = TensorElement::zero(&gens);
    for i in 0..genus {
        omega = omega.add(&e(2 * i).bracket(&e(2 * i + 1), t)?)?;
    }
    let l2 = lie_component_basis(&gens, 2, Some(0), t)?;
    let l3 = lie_component_basis(&gens, 3, Some(0), t)?;
    let to_vec = |x: &TensorElement| -> SparseVec {
        l3.coordinates(x).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    };
    // the ideal generated by ω in weight 3
    let ideal: Vec<SparseVec> = (0..q).map(|w| e(w).bracket(&omega, t).map(|x| to_vec(&x))).collect::<Result<_>>()?;
    let ideal_rank = rank(&ideal);
    let mut columns = Vec::new();
    for j in 0..q {
        for b in l2.elements() {
            let d = Derivation::single(&gens, j, b.as_tensor().clone(), t)?;
            columns.push(to_vec(&d.apply(&omega)?));
        }
    }
    // kernel of Hom(W_0, L_2) -> L_3 / [W_0, ω]
    let mut all = ideal.clone();
    all.extend(columns.iter().cloned());
    let image_rank = rank(&all) - ideal_rank;
    let kernel = columns.len() - image_rank;
    Ok(kernel - q)
}

/// `[v, W_0]` and `{P(ω)}` for `P` in `Der_1` of weight 0 span the same
/// subspace of `L_2`.
pub fn lemma_check(model: &SurfaceModel) -> Result<LemmaCheck> {
    let gens = model.gens();
    let t = model.trunc();
    let l2 = lie_component_basis(gens, 2, Some(1), t)?;
    let to_vec = |x: &TensorElement| -> SparseVec {
        l2.coordinates(x).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    };
    let e = |i| TensorElement::generator(gens, i);
    let brackets: Vec<SparseVec> =
        (0..2 * model.genus).map(|w| e(model.v()).bracket(&e(w), t).map(|x| to_vec(&x))).collect::<Result<_>>()?;
    let sp = DerSpace::new(model.complex().bases(), 1, &[0]);
    let images: Vec<SparseVec> =
        (0..sp.dim()).map(|k| sp.element(k).apply(model.omega()).map(|x| to_vec(&x))).collect::<Result<_>>()?;
    let bracket_rank = rank(&brackets);
    let image_rank = rank(&images);
    let mut both = brackets.clone();
    both.extend(images);
    let union_rank = rank(&both);
    Ok(LemmaCheck {
        bracket_rank,
        image_rank,
        union_rank,
        holds: bracket_rank == union_rank && image_rank == union_rank,
    })
}

pub fn surface_h01(model: &SurfaceModel) -> Result<SurfaceH01> {
    if model.trunc().n() < 3 {
        return Err(Error::UnstableWindow { trunc: model.trunc().n(), required: 3 });
    }
    let block = model.complex().block(0, 1)?;
    let quotient_dim = quotient_derivation_dim(model.genus)?;
    let lemma = lemma_check(model)?;
    let morita = MoritaIso::new(model)?;
    Ok(SurfaceH01 {
        genus: model.genus,
        trunc: model.trunc().n(),
        expected: binomial3(2 * model.genus),
        homology_dim: block.dim,
        quotient_dim,
        lemma,
        morita,
    })
}

/// `τ_1(φ)` in the wedge basis: the level-1 class of `φ` in `QAut(δ)`.
pub fn johnson_tau1(phi: &FilteredAutomorphism, model: &SurfaceModel, morita: &MoritaIso) -> Result<Vec<Scalar>> {
    let q = qaut_class(phi, model.complex())?;
    Ok(match q.level {
        Some(1) => morita.to_wedge.apply(&q.coords),
        _ => vec![Scalar::zero(); morita.wedges.len()],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MappingTorusReport {
    pub genus: usize,
    pub trunc: usize,
    pub level: Option<usize>,
    pub checked_through: usize,
    /// Level-1 class in the wedge basis (zero when the class sits higher).
    pub class_wedge: Vec<String>,
    pub tau1: Vec<String>,
    /// `class = -τ_1`.
    pub identity_holds: bool,
}

/// The obstruction of the mapping torus of `φ`: the circle with monodromy
/// `φ` and the group cocycle `c(edge) = φ^{-1}`.
pub fn mapping_torus_obstruction(
    phi: &FilteredAutomorphism,
    model: &SurfaceModel,
    morita: &MoritaIso,
) -> Result<MappingTorusReport> {
    let k = FiniteSimplicialSet::circle();
    let g = FilteredGroupLocalSystem::new(&k, model.complex().clone(), vec![phi.clone()])?;
    let c = GroupCochain { degree: 1, values: vec![phi.inverse()?] };
    let s = stepwise_obstruction(&k, &g, &c)?;
    let mut class = vec![Scalar::zero(); morita.wedges.len()];
    if s.level == Some(1) {
        let ls = g.graded_local_system(&k, 1)?;
        let h = local_cohomology(&k, &ls, 1)?;
        let mut hom = vec![Scalar::zero(); h.representatives.first().map_or(0, |r| r.values[0].len())];
        for (x, rep) in s.coords.iter().zip(&h.representatives) {
            for (acc, y) in hom.iter_mut().zip(&rep.values[0]) {
                *acc += x * y;
            }
        }
        class = morita.to_wedge.apply(&hom);
    }
    let tau = johnson_tau1(phi, model, morita)?;
    let holds = class.iter().zip(&tau).all(|(a, b)| *a == -b.clone());
    Ok(MappingTorusReport {
        genus: model.genus,
        trunc: model.trunc().n(),
        level: s.level,
        checked_through: s.checked_through,
        class_wedge: class.iter().map(format_scalar).collect(),
        tau1: tau.iter().map(format_scalar).collect(),
        identity_holds: holds,
    })
}

/// A random element of `Aut(δ)` in the first filtration level:
/// `exp(D)` with `D` a random cycle (classes of weights 1 and 2 plus an
/// exact part).
pub fn random_monodromy<R: Rng>(rng: &mut R, model: &SurfaceModel) -> Result<FilteredAutomorphism> {
    let complex = model.complex();
    let top = complex.stable_max_weight().unwrap_or(0);
    let mut d = Derivation::zero(model.gens(), 0, model.trunc());
    for i in 1..=top {
        let block = complex.block(0, i)?;
        for (k, x) in random_vector(rng, block.dim, 2) {
            d = d.add_scaled(&x, &block.representatives[k])?;
        }
    }
    let p = random_derivation(rng, complex.bases(), 1, &[1], 2);
    d = d.add(&model.delta().ad(&p)?)?;
    exp_derivation(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_transvection, rng};

    fn model(g: usize) -> SurfaceModel {
        SurfaceModel::new(g, WeightTruncation::new(4).unwrap()).unwrap()
    }

    #[test]
    fn genus_one_rejected() {
        assert_eq!(SurfaceModel::new(1, WeightTruncation::new(4).unwrap()).unwrap_err(), Error::GenusTooSmall(1));
    }

    #[test]
    fn genus_two_dimensions() {
        let m = model(2);
        let r = surface_h01(&m).unwrap();
        assert_eq!((r.expected, r.homology_dim, r.quotient_dim), (4, 4, 4));
        assert!(r.lemma.holds);
        let mut rg = rng(3);
        for _ in 0..5 {
            let t = random_transvection(&mut rg, 2, 0);
            assert!(r.morita.is_equivariant(&m, &t).unwrap());
        }
    }

    #[test]
    fn symplectic_maps_fix_delta() {
        let m = model(2);
        let mut rg = rng(4);
        for _ in 0..3 {
            let t = random_transvection(&mut rg, 2, 0);
            let iso = m.symplectic_iso(&t).unwrap();
            assert_eq!(&iso.transport_differential(m.delta()).unwrap(), m.delta());
        }
    }

    #[test]
    fn tau1_and_mapping_torus() {
        let m = model(2);
        let morita = MoritaIso::new(&m).unwrap();
        let id = FilteredAutomorphism::identity(m.gens(), m.trunc());
        assert!(johnson_tau1(&id, &m, &morita).unwrap().iter().all(Zero::is_zero));
        let r = mapping_torus_obstruction(&id, &m, &morita).unwrap();
        assert_eq!(r.level, None);

        // exp of the first wedge derivation: τ_1 is the first unit vector
        let d = MoritaIso::wedge_derivation(&m, morita.wedges[0]).unwrap();
        let phi = exp_derivation(&d).unwrap();
        let tau = johnson_tau1(&phi, &m, &morita).unwrap();
        let mut unit = vec![Scalar::zero(); 4];
        unit[0] = Scalar::one();
        assert_eq!(tau, unit);
        let r = mapping_torus_obstruction(&phi, &m, &morita).unwrap();
        assert_eq!(r.level, Some(1));
        assert!(r.identity_holds);
        assert_eq!(r.class_wedge[0], "-1/1");

        // inner directions die
        let p = random_derivation(&mut rng(8), m.complex().bases(), 1, &[1], 3);
        let inner = exp_derivation(&m.delta().ad(&p).unwrap()).unwrap();
        assert_eq!(mapping_torus_obstruction(&inner, &m, &morita).unwrap().level, None);
    }

    #[test]
    fn tau1_is_additive() {
        let m = model(2);
        let morita = MoritaIso::new(&m).unwrap();
        let mut rg = rng(10);
        for _ in 0..3 {
            let a = random_monodromy(&mut rg, &m).unwrap();
            let b = random_monodromy(&mut rg, &m).unwrap();
            let ta = johnson_tau1(&a, &m, &morita).unwrap();
            let tb = johnson_tau1(&b, &m, &morita).unwrap();
            let tab = johnson_tau1(&a.compose(&b).unwrap(), &m, &morita).unwrap();
            let sum: Vec<Scalar> = ta.iter().zip(&tb).map(|(x, y)| x + y).collect();
            assert_eq!(tab, sum);
        }
    }
}
