//! Group-valued cochains with coefficients in filtered automorphism groups.
//!
//! Products are composition, `(ab)(x) = a(b(x))`. Vertex groups are the
//! unipotent automorphisms commuting with δ, read modulo
//! `exp(ad δ (Der_1))` when deciding triviality.

use std::sync::Arc;

use num_traits::Zero;

use super::local::{class_reduce, Cochain, LocalSystem};
use super::{FiniteSimplicialSet, Simplex};
use crate::derivation::{exp_derivation, qaut_class, Derivation, DerivationComplex, FilteredAutomorphism};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Edge maps `𝒢(γ)(f) = h_γ f h_γ^{-1}` from the group over `∂_1 γ` to the
/// group over `∂_0 γ`.
#[derive(Clone, Debug)]
pub struct FilteredGroupLocalSystem {
    complex: Arc<DerivationComplex>,
    edges: Vec<FilteredAutomorphism>,
    edge_inverses: Vec<FilteredAutomorphism>,
}

impl FilteredGroupLocalSystem {
    /// Each `h_γ` must commute with δ, and `h_{12} h_{01} = h_{02}` on every
    /// 2-simplex.
    pub fn new(k: &FiniteSimplicialSet, complex: Arc<DerivationComplex>, edges: Vec<FilteredAutomorphism>) -> Result<Self> {
        if edges.len() != k.count(1) {
            return Err(Error::FiberMismatch(format!("{} edge automorphisms for {} edges", edges.len(), k.count(1))));
        }
        let delta = complex.delta();
        let mut edge_inverses = Vec::with_capacity(edges.len());
        for h in &edges {
            if !crate::lie::same_gens(h.gens(), delta.gens()) || h.trunc() != delta.trunc() {
                return Err(Error::MismatchedGenerators);
            }
            if !h.commutes_with(delta)? {
                return Err(Error::NotAutomorphismOfDifferential);
            }
            edge_inverses.push(h.inverse()?);
        }
        let g = FilteredGroupLocalSystem { complex, edges, edge_inverses };
        for s in 0..k.count(2) {
            let fs = k.faces_of(2, s);
            if g.edge(&fs[0]).compose(&g.edge(&fs[2]))? != g.edge(&fs[1]) {
                return Err(Error::InvalidInput(format!("group local system is not functorial on `{}`", k.name(2, s))));
            }
        }
        Ok(g)
    }

    /// Every edge acts by the identity.
    pub fn constant(k: &FiniteSimplicialSet, complex: Arc<DerivationComplex>) -> Self {
        let d = complex.delta();
        let id = FilteredAutomorphism::identity(d.gens(), d.trunc());
        FilteredGroupLocalSystem { complex, edges: vec![id.clone(); k.count(1)], edge_inverses: vec![id; k.count(1)] }
    }

    pub fn complex(&self) -> &Arc<DerivationComplex> {
        &self.complex
    }

    pub fn identity(&self) -> FilteredAutomorphism {
        let d = self.complex.delta();
        FilteredAutomorphism::identity(d.gens(), d.trunc())
    }

    fn edge(&self, e: &Simplex) -> FilteredAutomorphism {
        if e.is_degenerate() {
            self.identity()
        } else {
            self.edges[e.base].clone()
        }
    }

    fn edge_inverse(&self, e: &Simplex) -> FilteredAutomorphism {
        if e.is_degenerate() {
            self.identity()
        } else {
            self.edge_inverses[e.base].clone()
        }
    }

    /// `𝒢(γ)^{-1}(f) = h^{-1} f h`.
    fn pull_back(&self, e: &Simplex, f: &FilteredAutomorphism) -> Result<FilteredAutomorphism> {
        self.edge_inverse(e).compose(f)?.compose(&self.edge(e))
    }

    /// The induced local system on `gr_i`, with fiber `𝓗_0^i(δ)` in the
    /// representative basis of the homology block.
    pub fn graded_local_system(&self, k: &FiniteSimplicialSet, i: usize) -> Result<LocalSystem> {
        let block = self.complex.block(0, i)?;
        let d = block.dim;
        let mut mats = Vec::with_capacity(self.edges.len());
        for h in &self.edges {
            let mut m = Matrix::zeros(d, d);
            for (col, rep) in block.representatives.iter().enumerate() {
                let moved = h.conjugate(rep)?;
                let coords = block
                    .coords(&moved)
                    .ok_or_else(|| Error::InvalidInput("edge action does not preserve cycles".into()))?;
                for (row, x) in coords.into_iter().enumerate() {
                    m.set(row, col, x);
                }
            }
            mats.push(m);
        }
        LocalSystem::new(k, vec![d; k.count(0)], mats)
    }
}

/// One unipotent automorphism per nondegenerate simplex of `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCochain {
    pub degree: usize,
    pub values: Vec<FilteredAutomorphism>,
}

impl GroupCochain {
    pub fn identity(k: &FiniteSimplicialSet, g: &FilteredGroupLocalSystem, degree: usize) -> Self {
        GroupCochain { degree, values: vec![g.identity(); k.count(degree)] }
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().all(FilteredAutomorphism::is_identity)
    }

    fn at(&self, s: &Simplex, g: &FilteredGroupLocalSystem) -> FilteredAutomorphism {
        if s.is_degenerate() {
            g.identity()
        } else {
            self.values[s.base].clone()
        }
    }

    fn check(&self, k: &FiniteSimplicialSet, degree: usize) -> Result<()> {
        if self.degree != degree {
            return Err(Error::InvalidInput(format!("expected a degree-{degree} group cochain, got degree {}", self.degree)));
        }
        if self.values.len() != k.count(degree) {
            return Err(Error::FiberMismatch(format!("{} values for {} simplices", self.values.len(), k.count(degree))));
        }
        if !self.values.iter().all(FilteredAutomorphism::is_unipotent) {
            return Err(Error::NotUnipotent);
        }
        Ok(())
    }
}

/// `(φ(f)c)(γ) = f(∂_1 γ) c(γ) 𝒢(γ)^{-1}(f(∂_0 γ))^{-1}`.
pub fn phi_action(
    k: &FiniteSimplicialSet,
    g: &FilteredGroupLocalSystem,
    f: &GroupCochain,
    c: &GroupCochain,
) -> Result<GroupCochain> {
    f.check(k, 0)?;
    c.check(k, 1)?;
    let mut values = Vec::with_capacity(c.values.len());
    for (e, ce) in c.values.iter().enumerate() {
        let edge = Simplex::nondegenerate(1, e);
        let fs = k.faces_of(1, e);
        let tail = g.pull_back(&edge, &f.values[fs[0].base])?.inverse()?;
        values.push(f.values[fs[1].base].compose(ce)?.compose(&tail)?);
    }
    Ok(GroupCochain { degree: 1, values })
}

/// `(δc)(σ) = 𝒢(∂_2 σ)^{-1}(c(∂_0 σ)) c(∂_1 σ)^{-1} c(∂_2 σ)`.
pub fn nonabelian_delta(k: &FiniteSimplicialSet, g: &FilteredGroupLocalSystem, c: &GroupCochain) -> Result<GroupCochain> {
    c.check(k, 1)?;
    let mut values = Vec::with_capacity(k.count(2));
    for s in 0..k.count(2) {
        let fs = k.faces_of(2, s);
        let a = g.pull_back(&fs[2], &c.at(&fs[0], g))?;
        let b = c.at(&fs[1], g).inverse()?;
        values.push(a.compose(&b)?.compose(&c.at(&fs[2], g))?);
    }
    Ok(GroupCochain { degree: 2, values })
}

/// `(ψ(f)b)(σ) = a b(σ) a^{-1}` with `a = 𝒢(x_01)^{-1}(f(x_1))`, so that
/// `δ(φ(f)c) = ψ(f)(δc)`.
pub fn psi_action(
    k: &FiniteSimplicialSet,
    g: &FilteredGroupLocalSystem,
    f: &GroupCochain,
    b: &GroupCochain,
) -> Result<GroupCochain> {
    f.check(k, 0)?;
    b.check(k, 2)?;
    let mut values = Vec::with_capacity(b.values.len());
    for (s, bs) in b.values.iter().enumerate() {
        let x = Simplex::nondegenerate(2, s);
        let e01 = k.front(&x, 1);
        let a = g.pull_back(&e01, &f.values[k.vertex(&x, 1)])?;
        values.push(a.conjugate_automorphism(bs)?);
    }
    Ok(GroupCochain { degree: 2, values })
}

/// Outcome of the level-by-level reduction of a group 1-cocycle.
#[derive(Clone, Debug)]
pub struct StepwiseObstruction {
    /// First level with a nonzero class; `None` when every stable level
    /// reduces away.
    pub level: Option<usize>,
    /// Coordinates in the basis of `local_cohomology` on the graded system.
    pub coords: Vec<Scalar>,
    pub checked_through: usize,
    /// Accumulated gauge `f` with the reduced cocycle equal to `φ(f)c`.
    pub gauge: GroupCochain,
    pub reduced: GroupCochain,
}

impl StepwiseObstruction {
    pub fn is_trivial(&self) -> bool {
        self.level.is_none()
    }
}

/// Reduce `c` along the weight filtration: at each level the graded class
/// either obstructs or is killed by a gauge transformation.
pub fn stepwise_obstruction(
    k: &FiniteSimplicialSet,
    g: &FilteredGroupLocalSystem,
    c: &GroupCochain,
) -> Result<StepwiseObstruction> {
    c.check(k, 1)?;
    let complex = g.complex();
    for (s, v) in nonabelian_delta(k, g, c)?.values.iter().enumerate() {
        if !qaut_class(v, complex)?.is_trivial() {
            return Err(Error::NotCocycle(k.name(2, s).to_string()));
        }
    }
    let top = complex.stable_max_weight().unwrap_or(0);
    let mut cur = c.clone();
    let mut gauge = GroupCochain::identity(k, g, 0);
    for i in 1..=top {
        let block = complex.block(0, i)?;
        if block.dim == 0 {
            continue;
        }
        let ls = g.graded_local_system(k, i)?;
        let mut a = Cochain::zero(k, &ls, 1);
        for (e, v) in cur.values.iter().enumerate() {
            let q = qaut_class(v, complex)?;
            match q.level {
                Some(j) if j < i => {
                    return Err(Error::InvalidInput(format!("edge `{}` keeps a class at level {j} < {i}", k.name(1, e))));
                }
                Some(j) if j == i => a.values[e] = q.coords,
                _ => {}
            }
        }
        let report = class_reduce(k, &ls, &a)?;
        if !report.is_cocycle {
            return Err(Error::NotCocycle(report.failing_simplex.unwrap_or_default()));
        }
        if !report.is_trivial {
            return Ok(StepwiseObstruction {
                level: Some(i),
                coords: report.coords.unwrap_or_default(),
                checked_through: i,
                gauge,
                reduced: cur,
            });
        }
        let b = report.certificate.expect("trivial degree-1 class has a certificate");
        let mut f = Vec::with_capacity(k.count(0));
        for vals in &b.values {
            let mut d = Derivation::zero(block.representatives[0].gens(), 0, complex.trunc());
            for (rep, x) in block.representatives.iter().zip(vals) {
                if !x.is_zero() {
                    d = d.add_scaled(x, rep)?;
                }
            }
            f.push(exp_derivation(&d)?);
        }
        let f = GroupCochain { degree: 0, values: f };
        cur = phi_action(k, g, &f, &cur)?;
        let values = f.values.iter().zip(&gauge.values).map(|(a, b)| a.compose(b)).collect::<Result<_>>()?;
        gauge = GroupCochain { degree: 0, values };
    }
    Ok(StepwiseObstruction { level: None, coords: vec![], checked_through: top, gauge, reduced: cur })
}
