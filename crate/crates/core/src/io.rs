//! JSON descriptors for the objects of this crate.
//!
//! Descriptors name things (generators, basis elements, simplices) by
//! string; `build` resolves the names and reports unresolved ones as
//! [`Error::Descriptor`] with a dotted path into the input. Mathematical
//! validation happens afterwards, in the ordinary constructors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cinfty::{CInftyStructure, DgaModel, FormalConnection};
use crate::derivation::{ChenDifferential, Derivation, FilteredAutomorphism};
use crate::error::{Error, Result};
use crate::lie::{Generator, GeneratorSet, TensorElement, WeightTruncation};
use crate::linalg::{Matrix, SparseVec};
use crate::scalar::{serde_scalar, serde_scalar_matrix, Scalar};
use crate::simplicial::{CharacteristicForm, Cochain, FiniteSimplicialSet, LocalSystem, Simplex};

/// Carried by every report the command line prints.
pub const SCHEMA_VERSION: u32 = 1;

fn bad(path: impl Into<String>, e: impl Display) -> Error {
    Error::Descriptor { path: path.into(), message: e.to_string() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSetDesc {
    pub generators: Vec<Generator>,
}

impl GeneratorSetDesc {
    pub fn build(&self) -> Result<Arc<GeneratorSet>> {
        GeneratorSet::new(self.generators.clone()).map_err(|e| bad("generators", e))
    }
}

/// `coeff · word`, the word given by generator names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDesc {
    pub word: Vec<String>,
    #[serde(with = "serde_scalar")]
    pub coeff: Scalar,
}

pub fn element_from_desc(gens: &Arc<GeneratorSet>, terms: &[TermDesc], path: &str) -> Result<TensorElement> {
    let mut t = TensorElement::zero(gens);
    for (k, term) in terms.iter().enumerate() {
        let w = gens.word_from_names(&term.word).map_err(|e| bad(format!("{path}[{k}].word"), e))?;
        t.add_term(w, term.coeff.clone());
    }
    Ok(t)
}

pub fn element_to_desc(t: &TensorElement) -> Vec<TermDesc> {
    t.terms()
        .iter()
        .map(|(w, c)| TermDesc { word: t.gens().word_names(w), coeff: c.clone() })
        .collect()
}

fn images_from_desc(
    gens: &Arc<GeneratorSet>,
    images: &BTreeMap<String, Vec<TermDesc>>,
    path: &str,
) -> Result<Vec<Option<TensorElement>>> {
    let mut out = vec![None; gens.len()];
    for (name, terms) in images {
        let p = format!("{path}.{name}");
        let i = gens.index_of(name).map_err(|e| bad(&p, e))?;
        out[i] = Some(element_from_desc(gens, terms, &p)?);
    }
    Ok(out)
}

/// `{"degree": n, "images": {"x": [{"word": ["x","x"], "coeff": "1/1"}]}}`,
/// optionally with its own `"generators"`. Missing images are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Generator>>,
    pub degree: i64,
    #[serde(default)]
    pub images: BTreeMap<String, Vec<TermDesc>>,
}

impl DerivationDesc {
    pub fn generator_set(&self) -> Result<Arc<GeneratorSet>> {
        let g = self.generators.as_ref().ok_or_else(|| bad("generators", "missing generator list"))?;
        GeneratorSet::new(g.clone()).map_err(|e| bad("generators", e))
    }

    pub fn build(&self, trunc: WeightTruncation) -> Result<Derivation> {
        let gens = self.generator_set()?;
        self.build_over(&gens, trunc, "")
    }

    /// Resolves against `gens`; `path` prefixes diagnostics.
    pub fn build_over(&self, gens: &Arc<GeneratorSet>, trunc: WeightTruncation, path: &str) -> Result<Derivation> {
        let images = images_from_desc(gens, &self.images, &join(path, "images"))?
            .into_iter()
            .map(|t| t.unwrap_or_else(|| TensorElement::zero(gens)))
            .collect();
        Derivation::new(gens, self.degree, images, trunc)
    }

    pub fn from_derivation(d: &Derivation, with_generators: bool) -> Self {
        let gens = d.gens();
        DerivationDesc {
            generators: with_generators.then(|| gens.generators().to_vec()),
            degree: d.degree(),
            images: d
                .images()
                .iter()
                .enumerate()
                .filter(|(_, t)| !t.is_zero())
                .map(|(i, t)| (gens.name(i).to_string(), element_to_desc(t)))
                .collect(),
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// `{"images": {...}}`; a generator without an image is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismDesc {
    #[serde(default)]
    pub images: BTreeMap<String, Vec<TermDesc>>,
}

impl AutomorphismDesc {
    pub fn build_over(
        &self,
        gens: &Arc<GeneratorSet>,
        trunc: WeightTruncation,
        path: &str,
    ) -> Result<FilteredAutomorphism> {
        let images = images_from_desc(gens, &self.images, &join(path, "images"))?
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.unwrap_or_else(|| TensorElement::generator(gens, i)))
            .collect();
        FilteredAutomorphism::new(gens, images, trunc)
    }

    /// Lists only the images that differ from the identity.
    pub fn from_automorphism(phi: &FilteredAutomorphism) -> Self {
        let gens = phi.gens();
        AutomorphismDesc {
            images: phi
                .images()
                .iter()
                .enumerate()
                .filter(|(i, t)| **t != TensorElement::generator(gens, *i))
                .map(|(i, t)| (gens.name(i).to_string(), element_to_desc(t)))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductDesc {
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub out: String,
    #[serde(with = "serde_scalar")]
    pub coeff: Scalar,
}

/// `{"basis": [...], "products": {"2": [{"in": ["a1","b1"], "out": "v", "coeff": "1/1"}]}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CInftyDesc {
    pub basis: Vec<Generator>,
    #[serde(default)]
    pub products: BTreeMap<String, Vec<ProductDesc>>,
}

fn basis_index(names: &BTreeMap<&str, usize>, name: &str, path: String) -> Result<usize> {
    names.get(name).copied().ok_or_else(|| bad(path, format!("unknown basis element `{name}`")))
}

fn basis_names(basis: &[Generator]) -> BTreeMap<&str, usize> {
    basis.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect()
}

impl CInftyDesc {
    pub fn build(&self) -> Result<CInftyStructure> {
        let mut m = CInftyStructure::new(self.basis.clone()).map_err(|e| bad("basis", e))?;
        let names = basis_names(&self.basis);
        for (key, list) in &self.products {
            let arity: usize = key.parse().map_err(|_| bad(format!("products.{key}"), "arity must be a number"))?;
            for (k, p) in list.iter().enumerate() {
                let path = format!("products.{key}[{k}]");
                if p.inputs.len() != arity {
                    return Err(bad(format!("{path}.in"), format!("expected {arity} inputs, got {}", p.inputs.len())));
                }
                let ins = p
                    .inputs
                    .iter()
                    .enumerate()
                    .map(|(j, n)| basis_index(&names, n, format!("{path}.in[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                let out = basis_index(&names, &p.out, format!("{path}.out"))?;
                m.add_product(&ins, out, p.coeff.clone()).map_err(|e| bad(path, e))?;
            }
        }
        Ok(m)
    }

    pub fn from_cinfty(m: &CInftyStructure) -> Self {
        let mut products = BTreeMap::new();
        for k in m.arities() {
            let list: Vec<ProductDesc> = m
                .product(k)
                .flat_map(|(ins, out)| {
                    out.iter().map(move |(&o, c)| ProductDesc {
                        inputs: m.names(ins),
                        out: m.basis()[o].name.clone(),
                        coeff: c.clone(),
                    })
                })
                .collect();
            products.insert(k.to_string(), list);
        }
        CInftyDesc { basis: m.basis().to_vec(), products }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearEntryDesc {
    #[serde(rename = "in")]
    pub input: String,
    pub out: String,
    #[serde(with = "serde_scalar")]
    pub coeff: Scalar,
}

/// A finite-dimensional DGA: `"d"` entries `d(in) ∋ coeff·out` and binary
/// `"products"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgaDesc {
    pub basis: Vec<Generator>,
    #[serde(default)]
    pub d: Vec<LinearEntryDesc>,
    #[serde(default)]
    pub products: Vec<ProductDesc>,
}

impl DgaDesc {
    pub fn build(&self) -> Result<DgaModel> {
        let names = basis_names(&self.basis);
        let mut d: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (k, e) in self.d.iter().enumerate() {
            let i = basis_index(&names, &e.input, format!("d[{k}].in"))?;
            let o = basis_index(&names, &e.out, format!("d[{k}].out"))?;
            *d.entry(i).or_default().entry(o).or_default() += &e.coeff;
        }
        let mut product: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (k, p) in self.products.iter().enumerate() {
            let path = format!("products[{k}]");
            if p.inputs.len() != 2 {
                return Err(bad(format!("{path}.in"), "DGA products take two inputs"));
            }
            let a = basis_index(&names, &p.inputs[0], format!("{path}.in[0]"))?;
            let b = basis_index(&names, &p.inputs[1], format!("{path}.in[1]"))?;
            let o = basis_index(&names, &p.out, format!("{path}.out"))?;
            *product.entry((a, b)).or_default().entry(o).or_default() += &p.coeff;
        }
        DgaModel::new(self.basis.clone(), d, product)
    }
}

/// An explicit connection `ω = Σ a ⊗ ω_a` on a DGA, with its differential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDesc {
    pub dga: DgaDesc,
    pub generators: Vec<Generator>,
    pub delta: DerivationDesc,
    /// Components keyed by DGA basis element; missing ones are zero.
    #[serde(default)]
    pub omega: BTreeMap<String, Vec<TermDesc>>,
}

impl ConnectionDesc {
    pub fn build(&self, trunc: WeightTruncation) -> Result<(DgaModel, FormalConnection)> {
        let a = self.dga.build()?;
        let gens = GeneratorSet::new(self.generators.clone()).map_err(|e| bad("generators", e))?;
        let delta = ChenDifferential::new(self.delta.build_over(&gens, trunc, "delta")?)?;
        let names = basis_names(&self.dga.basis);
        let mut omega = vec![TensorElement::zero(&gens); a.dim()];
        for (name, terms) in &self.omega {
            let p = format!("omega.{name}");
            let i = basis_index(&names, name, p.clone())?;
            omega[i] = element_from_desc(&gens, terms, &p)?;
        }
        let conn = FormalConnection::new(&a, omega, delta)?;
        Ok((a, conn))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDesc {
    pub simplex: String,
    /// `[i_1, ..., i_k]` for `s_{i_1} ... s_{i_k}` applied to `simplex`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degeneracies: Vec<usize>,
}

/// Either a shipped `"model"` (`circle`, `sphere`, `torus`, `standard-N`) or
/// `"simplices"` by dimension plus the faces of every positive-dimensional
/// one, keyed by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialSetDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub simplices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub faces: BTreeMap<String, Vec<FaceDesc>>,
}

impl SimplicialSetDesc {
    pub fn build(&self) -> Result<FiniteSimplicialSet> {
        if let Some(model) = &self.model {
            if !self.simplices.is_empty() || !self.faces.is_empty() {
                return Err(bad("model", "give either a model name or explicit simplices"));
            }
            return match model.as_str() {
                "circle" => Ok(FiniteSimplicialSet::circle()),
                "sphere" => Ok(FiniteSimplicialSet::sphere()),
                "torus" => Ok(FiniteSimplicialSet::torus()),
                other => match other.strip_prefix("standard-").and_then(|n| n.parse::<usize>().ok()) {
                    Some(n) if n <= 6 => Ok(FiniteSimplicialSet::standard(n)),
                    _ => Err(bad("model", format!("unknown model `{other}`"))),
                },
            };
        }
        let mut lookup = BTreeMap::new();
        for (n, level) in self.simplices.iter().enumerate() {
            for (k, name) in level.iter().enumerate() {
                if lookup.insert(name.as_str(), (n, k)).is_some() {
                    return Err(bad(format!("simplices[{n}][{k}]"), format!("duplicate simplex name `{name}`")));
                }
            }
        }
        for name in self.faces.keys() {
            match lookup.get(name.as_str()) {
                None => return Err(bad(format!("faces.{name}"), "not a listed simplex")),
                Some((0, _)) => return Err(bad(format!("faces.{name}"), "vertices have no faces")),
                Some(_) => {}
            }
        }
        let mut faces = Vec::with_capacity(self.simplices.len());
        for (n, level) in self.simplices.iter().enumerate() {
            let mut fl = Vec::with_capacity(level.len());
            for name in level {
                if n == 0 {
                    fl.push(Vec::new());
                    continue;
                }
                let list = self.faces.get(name).ok_or_else(|| bad(format!("faces.{name}"), "missing face list"))?;
                let mut fs = Vec::with_capacity(list.len());
                for (i, f) in list.iter().enumerate() {
                    let path = format!("faces.{name}[{i}].simplex");
                    let &(d, k) =
                        lookup.get(f.simplex.as_str()).ok_or_else(|| bad(&path, format!("unknown simplex `{}`", f.simplex)))?;
                    fs.push(Simplex::degenerate(d, k, f.degeneracies.clone()));
                }
                fl.push(fs);
            }
            faces.push(fl);
        }
        FiniteSimplicialSet::new(self.simplices.clone(), faces)
    }

    pub fn from_set(k: &FiniteSimplicialSet) -> Self {
        let mut faces = BTreeMap::new();
        for n in 1..=k.dim() {
            for s in 0..k.count(n) {
                let list = k
                    .faces_of(n, s)
                    .iter()
                    .map(|f| FaceDesc { simplex: k.name(f.base_dim, f.base).to_string(), degeneracies: f.degeneracies.clone() })
                    .collect();
                faces.insert(k.name(n, s).to_string(), list);
            }
        }
        SimplicialSetDesc { model: None, simplices: k.names().to_vec(), faces }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixDesc(#[serde(with = "serde_scalar_matrix")] pub Vec<Vec<Scalar>>);

impl MatrixDesc {
    fn build(&self, path: String) -> Result<Matrix> {
        Matrix::from_rows(self.0.clone()).map_err(|e| bad(path, e))
    }
}

/// Fiber dimension per vertex and one matrix per edge (columns are images
/// of the basis of the source fiber). Without `edges` every edge acts by
/// the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSystemDesc {
    pub fiber_dims: Vec<usize>,
    #[serde(default)]
    pub edges: Vec<MatrixDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trivializations: Option<Vec<MatrixDesc>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<MatrixDesc>,
}

impl LocalSystemDesc {
    pub fn build(&self, k: &FiniteSimplicialSet) -> Result<LocalSystem> {
        if self.fiber_dims.len() != k.count(0) {
            return Err(bad("fiber_dims", format!("expected {} entries, one per vertex", k.count(0))));
        }
        let edges = if self.edges.is_empty() {
            (0..k.count(1))
                .map(|e| {
                    let x = Simplex::nondegenerate(1, e);
                    Matrix::identity(self.fiber_dims[k.vertex(&x, 0)])
                })
                .collect()
        } else {
            self.edges.iter().enumerate().map(|(i, m)| m.build(format!("edges[{i}]"))).collect::<Result<Vec<_>>>()?
        };
        let m = LocalSystem::new(k, self.fiber_dims.clone(), edges)?;
        match &self.trivializations {
            None => {
                if !self.generators.is_empty() {
                    return Err(bad("generators", "holonomy generators need trivializations"));
                }
                Ok(m)
            }
            Some(t) => {
                let triv =
                    t.iter().enumerate().map(|(i, m)| m.build(format!("trivializations[{i}]"))).collect::<Result<_>>()?;
                let gens = self
                    .generators
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.build(format!("generators[{i}]")))
                    .collect::<Result<_>>()?;
                m.with_trivializations(triv, gens)
            }
        }
    }
}

/// Input of `cohomology`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohomologyDesc {
    pub simplicial_set: SimplicialSetDesc,
    pub local_system: LocalSystemDesc,
    pub degree: usize,
}

/// Input of `obstruction` with `"kind": "abelian"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelianObstructionDesc {
    pub kind: String,
    pub simplicial_set: SimplicialSetDesc,
    pub local_system: LocalSystemDesc,
    pub cochain: Cochain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<CharacteristicForm>,
}

/// Input of `obstruction` with `"kind": "filtered"`: a differential, edge
/// automorphisms commuting with it (all identity when omitted), and a group
/// 1-cochain with one unipotent automorphism per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredObstructionDesc {
    pub kind: String,
    pub simplicial_set: SimplicialSetDesc,
    pub generators: Vec<Generator>,
    pub delta: DerivationDesc,
    #[serde(default)]
    pub edges: Vec<AutomorphismDesc>,
    pub cochain: Vec<AutomorphismDesc>,
}

/// Input of `bch`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BchDesc {
    pub generators: Vec<Generator>,
    pub d1: DerivationDesc,
    pub d2: DerivationDesc,
}

/// Input of `mc-check` with `"kind": "canonical"`: the connection built from
/// a C-infinity structure, with the component at `negate` flipped if given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CanonicalMcDesc {
    pub kind: String,
    pub cinfty: CInftyDesc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negate: Option<String>,
}

/// Input of `mc-check` with `"kind": "explicit"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitMcDesc {
    pub kind: String,
    #[serde(flatten)]
    pub connection: ConnectionDesc,
}
