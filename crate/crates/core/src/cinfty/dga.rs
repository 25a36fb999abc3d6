use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use serde::Serialize;

use super::{chen_delta_from_cinfty, CInftyStructure};
use crate::derivation::ChenDifferential;
use crate::error::{Error, Result};
use crate::lie::{koszul, same_gens, Generator, TensorElement, WeightTruncation};
use crate::linalg::{axpy, SparseVec};
use crate::scalar::{format_scalar, frac, sign, Scalar};

/// A finite-dimensional augmented cdga, stored through its reduced part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaModel {
    basis: Vec<Generator>,
    index: HashMap<String, usize>,
    d: BTreeMap<usize, SparseVec>,
    product: BTreeMap<(usize, usize), SparseVec>,
}

impl DgaModel {
    /// Validates degrees, `d² = 0`, the Leibniz rule, graded commutativity
    /// and associativity.
    pub fn new(
        basis: Vec<Generator>,
        d: BTreeMap<usize, SparseVec>,
        product: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate basis element `{}`", b.name)));
            }
        }
        let a = DgaModel {
            basis,
            index,
            d: d.into_iter().filter(|(_, v)| !v.is_empty()).collect(),
            product: product.into_iter().filter(|(_, v)| !v.is_empty()).collect(),
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        for (a, v) in &self.d {
            if *a >= n || v.keys().any(|&b| b >= n) {
                return bad("differential index out of range".into());
            }
            if v.keys().any(|&b| self.degree(b) != self.degree(*a) + 1) {
                return bad(format!("d({}) does not have degree +1", self.basis[*a].name));
            }
        }
        for ((a, b), v) in &self.product {
            if *a >= n || *b >= n || v.keys().any(|&c| c >= n) {
                return bad("product index out of range".into());
            }
            if v.keys().any(|&c| self.degree(c) != self.degree(*a) + self.degree(*b)) {
                return bad(format!(
                    "product {}*{} is not degree-additive",
                    self.basis[*a].name, self.basis[*b].name
                ));
            }
        }
        for a in 0..n {
            if !self.apply_d(&self.d_of(a)).is_empty() {
                return bad(format!("d² != 0 on `{}`", self.basis[a].name));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                let ba = self.mul(b, a);
                let mut diff = ab.clone();
                axpy(&mut diff, &-sign(koszul(self.degree(a), self.degree(b))), &ba);
                if !diff.is_empty() {
                    return bad(format!(
                        "product is not graded commutative on ({}, {})",
                        self.basis[a].name, self.basis[b].name
                    ));
                }
                // d(ab) = d(a) b + (-1)^{|a|} a d(b)
                let lhs = self.apply_d(&ab);
                let mut rhs = self.mul_vec(&self.d_of(a), &unit(b));
                axpy(&mut rhs, &sign(self.degree(a)), &self.mul_vec(&unit(a), &self.d_of(b)));
                if lhs != rhs {
                    return bad(format!(
                        "Leibniz rule fails on ({}, {})",
                        self.basis[a].name, self.basis[b].name
                    ));
                }
                for c in 0..n {
                    let l = self.mul_vec(&ab, &unit(c));
                    let r = self.mul_vec(&unit(a), &self.mul(b, c));
                    if l != r {
                        return bad(format!(
                            "product is not associative on ({}, {}, {})",
                            self.basis[a].name, self.basis[b].name, self.basis[c].name
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown basis element `{name}`")))
    }

    pub fn d_of(&self, a: usize) -> SparseVec {
        self.d.get(&a).cloned().unwrap_or_default()
    }

    pub fn mul(&self, a: usize, b: usize) -> SparseVec {
        self.product.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn differential(&self) -> &BTreeMap<usize, SparseVec> {
        &self.d
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        &self.product
    }

    fn apply_d(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, c) in v {
            axpy(&mut out, c, &self.d_of(*a));
        }
        out
    }

    fn mul_vec(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (a, x) in u {
            for (b, y) in v {
                axpy(&mut out, &(x * y), &self.mul(*a, *b));
            }
        }
        out
    }

    /// `(H, d = 0, m_2)` for a minimal structure.
    pub fn from_cinfty(m: &CInftyStructure) -> Result<Self> {
        let mut product: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for (ins, out) in m.product(2) {
            product.insert((ins[0], ins[1]), out.clone());
        }
        Self::new(m.basis().to_vec(), BTreeMap::new(), product)
    }
}

fn unit(i: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(i, Scalar::one());
    v
}

/// `ω = sum_a a ⊗ ω_a` together with its Chen differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConnection {
    omega: Vec<TensorElement>,
    delta: ChenDifferential,
}

impl FormalConnection {
    /// `omega[a]` must be a Lie element of degree `|a| - 1`.
    pub fn new(a: &DgaModel, omega: Vec<TensorElement>, delta: ChenDifferential) -> Result<Self> {
        if omega.len() != a.dim() {
            return Err(Error::InvalidInput(format!(
                "connection needs {} components, got {}",
                a.dim(),
                omega.len()
            )));
        }
        for (i, w) in omega.iter().enumerate() {
            if !same_gens(w.gens(), delta.gens()) {
                return Err(Error::MismatchedGenerators);
            }
            if !w.is_homogeneous_of_degree(a.degree(i) - 1) {
                return Err(Error::InvalidInput(format!(
                    "component at `{}` must have degree {}",
                    a.basis[i].name,
                    a.degree(i) - 1
                )));
            }
            if !w.is_primitive() {
                return Err(Error::InvalidInput(format!(
                    "component at `{}` is not a Lie element",
                    a.basis[i].name
                )));
            }
        }
        let trunc = delta.trunc();
        Ok(FormalConnection { omega: omega.into_iter().map(|t| t.truncate(trunc)).collect(), delta })
    }

    pub fn omega(&self) -> &[TensorElement] {
        &self.omega
    }

    pub fn delta(&self) -> &ChenDifferential {
        &self.delta
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.delta.trunc()
    }

    /// Same connection with the component at `a` negated.
    pub fn with_negated(&self, a: usize) -> Self {
        let mut c = self.clone();
        c.omega[a] = c.omega[a].neg();
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<McFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McFailure {
    pub basis: String,
    pub word: Vec<String>,
    pub coeff: String,
}

/// Evaluates `δω + dω + ½[ω, ω]` in `A ⊗ L` modulo weight > N.
pub fn mc_check(a: &DgaModel, conn: &FormalConnection) -> Result<McReport> {
    if conn.omega.len() != a.dim() {
        return Err(Error::InvalidInput("connection does not match the algebra".into()));
    }
    let gens = conn.delta.gens();
    let trunc = conn.trunc();
    let mut res = vec![TensorElement::zero(gens); a.dim()];
    let delta = conn.delta.as_derivation();
    for (i, w) in conn.omega.iter().enumerate() {
        // δ(a ⊗ x) = (-1)^{|a|} a ⊗ δx
        res[i].add_scaled(&sign(a.degree(i)), &delta.apply(w)?)?;
        for (b, c) in a.d_of(i) {
            res[b].add_scaled(&c, w)?;
        }
    }
    let half = frac(1, 2);
    for (i, wi) in conn.omega.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        let di = wi.homogeneous_degree().unwrap_or(0);
        for (j, wj) in conn.omega.iter().enumerate() {
            let prod = a.mul(i, j);
            if wj.is_zero() || prod.is_empty() {
                continue;
            }
            let br = wi.bracket(wj, trunc)?;
            let s = sign(koszul(di, a.degree(j))) * &half;
            for (c, x) in prod {
                res[c].add_scaled(&(&s * x), &br)?;
            }
        }
    }
    for (i, r) in res.iter().enumerate() {
        if let Some((w, c)) = r.terms().iter().next() {
            return Ok(McReport {
                passed: false,
                failure: Some(McFailure {
                    basis: a.basis[i].name.clone(),
                    word: gens.word_names(w),
                    coeff: format_scalar(c),
                }),
            });
        }
    }
    Ok(McReport { passed: true, failure: None })
}

#[derive(Clone, Debug)]
pub struct CanonicalConnection {
    pub dga: DgaModel,
    pub connection: FormalConnection,
    pub flatness: McReport,
}

/// `A = (H, 0, m_2)` with `ω = -sum_i h_i ⊗ x_i`, checked for flatness
/// against the dictionary differential of `m`.
pub fn canonical_formal_connection(m: &CInftyStructure, trunc: WeightTruncation) -> Result<CanonicalConnection> {
    let delta = chen_delta_from_cinfty(m, trunc)?;
    let dga = DgaModel::from_cinfty(m)?;
    let gens = delta.gens().clone();
    let omega = (0..m.dim())
        .map(|i| TensorElement::generator(&gens, i).neg())
        .collect();
    let connection = FormalConnection::new(&dga, omega, delta)?;
    let flatness = mc_check(&dga, &connection)?;
    Ok(CanonicalConnection { dga, connection, flatness })
}
