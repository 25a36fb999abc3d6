//! Minimal C-infinity structures, the bar-construction dictionary with Chen
//! differentials, formal connections and the twisted complex.

mod dga;
mod dictionary;
mod twisted;

pub use dga::{
    canonical_formal_connection, mc_check, CanonicalConnection, DgaModel, FormalConnection, McFailure, McReport,
};
pub use dictionary::{chen_delta_from_cinfty, cinfty_from_delta};
pub use twisted::{twisted_complex_homology, TwistedBlock, TwistedHomologyReport};

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{koszul, Generator};
use crate::linalg::{axpy, SparseVec};
use crate::scalar::{format_scalar, sign, Scalar};

/// Products `m_k(h_{i_1}, ..., h_{i_k}) = sum_r c_r h_r` on a graded space
/// with a named basis. Degrees are cohomological.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CInftyStructure {
    basis: Vec<Generator>,
    index: HashMap<String, usize>,
    products: BTreeMap<usize, BTreeMap<Vec<usize>, SparseVec>>,
}

impl CInftyStructure {
    pub fn new(basis: Vec<Generator>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate basis element `{}`", b.name)));
            }
        }
        Ok(CInftyStructure { basis, index, products: BTreeMap::new() })
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

    /// Adds `coeff * out` to `m_k(inputs)`; checks the degree `2 - k`.
    pub fn add_product(&mut self, inputs: &[usize], out: usize, coeff: Scalar) -> Result<()> {
        let k = inputs.len();
        if k == 0 {
            return Err(Error::InvalidInput("products need at least one input".into()));
        }
        if inputs.iter().chain([&out]).any(|&i| i >= self.dim()) {
            return Err(Error::InvalidInput("basis index out of range".into()));
        }
        let want: i64 = inputs.iter().map(|&i| self.degree(i)).sum::<i64>() + 2 - k as i64;
        if self.degree(out) != want {
            return Err(Error::InvalidInput(format!(
                "m_{k}({}) has degree {want}, but `{}` has degree {}",
                self.names(inputs).join(","),
                self.basis[out].name,
                self.degree(out)
            )));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let slot = self.products.entry(k).or_default().entry(inputs.to_vec()).or_default();
        let mut add = SparseVec::new();
        add.insert(out, coeff);
        axpy(slot, &Scalar::from_integer(1.into()), &add);
        if slot.is_empty() {
            let table = self.products.get_mut(&k).expect("entry exists");
            table.remove(inputs);
            if table.is_empty() {
                self.products.remove(&k);
            }
        }
        Ok(())
    }

    pub fn add_named(&mut self, inputs: &[&str], out: &str, coeff: Scalar) -> Result<()> {
        let ins = inputs.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>>>()?;
        let o = self.index_of(out)?;
        self.add_product(&ins, o, coeff)
    }

    pub fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.basis[i].name.clone()).collect()
    }

    /// `m_k` as a sparse table; empty when absent.
    pub fn product(&self, k: usize) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.products.get(&k).into_iter().flat_map(|m| m.iter())
    }

    pub fn arities(&self) -> Vec<usize> {
        self.products
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn max_arity(&self) -> usize {
        self.arities().last().copied().unwrap_or(0)
    }

    pub fn is_minimal(&self) -> bool {
        self.product(1).next().is_none()
    }

    /// `g·m = g ∘ m_k ∘ (g^{-1})^{⊗k}` for a degree-preserving `g`
    /// (column `i` of `g` is the image of basis element `i`).
    pub fn transform(&self, g: &crate::linalg::Matrix) -> Result<Self> {
        let d = self.dim();
        if g.rows != d || g.cols != d {
            return Err(Error::InvalidInput(format!("transform must be {d}x{d}")));
        }
        for i in 0..d {
            for j in 0..d {
                if !g.get(j, i).is_zero() && self.degree(i) != self.degree(j) {
                    return Err(Error::InvalidInput("transform mixes degrees".into()));
                }
            }
        }
        let inv = g.inverse()?;
        let mut out = CInftyStructure::new(self.basis.clone())?;
        for table in self.products.values() {
            for (js, val) in table {
                // g(m(js)) as a vector
                let mut img = SparseVec::new();
                for (r, c) in val {
                    for row in 0..d {
                        let e = g.get(row, *r);
                        if !e.is_zero() {
                            let mut one = SparseVec::new();
                            one.insert(row, e * c);
                            axpy(&mut img, &Scalar::from_integer(1.into()), &one);
                        }
                    }
                }
                // every input tuple whose g^{-1}-image has a js component
                let choices: Vec<Vec<(usize, Scalar)>> = js
                    .iter()
                    .map(|&j| {
                        (0..d)
                            .filter(|&i| !inv.get(j, i).is_zero())
                            .map(|i| (i, inv.get(j, i).clone()))
                            .collect()
                    })
                    .collect();
                let mut stack: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), Scalar::from_integer(1.into()))];
                for ch in &choices {
                    let mut next = Vec::new();
                    for (pre, c) in &stack {
                        for (i, e) in ch {
                            let mut p = pre.clone();
                            p.push(*i);
                            next.push((p, c * e));
                        }
                    }
                    stack = next;
                }
                for (ins, c) in stack {
                    for (r, v) in &img {
                        out.add_product(&ins, *r, &c * v)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Suspended degree `|sa| = |a| - 1`.
    fn sdeg(&self, i: usize) -> i64 {
        self.degree(i) - 1
    }

    /// `m̄_k(s a_1, ..., s a_k) = ± s m_k(a_1, ..., a_k)`.
    pub(crate) fn suspension_sign(&self, inputs: &[usize]) -> i64 {
        let k = inputs.len();
        inputs
            .iter()
            .enumerate()
            .map(|(p, &i)| (k - 1 - p) as i64 * self.sdeg(i))
            .sum::<i64>()
            .rem_euclid(2)
    }

    fn suspended(&self) -> BTreeMap<usize, HashMap<Vec<usize>, SparseVec>> {
        let mut out: BTreeMap<usize, HashMap<Vec<usize>, SparseVec>> = BTreeMap::new();
        for (k, table) in &self.products {
            let slot = out.entry(*k).or_default();
            for (ins, v) in table {
                let s = sign(self.suspension_sign(ins));
                slot.insert(ins.clone(), v.iter().map(|(r, c)| (*r, c * &s)).collect());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CInftyCheck {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<CInftyViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CInftyViolation {
    /// `"a-infinity"` or `"commutativity"`.
    pub relation: String,
    pub arity: usize,
    /// Shuffle split `j` for commutativity; 0 otherwise.
    pub split: usize,
    pub inputs: Vec<String>,
    pub output: String,
    pub coeff: String,
}

/// Checks the A-infinity relations (in bar form: the suspended coderivation
/// squares to zero) up to arity `2K - 1`, and that each suspended `m̄_i`
/// vanishes on signed shuffles.
pub fn check_cinfty(m: &CInftyStructure) -> CInftyCheck {
    let ms = m.suspended();
    let d = m.dim();
    let kmax = m.max_arity();
    let degs: Vec<i64> = (0..d).map(|i| m.sdeg(i)).collect();
    let ok = CInftyCheck { passed: true, violation: None };
    if kmax == 0 || d == 0 {
        return ok;
    }
    let eval = |k: usize, ins: &[usize]| -> Option<&SparseVec> { ms.get(&k).and_then(|t| t.get(ins)) };
    let fail = |relation: &str, arity: usize, split: usize, ins: &[usize], v: &SparseVec| {
        let (r, c) = v.iter().next().expect("nonzero residual");
        CInftyCheck {
            passed: false,
            violation: Some(CInftyViolation {
                relation: relation.into(),
                arity,
                split,
                inputs: m.names(ins),
                output: m.basis[*r].name.clone(),
                coeff: format_scalar(c),
            }),
        }
    };

    for i in 1..=(2 * kmax - 1) {
        let mut found = None;
        for_each_tuple(d, i, |ins| {
            if found.is_some() {
                return;
            }
            let mut acc = SparseVec::new();
            for l in 1..=i {
                let k = i + 1 - l;
                if !ms.contains_key(&k) || !ms.contains_key(&l) {
                    continue;
                }
                let mut pre = 0i64;
                for j in 0..k {
                    if j > 0 {
                        pre += degs[ins[j - 1]];
                    }
                    let Some(inner) = eval(l, &ins[j..j + l]) else { continue };
                    let s = sign(pre);
                    let mut outer_in = Vec::with_capacity(k);
                    outer_in.extend_from_slice(&ins[..j]);
                    outer_in.push(0);
                    outer_in.extend_from_slice(&ins[j + l..]);
                    for (r, c) in inner {
                        outer_in[j] = *r;
                        if let Some(o) = eval(k, &outer_in) {
                            axpy(&mut acc, &(&s * c), o);
                        }
                    }
                }
            }
            if !acc.is_empty() {
                found = Some(fail("a-infinity", i, 0, ins, &acc));
            }
        });
        if let Some(f) = found {
            return f;
        }
    }

    for &i in m.arities().iter().filter(|&&i| i >= 2) {
        for j in 1..i {
            let mut found = None;
            for_each_tuple(d, i, |ins| {
                if found.is_some() {
                    return;
                }
                let mut acc = SparseVec::new();
                for_each_shuffle(j, i, |perm, parity_swaps| {
                    let arranged: Vec<usize> = perm.iter().map(|&p| ins[p]).collect();
                    let eps: i64 = parity_swaps.iter().map(|&(a, b)| koszul(degs[ins[a]], degs[ins[b]])).sum();
                    if let Some(o) = eval(i, &arranged) {
                        axpy(&mut acc, &sign(eps), o);
                    }
                });
                if !acc.is_empty() {
                    found = Some(fail("commutativity", i, j, ins, &acc));
                }
            });
            if let Some(f) = found {
                return f;
            }
        }
    }
    ok
}

/// Calls `f` on every tuple in `{0..d}^len`, in lexicographic order.
fn for_each_tuple<F: FnMut(&[usize])>(d: usize, len: usize, mut f: F) {
    let mut t = vec![0usize; len];
    loop {
        f(&t);
        let mut p = len;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            t[p] += 1;
            if t[p] < d {
                break;
            }
            t[p] = 0;
        }
    }
}

/// Each `(j, i - j)` shuffle as the arrangement of positions plus the list
/// of position pairs `(a, b)` with `a < b` that end up in reversed order.
fn for_each_shuffle<F: FnMut(&[usize], &[(usize, usize)])>(j: usize, i: usize, mut f: F) {
    for mask in 0u32..(1u32 << i) {
        if mask.count_ones() as usize != j {
            continue;
        }
        // mask marks the slots that receive the first block, in order
        let mut perm = Vec::with_capacity(i);
        let (mut a, mut b) = (0usize, j);
        for slot in 0..i {
            if mask & (1 << slot) != 0 {
                perm.push(a);
                a += 1;
            } else {
                perm.push(b);
                b += 1;
            }
        }
        let mut swaps = Vec::new();
        for x in 0..i {
            for y in x + 1..i {
                if perm[x] > perm[y] {
                    swaps.push((perm[y], perm[x]));
                }
            }
        }
        f(&perm, &swaps);
    }
}
