//! Finite simplicial sets given by their nondegenerate simplices, where a
//! face may be a formal degeneracy of a lower simplex.
//!
//! A general simplex is `s_{i_1} ... s_{i_k} y` with `y` nondegenerate and
//! `i_1 > ... > i_k`; normalized cochains vanish on anything with `k > 0`.

mod cup;
mod local;
mod nonabelian;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cup::{cup_characteristic, cup_product, CharacteristicForm, CharacteristicReport};
pub use local::{
    class_reduce, local_cohomology, twisted_coboundary, verify_difference, ClassReport, Cochain, DifferenceReport,
    LocalCohomology, LocalSystem,
};
pub use nonabelian::{
    nonabelian_delta, phi_action, psi_action, stepwise_obstruction, FilteredGroupLocalSystem, GroupCochain,
    StepwiseObstruction,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex {
    /// Dimension of the underlying nondegenerate simplex.
    pub base_dim: usize,
    pub base: usize,
    /// `[i_1, ..., i_k]` for `s_{i_1} ... s_{i_k}`, strictly decreasing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degeneracies: Vec<usize>,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, index: usize) -> Self {
        Simplex { base_dim: dim, base: index, degeneracies: Vec::new() }
    }

    pub fn degenerate(base_dim: usize, base: usize, degeneracies: Vec<usize>) -> Self {
        Simplex { base_dim, base, degeneracies: normalize(degeneracies) }
    }

    pub fn dim(&self) -> usize {
        self.base_dim + self.degeneracies.len()
    }

    pub fn is_degenerate(&self) -> bool {
        !self.degeneracies.is_empty()
    }
}

/// Rewrite with `s_i s_j = s_{j+1} s_i` (`i <= j`) until strictly decreasing.
fn normalize(mut w: Vec<usize>) -> Vec<usize> {
    loop {
        let Some(p) = (0..w.len().saturating_sub(1)).find(|&p| w[p] <= w[p + 1]) else {
            return w;
        };
        let (i, j) = (w[p], w[p + 1]);
        w[p] = j + 1;
        w[p + 1] = i;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSimplicialSet {
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<Simplex>>>,
    lookup: BTreeMap<String, (usize, usize)>,
}

impl FiniteSimplicialSet {
    /// `names[n]` lists the nondegenerate `n`-simplices; `faces[n][k]` holds
    /// `∂_0, ..., ∂_n` of the `k`-th one (empty for vertices).
    pub fn new(names: Vec<Vec<String>>, faces: Vec<Vec<Vec<Simplex>>>) -> Result<Self> {
        if names.is_empty() || names[0].is_empty() {
            return Err(Error::InvalidInput("a simplicial set needs at least one vertex".into()));
        }
        if names.len() != faces.len() {
            return Err(Error::InvalidInput("names and faces disagree on the top dimension".into()));
        }
        let mut lookup = BTreeMap::new();
        for (n, level) in names.iter().enumerate() {
            if faces[n].len() != level.len() {
                return Err(Error::InvalidInput(format!("dimension {n}: {} names but {} face lists", level.len(), faces[n].len())));
            }
            for (k, name) in level.iter().enumerate() {
                if lookup.insert(name.clone(), (n, k)).is_some() {
                    return Err(Error::InvalidInput(format!("duplicate simplex name `{name}`")));
                }
            }
        }
        let k = FiniteSimplicialSet { names, faces, lookup };
        k.validate()?;
        Ok(k)
    }

    fn validate(&self) -> Result<()> {
        for (n, level) in self.faces.iter().enumerate() {
            for (idx, fs) in level.iter().enumerate() {
                let name = &self.names[n][idx];
                let expected = if n == 0 { 0 } else { n + 1 };
                if fs.len() != expected {
                    return Err(Error::SimplicialIdentity(format!("`{name}` has {} faces, expected {expected}", fs.len())));
                }
                for f in fs {
                    self.check_simplex(f, n - 1)
                        .map_err(|e| Error::SimplicialIdentity(format!("face of `{name}`: {e}")))?;
                }
            }
        }
        // ∂_i ∂_j = ∂_{j-1} ∂_i for i < j
        for n in 2..self.faces.len() {
            for idx in 0..self.faces[n].len() {
                let x = Simplex::nondegenerate(n, idx);
                for j in 1..=n {
                    for i in 0..j {
                        let a = self.face(&self.face(&x, j), i);
                        let b = self.face(&self.face(&x, i), j - 1);
                        if a != b {
                            return Err(Error::SimplicialIdentity(format!(
                                "d{i} d{j} != d{} d{i} on `{}`",
                                j - 1,
                                self.names[n][idx]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_simplex(&self, s: &Simplex, dim: usize) -> std::result::Result<(), String> {
        if s.dim() != dim {
            return Err(format!("has dimension {}, expected {dim}", s.dim()));
        }
        if self.names.get(s.base_dim).map_or(true, |l| s.base >= l.len()) {
            return Err(format!("no nondegenerate {}-simplex with index {}", s.base_dim, s.base));
        }
        if normalize(s.degeneracies.clone()) != s.degeneracies {
            return Err("degeneracy word is not strictly decreasing".into());
        }
        // s_{i_p} acts on a simplex of dimension base_dim + (k - p)
        let k = s.degeneracies.len();
        for (p, &i) in s.degeneracies.iter().enumerate() {
            if i > s.base_dim + (k - 1 - p) {
                return Err(format!("degeneracy s{i} out of range"));
            }
        }
        Ok(())
    }

    /// The minimal model of the circle: one vertex, one edge.
    pub fn circle() -> Self {
        let v = Simplex::nondegenerate(0, 0);
        FiniteSimplicialSet::new(
            vec![vec!["p".into()], vec!["e".into()]],
            vec![vec![vec![]], vec![vec![v.clone(), v]]],
        )
        .expect("circle model")
    }

    /// The minimal model of `S^2`: one vertex and one 2-simplex whose edges
    /// are all the degenerate edge at the vertex.
    pub fn sphere() -> Self {
        let e = Simplex::degenerate(0, 0, vec![0]);
        FiniteSimplicialSet::new(
            vec![vec!["p".into()], vec![], vec!["sigma".into()]],
            vec![vec![vec![]], vec![], vec![vec![e.clone(), e.clone(), e]]],
        )
        .expect("sphere model")
    }

    /// One vertex, edges `a`, `b`, `c` and two triangles glued into a torus.
    pub fn torus() -> Self {
        let e = |k| Simplex::nondegenerate(1, k);
        let p = Simplex::nondegenerate(0, 0);
        FiniteSimplicialSet::new(
            vec![vec!["p".into()], vec!["a".into(), "b".into(), "c".into()], vec!["upper".into(), "lower".into()]],
            vec![
                vec![vec![]],
                vec![vec![p.clone(), p.clone()], vec![p.clone(), p.clone()], vec![p.clone(), p]],
                vec![vec![e(1), e(2), e(0)], vec![e(0), e(2), e(1)]],
            ],
        )
        .expect("torus model")
    }

    /// The standard `n`-simplex: nondegenerate simplices are the nonempty
    /// subsets of `{0..n}`, named by their vertices.
    pub fn standard(n: usize) -> Self {
        let mut names = vec![Vec::new(); n + 1];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut subsets: Vec<Vec<usize>> = (1u32..(1 << (n + 1)))
            .map(|mask| (0..=n).filter(|b| mask & (1 << b) != 0).collect())
            .collect();
        subsets.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let mut faces = vec![Vec::new(); n + 1];
        for s in subsets {
            let d = s.len() - 1;
            index.insert(s.clone(), names[d].len());
            names[d].push(s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""));
            let fs = if d == 0 {
                vec![]
            } else {
                (0..=d)
                    .map(|i| {
                        let mut t = s.clone();
                        t.remove(i);
                        Simplex::nondegenerate(d - 1, index[&t])
                    })
                    .collect()
            };
            faces[d].push(fs);
        }
        FiniteSimplicialSet::new(names, faces).expect("standard simplex")
    }

    /// Highest dimension with a slot in the encoding.
    pub fn dim(&self) -> usize {
        self.names.len() - 1
    }

    /// Number of nondegenerate `n`-simplices.
    pub fn count(&self, n: usize) -> usize {
        self.names.get(n).map_or(0, Vec::len)
    }

    pub fn name(&self, n: usize, k: usize) -> &str {
        &self.names[n][k]
    }

    pub fn names(&self) -> &[Vec<String>] {
        &self.names
    }

    pub fn faces_of(&self, n: usize, k: usize) -> &[Simplex] {
        &self.faces[n][k]
    }

    pub fn index_of(&self, name: &str) -> Option<(usize, usize)> {
        self.lookup.get(name).copied()
    }

    /// `∂_i x` for any simplex, degenerate or not.
    pub fn face(&self, x: &Simplex, i: usize) -> Simplex {
        assert!(x.dim() > 0 && i <= x.dim(), "face index out of range");
        let word = &x.degeneracies;
        let mut out = Vec::with_capacity(word.len());
        let mut i = i;
        for (p, &j) in word.iter().enumerate() {
            if i < j {
                out.push(j - 1);
            } else if i == j || i == j + 1 {
                out.extend_from_slice(&word[p + 1..]);
                return Simplex::degenerate(x.base_dim, x.base, out);
            } else {
                out.push(j);
                i -= 1;
            }
        }
        let f = &self.faces[x.base_dim][x.base][i];
        out.extend_from_slice(&f.degeneracies);
        Simplex::degenerate(f.base_dim, f.base, out)
    }

    /// The face spanned by vertices `0..=p`.
    pub fn front(&self, x: &Simplex, p: usize) -> Simplex {
        let mut s = x.clone();
        while s.dim() > p {
            let d = s.dim();
            s = self.face(&s, d);
        }
        s
    }

    /// The face spanned by the last `q + 1` vertices.
    pub fn back(&self, x: &Simplex, q: usize) -> Simplex {
        let mut s = x.clone();
        while s.dim() > q {
            s = self.face(&s, 0);
        }
        s
    }

    /// Vertex `k` of `x` as an index into the vertex list.
    pub fn vertex(&self, x: &Simplex, k: usize) -> usize {
        let s = self.front(x, k);
        self.back(&s, 0).base
    }

    /// `x_0 = ∂_1 ... ∂_n x`.
    pub fn leading_vertex(&self, x: &Simplex) -> usize {
        self.front(x, 0).base
    }

    pub fn display(&self, s: &Simplex) -> String {
        let mut out: Vec<String> = s.degeneracies.iter().map(|i| format!("s{i}")).collect();
        out.push(self.names[s.base_dim][s.base].clone());
        out.join(" ")
    }
}
