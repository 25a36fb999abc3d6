use std::sync::Arc;

use serde::Serialize;

use super::dga::{mc_check, DgaModel, FormalConnection};
use crate::complex::level_blocks;
use crate::derivation::WeightWindow;
use crate::error::{Error, Result};
use crate::lie::{koszul, LieBases, TensorElement};
use crate::linalg::SparseVec;
use crate::scalar::sign;

/// Basis of `(A ⊗ L)_k` restricted to L-weights `i + 1`, `i` in `weights`.
struct TwistedSpace {
    bases: Arc<LieBases>,
    degs: Vec<i64>,
    k: i64,
    /// (derivation weight, A-basis index, position in the Lie basis)
    entries: Vec<(usize, usize, usize)>,
    offsets: Vec<((usize, usize), usize)>,
}

impl TwistedSpace {
    fn new(bases: &Arc<LieBases>, degs: &[i64], k: i64, weights: &[usize]) -> Self {
        let mut entries = Vec::new();
        let mut offsets = Vec::new();
        for &i in weights {
            if i + 1 > bases.trunc().n() {
                continue;
            }
            for (a, &da) in degs.iter().enumerate() {
                offsets.push(((i, a), entries.len()));
                for p in 0..bases.dim(i + 1, k + da) {
                    entries.push((i, a, p));
                }
            }
        }
        TwistedSpace { bases: bases.clone(), degs: degs.to_vec(), k, entries, offsets }
    }

    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn element(&self, idx: usize) -> (usize, TensorElement) {
        let (i, a, p) = self.entries[idx];
        let b = self.bases.get(i + 1, self.k + self.degs[a]).expect("nonempty block");
        (a, b.elements()[p].as_tensor().clone())
    }

    fn coords(&self, v: &[TensorElement]) -> SparseVec {
        let mut out = SparseVec::new();
        for &((i, a), start) in &self.offsets {
            if let Some(b) = self.bases.get(i + 1, self.k + self.degs[a]) {
                b.sparse_coordinates(&v[a].weight_part(i + 1), start, &mut out);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedBlock {
    /// Derivation weight; the L-weight is one more.
    pub weight: usize,
    pub dim: usize,
    pub chain_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedHomologyReport {
    pub n: i64,
    pub complex_degree: i64,
    pub graded: bool,
    pub stable_max_weight: Option<usize>,
    pub blocks: Vec<TwistedBlock>,
}

impl TwistedHomologyReport {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }
}

/// `H_{n-1}(A ⊗ L, d + δ + [ω, -])` on reduced `A`, split by weight.
pub fn twisted_complex_homology(
    a: &DgaModel,
    conn: &FormalConnection,
    n: i64,
    window: WeightWindow,
) -> Result<TwistedHomologyReport> {
    if !mc_check(a, conn)?.passed {
        return Err(Error::InvalidInput("connection is not flat".into()));
    }
    let delta = conn.delta();
    let trunc = delta.trunc();
    let bases = Arc::new(LieBases::new(delta.gens(), trunc));
    let degs: Vec<i64> = (0..a.dim()).map(|i| a.degree(i)).collect();

    let mut raises: Vec<usize> = Vec::new();
    if !a.differential().is_empty() {
        raises.push(0);
    }
    raises.extend(delta.image_weights().iter().map(|m| m - 1));
    for w in conn.omega() {
        raises.extend(w.weights());
    }
    raises.sort_unstable();
    raises.dedup();
    let graded = raises.len() <= 1;
    let max_raise = raises.last().copied().unwrap_or(0);
    let stable = trunc.n().checked_sub(1 + max_raise);

    let (lo, hi) = match window {
        WeightWindow::Single(i) => (i, i),
        WeightWindow::Range(x, y) if x <= y => (x, y),
        WeightWindow::Range(..) => return Err(Error::InvalidInput("empty weight window".into())),
        WeightWindow::Stable => (0, stable.unwrap_or(0)),
    };
    if stable.map_or(true, |s| hi > s) {
        return Err(Error::UnstableWindow { trunc: trunc.n(), required: hi + 1 + max_raise });
    }
    let weights: Vec<usize> = (lo..=hi).collect();
    let all: Vec<usize> = (0..trunc.n()).collect();
    let k = n - 1;

    let apply = |(ai, y): (usize, TensorElement)| -> Result<Vec<TensorElement>> {
        let gens = delta.gens();
        let mut out = vec![TensorElement::zero(gens); a.dim()];
        for (b, c) in a.d_of(ai) {
            out[b].add_scaled(&c, &y)?;
        }
        out[ai].add_scaled(&sign(degs[ai]), &delta.as_derivation().apply(&y)?)?;
        for (b, wb) in conn.omega().iter().enumerate() {
            let prod = a.mul(b, ai);
            if wb.is_zero() || prod.is_empty() {
                continue;
            }
            let s = sign(koszul(wb.homogeneous_degree().unwrap_or(0), degs[ai]));
            let br = wb.bracket(&y, trunc)?;
            for (c, x) in prod {
                out[c].add_scaled(&(&s * x), &br)?;
            }
        }
        Ok(out)
    };

    let images = |from: &TwistedSpace, to: &TwistedSpace| -> Result<Vec<SparseVec>> {
        (0..from.dim()).map(|idx| Ok(to.coords(&apply(from.element(idx))?))).collect()
    };

    let mut blocks = Vec::new();
    if graded {
        let r = max_raise;
        for &i in &weights {
            let src = TwistedSpace::new(&bases, &degs, k, &[i]);
            let tgt = TwistedSpace::new(&bases, &degs, k - 1, &[i + r]);
            let inc = if i >= r {
                TwistedSpace::new(&bases, &degs, k + 1, &[i - r])
            } else {
                TwistedSpace::new(&bases, &degs, k + 1, &[])
            };
            let wo: Vec<usize> = src.entries.iter().map(|e| e.0).collect();
            let b = level_blocks(&wo, &images(&src, &tgt)?, &images(&inc, &src)?, &[i]);
            blocks.push(TwistedBlock { weight: i, dim: b[0].dim, chain_dim: b[0].chain_dim });
        }
    } else {
        let src = TwistedSpace::new(&bases, &degs, k, &all);
        let tgt = TwistedSpace::new(&bases, &degs, k - 1, &all);
        let inc = TwistedSpace::new(&bases, &degs, k + 1, &all);
        let wo: Vec<usize> = src.entries.iter().map(|e| e.0).collect();
        for b in level_blocks(&wo, &images(&src, &tgt)?, &images(&inc, &src)?, &weights) {
            blocks.push(TwistedBlock { weight: b.weight, dim: b.dim, chain_dim: b.chain_dim });
        }
    }
    Ok(TwistedHomologyReport { n, complex_degree: k, graded, stable_max_weight: stable, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cinfty::tests::surface_cup;
    use crate::cinfty::{canonical_formal_connection, CInftyStructure};
    use crate::derivation::DerivationComplex;
    use crate::lie::{Generator, WeightTruncation};

    fn n(k: usize) -> WeightTruncation {
        WeightTruncation::new(k).unwrap()
    }

    #[test]
    fn sphere_matches_derivations() {
        let m = CInftyStructure::new(vec![Generator { name: "x".into(), degree: 2 }]).unwrap();
        let c = canonical_formal_connection(&m, n(4)).unwrap();
        let h1 = twisted_complex_homology(&c.dga, &c.connection, 1, WeightWindow::Stable).unwrap();
        assert_eq!(h1.total_dim(), 1);
        let h2 = twisted_complex_homology(&c.dga, &c.connection, 2, WeightWindow::Stable).unwrap();
        assert_eq!(h2.total_dim(), 0);
    }

    #[test]
    fn surface_matches_derivations() {
        let c = canonical_formal_connection(&surface_cup(2), n(4)).unwrap();
        let cx = DerivationComplex::new(c.connection.delta().clone());
        for deg in [0, 1] {
            let t = twisted_complex_homology(&c.dga, &c.connection, deg, WeightWindow::Stable).unwrap();
            let d = cx.homology(deg, WeightWindow::Stable).unwrap();
            for tb in &t.blocks {
                let db = d.blocks.iter().find(|b| b.weight == tb.weight).unwrap();
                assert_eq!((tb.weight, tb.dim), (db.weight, db.dim));
            }
        }
    }
}
