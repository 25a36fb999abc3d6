//! Weight-filtered homology of a finite complex given by sparse images.
//!
//! Source coordinates must be ordered by nondecreasing weight. For each
//! requested weight `i` we report `gr_i` of cycles modulo `gr_i` of
//! boundaries, using leading terms of reduced echelon bases.

use crate::linalg::{kernel, rref, Echelon, Quotient, Solver, SparseVec};

pub(crate) struct LevelBlock {
    pub weight: usize,
    pub dim: usize,
    pub chain_dim: usize,
    pub cycles: usize,
    pub boundaries: usize,
    /// Full cycles whose leading terms give a basis of the quotient.
    pub reps: Vec<SparseVec>,
    pub quotient: Quotient,
    /// Incoming images truncated to weights `<= weight`.
    pub solver: Solver,
}

/// `out_images[k]` is the differential of source basis vector `k`;
/// `in_images` are differentials of the previous chain group, written in
/// source coordinates.
pub(crate) fn level_blocks(
    weight_of: &[usize],
    out_images: &[SparseVec],
    in_images: &[SparseVec],
    weights: &[usize],
) -> Vec<LevelBlock> {
    debug_assert!(weight_of.windows(2).all(|w| w[0] <= w[1]));
    let z = kernel(out_images);
    let b = rref(in_images);
    let lead = |v: &SparseVec| weight_of[*v.keys().next().expect("nonzero vector")];
    let mut out = Vec::new();
    for &i in weights {
        let proj = |v: &SparseVec| -> SparseVec {
            v.iter()
                .filter(|(k, _)| weight_of[**k] == i)
                .map(|(k, c)| (*k, c.clone()))
                .collect()
        };
        let zi: Vec<&SparseVec> = z.iter().filter(|v| lead(v) == i).collect();
        let bi: Vec<SparseVec> = b.iter().filter(|v| lead(v) == i).map(proj).collect();
        let mut ech = Echelon::new();
        for v in &bi {
            ech.insert(v.clone(), SparseVec::new());
        }
        let mut reps = Vec::new();
        let mut rep_lead = Vec::new();
        for v in &zi {
            let p = proj(v);
            if ech.insert(p.clone(), SparseVec::new()) {
                reps.push((*v).clone());
                rep_lead.push(p);
            }
        }
        let restricted: Vec<SparseVec> = in_images
            .iter()
            .map(|v| {
                v.iter()
                    .filter(|(k, _)| weight_of[**k] <= i)
                    .map(|(k, c)| (*k, c.clone()))
                    .collect()
            })
            .collect();
        out.push(LevelBlock {
            weight: i,
            dim: reps.len(),
            chain_dim: weight_of.iter().filter(|&&w| w == i).count(),
            cycles: zi.len(),
            boundaries: bi.len(),
            reps,
            quotient: Quotient::new(&bi, &rep_lead),
            solver: Solver::new(&restricted),
        });
    }
    out
}
