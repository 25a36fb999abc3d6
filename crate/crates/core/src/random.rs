//! Seeded random instances for property tests and the CLI `--seed` flag.

use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derivation::{DerSpace, Derivation};
use crate::lie::LieBases;
use crate::linalg::{Matrix, SparseVec};
use crate::scalar::{int, Scalar};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero integer in `[-bound, bound]`.
pub fn nonzero_int<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return int(c);
        }
    }
}

/// A random combination of at most `terms` basis vectors of `space`.
pub fn random_vector<R: Rng>(rng: &mut R, dim: usize, terms: usize) -> SparseVec {
    let mut v = SparseVec::new();
    if dim == 0 {
        return v;
    }
    for _ in 0..terms {
        let k = rng.gen_range(0..dim);
        v.insert(k, nonzero_int(rng, 3));
    }
    v
}

/// A random derivation of degree `n` supported in the given weights.
pub fn random_derivation<R: Rng>(
    rng: &mut R,
    bases: &Arc<LieBases>,
    n: i64,
    weights: &[usize],
    terms: usize,
) -> Derivation {
    let sp = DerSpace::new(bases, n, weights);
    sp.combination(&random_vector(rng, sp.dim(), terms))
}

/// A symplectic transvection `T_u(z) = z + c <z, u> u` on `2g` coordinates
/// ordered `x1, y1, ..., xg, yg`, with `<x_i, y_i> = 1`, padded by an
/// identity block of size `extra`.
pub fn random_transvection<R: Rng>(rng: &mut R, genus: usize, extra: usize) -> Matrix {
    let q = 2 * genus;
    let mut u = vec![Scalar::zero(); q];
    while u.iter().all(Zero::is_zero) {
        for c in u.iter_mut() {
            *c = int(rng.gen_range(-1..=1));
        }
    }
    let c = nonzero_int(rng, 2);
    transvection(genus, extra, &u, &c)
}

/// The matrix of `z -> z + c <z, u> u` (columns are images).
pub fn transvection(genus: usize, extra: usize, u: &[Scalar], c: &Scalar) -> Matrix {
    let q = 2 * genus;
    let mut m = Matrix::identity(q + extra);
    for col in 0..q {
        // <e_col, u>
        let pair = if col % 2 == 0 { u[col + 1].clone() } else { -u[col - 1].clone() };
        if pair.is_zero() {
            continue;
        }
        for row in 0..q {
            let add = c * &pair * &u[row];
            let cur = m.get(row, col).clone();
            m.set(row, col, cur + add);
        }
    }
    m
}
