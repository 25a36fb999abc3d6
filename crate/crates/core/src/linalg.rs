//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are `BTreeMap<usize, Scalar>` with no stored zeros. [`Echelon`]
//! keeps a fully reduced row echelon form and can carry a "tag" vector per
//! row, which records how the row was built from inserted vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type SparseVec = BTreeMap<usize, Scalar>;

/// `y += a * x`, dropping entries that cancel.
pub fn axpy(y: &mut SparseVec, a: &Scalar, x: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let add = a * v;
        match y.get_mut(k) {
            Some(e) => {
                *e += add;
                if e.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                y.insert(*k, add);
            }
        }
    }
}

pub fn scale(x: &SparseVec, a: &Scalar) -> SparseVec {
    if a.is_zero() {
        return SparseVec::new();
    }
    x.iter().map(|(k, v)| (*k, v * a)).collect()
}

pub fn unit(k: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(k, Scalar::one());
    v
}

#[derive(Clone, Debug)]
struct Row {
    vec: SparseVec,
    tag: SparseVec,
}

/// Incremental reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Reduce `v` (with its tag) against the stored rows.
    pub fn reduce(&self, mut v: SparseVec, mut tag: SparseVec) -> (SparseVec, SparseVec) {
        let hits: Vec<(usize, Scalar)> = v
            .iter()
            .filter(|(k, _)| self.rows.contains_key(k))
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        for (p, c) in hits {
            let row = &self.rows[&p];
            let m = -c;
            axpy(&mut v, &m, &row.vec);
            axpy(&mut tag, &m, &row.tag);
        }
        (v, tag)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v.clone(), SparseVec::new()).0.is_empty()
    }

    /// Insert a vector; returns false if it was already in the span.
    pub fn insert(&mut self, v: SparseVec, tag: SparseVec) -> bool {
        let (r, t) = self.reduce(v, tag);
        self.insert_reduced(r, t)
    }

    fn insert_reduced(&mut self, r: SparseVec, t: SparseVec) -> bool {
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = Scalar::one() / lead;
        let r = scale(&r, &inv);
        let t = scale(&t, &inv);
        for row in self.rows.values_mut() {
            if let Some(c) = row.vec.get(&p).cloned() {
                let m = -c;
                axpy(&mut row.vec, &m, &r);
                axpy(&mut row.tag, &m, &t);
            }
        }
        self.rows.insert(p, Row { vec: r, tag: t });
        true
    }

    /// Rows in pivot order.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.rows.values().map(|r| r.vec.clone()).collect()
    }

    pub fn rows_with_tags(&self) -> Vec<(usize, SparseVec, SparseVec)> {
        self.rows
            .iter()
            .map(|(p, r)| (*p, r.vec.clone(), r.tag.clone()))
            .collect()
    }
}

/// Reduced row echelon basis of the span of `vectors`, in pivot order.
pub fn rref(vectors: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone(), SparseVec::new());
    }
    e.basis()
}

pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone(), SparseVec::new());
    }
    e.rank()
}

/// Kernel of the map sending basis vector `j` to `images[j]`, as an RREF
/// basis over the source coordinates.
pub fn kernel(images: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    let mut ker = Vec::new();
    for (j, img) in images.iter().enumerate() {
        let (r, t) = e.reduce(img.clone(), unit(j));
        if r.is_empty() {
            ker.push(t);
        } else {
            e.insert_reduced(r, t);
        }
    }
    rref(&ker)
}

/// A linear solver for `sum_j x_j images[j] = target`.
///
/// The returned solution is canonical: it only uses the columns that are
/// pivots of a left-to-right greedy basis of the image.
#[derive(Clone, Debug)]
pub struct Solver {
    ech: Echelon,
}

impl Solver {
    pub fn new(images: &[SparseVec]) -> Self {
        let mut ech = Echelon::new();
        for (j, img) in images.iter().enumerate() {
            let (r, t) = ech.reduce(img.clone(), unit(j));
            if !r.is_empty() {
                ech.insert_reduced(r, t);
            }
        }
        Solver { ech }
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    pub fn solve(&self, target: &SparseVec) -> Option<SparseVec> {
        let (r, t) = self.ech.reduce(target.clone(), SparseVec::new());
        if r.is_empty() {
            Some(t.iter().map(|(k, v)| (*k, -v.clone())).collect())
        } else {
            None
        }
    }
}

/// Coordinates of cycles modulo boundaries in a chosen set of class
/// representatives.
#[derive(Clone, Debug)]
pub struct Quotient {
    ech: Echelon,
    reps: usize,
}

impl Quotient {
    /// `boundaries` span the subspace we divide by; `reps` must be
    /// independent modulo it.
    pub fn new(boundaries: &[SparseVec], reps: &[SparseVec]) -> Self {
        let mut ech = Echelon::new();
        for b in boundaries {
            ech.insert(b.clone(), SparseVec::new());
        }
        for (k, r) in reps.iter().enumerate() {
            ech.insert(r.clone(), unit(k));
        }
        Quotient { ech, reps: reps.len() }
    }

    pub fn dim(&self) -> usize {
        self.reps
    }

    /// `None` when `v` is outside cycles-mod-boundaries span.
    pub fn coords(&self, v: &SparseVec) -> Option<Vec<Scalar>> {
        let (r, t) = self.ech.reduce(v.clone(), SparseVec::new());
        if !r.is_empty() {
            return None;
        }
        let mut out = vec![Scalar::zero(); self.reps];
        for (k, c) in t {
            out[k] = -c;
        }
        Some(out)
    }
}

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows) && self.is_square()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(Error::NotInvertible)?;
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = Scalar::one() / a.get(col, col);
            for j in 0..n {
                a.data[col * n + j] *= &p;
                inv.data[col * n + j] *= &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let s = &a.data[col * n + j] * &f;
                    a.data[r * n + j] -= s;
                    let s = &inv.data[col * n + j] * &f;
                    inv.data[r * n + j] -= s;
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn v(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|(k, c)| (*k, int(*c))).collect()
    }

    #[test]
    fn kernel_of_projection() {
        // e0 -> e0, e1 -> e0, e2 -> 0
        let imgs = vec![v(&[(0, 1)]), v(&[(0, 1)]), v(&[])];
        let k = kernel(&imgs);
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], v(&[(0, 1), (1, -1)]));
        assert_eq!(k[1], v(&[(2, 1)]));
    }

    #[test]
    fn solver_is_canonical() {
        let imgs = vec![v(&[(0, 1)]), v(&[(0, 2)]), v(&[(1, 1)])];
        let s = Solver::new(&imgs);
        let x = s.solve(&v(&[(0, 4), (1, 1)])).unwrap();
        assert_eq!(x, v(&[(0, 4), (2, 1)]));
        assert!(s.solve(&v(&[(3, 1)])).is_none());
    }

    #[test]
    fn quotient_coordinates() {
        let q = Quotient::new(&[v(&[(0, 1), (1, 1)])], &[v(&[(0, 1)])]);
        assert_eq!(q.coords(&v(&[(1, 3)])).unwrap(), vec![int(-3)]);
        assert!(q.coords(&v(&[(2, 1)])).is_none());
    }

    #[test]
    fn matrix_inverse() {
        let m = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let i = m.inverse().unwrap();
        assert!(m.mul(&i).unwrap().is_identity());
        let s = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert!(s.inverse().is_err());
    }
}
