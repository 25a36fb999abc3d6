use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{FiniteSimplicialSet, Simplex};
use crate::error::{Error, Result};
use crate::linalg::{kernel, Echelon, Matrix, Quotient, Solver, SparseVec};
use crate::scalar::{serde_scalar_matrix, Scalar};

/// Vertex fibers with an invertible matrix `M(γ)` from the fiber over
/// `∂_1 γ` to the fiber over `∂_0 γ` for each nondegenerate edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSystem {
    fiber_dims: Vec<usize>,
    edges: Vec<Matrix>,
    edge_inverses: Vec<Matrix>,
    trivializations: Option<Vec<Matrix>>,
    generators: Vec<Matrix>,
}

impl LocalSystem {
    /// Checks sizes, invertibility and `M(x_12) M(x_01) = M(x_02)` on every
    /// nondegenerate 2-simplex.
    pub fn new(k: &FiniteSimplicialSet, fiber_dims: Vec<usize>, edges: Vec<Matrix>) -> Result<Self> {
        if fiber_dims.len() != k.count(0) {
            return Err(Error::FiberMismatch(format!("{} fibers for {} vertices", fiber_dims.len(), k.count(0))));
        }
        if edges.len() != k.count(1) {
            return Err(Error::FiberMismatch(format!("{} edge maps for {} edges", edges.len(), k.count(1))));
        }
        let mut edge_inverses = Vec::with_capacity(edges.len());
        for (e, m) in edges.iter().enumerate() {
            let fs = k.faces_of(1, e);
            let (src, tgt) = (fiber_dims[fs[1].base], fiber_dims[fs[0].base]);
            if m.rows != tgt || m.cols != src {
                return Err(Error::FiberMismatch(format!(
                    "edge `{}` needs a {tgt}x{src} matrix, got {}x{}",
                    k.name(1, e),
                    m.rows,
                    m.cols
                )));
            }
            edge_inverses.push(m.inverse()?);
        }
        let ls = LocalSystem { fiber_dims, edges, edge_inverses, trivializations: None, generators: Vec::new() };
        for s in 0..k.count(2) {
            let fs = k.faces_of(2, s);
            let lhs = ls.edge_matrix(&fs[0]).mul(&ls.edge_matrix(&fs[2]))?;
            if lhs != ls.edge_matrix(&fs[1]) {
                return Err(Error::InvalidInput(format!("local system is not functorial on `{}`", k.name(2, s))));
            }
        }
        Ok(ls)
    }

    /// Constant coefficients of dimension `dim`.
    pub fn trivial(k: &FiniteSimplicialSet, dim: usize) -> Self {
        let edges = vec![Matrix::identity(dim); k.count(1)];
        LocalSystem::new(k, vec![dim; k.count(0)], edges).expect("constant local system")
    }

    /// Attach isomorphisms `g_x` from each vertex fiber to a common reference
    /// fiber, and generators of the holonomy group acting on it.
    pub fn with_trivializations(mut self, trivializations: Vec<Matrix>, generators: Vec<Matrix>) -> Result<Self> {
        if trivializations.len() != self.fiber_dims.len() {
            return Err(Error::FiberMismatch("one trivialization per vertex is required".into()));
        }
        let r = trivializations.first().map_or(0, |g| g.rows);
        for (v, g) in trivializations.iter().enumerate() {
            if g.rows != r || g.cols != self.fiber_dims[v] || !g.is_invertible() {
                return Err(Error::FiberMismatch(format!("trivialization at vertex {v} is not an isomorphism onto the reference fiber")));
            }
        }
        for h in &generators {
            if h.rows != r || h.cols != r {
                return Err(Error::FiberMismatch("holonomy generators must act on the reference fiber".into()));
            }
        }
        self.trivializations = Some(trivializations);
        self.generators = generators;
        Ok(self)
    }

    pub fn fiber_dims(&self) -> &[usize] {
        &self.fiber_dims
    }

    pub fn fiber_dim(&self, v: usize) -> usize {
        self.fiber_dims[v]
    }

    pub fn edges(&self) -> &[Matrix] {
        &self.edges
    }

    pub fn trivializations(&self) -> Option<&[Matrix]> {
        self.trivializations.as_deref()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    /// `M(γ)` for an arbitrary 1-simplex; degenerate edges give the identity.
    pub fn edge_matrix(&self, e: &Simplex) -> Matrix {
        if e.is_degenerate() {
            Matrix::identity(self.fiber_dims[e.base])
        } else {
            self.edges[e.base].clone()
        }
    }

    fn edge_inverse(&self, e: &Simplex) -> Matrix {
        if e.is_degenerate() {
            Matrix::identity(self.fiber_dims[e.base])
        } else {
            self.edge_inverses[e.base].clone()
        }
    }

    /// `g_{x_0} M(γ)^{-1} g_{x_1}^{-1}` on the reference fiber.
    pub fn holonomy(&self, k: &FiniteSimplicialSet, e: usize) -> Result<Matrix> {
        let g = self
            .trivializations
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("local system has no trivializations".into()))?;
        let fs = k.faces_of(1, e);
        g[fs[1].base].mul(&self.edge_inverses[e])?.mul(&g[fs[0].base].inverse()?)
    }
}

/// A normalized cochain: one fiber vector per nondegenerate simplex, living
/// over its leading vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    #[serde(with = "serde_scalar_matrix")]
    pub values: Vec<Vec<Scalar>>,
}

impl Cochain {
    pub fn zero(k: &FiniteSimplicialSet, m: &LocalSystem, degree: usize) -> Self {
        let values = (0..k.count(degree))
            .map(|s| vec![Scalar::zero(); m.fiber_dim(k.leading_vertex(&Simplex::nondegenerate(degree, s)))])
            .collect();
        Cochain { degree, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(Zero::is_zero)
    }

    /// The value on any simplex; zero on degenerate ones.
    pub fn value_at(&self, s: &Simplex, fiber_dim: usize) -> Vec<Scalar> {
        if s.is_degenerate() {
            vec![Scalar::zero(); fiber_dim]
        } else {
            self.values[s.base].clone()
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, &Scalar::one())
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.combine(other, &-Scalar::one())
    }

    fn combine(&self, other: &Cochain, c: &Scalar) -> Result<Cochain> {
        if self.degree != other.degree || self.values.len() != other.values.len() {
            return Err(Error::FiberMismatch("cochains of different shapes".into()));
        }
        let mut values = Vec::with_capacity(self.values.len());
        for (a, b) in self.values.iter().zip(&other.values) {
            if a.len() != b.len() {
                return Err(Error::FiberMismatch("cochains of different shapes".into()));
            }
            values.push(a.iter().zip(b).map(|(x, y)| x + c * y).collect());
        }
        Ok(Cochain { degree: self.degree, values })
    }

    pub fn scale(&self, c: &Scalar) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|v| v.iter().map(|x| c * x).collect()).collect() }
    }
}

/// Coordinates of `C^n`: `(simplex, component)` flattened in simplex order.
struct Layout {
    offsets: Vec<usize>,
    dims: Vec<usize>,
    total: usize,
}

impl Layout {
    fn new(k: &FiniteSimplicialSet, m: &LocalSystem, n: usize) -> Self {
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        let mut total = 0;
        for s in 0..k.count(n) {
            let d = m.fiber_dim(k.leading_vertex(&Simplex::nondegenerate(n, s)));
            offsets.push(total);
            dims.push(d);
            total += d;
        }
        Layout { offsets, dims, total }
    }

    fn flatten(&self, c: &Cochain) -> SparseVec {
        let mut v = SparseVec::new();
        for (s, vals) in c.values.iter().enumerate() {
            for (j, x) in vals.iter().enumerate() {
                if !x.is_zero() {
                    v.insert(self.offsets[s] + j, x.clone());
                }
            }
        }
        v
    }

    fn unflatten(&self, degree: usize, v: &SparseVec) -> Cochain {
        let mut values: Vec<Vec<Scalar>> = self.dims.iter().map(|&d| vec![Scalar::zero(); d]).collect();
        for (s, (&off, &d)) in self.offsets.iter().zip(&self.dims).enumerate() {
            for j in 0..d {
                if let Some(x) = v.get(&(off + j)) {
                    values[s][j] = x.clone();
                }
            }
        }
        Cochain { degree, values }
    }

    fn unit(&self, degree: usize, idx: usize) -> Cochain {
        let mut v = SparseVec::new();
        v.insert(idx, Scalar::one());
        self.unflatten(degree, &v)
    }
}

fn check_shape(k: &FiniteSimplicialSet, m: &LocalSystem, c: &Cochain) -> Result<()> {
    if c.values.len() != k.count(c.degree) {
        return Err(Error::FiberMismatch(format!(
            "degree-{} cochain has {} values for {} simplices",
            c.degree,
            c.values.len(),
            k.count(c.degree)
        )));
    }
    for (s, v) in c.values.iter().enumerate() {
        let x = Simplex::nondegenerate(c.degree, s);
        let d = m.fiber_dim(k.leading_vertex(&x));
        if v.len() != d {
            return Err(Error::FiberMismatch(format!(
                "value on `{}` has {} entries; the fiber over its leading vertex has dimension {d}",
                k.name(c.degree, s),
                v.len()
            )));
        }
    }
    Ok(())
}

/// `(δc)(x) = M(x_01)^{-1} c(∂_0 x) + sum_{i>=1} (-1)^i c(∂_i x)`.
pub fn twisted_coboundary(k: &FiniteSimplicialSet, m: &LocalSystem, c: &Cochain) -> Result<Cochain> {
    check_shape(k, m, c)?;
    let n = c.degree;
    let mut values = Vec::with_capacity(k.count(n + 1));
    for s in 0..k.count(n + 1) {
        let x = Simplex::nondegenerate(n + 1, s);
        let v0 = k.leading_vertex(&x);
        let mut out = vec![Scalar::zero(); m.fiber_dim(v0)];
        for i in 0..=n + 1 {
            let f = k.face(&x, i);
            if f.is_degenerate() {
                continue;
            }
            let val = &c.values[f.base];
            if i == 0 {
                let t = m.edge_inverse(&k.front(&x, 1)).apply(val);
                for (o, t) in out.iter_mut().zip(t) {
                    *o += t;
                }
            } else {
                let neg = i % 2 == 1;
                for (o, t) in out.iter_mut().zip(val) {
                    if neg {
                        *o -= t;
                    } else {
                        *o += t;
                    }
                }
            }
        }
        values.push(out);
    }
    Ok(Cochain { degree: n + 1, values })
}

/// `H^n(K; M)` with chosen representatives and the data to reduce cocycles.
#[derive(Clone, Debug)]
pub struct LocalCohomology {
    pub degree: usize,
    pub dim: usize,
    pub cochain_dim: usize,
    pub cocycles: usize,
    pub coboundaries: usize,
    pub representatives: Vec<Cochain>,
    quotient: Quotient,
    solver: Solver,
}

/// Twisted cohomology in degree `n` by exact ranks on normalized cochains.
pub fn local_cohomology(k: &FiniteSimplicialSet, m: &LocalSystem, n: usize) -> Result<LocalCohomology> {
    let layout = Layout::new(k, m, n);
    let upper = Layout::new(k, m, n + 1);
    let mut images = Vec::with_capacity(layout.total);
    for idx in 0..layout.total {
        images.push(upper.flatten(&twisted_coboundary(k, m, &layout.unit(n, idx))?));
    }
    let cycles = kernel(&images);
    let lower = if n == 0 { Layout { offsets: vec![], dims: vec![], total: 0 } } else { Layout::new(k, m, n - 1) };
    let mut bimages = Vec::with_capacity(lower.total);
    for idx in 0..lower.total {
        bimages.push(layout.flatten(&twisted_coboundary(k, m, &lower.unit(n - 1, idx))?));
    }
    let mut ech = Echelon::new();
    for b in &bimages {
        ech.insert(b.clone(), SparseVec::new());
    }
    let mut reps = Vec::new();
    for z in &cycles {
        if ech.insert(z.clone(), SparseVec::new()) {
            reps.push(z.clone());
        }
    }
    let solver = Solver::new(&bimages);
    Ok(LocalCohomology {
        degree: n,
        dim: reps.len(),
        cochain_dim: layout.total,
        cocycles: cycles.len(),
        coboundaries: solver.rank(),
        representatives: reps.iter().map(|r| layout.unflatten(n, r)).collect(),
        quotient: Quotient::new(&bimages, &reps),
        solver,
    })
}

impl LocalCohomology {
    /// Class coordinates of a cocycle in the representative basis.
    pub fn class_coords(&self, k: &FiniteSimplicialSet, m: &LocalSystem, c: &Cochain) -> Option<Vec<Scalar>> {
        let layout = Layout::new(k, m, self.degree);
        self.quotient.coords(&layout.flatten(c))
    }

    /// Some `b` with `δb = c`, if there is one.
    pub fn solve(&self, k: &FiniteSimplicialSet, m: &LocalSystem, c: &Cochain) -> Option<Cochain> {
        if self.degree == 0 {
            return None;
        }
        let layout = Layout::new(k, m, self.degree);
        let lower = Layout::new(k, m, self.degree - 1);
        self.solver.solve(&layout.flatten(c)).map(|b| lower.unflatten(self.degree - 1, &b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub degree: usize,
    pub is_cocycle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_simplex: Option<String>,
    pub is_trivial: bool,
    /// `b` with `δb = c` when the class is trivial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Cochain>,
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_scalars")]
    pub coords: Option<Vec<Scalar>>,
}

mod opt_scalars {
    use serde::Serializer;

    use crate::scalar::{format_scalar, Scalar};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(format_scalar)),
            None => s.serialize_none(),
        }
    }
}

fn first_nonzero(k: &FiniteSimplicialSet, c: &Cochain) -> Option<String> {
    c.values
        .iter()
        .position(|v| v.iter().any(|x| !x.is_zero()))
        .map(|s| k.name(c.degree, s).to_string())
}

/// Decide whether `c` is a cocycle and, if so, whether it is a coboundary.
pub fn class_reduce(k: &FiniteSimplicialSet, m: &LocalSystem, c: &Cochain) -> Result<ClassReport> {
    let dc = twisted_coboundary(k, m, c)?;
    if let Some(bad) = first_nonzero(k, &dc) {
        return Ok(ClassReport {
            degree: c.degree,
            is_cocycle: false,
            failing_simplex: Some(bad),
            is_trivial: false,
            certificate: None,
            coords: None,
        });
    }
    let h = local_cohomology(k, m, c.degree)?;
    let coords = h.class_coords(k, m, c).ok_or_else(|| Error::InvalidInput("cocycle outside the cohomology span".into()))?;
    let trivial = coords.iter().all(Zero::is_zero);
    let certificate = if trivial {
        if c.degree == 0 {
            // a trivial 0-cocycle is zero, there is nothing to certify
            None
        } else {
            let b = h.solve(k, m, c).ok_or_else(|| Error::InvalidInput("trivial class without a primitive".into()))?;
            debug_assert_eq!(&twisted_coboundary(k, m, &b)?, c);
            Some(b)
        }
    } else {
        None
    };
    Ok(ClassReport { degree: c.degree, is_cocycle: true, failing_simplex: None, is_trivial: trivial, certificate, coords: Some(coords) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_simplex: Option<String>,
}

/// Checks `δd = c1 - c0` exactly.
pub fn verify_difference(
    k: &FiniteSimplicialSet,
    m: &LocalSystem,
    c0: &Cochain,
    c1: &Cochain,
    d: &Cochain,
) -> Result<DifferenceReport> {
    if c0.degree != d.degree + 1 || c1.degree != c0.degree {
        return Err(Error::InvalidInput("verify_difference needs c0, c1 in degree n+1 and d in degree n".into()));
    }
    check_shape(k, m, c0)?;
    check_shape(k, m, c1)?;
    let diff = twisted_coboundary(k, m, d)?.sub(&c1.sub(c0)?)?;
    let bad = first_nonzero(k, &diff);
    Ok(DifferenceReport { passed: bad.is_none(), failing_simplex: bad })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{nonzero_int, rng};
    use crate::scalar::{frac, int};
    use rand::Rng;

    fn scalar_matrix(x: Scalar) -> Matrix {
        Matrix::from_rows(vec![vec![x]]).unwrap()
    }

    fn circle(lambda: Scalar) -> (FiniteSimplicialSet, LocalSystem) {
        let k = FiniteSimplicialSet::circle();
        let m = LocalSystem::new(&k, vec![1], vec![scalar_matrix(lambda)]).unwrap();
        (k, m)
    }

    #[test]
    fn circle_coboundary() {
        let (k, m) = circle(int(2));
        let f = Cochain { degree: 0, values: vec![vec![int(1)]] };
        let df = twisted_coboundary(&k, &m, &f).unwrap();
        assert_eq!(df.values, vec![vec![frac(-1, 2)]]);
    }

    #[test]
    fn circle_cohomology() {
        let (k, m) = circle(int(1));
        assert_eq!(local_cohomology(&k, &m, 0).unwrap().dim, 1);
        assert_eq!(local_cohomology(&k, &m, 1).unwrap().dim, 1);
        let (k, m) = circle(int(2));
        assert_eq!(local_cohomology(&k, &m, 0).unwrap().dim, 0);
        assert_eq!(local_cohomology(&k, &m, 1).unwrap().dim, 0);
    }

    #[test]
    fn sphere_cohomology() {
        let k = FiniteSimplicialSet::sphere();
        let m = LocalSystem::trivial(&k, 1);
        let dims: Vec<usize> = (0..3).map(|n| local_cohomology(&k, &m, n).unwrap().dim).collect();
        assert_eq!(dims, vec![1, 0, 1]);
        let c = Cochain { degree: 2, values: vec![vec![int(1)]] };
        let r = class_reduce(&k, &m, &c).unwrap();
        assert!(r.is_cocycle && !r.is_trivial);
        assert_eq!(r.coords, Some(vec![int(1)]));
    }

    #[test]
    fn torus_cohomology() {
        let k = FiniteSimplicialSet::torus();
        let m = LocalSystem::trivial(&k, 1);
        let dims: Vec<usize> = (0..3).map(|n| local_cohomology(&k, &m, n).unwrap().dim).collect();
        assert_eq!(dims, vec![1, 2, 1]);
    }

    fn random_matrix<R: Rng>(r: &mut R, d: usize) -> Matrix {
        loop {
            let mut m = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    m.set(i, j, int(r.gen_range(-2..=2)));
                }
            }
            if m.is_invertible() {
                return m;
            }
        }
    }

    /// Edge maps `T_{∂_0} T_{∂_1}^{-1}` from random vertex frames, with
    /// randomly chosen fiber dimension.
    fn random_gauge_system<R: Rng>(r: &mut R, k: &FiniteSimplicialSet) -> LocalSystem {
        let d = r.gen_range(1..=3);
        let frames: Vec<Matrix> = (0..k.count(0)).map(|_| random_matrix(r, d)).collect();
        let edges = (0..k.count(1))
            .map(|e| {
                let fs = k.faces_of(1, e);
                frames[fs[0].base].mul(&frames[fs[1].base].inverse().unwrap()).unwrap()
            })
            .collect();
        LocalSystem::new(k, vec![d; k.count(0)], edges).unwrap()
    }

    fn random_cochain<R: Rng>(r: &mut R, k: &FiniteSimplicialSet, m: &LocalSystem, n: usize) -> Cochain {
        let mut c = Cochain::zero(k, m, n);
        for v in c.values.iter_mut() {
            for x in v.iter_mut() {
                *x = int(r.gen_range(-3..=3));
            }
        }
        c
    }

    #[test]
    fn coboundary_squares_to_zero() {
        let mut r = rng(1);
        let d3 = FiniteSimplicialSet::standard(3);
        for _ in 0..10 {
            let m = random_gauge_system(&mut r, &d3);
            for n in 0..2 {
                let c = random_cochain(&mut r, &d3, &m, n);
                let dd = twisted_coboundary(&d3, &m, &twisted_coboundary(&d3, &m, &c).unwrap()).unwrap();
                assert!(dd.is_zero());
            }
        }
        let t = FiniteSimplicialSet::torus();
        for _ in 0..10 {
            // commuting monodromies: powers of one matrix
            let a = random_matrix(&mut r, 2);
            let b = a.mul(&a).unwrap();
            let c = b.mul(&a).unwrap();
            let m = LocalSystem::new(&t, vec![2], vec![a, b, c]).unwrap();
            let f = random_cochain(&mut r, &t, &m, 0);
            let dd = twisted_coboundary(&t, &m, &twisted_coboundary(&t, &m, &f).unwrap()).unwrap();
            assert!(dd.is_zero());
        }
    }

    #[test]
    fn non_functorial_rejected() {
        let t = FiniteSimplicialSet::torus();
        let bad = LocalSystem::new(&t, vec![1], vec![scalar_matrix(int(2)), scalar_matrix(int(3)), scalar_matrix(int(5))]);
        assert!(bad.is_err());
    }

    #[test]
    fn certificates_and_differences() {
        let mut r = rng(2);
        let d3 = FiniteSimplicialSet::standard(3);
        for _ in 0..5 {
            let m = random_gauge_system(&mut r, &d3);
            let b = random_cochain(&mut r, &d3, &m, 1);
            let c = twisted_coboundary(&d3, &m, &b).unwrap();
            let rep = class_reduce(&d3, &m, &c).unwrap();
            assert!(rep.is_cocycle && rep.is_trivial);
            let cert = rep.certificate.unwrap();
            assert_eq!(twisted_coboundary(&d3, &m, &cert).unwrap(), c);

            let c0 = random_cochain(&mut r, &d3, &m, 2);
            let c1 = c0.add(&c).unwrap();
            assert!(verify_difference(&d3, &m, &c0, &c1, &b).unwrap().passed);
            assert!(verify_difference(&d3, &m, &c0, &c0, &Cochain::zero(&d3, &m, 1)).unwrap().passed);
            let mut junk = b.clone();
            junk.values[0][0] += nonzero_int(&mut r, 2);
            let rep = verify_difference(&d3, &m, &c0, &c1, &junk).unwrap();
            assert!(!rep.passed && rep.failing_simplex.is_some());
        }
    }

    #[test]
    fn non_cocycle_reported() {
        let k = FiniteSimplicialSet::standard(2);
        let m = LocalSystem::trivial(&k, 1);
        let mut c = Cochain::zero(&k, &m, 1);
        c.values[0][0] = int(1);
        let r = class_reduce(&k, &m, &c).unwrap();
        assert!(!r.is_cocycle);
        assert_eq!(r.failing_simplex.as_deref(), Some("012"));
    }

    #[test]
    fn fiber_mismatch_rejected() {
        let (k, m) = circle(int(1));
        let c = Cochain { degree: 1, values: vec![vec![int(1), int(2)]] };
        assert!(matches!(twisted_coboundary(&k, &m, &c), Err(Error::FiberMismatch(_))));
    }
}
