use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::local::{class_reduce, ClassReport, Cochain, LocalSystem};
use super::{FiniteSimplicialSet, Simplex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{serde_scalar, serde_scalar_matrix, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormTerm {
    #[serde(with = "serde_scalar")]
    pub coeff: Scalar,
    /// `ψ_{j_1}, ..., ψ_{j_p}` as row vectors on the reference fiber.
    #[serde(with = "serde_scalar_matrix")]
    pub functionals: Vec<Vec<Scalar>>,
}

/// A multilinear form `sum coeff · ψ_{j_1} ⊗ ... ⊗ ψ_{j_p}` on the reference
/// fiber.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicForm {
    pub fiber_dim: usize,
    pub degree: usize,
    pub terms: Vec<FormTerm>,
}

impl CharacteristicForm {
    pub fn new(fiber_dim: usize, degree: usize, terms: Vec<FormTerm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("characteristic forms have degree at least 1".into()));
        }
        for t in &terms {
            if t.functionals.len() != degree || t.functionals.iter().any(|f| f.len() != fiber_dim) {
                return Err(Error::InvalidInput(format!("every term needs {degree} functionals of length {fiber_dim}")));
            }
        }
        Ok(CharacteristicForm { fiber_dim, degree, terms })
    }

    /// The linear form with the given coefficients.
    pub fn linear(functional: Vec<Scalar>) -> Self {
        let r = functional.len();
        CharacteristicForm { fiber_dim: r, degree: 1, terms: vec![FormTerm { coeff: Scalar::one(), functionals: vec![functional] }] }
    }

    /// The `k`-th dual basis vector of an `r`-dimensional fiber.
    pub fn dual_basis(r: usize, k: usize) -> Self {
        let mut f = vec![Scalar::zero(); r];
        f[k] = Scalar::one();
        CharacteristicForm::linear(f)
    }

    /// `a ⊗ b - b ⊗ a`.
    pub fn wedge(a: Vec<Scalar>, b: Vec<Scalar>) -> Result<Self> {
        let r = a.len();
        CharacteristicForm::new(
            r,
            2,
            vec![
                FormTerm { coeff: Scalar::one(), functionals: vec![a.clone(), b.clone()] },
                FormTerm { coeff: -Scalar::one(), functionals: vec![b, a] },
            ],
        )
    }

    pub fn evaluate(&self, args: &[Vec<Scalar>]) -> Scalar {
        let mut total = Scalar::zero();
        for t in &self.terms {
            let mut prod = t.coeff.clone();
            for (f, x) in t.functionals.iter().zip(args) {
                prod *= f.iter().zip(x).map(|(a, b)| a * b).sum::<Scalar>();
            }
            total += prod;
        }
        total
    }

    /// `ψ(g·, ..., g·) = ψ` on all basis tuples.
    pub fn is_invariant_under(&self, g: &Matrix) -> bool {
        let r = self.fiber_dim;
        let cols: Vec<Vec<Scalar>> = (0..r).map(|j| (0..r).map(|i| g.get(i, j).clone()).collect()).collect();
        let units: Vec<Vec<Scalar>> = (0..r)
            .map(|j| (0..r).map(|i| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        let total = r.pow(self.degree as u32);
        for mut code in 0..total {
            let mut idx = Vec::with_capacity(self.degree);
            for _ in 0..self.degree {
                idx.push(code % r);
                code /= r;
            }
            let plain: Vec<_> = idx.iter().map(|&i| units[i].clone()).collect();
            let moved: Vec<_> = idx.iter().map(|&i| cols[i].clone()).collect();
            if self.evaluate(&plain) != self.evaluate(&moved) {
                return false;
            }
        }
        true
    }
}

/// Alexander-Whitney cup product of scalar cochains.
pub fn cup_product(k: &FiniteSimplicialSet, a: &Cochain, b: &Cochain) -> Cochain {
    let (p, q) = (a.degree, b.degree);
    let values = (0..k.count(p + q))
        .map(|s| {
            let x = Simplex::nondegenerate(p + q, s);
            let f = k.front(&x, p);
            let r = k.back(&x, q);
            let v = a.value_at(&f, 1)[0].clone() * &b.value_at(&r, 1)[0];
            vec![v]
        })
        .collect();
    Cochain { degree: p + q, values }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacteristicReport {
    pub degree: usize,
    pub cochain: Cochain,
    pub class: ClassReport,
}

/// `ψ(c, ..., c)`: each functional is evaluated on `g_{x_0}·c(σ)` and the
/// resulting scalar cochains are multiplied by the cup product.
pub fn cup_characteristic(
    k: &FiniteSimplicialSet,
    m: &LocalSystem,
    psi: &CharacteristicForm,
    c: &Cochain,
) -> Result<CharacteristicReport> {
    let triv = m
        .trivializations()
        .ok_or_else(|| Error::InvalidInput("characteristic evaluation needs vertex trivializations".into()))?;
    if triv.first().map_or(0, |g| g.rows) != psi.fiber_dim {
        return Err(Error::FiberMismatch("form and reference fiber have different dimensions".into()));
    }
    // with no declared generators, the edge holonomies stand in for them
    let generators: Vec<Matrix> = if m.generators().is_empty() {
        (0..k.count(1)).map(|e| m.holonomy(k, e)).collect::<Result<_>>()?
    } else {
        m.generators().to_vec()
    };
    for (i, g) in generators.iter().enumerate() {
        if !psi.is_invariant_under(g) {
            return Err(Error::NonInvariantForm { generator: i });
        }
    }
    let n = c.degree;
    if c.values.len() != k.count(n) {
        return Err(Error::FiberMismatch("cochain does not match the simplicial set".into()));
    }
    let moved: Vec<Vec<Scalar>> = c
        .values
        .iter()
        .enumerate()
        .map(|(s, v)| {
            let x0 = k.leading_vertex(&Simplex::nondegenerate(n, s));
            if v.len() != m.fiber_dim(x0) {
                return Err(Error::FiberMismatch(format!("value on `{}` has the wrong length", k.name(n, s))));
            }
            Ok(triv[x0].apply(v))
        })
        .collect::<Result<_>>()?;

    let degree = psi.degree * n;
    let scalars = LocalSystem::trivial(k, 1);
    let mut total = Cochain::zero(k, &scalars, degree);
    for t in &psi.terms {
        let mut acc: Option<Cochain> = None;
        for f in &t.functionals {
            let values = moved.iter().map(|v| vec![f.iter().zip(v).map(|(a, b)| a * b).sum()]).collect();
            let piece = Cochain { degree: n, values };
            acc = Some(match acc {
                None => piece,
                Some(a) => cup_product(k, &a, &piece),
            });
        }
        let term = acc.expect("degree >= 1").scale(&t.coeff);
        total = total.add(&term)?;
    }
    let class = class_reduce(k, &scalars, &total)?;
    Ok(CharacteristicReport { degree, cochain: total, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;
    use crate::scalar::int;
    use crate::simplicial::twisted_coboundary;
    use rand::Rng;

    #[test]
    fn sphere_euler_coordinate() {
        let k = FiniteSimplicialSet::sphere();
        let m = LocalSystem::trivial(&k, 1).with_trivializations(vec![Matrix::identity(1)], vec![]).unwrap();
        let c = Cochain { degree: 2, values: vec![vec![int(1)]] };
        let r = cup_characteristic(&k, &m, &CharacteristicForm::dual_basis(1, 0), &c).unwrap();
        assert!(r.class.is_cocycle && !r.class.is_trivial);
        assert_eq!(r.class.coords, Some(vec![int(1)]));
        let zero = CharacteristicForm::new(1, 1, vec![]).unwrap();
        let r = cup_characteristic(&k, &m, &zero, &c).unwrap();
        assert!(r.class.is_trivial);
    }

    #[test]
    fn wedge_on_a_triangle() {
        // degree-1 data on the standard 2-simplex, 2-dimensional fiber
        let k = FiniteSimplicialSet::standard(2);
        let m = LocalSystem::trivial(&k, 2).with_trivializations(vec![Matrix::identity(2); 3], vec![]).unwrap();
        // edges 01, 02, 12
        let c = Cochain { degree: 1, values: vec![vec![int(1), int(2)], vec![int(3), int(5)], vec![int(7), int(11)]] };
        let psi = CharacteristicForm::wedge(vec![int(1), int(0)], vec![int(0), int(1)]).unwrap();
        let r = cup_characteristic(&k, &m, &psi, &c).unwrap();
        // (a ∪ b - b ∪ a)(012) = a(01) b(12) - b(01) a(12) with a, b the two coordinates
        assert_eq!(r.cochain.values, vec![vec![int(1 * 11 - 2 * 7)]]);
    }

    #[test]
    fn non_invariant_form_rejected() {
        let k = FiniteSimplicialSet::circle();
        let m = LocalSystem::new(&k, vec![1], vec![Matrix::from_rows(vec![vec![int(2)]]).unwrap()])
            .unwrap()
            .with_trivializations(vec![Matrix::identity(1)], vec![])
            .unwrap();
        let c = Cochain { degree: 1, values: vec![vec![int(1)]] };
        let err = cup_characteristic(&k, &m, &CharacteristicForm::dual_basis(1, 0), &c);
        assert_eq!(err.unwrap_err(), Error::NonInvariantForm { generator: 0 });
    }

    /// Sign-flip monodromy on a 2-dimensional fiber, with the invariant
    /// form `e_1^*`.
    #[test]
    fn invariant_under_coboundaries_and_trivializations() {
        let k = FiniteSimplicialSet::torus();
        let mut flip = Matrix::identity(2);
        flip.set(0, 0, int(-1));
        let m0 = LocalSystem::new(&k, vec![2], vec![flip.clone(), Matrix::identity(2), flip.clone()]).unwrap();
        let mut r = rng(9);
        let psi1 = CharacteristicForm::dual_basis(2, 1);
        for _ in 0..10 {
            // every 2-cochain on the torus is a cocycle
            let c = Cochain { degree: 2, values: (0..2).map(|_| vec![int(r.gen_range(-3..=3)), int(r.gen_range(-3..=3))]).collect() };
            let d = Cochain { degree: 1, values: (0..3).map(|_| vec![int(r.gen_range(-3..=3)), int(r.gen_range(-3..=3))]).collect() };
            let c2 = c.add(&twisted_coboundary(&k, &m0, &d).unwrap()).unwrap();
            let m = m0.clone().with_trivializations(vec![Matrix::identity(2)], vec![flip.clone()]).unwrap();
            let a = cup_characteristic(&k, &m, &psi1, &c).unwrap();
            let a2 = cup_characteristic(&k, &m, &psi1, &c2).unwrap();
            assert_eq!(a.class.coords, a2.class.coords);
            // change the trivialization by the flip
            let mt = m0.clone().with_trivializations(vec![flip.clone()], vec![flip.clone()]).unwrap();
            let a3 = cup_characteristic(&k, &mt, &psi1, &c).unwrap();
            assert_eq!(a.class.coords, a3.class.coords);
        }
    }
}
