use std::sync::Arc;

use num_traits::{One, Zero};

use super::{ChenDifferential, Derivation};
use crate::error::{Error, Result};
use crate::lie::{same_gens, GeneratorSet, TensorElement, WeightTruncation, Word};
use crate::linalg::Matrix;
use crate::scalar::{factorial, int, Scalar};

/// A filtered automorphism of the truncated free Lie algebra, stored by its
/// generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredAutomorphism {
    gens: Arc<GeneratorSet>,
    images: Vec<TensorElement>,
    trunc: WeightTruncation,
}

impl FilteredAutomorphism {
    pub fn identity(gens: &Arc<GeneratorSet>, trunc: WeightTruncation) -> Self {
        FilteredAutomorphism {
            gens: gens.clone(),
            images: (0..gens.len()).map(|i| TensorElement::generator(gens, i)).collect(),
            trunc,
        }
    }

    /// Validates degrees, primitivity and invertibility of the linear part.
    pub fn new(gens: &Arc<GeneratorSet>, images: Vec<TensorElement>, trunc: WeightTruncation) -> Result<Self> {
        let d = Derivation::new(gens, 0, images, trunc)?;
        let phi = FilteredAutomorphism { gens: gens.clone(), images: d.images, trunc };
        phi.linear_part().inverse()?;
        Ok(phi)
    }

    /// The linear automorphism `x_i -> sum_j m[j][i] x_j`.
    pub fn from_linear(gens: &Arc<GeneratorSet>, m: &Matrix, trunc: WeightTruncation) -> Result<Self> {
        let iso = LinearIso::new(gens, m.clone())?;
        Ok(iso.automorphism(trunc))
    }

    pub fn gens(&self) -> &Arc<GeneratorSet> {
        &self.gens
    }

    pub fn trunc(&self) -> WeightTruncation {
        self.trunc
    }

    pub fn image(&self, i: usize) -> &TensorElement {
        &self.images[i]
    }

    pub fn images(&self) -> &[TensorElement] {
        &self.images
    }

    /// Column `i` holds the weight-1 part of the image of generator `i`.
    pub fn linear_part(&self) -> Matrix {
        let q = self.gens.len();
        let mut m = Matrix::zeros(q, q);
        for (i, img) in self.images.iter().enumerate() {
            for j in 0..q {
                let c = img.coeff(&Word::letter(j));
                if !c.is_zero() {
                    m.set(j, i, c);
                }
            }
        }
        m
    }

    /// Member of the first filtration level: linear part is the identity.
    pub fn is_unipotent(&self) -> bool {
        self.linear_part().is_identity()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.gens, self.trunc)
    }

    /// Multiplicative extension to words.
    pub fn apply(&self, a: &TensorElement) -> Result<TensorElement> {
        if !same_gens(a.gens(), &self.gens) {
            return Err(Error::MismatchedGenerators);
        }
        let mut out = TensorElement::zero(&self.gens);
        for (w, c) in a.terms() {
            let mut acc = TensorElement::unit(&self.gens);
            for &g in &w.0 {
                acc = acc.concat(&self.images[g as usize], self.trunc)?;
                if acc.is_zero() {
                    break;
                }
            }
            out.add_scaled(c, &acc)?;
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FilteredAutomorphism) -> Result<FilteredAutomorphism> {
        if !same_gens(&self.gens, &other.gens) {
            return Err(Error::MismatchedGenerators);
        }
        let images = other
            .images
            .iter()
            .map(|t| self.apply(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(FilteredAutomorphism { gens: self.gens.clone(), images, trunc: self.trunc })
    }

    pub fn inverse(&self) -> Result<FilteredAutomorphism> {
        let lin = self.linear_part();
        if lin.is_identity() {
            let d = log_automorphism(self)?;
            return exp_derivation(&d.neg());
        }
        let l = LinearIso::new(&self.gens, lin)?;
        let l_inv = l.inverse().automorphism(self.trunc);
        let u = l_inv.compose(self)?;
        let u_inv = exp_derivation(&log_automorphism(&u)?.neg())?;
        u_inv.compose(&l_inv)
    }

    /// `φ∘δ = δ∘φ` on generators, modulo the truncation.
    pub fn commutes_with(&self, delta: &ChenDifferential) -> Result<bool> {
        let d = delta.as_derivation();
        for i in 0..self.gens.len() {
            let lhs = self.apply(d.image(i))?;
            let rhs = d.apply(&self.images[i])?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `φ ∘ D ∘ φ^{-1}` as a derivation.
    pub fn conjugate(&self, d: &Derivation) -> Result<Derivation> {
        let inv = self.inverse()?;
        let mut images = Vec::with_capacity(self.gens.len());
        for i in 0..self.gens.len() {
            let t = d.apply(inv.image(i))?;
            images.push(self.apply(&t)?);
        }
        Ok(Derivation::new_unchecked(&self.gens, d.degree(), images, d.trunc()))
    }

    /// `φ ∘ ψ ∘ φ^{-1}`.
    pub fn conjugate_automorphism(&self, psi: &FilteredAutomorphism) -> Result<FilteredAutomorphism> {
        self.compose(psi)?.compose(&self.inverse()?)
    }

    pub fn display(&self) -> String {
        let mut lines = Vec::new();
        for (i, t) in self.images.iter().enumerate() {
            lines.push(format!("{} -> {}", self.gens.name(i), t.display()));
        }
        lines.join("; ")
    }
}

fn check_weight_raising(d: &Derivation) -> Result<()> {
    if d.degree() != 0 && !d.is_zero() {
        return Err(Error::NotWeightRaising);
    }
    if d.min_weight().map_or(false, |w| w < 1) {
        return Err(Error::NotWeightRaising);
    }
    Ok(())
}

/// `exp(D) = sum D^k / k!` on generators.
pub fn exp_derivation(d: &Derivation) -> Result<FilteredAutomorphism> {
    check_weight_raising(d)?;
    let gens = d.gens();
    let mut images = Vec::with_capacity(gens.len());
    for i in 0..gens.len() {
        let mut term = TensorElement::generator(gens, i);
        let mut acc = term.clone();
        let mut k = 1;
        loop {
            term = d.apply(&term)?;
            if term.is_zero() {
                break;
            }
            acc.add_scaled(&(Scalar::one() / factorial(k)), &term)?;
            k += 1;
        }
        images.push(acc);
    }
    Ok(FilteredAutomorphism { gens: gens.clone(), images, trunc: d.trunc() })
}

/// `log φ = sum (-1)^{k+1} (φ - id)^k / k` on generators.
pub fn log_automorphism(phi: &FilteredAutomorphism) -> Result<Derivation> {
    if !phi.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    let gens = &phi.gens;
    let minus_id = |t: &TensorElement| -> Result<TensorElement> { phi.apply(t)?.sub(t) };
    let mut images = Vec::with_capacity(gens.len());
    for i in 0..gens.len() {
        let mut term = TensorElement::generator(gens, i);
        let mut acc = TensorElement::zero(gens);
        let mut k = 1i64;
        loop {
            term = minus_id(&term)?;
            if term.is_zero() {
                break;
            }
            let c = if k % 2 == 1 { Scalar::one() / int(k) } else { -Scalar::one() / int(k) };
            acc.add_scaled(&c, &term)?;
            k += 1;
        }
        images.push(acc);
    }
    Derivation::new(gens, 0, images, phi.trunc)
}

/// `log(exp(D1) ∘ exp(D2))`.
pub fn bch(d1: &Derivation, d2: &Derivation) -> Result<Derivation> {
    let e = exp_derivation(d1)?.compose(&exp_derivation(d2)?)?;
    log_automorphism(&e)
}

/// A degree-preserving invertible linear map on the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearIso {
    gens: Arc<GeneratorSet>,
    matrix: Matrix,
    inverse: Matrix,
}

impl LinearIso {
    /// `matrix[j][i]` is the coefficient of `x_j` in the image of `x_i`.
    pub fn new(gens: &Arc<GeneratorSet>, matrix: Matrix) -> Result<Self> {
        let q = gens.len();
        if matrix.rows != q || matrix.cols != q {
            return Err(Error::InvalidInput(format!("linear map must be {q}x{q}")));
        }
        for i in 0..q {
            for j in 0..q {
                if !matrix.get(j, i).is_zero() && gens.degree(i) != gens.degree(j) {
                    return Err(Error::InvalidInput(format!(
                        "linear map mixes degrees of `{}` and `{}`",
                        gens.name(i),
                        gens.name(j)
                    )));
                }
            }
        }
        let inverse = matrix.inverse()?;
        Ok(LinearIso { gens: gens.clone(), matrix, inverse })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> LinearIso {
        LinearIso { gens: self.gens.clone(), matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    pub fn automorphism(&self, trunc: WeightTruncation) -> FilteredAutomorphism {
        let q = self.gens.len();
        let images = (0..q)
            .map(|i| {
                TensorElement::from_terms(
                    &self.gens,
                    (0..q).map(|j| (Word::letter(j), self.matrix.get(j, i).clone())),
                )
            })
            .collect();
        FilteredAutomorphism { gens: self.gens.clone(), images, trunc }
    }

    pub fn transport_derivation(&self, d: &Derivation) -> Result<Derivation> {
        self.automorphism(d.trunc()).conjugate(d)
    }

    pub fn transport_differential(&self, delta: &ChenDifferential) -> Result<ChenDifferential> {
        ChenDifferential::new(self.transport_derivation(delta.as_derivation())?)
    }

    pub fn transport_automorphism(&self, phi: &FilteredAutomorphism) -> Result<FilteredAutomorphism> {
        let g = self.automorphism(phi.trunc());
        let g_inv = self.inverse().automorphism(phi.trunc());
        g.compose(phi)?.compose(&g_inv)
    }
}
