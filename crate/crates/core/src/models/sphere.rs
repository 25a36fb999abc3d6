use num_traits::Zero;
use serde::Serialize;

use crate::derivation::{ChenDifferential, DerSpace, Derivation, DerivationComplex, WeightWindow};
use crate::error::{Error, Result};
use crate::lie::{GeneratorSet, TensorElement, WeightTruncation};
use crate::linalg::Matrix;
use crate::scalar::{format_scalar, int, Scalar};
use crate::simplicial::{
    class_reduce, cup_characteristic, CharacteristicForm, Cochain, FiniteSimplicialSet, LocalSystem,
};

/// `W = <x>` with `|x| = 1` and `δ = 0`.
pub fn sphere_differential(trunc: WeightTruncation) -> ChenDifferential {
    let gens = GeneratorSet::from_pairs(&[("x", 1)]).expect("one generator");
    ChenDifferential::zero(&gens, trunc)
}

/// All derivations of the free Lie algebra, over every degree and weight
/// below the truncation.
pub fn derivation_basis(complex: &DerivationComplex) -> Vec<Derivation> {
    let gens = complex.delta().gens();
    let n = complex.trunc().n();
    let max_deg = gens.generators().iter().map(|g| g.degree).max().unwrap_or(0);
    let weights: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for degree in -max_deg..=(n as i64) * max_deg {
        let sp = DerSpace::new(complex.bases(), degree, &weights);
        out.extend((0..sp.dim()).map(|k| sp.element(k)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereObstruction {
    pub is_cocycle: bool,
    pub nontrivial: bool,
    /// Coordinate of the class in `H^2` with constant coefficients.
    pub class_coordinate: String,
    /// Coordinate of `ν(𝔬)` in `H^2`.
    pub characteristic_coordinate: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SphereReport {
    pub trunc: usize,
    pub der_dim: usize,
    pub der_generators: Vec<String>,
    pub h1_dim: usize,
    pub h1_representative: String,
    pub h2_dim: usize,
    pub obstruction: SphereObstruction,
}

/// The algebraic side of the sphere example: derivations, homology, and the
/// obstruction class on the minimal simplicial model of `S^2`.
pub fn sphere_report(trunc: WeightTruncation) -> Result<SphereReport> {
    let delta = sphere_differential(trunc);
    let complex = DerivationComplex::new(delta);
    let gens = complex.delta().gens().clone();
    let der = derivation_basis(&complex);

    let h1 = complex.homology(1, WeightWindow::Stable)?;
    let h2 = complex.homology(2, WeightWindow::Stable)?;
    // the fiber of the local system is H_1 with basis [x,x] ∂/∂x
    let x = TensorElement::generator(&gens, 0);
    let bracket = Derivation::single(&gens, 0, x.bracket(&x, trunc)?, trunc)?;
    let block = complex.block(1, 1)?;
    let c = block
        .coords(&bracket)
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .ok_or_else(|| Error::InvalidInput("[x,x] ∂/∂x does not span H_1".into()))?;
    debug_assert_eq!(c.len(), 1);

    let k = FiniteSimplicialSet::sphere();
    let m = LocalSystem::trivial(&k, 1).with_trivializations(vec![Matrix::identity(1)], vec![])?;
    // c(σ) = 1·[x,x] ∂/∂x in that basis
    let cochain = Cochain { degree: 2, values: vec![vec![int(1)]] };
    let class = class_reduce(&k, &m, &cochain)?;
    let nu = cup_characteristic(&k, &m, &CharacteristicForm::dual_basis(1, 0), &cochain)?;
    let coord = |c: &Option<Vec<Scalar>>| c.as_ref().and_then(|v| v.first()).map(format_scalar).unwrap_or_default();

    Ok(SphereReport {
        trunc: trunc.n(),
        der_dim: der.len(),
        der_generators: der.iter().map(Derivation::display).collect(),
        h1_dim: h1.total_dim(),
        h1_representative: bracket.display(),
        h2_dim: h2.total_dim(),
        obstruction: SphereObstruction {
            is_cocycle: class.is_cocycle,
            nontrivial: class.is_cocycle && !class.is_trivial,
            class_coordinate: coord(&class.coords),
            characteristic_coordinate: coord(&nu.class.coords),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralReport {
    /// The radial integral over `r` in `[0, ∞)`.
    pub radial: f64,
    /// The same integral after `x = r^2`.
    pub substituted: f64,
    pub closed_form: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub evaluations: usize,
    pub passed: bool,
}

/// Adaptive Simpson on `[a, b]`; fails when the depth budget runs out.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: usize) -> Result<(f64, usize)> {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: usize,
        evals: &mut usize,
    ) -> Result<f64> {
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        *evals += 2;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if diff.abs() <= 15.0 * tol {
            return Ok(left + right + diff / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature(format!("no convergence on [{a}, {b}]")));
        }
        Ok(step(f, (a, fa), (lm, flm), (m, fm), left, tol / 2.0, depth - 1, evals)?
            + step(f, (m, fm), (rm, frm), (b, fb), right, tol / 2.0, depth - 1, evals)?)
    }
    if !(tol > 0.0) {
        return Err(Error::Quadrature("tolerance must be positive".into()));
    }
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3;
    let v = step(f, (a, fa), (m, fm), (b, fb), whole, tol, max_depth, &mut evals)?;
    Ok((v, evals))
}

/// `∫_0^∞ g(s) ds` through `s = t / (1 - t)`.
fn half_line<F: Fn(f64) -> f64>(g: F, tol: f64) -> Result<(f64, usize)> {
    let h = move |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = t / (1.0 - t);
        g(s) / ((1.0 - t) * (1.0 - t))
    };
    adaptive_simpson(&h, 0.0, 1.0, tol, 50)
}

/// `scale · (1/π) ∫_0^{2π} dθ ∫_0^∞ 2r dr / (1 + r^2)^3`.
pub fn radial_integral(scale: f64, tolerance: f64) -> Result<(f64, usize)> {
    let (v, n) = half_line(|r| 2.0 * r / (1.0 + r * r).powi(3), tolerance / 4.0)?;
    Ok((scale * 2.0 * v, n))
}

/// The one numeric check: the radial integral equals 1, both directly and
/// after `x = r^2` (where it reads `2 ∫_0^∞ dx / (1+x)^3`).
pub fn sphere_integral_check(tolerance: f64) -> Result<IntegralReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let (radial, n1) = radial_integral(1.0, tolerance)?;
    let (sub, n2) = half_line(|x| 2.0 / (1.0 + x).powi(3), tolerance / 2.0)?;
    // -(1+x)^{-2} is an antiderivative of 2 (1+x)^{-3}; it tends to 0 at ∞
    let antiderivative = |x: f64| -(1.0 + x).powi(-2);
    let closed_form = 0.0 - antiderivative(0.0);
    let error = (radial - 1.0).abs().max((sub - 1.0).abs());
    Ok(IntegralReport {
        radial,
        substituted: sub,
        closed_form,
        expected: 1.0,
        error,
        tolerance,
        evaluations: n1 + n2,
        passed: error <= tolerance,
    })
}
