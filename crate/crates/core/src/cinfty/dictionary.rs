use std::sync::Arc;

use num_traits::Zero;

use super::{check_cinfty, CInftyStructure};
use crate::derivation::{ChenDifferential, Derivation};
use crate::error::{Error, Result};
use crate::lie::{Generator, GeneratorSet, TensorElement, WeightTruncation, Word};
use crate::scalar::sign;

/// Sign relating a coefficient of `m̄_k` to the matching coefficient of δ:
/// `(-1)^{|x_r| + 1 + ε}` with `ε = sum_{p<q} |x_{i_p}| |x_{i_q}|`, times
/// the suspension sign of the inputs.
fn dual_sign(m: &CInftyStructure, out: usize, ins: &[usize]) -> i64 {
    let xdeg = |i: usize| m.degree(i) - 1;
    let mut eps = 0i64;
    let mut seen = 0i64;
    for &i in ins {
        eps += seen * xdeg(i);
        seen += xdeg(i);
    }
    (xdeg(out) + 1 + eps + m.suspension_sign(ins)).rem_euclid(2)
}

/// The Chen differential dual to the bar codifferential of `m`, on
/// `W = H[-1]`: generator `i` of `W` is dual to basis element `i` of `H` and
/// has degree `|h_i| - 1`.
pub fn chen_delta_from_cinfty(m: &CInftyStructure, trunc: WeightTruncation) -> Result<ChenDifferential> {
    if !m.is_minimal() {
        return Err(Error::NonMinimal);
    }
    let check = check_cinfty(m);
    if let Some(v) = check.violation {
        return Err(Error::InvalidCInfty(format!(
            "{} relation fails at arity {} on ({})",
            v.relation,
            v.arity,
            v.inputs.join(",")
        )));
    }
    let mut gens = Vec::with_capacity(m.dim());
    for b in m.basis() {
        if b.degree < 1 {
            return Err(Error::InvalidInput(format!(
                "basis element `{}` has degree {}; reduced cohomology starts in degree 1",
                b.name, b.degree
            )));
        }
        gens.push(Generator { name: b.name.clone(), degree: b.degree - 1 });
    }
    let gens = GeneratorSet::new(gens)?;
    let mut images = vec![TensorElement::zero(&gens); gens.len()];
    for k in m.arities() {
        if k > trunc.n() {
            continue;
        }
        for (ins, outs) in m.product(k) {
            let word = Word(ins.iter().map(|&i| i as u16).collect());
            for (r, c) in outs {
                images[*r].add_term(word.clone(), sign(dual_sign(m, *r, ins)) * c);
            }
        }
    }
    let d = Derivation::new(&gens, -1, images, trunc)?;
    ChenDifferential::new(d)
}

/// The inverse dictionary: `H = W[1]` with basis named after the generators.
pub fn cinfty_from_delta(delta: &ChenDifferential) -> Result<CInftyStructure> {
    let gens: &Arc<GeneratorSet> = delta.gens();
    let basis = gens
        .generators()
        .iter()
        .map(|g| Generator { name: g.name.clone(), degree: g.degree + 1 })
        .collect();
    let mut m = CInftyStructure::new(basis)?;
    for r in 0..gens.len() {
        for (w, c) in delta.as_derivation().image(r).terms() {
            if c.is_zero() {
                continue;
            }
            let ins: Vec<usize> = w.0.iter().map(|&g| g as usize).collect();
            let s = sign(dual_sign(&m, r, &ins));
            m.add_product(&ins, r, s * c)?;
        }
    }
    Ok(m)
}
