//! Evaluation of diagonal forms over a concrete finite field: represented
//! classes, isotropy, roundness and universality, and `I`-forms.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagform::DiagonalForm;
use crate::error::{Error, Result};
use crate::ffield::{Elem, FieldCtx};

/// Search thresholds, in number of vectors. Configuration, not semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Shortcut answers are re-derived by brute force below this size.
    pub cross_check: u128,
    /// Exhaustive searches larger than this are refused.
    pub hard_cap: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { cross_check: 10_000_000, hard_cap: 1_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentationProfile {
    /// Classes of the nonzero values `Φ(x)`.
    pub represented: Vec<usize>,
    pub represents_zero_nontrivially: bool,
    /// One vector per represented class.
    pub witnesses: BTreeMap<usize, Vec<Elem>>,
    pub isotropy_witness: Option<Vec<Elem>>,
}

/// Values attained by `Σ a_i x_i^d`, built one variable at a time.
///
/// `nonzero[v]` records whether `v` is attained by a nonzero vector; the
/// zero vector attains only `0`. Back-pointers give witness vectors.
pub(crate) struct ValueTable {
    /// `(previous value, x_i, previous vector was zero)` per reachable value.
    steps: Vec<Vec<Option<(Elem, Elem, bool)>>>,
    nonzero: Vec<bool>,
}

impl ValueTable {
    pub(crate) fn build(field: &FieldCtx, coeffs: &[Elem]) -> Self {
        let q = field.q() as usize;
        let d = field.d() as u64;
        // (x^d, x) for nonzero x, one x per value
        let mut powers: BTreeMap<Elem, Elem> = BTreeMap::new();
        for x in field.nonzero() {
            powers.entry(field.pow(x, d)).or_insert(x);
        }
        let mut nonzero = vec![false; q];
        let mut steps = Vec::with_capacity(coeffs.len());
        for &a in coeffs {
            let mut next = vec![false; q];
            let mut back: Vec<Option<(Elem, Elem, bool)>> = vec![None; q];
            for v in 0..q {
                let attained = v == 0 || nonzero[v];
                if !attained {
                    continue;
                }
                if nonzero[v] && !next[v] {
                    next[v] = true;
                    back[v] = Some((v as Elem, 0, false));
                }
                for (&pw, &x) in &powers {
                    let w = field.add(v as Elem, field.mul(a, pw)) as usize;
                    if !next[w] {
                        next[w] = true;
                        back[w] = Some((v as Elem, x, !nonzero[v]));
                    }
                }
            }
            nonzero = next;
            steps.push(back);
        }
        ValueTable { steps, nonzero }
    }

    pub(crate) fn attains_nonzero(&self, v: Elem) -> bool {
        self.nonzero[v as usize]
    }

    /// A nonzero vector with value `v`, if one exists.
    pub(crate) fn witness(&self, v: Elem) -> Option<Vec<Elem>> {
        if !self.nonzero[v as usize] {
            return None;
        }
        let mut out = vec![0; self.steps.len()];
        let mut cur = v;
        for (i, back) in self.steps.iter().enumerate().rev() {
            let (prev, x, from_zero) = back[cur as usize].expect("reachable value has a back-pointer");
            out[i] = x;
            if from_zero {
                break;
            }
            cur = prev;
        }
        Some(out)
    }
}

pub fn evaluate(field: &FieldCtx, coeffs: &[Elem], x: &[Elem]) -> Elem {
    let d = field.d() as u64;
    coeffs
        .iter()
        .zip(x)
        .fold(0, |acc, (&a, &xi)| field.add(acc, field.mul(a, field.pow(xi, d))))
}

pub fn represented_classes(form: &DiagonalForm) -> Result<RepresentationProfile> {
    let field = form.ctx().require_field()?.clone();
    let coeffs = form.representative_coeffs()?;
    let table = ValueTable::build(&field, &coeffs);
    let mut witnesses = BTreeMap::new();
    for v in field.nonzero() {
        if table.attains_nonzero(v) {
            let c = field.class_of(v)?;
            witnesses.entry(c).or_insert_with(|| table.witness(v).expect("attained"));
        }
    }
    Ok(RepresentationProfile {
        represented: witnesses.keys().copied().collect(),
        represents_zero_nontrivially: table.attains_nonzero(0),
        isotropy_witness: table.witness(0),
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsotropyMethod {
    /// More variables than the degree: a nontrivial zero exists.
    Shortcut,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsotropyResult {
    pub isotropic: bool,
    pub witness: Option<Vec<Elem>>,
    pub method: IsotropyMethod,
}

fn search_size(q: u64, n: usize) -> u128 {
    (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

/// Exhaustive search for the lexicographically least nonzero zero of `Φ`.
///
/// Only vectors whose first nonzero coordinate is 1 are visited; scaling
/// preserves zeros, and the least zero always has that shape.
pub fn brute_force_zero(field: &FieldCtx, coeffs: &[Elem], hard_cap: u128) -> Result<Option<Vec<Elem>>> {
    let n = coeffs.len();
    let q = field.q();
    let size = search_size(q, n);
    if size > hard_cap {
        return Err(Error::SearchTooLarge(size));
    }
    let d = field.d() as u64;
    let terms: Vec<Vec<Elem>> = coeffs
        .iter()
        .map(|&a| (0..q as Elem).map(|x| field.mul(a, field.pow(x, d))).collect())
        .collect();
    // leading 1 at position `lead`, free tail after it; smaller tails come first
    for lead in (0..n).rev() {
        let tail_len = n - lead - 1;
        let count = q.pow(tail_len as u32);
        let found = (0..count).into_par_iter().find_first(|&idx| {
            let mut acc = terms[lead][1];
            let mut rest = idx;
            for i in (lead + 1..n).rev() {
                let x = (rest % q) as usize;
                rest /= q;
                acc = field.add(acc, terms[i][x]);
            }
            acc == 0
        });
        if let Some(idx) = found {
            let mut v = vec![0; n];
            v[lead] = 1;
            let mut rest = idx;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (rest % q) as Elem;
                rest /= q;
            }
            return Ok(Some(v));
        }
    }
    Ok(None)
}

pub fn is_isotropic(form: &DiagonalForm, budget: SearchBudget) -> Result<IsotropyResult> {
    let field = form.ctx().require_field()?.clone();
    let coeffs = form.representative_coeffs()?;
    if coeffs.len() > field.d() as usize {
        let witness = ValueTable::build(&field, &coeffs).witness(0);
        debug_assert!(witness.is_some(), "Chevalley-Warning guarantees a zero");
        return Ok(IsotropyResult { isotropic: true, witness, method: IsotropyMethod::Shortcut });
    }
    let witness = brute_force_zero(&field, &coeffs, budget.hard_cap)?;
    Ok(IsotropyResult { isotropic: witness.is_some(), witness, method: IsotropyMethod::Exhaustive })
}

/// The four flags of a diagonal form with `H` maximal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub round: bool,
    pub universal: bool,
    pub h_max_form: bool,
    pub isotropic: bool,
    pub i_form: bool,
    /// `h_max_form == (round && universal)`; fails only for the empty form.
    pub consistent: bool,
}

pub fn classify(form: &DiagonalForm, budget: SearchBudget) -> Result<Classification> {
    let ctx = form.ctx();
    ctx.require_field()?;
    let profile = represented_classes(form)?;
    let stab = form.similarity_group();
    let round = profile.represented.iter().all(|&c| stab.contains(c));
    let universal = profile.represented.len() == ctx.order();
    let h_max_form = form.is_h_form(&ctx.maximal())?;
    let isotropic = is_isotropic(form, budget)?.isotropic;
    Ok(Classification {
        round,
        universal,
        h_max_form,
        isotropic,
        i_form: h_max_form && isotropic,
        consistent: h_max_form == (round && universal),
    })
}

/// `Φ` is an `I`-form: an isotropic `H_max`-form. The empty form counts as one.
pub fn is_i_form(form: &DiagonalForm, budget: SearchBudget) -> Result<bool> {
    form.ctx().require_field()?;
    if form.is_zero() {
        return Ok(true);
    }
    Ok(form.is_h_form(&form.ctx().maximal())? && is_isotropic(form, budget)?.isotropic)
}

/// `(Φ_I, t_I(Φ))`: the `H_max`-decomposition when its `H`-part is
/// isotropic, otherwise `(Φ, 0)`.
pub fn i_decompose(form: &DiagonalForm, budget: SearchBudget) -> Result<(DiagonalForm, DiagonalForm)> {
    form.ctx().require_field()?;
    let (reduced, hpart) = form.h_decompose(&form.ctx().maximal())?;
    if hpart.is_zero() || is_isotropic(&hpart, budget)?.isotropic {
        Ok((reduced, hpart))
    } else {
        Ok((form.clone(), DiagonalForm::zero(form.ctx().clone())?))
    }
}

pub fn i_reduce(form: &DiagonalForm, budget: SearchBudget) -> Result<DiagonalForm> {
    Ok(i_decompose(form, budget)?.0)
}

pub fn i_equivalent(a: &DiagonalForm, b: &DiagonalForm, budget: SearchBudget) -> Result<bool> {
    if a.ctx() != b.ctx() {
        return Err(Error::CtxMismatch);
    }
    Ok(i_reduce(a, budget)? == i_reduce(b, budget)?)
}

/// `Ψ̃ ⊥ Φ ⊥ Ψ̃` with `Ψ̃` the `H_max`-inverse of `Φ`.
pub fn witt_neg_i(form: &DiagonalForm, budget: SearchBudget) -> Result<DiagonalForm> {
    form.ctx().require_field()?;
    let tilde = form.witt_neg(&form.ctx().maximal())?;
    let bar = tilde.osum(form)?.osum(&tilde)?;
    if !is_i_form(&form.osum(&bar)?, budget)? {
        return Err(Error::Postcondition("Φ ⊥ Φ̄ is not an I-form".into()));
    }
    Ok(bar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;
    use crate::literal::parse_form;
    use crate::powerclass::PowerClassGroup;
    use std::sync::Arc;

    fn f7() -> Arc<PowerClassGroup> {
        PowerClassGroup::of_field(make_field(7, 1, 3).unwrap())
    }

    /// Every vector, every value: the independent oracle for the value table.
    fn enumerate_values(field: &FieldCtx, coeffs: &[Elem]) -> (Vec<usize>, bool) {
        let q = field.q();
        let n = coeffs.len();
        let mut classes = std::collections::BTreeSet::new();
        let mut zero = false;
        for idx in 1..q.pow(n as u32) {
            let mut x = Vec::with_capacity(n);
            let mut r = idx;
            for _ in 0..n {
                x.push((r % q) as Elem);
                r /= q;
            }
            let v = evaluate(field, coeffs, &x);
            if v == 0 {
                zero = true;
            } else {
                classes.insert(field.class_of(v).unwrap());
            }
        }
        (classes.into_iter().collect(), zero)
    }

    #[test]
    fn represented_examples() {
        let ctx = f7();
        let p = represented_classes(&parse_form(&ctx, "1").unwrap()).unwrap();
        assert_eq!(p.represented, vec![0]);
        assert!(!p.represents_zero_nontrivially);
        let p = represented_classes(&parse_form(&ctx, "1,3").unwrap()).unwrap();
        assert_eq!(p.represented, vec![0, 1, 2]);
        let field = ctx.field().unwrap();
        for (c, w) in &p.witnesses {
            assert_eq!(field.class_of(evaluate(field, &[1, 3], w)).unwrap(), *c);
        }
        let p = represented_classes(&parse_form(&ctx, "<>").unwrap()).unwrap();
        assert!(p.represented.is_empty());
    }

    #[test]
    fn value_table_matches_enumeration() {
        for (p, d) in [(7, 3), (13, 3), (13, 4)] {
            let ctx = PowerClassGroup::of_field(make_field(p, 1, d).unwrap());
            let field = ctx.field().unwrap().clone();
            let s = field.s() as usize;
            for n in 1..=3usize {
                for idx in 0..s.pow(n as u32) {
                    let classes: Vec<usize> = (0..n).map(|i| (idx / s.pow(i as u32)) % s).collect();
                    let form = DiagonalForm::from_classes(ctx.clone(), &classes).unwrap();
                    let coeffs = form.representative_coeffs().unwrap();
                    let prof = represented_classes(&form).unwrap();
                    let (classes, zero) = enumerate_values(&field, &coeffs);
                    assert_eq!(prof.represented, classes);
                    assert_eq!(prof.represents_zero_nontrivially, zero);
                }
            }
        }
    }

    #[test]
    fn isotropy_examples() {
        let ctx = f7();
        let field = ctx.field().unwrap().clone();
        let r = is_isotropic(&parse_form(&ctx, "1,1").unwrap(), SearchBudget::default()).unwrap();
        assert!(r.isotropic);
        let w = r.witness.unwrap();
        assert_eq!(evaluate(&field, &[1, 1], &w), 0);
        assert_eq!(w, vec![1, 3]);
        let r = is_isotropic(&parse_form(&ctx, "1").unwrap(), SearchBudget::default()).unwrap();
        assert!(!r.isotropic);
        let r = is_isotropic(&parse_form(&ctx, "1,2,3,4").unwrap(), SearchBudget::default()).unwrap();
        assert_eq!(r.method, IsotropyMethod::Shortcut);
        assert_eq!(evaluate(&field, &[1, 2, 3, 4], r.witness.as_ref().unwrap()), 0);
        assert!(brute_force_zero(&field, &[1, 2, 3, 4], u128::MAX).unwrap().is_some());
    }

    #[test]
    fn brute_force_witness_from_spec_example() {
        // (3,1): 27 + 1 = 28 ≡ 0 mod 7 is a zero of x^3 + y^3
        let field = make_field(7, 1, 3).unwrap();
        assert_eq!(evaluate(&field, &[1, 1], &[3, 1]), 0);
    }

    #[test]
    fn search_budget_is_enforced() {
        let ctx = PowerClassGroup::of_field(make_field(7, 1, 3).unwrap());
        let tight = SearchBudget { cross_check: 10, hard_cap: 100 };
        let err = is_isotropic(&parse_form(&ctx, "1,2,3").unwrap(), tight).unwrap_err();
        assert_eq!(err, Error::SearchTooLarge(343));
        let abs = PowerClassGroup::abstract_group(crate::group::AbGroup::cyclic(3), 3);
        assert_eq!(is_isotropic(&parse_form(&abs, "@0").unwrap(), tight).unwrap_err(), Error::AbstractMode);
    }

    #[test]
    fn classify_examples() {
        let ctx = f7();
        let b = SearchBudget::default();
        let c = classify(&parse_form(&ctx, "1,3,2").unwrap(), b).unwrap();
        assert!(c.round && c.universal && c.h_max_form && c.isotropic && c.i_form);
        let c = classify(&parse_form(&ctx, "1").unwrap(), b).unwrap();
        assert!(c.round && !c.universal);
        let c = classify(&parse_form(&ctx, "1,1").unwrap(), b).unwrap();
        assert!(!c.round);
        assert!(c.consistent);
    }

    #[test]
    fn i_decompose_examples() {
        let ctx = f7();
        let b = SearchBudget::default();
        let phi = parse_form(&ctx, "@{0:2,1:1,2:1}").unwrap();
        let (red, t) = i_decompose(&phi, b).unwrap();
        assert_eq!(red.mult(), &[1, 0, 0]);
        assert_eq!(t.mult(), &[1, 1, 1]);
        let reduced = parse_form(&ctx, "1,1,3").unwrap();
        assert_eq!(i_decompose(&reduced, b).unwrap().0, reduced);
        let iform = parse_form(&ctx, "1,3,2").unwrap();
        assert!(i_decompose(&iform, b).unwrap().0.is_zero());
        let neg = witt_neg_i(&reduced, b).unwrap();
        assert!(is_i_form(&reduced.osum(&neg).unwrap(), b).unwrap());
    }

    #[test]
    fn anisotropic_h_part_is_retained() {
        // F_5 with d = 3: every class is trivial, so <1> is its own H-part and anisotropic.
        let ctx = PowerClassGroup::of_field(make_field(5, 1, 3).unwrap());
        let b = SearchBudget::default();
        let one = parse_form(&ctx, "1").unwrap();
        let (red, t) = i_decompose(&one, b).unwrap();
        assert_eq!(red, one);
        assert!(t.is_zero());
        let two = parse_form(&ctx, "1,1").unwrap();
        assert!(i_decompose(&two, b).unwrap().0.is_zero());
    }
}
