//! Diagonal forms `⟨a_1, ..., a_n⟩` of degree `d ≥ 3`.
//!
//! For `d ≥ 3` two diagonal forms are isometric exactly when their
//! coefficient multisets agree modulo `d`-th powers, so a form is its
//! multiplicity vector over the power-class group. The `H`-theory below is
//! the multiset shadow of that: `H`-forms are unions of `H`-cosets, and the
//! `H`-reduced part keeps, per coset, the excess over the minimum multiplicity.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::Elem;
use crate::group::Subgroup;
use crate::groupring::{permanent_descends, GroupRingElement};
use crate::powerclass::PowerClassGroup;

#[derive(Debug, Clone)]
pub struct DiagonalForm {
    ctx: Arc<PowerClassGroup>,
    mult: Vec<u64>,
    /// Field mode only: concrete coefficients, consistent with `mult`.
    coeffs: Option<Vec<Elem>>,
}

impl PartialEq for DiagonalForm {
    fn eq(&self, other: &Self) -> bool {
        self.mult == other.mult && same_ctx(&self.ctx, &other.ctx)
    }
}

impl Eq for DiagonalForm {}

fn same_ctx(a: &Arc<PowerClassGroup>, b: &Arc<PowerClassGroup>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_degree(ctx: &PowerClassGroup) -> Result<()> {
    if ctx.d() < 3 {
        Err(Error::DegreeTooSmall(ctx.d()))
    } else {
        Ok(())
    }
}

fn check_subgroup(ctx: &PowerClassGroup, h: &Subgroup) -> Result<()> {
    if **h.group() == **ctx.group() {
        Ok(())
    } else {
        Err(Error::CtxMismatch)
    }
}

/// Splits a coefficient list so that the first `keep[c]` coefficients of
/// each class go left, the rest right.
fn split_coeffs(ctx: &PowerClassGroup, coeffs: &[Elem], keep: &[u64]) -> (Vec<Elem>, Vec<Elem>) {
    let mut used = vec![0u64; keep.len()];
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for &a in coeffs {
        let c = ctx.class_of(a).expect("stored coefficients are nonzero");
        if used[c] < keep[c] {
            used[c] += 1;
            left.push(a);
        } else {
            right.push(a);
        }
    }
    (left, right)
}

impl DiagonalForm {
    pub fn zero(ctx: Arc<PowerClassGroup>) -> Result<Self> {
        check_degree(&ctx)?;
        let n = ctx.order();
        let coeffs = ctx.field().map(|_| Vec::new());
        Ok(DiagonalForm { ctx, mult: vec![0; n], coeffs })
    }

    /// `⟨a_1, ..., a_n⟩` from field elements.
    pub fn from_coeffs(ctx: Arc<PowerClassGroup>, coeffs: &[Elem]) -> Result<Self> {
        check_degree(&ctx)?;
        let field = ctx.require_field()?.clone();
        let mut mult = vec![0u64; ctx.order()];
        for &a in coeffs {
            if a == 0 {
                return Err(Error::ZeroCoefficient);
            }
            mult[field.class_of(a)?] += 1;
        }
        Ok(DiagonalForm { ctx, mult, coeffs: Some(coeffs.to_vec()) })
    }

    /// A form given by the classes of its coefficients.
    pub fn from_classes(ctx: Arc<PowerClassGroup>, classes: &[usize]) -> Result<Self> {
        check_degree(&ctx)?;
        let mut mult = vec![0u64; ctx.order()];
        for &c in classes {
            mult[ctx.group().check(c)?] += 1;
        }
        Ok(DiagonalForm { ctx, mult, coeffs: None })
    }

    pub fn from_mult(ctx: Arc<PowerClassGroup>, mult: Vec<u64>) -> Result<Self> {
        check_degree(&ctx)?;
        if mult.len() != ctx.order() {
            return Err(Error::ClassOutOfRange(mult.len()));
        }
        Ok(DiagonalForm { ctx, mult, coeffs: None })
    }

    /// `⟨a_1, ..., a_s⟩ ⊗ ⟨g⟩` for the coset `g + H`: one coefficient per class of the coset.
    pub fn coset_form(ctx: Arc<PowerClassGroup>, h: &Subgroup, g: usize) -> Result<Self> {
        check_subgroup(&ctx, h)?;
        let classes: Vec<usize> = h.members().iter().map(|&x| ctx.group().add(g, x)).collect();
        Self::from_classes(ctx, &classes)
    }

    pub fn ctx(&self) -> &Arc<PowerClassGroup> {
        &self.ctx
    }

    pub fn mult(&self) -> &[u64] {
        &self.mult
    }

    pub fn coeffs(&self) -> Option<&[Elem]> {
        self.coeffs.as_deref()
    }

    pub fn dim(&self) -> u64 {
        self.mult.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Classes with multiplicity, ascending.
    pub fn classes(&self) -> Vec<usize> {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(c, &m)| std::iter::repeat(c).take(m as usize))
            .collect()
    }

    /// Concrete coefficients: the stored ones, or the least element of each class.
    pub fn representative_coeffs(&self) -> Result<Vec<Elem>> {
        if let Some(c) = &self.coeffs {
            return Ok(c.clone());
        }
        let f = self.ctx.require_field()?;
        Ok(self.classes().into_iter().map(|c| f.class_rep(c)).collect())
    }

    fn same(&self, other: &Self) -> Result<()> {
        if same_ctx(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    /// Orthogonal sum.
    pub fn osum(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let mult = self.mult.iter().zip(&other.mult).map(|(a, b)| a + b).collect();
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Ok(DiagonalForm { ctx: self.ctx.clone(), mult, coeffs })
    }

    /// Tensor product: convolution of multiplicity vectors.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let g = self.ctx.group();
        let mut mult = vec![0u64; self.mult.len()];
        for (a, &x) in self.mult.iter().enumerate() {
            for (b, &y) in other.mult.iter().enumerate() {
                mult[g.add(a, b)] += x * y;
            }
        }
        let coeffs = match (&self.coeffs, &other.coeffs, self.ctx.field()) {
            (Some(a), Some(b), Some(f)) => {
                Some(a.iter().flat_map(|&x| b.iter().map(move |&y| f.mul(x, y))).collect())
            }
            _ => None,
        };
        Ok(DiagonalForm { ctx: self.ctx.clone(), mult, coeffs })
    }

    /// `n × Φ`.
    pub fn times(&self, n: u64) -> Self {
        let mult = self.mult.iter().map(|m| m * n).collect();
        let coeffs = self.coeffs.as_ref().map(|c| {
            let mut out = Vec::with_capacity(c.len() * n as usize);
            for _ in 0..n {
                out.extend_from_slice(c);
            }
            out
        });
        DiagonalForm { ctx: self.ctx.clone(), mult, coeffs }
    }

    /// `⟨h⟩ ⊗ Φ` for a class `h`: translation of the multiset.
    pub fn scale(&self, h: usize) -> Result<Self> {
        let g = self.ctx.group();
        g.check(h)?;
        let mut mult = vec![0u64; self.mult.len()];
        for (c, &m) in self.mult.iter().enumerate() {
            mult[g.add(c, h)] = m;
        }
        Ok(DiagonalForm { ctx: self.ctx.clone(), mult, coeffs: None })
    }

    /// `⟨x⟩ ⊗ Φ` for a field element, keeping coefficients.
    pub fn scale_by_element(&self, x: Elem) -> Result<Self> {
        let f = self.ctx.require_field()?;
        let h = f.class_of(x)?;
        let mut out = self.scale(h)?;
        out.coeffs = self.coeffs.as_ref().map(|c| c.iter().map(|&a| f.mul(a, x)).collect());
        Ok(out)
    }

    pub fn is_isomorphic(&self, other: &Self) -> Result<bool> {
        self.same(other)?;
        Ok(self.mult == other.mult)
    }

    /// `G(Φ) = {h : hΦ ≅ Φ}`, the translation stabilizer of the multiset.
    pub fn similarity_group(&self) -> Subgroup {
        let g = self.ctx.group().clone();
        let members: Vec<usize> = g
            .elements()
            .filter(|&h| self.scale(h).map(|s| s.mult == self.mult).unwrap_or(false))
            .collect();
        Subgroup::from_members(g, members).expect("stabilizers are subgroups")
    }

    /// `(Φ_H, t_H(Φ))` with `Φ ≅ Φ_H ⊥ t_H(Φ)`: `t_H` holds, per coset,
    /// the minimum multiplicity many copies of the coset.
    pub fn h_decompose(&self, h: &Subgroup) -> Result<(Self, Self)> {
        check_subgroup(&self.ctx, h)?;
        let mut reduced = self.mult.clone();
        let mut hpart = vec![0u64; self.mult.len()];
        for coset in h.cosets() {
            let m = coset.iter().map(|&g| self.mult[g]).min().unwrap_or(0);
            for &g in &coset {
                reduced[g] -= m;
                hpart[g] = m;
            }
        }
        let (rc, hc) = match &self.coeffs {
            Some(c) => {
                let (l, r) = split_coeffs(&self.ctx, c, &reduced);
                (Some(l), Some(r))
            }
            None => (None, None),
        };
        Ok((
            DiagonalForm { ctx: self.ctx.clone(), mult: reduced, coeffs: rc },
            DiagonalForm { ctx: self.ctx.clone(), mult: hpart, coeffs: hc },
        ))
    }

    pub fn h_reduce(&self, h: &Subgroup) -> Result<Self> {
        Ok(self.h_decompose(h)?.0)
    }

    /// `H ⊆ G(Φ)`.
    pub fn is_h_form(&self, h: &Subgroup) -> Result<bool> {
        check_subgroup(&self.ctx, h)?;
        let stab = self.similarity_group();
        Ok(h.members().iter().all(|&x| stab.contains(x)))
    }

    /// Every coset has a class of multiplicity zero.
    pub fn is_h_reduced(&self, h: &Subgroup) -> Result<bool> {
        check_subgroup(&self.ctx, h)?;
        Ok(h.cosets().iter().all(|c| c.iter().any(|&g| self.mult[g] == 0)))
    }

    pub fn h_equivalent(&self, other: &Self, h: &Subgroup) -> Result<bool> {
        self.same(other)?;
        Ok(self.h_reduce(h)? == other.h_reduce(h)?)
    }

    /// The least-dimensional `Ψ` with `Φ ⊥ Ψ` an `H`-form: per coset, the
    /// deficit of each class to the coset's maximum multiplicity.
    pub fn witt_neg(&self, h: &Subgroup) -> Result<Self> {
        check_subgroup(&self.ctx, h)?;
        let mut mult = vec![0u64; self.mult.len()];
        for coset in h.cosets() {
            let top = coset.iter().map(|&g| self.mult[g]).max().unwrap_or(0);
            for &g in &coset {
                mult[g] = top - self.mult[g];
            }
        }
        let neg = DiagonalForm { ctx: self.ctx.clone(), mult, coeffs: None };
        if !self.osum(&neg)?.is_h_form(h)? {
            return Err(Error::Postcondition("Φ ⊥ -Φ is not an H-form".into()));
        }
        Ok(neg)
    }

    /// `⊥_{i ≥ 2} a_i Φ` over representatives `a_1 = 0, a_2, ...` of
    /// `H / (G(Φ) ∩ H)`: the orbit-sum inverse.
    pub fn orbit_inverse(&self, h: &Subgroup) -> Result<Self> {
        check_subgroup(&self.ctx, h)?;
        let k = self.similarity_group().intersect(h);
        let mut reps: Vec<usize> = Vec::new();
        let mut covered = std::collections::BTreeSet::new();
        for &a in h.members() {
            if covered.contains(&a) {
                continue;
            }
            for &x in k.members() {
                covered.insert(self.ctx.group().add(a, x));
            }
            reps.push(a);
        }
        let mut out = DiagonalForm::zero(self.ctx.clone())?;
        out.coeffs = None;
        for &a in reps.iter().filter(|&&a| a != 0) {
            out = out.osum(&self.scale(a)?)?;
        }
        Ok(out)
    }

    /// `dim Φ mod |H|`.
    pub fn dim_index(&self, h: &Subgroup) -> Result<u64> {
        check_subgroup(&self.ctx, h)?;
        Ok(self.dim() % h.order() as u64)
    }

    /// Class of `∏ a_i`, i.e. `Σ mult(g)·g` in the power-class group.
    pub fn permanent(&self) -> usize {
        self.to_groupring_raw().permanent()
    }

    pub fn to_groupring_raw(&self) -> GroupRingElement {
        GroupRingElement::from_multiplicities(self.ctx.group().clone(), &self.mult)
            .expect("multiplicity vector matches the group")
    }

    /// The unique `H`-reduced form with the given image in `Z[G]/(N_H)`.
    pub fn from_groupring(ctx: Arc<PowerClassGroup>, x: &GroupRingElement, h: &Subgroup) -> Result<Self> {
        check_subgroup(&ctx, h)?;
        if **x.group() != **ctx.group() {
            return Err(Error::GroupMismatch);
        }
        let mut mult = vec![0u64; ctx.order()];
        for coset in h.cosets() {
            let m = coset.iter().map(|&g| x.coeff(g)).min().unwrap_or(0);
            for &g in &coset {
                mult[g] = u64::try_from(x.coeff(g) - m).map_err(|_| Error::Overflow)?;
            }
        }
        Self::from_mult(ctx, mult)
    }

    pub fn summary(&self, h: &Subgroup) -> Result<FormSummary> {
        let reduced = self.h_reduce(h)?;
        Ok(FormSummary {
            dim: self.dim(),
            mult: self.mult.clone(),
            reduced: reduced.to_string(),
            reduced_mult: reduced.mult.clone(),
            invariants: Invariants {
                dim_index: self.dim_index(h)?,
                permanent: self.permanent(),
                permanent_is_witt_invariant: permanent_descends(h),
            },
        })
    }
}

/// JSON summary of a form: `{dim, mult, reduced, invariants}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormSummary {
    pub dim: u64,
    pub mult: Vec<u64>,
    pub reduced: String,
    pub reduced_mult: Vec<u64>,
    pub invariants: Invariants,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Invariants {
    pub dim_index: u64,
    pub permanent: usize,
    pub permanent_is_witt_invariant: bool,
}

impl fmt::Display for DiagonalForm {
    /// Field mode: comma-separated coefficients. Abstract mode:
    /// `@{class:mult,...}`. The empty form prints as `<>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "<>");
        }
        if self.ctx.field().is_some() {
            let coeffs = self.representative_coeffs().map_err(|_| fmt::Error)?;
            let parts: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            return write!(f, "{}", parts.join(","));
        }
        let g = self.ctx.group();
        let parts: Vec<String> = self
            .mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(c, m)| format!("{}:{m}", g.format_element(c)))
            .collect();
        write!(f, "@{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;
    use crate::group::AbGroup;

    fn z3() -> Arc<PowerClassGroup> {
        PowerClassGroup::abstract_group(AbGroup::cyclic(3), 3)
    }

    fn form(ctx: &Arc<PowerClassGroup>, mult: &[u64]) -> DiagonalForm {
        DiagonalForm::from_mult(ctx.clone(), mult.to_vec()).unwrap()
    }

    #[test]
    fn make_examples_f7() {
        let ctx = PowerClassGroup::of_field(make_field(7, 1, 3).unwrap());
        assert_eq!(DiagonalForm::from_coeffs(ctx.clone(), &[1, 2, 4]).unwrap().mult(), &[1, 1, 1]);
        assert_eq!(DiagonalForm::from_coeffs(ctx.clone(), &[1, 6]).unwrap().mult(), &[2, 0, 0]);
        assert_eq!(DiagonalForm::from_coeffs(ctx.clone(), &[]).unwrap().mult(), &[0, 0, 0]);
        assert_eq!(DiagonalForm::from_coeffs(ctx, &[1, 0]).unwrap_err(), Error::ZeroCoefficient);
        let quad = PowerClassGroup::of_field(make_field(7, 1, 2).unwrap());
        assert_eq!(DiagonalForm::from_coeffs(quad, &[1]).unwrap_err(), Error::DegreeTooSmall(2));
        assert_eq!(DiagonalForm::from_coeffs(z3(), &[1]).unwrap_err(), Error::AbstractMode);
    }

    #[test]
    fn sum_tensor_scale_examples() {
        let g = z3();
        assert_eq!(form(&g, &[1, 0, 0]).osum(&form(&g, &[0, 1, 0])).unwrap().mult(), &[1, 1, 0]);
        let x = form(&g, &[1, 1, 0]);
        assert_eq!(x.tensor(&x).unwrap().mult(), &[1, 2, 1]);
        assert_eq!(form(&g, &[2, 1, 0]).scale(1).unwrap().mult(), &[0, 2, 1]);
        let other = PowerClassGroup::abstract_group(AbGroup::cyclic(2), 4);
        assert_eq!(x.osum(&DiagonalForm::zero(other).unwrap()).unwrap_err(), Error::CtxMismatch);
    }

    #[test]
    fn similarity_group_examples() {
        let g = z3();
        assert_eq!(form(&g, &[1, 1, 1]).similarity_group().members(), &[0, 1, 2]);
        assert_eq!(form(&g, &[1, 0, 0]).similarity_group().members(), &[0]);
        assert_eq!(form(&g, &[2, 1, 0]).similarity_group().members(), &[0]);
    }

    #[test]
    fn h_decompose_examples() {
        let g = z3();
        let h = g.maximal();
        let (red, hp) = form(&g, &[2, 1, 1]).h_decompose(&h).unwrap();
        assert_eq!((red.mult(), hp.mult()), (&[1, 0, 0][..], &[1, 1, 1][..]));
        assert!(form(&g, &[1, 1, 1]).is_h_form(&h).unwrap());
        let single = form(&g, &[1, 0, 0]);
        let (red, hp) = single.h_decompose(&h).unwrap();
        assert_eq!(red, single);
        assert!(hp.is_zero());
        assert!(!single.is_h_form(&h).unwrap());
        // the trivial subgroup makes everything an H-form
        assert!(single.is_h_form(&Subgroup::trivial(g.group().clone())).unwrap());
    }

    #[test]
    fn h_equivalent_examples() {
        let g = z3();
        let h = g.maximal();
        assert!(form(&g, &[0, 3, 0]).h_equivalent(&form(&g, &[2, 5, 2]), &h).unwrap());
        let phi = form(&g, &[2, 0, 1]);
        assert!(phi.h_equivalent(&phi.osum(&form(&g, &[1, 1, 1])).unwrap(), &h).unwrap());
        assert!(!form(&g, &[1, 0, 0]).h_equivalent(&form(&g, &[0, 1, 0]), &h).unwrap());
    }

    #[test]
    fn witt_neg_examples() {
        let g = z3();
        let h = g.maximal();
        assert_eq!(form(&g, &[1, 0, 0]).witt_neg(&h).unwrap().mult(), &[0, 1, 1]);
        assert!(form(&g, &[2, 2, 2]).witt_neg(&h).unwrap().is_zero());
        assert_eq!(form(&g, &[2, 1, 0]).witt_neg(&h).unwrap().mult(), &[0, 1, 2]);
        // the orbit-sum inverse is Witt-equivalent to the minimal one
        let phi = form(&g, &[2, 1, 0]);
        let orbit = phi.orbit_inverse(&h).unwrap();
        assert!(phi.osum(&orbit).unwrap().is_h_form(&h).unwrap());
        assert!(orbit.h_equivalent(&phi.witt_neg(&h).unwrap(), &h).unwrap());
    }

    #[test]
    fn invariants_examples() {
        let ctx = PowerClassGroup::of_field(make_field(7, 1, 3).unwrap());
        let h = ctx.maximal();
        let aaa = DiagonalForm::from_coeffs(ctx.clone(), &[3, 3, 3]).unwrap();
        assert_eq!(aaa.permanent(), ctx.class_of(27 % 7).unwrap());
        assert_eq!(aaa.permanent(), 0);
        let hf = DiagonalForm::from_coeffs(ctx.clone(), &[1, 3, 2, 6, 4, 5]).unwrap();
        assert_eq!(hf.dim_index(&h).unwrap(), 0);
        assert_eq!(DiagonalForm::from_coeffs(ctx, &[1]).unwrap().permanent(), 0);
    }

    #[test]
    fn coefficients_follow_decomposition() {
        let ctx = PowerClassGroup::of_field(make_field(7, 1, 3).unwrap());
        let h = ctx.maximal();
        let phi = DiagonalForm::from_coeffs(ctx.clone(), &[1, 3, 3, 1, 3, 3, 3, 2, 2]).unwrap();
        let (red, hp) = phi.h_decompose(&h).unwrap();
        assert_eq!(red.to_string(), "3,3,3");
        assert_eq!(hp.coeffs().unwrap().len(), 6);
        assert_eq!(DiagonalForm::zero(ctx).unwrap().to_string(), "<>");
    }

    #[test]
    fn groupring_round_trip() {
        let g = z3();
        let h = g.maximal();
        let x = GroupRingElement::new(g.group().clone(), vec![-2, 5, 0]).unwrap();
        let f = DiagonalForm::from_groupring(g.clone(), &x, &h).unwrap();
        assert_eq!(f.mult(), &[0, 7, 2]);
        assert!(f.is_h_reduced(&h).unwrap());
        assert_eq!(
            f.to_groupring_raw().canonical_rep(&h).unwrap(),
            x.canonical_rep(&h).unwrap()
        );
    }

    #[test]
    fn display_abstract() {
        let g = PowerClassGroup::abstract_group(AbGroup::new(vec![2, 2]).unwrap(), 4);
        assert_eq!(form(&g, &[0, 2, 0, 1]).to_string(), "@{(0,1):2,(1,1):1}");
    }
}
