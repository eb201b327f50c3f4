//! Witt equivalences and Witt classes.
//!
//! An equivalence kind decides which forms count as neutral and how a form
//! is reduced to its canonical representative. Kinds are registered by name
//! (`H`, `I`) so the CLI and the verification harness can pick one at runtime.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::diagform::DiagonalForm;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::groupring::{permanent_descends, GroupRingElement};
use crate::pointwise::{self, SearchBudget};
use crate::powerclass::PowerClassGroup;

/// A Witt equivalence on diagonal forms over a fixed power-class context.
pub trait Equivalence: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn ctx(&self) -> &Arc<PowerClassGroup>;

    fn subgroup(&self) -> &Subgroup;

    /// `(reduced part, neutral part)` with `Φ ≅ reduced ⊥ neutral`.
    fn decompose(&self, form: &DiagonalForm) -> Result<(DiagonalForm, DiagonalForm)>;

    /// Whether `form` is neutral, i.e. equivalent to the empty form.
    fn is_neutral(&self, form: &DiagonalForm) -> Result<bool>;

    /// A form `Ψ` with `Φ ⊥ Ψ` neutral.
    fn negate(&self, form: &DiagonalForm) -> Result<DiagonalForm>;

    fn reduce(&self, form: &DiagonalForm) -> Result<DiagonalForm> {
        self.check(form)?;
        Ok(self.decompose(form)?.0)
    }

    fn equivalent(&self, a: &DiagonalForm, b: &DiagonalForm) -> Result<bool> {
        Ok(self.reduce(a)? == self.reduce(b)?)
    }

    fn check(&self, form: &DiagonalForm) -> Result<()> {
        if form.ctx() == self.ctx() {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }
}

/// `Φ ~_H Ψ`: equal up to `H`-forms. Canonical representative is the
/// `H`-reduced part.
#[derive(Debug, Clone)]
pub struct HEquivalence {
    ctx: Arc<PowerClassGroup>,
    h: Subgroup,
}

impl HEquivalence {
    pub fn new(ctx: Arc<PowerClassGroup>, h: Subgroup) -> Result<Self> {
        if **h.group() != **ctx.group() {
            return Err(Error::CtxMismatch);
        }
        Ok(HEquivalence { ctx, h })
    }
}

impl Equivalence for HEquivalence {
    fn name(&self) -> &'static str {
        "H"
    }

    fn ctx(&self) -> &Arc<PowerClassGroup> {
        &self.ctx
    }

    fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    fn decompose(&self, form: &DiagonalForm) -> Result<(DiagonalForm, DiagonalForm)> {
        self.check(form)?;
        form.h_decompose(&self.h)
    }

    fn is_neutral(&self, form: &DiagonalForm) -> Result<bool> {
        self.check(form)?;
        form.is_h_form(&self.h)
    }

    fn negate(&self, form: &DiagonalForm) -> Result<DiagonalForm> {
        self.check(form)?;
        form.witt_neg(&self.h)
    }
}

/// Equivalence up to `I`-forms (isotropic `H_max`-forms) over a concrete field.
#[derive(Debug, Clone)]
pub struct IEquivalence {
    ctx: Arc<PowerClassGroup>,
    h: Subgroup,
    budget: SearchBudget,
}

impl IEquivalence {
    pub fn new(ctx: Arc<PowerClassGroup>, budget: SearchBudget) -> Result<Self> {
        ctx.require_field()?;
        let h = ctx.maximal();
        Ok(IEquivalence { ctx, h, budget })
    }
}

impl Equivalence for IEquivalence {
    fn name(&self) -> &'static str {
        "I"
    }

    fn ctx(&self) -> &Arc<PowerClassGroup> {
        &self.ctx
    }

    fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    fn decompose(&self, form: &DiagonalForm) -> Result<(DiagonalForm, DiagonalForm)> {
        self.check(form)?;
        pointwise::i_decompose(form, self.budget)
    }

    fn is_neutral(&self, form: &DiagonalForm) -> Result<bool> {
        self.check(form)?;
        pointwise::is_i_form(form, self.budget)
    }

    fn negate(&self, form: &DiagonalForm) -> Result<DiagonalForm> {
        self.check(form)?;
        pointwise::witt_neg_i(form, self.budget)
    }
}

type Constructor = fn(&Arc<PowerClassGroup>, Subgroup, SearchBudget) -> Result<Arc<dyn Equivalence>>;

fn build_h(ctx: &Arc<PowerClassGroup>, h: Subgroup, _: SearchBudget) -> Result<Arc<dyn Equivalence>> {
    Ok(Arc::new(HEquivalence::new(ctx.clone(), h)?))
}

fn build_i(ctx: &Arc<PowerClassGroup>, h: Subgroup, budget: SearchBudget) -> Result<Arc<dyn Equivalence>> {
    if !h.is_whole() {
        return Err(Error::InvalidSubgroup("I-equivalence is defined for H = G only".into()));
    }
    Ok(Arc::new(IEquivalence::new(ctx.clone(), budget)?))
}

/// Equivalence kinds by name.
#[derive(Clone)]
pub struct EquivalenceRegistry {
    entries: BTreeMap<&'static str, Constructor>,
}

impl Default for EquivalenceRegistry {
    fn default() -> Self {
        let mut r = EquivalenceRegistry { entries: BTreeMap::new() };
        r.register("H", build_h);
        r.register("I", build_i);
        r
    }
}

impl EquivalenceRegistry {
    pub fn register(&mut self, name: &'static str, ctor: Constructor) {
        self.entries.insert(name, ctor);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn build(
        &self,
        name: &str,
        ctx: &Arc<PowerClassGroup>,
        h: Subgroup,
        budget: SearchBudget,
    ) -> Result<Arc<dyn Equivalence>> {
        let ctor = self.entries.get(name).ok_or_else(|| Error::UnknownKind(name.to_string()))?;
        ctor(ctx, h, budget)
    }
}

/// An element of a Witt ring: a canonical reduced representative together
/// with the equivalence it is reduced for.
#[derive(Debug, Clone)]
pub struct WittClass {
    eq: Arc<dyn Equivalence>,
    rep: DiagonalForm,
}

impl PartialEq for WittClass {
    fn eq(&self, other: &Self) -> bool {
        self.eq.name() == other.eq.name() && self.eq.subgroup() == other.eq.subgroup() && self.rep == other.rep
    }
}

impl Eq for WittClass {}

impl WittClass {
    pub fn new(eq: Arc<dyn Equivalence>, form: &DiagonalForm) -> Result<Self> {
        let rep = eq.reduce(form)?;
        Ok(WittClass { eq, rep })
    }

    pub fn zero(eq: Arc<dyn Equivalence>) -> Result<Self> {
        let rep = DiagonalForm::zero(eq.ctx().clone())?;
        Ok(WittClass { eq, rep })
    }

    pub fn one(eq: Arc<dyn Equivalence>) -> Result<Self> {
        let one = DiagonalForm::from_classes(eq.ctx().clone(), &[0])?;
        Self::new(eq, &one)
    }

    pub fn kind(&self) -> &'static str {
        self.eq.name()
    }

    pub fn equivalence(&self) -> &Arc<dyn Equivalence> {
        &self.eq
    }

    pub fn rep(&self) -> &DiagonalForm {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.eq.name() != other.eq.name() {
            return Err(Error::KindMismatch { expected: self.eq.name().into(), found: other.eq.name().into() });
        }
        if self.eq.subgroup() != other.eq.subgroup() || self.eq.ctx() != other.eq.ctx() {
            return Err(Error::CtxMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Self::new(self.eq.clone(), &self.rep.osum(&other.rep)?)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        Self::new(self.eq.clone(), &self.rep.tensor(&other.rep)?)
    }

    pub fn neg(&self) -> Result<Self> {
        Self::new(self.eq.clone(), &self.eq.negate(&self.rep)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    pub fn dim_index(&self) -> Result<u64> {
        self.rep.dim_index(self.eq.subgroup())
    }

    /// The permanent of the class; fails when it is not a Witt invariant.
    pub fn permanent(&self) -> Result<usize> {
        if !permanent_descends(self.eq.subgroup()) {
            return Err(Error::NotInvariant);
        }
        Ok(self.rep.permanent())
    }

    /// Image in `Z[G]/(N_H)`, as the canonical lattice representative.
    pub fn to_groupring(&self) -> Result<GroupRingElement> {
        if self.eq.name() != "H" {
            return Err(Error::KindMismatch { expected: "H".into(), found: self.eq.name().into() });
        }
        self.rep.to_groupring_raw().canonical_rep(self.eq.subgroup())
    }

    /// Inverse of [`WittClass::to_groupring`]; any lift of the residue class is accepted.
    pub fn from_groupring(eq: Arc<dyn Equivalence>, x: &GroupRingElement) -> Result<Self> {
        if eq.name() != "H" {
            return Err(Error::KindMismatch { expected: "H".into(), found: eq.name().into() });
        }
        let rep = DiagonalForm::from_groupring(eq.ctx().clone(), x, eq.subgroup())?;
        Self::new(eq, &rep)
    }
}

impl fmt::Display for WittClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.rep, self.eq.name())
    }
}

/// All `H`-reduced multiplicity vectors of dimension at most `max_dim`.
pub fn reduced_classes(ctx: &Arc<PowerClassGroup>, h: &Subgroup, max_dim: u64) -> Result<Vec<DiagonalForm>> {
    let mut out = Vec::new();
    for mult in multisets(ctx.order(), max_dim) {
        let f = DiagonalForm::from_mult(ctx.clone(), mult)?;
        if f.is_h_reduced(h)? {
            out.push(f);
        }
    }
    Ok(out)
}

/// Every multiplicity vector of length `n` with total at most `max_dim`,
/// ordered by total, then lexicographically.
pub fn multisets(n: usize, max_dim: u64) -> Vec<Vec<u64>> {
    fn rec(n: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(k);
            rec(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for total in 0..=max_dim {
        rec(n, total, &mut Vec::with_capacity(n), &mut out);
    }
    out
}
