//! The integral group ring `Z[G]` and its quotient by the norm ideal of a
//! subgroup `H`, which models the Witt ring of diagonal forms.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{AbGroup, Subgroup};
use crate::lattice::{Lattice, QuotientGroup};

/// Largest filtration depth supported by [`filtration_quotient`].
pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    group: Arc<AbGroup>,
    coeffs: Vec<i128>,
}

fn same_group(a: &Arc<AbGroup>, b: &Arc<AbGroup>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

impl GroupRingElement {
    pub fn new(group: Arc<AbGroup>, coeffs: Vec<i128>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::GroupMismatch);
        }
        Ok(GroupRingElement { group, coeffs })
    }

    pub fn zero(group: Arc<AbGroup>) -> Self {
        let n = group.order();
        GroupRingElement { group, coeffs: vec![0; n] }
    }

    pub fn delta(group: Arc<AbGroup>, g: usize) -> Self {
        let mut x = Self::zero(group);
        x.coeffs[g] = 1;
        x
    }

    pub fn one(group: Arc<AbGroup>) -> Self {
        Self::delta(group, 0)
    }

    /// `N_H = Σ_{h ∈ H} h`.
    pub fn norm_element(h: &Subgroup) -> Self {
        let mut x = Self::zero(h.group().clone());
        for &m in h.members() {
            x.coeffs[m] = 1;
        }
        x
    }

    pub fn from_multiplicities(group: Arc<AbGroup>, mult: &[u64]) -> Result<Self> {
        let coeffs = mult.iter().map(|&m| m as i128).collect();
        Self::new(group, coeffs)
    }

    pub fn group(&self) -> &Arc<AbGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, g: usize) -> i128 {
        self.coeffs[g]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(GroupRingElement { group: self.group.clone(), coeffs })
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        GroupRingElement { group: self.group.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i128) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.checked_mul(k).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        Ok(GroupRingElement { group: self.group.clone(), coeffs })
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let mut coeffs = vec![0i128; self.coeffs.len()];
        for (a, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b, &y) in other.coeffs.iter().enumerate() {
                if y == 0 {
                    continue;
                }
                let z = self.group.add(a, b);
                let term = x.checked_mul(y).ok_or(Error::Overflow)?;
                coeffs[z] = coeffs[z].checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        Ok(GroupRingElement { group: self.group.clone(), coeffs })
    }

    /// `δ_g * self`.
    pub fn translate(&self, g: usize) -> Self {
        let mut coeffs = vec![0i128; self.coeffs.len()];
        for (a, &x) in self.coeffs.iter().enumerate() {
            coeffs[self.group.add(a, g)] = x;
        }
        GroupRingElement { group: self.group.clone(), coeffs }
    }

    /// Augmentation `ε(x) = Σ coeff`.
    pub fn augmentation(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    /// `Σ coeff_g · g` in `G` (the permanent of a diagonal form, additively).
    pub fn permanent(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .fold(0, |acc, (g, &c)| self.group.add(acc, self.group.times(c, g)))
    }

    /// Representative of `self` modulo `span{g·N_H}` vanishing at the least
    /// element of every `H`-coset.
    pub fn canonical_rep(&self, h: &Subgroup) -> Result<Self> {
        same_group(&self.group, h.group())?;
        let mut coeffs = self.coeffs.clone();
        for coset in h.cosets() {
            let shift = coeffs[coset[0]];
            if shift != 0 {
                for &g in &coset {
                    coeffs[g] -= shift;
                }
            }
        }
        Ok(GroupRingElement { group: self.group.clone(), coeffs })
    }

    pub fn to_vec(&self) -> Vec<i128> {
        self.coeffs.clone()
    }
}

/// Whether the permanent `x ↦ Σ coeff_g·g` kills every `g·N_H`, i.e.
/// descends to `Z[G]/(N_H)`.
pub fn permanent_descends(h: &Subgroup) -> bool {
    let n = GroupRingElement::norm_element(h);
    h.cosets().iter().all(|c| n.translate(c[0]).permanent() == 0)
}

/// Result of [`permanent_hom`]: the value and the descent flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PermanentValue {
    pub value: usize,
    pub well_defined: bool,
}

pub fn permanent_hom(x: &GroupRingElement, h: &Subgroup) -> PermanentValue {
    PermanentValue { value: x.permanent(), well_defined: permanent_descends(h) }
}

/// The ideal of `Z[G]` spanned by the translates of `N_H`.
#[derive(Debug, Clone)]
pub struct NormIdeal {
    h: Subgroup,
    generators: Vec<GroupRingElement>,
}

impl NormIdeal {
    pub fn new(h: &Subgroup) -> Self {
        let n = GroupRingElement::norm_element(h);
        let generators = h.cosets().iter().map(|c| n.translate(c[0])).collect();
        NormIdeal { h: h.clone(), generators }
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    pub fn generators(&self) -> &[GroupRingElement] {
        &self.generators
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::from_generators(self.h.group().order(), self.generators.iter().map(|g| g.to_vec()))
    }

    pub fn contains(&self, x: &GroupRingElement) -> Result<bool> {
        self.lattice()?.contains(x.coeffs())
    }
}

/// `Z[G]/(N_H)` with its dimension-index filtration `W ⊇ I ⊇ I^2 ⊇ ...`,
/// where `I` is the kernel of the augmentation taken mod `|H|`.
#[derive(Debug, Clone)]
pub struct WittGroupRing {
    h: Subgroup,
    norm: NormIdeal,
}

impl WittGroupRing {
    pub fn new(h: Subgroup) -> Self {
        let norm = NormIdeal::new(&h);
        WittGroupRing { h, norm }
    }

    pub fn group(&self) -> &Arc<AbGroup> {
        self.h.group()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.h
    }

    pub fn norm_ideal(&self) -> &NormIdeal {
        &self.norm
    }

    /// Z-generators of the preimage of `I` in `Z[G]`.
    pub fn dimension_ideal_generators(&self) -> Vec<GroupRingElement> {
        let g = self.group().clone();
        let mut gens = Vec::new();
        for x in g.elements().skip(1) {
            let d = GroupRingElement::delta(g.clone(), x)
                .sub(&GroupRingElement::one(g.clone()))
                .expect("same group");
            gens.push(d);
        }
        let mut base = GroupRingElement::zero(g.clone());
        base.coeffs[0] = self.h.order() as i128;
        gens.push(base);
        gens.extend(self.norm.generators().iter().cloned());
        gens
    }

    /// Preimages in `Z[G]` of `I^0 = W, I^1, ..., I^depth`.
    pub fn ideal_powers(&self, depth: usize) -> Result<Vec<Lattice>> {
        self.ideal_powers_with(depth, self.dimension_ideal_generators())
    }

    fn ideal_powers_with(&self, depth: usize, gens: Vec<GroupRingElement>) -> Result<Vec<Lattice>> {
        let g = self.group().clone();
        let n = g.order();
        let norm = self.norm.lattice()?;
        let mut out = vec![Lattice::full(n)];
        for _ in 0..depth {
            let prev = out.last().expect("nonempty").clone();
            let mut next = norm.clone();
            for b in prev.basis() {
                let b = GroupRingElement::new(g.clone(), b.clone())?;
                for gamma in &gens {
                    let prod = b.mul(gamma)?;
                    for t in g.elements() {
                        next.insert(prod.translate(t).coeffs())?;
                    }
                }
            }
            out.push(next);
        }
        Ok(out)
    }

    /// Invariant factors of `I^n / I^{n+1}`.
    pub fn filtration_quotient(&self, n: usize) -> Result<QuotientGroup> {
        if n > MAX_DEPTH {
            return Err(Error::TooDeep(n));
        }
        let powers = self.ideal_powers(n + 1)?;
        powers[n].quotient(&powers[n + 1])
    }

    /// Same as [`Self::filtration_quotient`] with the generator list of `I` shuffled.
    pub fn filtration_quotient_shuffled<R: Rng>(&self, n: usize, rng: &mut R) -> Result<QuotientGroup> {
        if n > MAX_DEPTH {
            return Err(Error::TooDeep(n));
        }
        let mut gens = self.dimension_ideal_generators();
        gens.shuffle(rng);
        let powers = self.ideal_powers_with(n + 1, gens)?;
        powers[n].quotient(&powers[n + 1])
    }

    /// Whether `k · I^n ⊆ I^{n+1}`.
    pub fn exponent_divides(&self, k: i128, n: usize) -> Result<bool> {
        if n > MAX_DEPTH {
            return Err(Error::TooDeep(n));
        }
        let powers = self.ideal_powers(n + 1)?;
        for b in powers[n].basis() {
            let scaled: Vec<i128> = b.iter().map(|x| x * k).collect();
            if !powers[n + 1].contains(&scaled)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the permanent induces an isomorphism `I / I^2 → G`: it must
    /// descend, vanish on `I^2`, be onto `G` from `I`, and `|I/I^2| = |G|`.
    pub fn permanent_iso_on_first_quotient(&self) -> Result<bool> {
        if !permanent_descends(&self.h) {
            return Ok(false);
        }
        let g = self.group().clone();
        let powers = self.ideal_powers(2)?;
        let perm = |v: &[i128]| -> Result<usize> {
            Ok(GroupRingElement::new(g.clone(), v.to_vec())?.permanent())
        };
        for b in powers[2].basis() {
            if perm(b)? != 0 {
                return Ok(false);
            }
        }
        let images: Vec<usize> = powers[1].basis().iter().map(|b| perm(b)).collect::<Result<_>>()?;
        let image = Subgroup::generated_by(g.clone(), &images)?;
        let quotient = powers[1].quotient(&powers[2])?;
        Ok(image.is_whole() && quotient.order() == Some(g.order() as i128))
    }
}

/// Invariant factors of `I^n/I^{n+1}` for `Z[G]/(N_H)`.
pub fn filtration_quotient(h: &Subgroup, n: usize) -> Result<QuotientGroup> {
    WittGroupRing::new(h.clone()).filtration_quotient(n)
}
