//! Separable forms over a finite field `k = F_q`.
//!
//! Over a finite field every separable diagonalizable form splits into
//! transfers `tr_{l/k}⟨c⟩` of one-dimensional forms from extensions
//! `l = F_{q^m}`. A form is kept as a multiset of such symbols. Two symbols
//! are identified when their degrees agree and their parameters lie in the
//! same power class of `l`; this is sufficient for isometry of the
//! transferred forms but possibly finer, since indecomposability of a
//! transfer is not decided here.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::diagform::DiagonalForm;
use crate::error::{Error, Result};
use crate::ffield::{make_field, Elem, Extension, FieldCtx};
use crate::group::{AbGroup, Subgroup};
use crate::powerclass::PowerClassGroup;

/// A base field together with the extensions already built over it.
#[derive(Debug)]
pub struct SepContext {
    base: Arc<FieldCtx>,
    exts: Mutex<BTreeMap<u32, Extension>>,
}

impl SepContext {
    pub fn new(base: Arc<FieldCtx>) -> Arc<Self> {
        Arc::new(SepContext { base, exts: Mutex::new(BTreeMap::new()) })
    }

    pub fn base(&self) -> &Arc<FieldCtx> {
        &self.base
    }

    /// `F_{q^m} / F_q`, built once and cached.
    pub fn extension(&self, m: u32) -> Result<Extension> {
        if m == 0 {
            return Err(Error::Parse("extension degree must be positive".into()));
        }
        if let Some(e) = self.exts.lock().unwrap().get(&m) {
            return Ok(e.clone());
        }
        let e = self.base.extend(m)?;
        self.exts.lock().unwrap().insert(m, e.clone());
        Ok(e)
    }

    fn same(&self, other: &SepContext) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || self.base.descriptor() == other.base.descriptor()
    }
}

/// `tr_{F_{q^m}/F_q}⟨c⟩`: the parameter `c` is kept as an element of
/// `F_{q^m}` together with its power class there.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TransferSymbol {
    pub m: u32,
    pub class: usize,
    pub witness: Elem,
}

impl TransferSymbol {
    fn key(&self) -> (u32, usize) {
        (self.m, self.class)
    }
}

impl PartialEq for TransferSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for TransferSymbol {}

impl PartialOrd for TransferSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TransferSymbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key()).then(self.witness.cmp(&other.witness))
    }
}

impl fmt::Display for TransferSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr[{}]{{{}}}", self.m, self.witness)
    }
}

/// `m` and class only: the symbol-level isometry test.
pub fn symbol_iso(a: &TransferSymbol, b: &TransferSymbol) -> bool {
    a.key() == b.key()
}

/// A multiset of transfer symbols over a fixed base field.
#[derive(Debug, Clone)]
pub struct SeparableForm {
    ctx: Arc<SepContext>,
    symbols: Vec<TransferSymbol>,
}

impl PartialEq for SeparableForm {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.symbols == other.symbols
    }
}

impl Eq for SeparableForm {}

impl SeparableForm {
    pub fn zero(ctx: Arc<SepContext>) -> Self {
        SeparableForm { ctx, symbols: Vec::new() }
    }

    fn from_symbols(ctx: Arc<SepContext>, mut symbols: Vec<TransferSymbol>) -> Self {
        symbols.sort();
        SeparableForm { ctx, symbols }
    }

    /// The symbol `tr_{F_{q^m}/F_q}⟨c⟩` for a nonzero `c` of `F_{q^m}`.
    pub fn symbol(ctx: &SepContext, m: u32, c: Elem) -> Result<TransferSymbol> {
        let ext = ctx.extension(m)?;
        let top = ext.top();
        if !top.contains(c) {
            return Err(Error::NotAnElement(c as u64));
        }
        if c == 0 {
            return Err(Error::ZeroCoefficient);
        }
        Ok(TransferSymbol { m, class: top.class_of(c)?, witness: c })
    }

    pub fn from_parts(ctx: Arc<SepContext>, parts: &[(u32, Elem)]) -> Result<Self> {
        let symbols = parts.iter().map(|&(m, c)| Self::symbol(&ctx, m, c)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_symbols(ctx, symbols))
    }

    /// A diagonal form over the base, as degree-one symbols.
    pub fn from_diagonal(ctx: Arc<SepContext>, form: &DiagonalForm) -> Result<Self> {
        let field = form.ctx().require_field()?;
        if field.descriptor() != ctx.base.descriptor() {
            return Err(Error::CtxMismatch);
        }
        let parts: Vec<(u32, Elem)> = form.representative_coeffs()?.into_iter().map(|c| (1, c)).collect();
        Self::from_parts(ctx, &parts)
    }

    /// The degree-one part as a diagonal form over the base.
    pub fn to_diagonal(&self) -> Result<DiagonalForm> {
        let ctx = PowerClassGroup::of_field(self.ctx.base.clone());
        let coeffs: Vec<Elem> = self.symbols.iter().filter(|s| s.m == 1).map(|s| s.witness).collect();
        DiagonalForm::from_coeffs(ctx, &coeffs)
    }

    pub fn ctx(&self) -> &Arc<SepContext> {
        &self.ctx
    }

    pub fn symbols(&self) -> &[TransferSymbol] {
        &self.symbols
    }

    pub fn dim(&self) -> u64 {
        self.symbols.iter().map(|s| s.m as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.symbols.is_empty()
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn osum(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let mut s = self.symbols.clone();
        s.extend_from_slice(&other.symbols);
        Ok(Self::from_symbols(self.ctx.clone(), s))
    }

    /// `b·Γ` for a nonzero base element `b`: `(m, c) ↦ (m, bc)`.
    pub fn scale_by_element(&self, b: Elem) -> Result<Self> {
        if b == 0 {
            return Err(Error::ZeroCoefficient);
        }
        let mut out = Vec::with_capacity(self.symbols.len());
        for s in &self.symbols {
            let ext = self.ctx.extension(s.m)?;
            let c = ext.top().mul(ext.embed(b), s.witness);
            out.push(Self::symbol(&self.ctx, s.m, c)?);
        }
        Ok(Self::from_symbols(self.ctx.clone(), out))
    }

    /// Scaling by the base power class `h`, through its least representative.
    pub fn scale_sep(&self, h: usize) -> Result<Self> {
        let s = self.ctx.base.s() as usize;
        if h >= s {
            return Err(Error::ClassOutOfRange(h));
        }
        self.scale_by_element(self.ctx.base.class_rep(h))
    }

    /// Base change to `F_{q^n}`. A symbol of degree `m` splits into
    /// `gcd(m, n)` symbols of degree `m / gcd(m, n)` over the new base, with
    /// parameters the Frobenius conjugates `c^{q^i}` in `F_{q^{lcm(m, n)}}`.
    pub fn base_change(&self, n: u32) -> Result<SeparableForm> {
        let target_ext = self.ctx.extension(n)?;
        let target = SepContext::new(target_ext.top().clone());
        let q = self.ctx.base.q();
        let mut out = Vec::new();
        for s in &self.symbols {
            let g = s.m.gcd(&n);
            let l = s.m.lcm(&n);
            let src = self.ctx.extension(s.m)?;
            let up = src.top().extend(l / s.m)?;
            let c = up.embed(s.witness);
            for i in 0..g {
                let conj = up.top().pow(c, pow_mod(q, i, up.top().q() - 1));
                out.push(Self::symbol(&target, s.m / g, conj)?);
            }
        }
        Ok(Self::from_symbols(target, out))
    }

    /// `θ ⊗ Γ` for a diagonal `θ` over the base: `⟨b⟩ ⊗ (m, c) = (m, bc)`.
    pub fn tensor_mixed(theta: &DiagonalForm, gamma: &SeparableForm) -> Result<SeparableForm> {
        let field = theta.ctx().require_field()?;
        if field.descriptor() != gamma.ctx.base.descriptor() {
            return Err(Error::CtxMismatch);
        }
        let mut out = SeparableForm::zero(gamma.ctx.clone());
        for b in theta.representative_coeffs()? {
            out = out.osum(&gamma.scale_by_element(b)?)?;
        }
        Ok(out)
    }

    /// `Γ ⊗ Γ'`: `(m, c) ⊗ (m', c')` is the sum over `i < gcd(m, m')` of
    /// the degree `lcm(m, m')` symbols with parameter `c · c'^{q^i}`.
    pub fn tensor_sep(&self, other: &SeparableForm) -> Result<SeparableForm> {
        self.same(other)?;
        let q = self.ctx.base.q();
        let mut out = Vec::new();
        for a in &self.symbols {
            for b in &other.symbols {
                let g = a.m.gcd(&b.m);
                let l = a.m.lcm(&b.m);
                let ea = self.ctx.extension(a.m)?.top().extend(l / a.m)?;
                let eb = self.ctx.extension(b.m)?.top().extend(l / b.m)?;
                let top = ea.top().clone();
                let ca = ea.embed(a.witness);
                let cb = eb.embed(b.witness);
                for i in 0..g {
                    let conj = top.pow(cb, pow_mod(q, i, top.q() - 1));
                    out.push(Self::symbol(&self.ctx, l, top.mul(ca, conj))?);
                }
            }
        }
        Ok(Self::from_symbols(self.ctx.clone(), out))
    }

    /// `s_*` of a diagonal form over `l = F_{q^m}`: `⟨c_i⟩ ↦ (m, c_i)`.
    pub fn transfer(theta: &DiagonalForm, ctx: Arc<SepContext>) -> Result<SeparableForm> {
        let l = theta.ctx().require_field()?;
        let k = &ctx.base;
        if l.p() != k.p() || l.d() != k.d() || l.t() % k.t() != 0 {
            return Err(Error::CtxMismatch);
        }
        let m = l.t() / k.t();
        let ext = ctx.extension(m)?;
        if ext.top().descriptor() != l.descriptor() {
            return Err(Error::CtxMismatch);
        }
        let parts: Vec<(u32, Elem)> = theta.representative_coeffs()?.into_iter().map(|c| (m, c)).collect();
        Self::from_parts(ctx, &parts)
    }

    /// `(dim, permanent)`; the permanent of `(m, c)` is the class of `N_{l/k}(c)`.
    pub fn sep_invariants(&self) -> Result<SepInvariants> {
        let base = &self.ctx.base;
        let mut perm = 0usize;
        let s = base.s() as usize;
        for sym in &self.symbols {
            let n = self.ctx.extension(sym.m)?.norm(sym.witness);
            perm = (perm + base.class_of(n)?) % s.max(1);
        }
        Ok(SepInvariants { dim: self.dim(), permanent: if s == 0 { 0 } else { perm } })
    }

    /// Splits `Γ` into an `H`-reduced remainder and an `H`-form part.
    ///
    /// Scaling by `h ∈ H` moves a degree-`m` symbol by the image of `h` in
    /// the power classes of `F_{q^m}`. Per degree, the orbits of that image
    /// subgroup are complete `H`-blocks, and each block is extracted with
    /// its minimum multiplicity.
    pub fn h_analyze_sep(&self, h: &[usize]) -> Result<SepAnalysis> {
        let base_s = self.ctx.base.s() as usize;
        if let Some(&bad) = h.iter().find(|&&c| c >= base_s) {
            return Err(Error::ClassOutOfRange(bad));
        }
        let mut by_degree: BTreeMap<u32, Vec<TransferSymbol>> = BTreeMap::new();
        for s in &self.symbols {
            by_degree.entry(s.m).or_default().push(*s);
        }
        let mut reduced = Vec::new();
        let mut h_part = Vec::new();
        for (m, syms) in by_degree {
            let ext = self.ctx.extension(m)?;
            let top_group = Arc::new(AbGroup::cyclic(ext.top().s()));
            let image: Vec<usize> = h.iter().map(|&c| ext.class_embedding(c)).collect();
            let hl = Subgroup::generated_by(top_group, &image)?;
            let mut per_class: BTreeMap<usize, Vec<TransferSymbol>> = BTreeMap::new();
            for s in syms {
                per_class.entry(s.class).or_default().push(s);
            }
            for coset in hl.cosets() {
                let take = coset.iter().map(|c| per_class.get(c).map_or(0, Vec::len)).min().unwrap_or(0);
                for c in &coset {
                    if let Some(list) = per_class.get(c) {
                        h_part.extend_from_slice(&list[..take]);
                        reduced.extend_from_slice(&list[take..]);
                    }
                }
            }
        }
        let reduced = Self::from_symbols(self.ctx.clone(), reduced);
        Ok(SepAnalysis {
            is_h_form: reduced.is_zero(),
            reduced,
            h_part: Self::from_symbols(self.ctx.clone(), h_part),
        })
    }

    pub fn to_json(&self) -> SeparableFormJson {
        SeparableFormJson {
            p: self.ctx.base.p(),
            t: self.ctx.base.t(),
            d: self.ctx.base.d(),
            symbols: self.symbols.clone(),
        }
    }

    pub fn from_json(doc: &SeparableFormJson) -> Result<SeparableForm> {
        let ctx = SepContext::new(make_field(doc.p, doc.t, doc.d)?);
        let parts: Vec<(u32, Elem)> = doc.symbols.iter().map(|s| (s.m, s.witness)).collect();
        let form = Self::from_parts(ctx, &parts)?;
        if form.symbols.iter().zip(&doc.symbols).any(|(a, b)| a.class != b.class) {
            return Err(Error::Parse("symbol class does not match its witness".into()));
        }
        Ok(form)
    }

    /// Parses `tr[m]{c}` terms and plain base coefficients, comma separated.
    pub fn parse(ctx: Arc<SepContext>, text: &str) -> Result<SeparableForm> {
        let text = text.trim();
        if text.is_empty() || text == "<>" {
            return Ok(Self::zero(ctx));
        }
        let mut parts = Vec::new();
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some(rest) = tok.strip_prefix("tr[") {
                let (m, rest) = rest
                    .split_once("]{")
                    .ok_or_else(|| Error::Parse(format!("bad transfer symbol `{tok}`")))?;
                let c = rest
                    .strip_suffix('}')
                    .ok_or_else(|| Error::Parse(format!("bad transfer symbol `{tok}`")))?;
                let m: u32 = m.trim().parse().map_err(|_| Error::Parse(format!("bad degree in `{tok}`")))?;
                let c: Elem = c.trim().parse().map_err(|_| Error::Parse(format!("bad parameter in `{tok}`")))?;
                parts.push((m, c));
            } else {
                let n: i64 = tok.parse().map_err(|_| Error::Parse(format!("bad coefficient `{tok}`")))?;
                parts.push((1, ctx.base.from_int(n)?));
            }
        }
        Self::from_parts(ctx, &parts)
    }
}

impl fmt::Display for SeparableForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "<>");
        }
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn pow_mod(base: u64, e: u32, modulus: u64) -> u64 {
    let mut r = 1u64 % modulus;
    for _ in 0..e {
        r = ((r as u128 * base as u128) % modulus as u128) as u64;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SepInvariants {
    pub dim: u64,
    pub permanent: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepAnalysis {
    pub is_h_form: bool,
    pub reduced: SeparableForm,
    pub h_part: SeparableForm,
}

/// Serialized separable form: the base field and its symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparableFormJson {
    pub p: u64,
    pub t: u32,
    pub d: u32,
    pub symbols: Vec<TransferSymbol>,
}
