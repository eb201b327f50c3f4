//! Reproducible falsification checks, one per claim, registered by id.
//!
//! A check runs over an exhaustive range or a seeded random sample and
//! returns a [`CheckReport`]. Failing reports carry a counterexample and can
//! be written to a replay file, which [`replay`] re-runs with the same
//! parameters and seed.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::diagform::DiagonalForm;
use crate::equivalence::{multisets, reduced_classes, EquivalenceRegistry, WittClass};
use crate::error::{Error, Result};
use crate::ffield::make_field;
use crate::group::{AbGroup, Subgroup};
use crate::groupring::WittGroupRing;
use crate::pointwise::{self, SearchBudget};
use crate::powerclass::PowerClassGroup;
use crate::sepform::{SepContext, SeparableForm};

pub const DEFAULT_SEED: u64 = 0x7769_7474;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: Value,
    pub verdict: Verdict,
    pub cases_run: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub elapsed_ms: u64,
    pub seed: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// What a check body returns.
#[derive(Debug, Default)]
pub struct Outcome {
    pub cases: u64,
    pub counterexample: Option<Value>,
    pub details: Value,
}

impl Outcome {
    fn fail(cases: u64, counterexample: Value) -> Result<Outcome> {
        Ok(Outcome { cases, counterexample: Some(counterexample), details: Value::Null })
    }

    fn pass(cases: u64, details: Value) -> Result<Outcome> {
        Ok(Outcome { cases, counterexample: None, details })
    }
}

/// Check parameters: defaults overlaid with caller overrides.
#[derive(Debug, Clone)]
pub struct Params(Map<String, Value>);

impl Params {
    fn get(&self, key: &str) -> Result<&Value> {
        self.0.get(key).ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.get(key)?.as_u64().ok_or_else(|| Error::Parse(format!("parameter `{key}` must be an integer")))
    }

    pub fn str(&self, key: &str) -> Result<String> {
        match self.get(key)? {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Error::Parse(format!("parameter `{key}` must be a string"))),
        }
    }

    pub fn strs(&self, key: &str) -> Result<Vec<String>> {
        match self.get(key)? {
            Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    _ => Err(Error::Parse(format!("parameter `{key}` must list strings"))),
                })
                .collect(),
            Value::String(s) => Ok(s.split(';').map(|x| x.trim().to_string()).collect()),
            Value::Number(n) => Ok(vec![n.to_string()]),
            _ => Err(Error::Parse(format!("parameter `{key}` must be a list"))),
        }
    }

    pub fn u64s(&self, key: &str) -> Result<Vec<u64>> {
        match self.get(key)? {
            Value::Array(items) => items
                .iter()
                .map(|v| v.as_u64().ok_or_else(|| Error::Parse(format!("parameter `{key}` must list integers"))))
                .collect(),
            Value::Number(n) => n.as_u64().map(|x| vec![x]).ok_or_else(|| Error::Parse(key.to_string())),
            _ => Err(Error::Parse(format!("parameter `{key}` must be a list of integers"))),
        }
    }

    /// A list of field descriptors `{p, t, d, max_dim}`.
    fn fields(&self, key: &str) -> Result<Vec<(u64, u32, u32, u64)>> {
        let items = self
            .get(key)?
            .as_array()
            .ok_or_else(|| Error::Parse(format!("parameter `{key}` must be a list of fields")))?;
        items
            .iter()
            .map(|v| {
                let n = |k: &str| {
                    v.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("field entry needs `{k}`")))
                };
                Ok((n("p")?, n("t")? as u32, n("d")? as u32, n("max_dim")?))
            })
            .collect()
    }

    pub fn to_value(&self) -> Value {
        Value::Object(self.0.clone())
    }
}

/// A registered claim check.
pub trait Check: Send + Sync {
    fn id(&self) -> &'static str;
    fn claim(&self) -> &'static str;
    fn defaults(&self) -> Value;
    fn run(&self, params: &Params, rng: &mut ChaCha8Rng) -> Result<Outcome>;
}

type Body = fn(&Params, &mut ChaCha8Rng) -> Result<Outcome>;

struct FnCheck {
    id: &'static str,
    claim: &'static str,
    defaults: fn() -> Value,
    body: Body,
}

impl Check for FnCheck {
    fn id(&self) -> &'static str {
        self.id
    }

    fn claim(&self) -> &'static str {
        self.claim
    }

    fn defaults(&self) -> Value {
        (self.defaults)()
    }

    fn run(&self, params: &Params, rng: &mut ChaCha8Rng) -> Result<Outcome> {
        (self.body)(params, rng)
    }
}

/// Checks by id.
pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Arc<dyn Check>>,
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = CheckRegistry { checks: BTreeMap::new() };
        let table: [(&'static str, &'static str, fn() -> Value, Body); 12] = [
            ("thm1", "diagonal H-forms are sums of coset forms <a_1..a_s> x <c>", d_thm1, thm1),
            ("prop1-dim", "H-form dimensions are multiples of |H|", d_prop1, prop1_dim),
            ("thm2-oracle", "H-equivalence equals padding by full coset forms", d_thm2, thm2_oracle),
            ("prop3-inverse", "every form has an additive inverse modulo H-forms", d_prop3, prop3_inverse),
            ("exponent-lemma", "p * I^n lies in I^(n+1)", d_exponent, exponent_lemma),
            ("thm3", "the permanent induces I/I^2 = G for |G| = 3", d_thm3, thm3),
            ("torsion-free", "n x <1> is never H-equivalent to 0", d_torsion, torsion_free),
            ("round-univ-equiv", "H_max-form iff round and universal", d_round, round_univ_equiv),
            ("witt-real-even", "the Witt ring for G = H = Z/2 is Z", d_real, witt_real_even),
            ("i-decomp-unique", "I-decomposition exists and is unique", d_idecomp, i_decomp_unique),
            ("groupring-iso", "form classes map homomorphically to Z[G]/(N_H)", d_gr, groupring_iso),
            ("projection-formula", "transfer commutes with tensoring by base forms", d_proj, projection_formula),
        ];
        for (id, claim, defaults, body) in table {
            r.register(Arc::new(FnCheck { id, claim, defaults, body }));
        }
        r
    }
}

impl CheckRegistry {
    pub fn register(&mut self, check: Arc<dyn Check>) {
        self.checks.insert(check.id(), check);
    }

    pub fn ids(&self) -> Vec<&'static str> {
        self.checks.keys().copied().collect()
    }

    pub fn get(&self, id: &str) -> Result<&Arc<dyn Check>> {
        self.checks.get(id).ok_or_else(|| Error::UnknownCheck(id.to_string()))
    }

    /// Runs one check. `overrides` must be a JSON object whose keys are
    /// among the check's default parameters.
    pub fn run(&self, id: &str, overrides: &Value, seed: u64) -> Result<CheckReport> {
        let check = self.get(id)?;
        let mut params = match check.defaults() {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        match overrides {
            Value::Null => {}
            Value::Object(o) => {
                for (k, v) in o {
                    if !params.contains_key(k) {
                        return Err(Error::Parse(format!("check `{id}` has no parameter `{k}`")));
                    }
                    params.insert(k.clone(), v.clone());
                }
            }
            _ => return Err(Error::Parse("check parameters must be a JSON object".into())),
        }
        let params = Params(params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = Instant::now();
        let out = check.run(&params, &mut rng)?;
        Ok(CheckReport {
            check_id: id.to_string(),
            params: params.to_value(),
            verdict: if out.counterexample.is_some() { Verdict::Fail } else { Verdict::Pass },
            cases_run: out.cases,
            counterexample: out.counterexample,
            details: out.details,
            elapsed_ms: start.elapsed().as_millis() as u64,
            seed,
        })
    }

    /// Runs every check with default parameters, in parallel; reports come
    /// back ordered by id.
    pub fn run_all(&self, seed: u64) -> Result<Vec<CheckReport>> {
        let ids = self.ids();
        let mut reports = ids.par_iter().map(|id| self.run(id, &Value::Null, seed)).collect::<Result<Vec<_>>>()?;
        reports.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        Ok(reports)
    }
}

/// Runs a check by id through the default registry.
pub fn run_check(id: &str, overrides: &Value, seed: u64) -> Result<CheckReport> {
    CheckRegistry::default().run(id, overrides, seed)
}

/// Writes a failing report to `dir/replay-<id>-<seed>.json`. Passing
/// reports are not written.
pub fn write_replay(report: &CheckReport, dir: &Path) -> Result<Option<PathBuf>> {
    if report.passed() {
        return Ok(None);
    }
    let path = dir.join(format!("replay-{}-{}.json", report.check_id, report.seed));
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::Io(e.to_string()))?;
    Ok(Some(path))
}

/// Re-runs the check recorded in a report file with its parameters and seed.
pub fn replay(path: &Path) -> Result<CheckReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    let old: CheckReport = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    run_check(&old.check_id, &old.params, old.seed)
}

fn abstract_ctx(desc: &str, d: u32) -> Result<Arc<PowerClassGroup>> {
    Ok(PowerClassGroup::abstract_group(AbGroup::parse(desc)?, d))
}

fn field_ctx(p: u64, t: u32, d: u32) -> Result<Arc<PowerClassGroup>> {
    Ok(PowerClassGroup::of_field(make_field(p, t, d)?))
}

/// A field-mode form with the least coefficient of each class.
fn field_form(ctx: &Arc<PowerClassGroup>, mult: Vec<u64>) -> Result<DiagonalForm> {
    let f = DiagonalForm::from_mult(ctx.clone(), mult)?;
    DiagonalForm::from_coeffs(ctx.clone(), &f.representative_coeffs()?)
}

fn coset_constant(f: &DiagonalForm, h: &Subgroup) -> bool {
    h.cosets().iter().all(|c| c.iter().all(|&g| f.mult()[g] == f.mult()[c[0]]))
}

fn d_thm1() -> Value {
    json!({"groups": ["2", "3", "4", "2x2"], "d": 3, "max_dim": 6})
}

fn thm1(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut cases = 0;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, p.u64("d")? as u32)?;
        for h in Subgroup::enumerate_all(ctx.group().clone()) {
            for mult in multisets(ctx.order(), p.u64("max_dim")?) {
                cases += 1;
                let f = DiagonalForm::from_mult(ctx.clone(), mult)?;
                let (reduced, hpart) = f.h_decompose(&h)?;
                let mut rebuilt = DiagonalForm::zero(ctx.clone())?;
                for coset in h.cosets() {
                    let block = DiagonalForm::coset_form(ctx.clone(), &h, coset[0])?;
                    rebuilt = rebuilt.osum(&block.times(hpart.mult()[coset[0]]))?;
                }
                let ok = rebuilt == hpart && reduced.osum(&hpart)? == f && (f.is_h_form(&h)? == reduced.is_zero());
                if !ok {
                    return Outcome::fail(cases, json!({"group": desc, "H": h.members(), "form": f.mult()}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_prop1() -> Value {
    json!({"groups": ["3"], "d": 3, "max_dim": 9})
}

fn prop1_dim(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut cases = 0;
    let d = p.u64("d")?;
    let mut h_forms = 0;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, d as u32)?;
        for h in Subgroup::enumerate_all(ctx.group().clone()) {
            let s = h.order() as u64;
            for mult in multisets(ctx.order(), p.u64("max_dim")?) {
                cases += 1;
                let f = DiagonalForm::from_mult(ctx.clone(), mult)?;
                if !f.is_h_form(&h)? {
                    continue;
                }
                h_forms += 1;
                let dim = f.dim();
                let forbidden = s == d && !f.is_zero() && (dim % d == 1 || dim % d == d - 1);
                if dim % s != 0 || !coset_constant(&f, &h) || forbidden {
                    return Outcome::fail(cases, json!({"group": desc, "H": h.members(), "form": f.mult()}));
                }
            }
        }
    }
    Outcome::pass(cases, json!({"h_forms": h_forms}))
}

fn d_thm2() -> Value {
    json!({"groups": ["3"], "d": 3, "max_dim": 6, "max_padding": 6})
}

/// `Φ ~ Ψ` by brute force: one is the other plus `l` full-coset forms.
fn padding_oracle(a: &DiagonalForm, b: &DiagonalForm, coset: &DiagonalForm, max_l: u64) -> Result<bool> {
    for l in 0..=max_l {
        let pad = coset.times(l);
        if *a == b.osum(&pad)? || *b == a.osum(&pad)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn thm2_oracle(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut cases = 0;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, p.u64("d")? as u32)?;
        let h = ctx.maximal();
        let full = DiagonalForm::coset_form(ctx.clone(), &h, 0)?;
        let forms: Vec<DiagonalForm> = multisets(ctx.order(), p.u64("max_dim")?)
            .into_iter()
            .map(|m| DiagonalForm::from_mult(ctx.clone(), m))
            .collect::<Result<_>>()?;
        for a in &forms {
            for b in &forms {
                cases += 1;
                if a.h_equivalent(b, &h)? != padding_oracle(a, b, &full, p.u64("max_padding")?)? {
                    return Outcome::fail(cases, json!({"group": desc, "a": a.mult(), "b": b.mult()}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_prop3() -> Value {
    json!({"groups": ["2", "3", "4", "2x2"], "d": 3, "max_dim": 5})
}

fn prop3_inverse(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut cases = 0;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, p.u64("d")? as u32)?;
        for h in Subgroup::enumerate_all(ctx.group().clone()) {
            for mult in multisets(ctx.order(), p.u64("max_dim")?) {
                cases += 1;
                let f = DiagonalForm::from_mult(ctx.clone(), mult)?;
                let neg = f.witt_neg(&h)?;
                let orbit = f.orbit_inverse(&h)?;
                let ok = f.osum(&neg)?.is_h_form(&h)?
                    && f.osum(&orbit)?.is_h_form(&h)?
                    && neg.h_equivalent(&orbit, &h)?
                    && neg.dim() <= orbit.dim();
                if !ok {
                    return Outcome::fail(cases, json!({"group": desc, "H": h.members(), "form": f.mult()}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_exponent() -> Value {
    json!({"primes": [3, 5], "depths": [1, 2]})
}

fn exponent_lemma(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut cases = 0;
    let mut details = Vec::new();
    for prime in p.u64s("primes")? {
        let g = Arc::new(AbGroup::new(vec![prime as u32])?);
        let ring = WittGroupRing::new(Subgroup::whole(g));
        for n in p.u64s("depths")? {
            cases += 1;
            let n = n as usize;
            let quotient = ring.filtration_quotient(n)?;
            let ok = ring.exponent_divides(prime as i128, n)?
                && quotient.exponent().is_some_and(|e| (prime as i128) % e == 0);
            details.push(json!({"p": prime, "n": n, "quotient": quotient}));
            if !ok {
                return Outcome::fail(cases, json!({"p": prime, "n": n, "quotient": quotient}));
            }
        }
    }
    Outcome::pass(cases, Value::Array(details))
}

fn d_thm3() -> Value {
    json!({"group": "3", "field": {"p": 7, "t": 1, "d": 3}, "max_dim": 6})
}

fn thm3(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let g = Arc::new(AbGroup::parse(&p.str("group")?)?);
    let order = g.order() as i128;
    let ring = WittGroupRing::new(Subgroup::whole(g.clone()));
    let q0 = ring.filtration_quotient(0)?;
    let q1 = ring.filtration_quotient(1)?;
    let iso = ring.permanent_iso_on_first_quotient()?;
    let mut cases = 3;
    if q1.free_rank != 0 || q1.order() != Some(order) || !iso {
        return Outcome::fail(cases, json!({"pipeline": "abstract", "I/I^2": q1, "W/I": q0}));
    }
    // the same statement through a concrete field: the permanent computed
    // from coefficients vanishes exactly on I^2
    let desc = p.get("field")?;
    let n = |k: &str| desc.get(k).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("field needs `{k}`")));
    let ctx = field_ctx(n("p")?, n("t")? as u32, n("d")? as u32)?;
    let field = ctx.require_field()?.clone();
    let concrete = WittGroupRing::new(ctx.maximal());
    let fq1 = concrete.filtration_quotient(1)?;
    if fq1 != q1 && ctx.order() == g.order() {
        return Outcome::fail(cases, json!({"pipeline": "field", "I/I^2": fq1}));
    }
    let powers = concrete.ideal_powers(2)?;
    let s = ctx.order() as u64;
    for f in reduced_classes(&ctx, &ctx.maximal(), p.u64("max_dim")?)? {
        if f.dim() % s != 0 {
            continue;
        }
        cases += 1;
        let coeffs = f.representative_coeffs()?;
        let product = coeffs.iter().fold(1, |acc, &c| field.mul(acc, c));
        let perm = field.class_of(product)?;
        let x = f.to_groupring_raw();
        let in_square = powers[2].contains(x.coeffs())?;
        if perm != f.permanent() || in_square != (perm == 0) {
            return Outcome::fail(cases, json!({"pipeline": "field", "form": coeffs, "permanent": perm}));
        }
    }
    Outcome::pass(cases, json!({"W/I": q0, "I/I^2": q1}))
}

fn d_torsion() -> Value {
    json!({"groups": ["2", "3"], "d": 3, "n_max": 100})
}

fn torsion_free(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let reg = EquivalenceRegistry::default();
    let mut cases = 0;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, p.u64("d")? as u32)?;
        // with H trivial every form is an H-form and the ring is zero
        for h in Subgroup::enumerate_all(ctx.group().clone()).into_iter().filter(|h| h.order() > 1) {
            let eq = reg.build("H", &ctx, h.clone(), SearchBudget::default())?;
            let one = WittClass::one(eq.clone())?;
            let mut acc = WittClass::zero(eq)?;
            for n in 1..=p.u64("n_max")? {
                cases += 1;
                acc = acc.add(&one)?;
                if acc.is_zero() {
                    return Outcome::fail(cases, json!({"group": desc, "H": h.members(), "n": n}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_round() -> Value {
    json!({"fields": [
        {"p": 7, "t": 1, "d": 3, "max_dim": 5},
        {"p": 13, "t": 1, "d": 3, "max_dim": 4},
        {"p": 13, "t": 1, "d": 4, "max_dim": 4}
    ]})
}

fn round_univ_equiv(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let budget = SearchBudget::default();
    let mut cases = 0;
    for (pr, t, d, max_dim) in p.fields("fields")? {
        let ctx = field_ctx(pr, t, d)?;
        for mult in multisets(ctx.order(), max_dim) {
            if mult.iter().all(|&m| m == 0) {
                continue;
            }
            cases += 1;
            let f = field_form(&ctx, mult)?;
            let c = pointwise::classify(&f, budget)?;
            if !c.consistent {
                return Outcome::fail(cases, json!({"q": ctx.require_field()?.q(), "d": d, "form": f.mult(), "flags": c}));
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_real() -> Value {
    json!({"d": 4, "max_dim": 12})
}

fn witt_real_even(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let ctx = abstract_ctx("2", p.u64("d")? as u32)?;
    let eq = EquivalenceRegistry::default().build("H", &ctx, ctx.maximal(), SearchBudget::default())?;
    let value = |c: &WittClass| c.rep().mult()[0] as i64 - c.rep().mult()[1] as i64;
    let max_dim = p.u64("max_dim")?;
    let classes: Vec<WittClass> = reduced_classes(&ctx, eq.subgroup(), max_dim)?
        .iter()
        .map(|f| WittClass::new(eq.clone(), f))
        .collect::<Result<_>>()?;
    let mut cases = 0;
    // bijection onto [-max_dim, max_dim]
    let mut seen: Vec<i64> = classes.iter().map(value).collect();
    seen.sort_unstable();
    let expect: Vec<i64> = (-(max_dim as i64)..=max_dim as i64).collect();
    if seen != expect {
        return Outcome::fail(1, json!({"values": seen}));
    }
    for a in &classes {
        for b in &classes {
            cases += 1;
            let sum = value(&a.add(b)?);
            let prod = value(&a.mul(b)?);
            if sum != value(a) + value(b) || prod != value(a) * value(b) {
                return Outcome::fail(cases, json!({"a": a.rep().mult(), "b": b.rep().mult()}));
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_idecomp() -> Value {
    json!({"fields": [{"p": 7, "t": 1, "d": 3, "max_dim": 5}]})
}

/// All multiplicity vectors `≤ mult` componentwise.
fn sub_multisets(mult: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for &m in mult {
        out = out.into_iter().flat_map(|v| (0..=m).map(move |k| [v.clone(), vec![k]].concat())).collect();
    }
    out
}

fn i_decomp_unique(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let budget = SearchBudget::default();
    let mut cases = 0;
    for (pr, t, d, max_dim) in p.fields("fields")? {
        let ctx = field_ctx(pr, t, d)?;
        let hmax = ctx.maximal();
        let mut i_form_cache: HashMap<Vec<u64>, bool> = HashMap::new();
        let mut is_i = |m: &[u64]| -> Result<bool> {
            if let Some(&b) = i_form_cache.get(m) {
                return Ok(b);
            }
            let b = pointwise::is_i_form(&field_form(&ctx, m.to_vec())?, budget)?;
            i_form_cache.insert(m.to_vec(), b);
            Ok(b)
        };
        for mult in multisets(ctx.order(), max_dim) {
            cases += 1;
            let f = field_form(&ctx, mult.clone())?;
            let (fi, ti) = pointwise::i_decompose(&f, budget)?;
            let bad = |why: &str| json!({"q": pr.pow(t), "form": mult, "reason": why});
            if fi.osum(&ti)? != f {
                return Outcome::fail(cases, bad("not a decomposition"));
            }
            if pointwise::i_reduce(&fi, budget)? != fi {
                return Outcome::fail(cases, bad("reduction not idempotent"));
            }
            if is_i(f.mult())? && !f.is_h_form(&hmax)? {
                return Outcome::fail(cases, bad("I-form that is not an H-form"));
            }
            if pointwise::i_reduce(&f.h_reduce(&hmax)?, budget)?.h_reduce(&hmax)? != f.h_reduce(&hmax)? {
                return Outcome::fail(cases, bad("W(I) -> W(H) misses the class"));
            }
            // uniqueness: every split A ⊥ B with B an I-form and A free of
            // nonzero I-form summands has A = Φ_I
            for b in sub_multisets(&mult) {
                if !is_i(&b)? {
                    continue;
                }
                let a: Vec<u64> = mult.iter().zip(&b).map(|(x, y)| x - y).collect();
                let mut a_reduced = true;
                for c in sub_multisets(&a) {
                    if c.iter().any(|&x| x > 0) && is_i(&c)? {
                        a_reduced = false;
                        break;
                    }
                }
                if a_reduced && a != fi.mult() {
                    return Outcome::fail(cases, json!({"q": pr.pow(t), "form": mult, "other_reduced_part": a}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_gr() -> Value {
    json!({"groups": ["2", "3", "4", "2x2"], "d": 3, "pairs": 10000, "max_mult": 4})
}

fn groupring_iso(p: &Params, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let reg = EquivalenceRegistry::default();
    let mut cases = 0;
    let max_mult = p.u64("max_mult")?;
    for desc in p.strs("groups")? {
        let ctx = abstract_ctx(&desc, p.u64("d")? as u32)?;
        let n = ctx.order();
        // H = G and every proper nontrivial subgroup
        let subgroups: Vec<Subgroup> = Subgroup::enumerate_all(ctx.group().clone())
            .into_iter()
            .filter(|h| h.order() > 1 || n == 1)
            .collect();
        for h in subgroups {
            let eq = reg.build("H", &ctx, h.clone(), SearchBudget::default())?;
            let map = |f: &DiagonalForm| WittClass::new(eq.clone(), f)?.to_groupring();
            for _ in 0..p.u64("pairs")? {
                cases += 1;
                let mut random = || -> Result<DiagonalForm> {
                    DiagonalForm::from_mult(ctx.clone(), (0..n).map(|_| rng.gen_range(0..=max_mult)).collect())
                };
                let (a, b) = (random()?, random()?);
                let (x, y) = (map(&a)?, map(&b)?);
                let sum_ok = map(&a.osum(&b)?)? == x.add(&y)?.canonical_rep(&h)?;
                let prod_ok = map(&a.tensor(&b)?)? == x.mul(&y)?.canonical_rep(&h)?;
                let neg_ok = map(&a.witt_neg(&h)?)? == x.neg().canonical_rep(&h)?;
                if !(sum_ok && prod_ok && neg_ok) {
                    return Outcome::fail(cases, json!({"group": desc, "H": h.members(), "a": a.mult(), "b": b.mult()}));
                }
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}

fn d_proj() -> Value {
    json!({"p": 7, "t": 1, "d": 3, "m": 2, "max_theta_dim": 3, "max_hform_dim": 6})
}

fn projection_formula(p: &Params, _: &mut ChaCha8Rng) -> Result<Outcome> {
    let base = make_field(p.u64("p")?, p.u64("t")? as u32, p.u64("d")? as u32)?;
    let sep = SepContext::new(base.clone());
    let ext = sep.extension(p.u64("m")? as u32)?;
    let k = PowerClassGroup::of_field(base.clone());
    let l = PowerClassGroup::of_field(ext.top().clone());
    let mut cases = 0;
    // every coefficient multiset θ over k, every c in l
    let elems: Vec<u32> = base.nonzero().collect();
    let mut thetas: Vec<Vec<u32>> = vec![Vec::new()];
    let mut frontier = thetas.clone();
    for _ in 0..p.u64("max_theta_dim")? {
        let mut next = Vec::new();
        for v in &frontier {
            for &e in elems.iter().filter(|&&e| v.last().is_none_or(|&x| e >= x)) {
                next.push([v.clone(), vec![e]].concat());
            }
        }
        thetas.extend(next.iter().cloned());
        frontier = next;
    }
    for theta in &thetas {
        let theta_k = DiagonalForm::from_coeffs(k.clone(), theta)?;
        for c in ext.top().nonzero() {
            cases += 1;
            let c_form = DiagonalForm::from_coeffs(l.clone(), &[c])?;
            let prod: Vec<u32> = theta.iter().map(|&b| ext.top().mul(ext.embed(b), c)).collect();
            let lhs = SeparableForm::transfer(&DiagonalForm::from_coeffs(l.clone(), &prod)?, sep.clone())?;
            let rhs = SeparableForm::tensor_mixed(&theta_k, &SeparableForm::transfer(&c_form, sep.clone())?)?;
            if lhs != rhs {
                return Outcome::fail(cases, json!({"theta": theta, "c": c}));
            }
        }
    }
    // transfers of H_max(l)-forms are H_max(k)-forms
    let h_k: Vec<usize> = k.maximal().members().to_vec();
    for mult in multisets(l.order(), p.u64("max_hform_dim")?) {
        let f = field_form(&l, mult)?;
        if !f.is_h_form(&l.maximal())? {
            continue;
        }
        cases += 1;
        let t = SeparableForm::transfer(&f, sep.clone())?;
        if !t.h_analyze_sep(&h_k)?.is_h_form {
            return Outcome::fail(cases, json!({"hmax_form_over_l": f.mult()}));
        }
        // scaling commutes with transfer
        for h in 0..k.order() {
            let b = base.class_rep(h);
            let scaled: Vec<u32> = f.representative_coeffs()?.iter().map(|&c| ext.top().mul(ext.embed(b), c)).collect();
            let up = SeparableForm::transfer(&DiagonalForm::from_coeffs(l.clone(), &scaled)?, sep.clone())?;
            if up != t.scale_sep(h)? {
                return Outcome::fail(cases, json!({"form_over_l": f.mult(), "h": h}));
            }
        }
    }
    Outcome::pass(cases, Value::Null)
}
