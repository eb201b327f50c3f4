//! Finite fields `F_q`, `q = p^t`, realized by tabulated discrete logarithms.
//!
//! Every field of a given characteristic is built from a Conway-style
//! modulus: the least monic primitive polynomial (in Conway's ordering) whose
//! root `x` satisfies `x^((p^t - 1)/(p^s - 1)) = root of the degree-s modulus`
//! for every proper divisor `s` of `t`. With this choice the subfield
//! embeddings are simply `dlog ↦ dlog * (p^t - 1)/(p^s - 1)`, so class labels
//! agree along any tower of extensions.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, Weak};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const TABLE_BOUND: u64 = 1 << 20;

/// A field element, encoded as `c_0 + c_1 p + ... + c_{t-1} p^{t-1}` over the
/// polynomial basis `1, x, ..., x^{t-1}`.
pub type Elem = u32;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn checked_order(p: u64, t: u32) -> Result<u64> {
    let q = p.checked_pow(t).ok_or(Error::TooLarge { p, t })?;
    if q > TABLE_BOUND {
        return Err(Error::TooLarge { p, t });
    }
    Ok(q)
}

/// Dense polynomials over `F_p` reduced modulo a monic modulus.
struct PolyRing<'a> {
    p: u64,
    /// Low coefficients `c_0..c_{t-1}` of the monic modulus.
    low: &'a [u64],
}

impl PolyRing<'_> {
    fn t(&self) -> usize {
        self.low.len()
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.t()];
        v[0] = 1;
        v
    }

    fn x(&self) -> Vec<u64> {
        if self.t() == 1 {
            vec![(self.p - self.low[0]) % self.p]
        } else {
            let mut v = vec![0; self.t()];
            v[1] = 1;
            v
        }
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let t = self.t();
        let p = self.p;
        let mut r = vec![0u64; 2 * t - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + ai * bj) % p;
            }
        }
        for k in (t..2 * t - 1).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            r[k] = 0;
            for j in 0..t {
                r[k - t + j] = (r[k - t + j] + (p - c) * self.low[j]) % p;
            }
        }
        r.truncate(t);
        r
    }

    fn pow(&self, base: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one();
        let mut b = base.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Evaluates the monic polynomial with low coefficients `g` at `y`.
    fn eval_monic(&self, g: &[u64], y: &[u64]) -> Vec<u64> {
        let mut acc = self.one();
        for &c in g.iter().rev() {
            acc = self.mul(&acc, y);
            acc[0] = (acc[0] + c) % self.p;
        }
        acc
    }
}

/// Shared per-characteristic state: canonical moduli and live field tables.
#[derive(Debug)]
pub struct FieldFamily {
    p: u64,
    d: u32,
    moduli: Mutex<BTreeMap<u32, Vec<u64>>>,
    fields: Mutex<BTreeMap<u32, Weak<FieldCtx>>>,
}

impl FieldFamily {
    pub fn new(p: u64, d: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if p <= d as u64 {
            return Err(Error::CharTooSmall { p, d });
        }
        Ok(Arc::new(FieldFamily {
            p,
            d,
            moduli: Mutex::new(BTreeMap::new()),
            fields: Mutex::new(BTreeMap::new()),
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Low coefficients of the canonical degree-`t` modulus.
    pub fn modulus(&self, t: u32) -> Result<Vec<u64>> {
        checked_order(self.p, t)?;
        if let Some(m) = self.moduli.lock().unwrap().get(&t) {
            return Ok(m.clone());
        }
        let mut subs = Vec::new();
        for s in 1..t {
            if t % s == 0 {
                subs.push((s, self.modulus(s)?));
            }
        }
        let m = search_modulus(self.p, t, &subs);
        self.moduli.lock().unwrap().insert(t, m.clone());
        Ok(m)
    }

    /// The tabulated field of order `p^t`, shared while any handle is alive.
    pub fn field(self: &Arc<Self>, t: u32) -> Result<Arc<FieldCtx>> {
        if t == 0 {
            return Err(Error::TooLarge { p: self.p, t });
        }
        if let Some(f) = self.fields.lock().unwrap().get(&t).and_then(Weak::upgrade) {
            return Ok(f);
        }
        let modulus = self.modulus(t)?;
        let ctx = Arc::new(FieldCtx::tabulate(self.clone(), t, modulus));
        self.fields.lock().unwrap().insert(t, Arc::downgrade(&ctx));
        Ok(ctx)
    }
}

fn search_modulus(p: u64, t: u32, subs: &[(u32, Vec<u64>)]) -> Vec<u64> {
    let q = p.pow(t);
    let order = q - 1;
    let factors = prime_factors(order);
    let tu = t as usize;
    // Conway ordering: f = x^t - a_1 x^{t-1} + a_2 x^{t-2} - ... ,
    // candidates compared lexicographically on (a_1, ..., a_t).
    let free = if t == 1 { 1 } else { tu - 1 };
    let norm_root = subs.iter().find(|(s, _)| *s == 1).map(|(_, m)| (p - m[0]) % p);
    let total = p.pow(free as u32);
    for counter in 0..total {
        let mut alpha = vec![0u64; tu];
        let mut c = counter;
        for i in (0..free).rev() {
            alpha[i] = c % p;
            c /= p;
        }
        if let Some(g) = norm_root {
            alpha[tu - 1] = g;
        }
        let mut low = vec![0u64; tu];
        for (i, &a) in alpha.iter().enumerate() {
            let i = i + 1;
            let sign_neg = i % 2 == 1;
            low[tu - i] = if sign_neg { (p - a) % p } else { a };
        }
        if low[0] == 0 {
            continue;
        }
        let ring = PolyRing { p, low: &low };
        let x = ring.x();
        if ring.pow(&x, order) != ring.one() {
            continue;
        }
        if factors.iter().any(|r| ring.pow(&x, order / r) == ring.one()) {
            continue;
        }
        let compatible = subs.iter().all(|(s, sub)| {
            let y = ring.pow(&x, order / (p.pow(*s) - 1));
            ring.eval_monic(sub, &y).iter().all(|&c| c == 0)
        });
        if compatible {
            return low;
        }
    }
    unreachable!("a compatible primitive modulus of degree {t} over F_{p} always exists")
}

/// JSON descriptor of a field context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub t: u32,
    pub d: u32,
    /// Coefficients of the monic modulus, constant term first.
    pub modulus: Vec<u64>,
    pub gen: Elem,
}

/// A tabulated finite field together with its degree-`d` power-class data.
#[derive(Debug)]
pub struct FieldCtx {
    family: Arc<FieldFamily>,
    p: u64,
    t: u32,
    q: u64,
    s: u32,
    modulus: Vec<u64>,
    gen: Elem,
    exp: Vec<Elem>,
    log: Vec<u32>,
    class_min: Vec<Elem>,
}

/// Builds `F_{p^t}` for forms of degree `d`.
pub fn make_field(p: u64, t: u32, d: u32) -> Result<Arc<FieldCtx>> {
    if t == 0 {
        return Err(Error::TooLarge { p, t });
    }
    let fam = FieldFamily::new(p, d)?;
    checked_order(p, t)?;
    fam.field(t)
}

impl FieldCtx {
    fn tabulate(family: Arc<FieldFamily>, t: u32, modulus: Vec<u64>) -> Self {
        let p = family.p;
        let q = p.pow(t);
        let n = (q - 1) as usize;
        let tu = t as usize;
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![0u64; tu];
        cur[0] = 1;
        for i in 0..n {
            let enc = encode(&cur, p);
            exp.push(enc);
            log[enc as usize] = i as u32;
            // multiply by x
            let top = cur[tu - 1];
            for j in (1..tu).rev() {
                cur[j] = cur[j - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for j in 0..tu {
                    cur[j] = (cur[j] + (p - top) * modulus[j]) % p;
                }
            }
        }
        let s = (family.d as u64).gcd(&(q - 1)) as u32;
        let mut class_min = vec![Elem::MAX; s as usize];
        for x in 1..q as usize {
            let c = log[x] as usize % s as usize;
            if class_min[c] == Elem::MAX {
                class_min[c] = x as Elem;
            }
        }
        let gen = if n > 1 { exp[1] } else { exp[0] };
        FieldCtx {
            family,
            p,
            t,
            q,
            s,
            modulus,
            gen,
            exp,
            log,
            class_min,
        }
    }

    pub fn family(&self) -> &Arc<FieldFamily> {
        &self.family
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d(&self) -> u32 {
        self.family.d
    }

    /// Order of the power-class group `F_q^× / F_q^{×d}`, i.e. `gcd(d, q-1)`.
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Monic modulus, constant term first, leading 1 included.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn gen(&self) -> Elem {
        self.gen
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            t: self.t,
            d: self.d(),
            modulus: self.modulus(),
            gen: self.gen,
        }
    }

    pub fn contains(&self, x: Elem) -> bool {
        (x as u64) < self.q
    }

    fn check(&self, x: Elem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotAnElement(x as u64))
        }
    }

    /// Interprets an integer literal: reduced mod `p` for prime fields, a
    /// polynomial-basis encoding in `[0, q)` otherwise.
    pub fn from_int(&self, n: i64) -> Result<Elem> {
        if self.t == 1 {
            Ok(n.rem_euclid(self.p as i64) as Elem)
        } else if n >= 0 && (n as u64) < self.q {
            Ok(n as Elem)
        } else {
            Err(Error::NotAnElement(n.unsigned_abs()))
        }
    }

    pub fn digits(&self, x: Elem) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.t as usize);
        let mut x = x as u64;
        for _ in 0..self.t {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    pub fn from_digits(&self, digits: &[u64]) -> Result<Elem> {
        if digits.len() > self.t as usize || digits.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!("bad digit vector {digits:?}")));
        }
        Ok(encode(digits, self.p))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> + '_ {
        1..self.q as Elem
    }

    pub fn dlog(&self, x: Elem) -> Result<u64> {
        self.check(x)?;
        if x == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(self.log[x as usize] as u64)
    }

    /// `gen^e`.
    pub fn exp(&self, e: u64) -> Elem {
        self.exp[(e % (self.q - 1)) as usize]
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.t == 1 {
            return ((a as u64 + b as u64) % self.p) as Elem;
        }
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.t {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    pub fn neg(&self, a: Elem) -> Elem {
        let mut a = a as u64;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.t {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out as Elem
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp(self.log[a as usize] as u64 + self.log[b as usize] as u64)
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.q - 1;
        self.exp(((self.log[a as usize] as u64 % n) * (e % n)) % n)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        let l = self.dlog(a)?;
        Ok(self.exp(self.q - 1 - l))
    }

    /// Power class of a nonzero element: `dlog(x) mod s`.
    pub fn class_of(&self, x: Elem) -> Result<usize> {
        Ok((self.dlog(x)? % self.s as u64) as usize)
    }

    /// Smallest encoded element of class `c`.
    pub fn class_rep(&self, c: usize) -> Elem {
        self.class_min[c % self.s as usize]
    }

    /// Members of class `c`, ascending.
    pub fn class_members(&self, c: usize) -> Vec<Elem> {
        self.nonzero()
            .filter(|&x| self.log[x as usize] as usize % self.s as usize == c)
            .collect()
    }

    /// Nonzero `d`-th powers, ascending.
    pub fn nonzero_dth_powers(&self) -> Vec<Elem> {
        self.class_members(0)
    }

    /// The extension of degree `m` together with the canonical embedding.
    pub fn extend(self: &Arc<Self>, m: u32) -> Result<Extension> {
        let total = self.t.checked_mul(m).ok_or(Error::TooLarge { p: self.p, t: u32::MAX })?;
        checked_order(self.p, total)?;
        let top = self.family.field(total)?;
        Ok(Extension::new(self.clone(), top, m))
    }
}

fn encode(digits: &[u64], p: u64) -> Elem {
    digits.iter().rev().fold(0u64, |acc, &c| acc * p + c) as Elem
}

/// A finite extension `l / k` of tabulated fields of the same family.
#[derive(Debug, Clone)]
pub struct Extension {
    base: Arc<FieldCtx>,
    top: Arc<FieldCtx>,
    degree: u32,
    /// `(|l| - 1) / (|k| - 1)`: the embedding multiplies discrete logs by this.
    factor: u64,
}

impl Extension {
    fn new(base: Arc<FieldCtx>, top: Arc<FieldCtx>, degree: u32) -> Self {
        let factor = (top.q - 1) / (base.q - 1);
        Extension { base, top, degree, factor }
    }

    pub fn base(&self) -> &Arc<FieldCtx> {
        &self.base
    }

    pub fn top(&self) -> &Arc<FieldCtx> {
        &self.top
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, x: Elem) -> Elem {
        if x == 0 {
            0
        } else {
            self.top.exp(self.base.log[x as usize] as u64 * self.factor)
        }
    }

    /// Preimage of `y` under the embedding, if `y` lies in the subfield.
    pub fn restrict(&self, y: Elem) -> Option<Elem> {
        if y == 0 {
            return Some(0);
        }
        let l = self.top.log[y as usize] as u64;
        (l % self.factor == 0).then(|| self.base.exp(l / self.factor))
    }

    /// The base Frobenius `y ↦ y^q` applied `i` times.
    pub fn frobenius(&self, y: Elem, i: u32) -> Elem {
        let mut e = 1u64;
        for _ in 0..i {
            e = (e * self.base.q) % (self.top.q - 1);
        }
        self.top.pow(y, e)
    }

    /// `(N_{l/k}(y), Tr_{l/k}(y))`, as elements of the base.
    pub fn norm_trace(&self, y: Elem) -> (Elem, Elem) {
        let mut norm = 1;
        let mut trace = 0;
        for i in 0..self.degree {
            let c = self.frobenius(y, i);
            norm = self.top.mul(norm, c);
            trace = self.top.add(trace, c);
        }
        let back = |z| self.restrict(z).expect("norm and trace lie in the base field");
        (back(norm), back(trace))
    }

    pub fn norm(&self, y: Elem) -> Elem {
        self.norm_trace(y).0
    }

    pub fn trace(&self, y: Elem) -> Elem {
        self.norm_trace(y).1
    }

    /// Image of base class `c` in the power-class group of the top field.
    pub fn class_embedding(&self, c: usize) -> usize {
        ((c as u64 * self.factor) % self.top.s as u64) as usize
    }

    pub fn class_embedding_table(&self) -> Vec<usize> {
        (0..self.base.s as usize).map(|c| self.class_embedding(c)).collect()
    }

    /// Whether every class in `h` becomes a `d`-th power in the top field.
    pub fn all_h_trivial_in(&self, h: &[usize]) -> bool {
        h.iter().all(|&c| self.class_embedding(c) == 0)
    }
}
