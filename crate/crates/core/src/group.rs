//! Finite abelian groups `Z/n_1 × ... × Z/n_k` and their subgroups.
//!
//! Elements are indexed `0..order` in mixed radix with the last factor least
//! significant, so index order is lexicographic order on tuples.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbGroup {
    factors: Vec<u32>,
}

impl AbGroup {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.iter().any(|&n| n == 0) {
            return Err(Error::InvalidGroup("cyclic factors must be >= 1".into()));
        }
        let order: u64 = factors.iter().map(|&n| n as u64).product();
        if order > 1 << 16 {
            return Err(Error::InvalidGroup(format!("order {order} too large")));
        }
        Ok(AbGroup { factors })
    }

    pub fn cyclic(n: u32) -> Self {
        AbGroup::new(vec![n]).expect("cyclic group of positive order")
    }

    /// Parses `"3"`, `"2x2"`, `"Z/2xZ/4"`.
    pub fn parse(desc: &str) -> Result<Self> {
        let factors = desc
            .split(['x', '×', '*'])
            .map(|f| {
                let f = f.trim().trim_start_matches("Z/");
                f.parse::<u32>().map_err(|_| Error::Parse(format!("bad group factor `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        AbGroup::new(factors)
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).product()
    }

    pub fn is_cyclic_presentation(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn to_tuple(&self, mut g: usize) -> Vec<u32> {
        let mut t = vec![0; self.factors.len()];
        for (slot, &n) in t.iter_mut().zip(&self.factors).rev() {
            *slot = (g % n as usize) as u32;
            g /= n as usize;
        }
        t
    }

    pub fn from_tuple(&self, t: &[u32]) -> Result<usize> {
        if t.len() != self.factors.len() {
            return Err(Error::ClassOutOfRange(usize::MAX));
        }
        Ok(t.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&a, &n)| acc * n as usize + (a % n) as usize))
    }

    pub fn check(&self, g: usize) -> Result<usize> {
        if g < self.order() {
            Ok(g)
        } else {
            Err(Error::ClassOutOfRange(g))
        }
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        let (mut a, mut b) = (a, b);
        for &n in self.factors.iter().rev() {
            let n = n as usize;
            out += ((a % n + b % n) % n) * place;
            a /= n;
            b /= n;
            place *= n;
        }
        out
    }

    pub fn neg(&self, a: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        let mut a = a;
        for &n in self.factors.iter().rev() {
            let n = n as usize;
            out += ((n - a % n) % n) * place;
            a /= n;
            place *= n;
        }
        out
    }

    /// `k·a` for any integer `k`.
    pub fn times(&self, k: i128, a: usize) -> usize {
        let mut out = 0usize;
        let mut place = 1usize;
        let mut a = a;
        for &n in self.factors.iter().rev() {
            let n = n as usize;
            let r = ((a % n) as i128 * k).rem_euclid(n as i128) as usize;
            out += r * place;
            a /= n;
            place *= n;
        }
        out
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order()
    }

    pub fn format_element(&self, g: usize) -> String {
        if self.factors.len() <= 1 {
            g.to_string()
        } else {
            let t = self.to_tuple(g);
            let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A subgroup, stored as its sorted member list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    group: Arc<AbGroup>,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn generated_by(group: Arc<AbGroup>, gens: &[usize]) -> Result<Self> {
        for &g in gens {
            group.check(g)?;
        }
        let mut set = BTreeSet::from([0usize]);
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = group.add(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup { group, members: set.into_iter().collect() })
    }

    pub fn whole(group: Arc<AbGroup>) -> Self {
        let members = group.elements().collect();
        Subgroup { group, members }
    }

    pub fn trivial(group: Arc<AbGroup>) -> Self {
        Subgroup { group, members: vec![0] }
    }

    /// Validates an explicit member set; it must be closed under addition and contain 0.
    pub fn from_members(group: Arc<AbGroup>, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if !set.contains(&0) {
            return Err(Error::InvalidSubgroup("missing identity".into()));
        }
        for &a in &set {
            group.check(a)?;
            for &b in &set {
                if !set.contains(&group.add(a, b)) {
                    return Err(Error::InvalidSubgroup(format!("not closed: {a} + {b}")));
                }
            }
        }
        Ok(Subgroup { group, members: set.into_iter().collect() })
    }

    /// The unique subgroup of order `t` in a cyclic group.
    pub fn of_order(group: Arc<AbGroup>, t: usize) -> Result<Self> {
        if !group.is_cyclic_presentation() {
            return Err(Error::InvalidSubgroup("order:t needs a cyclic group".into()));
        }
        let n = group.order();
        if t == 0 || n % t != 0 {
            return Err(Error::InvalidSubgroup(format!("no subgroup of order {t} in Z/{n}")));
        }
        let step = if n == 1 { 0 } else { n / t };
        Subgroup::generated_by(group, &[step])
    }

    /// Parses `max`, `trivial`, `order:t`, `gens:a,b,...`.
    pub fn parse(group: Arc<AbGroup>, desc: &str) -> Result<Self> {
        let desc = desc.trim();
        if desc == "max" || desc == "all" {
            return Ok(Subgroup::whole(group));
        }
        if desc == "trivial" || desc == "1" {
            return Ok(Subgroup::trivial(group));
        }
        if let Some(t) = desc.strip_prefix("order:") {
            let t = t.trim().parse().map_err(|_| Error::Parse(format!("bad order `{t}`")))?;
            return Subgroup::of_order(group, t);
        }
        if let Some(g) = desc.strip_prefix("gens:") {
            let gens = g
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad generator `{s}`"))))
                .collect::<Result<Vec<usize>>>()?;
            return Subgroup::generated_by(group, &gens);
        }
        Err(Error::Parse(format!("unknown subgroup desc `{desc}`")))
    }

    pub fn group(&self) -> &Arc<AbGroup> {
        &self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.group.order()
    }

    pub fn index(&self) -> usize {
        self.group.order() / self.order()
    }

    /// Cosets `g + H`, each sorted, listed in order of their least element.
    pub fn cosets(&self) -> Vec<Vec<usize>> {
        let n = self.group.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut c: Vec<usize> = self.members.iter().map(|&h| self.group.add(g, h)).collect();
            c.sort_unstable();
            for &x in &c {
                seen[x] = true;
            }
            out.push(c);
        }
        out
    }

    /// Least element of `g + H`.
    pub fn coset_rep(&self, g: usize) -> usize {
        self.members.iter().map(|&h| self.group.add(g, h)).min().unwrap_or(g)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let members = self.members.iter().copied().filter(|&g| other.contains(g)).collect();
        Subgroup { group: self.group.clone(), members }
    }

    /// All subgroups of a small group, by closure of every generator subset.
    pub fn enumerate_all(group: Arc<AbGroup>) -> Vec<Subgroup> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier = vec![Subgroup::trivial(group.clone())];
        found.insert(vec![0]);
        while let Some(h) = frontier.pop() {
            for g in group.elements() {
                if h.contains(g) {
                    continue;
                }
                let mut gens = h.members.clone();
                gens.push(g);
                let next = Subgroup::generated_by(group.clone(), &gens).expect("valid generators");
                if found.insert(next.members.clone()) {
                    frontier.push(next);
                }
            }
        }
        found
            .into_iter()
            .map(|members| Subgroup { group: group.clone(), members })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_round_trip_and_arithmetic() {
        let g = AbGroup::new(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        for a in g.elements() {
            assert_eq!(g.from_tuple(&g.to_tuple(a)).unwrap(), a);
            assert_eq!(g.add(a, g.neg(a)), 0);
            assert_eq!(g.times(3, a), g.add(a, g.add(a, a)));
            assert_eq!(g.times(-1, a), g.neg(a));
        }
        assert_eq!(g.to_tuple(4), vec![1, 1]);
        assert_eq!(g.add(4, 5), g.from_tuple(&[0, 0]).unwrap());
    }

    #[test]
    fn parse_groups() {
        assert_eq!(AbGroup::parse("3").unwrap().factors(), &[3]);
        assert_eq!(AbGroup::parse("2x2").unwrap().factors(), &[2, 2]);
        assert_eq!(AbGroup::parse("Z/2xZ/4").unwrap().factors(), &[2, 4]);
        assert!(AbGroup::parse("0").is_err());
        assert!(AbGroup::parse("a").is_err());
    }

    #[test]
    fn subgroups_of_z4_and_klein() {
        let z4 = Arc::new(AbGroup::cyclic(4));
        let h = Subgroup::of_order(z4.clone(), 2).unwrap();
        assert_eq!(h.members(), &[0, 2]);
        assert_eq!(h.cosets(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(h.coset_rep(3), 1);
        assert!(Subgroup::of_order(z4.clone(), 3).is_err());
        assert_eq!(Subgroup::enumerate_all(z4).len(), 3);
        let v4 = Arc::new(AbGroup::new(vec![2, 2]).unwrap());
        assert_eq!(Subgroup::enumerate_all(v4.clone()).len(), 5);
        assert!(Subgroup::of_order(v4.clone(), 2).is_err());
        assert_eq!(Subgroup::parse(v4.clone(), "gens:1").unwrap().members(), &[0, 1]);
        assert!(Subgroup::from_members(v4.clone(), [0, 1, 2]).is_err());
        assert!(Subgroup::from_members(v4, [1]).is_err());
    }
}
