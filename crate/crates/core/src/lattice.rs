//! Integer lattices in `Z^n`: Hermite bases, membership, and quotient
//! invariants via Smith normal form. All arithmetic is checked `i128`.

use serde::Serialize;

use crate::error::{Error, Result};

fn ck(v: Option<i128>) -> Result<i128> {
    v.ok_or(Error::Overflow)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

fn axpy(a: i128, x: &[i128], b: i128, y: &[i128]) -> Result<Vec<i128>> {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| ck(ck(a.checked_mul(xi))?.checked_add(ck(b.checked_mul(yi))?)))
        .collect()
}

/// A lattice given by a Hermite basis: rows in echelon form, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lattice {
    dim: usize,
    /// `rows[i]` has its pivot at `pivots[i]`; pivots strictly increase.
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| {
                let mut r = vec![0; dim];
                r[i] = 1;
                r
            })
            .collect();
        Lattice { dim, rows, pivots: (0..dim).collect() }
    }

    pub fn from_generators<I, R>(dim: usize, gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[i128]>,
    {
        let mut l = Lattice::zero(dim);
        for g in gens {
            l.insert(g.as_ref())?;
        }
        Ok(l)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<i128>] {
        &self.rows
    }

    /// Adds a generator and restores Hermite form.
    pub fn insert(&mut self, v: &[i128]) -> Result<()> {
        assert_eq!(v.len(), self.dim, "generator length");
        let mut v = v.to_vec();
        let mut col = 0;
        loop {
            while col < self.dim && v[col] == 0 {
                col += 1;
            }
            if col == self.dim {
                return Ok(());
            }
            match self.pivots.binary_search(&col) {
                Err(pos) => {
                    if v[col] < 0 {
                        for x in v.iter_mut() {
                            *x = ck(x.checked_neg())?;
                        }
                    }
                    self.rows.insert(pos, v);
                    self.pivots.insert(pos, col);
                    self.reduce_from(pos)?;
                    return Ok(());
                }
                Ok(pos) => {
                    let a = self.rows[pos][col];
                    let b = v[col];
                    let (g, x, y) = ext_gcd(a, b);
                    let new_pivot = axpy(x, &self.rows[pos], y, &v)?;
                    let rest = axpy(a / g, &v, -(b / g), &self.rows[pos])?;
                    self.rows[pos] = new_pivot;
                    self.reduce_from(pos)?;
                    v = rest;
                    col += 1;
                }
            }
        }
    }

    /// Reduces row `pos` by later pivots and earlier rows by row `pos`.
    fn reduce_from(&mut self, pos: usize) -> Result<()> {
        for later in pos + 1..self.rows.len() {
            let c = self.pivots[later];
            let piv = self.rows[later][c];
            let q = self.rows[pos][c].div_euclid(piv);
            if q != 0 {
                let lr = self.rows[later].clone();
                self.rows[pos] = axpy(1, &self.rows[pos], -q, &lr)?;
            }
        }
        let c = self.pivots[pos];
        let piv = self.rows[pos][c];
        let pr = self.rows[pos].clone();
        for earlier in 0..pos {
            let q = self.rows[earlier][c].div_euclid(piv);
            if q != 0 {
                self.rows[earlier] = axpy(1, &self.rows[earlier], -q, &pr)?;
            }
        }
        Ok(())
    }

    /// Coordinates of `v` in the Hermite basis, or `None` if `v` is not in the lattice.
    pub fn coordinates(&self, v: &[i128]) -> Result<Option<Vec<i128>>> {
        let mut r = v.to_vec();
        let mut coords = vec![0i128; self.rows.len()];
        let mut next = 0;
        for col in 0..self.dim {
            if r[col] == 0 {
                continue;
            }
            while next < self.pivots.len() && self.pivots[next] < col {
                next += 1;
            }
            if next == self.pivots.len() || self.pivots[next] != col {
                return Ok(None);
            }
            let piv = self.rows[next][col];
            if r[col] % piv != 0 {
                return Ok(None);
            }
            let q = r[col] / piv;
            coords[next] = q;
            r = axpy(1, &r, -q, &self.rows[next])?;
        }
        Ok(Some(coords))
    }

    pub fn contains(&self, v: &[i128]) -> Result<bool> {
        Ok(self.coordinates(v)?.is_some())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        for r in &other.rows {
            if !self.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Generator matrix as integer CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Structure of `self / sub`, which must be a sublattice.
    pub fn quotient(&self, sub: &Lattice) -> Result<QuotientGroup> {
        let mut matrix = Vec::with_capacity(sub.rank());
        for r in &sub.rows {
            let c = self
                .coordinates(r)?
                .ok_or_else(|| Error::Postcondition("quotient by a non-sublattice".into()))?;
            matrix.push(c);
        }
        let diag = smith_diagonal(matrix, self.rank())?;
        let free_rank = self.rank() - diag.len();
        let torsion = diag.into_iter().filter(|&x| x != 1).collect();
        Ok(QuotientGroup { free_rank, torsion })
    }
}

/// A finitely generated abelian group `Z^r × Z/d_1 × ... × Z/d_k`, `d_i | d_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientGroup {
    pub free_rank: usize,
    pub torsion: Vec<i128>,
}

impl QuotientGroup {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<i128> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn exponent(&self) -> Option<i128> {
        self.is_finite().then(|| self.torsion.last().copied().unwrap_or(1))
    }
}

/// Nonzero Smith invariants of an integer matrix with `ncols` columns.
pub fn smith_diagonal(mut m: Vec<Vec<i128>>, ncols: usize) -> Result<Vec<i128>> {
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        let mut done = false;
        while !done {
            done = true;
            let piv = m[t][t];
            for i in t + 1..nrows {
                let q = m[i][t].div_euclid(piv);
                if q != 0 {
                    let pr = m[t].clone();
                    m[i] = axpy(1, &m[i], -q, &pr)?;
                }
                if m[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..ncols {
                let q = m[t][j].div_euclid(piv);
                if q != 0 {
                    for row in m.iter_mut() {
                        row[j] = ck(row[j].checked_sub(ck(q.checked_mul(row[t]))?))?;
                    }
                }
                if m[t][j] != 0 {
                    done = false;
                }
            }
            if !done {
                // move the smallest remainder into the pivot position
                let mut best = (t, t);
                for i in t..nrows {
                    if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..ncols {
                    if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                m.swap(t, best.0);
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
                continue;
            }
            // divisibility: fold a non-divisible trailing entry into the pivot row
            let piv = m[t][t];
            let bad = (t + 1..nrows).find_map(|i| {
                (t + 1..ncols).find(|&j| m[i][j] % piv != 0).map(|_| i)
            });
            if let Some(i) = bad {
                let ri = m[i].clone();
                m[t] = axpy(1, &m[t], 1, &ri)?;
                done = false;
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    Ok(diag)
}
