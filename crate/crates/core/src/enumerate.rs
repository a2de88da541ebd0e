//! Counting strings over `{0..m-1}` by the number of adjacent pairs that
//! fall in a set `B`.
//!
//! With `m_k` the number of B-strings of length `k` (every adjacent pair in
//! `B`) and `G(v) = sum m_k v^k`, the number of length-`n` strings with
//! exactly `k` pairs from `B` is `[z^k v^n] (z-1)/(z - G((z-1)v))`, which
//! rearranges to `1 / (1 - sum_{j>=1} m_j (z-1)^{j-1} v^j)`. Counts are
//! exact integers, so an integrality failure is a real bug signal.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{BSeries, Rational, USeries, ZPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    m: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl PairSet {
    pub fn new(m: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if m == 0 {
            return Err(Error::usage("alphabet must have at least one symbol"));
        }
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= m || y >= m) {
            return Err(Error::usage(format!(
                "pair ({x}, {y}) is outside the alphabet 0..{m}"
            )));
        }
        Ok(PairSet { m, pairs })
    }

    pub fn empty(m: usize) -> Result<Self> {
        PairSet::new(m, [])
    }

    pub fn all(m: usize) -> Result<Self> {
        PairSet::new(m, (0..m).flat_map(|x| (0..m).map(move |y| (x, y))))
    }

    /// `{(x, y) : x > y}`.
    pub fn descents(m: usize) -> Result<Self> {
        PairSet::new(m, (0..m).flat_map(|x| (0..x).map(move |y| (x, y))))
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.contains(&(x, y))
    }
}

/// `f(n, k)` for `1 <= n <= N`, `0 <= k < n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    m: usize,
    rows: Vec<Vec<BigUint>>,
}

impl CountTable {
    pub fn max_len(&self) -> usize {
        self.rows.len()
    }

    /// Counts for strings of length `n >= 1`, indexed by `k`.
    pub fn row(&self, n: usize) -> &[BigUint] {
        &self.rows[n - 1]
    }

    pub fn get(&self, n: usize, k: usize) -> BigUint {
        self.rows[n - 1]
            .get(k)
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }
}

/// `m_0 ..= m_N`: number of length-`k` strings whose adjacent pairs all lie
/// in `ps`, by iterating the 0/1 transfer matrix on the vector of counts by
/// last symbol.
pub fn bstring_counts(ps: &PairSet, max_len: usize) -> Vec<BigUint> {
    let m = ps.alphabet();
    let mut out = vec![BigUint::one()];
    if max_len == 0 {
        return out;
    }
    let mut ending: Vec<BigUint> = vec![BigUint::one(); m];
    out.push(ending.iter().sum());
    for _ in 2..=max_len {
        let mut next = vec![BigUint::zero(); m];
        for (x, y) in ps.pairs() {
            next[y] += &ending[x];
        }
        ending = next;
        out.push(ending.iter().sum());
    }
    out
}

/// `G(v) = sum m_k v^k`.
pub fn bstring_gf(counts: &[BigUint]) -> USeries {
    USeries::new(
        counts
            .iter()
            .map(|c| Rational::from_integer(BigInt::from(c.clone())))
            .collect(),
    )
}

/// `f(n, k)` for every length `1 <= n <= max_len`.
pub fn pattern_count_table(ps: &PairSet, max_len: usize) -> Result<CountTable> {
    if max_len == 0 {
        return Err(Error::usage("pattern count table needs max_len >= 1"));
    }
    let g = bstring_gf(&bstring_counts(ps, max_len));
    let z_minus_one = ZPoly::from_ints(&[-1, 1]);
    let mut rows = vec![ZPoly::zero(); max_len + 1];
    rows[0] = ZPoly::one();
    let mut power = ZPoly::one();
    for (j, row) in rows.iter_mut().enumerate().skip(1) {
        *row = -&power.scale(g.coeff(j));
        power = &power * &z_minus_one;
    }
    let bgf = BSeries::from_rows(rows).inv_capped(max_len)?;

    let mut table = Vec::with_capacity(max_len);
    for n in 1..=max_len {
        let row = bgf.row(n);
        if row.degree().is_some_and(|d| d >= n) {
            return Err(Error::InternalInconsistency(format!(
                "length-{n} row has degree {:?}",
                row.degree()
            )));
        }
        let counts = (0..n)
            .map(|k| to_count(&row.coeff(k), n, k))
            .collect::<Result<Vec<_>>>()?;
        table.push(counts);
    }
    Ok(CountTable {
        m: ps.alphabet(),
        rows: table,
    })
}

fn to_count(r: &Rational, n: usize, k: usize) -> Result<BigUint> {
    if !r.is_integer() {
        return Err(Error::InternalInconsistency(format!(
            "f({n}, {k}) = {r} is not an integer"
        )));
    }
    match r.numer().sign() {
        Sign::Minus => Err(Error::InternalInconsistency(format!(
            "f({n}, {k}) = {r} is negative"
        ))),
        _ => Ok(r.numer().magnitude().clone()),
    }
}

/// `[x^m y^n] 1 / (1 - (a + x) y + y^2)`: strings of length `n + m` over
/// `{0..a-1}` with exactly `m` occurrences of the pair `01`.
pub fn florez_count(a: usize, n: usize, m: usize) -> Result<BigUint> {
    if a < 2 {
        return Err(Error::usage(
            "florez_count needs an alphabet of at least 2 symbols",
        ));
    }
    // Coefficient rows c_j(x) = [y^j] F obey c_j = (a + x) c_{j-1} - c_{j-2}.
    let step = ZPoly::new(vec![
        Rational::from_integer(BigInt::from(a)),
        Rational::one(),
    ]);
    let mut prev = ZPoly::zero();
    let mut cur = ZPoly::one();
    for _ in 0..n {
        let next = &(&step * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    to_count(&cur.coeff(m), n + m, m)
}
