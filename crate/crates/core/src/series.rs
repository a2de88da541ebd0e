//! Truncated formal power series with exact rational coefficients.
//!
//! [`USeries`] is a univariate series in `v` truncated at a fixed order.
//! [`ZPoly`] is a polynomial in `z`, and [`BSeries`] is a bivariate series
//! stored densely as one z-polynomial per power of `v`.
//!
//! Every binary operation requires both operands to share the same
//! truncation order. Nothing here ever extends an order on its own; the only
//! order-changing operations are [`shift`] and [`unshift`] (and their
//! bivariate counterparts), which move by exactly one.
//!
//! Bivariate products and reciprocals truncate z-degrees above a cap. The
//! truncation `Q[z][[v]] -> (Q[z]/z^(D+1))[[v]]` is a ring homomorphism, so a
//! coefficient `[z^k v^n]` with `k <= D` is exact no matter how large the
//! intermediate degrees would have been.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `r^e` for a non-negative integer exponent.
pub fn rpow(r: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

// ---------------------------------------------------------------------------
// USeries

/// Univariate series `sum_{j <= order} c_j v^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct USeries {
    coeffs: Vec<Rational>,
}

impl USeries {
    /// Builds a series whose order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient list; a series always carries at least
    /// its constant term.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least one coefficient"
        );
        USeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        USeries::new((0..=order).map(f).collect())
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        USeries::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        USeries::from_fn(order, |_| Rational::zero())
    }

    pub fn one(order: usize) -> Self {
        USeries::from_fn(order, |j| {
            if j == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// Truncated geometric series `1 / (1 - c v)`.
    pub fn geometric(ratio: &Rational, order: usize) -> Self {
        USeries::from_fn(order, |j| rpow(ratio, j))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> &Rational {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Drops coefficients above `order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::usage(format!(
                "cannot truncate a series of order {} to the larger order {order}",
                self.order()
            )));
        }
        Ok(USeries::new(self.coeffs[..=order].to_vec()))
    }

    /// `f(c v)`.
    pub fn scale_arg(&self, c: &Rational) -> Self {
        let mut power = Rational::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let out = a * &power;
                power *= c;
                out
            })
            .collect();
        USeries::new(coeffs)
    }

    /// `f(-v)`.
    pub fn negate_arg(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| if j % 2 == 1 { -a } else { a.clone() })
            .collect();
        USeries::new(coeffs)
    }

    /// `v f(v)` at the same order; the top coefficient falls off.
    pub fn mul_v(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        USeries::new(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        USeries::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Reciprocal by the coefficient recurrence
    /// `b_0 = 1/a_0`, `b_n = -b_0 sum_{j=1..n} a_j b_{n-j}`.
    pub fn inv(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let b0 = a0.recip();
        let mut out: Vec<Rational> = Vec::with_capacity(self.coeffs.len());
        out.push(b0.clone());
        for n in 1..=self.order() {
            let mut acc = Rational::zero();
            for j in 1..=n {
                acc += &self.coeffs[j] * &out[n - j];
            }
            out.push(-(acc * &b0));
        }
        Ok(USeries::new(out))
    }

    fn check_order(&self, other: &USeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }
}

impl fmt::Display for USeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})v")?,
                _ => write!(f, "({c})v^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(v^{})", self.order() + 1)
    }
}

/// Truncated Cauchy product. Fails when the orders differ.
pub fn series_mul(a: &USeries, b: &USeries) -> Result<USeries> {
    a.check_order(b)?;
    let n = a.order();
    let coeffs = (0..=n)
        .map(|k| {
            let mut acc = Rational::zero();
            for j in 0..=k {
                acc += &a.coeffs[j] * &b.coeffs[k - j];
            }
            acc
        })
        .collect();
    Ok(USeries::new(coeffs))
}

pub fn series_inv(a: &USeries) -> Result<USeries> {
    a.inv()
}

impl Mul for &USeries {
    type Output = USeries;

    /// Panics on mismatched orders; use [`series_mul`] for the checked form.
    fn mul(self, rhs: &USeries) -> USeries {
        series_mul(self, rhs).expect("series orders must match")
    }
}

impl Add for &USeries {
    type Output = USeries;

    fn add(self, rhs: &USeries) -> USeries {
        self.check_order(rhs).expect("series orders must match");
        USeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &USeries {
    type Output = USeries;

    fn sub(self, rhs: &USeries) -> USeries {
        self.check_order(rhs).expect("series orders must match");
        USeries::new(
            self.coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &USeries {
    type Output = USeries;

    fn neg(self) -> USeries {
        USeries::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

/// `1 + v q(v)`; the order grows by one.
pub fn shift(q: &USeries) -> USeries {
    let mut coeffs = Vec::with_capacity(q.coeffs.len() + 1);
    coeffs.push(Rational::one());
    coeffs.extend(q.coeffs.iter().cloned());
    USeries::new(coeffs)
}

/// Inverse of [`shift`]; the order shrinks by one.
pub fn unshift(q: &USeries) -> Result<USeries> {
    if !q.coeffs[0].is_one() {
        return Err(Error::ShiftDomain(q.coeffs[0].clone()));
    }
    if q.order() == 0 {
        return Err(Error::usage("cannot un-shift a series of order 0"));
    }
    Ok(USeries::new(q.coeffs[1..].to_vec()))
}

// ---------------------------------------------------------------------------
// ZPoly

/// Polynomial in `z` with trailing zeros stripped, so equality is
/// structural.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZPoly {
    coeffs: Vec<Rational>,
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        ZPoly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        ZPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        ZPoly::new(vec![c])
    }

    /// `c z^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        ZPoly::new(coeffs)
    }

    pub fn z() -> Self {
        ZPoly::monomial(Rational::one(), 1)
    }

    /// `1 - z`.
    pub fn one_minus_z() -> Self {
        ZPoly::from_ints(&[1, -1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `[z^k]`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficients `[z^0] ..= [z^len-1]`, zero-padded.
    pub fn padded(&self, len: usize) -> Vec<Rational> {
        (0..len).map(|k| self.coeff(k)).collect()
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * z + c)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ZPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = ZPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term of degree above `cap`.
    pub fn truncate_degree(&self, cap: usize) -> Self {
        ZPoly::new(self.coeffs.iter().take(cap + 1).cloned().collect())
    }

    pub fn mul_capped(&self, other: &ZPoly, cap: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(cap + 1);
        let mut out = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    /// Reciprocal as a power series in `z`, truncated above degree `cap`.
    pub fn inv_series(&self, cap: usize) -> Result<Self> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(Error::NonInvertibleSeries);
        }
        let b0 = a0.recip();
        let mut out = vec![b0.clone()];
        for n in 1..=cap {
            let mut acc = Rational::zero();
            for j in 1..=n.min(self.coeffs.len().saturating_sub(1)) {
                acc += &self.coeffs[j] * &out[n - j];
            }
            out.push(-(acc * &b0));
        }
        Ok(ZPoly::new(out))
    }

    /// `k -> len-1-k` on the first `len` coefficients. Fails if the degree
    /// is `len` or more.
    pub fn reversed(&self, len: usize) -> Result<Self> {
        if self.coeffs.len() > len {
            return Err(Error::usage(format!(
                "polynomial of degree {} does not fit in {len} coefficients",
                self.coeffs.len() - 1
            )));
        }
        let mut coeffs = self.padded(len);
        coeffs.reverse();
        Ok(ZPoly::new(coeffs))
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder or the divisor is zero.
    pub fn div_exact(&self, divisor: &ZPoly) -> Option<ZPoly> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * d;
                }
            }
            quot[i] = c;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(ZPoly::new(quot))
        } else {
            None
        }
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl From<Rational> for ZPoly {
    fn from(c: Rational) -> Self {
        ZPoly::constant(c)
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;

    fn add(self, rhs: &ZPoly) -> ZPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;

    fn sub(self, rhs: &ZPoly) -> ZPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;

    fn mul(self, rhs: &ZPoly) -> ZPoly {
        const UNCAPPED: usize = usize::MAX - 1;
        self.mul_capped(rhs, UNCAPPED)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;

    fn neg(self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident :: $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                $tr::$m(&self, &rhs)
            }
        }
    )*};
}

forward_owned!(ZPoly, Add::add, Sub::sub, Mul::mul);
forward_owned!(USeries, Add::add, Sub::sub, Mul::mul);

// ---------------------------------------------------------------------------
// BSeries

/// Bivariate series `sum_{n <= order} rows[n](z) v^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BSeries {
    rows: Vec<ZPoly>,
}

impl BSeries {
    pub fn from_rows(rows: Vec<ZPoly>) -> Self {
        assert!(
            !rows.is_empty(),
            "a bivariate series needs at least one row"
        );
        BSeries { rows }
    }

    pub fn zero(order: usize) -> Self {
        BSeries::from_rows(vec![ZPoly::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut out = BSeries::zero(order);
        out.rows[0] = ZPoly::one();
        out
    }

    /// Embeds a univariate series as z-constant rows.
    pub fn from_useries(q: &USeries) -> Self {
        BSeries::from_rows(q.coeffs().iter().cloned().map(ZPoly::constant).collect())
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn rows(&self) -> &[ZPoly] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> &ZPoly {
        &self.rows[n]
    }

    pub fn into_rows(self) -> Vec<ZPoly> {
        self.rows
    }

    /// `[z^k v^n]`, zero when `k` exceeds the row degree.
    pub fn coeff(&self, k: usize, n: usize) -> Rational {
        self.rows[n].coeff(k)
    }

    /// Highest z-degree over all rows.
    pub fn max_degree(&self) -> Option<usize> {
        self.rows.iter().filter_map(ZPoly::degree).max()
    }

    /// `v A(z, v)` at the same order.
    pub fn mul_v(&self) -> Self {
        let mut rows = Vec::with_capacity(self.rows.len());
        rows.push(ZPoly::zero());
        rows.extend(self.rows[..self.order()].iter().cloned());
        BSeries::from_rows(rows)
    }

    /// Multiplies every row by a fixed z-polynomial.
    pub fn mul_zpoly(&self, p: &ZPoly) -> Self {
        BSeries::from_rows(self.rows.iter().map(|r| r * p).collect())
    }

    /// Specializes `z` to a value, leaving a series in `v`.
    pub fn eval_z(&self, z: &Rational) -> USeries {
        USeries::new(self.rows.iter().map(|r| r.eval(z)).collect())
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::usage(format!(
                "cannot truncate a bivariate series of order {} to the larger order {order}",
                self.order()
            )));
        }
        Ok(BSeries::from_rows(self.rows[..=order].to_vec()))
    }

    pub fn mul_capped(&self, other: &BSeries, cap: usize) -> Result<Self> {
        self.check_order(other)?;
        let order = self.order();
        let rows = (0..=order)
            .map(|n| {
                (0..=n).fold(ZPoly::zero(), |acc, j| {
                    &acc + &self.rows[j].mul_capped(&other.rows[n - j], cap)
                })
            })
            .collect();
        Ok(BSeries::from_rows(rows))
    }

    /// Reciprocal in `v`, with each row reduced modulo `z^(cap+1)`.
    pub fn inv_capped(&self, cap: usize) -> Result<Self> {
        let inv0 = self.rows[0].inv_series(cap)?;
        let mut out: Vec<ZPoly> = Vec::with_capacity(self.rows.len());
        out.push(inv0.clone());
        for n in 1..=self.order() {
            let acc = (1..=n).fold(ZPoly::zero(), |acc, j| {
                &acc + &self.rows[j].mul_capped(&out[n - j], cap)
            });
            out.push(-&acc.mul_capped(&inv0, cap));
        }
        Ok(BSeries::from_rows(out))
    }

    fn check_order(&self, other: &BSeries) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }
}

impl Add for &BSeries {
    type Output = BSeries;

    fn add(self, rhs: &BSeries) -> BSeries {
        self.check_order(rhs).expect("series orders must match");
        BSeries::from_rows(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &BSeries {
    type Output = BSeries;

    fn sub(self, rhs: &BSeries) -> BSeries {
        self.check_order(rhs).expect("series orders must match");
        BSeries::from_rows(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &BSeries {
    type Output = BSeries;

    fn neg(self) -> BSeries {
        BSeries::from_rows(self.rows.iter().map(|r| -r).collect())
    }
}

/// Product with the z-degree capped at the common v-order.
pub fn biv_mul(a: &BSeries, b: &BSeries) -> Result<BSeries> {
    a.mul_capped(b, a.order())
}

/// Reciprocal with the z-degree capped at the v-order.
pub fn biv_inv(a: &BSeries) -> Result<BSeries> {
    a.inv_capped(a.order())
}

/// `q(s(z) v)`: row `j` is `q_j s(z)^j`.
pub fn scale_substitute(q: &USeries, s: &ZPoly) -> BSeries {
    let mut power = ZPoly::one();
    let mut rows = Vec::with_capacity(q.coeffs().len());
    for c in q.coeffs() {
        rows.push(power.scale(c));
        power = &power * s;
    }
    BSeries::from_rows(rows)
}

/// `q(arg(z, v))` by Horner's rule. `arg` must have no `v^0` term.
pub fn compose_positive_order(q: &USeries, arg: &BSeries) -> Result<BSeries> {
    if !arg.rows[0].is_zero() {
        return Err(Error::CompositionDomain);
    }
    if q.order() != arg.order() {
        return Err(Error::OrderMismatch(q.order(), arg.order()));
    }
    let order = q.order();
    let mut acc = BSeries::zero(order);
    for c in q.coeffs().iter().rev() {
        acc = biv_mul(arg, &acc)?;
        acc.rows[0] = &acc.rows[0] + &ZPoly::constant(c.clone());
    }
    Ok(acc)
}

/// `[z^k v^n] Q`.
pub fn extract(q: &BSeries, k: usize, n: usize) -> Result<Rational> {
    if n > q.order() {
        return Err(Error::usage(format!(
            "v-power {n} exceeds the truncation order {}",
            q.order()
        )));
    }
    Ok(q.coeff(k, n))
}

/// `1 + v Q(z, v)`; the order grows by one.
pub fn shift_biv(q: &BSeries) -> BSeries {
    let mut rows = Vec::with_capacity(q.rows.len() + 1);
    rows.push(ZPoly::one());
    rows.extend(q.rows.iter().cloned());
    BSeries::from_rows(rows)
}

pub fn unshift_biv(q: &BSeries) -> Result<BSeries> {
    if q.rows[0] != ZPoly::one() {
        return Err(Error::ShiftDomain(q.rows[0].coeff(0)));
    }
    if q.order() == 0 {
        return Err(Error::usage("cannot un-shift a series of order 0"));
    }
    Ok(BSeries::from_rows(q.rows[1..].to_vec()))
}

// ---------------------------------------------------------------------------
// RunSeq

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunKind {
    /// `q_n = P(X_1 = .. = X_n = 0)`
    ZeroRun,
    /// `p_n = P(X_1 = .. = X_n = 1)`
    OneRun,
}

impl RunKind {
    pub fn dual(self) -> Self {
        match self {
            RunKind::ZeroRun => RunKind::OneRun,
            RunKind::OneRun => RunKind::ZeroRun,
        }
    }
}

impl fmt::Display for RunKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunKind::ZeroRun => "zero-run",
            RunKind::OneRun => "one-run",
        })
    }
}

/// Run probabilities of one kind, validated on construction: the constant
/// term is 1, every coefficient lies in `[0, 1]`, and the sequence never
/// increases (the run events are nested).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunSeq {
    kind: RunKind,
    series: USeries,
}

impl RunSeq {
    pub fn new(kind: RunKind, series: USeries) -> Result<Self> {
        let c = series.coeffs();
        if !c[0].is_one() {
            return Err(Error::Validation(format!(
                "{kind} sequence must start at 1, found {}",
                c[0]
            )));
        }
        for (j, value) in c.iter().enumerate() {
            if !in_unit_interval(value) {
                return Err(Error::Validation(format!(
                    "{kind} coefficient {j} = {value} lies outside [0, 1]"
                )));
            }
        }
        if let Some(j) = (1..c.len()).find(|&j| c[j] > c[j - 1]) {
            return Err(Error::Validation(format!(
                "{kind} sequence increases at index {j}: {} > {}",
                c[j],
                c[j - 1]
            )));
        }
        Ok(RunSeq { kind, series })
    }

    pub fn zero_runs(series: USeries) -> Result<Self> {
        RunSeq::new(RunKind::ZeroRun, series)
    }

    pub fn one_runs(series: USeries) -> Result<Self> {
        RunSeq::new(RunKind::OneRun, series)
    }

    pub fn kind(&self) -> RunKind {
        self.kind
    }

    pub fn series(&self) -> &USeries {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        self.series.coeff(n)
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        Ok(RunSeq {
            kind: self.kind,
            series: self.series.truncate(order)?,
        })
    }

    pub(crate) fn expect_kind(&self, kind: RunKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Validation(format!(
                "expected a {kind} sequence, got a {} sequence",
                self.kind
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_series(order: usize) -> impl Strategy<Value = USeries> {
        prop::collection::vec((-6i64..=6, 1i64..=4), order + 1)
            .prop_map(|v| USeries::new(v.into_iter().map(|(n, d)| rat(n, d)).collect()))
    }

    #[test]
    fn difference_of_squares() {
        let a = USeries::from_ints(&[1, 1, 0]);
        let b = USeries::from_ints(&[1, -1, 0]);
        assert_eq!(series_mul(&a, &b).unwrap(), USeries::from_ints(&[1, 0, -1]));
    }

    #[test]
    fn one_is_the_identity() {
        let a = USeries::new(vec![rat(1, 2), rat(-3, 4), int(5)]);
        assert_eq!(series_mul(&USeries::one(2), &a).unwrap(), a);
    }

    #[test]
    fn mul_rejects_order_mismatch() {
        let a = USeries::one(2);
        let b = USeries::one(3);
        assert_eq!(series_mul(&a, &b), Err(Error::OrderMismatch(2, 3)));
    }

    #[test]
    fn exp_minus_one_over_v_times_reciprocal() {
        // sum v^n / (n+1)!, reciprocal built by hand from b_n = -sum a_j b_{n-j}
        let a = USeries::from_fn(5, |n| {
            let f: i64 = (1..=(n as i64 + 1)).product();
            rat(1, f)
        });
        let mut b = vec![int(1)];
        for n in 1..=5 {
            let s: Rational = (1..=n).map(|j| a.coeff(j) * &b[n - j]).sum();
            b.push(-s);
        }
        let b = USeries::new(b);
        assert_eq!(series_mul(&a, &b).unwrap(), USeries::one(5));
        assert_eq!(series_inv(&a).unwrap(), b);
    }

    #[test]
    fn geometric_inverse() {
        let a = USeries::from_ints(&[1, -1, 0, 0]);
        assert_eq!(series_inv(&a).unwrap(), USeries::from_ints(&[1, 1, 1, 1]));
        assert_eq!(series_inv(&USeries::one(4)).unwrap(), USeries::one(4));
    }

    #[test]
    fn inverse_needs_nonzero_constant() {
        let a = USeries::from_ints(&[0, 1, 2]);
        assert_eq!(series_inv(&a), Err(Error::NonInvertibleSeries));
    }

    #[test]
    fn one_pair_shifted_inverse_matches_dual_at_negated_argument() {
        // One-pair p = 1/2: one-run p_n = (1/2)^(n+1) for n >= 1.
        let p = USeries::from_fn(5, |n| {
            if n == 0 {
                int(1)
            } else {
                rpow(&rat(1, 2), n + 1)
            }
        });
        // Zero-runs from brute force over binary strings of length n+1 with no "11":
        // Fibonacci counts 1, 3, 5, 8, 13, 21 out of 1, 4, 8, 16, 32, 64.
        let q = USeries::new(vec![
            int(1),
            rat(3, 4),
            rat(5, 8),
            rat(8, 16),
            rat(13, 32),
            rat(21, 64),
        ]);
        let shifted_q = shift(&q).truncate(4).unwrap();
        let shifted_p = shift(&p).truncate(4).unwrap();
        assert_eq!(series_inv(&shifted_q).unwrap(), shifted_p.negate_arg());
    }

    #[test]
    fn scale_substitute_expands_rows() {
        let q = USeries::from_ints(&[1, 1]);
        let b = scale_substitute(&q, &ZPoly::one_minus_z());
        assert_eq!(b.rows(), &[ZPoly::one(), ZPoly::one_minus_z()]);

        let q = USeries::new(vec![rat(1, 3), rat(2, 5), int(7)]);
        let b = scale_substitute(&q, &ZPoly::one());
        assert_eq!(b, BSeries::from_useries(&q));
    }

    #[test]
    fn scale_substitute_eulerian() {
        let q = USeries::new(vec![int(1), rat(1, 2), rat(1, 6)]);
        let b = scale_substitute(&q, &ZPoly::one_minus_z());
        assert_eq!(b.row(0), &ZPoly::one());
        assert_eq!(b.row(1), &ZPoly::new(vec![rat(1, 2), rat(-1, 2)]));
        assert_eq!(
            b.row(2),
            &ZPoly::new(vec![rat(1, 6), rat(-1, 3), rat(1, 6)])
        );
    }

    #[test]
    fn bivariate_geometric_inverse() {
        let a = BSeries::from_rows(vec![ZPoly::one(), -&ZPoly::z(), ZPoly::zero()]);
        let inv = biv_inv(&a).unwrap();
        let expected: Vec<ZPoly> = (0..3).map(|k| ZPoly::monomial(int(1), k)).collect();
        assert_eq!(inv.rows(), expected.as_slice());
    }

    #[test]
    fn bivariate_binomial() {
        // 1 - v (1/2 + z/2)
        let half = rat(1, 2);
        let step = ZPoly::new(vec![half.clone(), half.clone()]);
        let mut rows = vec![ZPoly::one(), -&step];
        rows.extend(std::iter::repeat_n(ZPoly::zero(), 5));
        let inv = biv_inv(&BSeries::from_rows(rows)).unwrap();
        for n in 0..=6 {
            // brute force over all 2^n fair coin sequences
            let mut counts = vec![0i64; n + 1];
            for mask in 0u32..(1 << n) {
                counts[mask.count_ones() as usize] += 1;
            }
            let expected = ZPoly::new(counts.iter().map(|&c| rat(c, 1 << n)).collect());
            assert_eq!(inv.row(n), &expected, "row {n}");
        }
    }

    #[test]
    fn bivariate_inverse_rejects_zero_constant() {
        let a = BSeries::from_rows(vec![ZPoly::z(), ZPoly::one()]);
        assert_eq!(biv_inv(&a), Err(Error::NonInvertibleSeries));
    }

    #[test]
    fn compose_simple_cases() {
        let q = USeries::from_ints(&[1, 1]);
        let arg = BSeries::from_rows(vec![ZPoly::zero(), ZPoly::one_minus_z()]);
        let out = compose_positive_order(&q, &arg).unwrap();
        assert_eq!(out.rows(), &[ZPoly::one(), ZPoly::one_minus_z()]);

        let q = USeries::geometric(&int(1), 4);
        let mut rows = vec![ZPoly::zero(), ZPoly::z()];
        rows.extend(std::iter::repeat_n(ZPoly::zero(), 3));
        let out = compose_positive_order(&q, &BSeries::from_rows(rows)).unwrap();
        for n in 0..=4 {
            assert_eq!(out.row(n), &ZPoly::monomial(int(1), n));
        }
    }

    #[test]
    fn compose_rejects_constant_term() {
        let q = USeries::from_ints(&[1, 1]);
        let arg = BSeries::from_rows(vec![ZPoly::one(), ZPoly::one()]);
        assert_eq!(
            compose_positive_order(&q, &arg),
            Err(Error::CompositionDomain)
        );
    }

    #[test]
    fn extract_out_of_range() {
        let b = BSeries::one(3);
        assert_eq!(extract(&b, 0, 0).unwrap(), int(1));
        assert_eq!(extract(&b, 5, 2).unwrap(), int(0));
        assert!(matches!(extract(&b, 0, 4), Err(Error::Usage(_))));
    }

    #[test]
    fn shift_examples() {
        let eulerian = USeries::new(vec![int(1), rat(1, 2), rat(1, 6)]);
        assert_eq!(
            shift(&eulerian),
            USeries::new(vec![int(1), int(1), rat(1, 2), rat(1, 6)])
        );
        assert_eq!(unshift(&shift(&eulerian)).unwrap(), eulerian);
        assert_eq!(
            unshift(&USeries::from_ints(&[2, 1])),
            Err(Error::ShiftDomain(int(2)))
        );
        let b = BSeries::from_rows(vec![ZPoly::one(), ZPoly::z()]);
        assert_eq!(unshift_biv(&shift_biv(&b)).unwrap(), b);
    }

    #[test]
    fn zpoly_exact_division() {
        let a = ZPoly::from_ints(&[1, -1]);
        let b = ZPoly::from_ints(&[2, 3]);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a));
        assert_eq!(
            ZPoly::from_ints(&[1, 0, 1]).div_exact(&ZPoly::from_ints(&[1, 1])),
            None
        );
    }

    #[test]
    fn zpoly_canonical_equality() {
        assert_eq!(ZPoly::from_ints(&[1, 2, 0, 0]), ZPoly::from_ints(&[1, 2]));
        assert_eq!(ZPoly::from_ints(&[0, 0]).degree(), None);
    }

    #[test]
    fn run_seq_validation() {
        assert!(RunSeq::zero_runs(USeries::new(vec![int(1), rat(1, 2), rat(1, 3)])).is_ok());
        assert!(RunSeq::zero_runs(USeries::from_ints(&[2, 1])).is_err());
        assert!(RunSeq::zero_runs(USeries::new(vec![int(1), rat(1, 3), rat(1, 2)])).is_err());
        assert!(RunSeq::one_runs(USeries::new(vec![int(1), rat(-1, 3)])).is_err());
    }

    proptest! {
        #[test]
        fn mul_commutes(a in small_series(8), b in small_series(8)) {
            prop_assert_eq!(series_mul(&a, &b).unwrap(), series_mul(&b, &a).unwrap());
        }

        #[test]
        fn mul_associates(a in small_series(6), b in small_series(6), c in small_series(6)) {
            let left = series_mul(&series_mul(&a, &b).unwrap(), &c).unwrap();
            let right = series_mul(&a, &series_mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_round_trip(a in small_series(10)) {
            prop_assume!(!a.coeff(0).is_zero());
            let b = series_inv(&a).unwrap();
            prop_assert_eq!(series_mul(&a, &b).unwrap(), USeries::one(10));
        }

        #[test]
        fn bivariate_inverse_round_trip(
            raw in prop::collection::vec(prop::collection::vec(-3i64..=3, 0..4), 5)
        ) {
            let mut rows: Vec<ZPoly> = raw.iter().map(|r| ZPoly::from_ints(r)).collect();
            rows[0] = &rows[0] + &ZPoly::one();
            prop_assume!(!rows[0].coeff(0).is_zero());
            let a = BSeries::from_rows(rows);
            // Cap high enough to hold every product term exactly.
            let cap = 20;
            let b = a.inv_capped(cap).unwrap();
            let prod = a.mul_capped(&b, cap).unwrap();
            prop_assert_eq!(prod, BSeries::one(4));
        }

        #[test]
        fn rationals_stay_reduced(a in small_series(6)) {
            prop_assume!(!a.coeff(0).is_zero());
            for c in series_inv(&a).unwrap().coeffs() {
                prop_assert!(c.denom() > &BigInt::zero());
                prop_assert_eq!(num_integer::Integer::gcd(c.numer(), c.denom()), BigInt::one());
            }
        }
    }
}
