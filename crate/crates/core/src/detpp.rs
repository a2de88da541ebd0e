//! Determinantal view of a stationary 1-dependent process.
//!
//! The point process of ones has a stationary kernel `K(x, y) = k(y - x)`
//! with `k(-1) = -1` and `k(m) = 0` for `m <= -2`. Its generating function
//! satisfies `G_k(v) P(v) = -1/v`. From the one-run probabilities alone we
//! get every correlation, every string probability and the count pgf as
//! determinants, which gives a route to `Q_{S_n}` independent of the series
//! transforms.
//!
//! Interval weights in the direct kernel formula use `rho([a, b]) = p_{b-a}`
//! for the half-open run `a..b`, which is the convention that reproduces
//! `k(0) = p_1` and `k(1) = p_2 - p_1^2`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{det_bareiss, determinant, is_upper_hessenberg, Matrix};
use crate::series::{series_inv, Rational, RunKind, RunSeq, USeries, ZPoly};

/// Kernel values `k(-1) ..= k(hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBand {
    values: Vec<Rational>,
}

impl KernelBand {
    pub fn hi(&self) -> usize {
        self.values.len() - 2
    }

    /// `k(lag)`; zero for `lag <= -2`. Panics above `hi`.
    pub fn get(&self, lag: i64) -> Rational {
        if lag <= -2 {
            return Rational::zero();
        }
        let idx = usize::try_from(lag + 1).expect("lag >= -1");
        assert!(idx < self.values.len(), "lag {lag} exceeds the kernel band");
        self.values[idx].clone()
    }

    /// `(lag, k(lag))` for `lag = -1 ..= hi`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as i64 - 1, v))
    }
}

/// One-run probabilities extended to negative indices:
/// `p_{-1} = p_0 = 1` and `p_m = 0` for `m < -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedOneRuns {
    values: Vec<Rational>,
}

impl ExtendedOneRuns {
    pub fn new(p: &RunSeq) -> Result<Self> {
        p.expect_kind(RunKind::OneRun)?;
        Ok(ExtendedOneRuns {
            values: p.series().coeffs().to_vec(),
        })
    }

    /// `p_0, p_1, ..` taken as given, with no range checks. Used to probe
    /// candidate sequences that may not be realizable.
    pub fn from_values(values: Vec<Rational>) -> Self {
        assert!(!values.is_empty(), "need at least p_0");
        ExtendedOneRuns { values }
    }

    /// Largest index with a known value.
    pub fn max_index(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, m: i64) -> Rational {
        match m {
            m if m < -1 => Rational::zero(),
            -1 => Rational::one(),
            m => {
                let idx = m as usize;
                assert!(idx < self.values.len(), "p_{m} is past the known order");
                self.values[idx].clone()
            }
        }
    }

    fn need(&self, m: usize) -> Result<()> {
        if m > self.max_index() {
            return Err(Error::usage(format!(
                "needs p_{m}, but one-run values are only known up to p_{}",
                self.max_index()
            )));
        }
        Ok(())
    }
}

/// `v G_k(v) = -1 / P(v)`, the kernel generating function shifted to start
/// at `v^0`.
pub fn kernel_series(p: &RunSeq) -> Result<USeries> {
    p.expect_kind(RunKind::OneRun)?;
    Ok(-&series_inv(p.series())?)
}

/// Reads `k(n) = -[v^{n+1}] (1/P)(v)` for `n = -1 ..= hi`.
pub fn kernel_from_one_runs(p: &RunSeq, hi: usize) -> Result<KernelBand> {
    p.expect_kind(RunKind::OneRun)?;
    if hi + 1 > p.order() {
        return Err(Error::usage(format!(
            "kernel up to lag {hi} needs one-run order {}, have {}",
            hi + 1,
            p.order()
        )));
    }
    let shifted = kernel_series(p)?;
    Ok(KernelBand {
        values: shifted.coeffs()[..hi + 2].to_vec(),
    })
}

/// `K(x, y)` as the alternating sum over chains
/// `x = l_0 < l_1 < .. < l_r = y + 1` of `prod p_{l_k - l_{k-1}}`.
/// Enumerates all `2^{y-x}` chains.
pub fn kernel_direct(p: &RunSeq, x: i64, y: i64) -> Result<Rational> {
    p.expect_kind(RunKind::OneRun)?;
    if x == y + 1 {
        return Ok(-Rational::one());
    }
    if x > y + 1 {
        return Ok(Rational::zero());
    }
    let span = usize::try_from(y - x + 1).expect("x <= y");
    if span > p.order() {
        return Err(Error::usage(format!(
            "lag {} needs p_{span}, one-run order is {}",
            y - x,
            p.order()
        )));
    }
    if span > 24 {
        return Err(Error::usage("direct kernel is limited to lags below 24"));
    }
    // Bit i of the mask marks a cut at x + i + 1.
    let interior = span - 1;
    let mut total = Rational::zero();
    for mask in 0u32..(1u32 << interior) {
        let mut prev = 0usize;
        let mut term = Rational::one();
        for cut in (1..=interior)
            .filter(|i| mask & (1 << (i - 1)) != 0)
            .chain([span])
        {
            term *= p.coeff(cut - prev);
            prev = cut;
        }
        if mask.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// `rho(A) = det(k(y - x))_{x, y in A}`, the probability that every site in
/// `A` is a one.
pub fn correlation(kb: &KernelBand, points: &[i64]) -> Result<Rational> {
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage(
            "correlation points must be strictly increasing",
        ));
    }
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        if (last - first) as usize > kb.hi() {
            return Err(Error::usage(format!(
                "point spread {} exceeds the kernel band {}",
                last - first,
                kb.hi()
            )));
        }
    }
    let m: Matrix<Rational> = points
        .iter()
        .map(|x| points.iter().map(|y| kb.get(y - x)).collect())
        .collect();
    Ok(det_bareiss(&m))
}

/// Probability that, among `X_1..X_n`, the zeros sit exactly at `zeros`
/// (1-based, strictly increasing):
/// `det(p_{w_{j+1} - w_i - 1})_{0 <= i, j <= k}` with `w_0 = 0`,
/// `w_{k+1} = n + 1`.
pub fn string_probability(p: &ExtendedOneRuns, n: usize, zeros: &[usize]) -> Result<Rational> {
    if zeros.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("zero positions must be strictly increasing"));
    }
    if zeros.first().is_some_and(|&w| w == 0) || zeros.last().is_some_and(|&w| w > n) {
        return Err(Error::usage(format!("zero positions must lie in 1..={n}")));
    }
    p.need(n)?;
    let mut w = Vec::with_capacity(zeros.len() + 2);
    w.push(0i64);
    w.extend(zeros.iter().map(|&z| z as i64));
    w.push(n as i64 + 1);
    let k = zeros.len();
    let m: Matrix<Rational> = (0..=k)
        .map(|i| (0..=k).map(|j| p.get(w[j + 1] - w[i] - 1)).collect())
        .collect();
    Ok(determinant(&m))
}

/// Indicator pgf `E[prod z_i^{X_i}]` as the determinant of the
/// `(n+1) x (n+1)` matrix with `p_{j-i}` off the sub-diagonal and
/// `1 - z_j` on it.
pub fn multivariate_pgf(p: &ExtendedOneRuns, n: usize, zvals: &[Rational]) -> Result<Rational> {
    if zvals.len() != n {
        return Err(Error::usage(format!(
            "expected {n} z-values, got {}",
            zvals.len()
        )));
    }
    p.need(n)?;
    let m: Matrix<Rational> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i == j + 1 {
                        Rational::one() - &zvals[j]
                    } else {
                        p.get(j as i64 - i as i64)
                    }
                })
                .collect()
        })
        .collect();
    debug_assert!(is_upper_hessenberg(&m));
    Ok(determinant(&m))
}

/// `E[z^{S_n}] = det(p^_{j-i})_{0 <= i, j <= n}` with `p^_{-1} = 1 - z`.
pub fn pgf_determinant(p: &ExtendedOneRuns, n: usize) -> Result<ZPoly> {
    p.need(n)?;
    let m: Matrix<ZPoly> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i == j + 1 {
                        ZPoly::one_minus_z()
                    } else {
                        ZPoly::constant(p.get(j as i64 - i as i64))
                    }
                })
                .collect()
        })
        .collect();
    debug_assert!(is_upper_hessenberg(&m));
    Ok(determinant(&m))
}

/// `E[z^{S_n}] = det(I + (z - 1) K)` over the sites `1..=n`.
pub fn pgf_fredholm(kb: &KernelBand, n: usize) -> Result<ZPoly> {
    if n == 0 {
        return Ok(ZPoly::one());
    }
    if kb.hi() + 1 < n {
        return Err(Error::usage(format!(
            "size {n} needs kernel lags up to {}, band stops at {}",
            n - 1,
            kb.hi()
        )));
    }
    let z_minus_one = ZPoly::from_ints(&[-1, 1]);
    let m: Matrix<ZPoly> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let entry = z_minus_one.scale(&kb.get(j as i64 - i as i64));
                    if i == j {
                        &entry + &ZPoly::one()
                    } else {
                        entry
                    }
                })
                .collect()
        })
        .collect();
    debug_assert!(is_upper_hessenberg(&m));
    Ok(determinant(&m))
}

/// Every zero-position set of a length-`n` string, in bitmask order
/// (bit `i` set means position `i + 1` is a zero).
pub fn zero_sets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..(1u64 << n)).map(move |mask| (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect())
}

/// First string probability that comes out negative, searching lengths
/// `1..=depth` in order.
pub fn first_negative_string(
    p: &ExtendedOneRuns,
    depth: usize,
) -> Result<Option<(usize, Vec<usize>, Rational)>> {
    for n in 1..=depth {
        for zeros in zero_sets(n) {
            let prob = string_probability(p, n, &zeros)?;
            if prob.is_negative() {
                return Ok(Some((n, zeros, prob)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat, rpow};
    use crate::transforms::{bgf_from_one_runs, involution};

    fn iid(p: &Rational, order: usize) -> RunSeq {
        RunSeq::one_runs(USeries::geometric(p, order)).unwrap()
    }

    fn eulerian(order: usize) -> RunSeq {
        let mut f = int(1);
        RunSeq::one_runs(USeries::from_fn(order, |n| {
            f /= int(n as i64 + 1);
            f.clone()
        }))
        .unwrap()
    }

    fn one_pair_half(order: usize) -> RunSeq {
        RunSeq::one_runs(USeries::from_fn(order, |n| {
            if n == 0 {
                int(1)
            } else {
                rpow(&rat(1, 2), n + 1)
            }
        }))
        .unwrap()
    }

    #[test]
    fn iid_kernel_is_diagonal() {
        let p = rat(1, 3);
        let kb = kernel_from_one_runs(&iid(&p, 8), 6).unwrap();
        assert_eq!(kb.get(-1), int(-1));
        assert_eq!(kb.get(-2), int(0));
        assert_eq!(kb.get(0), p);
        for lag in 1..=6 {
            assert_eq!(kb.get(lag), int(0));
        }
    }

    #[test]
    fn kernel_low_lags() {
        let e = eulerian(6);
        let kb = kernel_from_one_runs(&e, 3).unwrap();
        assert_eq!(kb.get(0), rat(1, 2));
        assert_eq!(kb.get(1), rat(-1, 12));
        let p = one_pair_half(6);
        let kb = kernel_from_one_runs(&p, 3).unwrap();
        let p1 = p.coeff(1);
        assert_eq!(kb.get(1), p.coeff(2) - p1 * p1);
    }

    #[test]
    fn kernel_needs_order() {
        assert!(matches!(
            kernel_from_one_runs(&eulerian(3), 3),
            Err(Error::Usage(_))
        ));
        assert_eq!(kernel_from_one_runs(&eulerian(4), 3).unwrap().hi(), 3);
    }

    #[test]
    fn kernel_routes_agree() {
        for p in [eulerian(9), one_pair_half(9), iid(&rat(3, 5), 9)] {
            let kb = kernel_from_one_runs(&p, 6).unwrap();
            assert_eq!(kernel_direct(&p, 4, 4).unwrap(), p.coeff(1).clone());
            for lag in -3..=5i64 {
                assert_eq!(
                    kernel_direct(&p, 10, 10 + lag).unwrap(),
                    kb.get(lag),
                    "lag {lag}"
                );
            }
        }
    }

    #[test]
    fn kernel_times_one_runs_is_minus_one_over_v() {
        let p = one_pair_half(12);
        let prod = &kernel_series(&p).unwrap() * p.series();
        assert_eq!(prod, -&USeries::one(12));
    }

    #[test]
    fn correlations() {
        let e = eulerian(10);
        let kb = kernel_from_one_runs(&e, 7).unwrap();
        assert_eq!(correlation(&kb, &[3]).unwrap(), rat(1, 2));
        for m in 1..=6i64 {
            let pts: Vec<i64> = (0..m).collect();
            assert_eq!(correlation(&kb, &pts).unwrap(), e.coeff(m as usize).clone());
        }
        let p = rat(2, 5);
        let kb = kernel_from_one_runs(&iid(&p, 5), 2).unwrap();
        assert_eq!(correlation(&kb, &[0, 1]).unwrap(), &p * &p);
        assert_eq!(correlation(&kb, &[0, 2]).unwrap(), &p * &p);
        assert!(correlation(&kb, &[0, 5]).is_err());
    }

    #[test]
    fn string_probability_examples() {
        let e = ExtendedOneRuns::new(&eulerian(4)).unwrap();
        assert_eq!(string_probability(&e, 1, &[1]).unwrap(), rat(1, 2));
        assert_eq!(string_probability(&e, 3, &[]).unwrap(), rat(1, 24));
        let p = rat(1, 3);
        let ext = ExtendedOneRuns::new(&iid(&p, 6)).unwrap();
        for n in 0..=6 {
            for zeros in zero_sets(n) {
                let k = zeros.len();
                let expected = rpow(&p, n - k) * rpow(&(int(1) - &p), k);
                assert_eq!(string_probability(&ext, n, &zeros).unwrap(), expected);
            }
        }
    }

    #[test]
    fn string_probabilities_sum_to_one() {
        let ext = ExtendedOneRuns::new(&one_pair_half(6)).unwrap();
        for n in 0..=6 {
            let total: Rational = zero_sets(n)
                .map(|z| string_probability(&ext, n, &z).unwrap())
                .sum();
            assert_eq!(total, int(1));
        }
    }

    #[test]
    fn one_pair_string_probabilities_match_enumeration() {
        // X_i = Y_i Y_{i+1} with Y fair coins: enumerate Y in {0,1}^(n+1).
        let ext = ExtendedOneRuns::new(&one_pair_half(5)).unwrap();
        for n in 1..=5usize {
            let mut counts = std::collections::HashMap::new();
            for y in 0u32..(1 << (n + 1)) {
                let zeros: Vec<usize> = (1..=n)
                    .filter(|&i| (y >> (i - 1)) & 1 == 0 || (y >> i) & 1 == 0)
                    .collect();
                *counts.entry(zeros).or_insert(0i64) += 1;
            }
            for zeros in zero_sets(n) {
                let c = counts.get(&zeros).copied().unwrap_or(0);
                assert_eq!(
                    string_probability(&ext, n, &zeros).unwrap(),
                    rat(c, 1 << (n + 1)),
                    "n {n} zeros {zeros:?}"
                );
            }
        }
    }

    #[test]
    fn multivariate_pgf_examples() {
        let p = one_pair_half(8);
        let ext = ExtendedOneRuns::new(&p).unwrap();
        let q = involution(&p).unwrap();
        for n in 0..=8 {
            assert_eq!(multivariate_pgf(&ext, n, &vec![int(1); n]).unwrap(), int(1));
            assert_eq!(
                multivariate_pgf(&ext, n, &vec![int(0); n]).unwrap(),
                q.coeff(n).clone()
            );
        }
        // The indicator pgf summed over strings, with distinct z-values.
        let n = 4;
        let zs: Vec<Rational> = (0..n).map(|i| rat(i as i64 + 2, 7)).collect();
        let expected: Rational = zero_sets(n)
            .map(|zeros| {
                let weight: Rational = (1..=n)
                    .filter(|i| !zeros.contains(i))
                    .map(|i| zs[i - 1].clone())
                    .product();
                string_probability(&ext, n, &zeros).unwrap() * weight
            })
            .sum();
        assert_eq!(multivariate_pgf(&ext, n, &zs).unwrap(), expected);
        assert!(multivariate_pgf(&ext, 3, &zs).is_err());
    }

    #[test]
    fn pgf_determinant_examples() {
        let e = ExtendedOneRuns::new(&eulerian(4)).unwrap();
        assert_eq!(
            pgf_determinant(&e, 1).unwrap(),
            ZPoly::new(vec![rat(1, 2), rat(1, 2)])
        );
        assert_eq!(
            pgf_determinant(&e, 3).unwrap(),
            ZPoly::from_ints(&[1, 11, 11, 1]).scale(&rat(1, 24))
        );
        let op = ExtendedOneRuns::new(&one_pair_half(3)).unwrap();
        assert_eq!(
            pgf_determinant(&op, 2).unwrap(),
            ZPoly::new(vec![rat(5, 8), rat(1, 4), rat(1, 8)])
        );
    }

    #[test]
    fn fredholm_examples() {
        let p = rat(1, 4);
        let kb = kernel_from_one_runs(&iid(&p, 6), 4).unwrap();
        let step = ZPoly::new(vec![int(1) - &p, p.clone()]);
        assert_eq!(pgf_fredholm(&kb, 1).unwrap(), step);
        assert_eq!(pgf_fredholm(&kb, 2).unwrap(), step.pow(2));
        let kb = kernel_from_one_runs(&eulerian(6), 4).unwrap();
        assert_eq!(
            pgf_fredholm(&kb, 3).unwrap(),
            ZPoly::from_ints(&[1, 11, 11, 1]).scale(&rat(1, 24))
        );
        assert!(pgf_fredholm(&kb, 7).is_err());
    }

    #[test]
    fn three_pgf_routes_agree() {
        for p in [eulerian(10), one_pair_half(10)] {
            let ext = ExtendedOneRuns::new(&p).unwrap();
            let kb = kernel_from_one_runs(&p, 8).unwrap();
            let bgf = bgf_from_one_runs(&p).unwrap();
            for n in 0..=8 {
                let det = pgf_determinant(&ext, n).unwrap();
                assert_eq!(det, pgf_fredholm(&kb, n).unwrap());
                assert_eq!(&det, bgf.row(n));
            }
        }
    }

    #[test]
    fn negative_string_is_found() {
        let bad = RunSeq::one_runs(USeries::from_ints(&[1, 1, 1, 0])).unwrap();
        let ext = ExtendedOneRuns::new(&bad).unwrap();
        let (n, zeros, det) = first_negative_string(&ext, 3).unwrap().unwrap();
        assert_eq!((n, zeros, det), (3, vec![1, 2], int(-1)));
    }
}
