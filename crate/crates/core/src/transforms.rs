//! From run probabilities to the bivariate generating function
//! `Q(z, v) = sum_n E[z^{S_n}] v^n` of the counts `S_n = X_1 + .. + X_n`.
//!
//! Two independent routes are provided for a stationary 1-dependent
//! process: one from the zero-run sequence `q_n` and one from the one-run
//! sequence `p_n`. They are implemented separately so each checks the
//! other. The exchangeable, renewal and stationary-renewal transforms read
//! the same zero-run sequence under a different dependence structure and
//! are used for comparison.
//!
//! All transforms are formal and total: input run sequences are checked
//! only structurally (see [`RunSeq`]). Whether a sequence is realizable by
//! a 1-dependent process is a separate question answered in
//! [`crate::detpp`].

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{
    biv_inv, biv_mul, compose_positive_order, scale_substitute, BSeries, Rational, RunKind, RunSeq,
    USeries, ZPoly,
};

/// `1 - c(z) v` at the given order.
fn one_minus_v_times(c: ZPoly, order: usize) -> BSeries {
    let mut rows = vec![ZPoly::zero(); order + 1];
    rows[0] = ZPoly::one();
    if order >= 1 {
        rows[1] = -&c;
    }
    BSeries::from_rows(rows)
}

/// `Q(z, v) = Q((1-z)v) / (1 - z v Q((1-z)v))`.
pub fn bgf_from_zero_runs(q: &RunSeq) -> Result<BSeries> {
    q.expect_kind(RunKind::ZeroRun)?;
    let order = q.order();
    let substituted = scale_substitute(q.series(), &ZPoly::one_minus_z());
    let denom = &BSeries::one(order) - &substituted.mul_v().mul_zpoly(&ZPoly::z());
    biv_mul(&substituted, &biv_inv(&denom)?)
}

/// `Q(z, v) = P(-(1-z)v) / (1 - v P(-(1-z)v))`.
pub fn bgf_from_one_runs(p: &RunSeq) -> Result<BSeries> {
    p.expect_kind(RunKind::OneRun)?;
    let order = p.order();
    let substituted = scale_substitute(p.series(), &ZPoly::from_ints(&[-1, 1]));
    let denom = &BSeries::one(order) - &substituted.mul_v();
    biv_mul(&substituted, &biv_inv(&denom)?)
}

/// `F(v) -> F(-v) / (1 - v F(-v))`, with no range checks. Applying it
/// twice gives back the input.
pub fn involution_series(s: &USeries) -> Result<USeries> {
    let negated = s.negate_arg();
    let denom = &USeries::one(s.order()) - &negated.mul_v();
    Ok(&negated * &denom.inv()?)
}

/// Maps zero-run probabilities to one-run probabilities and back.
///
/// Fails with [`Error::NotOneDependent`] when the dual sequence is not a
/// valid run sequence, which means no stationary 1-dependent process has
/// the input as its run probabilities.
pub fn involution(r: &RunSeq) -> Result<RunSeq> {
    let out = involution_series(r.series())?;
    let c = out.coeffs();
    let offending = (0..c.len())
        .find(|&j| c[j] < Rational::zero() || c[j] > Rational::one() || (j > 0 && c[j] > c[j - 1]));
    if let Some(index) = offending {
        return Err(Error::NotOneDependent {
            index,
            value: c[index].clone(),
        });
    }
    RunSeq::new(r.kind().dual(), out)
}

/// Involution on shifted series: `F~(v) -> 1 / F~(-v)`.
pub fn shifted_involution(shifted: &USeries) -> Result<USeries> {
    if !shifted.coeff(0).is_one() {
        return Err(Error::ShiftDomain(shifted.coeff(0).clone()));
    }
    shifted.negate_arg().inv()
}

/// Generating function of the complementary counts `n - S_n`: every row is
/// reversed within degree `n`.
pub fn dual_bgf(q: &BSeries) -> Result<BSeries> {
    let rows = q
        .rows()
        .iter()
        .enumerate()
        .map(|(n, row)| row.reversed(n + 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(BSeries::from_rows(rows))
}

/// `E[z^{S_n}]` by conditioning on the first z-mark:
/// `Q_n = (1-z)^n q_n + sum_{k=1..n} (1-z)^{k-1} z q_{k-1} Q_{n-k}`.
pub fn pgf_by_recursion(q: &RunSeq, n: usize) -> Result<ZPoly> {
    q.expect_kind(RunKind::ZeroRun)?;
    if n > q.order() {
        return Err(Error::usage(format!(
            "n = {n} exceeds the run-sequence order {}",
            q.order()
        )));
    }
    let one_minus_z = ZPoly::one_minus_z();
    let mut powers = vec![ZPoly::one()];
    for j in 1..=n {
        powers.push(&powers[j - 1] * &one_minus_z);
    }
    let z = ZPoly::z();
    let mut pgfs: Vec<ZPoly> = Vec::with_capacity(n + 1);
    pgfs.push(ZPoly::one());
    for m in 1..=n {
        let mut acc = powers[m].scale(q.coeff(m));
        for k in 1..=m {
            let first_mark = (&powers[k - 1] * &z).scale(q.coeff(k - 1));
            acc = &acc + &(&first_mark * &pgfs[m - k]);
        }
        pgfs.push(acc);
    }
    Ok(pgfs.pop().expect("at least one pgf"))
}

/// Exchangeable reading of a zero-run sequence:
/// `Q((1-z)v / (1-zv)) / (1 - zv)`.
pub fn bgf_exchangeable(q: &RunSeq) -> Result<BSeries> {
    q.expect_kind(RunKind::ZeroRun)?;
    let order = q.order();
    let inv_one_minus_zv = biv_inv(&one_minus_v_times(ZPoly::z(), order))?;
    let mut num = vec![ZPoly::zero(); order + 1];
    if order >= 1 {
        num[1] = ZPoly::one_minus_z();
    }
    let arg = biv_mul(&BSeries::from_rows(num), &inv_one_minus_zv)?;
    let composed = compose_positive_order(q.series(), &arg)?;
    biv_mul(&composed, &inv_one_minus_zv)
}

/// Renewal reading (delay distributed as the renewals):
/// `Q(v) / (1 - z(1 + (v-1)Q(v)))`.
pub fn bgf_renewal(q: &RunSeq) -> Result<BSeries> {
    q.expect_kind(RunKind::ZeroRun)?;
    let order = q.order();
    let runs = BSeries::from_useries(q.series());
    // 1 + (v - 1) Q(v) has no v^0 term because q_0 = 1.
    let tail = &(&BSeries::one(order) + &runs.mul_v()) - &runs;
    let denom = &BSeries::one(order) - &tail.mul_zpoly(&ZPoly::z());
    biv_mul(&runs, &biv_inv(&denom)?)
}

/// Stationary-renewal reading, with `Q'(0)` taken as `q_1`:
///
/// ```text
///            -z + (z - v + (1-z) v q_1) Q(v)
/// Q(z,v) = -----------------------------------------------------
///          z(v-1) + (1-z) v (q_1 - 1) + z (v-1)^2 Q(v)
/// ```
///
/// Numerator and denominator both vanish at `v = 0`; the common power of
/// `v` is cancelled before inverting, so the result has order
/// `q.order() - 1` in the generic case.
pub fn bgf_stationary_renewal(q: &RunSeq) -> Result<BSeries> {
    q.expect_kind(RunKind::ZeroRun)?;
    let order = q.order();
    if order == 0 {
        return Err(Error::usage(
            "stationary-renewal transform needs q_1 (order >= 1)",
        ));
    }
    let q1 = q.coeff(1).clone();
    let runs = BSeries::from_useries(q.series());
    let z = ZPoly::z();
    let q1_minus_one = &q1 - Rational::one();

    // z - v + (1-z) v q_1
    let mut coef = vec![ZPoly::zero(); order + 1];
    coef[0] = z.clone();
    coef[1] = &ZPoly::constant(q1_minus_one.clone()) - &z.scale(&q1);
    let mut num = biv_mul(&BSeries::from_rows(coef), &runs)?;
    let mut rows = num.into_rows();
    rows[0] = &rows[0] - &z;
    num = BSeries::from_rows(rows);

    // z(v-1) + (1-z) v (q_1 - 1) + z (v-1)^2 Q(v)
    let mut lead = vec![ZPoly::zero(); order + 1];
    lead[0] = -&z;
    lead[1] = &z + &ZPoly::one_minus_z().scale(&q1_minus_one);
    let mut square = vec![ZPoly::zero(); order + 1];
    square[0] = z.clone();
    square[1] = z.scale(&Rational::from_integer((-2).into()));
    if order >= 2 {
        square[2] = z.clone();
    }
    let denom = &BSeries::from_rows(lead) + &biv_mul(&BSeries::from_rows(square), &runs)?;

    let strip = denom
        .rows()
        .iter()
        .position(|r| !r.is_zero())
        .ok_or(Error::NonInvertibleSeries)?;
    if num.rows()[..strip].iter().any(|r| !r.is_zero()) {
        return Err(Error::NonInvertibleSeries);
    }
    if strip > order {
        return Err(Error::NonInvertibleSeries);
    }
    let num = BSeries::from_rows(num.rows()[strip..].to_vec());
    let denom = BSeries::from_rows(denom.rows()[strip..].to_vec());
    biv_mul(&num, &biv_inv(&denom)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{extract, int, rat, rpow, shift, unshift};
    use itertools::Itertools;

    fn factorial(n: usize) -> i64 {
        (1..=n as i64).product()
    }

    fn eulerian_runs(kind: RunKind, order: usize) -> RunSeq {
        RunSeq::new(kind, USeries::from_fn(order, |n| rat(1, factorial(n + 1)))).unwrap()
    }

    fn all_ones(order: usize) -> RunSeq {
        RunSeq::zero_runs(USeries::one(order)).unwrap()
    }

    fn all_zeros(order: usize) -> RunSeq {
        RunSeq::zero_runs(USeries::geometric(&int(1), order)).unwrap()
    }

    fn descent_counts(len: usize) -> Vec<i64> {
        let mut counts = vec![0i64; len.max(1)];
        for perm in (0..len).permutations(len) {
            let d = perm.windows(2).filter(|w| w[0] > w[1]).count();
            counts[d] += 1;
        }
        counts
    }

    fn binomial_row(p: &Rational, n: usize) -> ZPoly {
        let step = ZPoly::new(vec![Rational::one() - p, p.clone()]);
        step.pow(n)
    }

    #[test]
    fn degenerate_processes() {
        let ones = bgf_from_zero_runs(&all_ones(6)).unwrap();
        let zeros = bgf_from_zero_runs(&all_zeros(6)).unwrap();
        for n in 0..=6 {
            assert_eq!(ones.row(n), &ZPoly::monomial(int(1), n));
            assert_eq!(zeros.row(n), &ZPoly::one());
        }
        let p_ones = RunSeq::one_runs(USeries::geometric(&int(1), 6)).unwrap();
        let p_zeros = RunSeq::one_runs(USeries::one(6)).unwrap();
        assert_eq!(bgf_from_one_runs(&p_ones).unwrap(), ones);
        assert_eq!(bgf_from_one_runs(&p_zeros).unwrap(), zeros);
    }

    #[test]
    fn eulerian_numbers_from_zero_runs() {
        let bgf = bgf_from_zero_runs(&eulerian_runs(RunKind::ZeroRun, 6)).unwrap();
        for len in 1..=7 {
            let counts = descent_counts(len);
            for (k, &c) in counts.iter().enumerate() {
                let scaled = extract(&bgf, k, len - 1).unwrap() * int(factorial(len));
                assert_eq!(scaled, int(c), "len {len}, k {k}");
            }
        }
        assert_eq!(descent_counts(4), vec![1, 11, 11, 1]);
    }

    #[test]
    fn eulerian_two_forms_agree() {
        let q = bgf_from_zero_runs(&eulerian_runs(RunKind::ZeroRun, 10)).unwrap();
        let p = bgf_from_one_runs(&eulerian_runs(RunKind::OneRun, 10)).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn eulerian_involution_is_self_dual() {
        let q = eulerian_runs(RunKind::ZeroRun, 12);
        let p = involution(&q).unwrap();
        assert_eq!(p.kind(), RunKind::OneRun);
        assert_eq!(p.series(), q.series());
    }

    #[test]
    fn one_pair_involution() {
        let half = rat(1, 2);
        let p = RunSeq::one_runs(USeries::from_fn(3, |n| {
            if n == 0 {
                int(1)
            } else {
                rpow(&half, n + 1)
            }
        }))
        .unwrap();
        let q = involution(&p).unwrap();
        assert_eq!(
            q.series().coeffs(),
            &[int(1), rat(3, 4), rat(5, 8), rat(1, 2)]
        );
    }

    #[test]
    fn involution_rejects_unrealizable() {
        // p = 1, 1, 1, 0, ...: forces X_1 = X_2 = 1 surely but P(111) = 0.
        let p = RunSeq::one_runs(USeries::from_ints(&[1, 1, 1, 0, 0])).unwrap();
        assert!(matches!(involution(&p), Err(Error::NotOneDependent { .. })));
    }

    #[test]
    fn shifted_involution_examples() {
        let exp = USeries::from_fn(8, |n| rat(1, factorial(n)));
        assert_eq!(shifted_involution(&exp).unwrap(), exp);
        assert_eq!(
            shifted_involution(&USeries::one(5)).unwrap(),
            USeries::one(5)
        );

        // (1 + v/b)^b for b = 3, and (1 - v/b)^{-b} = sum C(b+j-1, j) / b^j v^j
        let b = 3i64;
        let poly = USeries::new(vec![int(1), int(1), rat(1, 3), rat(1, 27), int(0), int(0)]);
        let expected = USeries::from_fn(5, |j| {
            let j = j as i64;
            let binom: i64 = (1..=j).map(|i| b - 1 + i).product::<i64>() / (1..=j).product::<i64>();
            rat(binom, b.pow(j as u32))
        });
        assert_eq!(shifted_involution(&poly).unwrap(), expected);
    }

    #[test]
    fn shifted_involution_agrees_with_involution() {
        let q = eulerian_runs(RunKind::ZeroRun, 9);
        let via_shift = unshift(&shifted_involution(&shift(q.series())).unwrap()).unwrap();
        assert_eq!(&via_shift, involution(&q).unwrap().series());
    }

    #[test]
    fn dual_reverses_rows() {
        let zeros = bgf_from_zero_runs(&all_zeros(5)).unwrap();
        let ones = bgf_from_zero_runs(&all_ones(5)).unwrap();
        assert_eq!(dual_bgf(&zeros).unwrap(), ones);
        assert_eq!(dual_bgf(&dual_bgf(&zeros).unwrap()).unwrap(), zeros);
        let eulerian = bgf_from_zero_runs(&eulerian_runs(RunKind::ZeroRun, 5)).unwrap();
        assert_eq!(dual_bgf(&eulerian).unwrap(), eulerian);
    }

    #[test]
    fn dual_rejects_degree_overflow() {
        let bad = BSeries::from_rows(vec![ZPoly::z()]);
        assert!(matches!(dual_bgf(&bad), Err(Error::Usage(_))));
    }

    #[test]
    fn recursion_small_cases() {
        let q = RunSeq::zero_runs(USeries::new(vec![int(1), rat(2, 5), rat(1, 5)])).unwrap();
        assert_eq!(pgf_by_recursion(&q, 0).unwrap(), ZPoly::one());
        let expected = &ZPoly::one_minus_z().scale(&rat(2, 5)) + &ZPoly::z();
        assert_eq!(pgf_by_recursion(&q, 1).unwrap(), expected);

        let e = eulerian_runs(RunKind::ZeroRun, 4);
        assert_eq!(
            pgf_by_recursion(&e, 2).unwrap(),
            ZPoly::new(vec![rat(1, 6), rat(2, 3), rat(1, 6)])
        );
        let bgf = bgf_from_zero_runs(&e).unwrap();
        for n in 0..=4 {
            assert_eq!(&pgf_by_recursion(&e, n).unwrap(), bgf.row(n));
        }
        assert!(pgf_by_recursion(&e, 5).is_err());
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let p = eulerian_runs(RunKind::OneRun, 3);
        assert!(matches!(bgf_from_zero_runs(&p), Err(Error::Validation(_))));
        assert!(matches!(bgf_renewal(&p), Err(Error::Validation(_))));
    }

    #[test]
    fn iid_under_every_transform() {
        let p = rat(2, 7);
        let q = RunSeq::zero_runs(USeries::geometric(&(Rational::one() - &p), 12)).unwrap();
        let transforms = [
            bgf_from_zero_runs(&q).unwrap(),
            bgf_exchangeable(&q).unwrap(),
            bgf_renewal(&q).unwrap(),
            bgf_stationary_renewal(&q).unwrap(),
        ];
        for bgf in &transforms {
            for n in 0..=bgf.order() {
                assert_eq!(bgf.row(n), &binomial_row(&p, n), "row {n}");
            }
        }
        assert_eq!(transforms[3].order(), 11);
    }

    #[test]
    fn comparison_transforms_on_degenerate_sequences() {
        for bgf in [
            bgf_exchangeable(&all_zeros(5)).unwrap(),
            bgf_renewal(&all_zeros(5)).unwrap(),
        ] {
            for n in 0..=5 {
                assert_eq!(bgf.row(n), &ZPoly::one());
            }
        }
        let ones = bgf_exchangeable(&all_ones(5)).unwrap();
        for n in 0..=5 {
            assert_eq!(ones.row(n), &ZPoly::monomial(int(1), n));
        }
        let ones = bgf_stationary_renewal(&all_ones(5)).unwrap();
        for n in 0..=4 {
            assert_eq!(ones.row(n), &ZPoly::monomial(int(1), n));
        }
        // all-zeros is 0/0 under the stationary-renewal formula
        assert_eq!(
            bgf_stationary_renewal(&all_zeros(5)),
            Err(Error::NonInvertibleSeries)
        );
    }

    #[test]
    fn renewal_differs_from_one_dependent_for_one_pair() {
        let q = RunSeq::zero_runs(USeries::new(vec![
            int(1),
            rat(3, 4),
            rat(5, 8),
            rat(1, 2),
            rat(13, 32),
        ]))
        .unwrap();
        let onedep = bgf_from_zero_runs(&q).unwrap();
        let renewal = bgf_renewal(&q).unwrap();
        let stationary = bgf_stationary_renewal(&q).unwrap();
        assert_ne!(onedep.row(2), renewal.row(2));
        for n in 0..=stationary.order() {
            assert_eq!(onedep.row(n), stationary.row(n));
        }
    }
}
