//! Reference computations that the generating-function code is checked
//! against. Nothing in here goes through [`crate::transforms`]: agreement
//! between an oracle and a transform is evidence, not circularity.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumerate::PairSet;
use crate::error::{Error, Result};
use crate::models::{sample_path_with, ModelSpec};
use crate::series::{int, Rational, ZPoly};

/// Exact law of `S_n` on `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    probs: Vec<Rational>,
}

impl Distribution {
    /// Checks that the entries are non-negative and sum to exactly 1.
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InternalInconsistency("empty distribution".into()));
        }
        if let Some((k, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::InternalInconsistency(format!(
                "P(S = {k}) = {p} is negative"
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InternalInconsistency(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Distribution { probs })
    }

    /// Reads a pgf of degree at most `n`.
    pub fn from_pgf(n: usize, pgf: &ZPoly) -> Result<Self> {
        if pgf.degree().is_some_and(|d| d > n) {
            return Err(Error::InternalInconsistency(format!(
                "pgf degree exceeds {n}"
            )));
        }
        Distribution::new(pgf.padded(n + 1))
    }

    pub fn n(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, k: usize) -> Rational {
        self.probs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_pgf(&self) -> ZPoly {
        ZPoly::new(self.probs.clone())
    }
}

/// Largest `n` accepted by [`descent_distribution_bruteforce`].
pub const DESCENT_MAX: usize = 8;

/// Descent count of a uniform permutation of `n + 1` elements, by listing
/// all `(n+1)!` permutations.
pub fn descent_distribution_bruteforce(n: usize) -> Result<Distribution> {
    if n > DESCENT_MAX {
        return Err(Error::DepthExceeded {
            requested: n,
            limit: DESCENT_MAX,
        });
    }
    let mut counts = vec![0i64; n + 1];
    let mut total = 0i64;
    for perm in (0..=n).permutations(n + 1) {
        counts[perm.windows(2).filter(|w| w[0] > w[1]).count()] += 1;
        total += 1;
    }
    Distribution::new(
        counts
            .into_iter()
            .map(|c| Rational::new(c.into(), total.into()))
            .collect(),
    )
}

/// Law of `S_n` for the 2-block factor `X_i = 1((Y_i, Y_{i+1}) in B)` over
/// an i.i.d. background with the given symbol weights. Dynamic programming
/// over (last symbol, count so far).
pub fn transfer_matrix_distribution(
    ps: &PairSet,
    weights: &[Rational],
    n: usize,
) -> Result<Distribution> {
    let m = ps.alphabet();
    if weights.len() != m {
        return Err(Error::usage(format!(
            "expected {m} symbol weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(Signed::is_negative) || !weights.iter().sum::<Rational>().is_one() {
        return Err(Error::usage(
            "symbol weights must be non-negative and sum to 1",
        ));
    }
    // state[y][k] = P(Y_i = y, S_{i-1} = k)
    let mut state: Vec<Vec<Rational>> = weights.iter().map(|w| vec![w.clone()]).collect();
    for step in 1..=n {
        let mut next = vec![vec![Rational::zero(); step + 1]; m];
        for (x, row) in state.iter().enumerate() {
            for (k, mass) in row.iter().enumerate() {
                if mass.is_zero() {
                    continue;
                }
                for (y, w) in weights.iter().enumerate() {
                    let hit = usize::from(ps.contains(x, y));
                    next[y][k + hit] += mass * w;
                }
            }
        }
        state = next;
    }
    let mut probs = vec![Rational::zero(); n + 1];
    for row in &state {
        for (k, mass) in row.iter().enumerate() {
            probs[k] += mass;
        }
    }
    Distribution::new(probs)
}

/// Zero-run and one-run probabilities `(q, p)` of the same 2-block factor,
/// up to `order`, by propagating the mass of "every pair so far lies in
/// B" (respectively "none does") over the last symbol.
pub fn transfer_matrix_runs(
    ps: &PairSet,
    weights: &[Rational],
    order: usize,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let m = ps.alphabet();
    if weights.len() != m {
        return Err(Error::usage(format!(
            "expected {m} symbol weights, got {}",
            weights.len()
        )));
    }
    let runs = |inside: bool| {
        let mut mass: Vec<Rational> = weights.to_vec();
        let mut out = vec![mass.iter().sum::<Rational>()];
        for _ in 1..=order {
            let mut next = vec![Rational::zero(); m];
            for (x, mx) in mass.iter().enumerate() {
                for (y, w) in weights.iter().enumerate() {
                    if ps.contains(x, y) == inside {
                        next[y] += mx * w;
                    }
                }
            }
            mass = next;
            out.push(mass.iter().sum());
        }
        out
    };
    Ok((runs(false), runs(true)))
}

/// Largest `n` accepted by [`flipping_exact`].
pub const FLIPPING_MAX_DEPTH: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlippingLaw {
    pub distribution: Distribution,
    /// `q_0 ..= q_n`.
    pub zero_runs: Vec<Rational>,
}

/// Exact law of `S_n` for the edge-flipping process
/// `X_i = W_i if U_i > U_{i-1} else W_{i-1}`.
///
/// Only the relative order of `U_0..U_n` matters, and through it only the
/// up/down pattern. Orderings are grouped by pattern (counted exactly with
/// the standard last-element-rank recursion); within a pattern each `X_i`
/// copies a fixed `W_j`, so `S_n = sum_j c_j W_j` with `c_j` in `{0, 1, 2}`.
pub fn flipping_exact(p: &Rational, n: usize) -> Result<FlippingLaw> {
    if n > FLIPPING_MAX_DEPTH {
        return Err(Error::DepthExceeded {
            requested: n,
            limit: FLIPPING_MAX_DEPTH,
        });
    }
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::usage(format!(
            "flipping parameter {p} is outside [0, 1]"
        )));
    }
    let zero_runs = (0..=n)
        .map(|j| flipping_pgf(p, j).map(|pgf| pgf.coeff(0)))
        .collect::<Result<Vec<_>>>()?;
    let distribution = Distribution::from_pgf(n, &flipping_pgf(p, n)?)?;
    Ok(FlippingLaw {
        distribution,
        zero_runs,
    })
}

fn flipping_pgf(p: &Rational, n: usize) -> Result<ZPoly> {
    let q = Rational::one() - p;
    let mut total = ZPoly::zero();
    for pattern in 0u32..(1u32 << n) {
        // bit i-1 set: U_i > U_{i-1}
        let up = |i: usize| pattern & (1 << (i - 1)) != 0;
        let count = count_with_pattern(n, &up);
        if count == 0 {
            continue;
        }
        let mut pgf = ZPoly::one();
        for j in 0..=n {
            let c = usize::from(j >= 1 && up(j)) + usize::from(j < n && !up(j + 1));
            if c > 0 {
                let mut factor = vec![Rational::zero(); c + 1];
                factor[0] = q.clone();
                factor[c] += p;
                pgf = &pgf * &ZPoly::new(factor);
            }
        }
        total = &total + &pgf.scale(&Rational::from_integer(BigInt::from(count)));
    }
    let orderings: u128 = (1..=(n as u128 + 1)).product();
    Ok(total.scale(&Rational::new(BigInt::one(), BigInt::from(orderings))))
}

/// Number of orderings of `U_0..U_n` with the given up/down pattern.
fn count_with_pattern(n: usize, up: &impl Fn(usize) -> bool) -> u128 {
    // ranks[r] = number of arrangements of U_0..U_i whose last element has
    // relative rank r among them
    let mut ranks: Vec<u128> = vec![1];
    for i in 1..=n {
        let mut next = vec![0u128; i + 1];
        if up(i) {
            let mut acc = 0;
            for (r, slot) in next.iter_mut().enumerate() {
                *slot = acc;
                if r < ranks.len() {
                    acc += ranks[r];
                }
            }
        } else {
            let mut acc = 0;
            for r in (0..=i).rev() {
                if r < ranks.len() {
                    acc += ranks[r];
                }
                next[r] = acc;
            }
        }
        ranks = next;
    }
    ranks.iter().sum()
}

/// Empirical law of `S_n` from seeded Monte Carlo.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Empirical {
    pub trials: u64,
    pub counts: Vec<u64>,
}

impl Empirical {
    pub fn freq(&self, k: usize) -> f64 {
        self.counts[k] as f64 / self.trials as f64
    }

    /// `sqrt(f (1 - f) / T)` from the observed frequency.
    pub fn std_error(&self, k: usize) -> f64 {
        let f = self.freq(k);
        (f * (1.0 - f) / self.trials as f64).sqrt()
    }

    /// Bins whose frequency sits more than `sigmas` binomial standard errors
    /// (taken at the exact probability) from `exact`, as `(k, z-score)`.
    pub fn outliers(&self, exact: &Distribution, sigmas: f64) -> Vec<(usize, f64)> {
        (0..self.counts.len())
            .filter_map(|k| {
                let p = exact.prob(k).to_f64().unwrap_or(f64::NAN);
                let diff = (self.freq(k) - p).abs();
                let se = (p * (1.0 - p) / self.trials as f64).sqrt();
                let z = if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                (z > sigmas).then_some((k, z))
            })
            .collect()
    }
}

pub fn monte_carlo_distribution(
    m: &ModelSpec,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<Empirical> {
    if trials == 0 {
        return Err(Error::EmptyTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; n + 1];
    for _ in 0..trials {
        counts[sample_path_with(m, n, &mut rng)?.count()] += 1;
    }
    Ok(Empirical { trials, counts })
}

/// Limit on `m^n` for [`pattern_count_bruteforce`].
pub const BRUTEFORCE_MAX_STRINGS: u64 = 10_000_000;

/// `f(n, k)` for `k = 0..n-1` by listing all `m^n` strings.
pub fn pattern_count_bruteforce(ps: &PairSet, n: usize) -> Result<Vec<u64>> {
    let m = ps.alphabet() as u64;
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| m.checked_pow(e))
        .filter(|&t| t <= BRUTEFORCE_MAX_STRINGS)
        .ok_or(Error::DepthExceeded {
            requested: n,
            limit: BRUTEFORCE_MAX_STRINGS as usize,
        })?;
    let mut out = vec![0u64; n.max(1)];
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        let k = digits
            .windows(2)
            .filter(|w| ps.contains(w[0], w[1]))
            .count();
        out[k] += 1;
        // odometer increment
        for d in digits.iter_mut() {
            *d += 1;
            if *d < m as usize {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Binomial law of `S_n` for i.i.d. Bernoulli(`p`) trials.
pub fn binomial_distribution(p: &Rational, n: usize) -> Distribution {
    let step = ZPoly::new(vec![int(1) - p, p.clone()]);
    Distribution::from_pgf(n, &step.pow(n)).expect("binomial law is a distribution")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn dist(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    /// Literal enumeration over orderings of U and values of W.
    fn flipping_literal(p: &Rational, n: usize) -> Vec<Rational> {
        let mut probs = vec![Rational::zero(); n + 1];
        let q = int(1) - p;
        let perms: Vec<Vec<usize>> = (0..=n).permutations(n + 1).collect();
        let weight = rat(1, perms.len() as i64);
        for u in &perms {
            for w in 0u32..(1 << (n + 1)) {
                let bit = |j: usize| (w >> j) & 1 == 1;
                let ones = (0..=n).filter(|&j| bit(j)).count();
                let mut pw = weight.clone();
                for _ in 0..ones {
                    pw *= p;
                }
                for _ in 0..(n + 1 - ones) {
                    pw *= &q;
                }
                let s = (1..=n)
                    .filter(|&i| if u[i] > u[i - 1] { bit(i) } else { bit(i - 1) })
                    .count();
                probs[s] += pw;
            }
        }
        probs
    }

    #[test]
    fn descents_small() {
        assert_eq!(
            descent_distribution_bruteforce(1).unwrap().probs(),
            dist(&[(1, 2), (1, 2)])
        );
        assert_eq!(
            descent_distribution_bruteforce(2).unwrap().probs(),
            dist(&[(1, 6), (4, 6), (1, 6)])
        );
        assert_eq!(
            descent_distribution_bruteforce(3).unwrap().probs(),
            dist(&[(1, 24), (11, 24), (11, 24), (1, 24)])
        );
        assert!(matches!(
            descent_distribution_bruteforce(9),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn transfer_matrix_one_pair() {
        let ps = PairSet::new(2, [(1, 1)]).unwrap();
        let w = vec![rat(1, 2), rat(1, 2)];
        let d = transfer_matrix_distribution(&ps, &w, 2).unwrap();
        assert_eq!(d.probs(), dist(&[(5, 8), (2, 8), (1, 8)]));
        assert!(transfer_matrix_distribution(&ps, &[rat(1, 2)], 2).is_err());
        assert!(transfer_matrix_distribution(&ps, &[rat(1, 2), rat(1, 3)], 2).is_err());
    }

    #[test]
    fn transfer_matrix_iid_is_binomial() {
        let p = rat(2, 9);
        let ps = PairSet::new(2, [(1, 0), (1, 1)]).unwrap();
        let d = transfer_matrix_distribution(&ps, &[int(1) - &p, p.clone()], 6).unwrap();
        assert_eq!(d, binomial_distribution(&p, 6));
    }

    #[test]
    fn run_probabilities_match_distribution_ends() {
        let ps = PairSet::new(3, [(0, 1), (1, 1), (2, 0)]).unwrap();
        let w = vec![rat(1, 2), rat(1, 3), rat(1, 6)];
        let (q, p) = transfer_matrix_runs(&ps, &w, 6).unwrap();
        for n in 0..=6 {
            let d = transfer_matrix_distribution(&ps, &w, n).unwrap();
            assert_eq!(d.prob(0), q[n]);
            assert_eq!(d.prob(n), p[n]);
        }
    }

    #[test]
    fn flipping_examples() {
        let p = rat(1, 3);
        let law = flipping_exact(&p, 1).unwrap();
        assert_eq!(law.distribution.prob(1), p);
        let law = flipping_exact(&rat(1, 2), 2).unwrap();
        assert_eq!(law.zero_runs[2], rat(1, 3));
        let law = flipping_exact(&int(1), 2).unwrap();
        assert_eq!(law.distribution.prob(2), int(1));
        assert!(matches!(
            flipping_exact(&p, FLIPPING_MAX_DEPTH + 1),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn flipping_two_step_formula() {
        // q_2 = (4 (1-p)^2 + 2 (1-p)) / 6
        for p in [rat(1, 5), rat(1, 2), rat(5, 7)] {
            let q = int(1) - &p;
            let expected = (int(4) * &q * &q + int(2) * &q) / int(6);
            assert_eq!(flipping_exact(&p, 2).unwrap().zero_runs[2], expected);
        }
    }

    #[test]
    fn flipping_grouping_matches_literal_enumeration() {
        let p = rat(2, 7);
        for n in 0..=5 {
            assert_eq!(
                flipping_exact(&p, n).unwrap().distribution.probs(),
                flipping_literal(&p, n).as_slice(),
                "n {n}"
            );
        }
    }

    #[test]
    fn pattern_counts_by_brute_force() {
        let ps = PairSet::new(2, [(1, 1)]).unwrap();
        assert_eq!(pattern_count_bruteforce(&ps, 3).unwrap(), vec![5, 2, 1]);
        let ps = PairSet::new(4, [(0, 1)]).unwrap();
        assert_eq!(pattern_count_bruteforce(&ps, 2).unwrap(), vec![15, 1]);
        assert_eq!(pattern_count_bruteforce(&ps, 1).unwrap(), vec![4]);
        assert!(matches!(
            pattern_count_bruteforce(&ps, 20),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn monte_carlo_basics() {
        let m = ModelSpec::Iid { p: rat(1, 2) };
        assert_eq!(
            monte_carlo_distribution(&m, 4, 0, 1),
            Err(Error::EmptyTrials)
        );
        let a = monte_carlo_distribution(&m, 4, 1000, 9).unwrap();
        let b = monte_carlo_distribution(&m, 4, 1000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), 1000);
        let nb = ModelSpec::NonTwoBlock {
            alpha: rat(1, 4),
            beta: int(0),
        };
        assert!(matches!(
            monte_carlo_distribution(&nb, 4, 10, 1),
            Err(Error::SamplerUnavailable(_))
        ));
    }

    #[test]
    fn distribution_rejects_bad_mass() {
        assert!(Distribution::new(vec![rat(1, 2)]).is_err());
        assert!(Distribution::new(vec![rat(3, 2), rat(-1, 2)]).is_err());
    }
}
