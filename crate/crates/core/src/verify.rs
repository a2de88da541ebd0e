//! Self-verification suites. Each suite runs a family of exact (or, for the
//! samplers, statistical) cross-checks and reports one line per check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detpp::{
    kernel_direct, kernel_from_one_runs, kernel_series, pgf_determinant, pgf_fredholm,
    string_probability, zero_sets, ExtendedOneRuns,
};
use crate::enumerate::{bstring_counts, bstring_gf, florez_count, pattern_count_table, PairSet};
use crate::error::{Error, Result};
use crate::models::{one_runs, zero_runs, ModelSpec};
use crate::oracles::{
    binomial_distribution, descent_distribution_bruteforce, flipping_exact,
    monte_carlo_distribution, pattern_count_bruteforce, transfer_matrix_distribution,
    transfer_matrix_runs, Distribution,
};
use crate::series::{int, rat, shift, unshift, BSeries, Rational, RunSeq, USeries};
use crate::transforms::{
    bgf_exchangeable, bgf_from_one_runs, bgf_from_zero_runs, bgf_renewal, bgf_stationary_renewal,
    involution, pgf_by_recursion, shifted_involution,
};

/// Default truncation order for series checks.
pub const DEFAULT_ORDER: usize = 20;
/// Tolerance for sampler checks, in binomial standard errors per bin.
pub const SIGMAS: f64 = 4.0;
/// Trials per Monte Carlo comparison.
pub const TRIALS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Eulerian,
    TwoForm,
    Involution,
    Recursion,
    Determinant,
    OnePair,
    Enumeration,
    Dependence,
    Flipping,
    Sampler,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Eulerian,
        Suite::TwoForm,
        Suite::Involution,
        Suite::Recursion,
        Suite::Determinant,
        Suite::OnePair,
        Suite::Enumeration,
        Suite::Dependence,
        Suite::Flipping,
        Suite::Sampler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eulerian => "eulerian",
            Suite::TwoForm => "two-form",
            Suite::Involution => "involution",
            Suite::Recursion => "recursion",
            Suite::Determinant => "determinant",
            Suite::OnePair => "one-pair",
            Suite::Enumeration => "enumeration",
            Suite::Dependence => "dependence",
            Suite::Flipping => "flipping",
            Suite::Sampler => "sampler",
        }
    }

    pub fn run(self, seed: u64) -> Report {
        let mut r = Report::new(self);
        match self {
            Suite::Eulerian => eulerian(&mut r),
            Suite::TwoForm => two_form(&mut r),
            Suite::Involution => involution_suite(&mut r, seed),
            Suite::Recursion => recursion(&mut r),
            Suite::Determinant => determinant_suite(&mut r),
            Suite::OnePair => one_pair(&mut r),
            Suite::Enumeration => enumeration(&mut r, seed),
            Suite::Dependence => dependence(&mut r),
            Suite::Flipping => flipping(&mut r, seed),
            Suite::Sampler => sampler(&mut r, seed),
        }
        r
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Report {
            suite,
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            detail,
        });
    }

    /// Runs a check body; library errors count as failures.
    fn check(&mut self, name: impl Into<String>, body: impl FnOnce() -> Result<Outcome>) {
        let outcome = match body() {
            Ok(o) => o,
            Err(e) => Err(format!("error: {e}")),
        };
        self.push(name, outcome);
    }
}

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, ok: impl Into<String>, fail: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail())
    }
}

/// One model of each family, at the parameters the suites use.
pub fn reference_models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Eulerian,
        ModelSpec::Iid { p: rat(1, 3) },
        ModelSpec::OnePair { p: rat(1, 2) },
        ModelSpec::Carries { b: 10 },
        ModelSpec::Flipping { p: rat(1, 3) },
        ModelSpec::NonTwoBlock {
            alpha: rat(1, 4),
            beta: rat(1, 32),
        },
    ]
}

/// Requested order, capped at the model's exact-enumeration depth.
pub fn model_order(m: &ModelSpec, order: usize) -> usize {
    m.exact_depth().map_or(order, |d| d.min(order))
}

fn first_row_mismatch(a: &BSeries, b: &BSeries, upto: usize) -> Option<usize> {
    (0..=upto).find(|&n| a.row(n) != b.row(n))
}

fn bgf_rows_are_laws(bgf: &BSeries) -> Option<usize> {
    (0..=bgf.order()).find(|&n| {
        let row = bgf.row(n);
        !row.eval(&int(1)).is_one() || row.degree().is_some_and(|d| d > n)
    })
}

// ---------------------------------------------------------------------------

fn eulerian(r: &mut Report) {
    r.check("bgf-vs-permutations", || {
        let bgf = bgf_from_zero_runs(&zero_runs(&ModelSpec::Eulerian, 7)?)?;
        for n in 0..=7 {
            let brute = descent_distribution_bruteforce(n)?;
            if bgf.row(n) != &brute.to_pgf() {
                return Ok(Err(format!(
                    "row {n}: bgf {} vs brute force {}",
                    bgf.row(n),
                    brute.to_pgf()
                )));
            }
        }
        let fact: i64 = (1..=8).product();
        let numbers: Vec<String> = bgf
            .row(7)
            .padded(8)
            .iter()
            .map(|c| (c * int(fact)).to_string())
            .collect();
        Ok(Ok(format!(
            "rows 0..=7 exact; Eulerian numbers for 8 = [{}]",
            numbers.join(", ")
        )))
    });
}

fn two_form(r: &mut Report) {
    for m in reference_models() {
        let order = model_order(&m, DEFAULT_ORDER);
        r.check(format!("{m}"), || {
            let from_q = bgf_from_zero_runs(&zero_runs(&m, order)?)?;
            let from_p = bgf_from_one_runs(&one_runs(&m, order)?)?;
            if let Some(n) = first_row_mismatch(&from_q, &from_p, order) {
                return Ok(Err(format!(
                    "row {n} differs: {} vs {}",
                    from_q.row(n),
                    from_p.row(n)
                )));
            }
            Ok(ensure(
                bgf_rows_are_laws(&from_q).is_none(),
                format!("zero-run and one-run forms agree to order {order}; rows normalized"),
                || {
                    format!(
                        "row {:?} is not a probability law",
                        bgf_rows_are_laws(&from_q)
                    )
                },
            ))
        });
    }
}

/// Random finite-alphabet 2-block factor: alphabet 2 or 3, random weights
/// and pair set.
fn random_two_block(rng: &mut impl Rng) -> (PairSet, Vec<Rational>) {
    let m = rng.gen_range(2..=3usize);
    let raw: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    let weights = raw.iter().map(|&w| rat(w, total)).collect();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|x| (0..m).map(move |y| (x, y)))
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    (
        PairSet::new(m, pairs).expect("pairs inside alphabet"),
        weights,
    )
}

fn involution_suite(r: &mut Report, seed: u64) {
    for m in reference_models() {
        let order = model_order(&m, DEFAULT_ORDER);
        r.check(format!("{m}"), || {
            let q = zero_runs(&m, order)?;
            let p = one_runs(&m, order)?;
            let twice = involution(&involution(&q)?)?;
            if twice != q {
                return Ok(Err("involution applied twice is not the identity".into()));
            }
            if involution(&q)? != p {
                return Ok(Err("involution of zero-runs differs from one-runs".into()));
            }
            let shifted = unshift(&shifted_involution(&shift(q.series()))?)?;
            Ok(ensure(
                &shifted == p.series(),
                format!("identity and shifted form hold to order {order}"),
                || "shifted involution disagrees under shift conjugation".into(),
            ))
        });
    }
    r.check("random-2-block-factors", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for case in 0..100 {
            let (ps, w) = random_two_block(&mut rng);
            let (q, p) = transfer_matrix_runs(&ps, &w, DEFAULT_ORDER)?;
            let q = RunSeq::zero_runs(USeries::new(q))?;
            let p = RunSeq::one_runs(USeries::new(p))?;
            let dual = involution(&q)?;
            let back = involution(&dual)?;
            let shifted = unshift(&shifted_involution(&shift(q.series()))?)?;
            if dual != p || back != q || &shifted != p.series() {
                return Ok(Err(format!("case {case} ({ps:?}, weights {w:?}) fails")));
            }
        }
        Ok(Ok(format!(
            "100 random run sequences (seed {seed}), order {DEFAULT_ORDER}"
        )))
    });
}

fn recursion(r: &mut Report) {
    for m in reference_models() {
        let order = model_order(&m, 15);
        r.check(format!("{m}"), || {
            let q = zero_runs(&m, order)?;
            let bgf = bgf_from_zero_runs(&q)?;
            for n in 0..=order {
                let rec = pgf_by_recursion(&q, n)?;
                if &rec != bgf.row(n) {
                    return Ok(Err(format!(
                        "n = {n}: recursion {rec} vs bgf {}",
                        bgf.row(n)
                    )));
                }
            }
            Ok(Ok(format!("recursion equals bgf rows for n <= {order}")))
        });
    }
}

fn determinant_suite(r: &mut Report) {
    for m in reference_models() {
        r.check(format!("{m}/pgf-three-routes"), || {
            let order = model_order(&m, 9);
            let n_max = order.min(8);
            let p = one_runs(&m, order)?;
            let ext = ExtendedOneRuns::new(&p)?;
            let kb = kernel_from_one_runs(&p, n_max - 1)?;
            let bgf = bgf_from_zero_runs(&zero_runs(&m, order)?)?;
            for n in 0..=n_max {
                let det = pgf_determinant(&ext, n)?;
                let fred = pgf_fredholm(&kb, n)?;
                if det != fred || &det != bgf.row(n) {
                    return Ok(Err(format!(
                        "n = {n}: det {det}, fredholm {fred}, bgf {}",
                        bgf.row(n)
                    )));
                }
            }
            Ok(Ok(format!(
                "determinant = Fredholm = bgf row for n <= {n_max}"
            )))
        });
        r.check(format!("{m}/kernel"), || {
            let order = model_order(&m, DEFAULT_ORDER);
            let p = one_runs(&m, order)?;
            let prod = &kernel_series(&p)? * p.series();
            if prod != -&USeries::one(order) {
                return Ok(Err(format!("G_k P = {prod}, expected -1/v")));
            }
            let kb = kernel_from_one_runs(&p, 5)?;
            for lag in 0..=5 {
                let direct = kernel_direct(&p, 1, 1 + lag)?;
                if direct != kb.get(lag) {
                    return Ok(Err(format!(
                        "lag {lag}: chain sum {direct} vs series {}",
                        kb.get(lag)
                    )));
                }
            }
            Ok(Ok(format!(
                "G_k P = -1/v to order {order}; chain sums match for lags <= 5"
            )))
        });
        r.check(format!("{m}/strings"), || {
            let p = one_runs(&m, 6)?;
            let ext = ExtendedOneRuns::new(&p)?;
            for n in 0..=6 {
                let mut total = Rational::zero();
                for zeros in zero_sets(n) {
                    let prob = string_probability(&ext, n, &zeros)?;
                    if prob.is_negative() {
                        return Ok(Err(format!("n = {n}, zeros {zeros:?}: probability {prob}")));
                    }
                    total += prob;
                }
                if !total.is_one() {
                    return Ok(Err(format!("n = {n}: string probabilities sum to {total}")));
                }
            }
            Ok(Ok(
                "all 2^n string probabilities nonnegative and sum to 1, n <= 6".into(),
            ))
        });
    }
}

fn fibonacci(k: usize) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}

fn one_pair(r: &mut Report) {
    for p in [rat(1, 2), rat(1, 3)] {
        r.check(format!("recursion(p={p})"), || {
            let bgf = bgf_from_zero_runs(&zero_runs(&ModelSpec::OnePair { p: p.clone() }, 15)?)?;
            let q = |n: i64, k: i64| -> Rational {
                if n < 0 || k < 0 || k > n {
                    Rational::zero()
                } else {
                    bgf.coeff(k as usize, n as usize)
                }
            };
            let one = Rational::one();
            let initial = q(0, 0).is_one() && q(1, 0) == &one - &p * &p && q(1, 1) == &p * &p;
            if !initial {
                return Ok(Err("initial values q_00, q_10, q_11 differ".into()));
            }
            for n in 2..=15i64 {
                for k in 0..=n {
                    let rhs = (&one - &p) * q(n - 1, k)
                        + &p * q(n - 1, k - 1)
                        + &p * (&one - &p) * (q(n - 2, k) - q(n - 2, k - 1));
                    if q(n, k) != rhs {
                        return Ok(Err(format!("n = {n}, k = {k}: {} vs {rhs}", q(n, k))));
                    }
                }
            }
            Ok(Ok(
                "one-pair coefficient recursion holds for 2 <= n <= 15".into()
            ))
        });
    }
    r.check("fibonacci(p=1/2)", || {
        let bgf = bgf_from_zero_runs(&zero_runs(&ModelSpec::OnePair { p: rat(1, 2) }, 15)?)?;
        for n in 0..=15usize {
            let expected = Rational::new(fibonacci(n + 3).into(), (1u64 << (n + 1)).into());
            if bgf.coeff(0, n) != expected {
                return Ok(Err(format!(
                    "q_{n},0 = {} vs F({})/2^{}",
                    bgf.coeff(0, n),
                    n + 3,
                    n + 1
                )));
            }
        }
        Ok(Ok(
            "q_{n,0} = F(n+3)/2^(n+1) with F(1) = F(2) = 1 for n <= 15 \
             (2^n q_{n,0} is not an integer: n = 1 gives 3/2)"
                .into(),
        ))
    });
}

/// Every pair set over an alphabet of `m` symbols, as bitmasks over the
/// `m * m` ordered pairs.
fn all_pair_sets(m: usize) -> impl Iterator<Item = PairSet> {
    (0u64..(1u64 << (m * m))).map(move |mask| {
        PairSet::new(
            m,
            (0..m * m)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| (b / m, b % m)),
        )
        .expect("pairs inside alphabet")
    })
}

/// All strings of length `n` over `m` symbols, grouped by how often each
/// ordered pair occurs. A pair-set count is then a sum over groups.
struct PairHistogram {
    m: usize,
    groups: Vec<(Vec<u8>, u64)>,
}

impl PairHistogram {
    fn new(m: usize, n: usize) -> Self {
        let mut map = std::collections::HashMap::<Vec<u8>, u64>::new();
        let total = m.pow(n as u32);
        let mut digits = vec![0usize; n];
        for _ in 0..total {
            let mut occ = vec![0u8; m * m];
            for w in digits.windows(2) {
                occ[w[0] * m + w[1]] += 1;
            }
            *map.entry(occ).or_default() += 1;
            for d in digits.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        let mut groups: Vec<_> = map.into_iter().collect();
        groups.sort();
        PairHistogram { m, groups }
    }

    fn counts(&self, ps: &PairSet, n: usize) -> Vec<u64> {
        let members: Vec<usize> = ps.pairs().map(|(x, y)| x * self.m + y).collect();
        let mut out = vec![0u64; n.max(1)];
        for (occ, mult) in &self.groups {
            let k: usize = members.iter().map(|&i| occ[i] as usize).sum();
            out[k] += mult;
        }
        out
    }
}

fn enumeration(r: &mut Report, seed: u64) {
    const MAX_LEN: usize = 7;
    r.check("all-pair-sets-vs-brute-force", || {
        let mut tables = 0usize;
        for m in 1..=4usize {
            let hists: Vec<PairHistogram> = (0..=MAX_LEN).map(|n| PairHistogram::new(m, n)).collect();
            for ps in all_pair_sets(m) {
                let table = pattern_count_table(&ps, MAX_LEN)?;
                for (n, hist) in hists.iter().enumerate().skip(1) {
                    let brute = hist.counts(&ps, n);
                    let row: Vec<BigUint> = brute.iter().map(|&c| BigUint::from(c)).collect();
                    if table.row(n) != row.as_slice() {
                        return Ok(Err(format!("{ps:?}, n = {n}: {:?} vs {brute:?}", table.row(n))));
                    }
                    let total: BigUint = table.row(n).iter().sum();
                    if total != BigUint::from(m).pow(n as u32) {
                        return Ok(Err(format!("{ps:?}, n = {n}: row sums to {total}")));
                    }
                }
                tables += 1;
            }
        }
        Ok(Ok(format!(
            "{tables} pair sets over alphabets 1..=4 match exhaustive enumeration for n <= {MAX_LEN}; row sums m^n"
        )))
    });
    r.check("histogram-vs-direct-enumeration", || {
        // Spot-check the grouped enumeration against the plain one.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let m = rng.gen_range(1..=4usize);
            let mask = rng.gen_range(0u64..(1u64 << (m * m)));
            let ps = all_pair_sets(m).nth(mask as usize).expect("mask in range");
            let n = rng.gen_range(1..=MAX_LEN);
            if PairHistogram::new(m, n).counts(&ps, n) != pattern_count_bruteforce(&ps, n)? {
                return Ok(Err(format!("{ps:?}, n = {n}")));
            }
        }
        Ok(Ok("20 random pair sets agree".into()))
    });
    r.check("florez", || {
        for a in 2..=4usize {
            let ps = PairSet::new(a, [(0, 1)])?;
            let table = pattern_count_table(&ps, 8)?;
            let g = bstring_gf(&bstring_counts(&ps, 6));
            let mut expected = vec![int(1), int(a as i64), int(1)];
            expected.resize(7, Rational::zero());
            if g != USeries::new(expected) {
                return Ok(Err(format!("a = {a}: G(v) = {g}, expected 1 + {a}v + v^2")));
            }
            let uniform = vec![rat(1, a as i64); a];
            let (_, p) = transfer_matrix_runs(&ps, &uniform, 3)?;
            let square = (a * a) as i64;
            if p != [int(1), rat(1, square), Rational::zero(), Rational::zero()] {
                return Ok(Err(format!("a = {a}: one runs {p:?}, expected 1, 1/{square}, 0, 0")));
            }
            for len in 1..=8usize {
                let brute = pattern_count_bruteforce(&ps, len)?;
                for (m, &b) in brute.iter().enumerate() {
                    let n = len - m;
                    let f = florez_count(a, n, m)?;
                    if f != table.get(len, m) || f != BigUint::from(b) {
                        return Ok(Err(format!(
                            "a = {a}, n = {n}, m = {m}: {f} vs {}",
                            table.get(len, m)
                        )));
                    }
                }
            }
        }
        Ok(Ok(
            "G(v) = 1 + av + v^2, p_1 = 1/a^2; closed form matches the count table and brute force, a in 2..=4, n + m <= 8".into(),
        ))
    });
    r.check("descents-vs-carries", || {
        for b in 2..=4u32 {
            let table = pattern_count_table(&PairSet::descents(b as usize)?, 8)?;
            let bgf = bgf_from_zero_runs(&zero_runs(&ModelSpec::Carries { b }, 7)?)?;
            for n in 1..=8usize {
                let scale = Rational::from_integer(BigUint::from(b).pow(n as u32).into());
                for k in 0..n {
                    let expected = bgf.coeff(k, n - 1) * &scale;
                    let got = Rational::from_integer(table.get(n, k).into());
                    if got != expected {
                        return Ok(Err(format!(
                            "b = {b}, n = {n}, k = {k}: {got} vs {expected}"
                        )));
                    }
                }
            }
        }
        Ok(Ok(
            "f(n, k) = b^n P(S_{n-1} = k) for carries, b in 2..=4, n <= 8".into(),
        ))
    });
    r.check("b-string-gf", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..5 {
            let m = rng.gen_range(1..=4usize);
            let mask = rng.gen_range(0u64..(1u64 << (m * m)));
            let ps = all_pair_sets(m).nth(mask as usize).expect("mask in range");
            let order = 8;
            let g = bstring_gf(&bstring_counts(&ps, order));
            let uniform = vec![rat(1, m as i64); m];
            // 1 + m v P(m v), with p_k from the uniform 2-block factor
            let mut expected = vec![Rational::one()];
            for k in 1..=order {
                let d = transfer_matrix_distribution(&ps, &uniform, k - 1)?;
                expected.push(d.prob(k - 1) * int(m as i64).pow(k as i32));
            }
            if g != USeries::new(expected) {
                return Ok(Err(format!("{ps:?}: G(v) = {g}")));
            }
        }
        Ok(Ok("G(v) = 1 + m v P(m v) for 5 random pair sets".into()))
    });
}

fn dependence(r: &mut Report) {
    r.check("iid-four-transforms", || {
        let p = rat(1, 3);
        let q = zero_runs(&ModelSpec::Iid { p: p.clone() }, DEFAULT_ORDER + 1)?;
        let all = [
            bgf_from_zero_runs(&q)?,
            bgf_exchangeable(&q)?,
            bgf_renewal(&q)?,
            bgf_stationary_renewal(&q)?,
        ];
        for (i, bgf) in all.iter().enumerate() {
            for n in 0..=DEFAULT_ORDER {
                if bgf.row(n) != &binomial_distribution(&p, n).to_pgf() {
                    return Ok(Err(format!("transform {i}, row {n}: {}", bgf.row(n))));
                }
            }
        }
        Ok(Ok(format!(
            "all four transforms give Binomial(n, {p}) to order {DEFAULT_ORDER}"
        )))
    });
    for m in [
        ModelSpec::OnePair { p: rat(1, 2) },
        ModelSpec::OnePair { p: rat(1, 3) },
        ModelSpec::Carries { b: 2 },
    ] {
        r.check(format!("{m}/stationary-renewal"), || {
            let q = zero_runs(&m, 16)?;
            let onedep = bgf_from_zero_runs(&q)?;
            let renewal = bgf_stationary_renewal(&q)?;
            if let Some(n) = first_row_mismatch(&onedep, &renewal, 15) {
                return Ok(Err(format!(
                    "row {n}: {} vs {}",
                    onedep.row(n),
                    renewal.row(n)
                )));
            }
            Ok(Ok(
                "1-dependent and stationary-renewal transforms agree to order 15".into(),
            ))
        });
    }
    r.check("one-pair/renewal-differs", || {
        let q = zero_runs(&ModelSpec::OnePair { p: rat(1, 2) }, 4)?;
        let onedep = bgf_from_zero_runs(&q)?;
        let renewal = bgf_renewal(&q)?;
        Ok(ensure(
            onedep.row(2) != renewal.row(2),
            format!(
                "row 2: 1-dependent {} vs renewal {}",
                onedep.row(2),
                renewal.row(2)
            ),
            || "renewal transform unexpectedly matches the stationary law".into(),
        ))
    });
}

/// Monte Carlo against an exact law, with one reseeded retry.
fn sampled_check(m: &ModelSpec, n: usize, exact: &Distribution, seed: u64) -> Result<Outcome> {
    let describe = |outliers: &[(usize, f64)]| {
        outliers
            .iter()
            .map(|(k, z)| format!("k={k} z={z:.2}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let first = monte_carlo_distribution(m, n, TRIALS, seed)?.outliers(exact, SIGMAS);
    if first.is_empty() {
        return Ok(Ok(format!("{TRIALS} trials within {SIGMAS} SE per bin")));
    }
    let retry_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let second = monte_carlo_distribution(m, n, TRIALS, retry_seed)?.outliers(exact, SIGMAS);
    if second.is_empty() {
        Ok(Ok(format!(
            "{TRIALS} trials within {SIGMAS} SE after one retry (first: {})",
            describe(&first)
        )))
    } else {
        Ok(Err(format!("outliers on retry: {}", describe(&second))))
    }
}

fn flipping(r: &mut Report, seed: u64) {
    for p in [rat(1, 3), rat(1, 2)] {
        let m = ModelSpec::Flipping { p: p.clone() };
        r.check(format!("{m}/exact-loop"), || {
            let depth = 6;
            let law = flipping_exact(&p, depth)?;
            let q = RunSeq::zero_runs(USeries::new(law.zero_runs.clone()))?;
            let from_q = bgf_from_zero_runs(&q)?;
            let from_p = bgf_from_one_runs(&involution(&q)?)?;
            for n in 0..=depth {
                let exact = flipping_exact(&p, n)?.distribution.to_pgf();
                if from_q.row(n) != &exact || from_p.row(n) != &exact {
                    return Ok(Err(format!("n = {n}: enumeration {exact}, bgf {}", from_q.row(n))));
                }
            }
            Ok(Ok(format!("enumerated zero-runs through both bgf forms reproduce the enumerated law, n <= {depth}")))
        });
    }
    let m = ModelSpec::Flipping { p: rat(1, 3) };
    for (i, n) in [5usize, 6].into_iter().enumerate() {
        r.check(format!("{m}/monte-carlo(n={n})"), || {
            let exact = flipping_exact(&rat(1, 3), n)?.distribution;
            sampled_check(&m, n, &exact, seed.wrapping_add(i as u64))
        });
    }
}

fn sampler(r: &mut Report, seed: u64) {
    let models = [
        ModelSpec::Eulerian,
        ModelSpec::Iid { p: rat(1, 3) },
        ModelSpec::OnePair { p: rat(1, 2) },
        ModelSpec::Carries { b: 10 },
        ModelSpec::Flipping { p: rat(1, 3) },
    ];
    for (mi, m) in models.iter().enumerate() {
        for (ni, n) in [3usize, 5, 8].into_iter().enumerate() {
            r.check(format!("{m}/n={n}"), || {
                let bgf = bgf_from_zero_runs(&zero_runs(m, n)?)?;
                let exact = Distribution::from_pgf(n, bgf.row(n))?;
                sampled_check(
                    m,
                    n,
                    &exact,
                    seed.wrapping_add((mi * 10 + ni) as u64 * 7919),
                )
            });
        }
    }
}

/// Runs every suite in order.
pub fn run_all(seed: u64) -> Vec<Report> {
    Suite::ALL.iter().map(|s| s.run(seed)).collect()
}
