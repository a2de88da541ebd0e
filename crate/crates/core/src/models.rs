//! The model zoo: exact run probabilities and path samplers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detpp::{first_negative_string, ExtendedOneRuns};
use crate::enumerate::PairSet;
use crate::error::{Error, Result};
use crate::oracles::flipping_exact;
use crate::series::{int, rpow, BSeries, Rational, RunSeq, USeries};
use crate::transforms::{bgf_from_zero_runs, involution};

/// Longest run sequence available for the flipping model, which has no
/// closed form here and is computed by exact enumeration.
pub const FLIPPING_EXACT_DEPTH: usize = 8;

/// String length up to which a non-2-block-factor parameter pair is checked
/// for nonnegative string probabilities before use.
pub const NON2BF_CHECK_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    /// Descents `1(Y_k > Y_{k+1})` of i.i.d. continuous variables.
    Eulerian,
    /// Independent Bernoulli(`p`) trials.
    Iid { p: Rational },
    /// `1(Y_k = Y_{k+1} = 1)` over Bernoulli(`p`) background.
    OnePair { p: Rational },
    /// `1(Y_k > Y_{k+1})` over uniform digits `0..b`.
    Carries { b: u32 },
    /// Edge flipping on the integer line with update probability `p`.
    Flipping { p: Rational },
    /// Three ones in a row are forbidden: `p_1 = alpha`, `p_2 = beta`,
    /// `p_n = 0` for `n >= 3`.
    NonTwoBlock { alpha: Rational, beta: Rational },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Eulerian => "eulerian",
            ModelSpec::Iid { .. } => "iid",
            ModelSpec::OnePair { .. } => "one-pair",
            ModelSpec::Carries { .. } => "carries",
            ModelSpec::Flipping { .. } => "flipping",
            ModelSpec::NonTwoBlock { .. } => "non-2bf",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |p: &Rational| !p.is_negative() && *p <= Rational::one();
        match self {
            ModelSpec::Eulerian => Ok(()),
            ModelSpec::Iid { p } | ModelSpec::OnePair { p } if !unit(p) => {
                Err(Error::InvalidModel(format!("p = {p} must lie in [0, 1]")))
            }
            ModelSpec::Iid { .. } | ModelSpec::OnePair { .. } => Ok(()),
            ModelSpec::Carries { b } if *b < 2 => Err(Error::InvalidModel(format!(
                "carries base b = {b} must be at least 2"
            ))),
            ModelSpec::Carries { .. } => Ok(()),
            ModelSpec::Flipping { p } if !p.is_positive() || *p >= Rational::one() => Err(
                Error::InvalidModel(format!("flipping p = {p} must lie in (0, 1)")),
            ),
            ModelSpec::Flipping { .. } => Ok(()),
            ModelSpec::NonTwoBlock { alpha, beta } => {
                match validate_non2bf(alpha, beta, NON2BF_CHECK_DEPTH) {
                    Non2bfCheck::Valid => Ok(()),
                    Non2bfCheck::Invalid {
                        n,
                        zeros,
                        determinant,
                    } => Err(Error::InvalidModel(format!(
                        "alpha = {alpha}, beta = {beta} gives probability {determinant} \
                             to the length-{n} string with zeros at {zeros:?}"
                    ))),
                }
            }
        }
    }

    pub fn has_sampler(&self) -> bool {
        !matches!(self, ModelSpec::NonTwoBlock { .. })
    }

    /// Longest available run sequence, when the model has a limit.
    pub fn exact_depth(&self) -> Option<usize> {
        match self {
            ModelSpec::Flipping { .. } => Some(FLIPPING_EXACT_DEPTH),
            _ => None,
        }
    }

    /// Finite-alphabet 2-block-factor form `(B, symbol weights)`, for the
    /// models that have one.
    pub fn two_block_factor(&self) -> Option<(PairSet, Vec<Rational>)> {
        let coin = |p: &Rational| vec![Rational::one() - p, p.clone()];
        match self {
            ModelSpec::Iid { p } => Some((PairSet::new(2, [(1, 0), (1, 1)]).ok()?, coin(p))),
            ModelSpec::OnePair { p } => Some((PairSet::new(2, [(1, 1)]).ok()?, coin(p))),
            ModelSpec::Carries { b } => {
                let b = *b as usize;
                let w = Rational::new(BigInt::one(), BigInt::from(b));
                Some((PairSet::descents(b).ok()?, vec![w; b]))
            }
            _ => None,
        }
    }

    fn check_depth(&self, order: usize) -> Result<()> {
        match self.exact_depth() {
            Some(limit) if order > limit => Err(Error::DepthExceeded {
                requested: order,
                limit,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Eulerian => write!(f, "eulerian"),
            ModelSpec::Iid { p } => write!(f, "iid(p={p})"),
            ModelSpec::OnePair { p } => write!(f, "one-pair(p={p})"),
            ModelSpec::Carries { b } => write!(f, "carries(b={b})"),
            ModelSpec::Flipping { p } => write!(f, "flipping(p={p})"),
            ModelSpec::NonTwoBlock { alpha, beta } => {
                write!(f, "non-2bf(alpha={alpha}, beta={beta})")
            }
        }
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

fn factorial_recip(order: usize) -> USeries {
    let mut f = int(1);
    USeries::from_fn(order, |n| {
        f /= int(n as i64 + 1);
        f.clone()
    })
}

/// `q_0 ..= q_order`.
pub fn zero_runs(m: &ModelSpec, order: usize) -> Result<RunSeq> {
    m.validate()?;
    m.check_depth(order)?;
    let series = match m {
        ModelSpec::Eulerian => factorial_recip(order),
        ModelSpec::Iid { p } => USeries::geometric(&(Rational::one() - p), order),
        ModelSpec::Carries { b } => {
            let b = u64::from(*b);
            USeries::from_fn(order, |n| {
                let n = n as u64;
                let den = BigInt::from(b).pow(n as u32 + 1);
                Rational::new(binomial(b + n, n + 1), den)
            })
        }
        ModelSpec::Flipping { p } => USeries::new(flipping_exact(p, order)?.zero_runs),
        ModelSpec::OnePair { .. } | ModelSpec::NonTwoBlock { .. } => {
            return involution(&one_runs(m, order)?);
        }
    };
    RunSeq::zero_runs(series)
}

/// `p_0 ..= p_order`.
pub fn one_runs(m: &ModelSpec, order: usize) -> Result<RunSeq> {
    m.validate()?;
    m.check_depth(order)?;
    let series = match m {
        ModelSpec::Eulerian => factorial_recip(order),
        ModelSpec::Iid { p } => USeries::geometric(p, order),
        ModelSpec::OnePair { p } => {
            USeries::from_fn(order, |n| if n == 0 { int(1) } else { rpow(p, n + 1) })
        }
        ModelSpec::Carries { b } => {
            let b = u64::from(*b);
            USeries::from_fn(order, |n| {
                let n = n as u64;
                let den = BigInt::from(b).pow(n as u32 + 1);
                Rational::new(binomial(b, n + 1), den)
            })
        }
        ModelSpec::Flipping { p } => {
            let mut out = vec![int(1)];
            for n in 1..=order {
                out.push(flipping_exact(p, n)?.distribution.prob(n));
            }
            USeries::new(out)
        }
        ModelSpec::NonTwoBlock { alpha, beta } => USeries::from_fn(order, |n| match n {
            0 => int(1),
            1 => alpha.clone(),
            2 => beta.clone(),
            _ => Rational::zero(),
        }),
    };
    RunSeq::one_runs(series)
}

/// Count generating function of the model, through the zero-run route.
pub fn bgf(m: &ModelSpec, order: usize) -> Result<BSeries> {
    bgf_from_zero_runs(&zero_runs(m, order)?)
}

/// Outcome of [`validate_non2bf`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Non2bfCheck {
    Valid,
    /// First string (by length, then zero-set bitmask) with negative
    /// probability.
    Invalid {
        n: usize,
        zeros: Vec<usize>,
        determinant: Rational,
    },
}

/// Checks that every string probability up to length `depth` is
/// nonnegative for one-run values `1, alpha, beta, 0, 0, ..`.
pub fn validate_non2bf(alpha: &Rational, beta: &Rational, depth: usize) -> Non2bfCheck {
    let values = (0..=depth.max(2))
        .map(|n| match n {
            0 => int(1),
            1 => alpha.clone(),
            2 => beta.clone(),
            _ => Rational::zero(),
        })
        .collect();
    let ext = ExtendedOneRuns::from_values(values);
    match first_negative_string(&ext, depth).expect("one-run values cover the depth") {
        None => Non2bfCheck::Valid,
        Some((n, zeros, determinant)) => Non2bfCheck::Invalid {
            n,
            zeros,
            determinant,
        },
    }
}

/// Indicator values `X_1..X_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub bits: Vec<bool>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: &Rational) -> bool {
    match (p.numer().to_u64(), p.denom().to_u64()) {
        (Some(num), Some(den)) => rng.gen_range(0..den) < num,
        _ => rng.gen_bool(p.to_f64().unwrap_or(0.0).clamp(0.0, 1.0)),
    }
}

/// Random relative order of `len` i.i.d. continuous variables.
fn ranks<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<usize> {
    let mut r: Vec<usize> = (0..len).collect();
    r.shuffle(rng);
    r
}

/// One path from the model's background construction, seeded.
pub fn sample_path(m: &ModelSpec, n: usize, seed: u64) -> Result<Path> {
    sample_path_with(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_path_with<R: Rng + ?Sized>(m: &ModelSpec, n: usize, rng: &mut R) -> Result<Path> {
    let bits = match m {
        ModelSpec::Eulerian => {
            let y = ranks(rng, n + 1);
            y.windows(2).map(|w| w[0] > w[1]).collect()
        }
        ModelSpec::Iid { p } => (0..n).map(|_| bernoulli(rng, p)).collect(),
        ModelSpec::OnePair { p } => {
            let y: Vec<bool> = (0..=n).map(|_| bernoulli(rng, p)).collect();
            y.windows(2).map(|w| w[0] && w[1]).collect()
        }
        ModelSpec::Carries { b } => {
            let y: Vec<u32> = (0..=n).map(|_| rng.gen_range(0..*b)).collect();
            y.windows(2).map(|w| w[0] > w[1]).collect()
        }
        ModelSpec::Flipping { p } => {
            let u = ranks(rng, n + 1);
            let w: Vec<bool> = (0..=n).map(|_| bernoulli(rng, p)).collect();
            (1..=n)
                .map(|i| if u[i] > u[i - 1] { w[i] } else { w[i - 1] })
                .collect()
        }
        ModelSpec::NonTwoBlock { .. } => return Err(Error::SamplerUnavailable(m.to_string())),
    };
    Ok(Path { bits })
}
