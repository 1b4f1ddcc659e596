//! Tower seeds: the images a₁, …, a_t ∈ Z_ℓ of the generating set.
//!
//! Seeds are kept symbolic (integer, ℓ-integral rational, or a square root
//! with a chosen branch) and only resolved to a [`PadicInt`] at the
//! precision a caller asks for.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::padic::{hensel_sqrt, PadicError, PadicInt, Prime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Seed {
    Integer(BigInt),
    /// `num / den` in lowest terms with `den > 1`.
    Rational {
        num: BigInt,
        den: BigInt,
    },
    /// The square root of `radicand` congruent to `branch` modulo ℓ.
    Sqrt {
        radicand: BigInt,
        branch: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedParseError {
    #[error("empty seed")]
    Empty,
    #[error("malformed integer {0:?}")]
    BadInteger(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("square-root seed {0:?} must name its branch, as in \"sqrt(3)@4\"")]
    MissingBranch(String),
    #[error("malformed square-root seed {0:?}")]
    BadSqrt(String),
}

impl Seed {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        Seed::Integer(n.into())
    }

    /// Builds `num/den`, normalising sign and common factors. A denominator
    /// of one collapses to an integer seed.
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let (mut num, mut den) = (num.into(), den.into());
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num /= &g;
            den /= &g;
        }
        if den.is_one() {
            Seed::Integer(num)
        } else {
            Seed::Rational { num, den }
        }
    }

    pub fn sqrt(radicand: impl Into<BigInt>, branch: u64) -> Self {
        Seed::Sqrt {
            radicand: radicand.into(),
            branch,
        }
    }

    /// The element of Z_ℓ this seed denotes, to `precision` digits.
    pub fn resolve(&self, prime: Prime, precision: u32) -> Result<PadicInt, PadicError> {
        match self {
            Seed::Integer(n) => Ok(PadicInt::from_integer(n, prime, precision)),
            Seed::Rational { num, den } => PadicInt::from_rational(num, den, prime, precision),
            Seed::Sqrt { radicand, branch } => hensel_sqrt(radicand, prime, *branch, precision),
        }
    }

    pub fn is_unit(&self, prime: Prime) -> Result<bool, PadicError> {
        Ok(self.resolve(prime, 1)?.is_unit())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seed::Integer(n) => write!(f, "{n}"),
            Seed::Rational { num, den } => write!(f, "{num}/{den}"),
            Seed::Sqrt { radicand, branch } => write!(f, "sqrt({radicand})@{branch}"),
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt, SeedParseError> {
    let t = s.trim();
    let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(SeedParseError::BadInteger(s.to_string()));
    }
    t.parse::<BigInt>()
        .map_err(|_| SeedParseError::BadInteger(s.to_string()))
}

/// Grammar: `-12`, `1/3`, `sqrt(3)@4`.
impl FromStr for Seed {
    type Err = SeedParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() {
            return Err(SeedParseError::Empty);
        }
        if let Some(rest) = t.strip_prefix("sqrt") {
            let rest = rest.trim_start();
            let (inner, branch) = match rest.rsplit_once('@') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => return Err(SeedParseError::MissingBranch(s.to_string())),
            };
            let radicand = inner
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| SeedParseError::BadSqrt(s.to_string()))?;
            let radicand = parse_int(radicand)?;
            let branch = branch
                .parse::<u64>()
                .map_err(|_| SeedParseError::BadSqrt(s.to_string()))?;
            return Ok(Seed::sqrt(radicand, branch));
        }
        if let Some((num, den)) = t.split_once('/') {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(SeedParseError::ZeroDenominator(s.to_string()));
            }
            return Ok(Seed::rational(num, den));
        }
        Ok(Seed::Integer(parse_int(t)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("seed {index} ({seed}) does not define an element of Z_{prime}: {source}")]
    Unresolvable {
        index: usize,
        seed: String,
        prime: u64,
        source: PadicError,
    },
    #[error("no seed is a unit in Z_{0}; the covers would be disconnected")]
    NoUnitSeed(u64),
}

/// A validated tower datum: a prime and seeds a₁, …, a_t, at least one of
/// which is an ℓ-adic unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSpec {
    prime: Prime,
    seeds: Vec<Seed>,
}

impl SeedSpec {
    pub fn new(prime: Prime, seeds: Vec<Seed>) -> Result<Self, SpecError> {
        if seeds.is_empty() {
            return Err(SpecError::NoSeeds);
        }
        let mut any_unit = false;
        for (index, seed) in seeds.iter().enumerate() {
            let unit = seed
                .is_unit(prime)
                .map_err(|source| SpecError::Unresolvable {
                    index,
                    seed: seed.to_string(),
                    prime: prime.get(),
                    source,
                })?;
            any_unit |= unit;
        }
        if !any_unit {
            return Err(SpecError::NoUnitSeed(prime.get()));
        }
        Ok(SeedSpec { prime, seeds })
    }

    /// Skips the unit check. Used to build deliberately degenerate towers.
    pub fn new_unchecked(prime: Prime, seeds: Vec<Seed>) -> Self {
        SeedSpec { prime, seeds }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    /// t, the number of loops of the base bouquet.
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn resolve_all(&self, precision: u32) -> Result<Vec<PadicInt>, PadicError> {
        self.seeds
            .iter()
            .map(|s| s.resolve(self.prime, precision))
            .collect()
    }
}
