//! Truncated power series c₁T + c₂T² + … + c_K T^K over Z_ℓ, and the two
//! series the tower depends on: P_a(T) for a single seed and
//! Q(T) = P_{a₁}(T) + … + P_{a_t}(T).

use num_bigint::BigUint;
use num_traits::Signed;
use thiserror::Error;

use crate::chebyshev::{coeff_closed_big, coeff_padic, precision_buffer};
use crate::padic::{PadicError, PadicInt, Prime, ValuationResult};
use crate::seed::{Seed, SeedSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("a series needs at least one coefficient")]
    NoTerms,
    #[error("target precision must be at least one digit")]
    ZeroPrecision,
    #[error("coefficient {index} has prime {found}, expected {expected}")]
    MixedPrimes {
        index: usize,
        found: u64,
        expected: u64,
    },
    #[error("c1 disagrees with the sum of squared seeds")]
    LeadingCoefficientMismatch,
}

/// c₁, …, c_K with per-coefficient precision. Index 0 of the backing vector
/// is c₁.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicSeries {
    prime: Prime,
    coefficients: Vec<PadicInt>,
}

impl PadicSeries {
    pub fn new(prime: Prime, coefficients: Vec<PadicInt>) -> Result<Self, SeriesError> {
        if coefficients.is_empty() {
            return Err(SeriesError::NoTerms);
        }
        for (i, c) in coefficients.iter().enumerate() {
            if c.prime() != prime {
                return Err(SeriesError::MixedPrimes {
                    index: i + 1,
                    found: c.prime().get(),
                    expected: prime.get(),
                });
            }
        }
        Ok(PadicSeries {
            prime,
            coefficients,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    /// K, the number of stored coefficients.
    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[PadicInt] {
        &self.coefficients
    }

    /// c_j, 1-based.
    pub fn coefficient(&self, j: usize) -> Option<&PadicInt> {
        j.checked_sub(1).and_then(|i| self.coefficients.get(i))
    }

    pub fn valuations(&self) -> Vec<ValuationResult> {
        self.coefficients.iter().map(PadicInt::valuation).collect()
    }

    /// Coefficientwise sum, truncated to the shorter series.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>, _>>()?;
        PadicSeries::new(self.prime, coefficients)
    }

    /// ℓ^m · self.
    pub fn scale_by_prime_power(&self, m: u32) -> Self {
        PadicSeries {
            prime: self.prime,
            coefficients: self
                .coefficients
                .iter()
                .map(|c| c.mul_prime_power(m))
                .collect(),
        }
    }

    /// Leading base-ℓ digits of each coefficient, capped at what is known.
    pub fn render(&self, digits: u32) -> Vec<String> {
        self.coefficients
            .iter()
            .map(|c| {
                c.render_digits(digits.min(c.precision()))
                    .expect("digit count capped at precision")
            })
            .collect()
    }
}

/// P_a(T) to `terms` coefficients, each known to at least `precision` digits
/// and truncated to exactly `precision`.
///
/// Integer seeds use exact integer coefficients; other seeds are resolved
/// with enough extra digits to absorb the denominators of d_1, …, d_terms.
pub fn series_p(
    seed: &Seed,
    prime: Prime,
    terms: usize,
    precision: u32,
) -> Result<PadicSeries, SeriesError> {
    if terms == 0 {
        return Err(SeriesError::NoTerms);
    }
    if precision == 0 {
        return Err(SeriesError::ZeroPrecision);
    }
    let coefficients = match seed {
        Seed::Integer(n) => {
            // P_{-a} = P_a: every d_k(a) is even in a.
            let magnitude: BigUint = n.abs().to_biguint().expect("nonnegative");
            (1..=terms as u64)
                .map(|k| PadicInt::from_integer(&coeff_closed_big(&magnitude, k), prime, precision))
                .collect()
        }
        _ => {
            let working = precision + precision_buffer(prime, terms);
            let a = seed.resolve(prime, working)?;
            (1..=terms as u64)
                .map(|k| coeff_padic(&a, k)?.truncate(precision))
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    PadicSeries::new(prime, coefficients)
}

/// Q(T) = Σ_j P_{a_j}(T) for a validated seed specification.
pub fn series_q(spec: &SeedSpec, terms: usize, precision: u32) -> Result<PadicSeries, SeriesError> {
    let prime = spec.prime();
    let mut seeds = spec.seeds().iter();
    let first = seeds.next().ok_or(SeriesError::NoTerms)?;
    let mut q = series_p(first, prime, terms, precision)?;
    for seed in seeds {
        q = q.add(&series_p(seed, prime, terms, precision)?)?;
    }

    // c₁ = a₁² + … + a_t²
    let mut sum_sq = PadicInt::zero(prime, precision);
    for a in spec.resolve_all(precision)? {
        sum_sq = sum_sq.add(&a.mul(&a)?)?;
    }
    if q.coefficient(1) != Some(&sum_sq) {
        return Err(SeriesError::LeadingCoefficientMismatch);
    }
    Ok(q)
}
