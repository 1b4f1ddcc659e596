//! μ and λ from a truncated Q(T), the n₀ sufficiency bound, and the closed
//! growth law ord_ℓ(κ_n) = μℓⁿ + λn + ν.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{PadicInt, Prime, ValuationResult};
use crate::seed::SeedSpec;
use crate::series::PadicSeries;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("all {0} coefficients are zero at the available precision")]
    AllCoefficientsIndistinguishableFromZero(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub mu: u32,
    /// Always 2·k0 − 1.
    pub lambda: u32,
    /// First index j with v_ℓ(c_j) = μ.
    pub k0: u32,
    /// Set when the truncation or the precision could hide a coefficient of
    /// smaller valuation than `mu`, or an earlier one attaining it.
    pub provisional: bool,
    pub n0_bound: u32,
    /// Known only on the fast path (ℓ ∤ c₁), where it is 0.
    pub nu: Option<i64>,
}

/// Reads μ, λ off the coefficients c₁, …, c_K.
///
/// μ = 0 is certain as soon as a unit coefficient is seen. A positive μ is
/// only "μ as witnessed within K": some c_j with j > K might have smaller
/// valuation, so the result is flagged provisional.
pub fn extract_mu_lambda(q: &PadicSeries) -> Result<InvariantResult, InvariantError> {
    let vals = q.valuations();
    let (k0_index, mu) = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.exact().map(|e| (i, e)))
        .min_by_key(|&(i, e)| (e, i))
        .ok_or(InvariantError::AllCoefficientsIndistinguishableFromZero(
            vals.len(),
        ))?;

    let uncertain_at_or_below_mu = vals.iter().any(|v| match v {
        ValuationResult::AtLeast(bound) => *bound <= mu,
        ValuationResult::Exact(_) => false,
    });
    let provisional = mu > 0 || uncertain_at_or_below_mu;

    let k0 = k0_index as u32 + 1;
    let lambda = 2 * k0 - 1;
    Ok(InvariantResult {
        mu,
        lambda,
        k0,
        provisional,
        n0_bound: n0_sufficient(q.prime(), lambda),
        nu: None,
    })
}

/// When ℓ ∤ a₁² + … + a_t² the invariants are μ = 0, λ = 1, ν = 0 without
/// looking past c₁.
pub fn fast_path(spec: &SeedSpec) -> Option<InvariantResult> {
    let prime = spec.prime();
    let mut c1 = PadicInt::zero(prime, 1);
    for seed in spec.seeds() {
        let a = seed.resolve(prime, 1).ok()?;
        c1 = c1.add(&a.mul(&a).ok()?).ok()?;
    }
    if !c1.is_unit() {
        return None;
    }
    Some(InvariantResult {
        mu: 0,
        lambda: 1,
        k0: 1,
        provisional: false,
        n0_bound: n0_sufficient(prime, 1),
        nu: Some(0),
    })
}

/// Least n₀ with n₀ ≥ log_ℓ(ℓ/(ℓ−1)·(λ+1)), i.e. ℓ^{n₀}(ℓ−1) ≥ ℓ(λ+1).
pub fn n0_sufficient(prime: Prime, lambda: u32) -> u32 {
    assert!(lambda >= 1);
    let l = prime.get() as u128;
    let target = l * (lambda as u128 + 1);
    let mut n0 = 0;
    let mut power: u128 = l - 1;
    while power < target {
        power *= l;
        n0 += 1;
    }
    n0
}

/// μℓⁿ + λn + ν.
///
/// Panics if μℓⁿ overflows an `i128`, far beyond any level whose spanning
/// trees can be counted.
pub fn predict_ord(prime: Prime, n: u32, mu: u32, lambda: u32, nu: i64) -> i128 {
    let growth = if mu == 0 {
        0
    } else {
        (prime.get() as i128)
            .checked_pow(n)
            .and_then(|p| p.checked_mul(mu as i128))
            .expect("μℓⁿ overflows i128")
    };
    growth + lambda as i128 * n as i128 + nu as i128
}

/// φ(ℓⁿ) = ℓⁿ − ℓⁿ⁻¹ for n ≥ 1, and φ(1) = 1.
pub fn totient_prime_power(prime: Prime, n: u32) -> i128 {
    let l = prime.get() as i128;
    if n == 0 {
        1
    } else {
        l.pow(n) - l.pow(n - 1)
    }
}

/// The predicted first difference ord_ℓ(κ_n) − ord_ℓ(κ_{n−1}) = μφ(ℓⁿ) + λ.
pub fn predicted_difference(prime: Prime, n: u32, mu: u32, lambda: u32) -> i128 {
    assert!(n >= 1);
    mu as i128 * totient_prime_power(prime, n) + lambda as i128
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Seed;
    use crate::series::series_q;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn worked_examples() {
        let spec = SeedSpec::new(p(2), vec![Seed::rational(1, 3), Seed::rational(3, 5)]).unwrap();
        let r = extract_mu_lambda(&series_q(&spec, 12, 24).unwrap()).unwrap();
        assert_eq!((r.mu, r.lambda, r.k0, r.provisional), (0, 5, 3, false));

        let spec = SeedSpec::new(
            p(3),
            vec![
                Seed::rational(1, 2),
                Seed::rational(1, 5),
                Seed::rational(1, 7),
            ],
        )
        .unwrap();
        let r = extract_mu_lambda(&series_q(&spec, 12, 24).unwrap()).unwrap();
        assert_eq!((r.mu, r.lambda, r.k0), (0, 3, 2));

        let spec = SeedSpec::new(p(13), vec![Seed::sqrt(3, 4), Seed::sqrt(10, 6)]).unwrap();
        let r = extract_mu_lambda(&series_q(&spec, 12, 24).unwrap()).unwrap();
        assert_eq!((r.mu, r.lambda, r.k0), (0, 3, 2));
    }

    #[test]
    fn positive_mu_is_provisional() {
        // Q = 2T exactly
        let spec = SeedSpec::new(p(2), vec![Seed::integer(1), Seed::integer(1)]).unwrap();
        let r = extract_mu_lambda(&series_q(&spec, 6, 10).unwrap()).unwrap();
        assert_eq!((r.mu, r.lambda, r.k0), (1, 1, 1));
        assert!(r.provisional);
    }

    #[test]
    fn zero_series_is_an_error() {
        let z = PadicSeries::new(p(3), vec![PadicInt::zero(p(3), 4); 3]).unwrap();
        assert_eq!(
            extract_mu_lambda(&z),
            Err(InvariantError::AllCoefficientsIndistinguishableFromZero(3))
        );
    }

    #[test]
    fn uncertain_early_coefficient_marks_provisional() {
        // c₁ = 0 (≥2), c₂ = 3 (exact 1): μ might really be attained at c₁
        let s = PadicSeries::new(
            p(3),
            vec![PadicInt::zero(p(3), 1), PadicInt::from_i64(3, p(3), 4)],
        )
        .unwrap();
        let r = extract_mu_lambda(&s).unwrap();
        assert_eq!((r.mu, r.k0), (1, 2));
        assert!(r.provisional);
    }

    #[test]
    fn fast_path_examples() {
        let spec = SeedSpec::new(p(5), vec![Seed::integer(1), Seed::integer(1)]).unwrap();
        let r = fast_path(&spec).unwrap();
        assert_eq!((r.mu, r.lambda, r.nu), (0, 1, Some(0)));

        let spec = SeedSpec::new(p(2), vec![Seed::rational(1, 3), Seed::rational(3, 5)]).unwrap();
        assert!(fast_path(&spec).is_none());
        let spec = SeedSpec::new(p(13), vec![Seed::sqrt(3, 4), Seed::sqrt(10, 6)]).unwrap();
        assert!(fast_path(&spec).is_none());
    }

    #[test]
    fn n0_examples() {
        assert_eq!(n0_sufficient(p(2), 5), 4);
        assert_eq!(n0_sufficient(p(3), 3), 2);
        assert_eq!(n0_sufficient(p(13), 1), 1);
        assert_eq!(n0_sufficient(p(13), 3), 1);
    }

    #[test]
    fn predict_examples() {
        assert_eq!(predict_ord(p(2), 3, 0, 5, -3), 12);
        assert_eq!(predict_ord(p(3), 2, 0, 3, 0), 6);
        assert_eq!(predict_ord(p(7), 0, 2, 9, -4), -2);
        assert_eq!(predict_ord(p(2), 4, 1, 1, -1), 16 + 4 - 1);
    }

    #[test]
    fn difference_law_matches_prediction() {
        for &q in &[2u64, 3, 5] {
            for mu in 0..3 {
                for lambda in [1u32, 3, 5] {
                    for n in 1..8 {
                        let d = predict_ord(p(q), n, mu, lambda, -7)
                            - predict_ord(p(q), n - 1, mu, lambda, -7);
                        assert_eq!(d, predicted_difference(p(q), n, mu, lambda));
                    }
                }
            }
        }
    }
}
