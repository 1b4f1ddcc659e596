//! Coefficients of the shifted Chebyshev polynomials
//! P_a(X) = 2 − 2·T_a(1 − X/2) = d₁(a)X + … + d_a(a)X^a.
//!
//! Three routes to the same numbers:
//! - [`p_recurrence`]: P_a = X(a² − (a−1)P₁ − (a−2)P₂ − … − P_{a−1}), exact
//!   and quadratic; kept as an oracle.
//! - [`coeff_closed`]: d_k(n) = (−1)^{k−1} C(n+k−1, 2k−1) n/k for k ≤ n.
//! - [`coeff_padic`]: the falling-factorial form
//!   d_k(a) = (−1)^{k−1} a (a+k−1)(a+k−2)…(a−k+1) / ((2k−1)! k), evaluated
//!   for any a ∈ Z_ℓ.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::padic::{factorial_ord, small_ord, PadicError, PadicInt, Prime};

/// Integer polynomial with zero constant term; index k holds the coefficient
/// of X^k.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coefficients: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial {
            coefficients: vec![BigInt::zero()],
        }
    }

    pub fn from_coefficients(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c.is_zero()) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(BigInt::zero());
        }
        IntPolynomial { coefficients }
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, k: usize) -> BigInt {
        self.coefficients.get(k).cloned().unwrap_or_default()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn leading_coefficient(&self) -> &BigInt {
        self.coefficients.last().expect("never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }
}

/// P_a from the defining recurrence. Cost is quadratic in `a`.
pub fn p_recurrence(a: usize) -> IntPolynomial {
    p_recurrence_table(a)
        .pop()
        .expect("table has a + 1 entries")
}

/// P_0, …, P_a from the recurrence, as dense coefficient vectors.
pub fn p_recurrence_table(a: usize) -> Vec<IntPolynomial> {
    let mut table: Vec<Vec<BigInt>> = vec![vec![BigInt::zero()]];
    if a >= 1 {
        table.push(vec![BigInt::zero(), BigInt::one()]);
    }
    for n in 2..=a {
        // inner = n² − Σ_{j<n} (n − j) P_j, then shift by one power of X
        let mut inner = vec![BigInt::zero(); n];
        inner[0] = BigInt::from(n * n);
        for (j, pj) in table.iter().enumerate().skip(1) {
            let w = BigInt::from(n - j);
            for (k, c) in pj.iter().enumerate() {
                inner[k] -= &w * c;
            }
        }
        let mut next = vec![BigInt::zero(); n + 1];
        for (k, c) in inner.into_iter().enumerate() {
            next[k + 1] = c;
        }
        table.push(next);
    }
    table
        .into_iter()
        .map(IntPolynomial::from_coefficients)
        .collect()
}

/// d_k(n) for machine-sized `n`.
pub fn coeff_closed(n: u64, k: u64) -> BigInt {
    coeff_closed_big(&BigUint::from(n), k)
}

/// d_k(n) = (−1)^{k−1} C(n+k−1, 2k−1) n/k when k ≤ n, otherwise 0.
pub fn coeff_closed_big(n: &BigUint, k: u64) -> BigInt {
    assert!(k >= 1, "coefficient index starts at 1");
    let kb = BigUint::from(k);
    if n.is_zero() || *n < kb {
        return BigInt::zero();
    }
    let c = binomial(n + &kb - 1u32, BigUint::from(2 * k - 1));
    let magnitude = c * n / &kb;
    let value = BigInt::from(magnitude);
    if k.is_multiple_of(2) {
        -value
    } else {
        value
    }
}

/// ord_ℓ((2k−1)!·k): the digits lost when dividing out the denominator of
/// d_k. Bounded by k−1 for odd ℓ and 2(k−1) for ℓ = 2.
pub fn denominator_ord(prime: Prime, k: u64) -> u32 {
    assert!(k >= 1);
    (factorial_ord(2 * k - 1, prime) + small_ord(k, prime)) as u32
}

/// max over k ≤ terms of [`denominator_ord`]: the extra working digits needed
/// so that c₁, …, c_terms all come out at the target precision.
pub fn precision_buffer(prime: Prime, terms: usize) -> u32 {
    (1..=terms as u64)
        .map(|k| denominator_ord(prime, k))
        .max()
        .unwrap_or(0)
}

/// d_k(a) for a ∈ Z_ℓ known to N digits. The result is known to
/// N − ord_ℓ((2k−1)!·k) digits.
pub fn coeff_padic(a: &PadicInt, k: u64) -> Result<PadicInt, PadicError> {
    assert!(k >= 1, "coefficient index starts at 1");
    let prime = a.prime();
    let n = a.precision();
    let lost = denominator_ord(prime, k);
    if n <= lost {
        return Err(PadicError::InsufficientPrecision {
            needed: lost + 1,
            available: n,
        });
    }

    let t = (k - 1) as i64;
    let mut numerator = a.clone();
    for shift in -t..=t {
        let factor = a.add(&PadicInt::from_i64(shift, prime, n))?;
        numerator = numerator.mul(&factor)?;
    }
    if t % 2 == 1 {
        numerator = numerator.neg();
    }
    let numerator = numerator.div_prime_power(lost)?;

    let mut denominator = BigUint::from(k);
    for j in 2..=(2 * k - 1) {
        denominator *= j;
    }
    let unit_part = denominator / prime.pow(lost);
    let inv = PadicInt::from_residue(unit_part, prime, n - lost).invert()?;
    numerator.mul(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn poly(cs: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coefficients(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn recurrence_small_cases() {
        assert!(p_recurrence(0).is_zero());
        assert_eq!(p_recurrence(1), poly(&[0, 1]));
        assert_eq!(p_recurrence(2), poly(&[0, 4, -1]));
        assert_eq!(p_recurrence(3), poly(&[0, 9, -6, 1]));
    }

    #[test]
    fn closed_examples() {
        assert_eq!(coeff_closed(3, 2), BigInt::from(-6));
        for n in 1..20 {
            assert_eq!(coeff_closed(n, 1), BigInt::from(n * n));
        }
        assert_eq!(coeff_closed(4, 7), BigInt::zero());
        assert_eq!(coeff_closed(0, 1), BigInt::zero());
    }

    #[test]
    fn leading_sign() {
        for a in 1..=25usize {
            let pa = p_recurrence(a);
            assert_eq!(pa.degree(), a);
            let expected = if a % 2 == 1 { 1 } else { -1 };
            assert_eq!(pa.leading_coefficient(), &BigInt::from(expected));
            assert!(pa.coefficient(0).is_zero());
        }
    }

    #[test]
    fn denominator_bounds() {
        for &q in &[3u64, 5, 7, 11, 13] {
            for k in 1..60 {
                assert!((denominator_ord(p(q), k) as u64) < k);
            }
        }
        for k in 1..60 {
            assert!(denominator_ord(p(2), k) as u64 <= 2 * (k - 1));
        }
        // (2·3−1)!·3 = 360 = 2³·3²·5
        assert_eq!(denominator_ord(p(2), 3), 3);
        assert_eq!(denominator_ord(p(3), 3), 3 - 1);
        assert_eq!(precision_buffer(p(2), 4), denominator_ord(p(2), 4));
    }

    #[test]
    fn padic_one_third_over_5() {
        let a = PadicInt::from_rational(&1.into(), &3.into(), p(5), 8).unwrap();
        let c1 = coeff_padic(&a, 1).unwrap();
        assert_eq!(c1.precision(), 8);
        assert_eq!(c1.render_digits(4).unwrap(), "4.201");
        let c2 = coeff_padic(&a, 2).unwrap();
        assert_eq!(c2.render_digits(4).unwrap(), "4.234");
        // d₂(a) = −a²(a²−1)/12 at a = 1/3 is 2/243
        let expected =
            PadicInt::from_rational(&2.into(), &243.into(), p(5), c2.precision()).unwrap();
        assert_eq!(c2, expected);
    }

    #[test]
    fn padic_matches_closed_on_integers() {
        for &q in &[2u64, 3, 5, 7] {
            for n in 1..30u64 {
                let a = PadicInt::from_i64(n as i64, p(q), 20);
                for k in 1..=n.min(8) {
                    let c = coeff_padic(&a, k).unwrap();
                    let exact = PadicInt::from_integer(&coeff_closed(n, k), p(q), c.precision());
                    assert_eq!(c, exact, "ℓ={q} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn padic_insufficient_precision() {
        let a = PadicInt::from_i64(1, p(2), 2);
        // ord₂(5!·3) = 3 ≥ 2
        assert!(matches!(
            coeff_padic(&a, 3),
            Err(PadicError::InsufficientPrecision {
                needed: 4,
                available: 2
            })
        ));
    }
}
