//! Arithmetic in the ℓ-adic integers at finite, explicitly tracked precision.
//!
//! A [`PadicInt`] is a residue modulo ℓ^N together with N. Every operation
//! states the precision of its result; binary operations return the smaller
//! of the two operand precisions, and operations that lose digits (exact
//! division by a power of ℓ) say so in their output precision.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },
    #[error("denominator {denominator} is divisible by {prime}")]
    DenominatorNotUnit { denominator: BigInt, prime: u64 },
    #[error("value is not a unit in Z_{0}")]
    NotAUnit(u64),
    #[error("{radicand} is not a square modulo {prime}")]
    NotAResidue { radicand: BigInt, prime: u64 },
    #[error("branch {branch} does not square to {radicand} modulo {prime}")]
    BranchInvalid {
        radicand: BigInt,
        branch: u64,
        prime: u64,
    },
    #[error("radicand {radicand} is divisible by {prime}")]
    RadicandNotUnit { radicand: BigInt, prime: u64 },
    #[error("square roots are not supported for the prime 2")]
    EvenPrimeUnsupported,
    #[error("valuation of zero is undefined")]
    ZeroInput,
    #[error("requested {requested} digits but only {available} are known")]
    PrecisionExceeded { requested: u32, available: u32 },
    #[error("insufficient precision: {needed} digits needed, {available} available")]
    InsufficientPrecision { needed: u32, available: u32 },
    #[error("value is not divisible by {prime}^{exponent}")]
    NotDivisible { prime: u64, exponent: u32 },
    #[error("malformed digit string {0:?}")]
    InvalidDigitString(String),
}

/// A rational prime, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(PadicError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }

    pub fn pow(self, exp: u32) -> BigUint {
        self.to_biguint().pow(exp)
    }
}

impl TryFrom<u64> for Prime {
    type Error = PadicError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while (d as u128) * (d as u128) <= n as u128 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Valuation of a finite-precision ℓ-adic integer.
///
/// `AtLeast(N)` is returned only for a zero residue at precision N: the value
/// is indistinguishable from zero and its true valuation is some v ≥ N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ValuationResult {
    Exact(u32),
    AtLeast(u32),
}

impl ValuationResult {
    pub fn exact(self) -> Option<u32> {
        match self {
            ValuationResult::Exact(v) => Some(v),
            ValuationResult::AtLeast(_) => None,
        }
    }

    /// The guaranteed lower bound (the value itself when exact).
    pub fn lower_bound(self) -> u32 {
        match self {
            ValuationResult::Exact(v) | ValuationResult::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for ValuationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationResult::Exact(v) => write!(f, "{v}"),
            ValuationResult::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

/// An element of Z_ℓ known modulo ℓ^precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: Prime,
    precision: u32,
    residue: BigUint,
}

impl PadicInt {
    /// Reduces `residue` into `[0, ℓ^precision)`.
    ///
    /// Panics if `precision` is zero.
    pub fn from_residue(residue: BigUint, prime: Prime, precision: u32) -> Self {
        assert!(precision >= 1, "precision must be at least one digit");
        let modulus = prime.pow(precision);
        PadicInt {
            prime,
            precision,
            residue: residue % modulus,
        }
    }

    pub fn from_integer(n: &BigInt, prime: Prime, precision: u32) -> Self {
        assert!(precision >= 1, "precision must be at least one digit");
        let modulus = BigInt::from(prime.pow(precision));
        let r = n.mod_floor(&modulus);
        PadicInt {
            prime,
            precision,
            residue: r.to_biguint().expect("mod_floor is nonnegative"),
        }
    }

    pub fn from_i64(n: i64, prime: Prime, precision: u32) -> Self {
        Self::from_integer(&BigInt::from(n), prime, precision)
    }

    /// The image of `num / den` in Z_ℓ; requires ℓ ∤ den.
    pub fn from_rational(
        num: &BigInt,
        den: &BigInt,
        prime: Prime,
        precision: u32,
    ) -> Result<Self, PadicError> {
        let p = BigInt::from(prime.get());
        if den.is_zero() || (den % &p).is_zero() {
            return Err(PadicError::DenominatorNotUnit {
                denominator: den.clone(),
                prime: prime.get(),
            });
        }
        let d = Self::from_integer(den, prime, precision).invert()?;
        Ok(Self::from_integer(num, prime, precision).mul_unchecked(&d))
    }

    pub fn zero(prime: Prime, precision: u32) -> Self {
        Self::from_residue(BigUint::zero(), prime, precision)
    }

    pub fn one(prime: Prime, precision: u32) -> Self {
        Self::from_residue(BigUint::one(), prime, precision)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> BigUint {
        self.prime.pow(self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !(&self.residue % self.prime.get()).is_zero()
    }

    /// The representative of least absolute value, in `(-ℓ^N/2, ℓ^N/2]`.
    pub fn signed_representative(&self) -> BigInt {
        let m = BigInt::from(self.modulus());
        let r = BigInt::from(self.residue.clone());
        if &r * 2 > m {
            r - m
        } else {
            r
        }
    }

    fn check_prime(&self, other: &Self) -> Result<(), PadicError> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch {
                left: self.prime.get(),
                right: other.prime.get(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PadicError> {
        self.check_prime(other)?;
        let n = self.precision.min(other.precision);
        Ok(Self::from_residue(
            &self.residue + &other.residue,
            self.prime,
            n,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.check_prime(other)?;
        let n = self.precision.min(other.precision);
        let m = self.prime.pow(n);
        let a = &self.residue % &m;
        let b = &other.residue % &m;
        Ok(Self::from_residue(a + &m - b, self.prime, n))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.check_prime(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.precision.min(other.precision);
        Self::from_residue(&self.residue * &other.residue, self.prime, n)
    }

    pub fn neg(&self) -> Self {
        if self.residue.is_zero() {
            return self.clone();
        }
        Self::from_residue(self.modulus() - &self.residue, self.prime, self.precision)
    }

    /// Multiplicative inverse at the same precision.
    pub fn invert(&self) -> Result<Self, PadicError> {
        if !self.is_unit() {
            return Err(PadicError::NotAUnit(self.prime.get()));
        }
        let m = BigInt::from(self.modulus());
        let r = BigInt::from(self.residue.clone());
        let egcd = r.extended_gcd(&m);
        debug_assert!(egcd.gcd.is_one());
        Ok(Self::from_integer(&egcd.x, self.prime, self.precision))
    }

    pub fn valuation(&self) -> ValuationResult {
        if self.residue.is_zero() {
            return ValuationResult::AtLeast(self.precision);
        }
        let p = self.prime.to_biguint();
        let mut r = self.residue.clone();
        let mut v = 0;
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                break;
            }
            r = q;
            v += 1;
        }
        ValuationResult::Exact(v)
    }

    /// Drops digits: the same element known to `precision` digits only.
    pub fn truncate(&self, precision: u32) -> Result<Self, PadicError> {
        if precision > self.precision {
            return Err(PadicError::InsufficientPrecision {
                needed: precision,
                available: self.precision,
            });
        }
        Ok(Self::from_residue(
            self.residue.clone(),
            self.prime,
            precision,
        ))
    }

    /// Multiplication by ℓ^k. The result is known to precision N + k.
    pub fn mul_prime_power(&self, k: u32) -> Self {
        Self::from_residue(
            &self.residue * self.prime.pow(k),
            self.prime,
            self.precision + k,
        )
    }

    /// Exact division by ℓ^k; the result has precision N − k.
    pub fn div_prime_power(&self, k: u32) -> Result<Self, PadicError> {
        if k >= self.precision {
            return Err(PadicError::InsufficientPrecision {
                needed: k + 1,
                available: self.precision,
            });
        }
        let (q, rem) = self.residue.div_rem(&self.prime.pow(k));
        if !rem.is_zero() {
            return Err(PadicError::NotDivisible {
                prime: self.prime.get(),
                exponent: k,
            });
        }
        Ok(Self::from_residue(q, self.prime, self.precision - k))
    }

    /// Base-ℓ digits a₀, a₁, …, a_{k−1}, least significant first.
    pub fn digits(&self, k: u32) -> Result<Vec<u64>, PadicError> {
        if k > self.precision {
            return Err(PadicError::PrecisionExceeded {
                requested: k,
                available: self.precision,
            });
        }
        let p = self.prime.to_biguint();
        let mut r = self.residue.clone();
        let mut out = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let (q, d) = r.div_rem(&p);
            out.push(d.to_u64().expect("digit fits in u64"));
            r = q;
        }
        Ok(out)
    }

    /// Renders the first `k` digits as `a₀.a₁a₂…`. For ℓ > 9 the digits after
    /// the point are written in decimal and separated by spaces.
    pub fn render_digits(&self, k: u32) -> Result<String, PadicError> {
        let digits = self.digits(k)?;
        Ok(format_digits(&digits, self.prime))
    }
}

fn format_digits(digits: &[u64], prime: Prime) -> String {
    let mut s = String::new();
    let sep = if prime.get() > 9 { " " } else { "" };
    for (i, d) in digits.iter().enumerate() {
        match i {
            0 => {}
            1 => s.push('.'),
            _ => s.push_str(sep),
        }
        s.push_str(&d.to_string());
    }
    s
}

/// Inverse of [`PadicInt::render_digits`]: the residue modulo ℓ^k encoded by
/// a digit string.
pub fn parse_digit_string(s: &str, prime: Prime) -> Result<BigUint, PadicError> {
    let bad = || PadicError::InvalidDigitString(s.to_string());
    let (head, tail) = match s.split_once('.') {
        Some((h, t)) => (h, t),
        None => (s, ""),
    };
    let mut digits = vec![head.trim().parse::<u64>().map_err(|_| bad())?];
    if prime.get() > 9 {
        for tok in tail.split_whitespace() {
            digits.push(tok.parse::<u64>().map_err(|_| bad())?);
        }
    } else {
        for c in tail.chars() {
            digits.push(c.to_digit(10).ok_or_else(bad)? as u64);
        }
    }
    if digits.iter().any(|&d| d >= prime.get()) {
        return Err(bad());
    }
    let p = prime.to_biguint();
    let mut acc = BigUint::zero();
    for d in digits.iter().rev() {
        acc = acc * &p + BigUint::from(*d);
    }
    Ok(acc)
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PadicInt({} mod {}^{})",
            self.residue, self.prime, self.precision
        )
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.digits(self.precision).map_err(|_| fmt::Error)?;
        write!(f, "{}", format_digits(&digits, self.prime))
    }
}

/// Square root of `m` in Z_ℓ by quadratic Hensel lifting from `branch`.
///
/// The result r satisfies r² ≡ m (mod ℓ^precision) and r ≡ branch (mod ℓ).
pub fn hensel_sqrt(
    m: &BigInt,
    prime: Prime,
    branch: u64,
    precision: u32,
) -> Result<PadicInt, PadicError> {
    let p = prime.get();
    if p == 2 {
        return Err(PadicError::EvenPrimeUnsupported);
    }
    let pb = BigInt::from(p);
    let m_mod_p = m.mod_floor(&pb).to_u64().expect("residue mod p fits");
    if m_mod_p == 0 {
        return Err(PadicError::RadicandNotUnit {
            radicand: m.clone(),
            prime: p,
        });
    }
    let b = branch % p;
    if mul_mod(b, b, p) != m_mod_p {
        // Euler's criterion separates a bad branch from a non-residue.
        let euler = BigUint::from(m_mod_p).modpow(&BigUint::from((p - 1) / 2), &BigUint::from(p));
        if euler.is_one() {
            return Err(PadicError::BranchInvalid {
                radicand: m.clone(),
                branch,
                prime: p,
            });
        }
        return Err(PadicError::NotAResidue {
            radicand: m.clone(),
            prime: p,
        });
    }

    let mut x = PadicInt::from_i64(b as i64, prime, 1);
    let mut known = 1u32;
    while known < precision {
        known = (2 * known).min(precision);
        let xk = PadicInt::from_residue(x.residue.clone(), prime, known);
        let target = PadicInt::from_integer(m, prime, known);
        let f = xk.mul_unchecked(&xk).sub(&target)?;
        let two_x = xk.add(&xk)?;
        let step = f.mul_unchecked(&two_x.invert()?);
        x = xk.sub(&step)?;
    }
    if x.precision < precision {
        x = PadicInt::from_residue(x.residue, prime, precision);
    }
    Ok(x)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The largest e with ℓ^e | n.
pub fn big_ord(n: &BigInt, prime: Prime) -> Result<u64, PadicError> {
    if n.is_zero() {
        return Err(PadicError::ZeroInput);
    }
    let mut r = n.magnitude().clone();
    let p = prime.to_biguint();
    let mut e = 0u64;
    // Strip ℓ^16 at a time before falling back to single factors.
    let chunk = prime.pow(16);
    loop {
        let (q, rem) = r.div_rem(&chunk);
        if !rem.is_zero() {
            break;
        }
        r = q;
        e += 16;
    }
    loop {
        let (q, rem) = r.div_rem(&p);
        if !rem.is_zero() {
            break;
        }
        r = q;
        e += 1;
    }
    Ok(e)
}

/// Splits a nonzero integer as ℓ^e · u with ℓ ∤ u.
pub fn split_prime_part(n: &BigInt, prime: Prime) -> Result<(u64, BigInt), PadicError> {
    let e = big_ord(n, prime)?;
    let pe = BigInt::from(prime.to_biguint()).pow(e as u32);
    Ok((e, n / pe))
}

/// ord_ℓ(m!) by Legendre's formula.
pub fn factorial_ord(m: u64, prime: Prime) -> u64 {
    let p = prime.get();
    let mut total = 0;
    let mut q = m / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// ord_ℓ of a positive machine integer.
pub fn small_ord(mut n: u64, prime: Prime) -> u64 {
    assert!(n != 0);
    let p = prime.get();
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}
