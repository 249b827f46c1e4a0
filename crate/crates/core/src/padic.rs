//! p-adic valuations, Legendre's formula and p-adic square tests over exact
//! rationals.
//!
//! Elements of the p-local integers Z_(p) are held as reduced [`BigRational`]s
//! whose denominator is coprime to `p`. Every test here is decided exactly;
//! there is no precision parameter on the public decision API. The
//! finite-precision [`ResidueClass`] exists only for the brute-force scanners.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Prime = u64;

/// A p-adic valuation: a finite exponent, or infinity for zero.
///
/// The derived ordering puts every finite value below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinity,
}

impl Valuation {
    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinity)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// `self >= bound`, with infinity above everything.
    pub fn at_least(self, bound: u64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinity => true,
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl Sum for Valuation {
    fn sum<I: Iterator<Item = Valuation>>(iter: I) -> Valuation {
        iter.fold(Valuation::Finite(0), |acc, v| acc + v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

// Finite valuations serialize as JSON numbers, infinity as the string "inf".
impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_u64(*v),
            Valuation::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(Valuation::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(Valuation::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad valuation {s:?}"))),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<Prime> {
    if bound < 2 {
        return Vec::new();
    }
    let len = bound as usize + 1;
    let mut composite = vec![false; len];
    let mut primes = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn inverse_mod(a: u64, modulus: u64) -> Option<u64> {
    let (mut r0, mut r1) = (modulus as i128, (a % modulus) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(modulus as i128) as u64)
}

/// Euler's criterion for a unit `u` modulo an odd prime.
pub fn is_quadratic_residue(u: u64, p: Prime) -> bool {
    pow_mod(u, (p - 1) / 2, p) == 1
}

/// Exponent of `p` in an integer; `Infinity` for zero.
pub fn int_val(n: &BigInt, p: Prime) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinity;
    }
    let p_big = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0u64;
    loop {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        m = q;
        v += 1;
    }
}

/// Legendre's formula: the exponent of `p` in `m!`.
pub fn legendre_factorial_val(m: u64, p: Prime) -> u64 {
    let mut total = 0;
    let mut power = p;
    while power <= m {
        total += m / power;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    total
}

/// Parses `"a"` or `"a/b"` into a reduced rational.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse {
            input: input.to_string(),
        })
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator(input.to_string()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// An element of Z_(p): an exact rational whose denominator is prime to `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalInt {
    value: BigRational,
    prime: Prime,
}

impl LocalInt {
    pub fn new(value: BigRational, prime: Prime) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if (value.denom() % BigInt::from(prime)).is_zero() {
            return Err(Error::NotLocal {
                value: value.to_string(),
                prime,
            });
        }
        Ok(LocalInt { value, prime })
    }

    pub fn integer(k: impl Into<BigInt>, prime: Prime) -> Result<Self> {
        LocalInt::new(BigRational::from_integer(k.into()), prime)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `self - c` for an integer `c`; stays in Z_(p).
    pub fn minus_integer(&self, c: &BigInt) -> LocalInt {
        LocalInt {
            value: &self.value - BigRational::from_integer(c.clone()),
            prime: self.prime,
        }
    }

    pub fn times(&self, other: &LocalInt) -> LocalInt {
        debug_assert_eq!(self.prime, other.prime);
        LocalInt {
            value: &self.value * &other.value,
            prime: self.prime,
        }
    }

    /// The unit part `k / p^val` reduced modulo `modulus`, which must be coprime
    /// to the denominator. `None` for zero.
    pub fn unit_residue(&self, modulus: u64) -> Option<u64> {
        let v = val_p(self).finite()?;
        let p_pow = BigInt::from(self.prime).pow(v as u32);
        let m = BigInt::from(modulus);
        let unit_num = (self.value.numer() / p_pow).mod_floor(&m).to_u64()?;
        let den = self.value.denom().mod_floor(&m).to_u64()?;
        let den_inv = inverse_mod(den, modulus)?;
        Some(((unit_num as u128 * den_inv as u128) % modulus as u128) as u64)
    }
}

impl fmt::Display for LocalInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The p-adic valuation `|k|_p`; denominators are p-free so only the numerator counts.
pub fn val_p(k: &LocalInt) -> Valuation {
    int_val(k.value.numer(), k.prime)
}

/// Membership in D_p: zero, or a p-adic square (for p = 2, a unit congruent to 1 mod 8).
pub fn in_d_p(k: &LocalInt) -> bool {
    let v = match val_p(k) {
        Valuation::Infinity => return true,
        Valuation::Finite(v) => v,
    };
    let p = k.prime;
    if p == 2 {
        return v == 0 && k.unit_residue(8) == Some(1);
    }
    if v % 2 == 1 {
        return false;
    }
    match k.unit_residue(p) {
        Some(u) => is_quadratic_residue(u, p),
        None => false,
    }
}

/// A residue class `residue mod p^precision`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    prime: Prime,
    precision: u32,
    residue: u64,
}

impl ResidueClass {
    pub fn new(prime: Prime, precision: u32, residue: u64) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        assert!(precision >= 1, "residue class precision must be at least 1");
        let modulus = prime
            .checked_pow(precision)
            .expect("residue class modulus overflows u64");
        assert!(
            residue < modulus,
            "residue {residue} out of range mod {modulus}"
        );
        Ok(ResidueClass {
            prime,
            precision,
            residue,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.prime.pow(self.precision)
    }

    /// Valuation common to every element of the class; `Infinity` for the
    /// zero class, whose elements all have valuation at least `precision`.
    pub fn valuation(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::Infinity;
        }
        let mut r = self.residue;
        let mut v = 0;
        while r.is_multiple_of(self.prime) {
            r /= self.prime;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// Whether the whole class lies in D_p. `None` when the precision is too
    /// low to decide (the zero class, or a 2-adic unit known only mod 2 or 4).
    pub fn d_p_compatible(&self) -> Option<bool> {
        let v = self.valuation().finite()?;
        let unit = self.residue / self.prime.pow(v as u32);
        if self.prime == 2 {
            if v > 0 {
                return Some(false);
            }
            if self.precision < 3 {
                return None;
            }
            return Some(unit % 8 == 1);
        }
        if v % 2 == 1 {
            return Some(false);
        }
        Some(is_quadratic_residue(unit % self.prime, self.prime))
    }
}
