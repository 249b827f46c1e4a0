//! The congruence system C_1..C_n, its p-local closed form, the exponent
//! functions `e(p, n)` and `f(p, n)`, and the residue scans that check the
//! closed form by exhaustion.
//!
//! C_m asks that `prod_{i<m} (k - i^2)` be divisible by `(2m)!`, or by
//! `(2m)!/2` when `m` is odd. Locally at `p` this is a comparison of
//! valuation sums, so rational `k` never needs the product built.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{
    in_d_p, is_prime, legendre_factorial_val, primes_up_to, val_p, LocalInt, Prime, ResidueClass,
    Valuation,
};

/// Default cap on the number of residue classes a scan may visit.
pub const DEFAULT_SCAN_GUARD: u64 = 1 << 24;

/// Valuation at `p` of the modulus of C_m.
pub fn modulus_val(m: u32, p: Prime) -> u64 {
    assert!(m >= 1, "congruence level must be at least 1");
    let full = legendre_factorial_val(2 * m as u64, p);
    if p == 2 && m % 2 == 1 {
        full - 1
    } else {
        full
    }
}

/// The largest modulus valuation over C_1..C_n; residues mod `p^c` decide them all.
pub fn scan_precision(p: Prime, n: u32) -> u64 {
    (1..=n).map(|m| modulus_val(m, p)).max().unwrap_or(0)
}

/// Local test of C_m at `k.prime()`. Returns the verdict and
/// `sum_{i<m} |k - i^2|_p`.
pub fn satisfies_c(k: &LocalInt, m: u32) -> (bool, Valuation) {
    let product_val: Valuation = (0..m as u64)
        .map(|i| val_p(&k.minus_integer(&BigInt::from(i * i))))
        .sum();
    (product_val.at_least(modulus_val(m, k.prime())), product_val)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEvidence {
    pub m: u32,
    pub product_valuation: Valuation,
    pub modulus_valuation: u64,
    pub satisfied: bool,
}

/// Outcome of C_1..C_n at one prime, with the valuation comparison per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceVerdict {
    pub k: BigRational,
    pub prime: Prime,
    pub n: u32,
    pub per_level: Vec<LevelEvidence>,
    pub overall: bool,
}

impl CongruenceVerdict {
    /// First level whose congruence fails.
    pub fn first_failure(&self) -> Option<u32> {
        self.per_level.iter().find(|l| !l.satisfied).map(|l| l.m)
    }
}

pub fn fg_local_direct(k: &LocalInt, n: u32) -> CongruenceVerdict {
    assert!(n >= 1, "level must be at least 1");
    let per_level: Vec<LevelEvidence> = (1..=n)
        .map(|m| {
            let (satisfied, product_valuation) = satisfies_c(k, m);
            LevelEvidence {
                m,
                product_valuation,
                modulus_valuation: modulus_val(m, k.prime()),
                satisfied,
            }
        })
        .collect();
    let overall = per_level.iter().all(|l| l.satisfied);
    CongruenceVerdict {
        k: k.value().clone(),
        prime: k.prime(),
        n,
        per_level,
        overall,
    }
}

/// `e(p, n)`: FG_{n,p} is D_p together with the multiples of `p^e`.
pub fn e_exponent(p: Prime, n: u32) -> u64 {
    assert!(n >= 1, "level must be at least 1");
    if n == 1 {
        return 0;
    }
    if p == 2 {
        return 1 + 2 * (31 - n.leading_zeros()) as u64;
    }
    // k = p^j or k = ((p+1)/2) p^(j-1); the two families never collide since
    // (p+1)/2 > 1 is prime to p.
    let n = n as u64;
    let half = p.div_ceil(2);
    let mut count = 0;
    let mut power = 1u64; // p^(j-1)
    while power <= n {
        if power.saturating_mul(half) <= n {
            count += 1;
        }
        if power.saturating_mul(p) <= n {
            count += 1;
        }
        power = power.saturating_mul(p);
    }
    count
}

/// `f(p, n)`: the exponent for which every multiple of `p^f` is claimed as
/// a realizable degree.
pub fn f_exponent(p: Prime, n: u32) -> u64 {
    assert!(n >= 1, "level must be at least 1");
    if n <= 5 {
        return e_exponent(p, n);
    }
    if p == 2 {
        return 4 * (n as u64 / 2) - 3;
    }
    let ratio = BigRational::new(BigInt::from(2 * n as u64 - 2), BigInt::from(p - 1));
    let value = -(BigRational::one() - ratio).floor();
    value
        .to_integer()
        .to_u64()
        .expect("f(p, n) is non-negative for n > 5")
}

/// Closed-form membership in FG_{n,p} = D_p ∪ p^e Z_(p).
pub fn fg_local_closed(k: &LocalInt, n: u32) -> bool {
    in_d_p(k) || val_p(k).at_least(e_exponent(k.prime(), n))
}

/// Which of the two known-true regions, if any, covers `(p, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProofStatus {
    #[serde(rename = "PROVEN_N_LE_5")]
    ProvenNLe5,
    #[serde(rename = "PROVEN_ODD_RANGE")]
    ProvenOddRange,
    #[serde(rename = "OPEN")]
    Open,
}

impl ProofStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ProofStatus::ProvenNLe5 => "PROVEN_N_LE_5",
            ProofStatus::ProvenOddRange => "PROVEN_ODD_RANGE",
            ProofStatus::Open => "OPEN",
        }
    }
}

pub fn proven_status(p: Prime, n: u32) -> ProofStatus {
    if n <= 5 {
        ProofStatus::ProvenNLe5
    } else if p != 2 && 2 * (n as u64) < (2 * p + 1) * (p - 1) {
        ProofStatus::ProvenOddRange
    } else {
        ProofStatus::Open
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentRow {
    pub p: Prime,
    pub n: u32,
    pub e: u64,
    pub f: u64,
    pub status: ProofStatus,
}

pub fn exponent_row(p: Prime, n: u32) -> ExponentRow {
    ExponentRow {
        p,
        n,
        e: e_exponent(p, n),
        f: f_exponent(p, n),
        status: proven_status(p, n),
    }
}

/// Rows for every prime `p <= pmax` and `1 <= n <= nmax`, sorted by `(p, n)`.
pub fn exponent_table(pmax: u64, nmax: u32) -> Vec<ExponentRow> {
    primes_up_to(pmax)
        .into_iter()
        .flat_map(|p| (1..=nmax).map(move |n| exponent_row(p, n)))
        .collect()
}

/// Global verdict for C_1..C_n over the integers localized away from the
/// primes below `2n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalVerdict {
    pub k: BigRational,
    pub n: u32,
    pub member: bool,
    pub per_prime: Vec<CongruenceVerdict>,
}

impl GlobalVerdict {
    /// First `(prime, level)` at which a congruence fails.
    pub fn failure(&self) -> Option<(Prime, u32)> {
        self.per_prime
            .iter()
            .find_map(|v| v.first_failure().map(|m| (v.prime, m)))
    }
}

/// The primes that can divide some modulus of C_1..C_n.
pub fn relevant_primes(n: u32) -> Vec<Prime> {
    primes_up_to(2 * n as u64 - 1)
}

/// Decides C_1..C_n for `k` one prime at a time. Integer `k` is also decided
/// by direct divisibility and the two routes must agree.
pub fn fg_global(k: &BigRational, n: u32) -> Result<GlobalVerdict> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let per_prime = relevant_primes(n)
        .into_iter()
        .map(|p| LocalInt::new(k.clone(), p).map(|local| fg_local_direct(&local, n)))
        .collect::<Result<Vec<_>>>()?;
    let member = per_prime.iter().all(|v| v.overall);
    if k.is_integer() {
        assert_eq!(
            member,
            fg_global_divisibility(k.numer(), n),
            "valuation and divisibility routes disagree for k = {k}, n = {n}"
        );
    }
    Ok(GlobalVerdict {
        k: k.clone(),
        n,
        member,
        per_prime,
    })
}

/// Direct route: `(2m)!` (halved for odd `m`) divides `prod_{i<m} (k - i^2)`
/// for every `m <= n`.
pub fn fg_global_divisibility(k: &BigInt, n: u32) -> bool {
    let mut product = BigInt::one();
    let mut factorial = BigInt::one();
    for m in 1..=n as u64 {
        product *= k - BigInt::from((m - 1) * (m - 1));
        factorial *= BigInt::from((2 * m - 1) * (2 * m));
        let modulus = if m % 2 == 1 {
            &factorial / 2
        } else {
            factorial.clone()
        };
        if !product.is_multiple_of(&modulus) {
            return false;
        }
    }
    true
}

/// Flags residues `r < p^c` all of whose lifts satisfy C_1..C_n at `p`,
/// where `c = scan_precision(p, n)`.
pub fn local_solution_table(p: Prime, n: u32, guard: u64) -> Result<Vec<bool>> {
    let precision = scan_precision(p, n);
    let classes = checked_prime_power(p, precision, guard)?;
    let thresholds: Vec<u64> = (1..=n).map(|m| modulus_val(m, p)).collect();
    Ok((0..classes)
        .into_par_iter()
        .map(|r| residue_solves(r, p, &thresholds))
        .collect())
}

fn residue_solves(r: u64, p: Prime, thresholds: &[u64]) -> bool {
    let mut total = 0u64;
    for (i, &needed) in thresholds.iter().enumerate() {
        let diff = r as i128 - (i as i128) * (i as i128);
        if diff == 0 {
            // the factor k - i^2 vanishes, so every later product does too
            return true;
        }
        total += small_val(diff.unsigned_abs(), p);
        if total < needed {
            return false;
        }
    }
    true
}

fn small_val(mut x: u128, p: Prime) -> u64 {
    let p = p as u128;
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

fn checked_prime_power(p: Prime, exp: u64, guard: u64) -> Result<u64> {
    let too_large = || Error::ScanTooLarge {
        classes: format!("{p}^{exp}"),
        guard,
    };
    let exp = u32::try_from(exp).map_err(|_| too_large())?;
    match p.checked_pow(exp) {
        Some(v) if v <= guard => Ok(v),
        _ => Err(too_large()),
    }
}

/// Smallest modulus for which membership in FG_n depends only on the residue.
pub fn minimal_sound_modulus(n: u32) -> BigInt {
    relevant_primes(n)
        .into_iter()
        .map(|p| BigInt::from(p).pow(scan_precision(p, n) as u32))
        .product()
}

/// Residues `r mod modulus` all of whose lifts satisfy C_1..C_n.
///
/// `modulus` must be a multiple of [`minimal_sound_modulus`]`(n)`; `(2n)!`
/// always qualifies. At most `guard` residues are enumerated.
pub fn fg_residues(n: u32, modulus: u64, guard: u64) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let required = minimal_sound_modulus(n);
    if modulus == 0 || !BigInt::from(modulus).is_multiple_of(&required) {
        return Err(Error::UnsoundModulus {
            modulus,
            n,
            required: required.to_string(),
        });
    }
    if modulus > guard {
        return Err(Error::ScanTooLarge {
            classes: modulus.to_string(),
            guard,
        });
    }
    let local: Vec<(u64, Vec<bool>)> = relevant_primes(n)
        .into_iter()
        .map(|p| {
            let table = local_solution_table(p, n, guard)?;
            Ok((table.len() as u64, table))
        })
        .collect::<Result<_>>()?;
    let mut residues: Vec<u64> = (0..modulus)
        .into_par_iter()
        .filter(|r| local.iter().all(|(m, table)| table[(r % m) as usize]))
        .collect();
    residues.sort_unstable();
    Ok(residues)
}

/// Exponent recovered by exhaustive scan of residues mod `p^c`: the least
/// `t` such that every residue of valuation `>= t` solves C_1..C_n.
///
/// Also checks that below `t` the solutions are exactly the D_p-compatible
/// classes, returning [`Error::ClosedFormMismatch`] otherwise. A scan larger
/// than `guard` is reported as [`Error::ScanTooLarge`].
pub fn e_exponent_bruteforce(p: Prime, n: u32, guard: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::ZeroLevel);
    }
    let precision = scan_precision(p, n) as u32;
    let table = local_solution_table(p, n, guard)?;
    if precision == 0 {
        // a single class, and it contains 0
        return Ok(0);
    }

    let classes: Vec<ResidueClass> = (0..table.len() as u64)
        .map(|r| ResidueClass::new(p, precision, r))
        .collect::<Result<_>>()?;
    let depth = |c: &ResidueClass| match c.valuation() {
        Valuation::Finite(v) => v,
        Valuation::Infinity => precision as u64,
    };

    // failing[v] is set when some class of valuation exactly v fails
    let mut failing = vec![false; precision as usize + 1];
    for (class, &solved) in classes.iter().zip(&table) {
        if !solved {
            failing[depth(class) as usize] = true;
        }
    }
    let exponent = (0..=precision as u64)
        .find(|&t| failing[t as usize..].iter().all(|f| !f))
        .expect("the zero class always solves the congruences");

    for (class, &in_scan) in classes.iter().zip(&table) {
        if depth(class) >= exponent {
            continue;
        }
        // below the exponent each class must be decided by D_p alone
        let in_d_p = class.d_p_compatible().unwrap_or(false);
        if in_scan != in_d_p {
            return Err(Error::ClosedFormMismatch {
                prime: p,
                n,
                precision,
                residue: class.residue(),
                in_scan,
                in_d_p,
            });
        }
    }
    Ok(exponent)
}

/// Reduces an integer into the local ring at `p`, for the scanners' callers.
pub fn local_integer(k: i64, p: Prime) -> LocalInt {
    LocalInt::integer(k, p).expect("integers are p-local for prime p")
}
