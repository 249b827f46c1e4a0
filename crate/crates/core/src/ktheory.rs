//! K-theory of HP^n as the truncated ring Q[x]/x^{n+1}, its Adams operations,
//! and the endomorphism test for degrees.
//!
//! A degree `k` passes when the unique rational ring endomorphism `phi` with
//! `phi(x) = k x + ...` commuting with every Adams operation has integer
//! coefficients and even coefficients at even powers of `x`.
//!
//! `phi` is built in the eigenbasis of `psi^2`: the eigenvector `v` for the
//! eigenvalue 4 is shared by all `psi^l`, its powers `v^j` span the ring, and
//! `phi` is forced to send `v^j` to `k^j v^j`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// `sum_{j=1}^{n} b_j x^j` in Q[x]/x^{n+1}; `coeffs[j - 1]` holds `b_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncPoly {
    coeffs: Vec<BigRational>,
}

impl TruncPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "truncation level must be at least 1");
        TruncPoly { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        TruncPoly::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn zero(level: usize) -> Self {
        TruncPoly::new(vec![BigRational::zero(); level])
    }

    /// The generator `x` itself.
    pub fn generator(level: usize) -> Self {
        let mut p = TruncPoly::zero(level);
        p.coeffs[0] = BigRational::one();
        p
    }

    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `x^j`, `1 <= j <= level`.
    pub fn coeff(&self, j: usize) -> &BigRational {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    fn check_level(&self, other: &TruncPoly) -> Result<()> {
        if self.level() != other.level() {
            return Err(Error::LevelMismatch {
                left: self.level(),
                right: other.level(),
            });
        }
        Ok(())
    }

    /// Product truncated past `x^n`.
    pub fn mul(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check_level(other)?;
        let n = self.level();
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            // x^(i+1) * x^(j+1) lands at index i + j + 1
            for (j, b) in other
                .coeffs
                .iter()
                .enumerate()
                .take(n.saturating_sub(i + 1))
            {
                if !b.is_zero() {
                    out[i + j + 1] += a * b;
                }
            }
        }
        Ok(TruncPoly::new(out))
    }

    pub fn add(&self, other: &TruncPoly) -> Result<TruncPoly> {
        self.check_level(other)?;
        Ok(TruncPoly::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn scale(&self, c: &BigRational) -> TruncPoly {
        TruncPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `self^1, ..., self^n`.
    fn powers(&self) -> Vec<TruncPoly> {
        let mut out = Vec::with_capacity(self.level());
        let mut current = self.clone();
        for _ in 0..self.level() {
            let next = current.mul(self).expect("same level");
            out.push(current);
            current = next;
        }
        out
    }
}

impl fmt::Display for TruncPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = idx + 1;
            let monomial = if j == 1 {
                "x".to_string()
            } else {
                format!("x^{j}")
            };
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            if magnitude.is_one() {
                f.write_str(&monomial)?;
            } else if magnitude.is_integer() {
                write!(f, "{magnitude}{monomial}")?;
            } else {
                write!(f, "{magnitude} {monomial}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Coefficient of `x^j` in `psi^l(x)`: `2 prod_{i<j} (l^2 - i^2) / (2j)!`.
pub fn adams_coeff(l: i64, j: usize) -> BigRational {
    assert!(j >= 1, "Adams coefficient index starts at 1");
    let l2 = BigInt::from(l) * BigInt::from(l);
    let mut numer = BigInt::from(2);
    let mut denom = BigInt::one();
    for i in 0..j as u64 {
        numer *= &l2 - BigInt::from(i * i);
        denom *= BigInt::from((2 * i + 1) * (2 * i + 2));
    }
    BigRational::new(numer, denom)
}

/// `psi^l(x)` in K(HP^n).
pub fn psi(l: i64, n: usize) -> TruncPoly {
    TruncPoly::new((1..=n).map(|j| adams_coeff(l, j)).collect())
}

/// Applies the ring endomorphism `x -> f` to `g`: `sum_j g_j f^j`.
pub fn substitute(g: &TruncPoly, f: &TruncPoly) -> Result<TruncPoly> {
    g.check_level(f)?;
    let mut acc = TruncPoly::zero(g.level());
    for (g_j, f_j) in g.coeffs.iter().zip(f.powers()) {
        if !g_j.is_zero() {
            acc = acc.add(&f_j.scale(g_j))?;
        }
    }
    Ok(acc)
}

/// The eigenvector `x + a_2 x^2 + ...` of `psi^l` for the eigenvalue `l^2`.
///
/// The matrix of `psi^l` on `{x^j}` is triangular with diagonal `l^{2j}`, so
/// back-substitution determines each `a_i` once the eigenvalues are distinct.
pub fn eigenvector_v1(l: i64, n: usize) -> Result<TruncPoly> {
    if l < 2 {
        return Err(Error::DegenerateEigenvalues(l));
    }
    let powers = psi(l, n).powers();
    let eigenvalue = BigRational::from_integer(BigInt::from(l) * BigInt::from(l));
    let mut v = vec![BigRational::zero(); n];
    v[0] = BigRational::one();
    for i in 1..n {
        let mixed: BigRational = (0..i).map(|j| &v[j] * powers[j].coeff(i + 1)).sum();
        let diagonal = powers[i].coeff(i + 1);
        v[i] = mixed / (&eigenvalue - diagonal);
    }
    Ok(TruncPoly::new(v))
}

/// The unique rational endomorphism commuting with the Adams operations and
/// sending `x` to `k x + ...`, given by its value on `x`.
pub fn phi_endomorphism(k: &BigRational, n: usize) -> TruncPoly {
    let v = eigenvector_v1(2, n).expect("l = 2 has distinct eigenvalues");
    let basis = v.powers();

    // x = sum_j t_j v^j; each v^j starts at x^j with coefficient 1
    let mut residual = TruncPoly::generator(n);
    let mut t = Vec::with_capacity(n);
    for (j, vj) in basis.iter().enumerate() {
        let tj = residual.coeff(j + 1).clone();
        residual = residual.add(&vj.scale(&-&tj)).expect("same level");
        t.push(tj);
    }
    debug_assert!(residual.is_zero());

    let mut phi = TruncPoly::zero(n);
    let mut k_pow = BigRational::one();
    for (tj, vj) in t.iter().zip(&basis) {
        k_pow *= k;
        if !tj.is_zero() {
            phi = phi.add(&vj.scale(&(tj * &k_pow))).expect("same level");
        }
    }

    assert_eq!(phi.coeff(1), k, "phi must have leading coefficient k");
    for l in [2, 3] {
        let adams = psi(l, n);
        assert_eq!(
            substitute(&adams, &phi).expect("same level"),
            substitute(&phi, &adams).expect("same level"),
            "phi for k = {k} fails to commute with psi^{l} at level {n}"
        );
    }
    phi
}

/// Whether an integral class lies in the image of KSp: even coefficients at
/// even powers of `x`.
pub fn symplectic_parity_ok(f: &TruncPoly) -> Result<bool> {
    if let Some((idx, c)) = f.coeffs.iter().enumerate().find(|(_, c)| !c.is_integer()) {
        return Err(Error::NonIntegral {
            index: idx + 1,
            coeff: c.to_string(),
        });
    }
    let two = BigInt::from(2);
    Ok(f.coeffs
        .iter()
        .enumerate()
        .filter(|(idx, _)| (idx + 1) % 2 == 0)
        .all(|(_, c)| (c.numer() % &two).is_zero()))
}

/// Outcome of the endomorphism test for `k` at level `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoVerdict {
    pub k: BigRational,
    pub n: usize,
    pub phi: TruncPoly,
    pub integral: bool,
    pub parity_ok: bool,
    pub in_fg: bool,
}

pub fn fg_ktheory(k: &BigRational, n: usize) -> EndoVerdict {
    let phi = phi_endomorphism(k, n);
    let integral = phi.is_integral();
    // non-integral phi fails before parity is meaningful
    let parity_ok = integral && symplectic_parity_ok(&phi).expect("checked integral");
    EndoVerdict {
        k: k.clone(),
        n,
        phi,
        integral,
        parity_ok,
        in_fg: integral && parity_ok,
    }
}

/// `psi^l(y)` on KO(HP^n), transported along the complexification `x -> 2y`:
/// the coefficient of `y^j` is `c_j(l) 2^(j-1)`.
pub fn psi_ko(l: i64, n: usize) -> TruncPoly {
    let mut scale = BigRational::one();
    let two = BigRational::from_integer(2.into());
    TruncPoly::new(
        (1..=n)
            .map(|j| {
                let c = adams_coeff(l, j) * &scale;
                scale *= &two;
                c
            })
            .collect(),
    )
}

/// Complexification on coefficients: `sum b_j x^j -> sum b_j 2^j y^j`.
pub fn complexify(f: &TruncPoly) -> TruncPoly {
    let two = BigRational::from_integer(2.into());
    let mut scale = BigRational::one();
    TruncPoly::new(
        f.coeffs
            .iter()
            .map(|b| {
                scale *= &two;
                b * &scale
            })
            .collect(),
    )
}

/// Forgetful map on KO coefficients in the monomial basis
/// `y, z, y z, z^2, ...` (index `j` is `y z^((j-1)/2)` for odd `j` and
/// `z^(j/2)` for even `j`): odd monomials go to `x^j`, even ones to `2 x^j`.
pub fn forgetful_image(ko: &TruncPoly) -> TruncPoly {
    let two = BigRational::from_integer(2.into());
    TruncPoly::new(
        ko.coeffs
            .iter()
            .enumerate()
            .map(|(idx, a)| {
                if (idx + 1) % 2 == 0 {
                    a * &two
                } else {
                    a.clone()
                }
            })
            .collect(),
    )
}

/// Inverse of [`forgetful_image`] over the rationals.
pub fn forgetful_preimage(f: &TruncPoly) -> TruncPoly {
    let two = BigRational::from_integer(2.into());
    TruncPoly::new(
        f.coeffs
            .iter()
            .enumerate()
            .map(|(idx, b)| {
                if (idx + 1) % 2 == 0 {
                    b / &two
                } else {
                    b.clone()
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn poly(cs: &[&str]) -> TruncPoly {
        TruncPoly::new(cs.iter().map(|c| q(c)).collect())
    }

    #[test]
    fn adams_coeff_examples() {
        assert_eq!(adams_coeff(2, 2), q("1"));
        assert_eq!(adams_coeff(3, 3), q("1"));
        assert_eq!(adams_coeff(2, 3), q("0"));
        assert_eq!(adams_coeff(1, 1), q("1"));
        assert_eq!(adams_coeff(7, 1), q("49"));
        assert_eq!(adams_coeff(6, 3), q("112"));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(2, 4), TruncPoly::from_integers(&[4, 1, 0, 0]));
        assert_eq!(psi(3, 4), TruncPoly::from_integers(&[9, 6, 1, 0]));
        assert_eq!(psi(1, 3), TruncPoly::generator(3));
        assert_eq!(psi(-3, 4), psi(3, 4));
        assert_eq!(psi(0, 3), TruncPoly::zero(3));
    }

    #[test]
    fn substitute_examples() {
        let h = poly(&["3/2", "-1", "5"]);
        assert_eq!(substitute(&TruncPoly::generator(3), &h).unwrap(), h);
        let x2 = TruncPoly::from_integers(&[0, 1]);
        assert_eq!(
            substitute(&x2, &TruncPoly::from_integers(&[4, 1])).unwrap(),
            TruncPoly::from_integers(&[0, 16])
        );
        let composed = substitute(
            &TruncPoly::from_integers(&[9, 6, 1]),
            &TruncPoly::from_integers(&[4, 1, 0]),
        )
        .unwrap();
        assert_eq!(composed, TruncPoly::from_integers(&[36, 105, 112]));
        assert_eq!(composed, psi(6, 3));
    }

    #[test]
    fn substitute_rejects_level_mismatch() {
        assert_eq!(
            substitute(&psi(2, 3), &psi(2, 4)),
            Err(Error::LevelMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn eigenvector_examples() {
        assert_eq!(eigenvector_v1(2, 2).unwrap(), poly(&["1", "-1/12"]));
        assert_eq!(eigenvector_v1(2, 1).unwrap(), TruncPoly::generator(1));
        assert_eq!(eigenvector_v1(3, 2).unwrap(), poly(&["1", "-1/12"]));
        assert_eq!(eigenvector_v1(1, 3), Err(Error::DegenerateEigenvalues(1)));
        assert_eq!(eigenvector_v1(-2, 3), Err(Error::DegenerateEigenvalues(-2)));
    }

    #[test]
    fn eigenvector_is_fixed_up_to_scalar() {
        for l in 2..=5 {
            for n in 1..=8 {
                let v = eigenvector_v1(l, n).unwrap();
                let image = substitute(&v, &psi(l, n)).unwrap();
                assert_eq!(image, v.scale(&BigRational::from_integer((l * l).into())));
            }
        }
    }

    #[test]
    fn eigenvector_is_independent_of_l() {
        for n in 1..=8 {
            let v2 = eigenvector_v1(2, n).unwrap();
            assert_eq!(v2, eigenvector_v1(3, n).unwrap());
            assert_eq!(v2, eigenvector_v1(5, n).unwrap());
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(
            phi_endomorphism(&q("9"), 2),
            TruncPoly::from_integers(&[9, 6])
        );
        assert_eq!(phi_endomorphism(&q("2"), 2), poly(&["2", "1/6"]));
        assert_eq!(phi_endomorphism(&q("0"), 3), TruncPoly::zero(3));
        assert_eq!(phi_endomorphism(&q("1"), 4), TruncPoly::generator(4));
    }

    #[test]
    fn phi_of_a_square_is_the_adams_operation() {
        for l in 0..=5i64 {
            for n in 1..=6 {
                assert_eq!(phi_endomorphism(&q(&(l * l).to_string()), n), psi(l, n));
            }
        }
    }

    #[test]
    fn adams_semigroup_and_commutativity() {
        for n in 1..=8 {
            for l in 1..=5i64 {
                for m in 1..=5i64 {
                    assert_eq!(substitute(&psi(l, n), &psi(m, n)).unwrap(), psi(l * m, n));
                }
            }
            assert_eq!(
                substitute(&psi(2, n), &psi(3, n)).unwrap(),
                substitute(&psi(3, n), &psi(2, n)).unwrap()
            );
        }
    }

    #[test]
    fn adams_coefficients_are_integers() {
        for l in -20..=20 {
            for j in 1..=12 {
                assert!(adams_coeff(l, j).is_integer(), "c_{j}({l})");
            }
        }
    }

    #[test]
    fn parity_examples() {
        assert_eq!(
            symplectic_parity_ok(&TruncPoly::from_integers(&[9, 6])),
            Ok(true)
        );
        assert_eq!(
            symplectic_parity_ok(&TruncPoly::from_integers(&[4, 1])),
            Ok(false)
        );
        assert_eq!(symplectic_parity_ok(&TruncPoly::generator(1)), Ok(true));
        assert!(matches!(
            symplectic_parity_ok(&poly(&["2", "1/6"])),
            Err(Error::NonIntegral { index: 2, .. })
        ));
    }

    #[test]
    fn ktheory_verdict_examples() {
        let v = fg_ktheory(&q("9"), 2);
        assert!(v.integral && v.parity_ok && v.in_fg);

        let v = fg_ktheory(&q("4"), 2);
        assert_eq!(v.phi, TruncPoly::from_integers(&[4, 1]));
        assert!(v.integral && !v.parity_ok && !v.in_fg);

        let v = fg_ktheory(&q("2"), 2);
        assert!(!v.integral && !v.parity_ok && !v.in_fg);
    }

    #[test]
    fn psi_ko_examples() {
        assert_eq!(psi_ko(2, 2), TruncPoly::from_integers(&[4, 2]));
        assert_eq!(psi_ko(1, 3), TruncPoly::generator(3));
        assert_eq!(psi_ko(3, 3), TruncPoly::from_integers(&[9, 12, 4]));
    }

    #[test]
    fn psi_ko_is_transported_psi() {
        for l in -6..=6 {
            for n in 1..=10 {
                let ko = psi_ko(l, n);
                assert!(ko.is_integral());
                assert_eq!(ko.scale(&q("2")), complexify(&psi(l, n)));
            }
        }
    }

    #[test]
    fn display_formats() {
        assert_eq!(TruncPoly::from_integers(&[9, 6]).to_string(), "9x + 6x^2");
        assert_eq!(poly(&["2", "1/6"]).to_string(), "2x + 1/6 x^2");
        assert_eq!(poly(&["1", "-1/12"]).to_string(), "x - 1/12 x^2");
        assert_eq!(
            TruncPoly::from_integers(&[-1, 0, 1]).to_string(),
            "-x + x^3"
        );
        assert_eq!(TruncPoly::zero(3).to_string(), "0");
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-60i64..=60, 1i64..=12).prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
    }

    proptest! {
        #[test]
        fn phi_is_multiplicative(a in small_rational(), b in small_rational(), n in 1usize..=6) {
            let composed = substitute(&phi_endomorphism(&a, n), &phi_endomorphism(&b, n)).unwrap();
            prop_assert_eq!(composed, phi_endomorphism(&(&a * &b), n));
        }

        #[test]
        fn parity_is_forgetful_image(cs in prop::collection::vec(-50i64..=50, 1..10)) {
            let f = TruncPoly::from_integers(&cs);
            let preimage = forgetful_preimage(&f);
            prop_assert_eq!(symplectic_parity_ok(&f).unwrap(), preimage.is_integral());
            prop_assert_eq!(forgetful_image(&preimage), f);
        }
    }
}
