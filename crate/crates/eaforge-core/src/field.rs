//! `GF(2^n)` arithmetic in polynomial basis.
//!
//! A field element is an n-bit integer whose bit `i` is the coefficient of
//! `alpha^i`, where `alpha` is the residue class of `X` modulo the defining
//! polynomial. This identification makes the field element encoding and the
//! crate-wide vector encoding literally the same integer, so a univariate
//! polynomial can be tabulated into a truth table without any basis
//! conversion. All class invariants computed downstream are independent of
//! this basis choice.

use alloc::vec::Vec;

use crate::vbf::Vbf;
use crate::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 16;

/// A binary field `GF(2^n)` given by an irreducible modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    n: usize,
    modulus: u32,
}

impl FieldSpec {
    /// Builds the field, checking that the modulus has degree exactly `n`,
    /// a nonzero constant term and is irreducible over `F_2`.
    pub fn new(n: usize, modulus: u32) -> Result<FieldSpec, Error> {
        if n == 0 || n > MAX_DEGREE {
            return Err(Error::SizeCap { n, cap: MAX_DEGREE });
        }
        if modulus >> n != 1 || modulus & 1 == 0 || !poly_is_irreducible(modulus) {
            return Err(Error::NotIrreducible { modulus });
        }
        Ok(FieldSpec { n, modulus })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// The residue class of `X`, i.e. the element usually written `alpha`.
    pub fn generator_x(&self) -> u32 {
        2
    }

    /// Product in `GF(2^n)`: carry-less multiply then reduction.
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        debug_assert!(a < 1 << self.n && b < 1 << self.n);
        let mut acc: u64 = 0;
        let a = a as u64;
        for i in 0..self.n {
            if b >> i & 1 == 1 {
                acc ^= a << i;
            }
        }
        // Reduce the (2n-1)-bit product modulo the defining polynomial.
        let m = self.modulus as u64;
        for i in (self.n..2 * self.n).rev() {
            if acc >> i & 1 == 1 {
                acc ^= m << (i - self.n);
            }
        }
        acc as u32
    }

    /// Power in `GF(2^n)` by square and multiply, with `0^0 = 1`.
    pub fn pow(&self, a: u32, mut k: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }
}

/// A univariate polynomial over `GF(2^n)`, a sum of `c * X^e` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateSpec {
    field: FieldSpec,
    terms: Vec<(u32, u64)>,
}

impl UnivariateSpec {
    /// Terms are `(coefficient, exponent)` pairs with distinct exponents.
    pub fn new(field: FieldSpec, terms: Vec<(u32, u64)>) -> Result<UnivariateSpec, Error> {
        for (i, &(c, e)) in terms.iter().enumerate() {
            if c >> field.n != 0 {
                return Err(Error::DimensionMismatch);
            }
            if terms[..i].iter().any(|&(_, e2)| e2 == e) {
                return Err(Error::DuplicateExponent { exponent: e });
            }
        }
        Ok(UnivariateSpec { field, terms })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    /// Evaluates the polynomial at a point.
    pub fn eval(&self, x: u32) -> u32 {
        self.terms
            .iter()
            .fold(0, |acc, &(c, e)| acc ^ self.field.mul(c, self.field.pow(x, e)))
    }
}

/// Tabulates the vectorial Boolean function `x -> P(x)` under the
/// polynomial-basis identification of `F_2^n` with `GF(2^n)`.
pub fn vbf_from_univariate(spec: &UnivariateSpec) -> Vbf {
    let n = spec.field.n;
    let table: Vec<u32> = (0..1u32 << n).map(|x| spec.eval(x)).collect();
    Vbf::from_table(n, n, table).expect("field arithmetic stays in range")
}

/// Irreducibility over `F_2` by the standard criterion: `X^(2^n) = X`
/// modulo `f`, and `gcd(X^(2^(n/p)) - X, f) = 1` for every prime `p`
/// dividing `n`.
fn poly_is_irreducible(f: u32) -> bool {
    let n = poly_degree(f);
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    // x^(2^k) mod f, computed by repeated squaring mod f.
    let pow_frobenius = |k: usize| -> u32 {
        let mut x = 2u64; // the polynomial X
        for _ in 0..k {
            x = poly_mulmod(x, x, f as u64);
        }
        x as u32
    };
    if pow_frobenius(n) != 2 {
        return false;
    }
    for p in distinct_prime_factors(n) {
        let probe = pow_frobenius(n / p) ^ 2;
        if poly_gcd(probe, f) != 1 {
            return false;
        }
    }
    true
}

fn distinct_prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn poly_degree(f: u32) -> usize {
    (31 - f.leading_zeros()) as usize
}

/// Product of two binary polynomials reduced modulo `f`.
fn poly_mulmod(a: u64, b: u64, f: u64) -> u64 {
    let deg = poly_degree(f as u32) as u64;
    let mut acc = 0u64;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> deg & 1 == 1 {
            a ^= f;
        }
    }
    acc
}

/// Binary polynomial gcd.
fn poly_gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        while a != 0 && poly_degree_or_zero(a) >= poly_degree_or_zero(b) {
            a ^= b << (poly_degree_or_zero(a) - poly_degree_or_zero(b));
        }
        core::mem::swap(&mut a, &mut b);
    }
    a
}

fn poly_degree_or_zero(f: u32) -> usize {
    if f == 0 {
        0
    } else {
        poly_degree(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf64() -> FieldSpec {
        FieldSpec::new(6, 0x5b).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(FieldSpec::new(6, 0x5b).is_ok());
        // x^6 + x^5 + ... wrong degree bit
        assert!(FieldSpec::new(6, 0x1b).is_err());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 is reducible
        assert!(FieldSpec::new(4, 0b10101).is_err());
        // x^2 + 1 = (x+1)^2 is reducible
        assert!(FieldSpec::new(2, 0b101).is_err());
        // x^2 + x + 1 is irreducible
        assert!(FieldSpec::new(2, 0b111).is_ok());
        // zero constant term
        assert!(FieldSpec::new(6, 0x5a).is_err());
        // AES polynomial x^8 + x^4 + x^3 + x + 1
        assert!(FieldSpec::new(8, 0x11b).is_ok());
        // x^8 + x^4 + x^3 + x^2 + 1 is also irreducible (and primitive)
        assert!(FieldSpec::new(8, 0x11d).is_ok());
    }

    #[test]
    fn mul_identity_and_reduction() {
        let f = gf64();
        let alpha = f.generator_x();
        assert_eq!(f.mul(1, alpha), alpha);
        // alpha * alpha^5 = alpha^6 = alpha^4 + alpha^3 + alpha + 1
        assert_eq!(f.mul(alpha, f.pow(alpha, 5)), 0x1b);
    }

    #[test]
    fn primitive_alpha_has_order_63() {
        let f = gf64();
        assert_eq!(f.pow(2, 63), 1);
        for k in 1..63 {
            assert_ne!(f.pow(2, k), 1, "alpha^{k} should not be 1");
        }
    }

    #[test]
    fn power_law_matches_exponent_arithmetic() {
        // alpha^j * alpha^k = alpha^((j+k) mod 63) over all pairs.
        let f = gf64();
        let alpha = 2u32;
        let powers: Vec<u32> = (0..63).map(|k| f.pow(alpha, k)).collect();
        for j in 0..63u64 {
            for k in 0..63u64 {
                assert_eq!(
                    f.mul(powers[j as usize], powers[k as usize]),
                    powers[((j + k) % 63) as usize]
                );
            }
        }
    }

    #[test]
    fn mul_is_commutative_associative_distributive() {
        let f = FieldSpec::new(4, 0b10011).unwrap();
        for a in 0..16 {
            for b in 0..16 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..16 {
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
                }
            }
        }
    }

    #[test]
    fn pow_conventions() {
        let f = gf64();
        for a in 0..64 {
            assert_eq!(f.pow(a, 0), 1);
            assert_eq!(f.pow(a, 1), a);
        }
    }

    #[test]
    fn constant_polynomial_tabulates_to_constant() {
        let spec = UnivariateSpec::new(gf64(), alloc::vec![(5, 0)]).unwrap();
        let f = vbf_from_univariate(&spec);
        assert!((0..64).all(|x| f.eval(x) == 5));
    }

    #[test]
    fn duplicate_exponents_rejected() {
        assert!(UnivariateSpec::new(gf64(), alloc::vec![(1, 3), (2, 3)]).is_err());
    }

    #[test]
    fn frobenius_monomials_are_linear() {
        // x^(2^k) is F_2-linear: its table must satisfy additivity.
        for k in 0..4u32 {
            let spec = UnivariateSpec::new(gf64(), alloc::vec![(1, 1 << k)]).unwrap();
            let f = vbf_from_univariate(&spec);
            assert!(f.degree() <= 1);
            for x in 0..64u32 {
                for y in 0..64u32 {
                    assert_eq!(f.eval(x) ^ f.eval(y), f.eval(x ^ y) ^ f.eval(0));
                }
            }
        }
    }
}
