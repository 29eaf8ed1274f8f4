//! Arithmetic in the prime field F_q and small polynomial helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial-division primality test; moduli here are tiny.
pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut f = 2u32;
    while (f as u64) * (f as u64) <= q as u64 {
        if q % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

#[inline]
pub fn add_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 + b as u64) % q as u64) as u32
}

#[inline]
pub fn sub_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 + q as u64 - (b % q) as u64) % q as u64) as u32
}

#[inline]
pub fn mul_mod(a: u32, b: u32, q: u32) -> u32 {
    ((a as u64 * b as u64) % q as u64) as u32
}

#[inline]
pub fn neg_mod(a: u32, q: u32) -> u32 {
    (q - a % q) % q
}

/// Reduces a signed integer into `0..q`.
#[inline]
pub fn reduce(a: i64, q: u32) -> u32 {
    a.rem_euclid(q as i64) as u32
}

pub fn pow_mod(mut base: u32, mut exp: u64, q: u32) -> u32 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse by the extended Euclidean algorithm.
pub fn inv_mod(a: u32, q: u32) -> Result<u32> {
    let a = a % q;
    if a == 0 {
        return Err(Error::NotInvertible(a));
    }
    let (mut r0, mut r1) = (q as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (t0, t1) = (t1, t0 - quo * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible(a));
    }
    Ok(reduce(t0, q))
}

/// An element of F_q carrying its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    /// Builds `value mod q`; fails unless `q` is prime.
    pub fn new(value: i64, q: u32) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self {
            value: reduce(value, q),
            modulus: q,
        })
    }

    pub fn zero(q: u32) -> Result<Self> {
        Self::new(0, q)
    }

    pub fn one(q: u32) -> Result<Self> {
        Self::new(1, q)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        Self {
            value: pow_mod(self.value, exp, self.modulus),
            ..self
        }
    }

    pub fn inv(self) -> Result<Self> {
        field_inv(self)
    }

    fn check(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "mixed field moduli");
    }
}

/// Inverse of a nonzero field element.
pub fn field_inv(a: FieldElement) -> Result<FieldElement> {
    Ok(FieldElement {
        value: inv_mod(a.value, a.modulus)?,
        modulus: a.modulus,
    })
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: add_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: sub_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.check(rhs);
        Self {
            value: mul_mod(self.value, rhs.value, self.modulus),
            ..self
        }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: neg_mod(self.value, self.modulus),
            ..self
        }
    }
}

/// Horner evaluation of `coeffs[0] + coeffs[1] x + ...` over F_q.
pub fn poly_eval(coeffs: &[u32], x: u32, q: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| add_mod(mul_mod(acc, x, q), c, q))
}

/// Coefficients of the unique polynomial of degree `< xs.len()` through the points.
pub fn lagrange_interpolate(xs: &[u32], ys: &[u32], q: u32) -> Result<Vec<u32>> {
    if xs.len() != ys.len() {
        return Err(Error::ShapeMismatch("interpolation nodes and values differ in length".into()));
    }
    let n = xs.len();
    let mut out = vec![0u32; n];
    for i in 0..n {
        // basis numerator prod_{j != i} (x - x_j), built up coefficient-wise
        let mut basis = vec![1u32];
        let mut denom = 1u32;
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut next = vec![0u32; basis.len() + 1];
            for (k, &b) in basis.iter().enumerate() {
                next[k + 1] = add_mod(next[k + 1], b, q);
                next[k] = sub_mod(next[k], mul_mod(b, xs[j], q), q);
            }
            basis = next;
            denom = mul_mod(denom, sub_mod(xs[i], xs[j], q), q);
        }
        let scale = mul_mod(ys[i] % q, inv_mod(denom, q)?, q);
        for (k, b) in basis.iter().enumerate() {
            out[k] = add_mod(out[k], mul_mod(*b, scale, q), q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_below_thirty() {
        let found: Vec<u32> = (0..30).filter(|&q| is_prime(q)).collect();
        assert_eq!(found, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(FieldElement::new(1, 6), Err(Error::NotPrime(6)));
    }

    #[test]
    fn inverses_mod_five() {
        let expect = [(1, 1), (2, 3), (3, 2), (4, 4)];
        for (a, b) in expect {
            assert_eq!(inv_mod(a, 5).unwrap(), b);
        }
        assert!(inv_mod(0, 5).is_err());
    }

    #[test]
    fn element_ops() {
        let a = FieldElement::new(-1, 7).unwrap();
        let b = FieldElement::new(3, 7).unwrap();
        assert_eq!(a.value(), 6);
        assert_eq!((a + b).value(), 2);
        assert_eq!((b - a).value(), 4);
        assert_eq!((a * b).value(), 4);
        assert_eq!((-b).value(), 4);
        assert_eq!((b * b.inv().unwrap()).value(), 1);
        assert_eq!(b.pow(6).value(), 1);
    }

    #[test]
    fn interpolation_recovers_quadratic() {
        let q = 11;
        let coeffs = [4, 0, 7];
        let xs = [1, 2, 3];
        let ys: Vec<u32> = xs.iter().map(|&x| poly_eval(&coeffs, x, q)).collect();
        assert_eq!(lagrange_interpolate(&xs, &ys, q).unwrap(), coeffs.to_vec());
    }
}
