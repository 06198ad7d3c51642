// SPDX-License-Identifier: Apache-2.0
//! Arithmetic in prime fields GF(p) and polynomials over them.
//!
//! Elements carry their modulus so that values from different fields
//! cannot be mixed silently. Polynomials are stored lowest degree first
//! with trailing zeros stripped; the zero polynomial has degree -1.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not a prime in [2, 2^31)")]
    BadModulus(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Field {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(Field { p: p as u32 })
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduces any integer into the field.
    pub fn elem(self, v: i64) -> FieldElement {
        FieldElement { v: v.rem_euclid(self.p as i64) as u32, p: self.p }
    }

    pub fn zero(self) -> FieldElement {
        FieldElement { v: 0, p: self.p }
    }

    pub fn one(self) -> FieldElement {
        FieldElement { v: 1 % self.p, p: self.p }
    }
}

/// A residue in `[0, p)` tagged with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    v: u32,
    p: u32,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.v
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn field(self) -> Field {
        Field { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.v == 0
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self) -> Result<Self, FieldError> {
        if self.v == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        let (mut r0, mut r1) = (self.p as i64, self.v as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.field().elem(t0))
    }

    /// Returns `q` with `q * rhs == self`.
    pub fn checked_div(self, rhs: Self) -> Result<Self, FieldError> {
        if self.p != rhs.p {
            return Err(FieldError::ModulusMismatch(self.p, rhs.p));
        }
        Ok(self * rhs.inv()?)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

fn same_field(a: FieldElement, b: FieldElement) -> u32 {
    assert_eq!(a.p, b.p, "field elements from different fields");
    a.p
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let p = same_field(self, rhs);
        FieldElement { v: ((self.v as u64 + rhs.v as u64) % p as u64) as u32, p }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let p = same_field(self, rhs);
        FieldElement { v: ((self.v as u64 + p as u64 - rhs.v as u64) % p as u64) as u32, p }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let p = same_field(self, rhs);
        FieldElement { v: ((self.v as u64 * rhs.v as u64) % p as u64) as u32, p }
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement { v: (self.p - self.v) % self.p, p: self.p }
    }
}

/// `a / b` in GF(p).
pub fn field_div(a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
    a.checked_div(b)
}

/// A polynomial over GF(p), constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl FieldPoly {
    pub fn zero(field: Field) -> Self {
        FieldPoly { field, coeffs: Vec::new() }
    }

    /// Builds a polynomial from unreduced integer coefficients.
    pub fn from_ints(field: Field, raw: &[i64]) -> Self {
        Self::from_coeffs(field, raw.iter().map(|&c| field.elem(c)).collect())
    }

    pub fn from_coeffs(field: Field, mut coeffs: Vec<FieldElement>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.p == field.p));
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FieldPoly { field, coeffs }
    }

    /// `c * x^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let f = c.field();
        let mut coeffs = vec![f.zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(f, coeffs)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(self.field.zero())
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    /// Largest `e` with `x^e` dividing the polynomial; `None` for zero.
    pub fn x_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn shift_down(&self, e: usize) -> Self {
        FieldPoly { field: self.field, coeffs: self.coeffs.iter().skip(e).copied().collect() }
    }

    pub fn shift_up(&self, e: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); e];
        coeffs.extend_from_slice(&self.coeffs);
        FieldPoly { field: self.field, coeffs }
    }

    /// Scales so the leading coefficient is one. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => {
                let li = l.inv().expect("leading coefficient is nonzero");
                self.scale(li)
            }
        }
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        Self::from_coeffs(self.field, self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::from_coeffs(self.field, (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::from_coeffs(self.field, (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self::from_coeffs(self.field, out)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, rhs: &Self) -> Result<(Self, Self), FieldError> {
        let lead_inv = rhs.leading().ok_or(FieldError::DivisionByZero(self.field.p))?.inv()?;
        let mut rem = self.coeffs.clone();
        let dr = rhs.coeffs.len();
        if rem.len() < dr {
            return Ok((Self::zero(self.field), self.clone()));
        }
        let mut quot = vec![self.field.zero(); rem.len() - dr + 1];
        for s in (0..quot.len()).rev() {
            let q = rem[s + dr - 1] * lead_inv;
            quot[s] = q;
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                rem[s + j] = rem[s + j] - q * b;
            }
        }
        Ok((Self::from_coeffs(self.field, quot), Self::from_coeffs(self.field, rem)))
    }

    pub fn eval(&self, x: FieldElement) -> FieldElement {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, &c| acc * x + c)
    }
}

/// Strips trailing zeros from a raw coefficient sequence.
pub fn poly_normalize(field: Field, raw: &[i64]) -> FieldPoly {
    FieldPoly::from_ints(field, raw)
}

impl fmt::Display for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 mod {}", self.field.p);
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.v.to_string()).collect();
        write!(f, "{} mod {}", parts.join(","), self.field.p)
    }
}

impl FromStr for FieldPoly {
    type Err = FieldError;

    /// Parses `"c0,c1,... mod p"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let (body, p) = s.rsplit_once("mod").ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let field = Field::new(p)?;
        let coeffs = parse_coeffs(body).ok_or_else(bad)?;
        Ok(FieldPoly::from_ints(field, &coeffs))
    }
}

/// Parses a comma-separated list of integers, constant term first.
pub fn parse_coeffs(s: &str) -> Option<Vec<i64>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_large_moduli() {
        assert!(Field::new(1).is_err());
        assert!(Field::new(9).is_err());
        assert!(Field::new(1 << 31).is_err());
        assert!(Field::new(2_147_483_647).is_ok());
    }

    #[test]
    fn division_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(field_div(f2.one(), f2.one()).unwrap(), f2.one());
        let f7 = Field::new(7).unwrap();
        assert_eq!(field_div(f7.elem(3), f7.elem(5)).unwrap(), f7.elem(2));
        assert_eq!(field_div(f7.elem(4), f7.zero()), Err(FieldError::DivisionByZero(7)));
    }

    #[test]
    fn normalize_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(poly_normalize(f2, &[0, 0, 0]).degree(), -1);
        assert_eq!(poly_normalize(f2, &[1, 1, 0]).degree(), 1);
        let f7 = Field::new(7).unwrap();
        let p = poly_normalize(f7, &[6, 5 + 2, 1]);
        assert_eq!(p.coeffs().iter().map(|c| c.value()).collect::<Vec<_>>(), vec![6, 0, 1]);
    }

    #[test]
    fn text_round_trip() {
        let p: FieldPoly = "6,0,1 mod 7".parse().unwrap();
        assert_eq!(p.to_string(), "6,0,1 mod 7");
        let z: FieldPoly = "0 mod 5".parse().unwrap();
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0 mod 5");
        assert!("1,2 mod 8".parse::<FieldPoly>().is_err());
    }

    #[test]
    fn div_rem_reconstructs() {
        let f = Field::new(7).unwrap();
        let a = FieldPoly::from_ints(f, &[6, 5, 1, 3]);
        let b = FieldPoly::from_ints(f, &[3, 0, 1]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b).add(&r), a);
    }
}
