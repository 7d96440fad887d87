//! Exact coefficients: rationals and Laurent polynomials in `q` over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Frac, Poly};

/// Laurent polynomial with finitely many nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, BigRational>,
}

impl Laurent {
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, BigRational)>) -> Self {
        let mut map: BTreeMap<i32, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Laurent { terms: map }
    }

    pub fn monomial(c: BigRational, e: i32) -> Self {
        Laurent::from_terms([(e, c)])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i32, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    fn try_add(&self, o: &Laurent) -> Laurent {
        let mut out = self.terms.clone();
        for (e, c) in &o.terms {
            *out.entry(*e).or_insert_with(BigRational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        Laurent { terms: out }
    }

    fn neg(&self) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    fn try_mul(&self, o: &Laurent) -> Result<Laurent> {
        let mut out: BTreeMap<i32, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.checked_add(*eb).ok_or(Error::ExponentOverflow)?;
                *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(Laurent { terms: out })
    }

    fn scale(&self, c: &BigRational) -> Laurent {
        if c.is_zero() {
            return Laurent::default();
        }
        Laurent {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    /// Exact division; fails unless the quotient is again a Laurent polynomial.
    fn try_div(&self, o: &Laurent) -> Result<Laurent> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if o.terms.len() == 1 {
            let (e, c) = o.terms.iter().next().unwrap();
            let inv = Laurent::monomial(c.recip(), e.checked_neg().ok_or(Error::ExponentOverflow)?);
            return self.try_mul(&inv);
        }
        let q = Frac::from(&Scalar::Laurent(self.clone())).div(&Frac::from(&Scalar::Laurent(o.clone())))?;
        match q.to_scalar() {
            Ok(Scalar::Laurent(l)) => Ok(l),
            Ok(Scalar::Rational(r)) => Ok(Laurent::monomial(r, 0)),
            Err(_) => Err(Error::NonInvertibleLaurent(Scalar::Laurent(o.clone()).to_string())),
        }
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let p = if *e >= 0 {
                num_traits::pow(x.clone(), *e as usize)
            } else {
                num_traits::pow(x.recip(), e.unsigned_abs() as usize)
            };
            acc += c * p;
        }
        acc
    }
}

/// Exact scalar. Constant Laurent polynomials are always stored as
/// `Rational`, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Laurent(Laurent),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }
}

impl From<Laurent> for Scalar {
    fn from(l: Laurent) -> Self {
        match l.as_constant() {
            Some(c) => Scalar::Rational(c),
            None => Scalar::Laurent(l),
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Rational(BigRational::new(n.into(), d.into()))
    }

    /// The formal variable `q`.
    pub fn q() -> Self {
        Scalar::q_pow(1)
    }

    pub fn q_pow(e: i32) -> Self {
        Scalar::from(Laurent::monomial(BigRational::one(), e))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Laurent(l) => l.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_one())
    }

    pub fn is_laurent(&self) -> bool {
        matches!(self, Scalar::Laurent(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Laurent(_) => None,
        }
    }

    fn to_laurent(&self) -> Laurent {
        match self {
            Scalar::Rational(r) => Laurent::monomial(r.clone(), 0),
            Scalar::Laurent(l) => l.clone(),
        }
    }

    pub fn try_add(&self, o: &Scalar) -> Result<Scalar> {
        Ok(match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => Scalar::from(self.to_laurent().try_add(&o.to_laurent())),
        })
    }

    pub fn try_sub(&self, o: &Scalar) -> Result<Scalar> {
        self.try_add(&-o)
    }

    pub fn try_mul(&self, o: &Scalar) -> Result<Scalar> {
        Ok(match (self, o) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Rational(a), Scalar::Laurent(l)) | (Scalar::Laurent(l), Scalar::Rational(a)) => {
                Scalar::from(l.scale(a))
            }
            (Scalar::Laurent(a), Scalar::Laurent(b)) => Scalar::from(a.try_mul(b)?),
        })
    }

    pub fn try_div(&self, o: &Scalar) -> Result<Scalar> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match (self, o) {
            (_, Scalar::Rational(b)) => self.try_mul(&Scalar::Rational(b.recip()))?,
            (_, Scalar::Laurent(b)) => Scalar::from(self.to_laurent().try_div(b)?),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        Scalar::one().try_div(self)
    }

    /// Evaluates at `q = q0`; rationals pass through unchanged.
    pub fn specialize(&self, q0: &BigRational) -> Result<Scalar> {
        if q0.is_zero() {
            return Err(Error::ZeroSpecialization);
        }
        Ok(match self {
            Scalar::Rational(_) => self.clone(),
            Scalar::Laurent(l) => Scalar::Rational(l.eval(q0)),
        })
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.try_add(o).expect("scalar addition")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.try_sub(o).expect("scalar subtraction")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.try_mul(o).expect("laurent exponent overflow in multiplication")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Laurent(l) => Scalar::Laurent(l.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Scalar::Laurent(l) => {
                let mut first = true;
                for (e, c) in l.terms.iter().rev() {
                    let neg = c.is_negative();
                    let abs = c.abs();
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, " {} ", if neg { '-' } else { '+' })?;
                    }
                    first = false;
                    let coeff = if abs.is_one() && *e != 0 {
                        String::new()
                    } else if *e == 0 {
                        fmt_rational(&abs)
                    } else {
                        format!("{}*", fmt_rational(&abs))
                    };
                    match *e {
                        0 => write!(f, "{coeff}")?,
                        1 => write!(f, "{coeff}q")?,
                        _ => write!(f, "{coeff}q^{e}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, reason: &str) -> Error {
        Error::ScalarSyntax {
            input: self.src.to_string(),
            offset: self.pos,
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            self.src[start..self.pos].parse().ok()
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let v: i64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected integer exponent"))?;
        Ok(if neg { -v } else { v })
    }

    fn rational(&mut self) -> Result<Option<BigRational>> {
        let Some(n) = self.digits() else {
            return Ok(None);
        };
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.digits().ok_or_else(|| self.err("expected denominator"))?;
            if d.is_zero() {
                return Err(self.err("zero denominator"));
            }
            return Ok(Some(BigRational::new(n, d)));
        }
        Ok(Some(BigRational::from_integer(n)))
    }

    /// term := [rational] ['*'] ['q' ['^' int]]
    fn term(&mut self) -> Result<(i32, BigRational)> {
        let coeff = self.rational()?;
        let had_coeff = coeff.is_some();
        let mut coeff = coeff.unwrap_or_else(BigRational::one);
        if self.peek() == Some(b'*') {
            if !had_coeff {
                return Err(self.err("dangling '*'"));
            }
            self.pos += 1;
            if self.peek() != Some(b'q') {
                return Err(self.err("expected 'q' after '*'"));
            }
        }
        let mut exp = 0i64;
        if self.peek() == Some(b'q') {
            self.pos += 1;
            exp = 1;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                exp = self.signed_int()?;
            }
            if had_coeff && self.peek() == Some(b'/') {
                // "3q/2" style is not supported; keep the grammar small
                return Err(self.err("unexpected '/'"));
            }
        } else if !had_coeff {
            return Err(self.err("expected a number or 'q'"));
        }
        let exp = i32::try_from(exp).map_err(|_| Error::ExponentOverflow)?;
        if coeff.is_zero() {
            coeff = BigRational::zero();
        }
        Ok((exp, coeff))
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor {
            src: s,
            bytes: s.as_bytes(),
            pos: 0,
        };
        if cur.peek().is_none() {
            return Err(cur.err("empty scalar"));
        }
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let sign = match cur.peek() {
                Some(b'+') => {
                    cur.pos += 1;
                    1
                }
                Some(b'-') => {
                    cur.pos += 1;
                    -1
                }
                None => break,
                Some(_) if first => 1,
                Some(_) => return Err(cur.err("expected '+' or '-'")),
            };
            first = false;
            let (e, c) = cur.term()?;
            terms.push((e, if sign < 0 { -c } else { c }));
        }
        Ok(Scalar::from(Laurent::from_terms(terms)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Convenience for `Poly` consumers: a polynomial in `q` as a scalar.
pub fn poly_to_scalar(p: &Poly) -> Scalar {
    Scalar::from(Laurent::from_terms(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i32, c.clone())),
    ))
}
