//! Univariate polynomials over ℚ and the rational-function field ℚ(q).
//!
//! [`Frac`] is the working field for exact Gaussian elimination: Laurent
//! scalars embed into it, and results convert back whenever the denominator
//! is a power of `q`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Laurent, Scalar};

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn monomial(c: BigRational, deg: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigRational::zero(); deg + 1];
        v[deg] = c;
        Poly(v)
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.0.len() <= 1
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.0.first().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Multiplicity of `q` as a factor, i.e. index of the first nonzero coefficient.
    pub fn low_order(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i);
            let b = other.0.get(i);
            v.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.lead().recip();
        let mut rem = self.0.clone();
        let mut quot = vec![BigRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] * &lead_inv;
            if !c.is_zero() {
                let shift = top - dd;
                for (i, b) in divisor.0.iter().enumerate() {
                    rem[shift + i] -= &c * b;
                }
                quot[shift] = c;
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lead().recip();
        self.scale(&inv)
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Element of ℚ(q): reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frac {
    num: Poly,
    den: Poly,
}

impl Frac {
    pub fn zero() -> Self {
        Frac {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Frac::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        Frac {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Frac::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Frac::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Frac::zero();
        }
        if den.is_constant() {
            let inv = den.lead().recip();
            return Frac {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let inv = den.lead().recip();
        Frac {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == Poly::one()
    }

    fn is_rational(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, o: &Frac) -> Frac {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.is_rational() && o.is_rational() {
            return Frac::from_rational(self.num.constant_term() + o.num.constant_term());
        }
        if self.den == o.den {
            return Frac::reduce(self.num.add(&o.num), self.den.clone());
        }
        Frac::reduce(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Frac) -> Frac {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Frac) -> Frac {
        if self.is_zero() || o.is_zero() {
            return Frac::zero();
        }
        if self.is_rational() && o.is_rational() {
            return Frac::from_rational(self.num.constant_term() * o.num.constant_term());
        }
        Frac::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<Frac> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Frac::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &Frac) -> Result<Frac> {
        Ok(self.mul(&o.inv()?))
    }

    /// Converts back to a [`Scalar`] when the denominator is a power of `q`.
    pub fn to_scalar(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let den_deg = self.den.degree().unwrap_or(0);
        if self.den != Poly::monomial(BigRational::one(), den_deg) {
            return Err(Error::NonInvertibleLaurent(self.to_string()));
        }
        let shift = -(den_deg as i64);
        let mut terms = Vec::new();
        for (i, c) in self.num.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let e = i32::try_from(i as i64 + shift).map_err(|_| Error::ExponentOverflow)?;
                terms.push((e, c.clone()));
            }
        }
        Ok(Scalar::from(Laurent::from_terms(terms)))
    }

    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }
}

impl From<&Scalar> for Frac {
    fn from(s: &Scalar) -> Self {
        match s {
            Scalar::Rational(r) => Frac::from_rational(r.clone()),
            Scalar::Laurent(l) => {
                let lo = l.min_exponent().unwrap_or(0);
                let hi = l.max_exponent().unwrap_or(0);
                let len = (hi as i64 - lo as i64 + 1) as usize;
                let mut coeffs = vec![BigRational::zero(); len];
                for (e, c) in l.terms() {
                    coeffs[(*e as i64 - lo as i64) as usize] = c.clone();
                }
                let num = Poly::from_coeffs(coeffs);
                if lo >= 0 {
                    Frac::reduce(num.mul(&Poly::monomial(BigRational::one(), lo as usize)), Poly::one())
                } else {
                    Frac::reduce(num, Poly::monomial(BigRational::one(), (-(lo as i64)) as usize))
                }
            }
        }
    }
}

impl From<Scalar> for Frac {
    fn from(s: Scalar) -> Self {
        Frac::from(&s)
    }
}

fn fmt_poly(p: &Poly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let terms: Vec<(i32, BigRational)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i32, c.clone()))
        .collect();
    write!(f, "{}", Scalar::from(Laurent::from_terms(terms)))
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return fmt_poly(&self.num, f);
        }
        let wrap = |p: &Poly| p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
            || p.coeffs().iter().any(|c| c.is_negative());
        if wrap(&self.num) {
            write!(f, "(")?;
            fmt_poly(&self.num, f)?;
            write!(f, ")")?;
        } else {
            fmt_poly(&self.num, f)?;
        }
        write!(f, "/(")?;
        fmt_poly(&self.den, f)?;
        write!(f, ")")
    }
}
