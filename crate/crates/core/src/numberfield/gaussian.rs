//! Gaussian integers and Gaussian rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ParseError;

/// An element `re + im*i` of Z[i]. Rational integers are the `im = 0` case.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianInteger {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInteger {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInteger {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        GaussianInteger::new(n, 0)
    }

    pub fn zero() -> Self {
        GaussianInteger::new(0, 0)
    }

    pub fn one() -> Self {
        GaussianInteger::new(1, 0)
    }

    pub fn i() -> Self {
        GaussianInteger::new(0, 1)
    }

    /// `i^k` for `k` taken mod 4.
    pub fn unit(k: u8) -> Self {
        match k % 4 {
            0 => GaussianInteger::new(1, 0),
            1 => GaussianInteger::new(0, 1),
            2 => GaussianInteger::new(-1, 0),
            _ => GaussianInteger::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// `re^2 + im^2`; for `a+bi` acting on a Z[i]-CM curve this is the degree.
    pub fn norm(&self) -> BigUint {
        (&self.re * &self.re + &self.im * &self.im)
            .to_biguint()
            .expect("sum of squares is nonnegative")
    }

    pub fn conj(&self) -> Self {
        GaussianInteger::new(self.re.clone(), -&self.im)
    }

    /// Multiplication by `i^k`.
    pub fn mul_unit(&self, k: u8) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => GaussianInteger::new(-&self.im, self.re.clone()),
            2 => GaussianInteger::new(-&self.re, -&self.im),
            _ => GaussianInteger::new(self.im.clone(), -&self.re),
        }
    }

    /// Returns `(c, k)` with `self = i^k * c` and `c` the canonical associate
    /// (`re > 0, im >= 0`, or zero).
    pub fn canonical_parts(&self) -> (GaussianInteger, u8) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        for k in 0..4u8 {
            // c = i^{-k} * self
            let c = self.mul_unit((4 - k) % 4);
            if c.re.is_positive() && !c.im.is_negative() {
                return (c, k);
            }
        }
        unreachable!("exactly one associate lies in the first quadrant")
    }

    pub fn canonical_associate(&self) -> GaussianInteger {
        self.canonical_parts().0
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = GaussianInteger::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division with the quotient rounded to the nearest Gaussian
    /// integer, so `N(rem) <= N(d)/2`.
    pub fn div_rem_round(&self, d: &GaussianInteger) -> (GaussianInteger, GaussianInteger) {
        assert!(!d.is_zero(), "division by zero Gaussian integer");
        let n = BigInt::from(d.norm());
        let prod = self * &d.conj();
        let q = GaussianInteger::new(round_div(&prod.re, &n), round_div(&prod.im, &n));
        let r = self - &(&q * d);
        (q, r)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &GaussianInteger) -> Option<GaussianInteger> {
        if d.is_zero() {
            return if self.is_zero() { Some(GaussianInteger::zero()) } else { None };
        }
        if d.is_rational() {
            let (qr, rr) = self.re.div_rem(&d.re);
            let (qi, ri) = self.im.div_rem(&d.re);
            return (rr.is_zero() && ri.is_zero()).then(|| GaussianInteger::new(qr, qi));
        }
        let n = BigInt::from(d.norm());
        let prod = self * &d.conj();
        let (qr, rr) = prod.re.div_rem(&n);
        let (qi, ri) = prod.im.div_rem(&n);
        (rr.is_zero() && ri.is_zero()).then(|| GaussianInteger::new(qr, qi))
    }

    pub fn divides(&self, other: &GaussianInteger) -> bool {
        other.div_exact(self).is_some()
    }

    /// Canonical greatest common divisor.
    pub fn gcd(&self, other: &GaussianInteger) -> GaussianInteger {
        if self.is_rational() && other.is_rational() {
            return GaussianInteger::from_int(self.re.gcd(&other.re));
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem_round(&b);
            a = b;
            b = r;
        }
        a.canonical_associate()
    }

    /// Returns `(g, x, y)` with `self*x + other*y = g` and `g` canonical.
    pub fn xgcd(&self, other: &GaussianInteger) -> (GaussianInteger, GaussianInteger, GaussianInteger) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut x0, mut x1) = (GaussianInteger::one(), GaussianInteger::zero());
        let (mut y0, mut y1) = (GaussianInteger::zero(), GaussianInteger::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem_round(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let nx = &x0 - &(&q * &x1);
            x0 = std::mem::replace(&mut x1, nx);
            let ny = &y0 - &(&q * &y1);
            y0 = std::mem::replace(&mut y1, ny);
        }
        let (g, k) = r0.canonical_parts();
        // r0 = i^k g  =>  g = i^{-k} r0
        let back = (4 - k) % 4;
        (g, x0.mul_unit(back), y0.mul_unit(back))
    }

    /// Reduction of each component into `[0, m)`.
    pub fn rem_components(&self, m: &BigInt) -> GaussianInteger {
        GaussianInteger::new(self.re.mod_floor(m), self.im.mod_floor(m))
    }

    /// Key realising the canonical order: norm, then canonical associate,
    /// then the unit exponent.
    fn order_key(&self) -> (BigUint, BigInt, BigInt, u8) {
        let (c, k) = self.canonical_parts();
        (self.norm(), c.re, c.im, k)
    }
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // floor((2n + d) / 2d) for d > 0
    let two = BigInt::from(2);
    (&two * n + d).div_floor(&(&two * d))
}

impl Ord for GaussianInteger {
    /// Norm first, ties broken by the canonical associate `(re, im)` and then
    /// by the power of `i` relating the element to it. For Z this lists
    /// `1, -1, 2, -2, ...`; for Z[i] the four associates of each class in the
    /// order `c, ic, -c, -ic`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl PartialOrd for GaussianInteger {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for GaussianInteger {
    fn from(n: i64) -> Self {
        GaussianInteger::from_int(n)
    }
}

impl From<BigInt> for GaussianInteger {
    fn from(n: BigInt) -> Self {
        GaussianInteger::from_int(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussianInteger> for GaussianInteger {
            type Output = GaussianInteger;
            fn $method(self, rhs: GaussianInteger) -> GaussianInteger {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianInteger> for GaussianInteger {
            type Output = GaussianInteger;
            fn $method(self, rhs: &'a GaussianInteger) -> GaussianInteger {
                (&self).$method(rhs)
            }
        }
    };
}

impl<'b> Add<&'b GaussianInteger> for &GaussianInteger {
    type Output = GaussianInteger;
    fn add(self, rhs: &'b GaussianInteger) -> GaussianInteger {
        GaussianInteger::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'b> Sub<&'b GaussianInteger> for &GaussianInteger {
    type Output = GaussianInteger;
    fn sub(self, rhs: &'b GaussianInteger) -> GaussianInteger {
        GaussianInteger::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'b> Mul<&'b GaussianInteger> for &GaussianInteger {
    type Output = GaussianInteger;
    fn mul(self, rhs: &'b GaussianInteger) -> GaussianInteger {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianInteger::from_int(&self.re * &rhs.re);
        }
        GaussianInteger::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for GaussianInteger {
    type Output = GaussianInteger;
    fn neg(self) -> GaussianInteger {
        GaussianInteger::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianInteger {
    type Output = GaussianInteger;
    fn neg(self) -> GaussianInteger {
        GaussianInteger::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for GaussianInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() { "i".to_string() } else { format!("{}i", im_abs) };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{}{}", sign, im_part)
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", self.re, sign, im_part)
        }
    }
}

impl FromStr for GaussianInteger {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let q: GaussianRational = s.parse()?;
        if !q.re.is_integer() || !q.im.is_integer() {
            return Err(ParseError::new(s, "expected a Gaussian integer"));
        }
        Ok(GaussianInteger::new(q.re.to_integer(), q.im.to_integer()))
    }
}

impl Serialize for GaussianInteger {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianInteger {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussianRational::new(re, BigRational::zero())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        GaussianRational::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn zero() -> Self {
        GaussianRational::from_int(0)
    }

    pub fn one() -> Self {
        GaussianRational::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -&self.im)
    }

    /// `|x|^2`, an exact rational.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.abs_sq();
        Some(GaussianRational::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &GaussianRational) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Common denominator `D > 0` and numerators with `self = (A + B i)/D`.
    pub fn common_denominator(&self) -> (GaussianInteger, BigInt) {
        let d = self.re.denom().lcm(self.im.denom());
        let a = self.re.numer() * (&d / self.re.denom());
        let b = self.im.numer() * (&d / self.im.denom());
        (GaussianInteger::new(a, b), d)
    }

    /// Writes `self = u / d` with `u, d` coprime in Z[i] and `d` canonical.
    /// For rational inputs `d` is the usual positive denominator.
    pub fn to_fraction(&self) -> (GaussianInteger, GaussianInteger) {
        let (num, d) = self.common_denominator();
        if d.is_one() {
            return (num, GaussianInteger::one());
        }
        let d = GaussianInteger::from_int(d);
        if num.is_rational() {
            return (num, d);
        }
        let g = num.rem_components(&d.re).gcd(&d);
        if g.is_one() {
            return (num, d);
        }
        let u = num.div_exact(&g).expect("gcd divides numerator");
        let den = d.div_exact(&g).expect("gcd divides denominator");
        let (c, k) = den.canonical_parts();
        // u/den = u/(i^k c) = (i^{-k} u)/c
        (u.mul_unit((4 - k) % 4), c)
    }

    pub fn from_gaussian(g: &GaussianInteger) -> Self {
        GaussianRational::new(
            BigRational::from_integer(g.re.clone()),
            BigRational::from_integer(g.im.clone()),
        )
    }

    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }
}

impl<'b> Add<&'b GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'b GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'b> Sub<&'b GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &'b GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'b> Mul<&'b GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'b GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::from_rational(&self.re * &rhs.re);
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// `p/q`, `p/q+r/s*i` or `r/s*i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational(&im_abs))
        };
        if self.re.is_zero() {
            let sign = if self.im.is_negative() { "-" } else { "" };
            write!(f, "{}{}", sign, im_part)
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", fmt_rational(&self.re), sign, im_part)
        }
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<BigRational, ParseError> {
    let bad = || ParseError::new(whole, "malformed rational");
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(ParseError::new(whole, "zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl FromStr for GaussianRational {
    type Err = ParseError;

    /// Accepts sums of signed terms, each a rational `p` or `p/q`, or an
    /// imaginary term `i`, `p*i`, `pi`, `p/q*i`, `pi/q`: e.g. `-1/2`, `3+4i`,
    /// `-i/2`, `-3/4-3/4*i`, and `(a+bi)/d`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(ParseError::new(s, "empty number"));
        }
        if let Some(inner) = compact.strip_prefix('(') {
            let (num, den) = inner
                .rsplit_once(")/")
                .ok_or_else(|| ParseError::new(s, "expected (a+bi)/d"))?;
            let num: GaussianRational = num.parse()?;
            let den = parse_rational(den, s)?;
            if den.is_zero() {
                return Err(ParseError::new(s, "zero denominator"));
            }
            return Ok(GaussianRational::new(num.re / &den, num.im / den));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for idx in 1..bytes.len() {
            let c = bytes[idx];
            // a sign starts a new term unless it follows '/' or '*'
            if (c == b'+' || c == b'-') && bytes[idx - 1] != b'/' && bytes[idx - 1] != b'*' {
                terms.push(&compact[start..idx]);
                start = idx;
            }
        }
        terms.push(&compact[start..]);

        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(ParseError::new(s, "dangling sign"));
            }
            let (value, imaginary) = if let Some((coef, rest)) = body.split_once('i') {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let mut v = if coef.is_empty() { BigRational::one() } else { parse_rational(coef, s)? };
                if let Some(d) = rest.strip_prefix('/') {
                    if coef.contains('/') {
                        return Err(ParseError::new(s, "malformed imaginary term"));
                    }
                    v /= parse_rational(d, s)?;
                } else if !rest.is_empty() {
                    return Err(ParseError::new(s, "malformed imaginary term"));
                }
                (v, true)
            } else {
                (parse_rational(body, s)?, false)
            };
            let value = if neg { -value } else { value };
            if imaginary {
                im += value;
            } else {
                re += value;
            }
        }
        Ok(GaussianRational::new(re, im))
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Natural log of `|re + im i|` for arbitrarily large components.
pub fn log_abs(re: &BigInt, im: &BigInt) -> f64 {
    let bits = re.bits().max(im.bits());
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = bits.saturating_sub(60);
    let top = |v: &BigInt| -> f64 {
        let t: BigInt = v.abs() >> shift;
        let (_, digits) = t.to_u64_digits();
        digits.first().copied().unwrap_or(0) as f64
    };
    let (a, b) = (top(re), top(im));
    a.hypot(b).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive big integer.
pub fn log_biguint(n: &BigUint) -> f64 {
    log_abs(&BigInt::from_biguint(Sign::Plus, n.clone()), &BigInt::zero())
}
