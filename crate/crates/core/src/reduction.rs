//! Reduction modulo primes of Z or Z[i]: residue fields, valuations,
//! reduced points, annihilator ideals and the bad-place set.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, FieldTag, WeierstrassCurve};
use crate::numberfield::{
    factor_gaussian, factor_integer, factor_u64, ideal_divisors, primes_up_to, GaussianIdeal, GaussianInteger,
    GaussianRational, Order,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("valuation of zero")]
    ZeroValuation,
    #[error("bad reduction at {0}")]
    BadReduction(GaussianIdeal),
    #[error("{0} is not a prime of the ring of integers")]
    NotPrime(GaussianIdeal),
    #[error("residue field at {0} is too large")]
    ResidueTooLarge(GaussianIdeal),
    #[error("the Z[i] action needs a CM curve")]
    NotCm,
}

/// How a prime of the ring of integers lies over its rational prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PrimeKind {
    Rational,
    Split,
    Inert,
    Ramified,
}

pub fn prime_kind(field: FieldTag, p: &GaussianIdeal) -> PrimeKind {
    let g = p.generator();
    match field {
        FieldTag::Q => PrimeKind::Rational,
        FieldTag::Qi if g.is_rational() => PrimeKind::Inert,
        FieldTag::Qi if g.norm() == BigUint::from(2u32) => PrimeKind::Ramified,
        FieldTag::Qi => PrimeKind::Split,
    }
}

/// Size of the residue field.
pub fn residue_norm(field: FieldTag, p: &GaussianIdeal) -> BigUint {
    match field {
        FieldTag::Q => p.generator().re.magnitude().clone(),
        FieldTag::Qi => p.norm(),
    }
}

/// The rational prime under `p`.
pub fn rational_prime(field: FieldTag, p: &GaussianIdeal) -> BigUint {
    match prime_kind(field, p) {
        PrimeKind::Rational | PrimeKind::Inert => p.generator().re.magnitude().clone(),
        PrimeKind::Split | PrimeKind::Ramified => p.norm(),
    }
}

/// Local degree `n_v = [K_v : Q_p]`.
pub fn local_degree(field: FieldTag, p: &GaussianIdeal) -> u32 {
    match prime_kind(field, p) {
        PrimeKind::Rational | PrimeKind::Split => 1,
        PrimeKind::Inert | PrimeKind::Ramified => 2,
    }
}

fn vp(n: &BigInt, p: &BigInt) -> i64 {
    if n.is_zero() {
        return i64::MAX;
    }
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Exponent of `p` in a nonzero element of the ring of integers.
pub fn integer_valuation(field: FieldTag, g: &GaussianInteger, p: &GaussianIdeal) -> i64 {
    let pg = p.generator();
    match prime_kind(field, p) {
        PrimeKind::Rational | PrimeKind::Inert => vp(&g.re, &pg.re).min(vp(&g.im, &pg.re)),
        PrimeKind::Split | PrimeKind::Ramified => {
            // strip the rational part first: p | g for the rational prime
            // contributes 1 (split) or 2 (ramified) per factor
            let q = BigInt::from(rational_prime(field, p));
            let k = vp(&g.re, &q).min(vp(&g.im, &q));
            let per = if prime_kind(field, p) == PrimeKind::Ramified { 2 } else { 1 };
            let mut rest = GaussianInteger::new(&g.re / q.pow(k as u32), &g.im / q.pow(k as u32));
            let mut v = k * per;
            while let Some(next) = rest.div_exact(pg) {
                rest = next;
                v += 1;
            }
            v
        }
    }
}

/// `ν_p(x)`; `x` must be nonzero.
pub fn valuation(field: FieldTag, x: &GaussianRational, p: &GaussianIdeal) -> Result<i64, ReductionError> {
    if x.is_zero() {
        return Err(ReductionError::ZeroValuation);
    }
    let (num, den) = x.common_denominator();
    Ok(integer_valuation(field, &num, p) - integer_valuation(field, &GaussianInteger::from_int(den), p))
}

/// `F_p`, or `F_p[t]/(t^2+1)` for an inert prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub degree: u8,
    /// Image of `i` when the residue field is `F_p`.
    pub i_image: Option<u64>,
}

/// `a + b t`, with `b = 0` in degree one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fe {
    pub a: u64,
    pub b: u64,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn big_mod(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

impl ResidueField {
    /// The residue field of `p`; primes must have residue norm below 2^32.
    pub fn new(field: FieldTag, p: &GaussianIdeal) -> Result<Self, ReductionError> {
        let q = residue_norm(field, p);
        if q > BigUint::from(u32::MAX) {
            return Err(ReductionError::ResidueTooLarge(p.clone()));
        }
        let r = rational_prime(field, p).to_u64().expect("checked above");
        if !crate::numberfield::is_probable_prime(&BigUint::from(r)) {
            return Err(ReductionError::NotPrime(p.clone()));
        }
        let kind = prime_kind(field, p);
        if kind == PrimeKind::Inert && r % 4 != 3 {
            return Err(ReductionError::NotPrime(p.clone()));
        }
        let g = p.generator();
        Ok(match kind {
            PrimeKind::Rational => ResidueField { p: r, degree: 1, i_image: None },
            PrimeKind::Inert => ResidueField { p: r, degree: 2, i_image: None },
            PrimeKind::Ramified => ResidueField { p: 2, degree: 1, i_image: Some(1) },
            PrimeKind::Split => {
                // a + bi = 0 gives i = -a/b
                let a = big_mod(&g.re, r);
                let b = big_mod(&g.im, r);
                let binv = powmod(b, r - 2, r);
                ResidueField { p: r, degree: 1, i_image: Some((r - mulmod(a, binv, r)) % r) }
            }
        })
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.degree as u32)
    }

    pub fn zero(&self) -> Fe {
        Fe { a: 0, b: 0 }
    }

    pub fn one(&self) -> Fe {
        Fe { a: 1 % self.p, b: 0 }
    }

    pub fn from_u64(&self, n: u64) -> Fe {
        Fe { a: n % self.p, b: 0 }
    }

    /// Image of `i`; `None` over Q.
    pub fn i(&self) -> Option<Fe> {
        match (self.degree, self.i_image) {
            (2, _) => Some(Fe { a: 0, b: 1 }),
            (_, Some(v)) => Some(Fe { a: v, b: 0 }),
            _ => None,
        }
    }

    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        Fe {
            a: (x.a + y.a) % self.p,
            b: (x.b + y.b) % self.p,
        }
    }

    pub fn neg(&self, x: Fe) -> Fe {
        Fe {
            a: (self.p - x.a) % self.p,
            b: (self.p - x.b) % self.p,
        }
    }

    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        let p = self.p;
        if self.degree == 1 {
            return Fe { a: mulmod(x.a, y.a, p), b: 0 };
        }
        // (a + bt)(c + dt) = ac - bd + (ad + bc)t
        let ac = mulmod(x.a, y.a, p);
        let bd = mulmod(x.b, y.b, p);
        let ad = mulmod(x.a, y.b, p);
        let bc = mulmod(x.b, y.a, p);
        Fe {
            a: (ac + p - bd) % p,
            b: (ad + bc) % p,
        }
    }

    pub fn pow(&self, mut x: Fe, mut e: u64) -> Fe {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: Fe) -> Option<Fe> {
        if x == self.zero() {
            return None;
        }
        let p = self.p;
        if self.degree == 1 {
            return Some(Fe { a: powmod(x.a, p - 2, p), b: 0 });
        }
        // 1/(a + bt) = (a - bt)/(a^2 + b^2)
        let n = (mulmod(x.a, x.a, p) + mulmod(x.b, x.b, p)) % p;
        let ninv = powmod(n, p - 2, p);
        Some(Fe {
            a: mulmod(x.a, ninv, p),
            b: mulmod((p - x.b) % p, ninv, p),
        })
    }

    /// `1`, `-1` or `0` according to `x` being a nonzero square, a
    /// non-square, or zero. Odd characteristic only.
    pub fn quadratic_character(&self, x: Fe) -> i64 {
        if x == self.zero() {
            return 0;
        }
        let r = self.pow(x, (self.size() - 1) / 2);
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// Image of a Gaussian integer.
    pub fn reduce_integer(&self, g: &GaussianInteger) -> Fe {
        let a = big_mod(&g.re, self.p);
        let b = big_mod(&g.im, self.p);
        match self.degree {
            2 => Fe { a, b },
            _ => {
                let i = self.i_image.unwrap_or(0);
                Fe { a: (a + mulmod(b, i, self.p)) % self.p, b: 0 }
            }
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        let p = self.p;
        let bs = if self.degree == 2 { p } else { 1 };
        (0..bs).flat_map(move |b| (0..p).map(move |a| Fe { a, b }))
    }
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReducedPoint {
    Infinity,
    Affine(Fe, Fe),
}

/// A curve with good reduction at a prime, over its residue field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCurve {
    pub prime: GaussianIdeal,
    pub field: ResidueField,
    pub source_field: FieldTag,
    pub a: [Fe; 5],
    pub cm: bool,
}

impl ReducedCurve {
    /// Reduces a π-integral element; `None` when `x` has a pole at π.
    pub fn reduce(&self, x: &GaussianRational) -> Option<Fe> {
        let (u, d) = match self.source_field {
            FieldTag::Q => (
                GaussianInteger::from_int(x.re.numer().clone()),
                GaussianInteger::from_int(x.re.denom().clone()),
            ),
            FieldTag::Qi => x.to_fraction(),
        };
        let dv = self.field.reduce_integer(&d);
        let dinv = self.field.inv(dv)?;
        Some(self.field.mul(self.field.reduce_integer(&u), dinv))
    }

    pub fn contains(&self, r: &ReducedPoint) -> bool {
        let f = &self.field;
        match *r {
            ReducedPoint::Infinity => true,
            ReducedPoint::Affine(x, y) => {
                let [a1, a2, a3, a4, a6] = self.a;
                let lhs = f.add(f.add(f.mul(y, y), f.mul(f.mul(a1, x), y)), f.mul(a3, y));
                let x2 = f.mul(x, x);
                let rhs = f.add(f.add(f.add(f.mul(x2, x), f.mul(a2, x2)), f.mul(a4, x)), a6);
                lhs == rhs
            }
        }
    }

    pub fn negate(&self, r: &ReducedPoint) -> ReducedPoint {
        let f = &self.field;
        match *r {
            ReducedPoint::Infinity => ReducedPoint::Infinity,
            ReducedPoint::Affine(x, y) => {
                let [a1, _, a3, _, _] = self.a;
                ReducedPoint::Affine(x, f.sub(f.sub(f.neg(y), f.mul(a1, x)), a3))
            }
        }
    }

    pub fn add(&self, r1: &ReducedPoint, r2: &ReducedPoint) -> ReducedPoint {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let (x1, y1, x2, y2) = match (*r1, *r2) {
            (ReducedPoint::Infinity, _) => return *r2,
            (_, ReducedPoint::Infinity) => return *r1,
            (ReducedPoint::Affine(x1, y1), ReducedPoint::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let two = f.from_u64(2);
        let three = f.from_u64(3);
        let (lambda, nu) = if x1 == x2 {
            let sum = f.add(f.add(f.add(y1, y2), f.mul(a1, x2)), a3);
            if sum == f.zero() {
                return ReducedPoint::Infinity;
            }
            let den = f.add(f.add(f.mul(two, y1), f.mul(a1, x1)), a3);
            let inv = f.inv(den).expect("nonzero");
            let x1sq = f.mul(x1, x1);
            let num = f.sub(f.add(f.add(f.mul(three, x1sq), f.mul(f.mul(two, a2), x1)), a4), f.mul(a1, y1));
            let nnum = f.sub(
                f.add(f.add(f.neg(f.mul(x1sq, x1)), f.mul(a4, x1)), f.mul(two, a6)),
                f.mul(a3, y1),
            );
            (f.mul(num, inv), f.mul(nnum, inv))
        } else {
            let inv = f.inv(f.sub(x2, x1)).expect("distinct");
            (
                f.mul(f.sub(y2, y1), inv),
                f.mul(f.sub(f.mul(y1, x2), f.mul(y2, x1)), inv),
            )
        };
        let x3 = f.sub(f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), nu), a3);
        ReducedPoint::Affine(x3, y3)
    }

    pub fn mul(&self, k: u64, r: &ReducedPoint) -> ReducedPoint {
        let mut acc = ReducedPoint::Infinity;
        for bit in (0..64 - k.leading_zeros()).rev() {
            acc = self.add(&acc, &acc);
            if (k >> bit) & 1 == 1 {
                acc = self.add(&acc, r);
            }
        }
        acc
    }

    pub fn mul_big(&self, k: &BigInt, r: &ReducedPoint) -> ReducedPoint {
        let base = if k.is_negative() { self.negate(r) } else { *r };
        let mut acc = ReducedPoint::Infinity;
        let m = k.magnitude();
        for bit in (0..m.bits()).rev() {
            acc = self.add(&acc, &acc);
            if m.bit(bit) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    /// `(x, y) -> (-x, i y)` on the reduction of `y^2 = x^3 + dx`.
    pub fn i_action(&self, r: &ReducedPoint) -> Result<ReducedPoint, ReductionError> {
        let i = match (self.cm, self.field.i()) {
            (true, Some(i)) => i,
            _ => return Err(ReductionError::NotCm),
        };
        Ok(match *r {
            ReducedPoint::Infinity => ReducedPoint::Infinity,
            ReducedPoint::Affine(x, y) => ReducedPoint::Affine(self.field.neg(x), self.field.mul(i, y)),
        })
    }

    /// `α(R)` on the reduced curve.
    pub fn apply_endo(&self, alpha: &GaussianInteger, r: &ReducedPoint) -> Result<ReducedPoint, ReductionError> {
        let a = self.mul_big(&alpha.re, r);
        if alpha.im.is_zero() {
            return Ok(a);
        }
        let b = self.mul_big(&alpha.im, &self.i_action(r)?);
        Ok(self.add(&a, &b))
    }

    /// `#E(F_q)`: a character sum in odd characteristic, brute force in
    /// characteristic two.
    pub fn point_count(&self) -> u64 {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        if f.p == 2 {
            let mut n = 1;
            for x in f.elements() {
                for y in f.elements() {
                    if self.contains(&ReducedPoint::Affine(x, y)) {
                        n += 1;
                    }
                }
            }
            return n;
        }
        // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let four = f.from_u64(4);
        let two = f.from_u64(2);
        let b2 = f.add(f.mul(a1, a1), f.mul(four, a2));
        let b4 = f.add(f.mul(two, a4), f.mul(a1, a3));
        let b6 = f.add(f.mul(a3, a3), f.mul(four, a6));
        let mut total: i64 = 1;
        for x in f.elements() {
            let x2 = f.mul(x, x);
            let g = f.add(f.add(f.add(f.mul(four, f.mul(x2, x)), f.mul(b2, x2)), f.mul(f.mul(two, b4), x)), b6);
            total += 1 + f.quadratic_character(g);
        }
        total as u64
    }

    /// Additive order of a reduced point, from the factored group order.
    pub fn point_order(&self, r: &ReducedPoint) -> u64 {
        let n = self.point_count();
        let mut m = n;
        for (l, _) in factor_u64(n) {
            while m.is_multiple_of(l) && self.mul(m / l, r) == ReducedPoint::Infinity {
                m /= l;
            }
        }
        m
    }
}

/// Reduces `E` at `p`; fails unless every coefficient is p-integral and
/// the discriminant is a p-unit.
pub fn reduce_curve(e: &WeierstrassCurve, p: &GaussianIdeal) -> Result<ReducedCurve, ReductionError> {
    let field = ResidueField::new(e.field, p)?;
    let mut a = [field.zero(); 5];
    let mut shell = ReducedCurve {
        prime: p.clone(),
        field,
        source_field: e.field,
        a,
        cm: e.cm,
    };
    for (slot, c) in a.iter_mut().zip(e.coefficients()) {
        *slot = shell.reduce(c).ok_or_else(|| ReductionError::BadReduction(p.clone()))?;
    }
    shell.a = a;
    let disc = shell.reduce(&e.discriminant());
    if disc.is_none_or(|d| d == field.zero()) {
        return Err(ReductionError::BadReduction(p.clone()));
    }
    Ok(shell)
}

/// `R` modulo `p`.
pub fn reduce_point(e: &WeierstrassCurve, red: &ReducedCurve, r: &CurvePoint) -> ReducedPoint {
    match r {
        CurvePoint::Infinity => ReducedPoint::Infinity,
        CurvePoint::Affine { x, y } => {
            let is_pole = valuation(e.field, x, &red.prime).is_ok_and(|v| v < 0);
            if is_pole {
                return ReducedPoint::Infinity;
            }
            match (red.reduce(x), red.reduce(y)) {
                (Some(xr), Some(yr)) => ReducedPoint::Affine(xr, yr),
                _ => ReducedPoint::Infinity,
            }
        }
    }
}

/// `R ≡ O mod p`, i.e. `R = O` or `ν_p(x(R)) < 0`. Needs good reduction.
pub fn is_zero_mod(e: &WeierstrassCurve, r: &CurvePoint, p: &GaussianIdeal) -> Result<bool, ReductionError> {
    reduce_curve(e, p)?;
    Ok(match r.x() {
        None => true,
        Some(x) if x.is_zero() => false,
        Some(x) => valuation(e.field, x, p)? < 0,
    })
}

/// `Ann_p(R)`: all `α` of `order` with `α(R) ≡ O mod p`.
pub fn ann_ideal(
    e: &WeierstrassCurve,
    order: Order,
    p: &GaussianIdeal,
    r: &CurvePoint,
) -> Result<GaussianIdeal, ReductionError> {
    let red = reduce_curve(e, p)?;
    ann_ideal_reduced(&red, order, &reduce_point(e, &red, r))
}

pub fn ann_ideal_reduced(red: &ReducedCurve, order: Order, rr: &ReducedPoint) -> Result<GaussianIdeal, ReductionError> {
    if *rr == ReducedPoint::Infinity {
        return Ok(GaussianIdeal::unit());
    }
    let m = red.point_order(rr);
    match order {
        Order::Z => Ok(GaussianIdeal::from_int(m as i64)),
        Order::Zi => {
            let mut gen = GaussianInteger::from(m as i64);
            let fm = GaussianIdeal::from_int(m as i64).factor(Order::Zi);
            for d in ideal_divisors(&fm) {
                let g = d.generator();
                if red.apply_endo(&g, rr)? == ReducedPoint::Infinity {
                    gen = gen.gcd(&g);
                }
            }
            Ok(GaussianIdeal::new(&gen))
        }
    }
}

/// Why a place is excluded from the good-prime arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BadReason {
    BadReduction,
    DividesTorsionNorm,
    Ramified,
    TorsionInjectivity,
}

impl fmt::Display for BadReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BadReason::BadReduction => "bad-reduction",
            BadReason::DividesTorsionNorm => "divides-torsion-norm",
            BadReason::Ramified => "ramified",
            BadReason::TorsionInjectivity => "torsion-injectivity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPlace {
    pub prime: GaussianIdeal,
    pub reasons: Vec<BadReason>,
}

/// The finite bad places. Archimedean places are always bad and never
/// listed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPlaceSet {
    pub places: Vec<BadPlace>,
    /// Residue-norm bound up to which `Ann_p(Q) = s` was tested.
    pub prime_cap: u64,
}

impl BadPlaceSet {
    pub fn contains(&self, p: &GaussianIdeal) -> bool {
        self.places.iter().any(|b| &b.prime == p)
    }

    fn add(&mut self, p: GaussianIdeal, reason: BadReason) {
        match self.places.iter_mut().find(|b| b.prime == p) {
            Some(b) => {
                if !b.reasons.contains(&reason) {
                    b.reasons.push(reason);
                    b.reasons.sort();
                }
            }
            None => self.places.push(BadPlace { prime: p, reasons: vec![reason] }),
        }
    }
}

/// Primes of the ring of integers above the rational prime `q`.
pub fn primes_above(field: FieldTag, q: &BigUint) -> Vec<GaussianIdeal> {
    let g = GaussianInteger::from_int(BigInt::from(q.clone()));
    match field {
        FieldTag::Q => vec![GaussianIdeal::new(&g)],
        FieldTag::Qi => factor_gaussian(&g).1.iter().map(|(p, _)| GaussianIdeal::new(p)).collect(),
    }
}

/// Primes with residue norm at most `cap`, in canonical order.
pub fn primes_up_to_norm(field: FieldTag, cap: u64) -> Vec<GaussianIdeal> {
    let mut out = Vec::new();
    for p in primes_up_to(cap) {
        match field {
            FieldTag::Q => out.push(GaussianIdeal::from_int(p as i64)),
            FieldTag::Qi => {
                if p % 4 == 3 {
                    if p.checked_mul(p).is_some_and(|q| q <= cap) {
                        out.push(GaussianIdeal::from_int(p as i64));
                    }
                } else {
                    out.extend(primes_above(field, &BigUint::from(p)));
                }
            }
        }
    }
    out.sort();
    out
}

fn rational_support(x: &GaussianRational) -> Vec<BigUint> {
    let (num, den) = x.common_denominator();
    let mut n = num.norm() * den.magnitude();
    if n.is_zero() {
        n = den.magnitude().clone();
    }
    if n.is_one() {
        return Vec::new();
    }
    factor_integer(&n).into_iter().map(|(p, _)| p).collect()
}

/// The bad places for `(E, P, Q)` with `s = Ann(Q)`: bad reduction, primes
/// over `N(s)`, the ramified prime of Q(i), and primes of residue norm up
/// to `prime_cap` where `Ann_p(Q) != s`.
pub fn bad_places(
    e: &WeierstrassCurve,
    order: Order,
    q: &CurvePoint,
    s: &GaussianIdeal,
    prime_cap: u64,
) -> BadPlaceSet {
    let mut w = BadPlaceSet {
        places: Vec::new(),
        prime_cap,
    };
    let mut candidates: Vec<BigUint> = rational_support(&e.discriminant());
    for c in e.coefficients() {
        let (_, d) = c.common_denominator();
        if !d.is_one() {
            candidates.extend(factor_integer(d.magnitude()).into_iter().map(|(p, _)| p));
        }
    }
    candidates.sort();
    candidates.dedup();
    for c in &candidates {
        for p in primes_above(e.field, c) {
            if reduce_curve(e, &p).is_err() {
                w.add(p, BadReason::BadReduction);
            }
        }
    }
    if !s.is_unit() && !s.is_zero() {
        for (l, _) in factor_integer(&s.norm()) {
            for p in primes_above(e.field, &l) {
                w.add(p, BadReason::DividesTorsionNorm);
            }
        }
    }
    if e.field == FieldTag::Qi {
        w.add(GaussianIdeal::new(&GaussianInteger::new(1, 1)), BadReason::Ramified);
    }
    if !s.is_unit() && !q.is_infinity() {
        let s_primes: Vec<GaussianIdeal> = s.factor(order).primes().cloned().collect();
        for p in primes_up_to_norm(e.field, prime_cap) {
            if w.contains(&p) {
                continue;
            }
            let Ok(red) = reduce_curve(e, &p) else {
                w.add(p, BadReason::BadReduction);
                continue;
            };
            let qr = reduce_point(e, &red, q);
            let injective = s_primes.iter().all(|l| {
                let cof = s.quotient(l).expect("prime divides s");
                red.apply_endo(cof.generator(), &qr).is_ok_and(|t| t != ReducedPoint::Infinity)
            });
            if !injective {
                w.add(p, BadReason::TorsionInjectivity);
            }
        }
    }
    w.places.sort_by(|a, b| a.prime.cmp(&b.prime));
    w
}
