//! Long Weierstrass curves over Q and Q(i), the group law, the Z[i] action
//! on `y^2 = x^3 + dx`, torsion detection and denominator ideals.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::heights::{canonical_height, TORSION_THRESHOLD};
use crate::numberfield::{
    FactorBudget, FactoredIdeal, GaussianIdeal, GaussianInteger, GaussianRational, Order,
};

/// Field of definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldTag {
    Q,
    Qi,
}

impl FieldTag {
    /// The ring of integers, Z or Z[i].
    pub fn integers(self) -> Order {
        match self {
            FieldTag::Q => Order::Z,
            FieldTag::Qi => Order::Zi,
        }
    }

    /// Extension degree over Q.
    pub fn degree(self) -> u32 {
        match self {
            FieldTag::Q => 1,
            FieldTag::Qi => 2,
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldTag::Q => "Q",
            FieldTag::Qi => "Qi",
        })
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("singular curve: discriminant is zero")]
    Singular,
    #[error("coefficient {0} is not in the field of definition")]
    OutsideField(String),
    #[error("CM marker needs a1 = a2 = a3 = a6 = 0 over Q(i)")]
    CmShape,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("{0} acts only on curves with CM by Z[i]")]
    NotCm(String),
    #[error("order Z[i] needs a CM curve over Q(i)")]
    OrderNeedsCm,
    #[error("torsion test inconclusive for {point}: no annihilator of norm <= {bound}, canonical height {height:.3e} +- {error:.1e}")]
    TorsionInconclusive {
        point: String,
        bound: u64,
        height: f64,
        error: f64,
    },
    #[error("torsion detectors disagree on {point}: killed by {annihilator} but canonical height is {height:.3e}")]
    TorsionDisagreement {
        point: String,
        annihilator: String,
        height: f64,
    },
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub field: FieldTag,
    pub a1: GaussianRational,
    pub a2: GaussianRational,
    pub a3: GaussianRational,
    pub a4: GaussianRational,
    pub a6: GaussianRational,
    /// Marks `y^2 = x^3 + dx` with `i` acting as `(x, y) -> (-x, iy)`.
    pub cm: bool,
}

/// A point in affine coordinates, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurvePoint {
    Infinity,
    Affine { x: GaussianRational, y: GaussianRational },
}

impl CurvePoint {
    pub fn new(x: GaussianRational, y: GaussianRational) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        CurvePoint::new(GaussianRational::from_int(x), GaussianRational::from_int(y))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    pub fn x(&self) -> Option<&GaussianRational> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, .. } => Some(x),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("O"),
            CurvePoint::Affine { x, y } => write!(f, "({}, {})", x, y),
        }
    }
}

/// Outcome of the torsion test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Torsion {
    /// The ideal of endomorphisms killing the point.
    Annihilator(GaussianIdeal),
    NonTorsion,
}

/// A sequence term: a denominator ideal, or the zero marker when the point
/// is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Zero,
    Ideal(FactoredIdeal),
}

impl Term {
    pub fn ideal(&self) -> Option<&FactoredIdeal> {
        match self {
            Term::Zero => None,
            Term::Ideal(b) => Some(b),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Term::Zero)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => f.write_str("0"),
            Term::Ideal(b) => b.fmt(f),
        }
    }
}

impl std::str::FromStr for Term {
    type Err = crate::numberfield::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "0" {
            Ok(Term::Zero)
        } else {
            s.parse().map(Term::Ideal)
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Largest norm searched for an annihilating endomorphism.
pub const TORSION_NORM_BOUND: u64 = 144;

impl WeierstrassCurve {
    pub fn new(field: FieldTag, a: [GaussianRational; 5], cm: bool) -> Result<Self, CurveError> {
        let [a1, a2, a3, a4, a6] = a;
        if field == FieldTag::Q {
            if let Some(bad) = [&a1, &a2, &a3, &a4, &a6].into_iter().find(|c| !c.is_real()) {
                return Err(CurveError::OutsideField(bad.to_string()));
            }
        }
        if cm && (field != FieldTag::Qi || !a1.is_zero() || !a2.is_zero() || !a3.is_zero() || !a6.is_zero()) {
            return Err(CurveError::CmShape);
        }
        let curve = WeierstrassCurve { field, a1, a2, a3, a4, a6, cm };
        if curve.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(curve)
    }

    /// `y^2 = x^3 + a x + b` over Q.
    pub fn short(a: i64, b: i64) -> Result<Self, CurveError> {
        let z = GaussianRational::zero;
        WeierstrassCurve::new(
            FieldTag::Q,
            [z(), z(), z(), GaussianRational::from_int(a), GaussianRational::from_int(b)],
            false,
        )
    }

    /// `y^2 = x^3 + d x` over Q(i) with its Z[i] action.
    pub fn cm_family(d: GaussianRational) -> Result<Self, CurveError> {
        let z = GaussianRational::zero;
        WeierstrassCurve::new(FieldTag::Qi, [z(), z(), z(), d, z()], true)
    }

    /// The endomorphism orders this curve supports.
    pub fn check_order(&self, order: Order) -> Result<(), CurveError> {
        match order {
            Order::Z => Ok(()),
            Order::Zi if self.cm => Ok(()),
            Order::Zi => Err(CurveError::OrderNeedsCm),
        }
    }

    pub fn coefficients(&self) -> [&GaussianRational; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn b_invariants(&self) -> [GaussianRational; 4] {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let c = |n: i64| GaussianRational::from_int(n);
        let b2 = &(a1 * a1) + &(&c(4) * a2);
        let b4 = &(&c(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&c(4) * a6);
        let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&(&c(4) * a2) * a6)) - &(&(a1 * a3) * a4)) + &(&(a2 * a3) * a3))
            - &(a4 * a4);
        [b2, b4, b6, b8]
    }

    pub fn discriminant(&self) -> GaussianRational {
        let [b2, b4, b6, b8] = self.b_invariants();
        let c = |n: i64| GaussianRational::from_int(n);
        let t1 = -(&(&(&b2 * &b2) * &b8));
        let t2 = &c(8) * &(&(&b4 * &b4) * &b4);
        let t3 = &c(27) * &(&b6 * &b6);
        let t4 = &c(9) * &(&(&b2 * &b4) * &b6);
        &(&(&t1 - &t2) - &t3) + &t4
    }

    pub fn contains(&self, r: &CurvePoint) -> bool {
        match r {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                if self.field == FieldTag::Q && (!x.is_real() || !y.is_real()) {
                    return false;
                }
                let lhs = &(&(y * y) + &(&(&self.a1 * x) * y)) + &(&self.a3 * y);
                let x2 = x * x;
                let rhs = &(&(&(&x2 * x) + &(&self.a2 * &x2)) + &(&self.a4 * x)) + &self.a6;
                lhs == rhs
            }
        }
    }

    pub fn check_point(&self, r: &CurvePoint) -> Result<(), CurveError> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(r.to_string()))
        }
    }

    pub fn negate(&self, r: &CurvePoint) -> CurvePoint {
        match r {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let ny = &(&(-y) - &(&self.a1 * x)) - &self.a3;
                CurvePoint::new(x.clone(), ny)
            }
        }
    }

    /// Chord-and-tangent addition; inputs are assumed to be on the curve.
    pub fn add(&self, r1: &CurvePoint, r2: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (r1, r2) {
            (CurvePoint::Infinity, _) => return r2.clone(),
            (_, CurvePoint::Infinity) => return r1.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let (lambda, nu) = if x1 == x2 {
            let sum = &(&(y1 + y2) + &(&self.a1 * x2)) + &self.a3;
            if sum.is_zero() {
                return CurvePoint::Infinity;
            }
            let c = |n: i64| GaussianRational::from_int(n);
            let den = &(&(&c(2) * y1) + &(&self.a1 * x1)) + &self.a3;
            let x1sq = x1 * x1;
            let num = &(&(&(&c(3) * &x1sq) + &(&(&c(2) * &self.a2) * x1)) + &self.a4) - &(&self.a1 * y1);
            let nnum = &(&(&(-&(&x1sq * x1)) + &(&self.a4 * x1)) + &(&c(2) * &self.a6)) - &(&self.a3 * y1);
            let inv = den.inv().expect("nonzero tangent denominator");
            (&num * &inv, &nnum * &inv)
        } else {
            let inv = (x2 - x1).inv().expect("distinct x");
            let lambda = &(y2 - y1) * &inv;
            let nu = &(&(y1 * x2) - &(y2 * x1)) * &inv;
            (lambda, nu)
        };
        let x3 = &(&(&(&(&lambda * &lambda) + &(&self.a1 * &lambda)) - &self.a2) - x1) - x2;
        let y3 = &(&(-&(&(&lambda + &self.a1) * &x3)) - &nu) - &self.a3;
        CurvePoint::new(x3, y3)
    }

    pub fn double(&self, r: &CurvePoint) -> CurvePoint {
        self.add(r, r)
    }

    pub fn sub(&self, r1: &CurvePoint, r2: &CurvePoint) -> CurvePoint {
        self.add(r1, &self.negate(r2))
    }

    /// `k R` by double-and-add.
    pub fn mul(&self, k: &BigInt, r: &CurvePoint) -> CurvePoint {
        let base = if k.is_negative() { self.negate(r) } else { r.clone() };
        let k = k.magnitude();
        let mut acc = CurvePoint::Infinity;
        for bit in (0..k.bits()).rev() {
            acc = self.double(&acc);
            if k.bit(bit) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    pub fn mul_int(&self, k: i64, r: &CurvePoint) -> CurvePoint {
        self.mul(&BigInt::from(k), r)
    }

    /// `[i](x, y) = (-x, iy)`.
    pub fn i_action(&self, r: &CurvePoint) -> Result<CurvePoint, CurveError> {
        if !self.cm {
            return Err(CurveError::NotCm("i".into()));
        }
        Ok(match r {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::new(-x, &GaussianRational::i() * y),
        })
    }

    /// `α(R) = re(α) R + im(α) [i]R`.
    pub fn apply_endo(&self, alpha: &GaussianInteger, r: &CurvePoint) -> Result<CurvePoint, CurveError> {
        if alpha.im.is_zero() {
            return Ok(self.mul(&alpha.re, r));
        }
        if !self.cm {
            return Err(CurveError::NotCm(alpha.to_string()));
        }
        let ir = self.i_action(r)?;
        Ok(self.add(&self.mul(&alpha.re, r), &self.mul(&alpha.im, &ir)))
    }

    /// Endomorphisms of `order` with norm at most `bound`, in canonical order.
    fn small_endomorphisms(order: Order, bound: u64) -> Vec<GaussianInteger> {
        crate::sequences::enumerate_indices(order, bound)
    }

    /// The ideal of `order`-elements killing `q`, or `NonTorsion`.
    ///
    /// Two detectors: a search for annihilators of norm at most
    /// [`TORSION_NORM_BOUND`], and the canonical height against
    /// [`TORSION_THRESHOLD`]. They must agree.
    pub fn torsion_annihilator(&self, order: Order, q: &CurvePoint) -> Result<Torsion, CurveError> {
        self.check_order(order)?;
        self.check_point(q)?;
        if q.is_infinity() {
            return Ok(Torsion::Annihilator(GaussianIdeal::unit()));
        }
        let bound = TORSION_NORM_BOUND;
        let max_k = (bound as f64).sqrt() as i64;
        // kQ and k[i]Q for |k| <= 12 cover every endomorphism of norm <= 144
        let mut multiples = vec![CurvePoint::Infinity];
        for k in 1..=max_k {
            let next = self.add(&multiples[(k - 1) as usize], q);
            multiples.push(next);
        }
        let mut gen: Option<GaussianInteger> = None;
        match order {
            Order::Z => {
                if let Some(m) = (1..=max_k).find(|&k| multiples[k as usize].is_infinity()) {
                    gen = Some(GaussianInteger::from(m));
                }
            }
            Order::Zi => {
                let at = |k: &BigInt| -> CurvePoint {
                    let idx = k.magnitude().to_u64_digits().first().copied().unwrap_or(0) as usize;
                    if k.is_negative() {
                        self.negate(&multiples[idx])
                    } else {
                        multiples[idx].clone()
                    }
                };
                for alpha in WeierstrassCurve::small_endomorphisms(order, bound) {
                    let a = at(&alpha.re);
                    let b = self.i_action(&at(&alpha.im))?;
                    if self.add(&a, &b).is_infinity() {
                        gen = Some(match gen {
                            None => alpha.canonical_associate(),
                            Some(g) => g.gcd(&alpha),
                        });
                    }
                }
            }
        }
        let h = canonical_height(self, q);
        match gen {
            Some(g) => {
                if h.value - h.error_bound > TORSION_THRESHOLD {
                    return Err(CurveError::TorsionDisagreement {
                        point: q.to_string(),
                        annihilator: g.to_string(),
                        height: h.value,
                    });
                }
                Ok(Torsion::Annihilator(GaussianIdeal::new(&g)))
            }
            None if h.value - h.error_bound > TORSION_THRESHOLD => Ok(Torsion::NonTorsion),
            None => Err(CurveError::TorsionInconclusive {
                point: q.to_string(),
                bound,
                height: h.value,
                error: h.error_bound,
            }),
        }
    }

    /// The reduced denominator of `x(R)` as a canonical element of the ring
    /// of integers; `None` at infinity.
    pub fn x_denominator(&self, r: &CurvePoint) -> Option<GaussianInteger> {
        match self.field {
            FieldTag::Q => r.x().map(|x| GaussianInteger::from_int(x.re.denom().clone())),
            FieldTag::Qi => r.x().map(|x| x.to_fraction().1),
        }
    }

    /// The denominator ideal of `x(R)`, factored under `budget`.
    pub fn x_denominator_ideal_with(&self, r: &CurvePoint, budget: FactorBudget) -> Option<FactoredIdeal> {
        let d = self.x_denominator(r)?;
        if d.is_one() {
            return Some(FactoredIdeal::unit());
        }
        Some(FactoredIdeal::factor(self.field.integers(), &d, budget))
    }

    /// The fully factored denominator ideal of `x(R)`; `None` at infinity.
    pub fn x_denominator_ideal(&self, r: &CurvePoint) -> Option<FactoredIdeal> {
        self.x_denominator_ideal_with(r, FactorBudget::complete())
    }

    /// `α(P) + Q`.
    pub fn shifted_point(
        &self,
        p: &CurvePoint,
        q: &CurvePoint,
        alpha: &GaussianInteger,
    ) -> Result<CurvePoint, CurveError> {
        Ok(self.add(&self.apply_endo(alpha, p)?, q))
    }

    /// `B_α(P, Q)`, fully factored.
    pub fn shifted_term(&self, p: &CurvePoint, q: &CurvePoint, alpha: &GaussianInteger) -> Result<Term, CurveError> {
        self.check_point(p)?;
        self.check_point(q)?;
        let r = self.shifted_point(p, q, alpha)?;
        Ok(match self.x_denominator_ideal(&r) {
            None => Term::Zero,
            Some(b) => Term::Ideal(b),
        })
    }

    /// Whether every coefficient is integral.
    pub fn is_integral(&self) -> bool {
        self.coefficients().iter().all(|c| c.is_gaussian_integer())
    }

    /// Lcm of the coefficient denominators.
    pub fn coefficient_denominator(&self) -> BigInt {
        let mut l = BigInt::one();
        for c in self.coefficients() {
            let (_, d) = c.common_denominator();
            l = num_integer::Integer::lcm(&l, &d);
        }
        l
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}, {}, {}, {}] over {}{}",
            self.a1,
            self.a2,
            self.a3,
            self.a4,
            self.a6,
            self.field,
            if self.cm { " with CM by Z[i]" } else { "" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> WeierstrassCurve {
        WeierstrassCurve::short(-11, 890).unwrap()
    }

    fn cm() -> WeierstrassCurve {
        WeierstrassCurve::cm_family(GaussianRational::from_int(-2)).unwrap()
    }

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn chord_on_cm_curve() {
        let e = cm();
        let a = CurvePoint::new(gr("-1"), gr("1"));
        let b = CurvePoint::new(gr("1"), gr("i"));
        assert!(e.contains(&a) && e.contains(&b));
        let s = e.add(&a, &b);
        assert_eq!(s, CurvePoint::new(gr("-i/2"), gr("(-3-3i)/4")));
        assert!(e.contains(&s));
    }

    #[test]
    fn endomorphism_examples() {
        let e = cm();
        let p = CurvePoint::new(gr("-1"), gr("1"));
        assert_eq!(e.apply_endo(&GaussianInteger::i(), &p).unwrap(), CurvePoint::new(gr("1"), gr("i")));
        assert_eq!(
            e.apply_endo(&GaussianInteger::new(1, 1), &p).unwrap(),
            CurvePoint::new(gr("-i/2"), gr("(-3-3i)/4"))
        );
        assert_eq!(e.apply_endo(&GaussianInteger::from(2), &p).unwrap(), e.add(&p, &p));
        let minus = e.apply_endo(&GaussianInteger::i(), &e.apply_endo(&GaussianInteger::i(), &p).unwrap()).unwrap();
        assert_eq!(minus, e.negate(&p));
        assert!(matches!(
            example().apply_endo(&GaussianInteger::i(), &CurvePoint::from_ints(-1, 30)),
            Err(CurveError::NotCm(_))
        ));
    }

    #[test]
    fn identity_and_inverse() {
        let e = example();
        let p = CurvePoint::from_ints(-1, 30);
        assert_eq!(e.add(&p, &CurvePoint::Infinity), p);
        assert!(e.add(&p, &e.negate(&p)).is_infinity());
    }

    #[test]
    fn q_has_order_four() {
        let e = example();
        let q = CurvePoint::from_ints(7, 34);
        assert!(!e.mul_int(2, &q).is_infinity());
        assert!(e.mul_int(4, &q).is_infinity());
        assert_eq!(
            e.torsion_annihilator(Order::Z, &q).unwrap(),
            Torsion::Annihilator(GaussianIdeal::from_int(4))
        );
        assert_eq!(
            e.torsion_annihilator(Order::Z, &CurvePoint::Infinity).unwrap(),
            Torsion::Annihilator(GaussianIdeal::unit())
        );
        assert_eq!(e.torsion_annihilator(Order::Z, &CurvePoint::from_ints(-1, 30)).unwrap(), Torsion::NonTorsion);
    }

    #[test]
    fn gaussian_torsion_annihilator() {
        // (0,0) on y^2 = x^3 - 2x has order 2 and is fixed by i, so it is
        // killed by 1+i
        let e = cm();
        let t = CurvePoint::new(gr("0"), gr("0"));
        assert_eq!(
            e.torsion_annihilator(Order::Zi, &t).unwrap(),
            Torsion::Annihilator(GaussianIdeal::new(&GaussianInteger::new(1, 1)))
        );
        let p = CurvePoint::new(gr("-1"), gr("1"));
        assert_eq!(e.torsion_annihilator(Order::Zi, &p).unwrap(), Torsion::NonTorsion);
    }

    #[test]
    fn golden_table_terms() {
        let e = example();
        let p = CurvePoint::from_ints(-1, 30);
        let q = CurvePoint::from_ints(7, 34);
        let expect = [
            "(1)",
            "(2)^2",
            "(19)^2",
            "(6991)^2",
            "(12338681)^2",
            "(2)^2*(4890590069)^2",
        ];
        for (n, want) in expect.iter().enumerate() {
            let t = e.shifted_term(&p, &q, &GaussianInteger::from(n as i64)).unwrap();
            assert_eq!(t.to_string(), *want, "B_{n}");
        }
    }

    #[test]
    fn denominator_over_gaussian_field() {
        let e = cm();
        let r = CurvePoint::new(gr("-i/2"), gr("(-3-3i)/4"));
        assert_eq!(e.x_denominator_ideal(&r).unwrap().to_string(), "(1+i)^2");
        assert_eq!(e.x_denominator_ideal(&CurvePoint::Infinity), None);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WeierstrassCurve::short(0, 0), Err(CurveError::Singular));
        assert!(matches!(
            WeierstrassCurve::new(
                FieldTag::Q,
                [gr("0"), gr("0"), gr("0"), gr("i"), gr("1")],
                false
            ),
            Err(CurveError::OutsideField(_))
        ));
        assert_eq!(
            WeierstrassCurve::new(FieldTag::Qi, [gr("0"), gr("0"), gr("0"), gr("-2"), gr("1")], true),
            Err(CurveError::CmShape)
        );
        let e = example();
        assert!(e.check_point(&CurvePoint::from_ints(1, 1)).is_err());
    }

    #[test]
    fn discriminants() {
        assert_eq!(cm().discriminant(), GaussianRational::from_int(512));
        assert_eq!(example().discriminant(), GaussianRational::from_int(-342102016));
    }
}
