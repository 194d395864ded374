//! Naive, local and canonical heights, and the height and Möbius checks.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, FieldTag, Torsion, WeierstrassCurve};
use crate::numberfield::{
    factor_gaussian, factor_integer, log_abs, log_biguint, mobius_sum_and_euler_product, primes_up_to,
    FactorBudget, FactoredIdeal, GaussianIdeal, GaussianInteger, GaussianRational, Order,
};
use crate::reduction::{local_degree, residue_norm};
use crate::report::{LemmaReport, LemmaTag};

/// Canonical heights below this count as zero.
pub const TORSION_THRESHOLD: f64 = 1e-6;

/// Doubling steps used for the canonical height.
pub const MAX_DOUBLINGS: u32 = 8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// A real number and a bound on its distance from the true value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: f64,
    pub error_bound: f64,
}

impl HeightValue {
    pub fn exact(value: f64) -> Self {
        HeightValue { value, error_bound: 0.0 }
    }
}

/// A place of the field of definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Archimedean,
    Finite(GaussianIdeal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalHeight {
    pub place: Place,
    /// Local degree `n_v`.
    pub weight: u32,
    /// `max(0, log |x|_v)`.
    pub value: f64,
}

fn log_max(u: &GaussianInteger, d: &GaussianInteger) -> f64 {
    log_abs(&u.re, &u.im).max(log_abs(&d.re, &d.im))
}

/// `h(x)`: `log max(|a|, b)` over Q for `x = a/b`, and the same with
/// complex absolute values for a coprime Gaussian fraction over Q(i).
pub fn naive_height(x: &GaussianRational, field: FieldTag) -> HeightValue {
    if x.is_zero() {
        return HeightValue::exact(0.0);
    }
    let (u, d) = match field {
        FieldTag::Q => (
            GaussianInteger::from_int(x.re.numer().clone()),
            GaussianInteger::from_int(x.re.denom().clone()),
        ),
        FieldTag::Qi => x.to_fraction(),
    };
    let v = log_max(&u, &d);
    HeightValue {
        value: v,
        error_bound: v.abs() * 4.0 * f64::EPSILON,
    }
}

fn factor_in(field: FieldTag, g: &GaussianInteger) -> FactoredIdeal {
    if g.is_unit() || (g.is_rational() && g.re.abs().is_one()) {
        return FactoredIdeal::unit();
    }
    FactoredIdeal::factor(field.integers(), g, FactorBudget::complete())
}

/// Valuations of a nonzero `x` at every prime where it is nonzero.
fn valuations(x: &GaussianRational, field: FieldTag) -> Vec<(GaussianIdeal, i64)> {
    let (u, d) = match field {
        FieldTag::Q => (
            GaussianInteger::from_int(x.re.numer().clone()),
            GaussianInteger::from_int(x.re.denom().clone()),
        ),
        FieldTag::Qi => x.to_fraction(),
    };
    let mut out: Vec<(GaussianIdeal, i64)> = factor_in(field, &u)
        .factors()
        .iter()
        .map(|(p, e)| (p.clone(), *e as i64))
        .collect();
    out.extend(factor_in(field, &d).factors().iter().map(|(p, e)| (p.clone(), -(*e as i64))));
    out
}

/// Local heights at the archimedean place and at every prime where `x` is
/// not a unit. `x` must be nonzero.
pub fn local_heights(x: &GaussianRational, field: FieldTag) -> Vec<LocalHeight> {
    assert!(!x.is_zero(), "local heights of zero");
    let arch = match field {
        FieldTag::Q => x.re.abs().to_f64().map(f64::ln).unwrap_or_else(|| {
            log_abs(x.re.numer(), &BigInt::zero()) - log_abs(x.re.denom(), &BigInt::zero())
        }),
        FieldTag::Qi => {
            let (num, den) = x.common_denominator();
            log_abs(&num.re, &num.im) - log_abs(&den, &BigInt::zero())
        }
    };
    let mut out = vec![LocalHeight {
        place: Place::Archimedean,
        weight: field.degree(),
        value: arch.max(0.0),
    }];
    for (p, v) in valuations(x, field) {
        let n = local_degree(field, &p);
        let log_abs_v = -(v as f64) * log_biguint(&residue_norm(field, &p)) / n as f64;
        out.push(LocalHeight {
            place: Place::Finite(p),
            weight: n,
            value: log_abs_v.max(0.0),
        });
    }
    out
}

/// `Π |x|_v^{n_v}` computed exactly; equals one for every nonzero `x`.
pub fn product_formula(x: &GaussianRational, field: FieldTag) -> BigRational {
    assert!(!x.is_zero(), "product formula at zero");
    let mut acc = match field {
        FieldTag::Q => x.re.abs(),
        FieldTag::Qi => x.abs_sq(),
    };
    for (p, v) in valuations(x, field) {
        let n = BigRational::from_integer(BigInt::from(residue_norm(field, &p)));
        let f = n.pow(v.unsigned_abs() as i32);
        // |x|_p^{n_p} = N(p)^{-v}
        if v > 0 {
            acc /= f;
        } else {
            acc *= f;
        }
    }
    acc
}

/// Generators of the primes where the doubling map's numerator and
/// denominator can share a factor: those dividing 6, the discriminant and
/// the coefficient denominators.
fn doubling_support(e: &WeierstrassCurve, scale: &BigInt) -> Vec<GaussianInteger> {
    let (num, den) = e.discriminant().common_denominator();
    let mut rational = BigUint::from(6u32) * num.norm() * den.magnitude() * scale.magnitude();
    if rational.is_zero() {
        rational = BigUint::from(6u32);
    }
    let mut out = Vec::new();
    for (p, _) in factor_integer(&rational) {
        let p = GaussianInteger::from_int(BigInt::from(p));
        match e.field {
            FieldTag::Q => out.push(p),
            FieldTag::Qi => out.extend(factor_gaussian(&p).1.into_iter().map(|(q, _)| q)),
        }
    }
    out
}

struct Doubler {
    field: FieldTag,
    scale: GaussianInteger,
    b2: GaussianInteger,
    b4: GaussianInteger,
    b6: GaussianInteger,
    b8: GaussianInteger,
    support: Vec<GaussianInteger>,
}

impl Doubler {
    fn new(e: &WeierstrassCurve) -> Self {
        let bs = e.b_invariants();
        let mut l = BigInt::one();
        for b in &bs {
            let (_, d) = b.common_denominator();
            l = num_integer::Integer::lcm(&l, &d);
        }
        let lq = GaussianRational::from_int(l.clone());
        let lift = |b: &GaussianRational| -> GaussianInteger {
            let v = &lq * b;
            GaussianInteger::new(v.re.to_integer(), v.im.to_integer())
        };
        Doubler {
            field: e.field,
            scale: GaussianInteger::from_int(l.clone()),
            b2: lift(&bs[0]),
            b4: lift(&bs[1]),
            b6: lift(&bs[2]),
            b8: lift(&bs[3]),
            support: doubling_support(e, &l),
        }
    }

    /// `(X : Z)` for `x(2R)` from `(X : Z)` for `x(R)`, with common factors
    /// at the support primes removed and the sign or unit normalized.
    fn step(&self, x: &GaussianInteger, z: &GaussianInteger) -> (GaussianInteger, GaussianInteger) {
        let two = GaussianInteger::from(2);
        let four = GaussianInteger::from(4);
        let x2 = x * x;
        let z2 = z * z;
        let xz = x * z;
        let z3 = &z2 * z;
        let num = &(&(&(&x2 * &x2) * &self.scale) - &(&(&self.b4 * &x2) * &z2))
            - &(&(&(&two * &self.b6) * x) * &z3)
            - (&(&self.b8 * &z2) * &z2);
        let den = &(&(&(&(&four * &x2) * &xz) * &self.scale) + &(&(&self.b2 * &x2) * &z2))
            + &(&(&(&two * &self.b4) * x) * &z3)
            + (&(&self.b6 * &z2) * &z2);
        self.normalize(num, den)
    }

    fn normalize(&self, mut num: GaussianInteger, mut den: GaussianInteger) -> (GaussianInteger, GaussianInteger) {
        if den.is_zero() {
            return (GaussianInteger::one(), den);
        }
        for p in &self.support {
            loop {
                match (num.div_exact(p), den.div_exact(p)) {
                    (Some(a), Some(b)) => {
                        num = a;
                        den = b;
                    }
                    _ => break,
                }
            }
        }
        match self.field {
            FieldTag::Q => {
                if den.re.is_negative() {
                    (-num, -den)
                } else {
                    (num, den)
                }
            }
            FieldTag::Qi => {
                let (c, k) = den.canonical_parts();
                (num.mul_unit((4 - k) % 4), c)
            }
        }
    }
}

/// Naive heights `h(2^k R)` for `k = 0..=doublings`, from exact doubling of
/// the x-coordinate; `None` when a doubling reaches infinity or revisits an
/// x-coordinate, which proves `R` torsion. Stops early once the estimate
/// `h(2^k R)/(2·4^k)` moves by less than `stop` after `k >= 2`.
pub fn doubling_heights(e: &WeierstrassCurve, r: &CurvePoint, doublings: u32, stop: f64) -> Option<Vec<f64>> {
    let x = r.x()?;
    let doubler = Doubler::new(e);
    let (mut xn, mut zn) = match e.field {
        FieldTag::Q => (
            GaussianInteger::from_int(x.re.numer().clone()),
            GaussianInteger::from_int(x.re.denom().clone()),
        ),
        FieldTag::Qi => x.to_fraction(),
    };
    let mut seen = HashSet::new();
    seen.insert((xn.clone(), zn.clone()));
    let mut hs = vec![log_max(&xn, &zn)];
    let mut scale = 1.0f64;
    for k in 1..=doublings {
        let (nx, nz) = doubler.step(&xn, &zn);
        if nz.is_zero() || !seen.insert((nx.clone(), nz.clone())) {
            return None;
        }
        let h = log_max(&nx, &nz);
        let prev = hs[hs.len() - 1] / (2.0 * scale);
        scale *= 4.0;
        hs.push(h);
        if k >= 2 && (h / (2.0 * scale) - prev).abs() < stop {
            break;
        }
        xn = nx;
        zn = nz;
    }
    Some(hs)
}

/// `ĥ(R) = 1/2 lim h(2^n R)/4^n`, from at most [`MAX_DOUBLINGS`] exact
/// doublings of the x-coordinate.
///
/// The error bound is `C/4^n` with `C` the largest observed
/// `|h(2^{k+1}R) - 4h(2^k R)|`, an empirical stand-in for the constant
/// bounding `|h - 2ĥ|`. Torsion found by the doubling yields exactly zero.
pub fn canonical_height(e: &WeierstrassCurve, r: &CurvePoint) -> HeightValue {
    if r.is_infinity() {
        return HeightValue::exact(0.0);
    }
    let Some(hs) = doubling_heights(e, r, MAX_DOUBLINGS, 1e-8) else {
        return HeightValue::exact(0.0);
    };
    let c_est = hs.windows(2).map(|w| (w[1] - 4.0 * w[0]).abs()).fold(0.0, f64::max);
    let n = (hs.len() - 1) as i32;
    let scale = 4f64.powi(n);
    let estimate = hs[hs.len() - 1] / (2.0 * scale);
    HeightValue {
        value: estimate,
        error_bound: c_est / scale + estimate.abs() * 1e-12,
    }
}

/// Checks `ĥ(αR) = N(α) ĥ(R)` within the combined error bounds (floor
/// 10^-6), and that the torsion test agrees with `ĥ(R) < 10^-6`.
pub fn check_height_axioms(
    e: &WeierstrassCurve,
    order: Order,
    r: &CurvePoint,
    alpha: &GaussianInteger,
) -> LemmaReport {
    let report = LemmaReport::new(LemmaTag::Height, None, Some(alpha.clone())).with("point", r);
    let image = match e.apply_endo(alpha, r) {
        Ok(p) => p,
        Err(err) => return report.with("error", err).check(false),
    };
    let h = canonical_height(e, r);
    let ha = canonical_height(e, &image);
    let n = alpha.norm().to_f64().unwrap_or(f64::INFINITY);
    let diff = (ha.value - n * h.value).abs();
    let tol = (ha.error_bound + n * h.error_bound).max(TORSION_THRESHOLD);
    let scaling_ok = diff <= tol;
    let (torsion_ok, torsion) = match e.torsion_annihilator(order, r) {
        Ok(Torsion::Annihilator(s)) => (h.value < TORSION_THRESHOLD, format!("annihilator {}", s)),
        Ok(Torsion::NonTorsion) => (h.value >= TORSION_THRESHOLD, "non-torsion".to_string()),
        Err(err) => (false, err.to_string()),
    };
    report
        .with("h", format!("{:.12}", h.value))
        .with("h_err", format!("{:.3e}", h.error_bound))
        .with("h_alpha", format!("{:.12}", ha.value))
        .with("h_alpha_err", format!("{:.3e}", ha.error_bound))
        .with("norm", alpha.norm())
        .with("diff", format!("{:.3e}", diff))
        .with("tolerance", format!("{:.3e}", tol))
        .with("torsion", torsion)
        .check(scaling_ok && torsion_ok)
}

/// `Π_{p <= n} (1 - 1/p)` and `e^{-γ}/log n`.
pub fn mertens_lower_bound(n: u64) -> (f64, f64) {
    assert!(n >= 2, "Mertens product needs n >= 2");
    let product = primes_up_to(n).iter().fold(1.0, |acc, &p| acc * (1.0 - 1.0 / p as f64));
    (product, (-EULER_GAMMA).exp() / (n as f64).ln())
}

/// `Π_{p <= n} (1 - 1/p)` as an exact rational.
pub fn mertens_product_exact(n: u64) -> BigRational {
    primes_up_to(n).iter().fold(BigRational::one(), |acc, &p| {
        acc * BigRational::new(BigInt::from(p - 1), BigInt::from(p))
    })
}

/// The chain `Σ μ(J)/N(J) = Π (1 - 1/N(p)) >= Π_{p <= N(α)} (1 - 1/p)^2`
/// for divisors of `(α)` coprime to `s`, exactly. Reports the constant
/// `C = Σ·(log N(α))^2`.
pub fn mobius_chain(order: Order, alpha: &GaussianInteger, s: &GaussianIdeal) -> LemmaReport {
    let report = LemmaReport::new(LemmaTag::Mobius, None, Some(alpha.clone())).with("s", s);
    let (sum, euler) = mobius_sum_and_euler_product(order, &GaussianIdeal::new(alpha), s);
    let n = alpha.norm();
    let Some(n64) = n.to_u64().filter(|&v| v >= 2) else {
        return report.with("sum", &sum).check(sum == euler);
    };
    let mertens = mertens_product_exact(n64);
    let lower = &mertens * &mertens;
    let c = sum.to_f64().unwrap_or(0.0) * (n64 as f64).ln().powi(2);
    report
        .with("sum", &sum)
        .with("euler", &euler)
        .with("mertens_squared", format!("{:.6e}", lower.to_f64().unwrap_or(0.0)))
        .with("c", format!("{:.6}", c))
        .check(sum == euler && sum >= lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::GaussianRational;

    fn gr(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn example() -> WeierstrassCurve {
        WeierstrassCurve::short(-11, 890).unwrap()
    }

    #[test]
    fn naive_examples() {
        assert!((naive_height(&gr("7/4"), FieldTag::Q).value - 7f64.ln()).abs() < 1e-12);
        assert!((naive_height(&gr("3"), FieldTag::Q).value - 3f64.ln()).abs() < 1e-12);
        assert_eq!(naive_height(&gr("1"), FieldTag::Q).value, 0.0);
        assert_eq!(naive_height(&gr("i"), FieldTag::Qi).value, 0.0);
        // numerator -i and denominator 2 are coprime
        let h = naive_height(&gr("-i/2"), FieldTag::Qi).value;
        assert!((h - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn local_heights_sum_to_naive_height() {
        for (s, field) in [("7/4", FieldTag::Q), ("-i/2", FieldTag::Qi), ("(3+4i)/10", FieldTag::Qi), ("9/7*i", FieldTag::Qi)] {
            let x = gr(s);
            let total: f64 = local_heights(&x, field).iter().map(|l| l.weight as f64 * l.value).sum::<f64>()
                / field.degree() as f64;
            assert!((total - naive_height(&x, field).value).abs() < 1e-9, "{s}");
            assert!(product_formula(&x, field).is_one(), "{s}");
        }
    }

    #[test]
    fn doubling_matches_group_law() {
        let e = example();
        let p = CurvePoint::from_ints(-1, 30);
        let d = Doubler::new(&e);
        let (mut x, mut z) = (GaussianInteger::from(-1), GaussianInteger::from(1));
        let mut r = p.clone();
        for _ in 0..4 {
            (x, z) = d.step(&x, &z);
            r = e.double(&r);
            let rx = r.x().unwrap();
            assert_eq!(rx.re.numer(), &x.re);
            assert_eq!(rx.re.denom(), &z.re);
        }
        let cm = WeierstrassCurve::cm_family(gr("-2")).unwrap();
        let d = Doubler::new(&cm);
        let mut r = CurvePoint::new(gr("-1"), gr("1"));
        let (mut x, mut z) = (GaussianInteger::from(-1), GaussianInteger::from(1));
        for _ in 0..4 {
            (x, z) = d.step(&x, &z);
            r = cm.double(&r);
            assert_eq!(r.x().unwrap().to_fraction(), (x.clone(), z.clone()));
        }
    }

    #[test]
    fn heights_of_example_points() {
        let e = example();
        assert_eq!(canonical_height(&e, &CurvePoint::Infinity), HeightValue::exact(0.0));
        let q = canonical_height(&e, &CurvePoint::from_ints(7, 34));
        assert_eq!(q.value, 0.0);
        let p = CurvePoint::from_ints(-1, 30);
        let hp = canonical_height(&e, &p);
        assert!(hp.value > 0.1, "{hp:?}");
        assert!(hp.error_bound < 1e-3, "{hp:?}");
        let h2 = canonical_height(&e, &e.double(&p));
        assert!((h2.value - 4.0 * hp.value).abs() <= h2.error_bound + 4.0 * hp.error_bound + 1e-6);
    }

    #[test]
    fn axioms_on_both_curves() {
        let e = example();
        let p = CurvePoint::from_ints(-1, 30);
        for n in [2, 3, 5] {
            let r = check_height_axioms(&e, Order::Z, &p, &GaussianInteger::from(n));
            assert!(!r.failed(), "{r}");
        }
        let cm = WeierstrassCurve::cm_family(gr("-2")).unwrap();
        let r = check_height_axioms(&cm, Order::Zi, &CurvePoint::new(gr("-1"), gr("1")), &GaussianInteger::new(1, 1));
        assert!(!r.failed(), "{r}");
    }

    #[test]
    fn mertens_examples() {
        assert_eq!(mertens_product_exact(10), BigRational::new(8.into(), 35.into()));
        assert!((mertens_lower_bound(10).0 - 8.0 / 35.0).abs() < 1e-15);
        assert_eq!(mertens_lower_bound(2).0, 0.5);
        let (prod, asym) = mertens_lower_bound(100);
        assert!(prod >= 0.9 * asym);
    }

    #[test]
    fn mobius_chain_on_small_indices() {
        for a in 10..=40 {
            let r = mobius_chain(Order::Z, &GaussianInteger::from(a), &GaussianIdeal::from_int(4));
            assert!(!r.failed(), "{r}");
        }
    }
}
