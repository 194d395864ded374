//! Principal ideals of Z and Z[i], plain and factored.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::factor::{factor_gaussian_with, factor_integer_with, FactorBudget};
use super::{GaussianInteger, Order, ParseError};

/// The ideal generated by a canonical associate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianIdeal {
    generator: GaussianInteger,
}

impl GaussianIdeal {
    pub fn new(g: &GaussianInteger) -> Self {
        GaussianIdeal {
            generator: g.canonical_associate(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianIdeal::new(&GaussianInteger::from(n))
    }

    pub fn unit() -> Self {
        GaussianIdeal::from_int(1)
    }

    pub fn zero() -> Self {
        GaussianIdeal::from_int(0)
    }

    pub fn generator(&self) -> &GaussianInteger {
        &self.generator
    }

    pub fn is_zero(&self) -> bool {
        self.generator.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.generator.is_one()
    }

    /// Norm of the generator, i.e. the degree of the corresponding
    /// endomorphism (`m^2` for `(m)` in Z).
    pub fn norm(&self) -> BigUint {
        self.generator.norm()
    }

    pub fn mul(&self, other: &GaussianIdeal) -> GaussianIdeal {
        GaussianIdeal::new(&(&self.generator * &other.generator))
    }

    /// The sum `I + J`.
    pub fn gcd(&self, other: &GaussianIdeal) -> GaussianIdeal {
        GaussianIdeal::new(&self.generator.gcd(&other.generator))
    }

    /// The intersection `I ∩ J`.
    pub fn lcm(&self, other: &GaussianIdeal) -> GaussianIdeal {
        if self.is_zero() || other.is_zero() {
            return GaussianIdeal::zero();
        }
        let g = self.generator.gcd(&other.generator);
        let q = self.generator.div_exact(&g).expect("gcd divides");
        GaussianIdeal::new(&(&q * &other.generator))
    }

    /// `self | other`, i.e. `other ⊆ self`.
    pub fn divides(&self, other: &GaussianIdeal) -> bool {
        self.generator.divides(&other.generator)
    }

    /// `self / other` when `other | self`.
    pub fn quotient(&self, other: &GaussianIdeal) -> Option<GaussianIdeal> {
        if other.is_zero() {
            return None;
        }
        self.generator.div_exact(&other.generator).map(|q| GaussianIdeal::new(&q))
    }

    pub fn contains(&self, g: &GaussianInteger) -> bool {
        self.generator.divides(g)
    }

    pub fn coprime(&self, other: &GaussianIdeal) -> bool {
        self.gcd(other).is_unit()
    }

    /// Exponent of the prime ideal `p` in `self`; `self` must be nonzero.
    pub fn valuation(&self, p: &GaussianIdeal) -> u32 {
        assert!(!self.is_zero(), "valuation of the zero ideal");
        let mut g = self.generator.clone();
        let mut v = 0;
        while let Some(q) = g.div_exact(&p.generator) {
            g = q;
            v += 1;
        }
        v
    }

    /// Prime factorization in the given ring, complete.
    pub fn factor(&self, order: Order) -> FactoredIdeal {
        FactoredIdeal::factor(order, &self.generator, FactorBudget::complete())
    }
}

impl fmt::Display for GaussianIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

impl FromStr for GaussianIdeal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(t);
        Ok(GaussianIdeal::new(&inner.parse()?))
    }
}

impl Serialize for GaussianIdeal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GaussianIdeal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A nonzero ideal as a product of prime powers.
///
/// When factoring runs under a budget, parts that could not be split are
/// kept in `cofactors`; their primes are all larger than anything the
/// budget could reach.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactoredIdeal {
    factors: Vec<(GaussianIdeal, u32)>,
    cofactors: Vec<(GaussianIdeal, u32)>,
}

impl FactoredIdeal {
    pub fn unit() -> Self {
        FactoredIdeal::default()
    }

    /// Builds from prime powers, merging repeats and sorting.
    pub fn from_factors(factors: impl IntoIterator<Item = (GaussianIdeal, u32)>) -> Self {
        FactoredIdeal {
            factors: normalize(factors),
            cofactors: Vec::new(),
        }
    }

    pub fn from_parts(
        factors: impl IntoIterator<Item = (GaussianIdeal, u32)>,
        cofactors: impl IntoIterator<Item = (GaussianIdeal, u32)>,
    ) -> Self {
        FactoredIdeal {
            factors: normalize(factors),
            cofactors: normalize(cofactors),
        }
    }

    /// Factors the ideal `(g)` of `order`; `g` must be nonzero.
    pub fn factor(order: Order, g: &GaussianInteger, budget: FactorBudget) -> Self {
        assert!(!g.is_zero(), "cannot factor the zero ideal");
        match order {
            Order::Z => {
                assert!(g.is_rational(), "Z-ideal with non-rational generator");
                let f = factor_integer_with(g.re.magnitude(), budget);
                let lift = |v: Vec<(BigUint, u32)>| {
                    v.into_iter()
                        .map(|(p, e)| (GaussianIdeal::new(&GaussianInteger::from_int(BigInt::from(p))), e))
                        .collect::<Vec<_>>()
                };
                FactoredIdeal::from_parts(lift(f.primes), lift(f.composites))
            }
            Order::Zi => {
                let f = factor_gaussian_with(g, budget);
                let lift = |v: Vec<(GaussianInteger, u32)>| {
                    v.into_iter().map(|(p, e)| (GaussianIdeal::new(&p), e)).collect::<Vec<_>>()
                };
                FactoredIdeal::from_parts(lift(f.primes), lift(f.cofactors))
            }
        }
    }

    pub fn factors(&self) -> &[(GaussianIdeal, u32)] {
        &self.factors
    }

    pub fn cofactors(&self) -> &[(GaussianIdeal, u32)] {
        &self.cofactors
    }

    pub fn is_complete(&self) -> bool {
        self.cofactors.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty() && self.cofactors.is_empty()
    }

    pub fn primes(&self) -> impl Iterator<Item = &GaussianIdeal> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn generator(&self) -> GaussianInteger {
        let mut g = GaussianInteger::one();
        for (p, e) in self.factors.iter().chain(self.cofactors.iter()) {
            g = &g * &p.generator().pow(*e);
        }
        g.canonical_associate()
    }

    pub fn ideal(&self) -> GaussianIdeal {
        GaussianIdeal::new(&self.generator())
    }

    pub fn norm(&self) -> BigUint {
        self.generator().norm()
    }

    /// Exact exponent of the prime `p`, looking inside cofactors too.
    pub fn valuation(&self, p: &GaussianIdeal) -> u32 {
        let listed = self
            .factors
            .iter()
            .find(|(q, _)| q == p)
            .map(|(_, e)| *e)
            .unwrap_or(0);
        let hidden: u32 = self.cofactors.iter().map(|(c, e)| c.valuation(p) * e).sum();
        listed + hidden
    }

    pub fn mul(&self, other: &FactoredIdeal) -> FactoredIdeal {
        FactoredIdeal::from_parts(
            self.factors.iter().chain(other.factors.iter()).cloned(),
            self.cofactors.iter().chain(other.cofactors.iter()).cloned(),
        )
    }
}

fn normalize(v: impl IntoIterator<Item = (GaussianIdeal, u32)>) -> Vec<(GaussianIdeal, u32)> {
    let mut v: Vec<_> = v.into_iter().filter(|(p, e)| *e > 0 && !p.is_unit()).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(GaussianIdeal, u32)> = Vec::with_capacity(v.len());
    for (p, e) in v {
        match out.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => out.push((p, e)),
        }
    }
    out
}

impl fmt::Display for FactoredIdeal {
    /// `(2)^2*(19)^2`; the unit ideal prints as `(1)`, cofactors as `[c]^e`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("(1)");
        }
        let mut parts = Vec::new();
        for (p, e) in &self.factors {
            parts.push(if *e == 1 { p.to_string() } else { format!("{}^{}", p, e) });
        }
        for (c, e) in &self.cofactors {
            let body = format!("[{}]", c.generator());
            parts.push(if *e == 1 { body } else { format!("{}^{}", body, e) });
        }
        f.write_str(&parts.join("*"))
    }
}

impl FromStr for FactoredIdeal {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "(1)" {
            return Ok(FactoredIdeal::unit());
        }
        let mut factors = Vec::new();
        let mut cofactors = Vec::new();
        for part in t.split('*') {
            let (base, exp) = match part.rsplit_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| ParseError::new(s, "bad exponent"))?),
                None => (part, 1),
            };
            if let Some(inner) = base.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                cofactors.push((GaussianIdeal::new(&inner.parse()?), exp));
            } else if base.starts_with('(') && base.ends_with(')') {
                factors.push((base.parse()?, exp));
            } else {
                return Err(ParseError::new(s, "expected (p)^e factors"));
            }
        }
        Ok(FactoredIdeal::from_parts(factors, cofactors))
    }
}

impl Serialize for FactoredIdeal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FactoredIdeal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
