//! Divisor lattices, the Möbius function, and the Möbius sum over divisors
//! coprime to a modulus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{FactoredIdeal, GaussianIdeal, Order};

/// Every divisor of `ideal`, sorted by norm and then generator. The ideal
/// must be completely factored.
pub fn ideal_divisors(ideal: &FactoredIdeal) -> Vec<FactoredIdeal> {
    assert!(ideal.is_complete(), "divisors of a partially factored ideal {}", ideal);
    let mut out = vec![Vec::new()];
    for (p, e) in ideal.factors() {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            for k in 0..=*e {
                let mut d: Vec<(GaussianIdeal, u32)> = d.clone();
                if k > 0 {
                    d.push((p.clone(), k));
                }
                next.push(d);
            }
        }
        out = next;
    }
    let mut divisors: Vec<FactoredIdeal> = out.into_iter().map(FactoredIdeal::from_factors).collect();
    divisors.sort_by_cached_key(|d| d.generator());
    divisors
}

/// `0` when some exponent exceeds one, otherwise `(-1)^k` for `k` prime
/// factors. The ideal must be completely factored.
pub fn mobius(ideal: &FactoredIdeal) -> i8 {
    assert!(ideal.is_complete(), "mobius of a partially factored ideal {}", ideal);
    if ideal.factors().iter().any(|(_, e)| *e > 1) {
        0
    } else if ideal.factors().len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn inv_norm(p: &FactoredIdeal) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p.norm()))
}

/// The sum of `μ(J)/N(J)` over divisors `J` of `(α)` coprime to `s`, and the
/// product of `1 - 1/N(p)` over the primes of `(α)` coprime to `s`. Norms
/// are endomorphism degrees.
pub fn mobius_sum_and_euler_product(
    order: Order,
    alpha: &GaussianIdeal,
    s: &GaussianIdeal,
) -> (BigRational, BigRational) {
    assert!(!alpha.is_zero() && !s.is_zero(), "Möbius sum needs nonzero ideals");
    let fa = alpha.factor(order);
    let mut sum = BigRational::zero();
    for j in ideal_divisors(&fa) {
        if !j.ideal().coprime(s) {
            continue;
        }
        match mobius(&j) {
            0 => {}
            m => sum += inv_norm(&j) * BigRational::from_integer(BigInt::from(m)),
        }
    }
    let mut product = BigRational::one();
    for p in fa.primes() {
        if p.coprime(s) {
            product *= BigRational::one() - inv_norm(&FactoredIdeal::from_factors([(p.clone(), 1)]));
        }
    }
    (sum, product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::GaussianInteger;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn divisors_of_twelve_and_five() {
        let twelve = GaussianIdeal::from_int(12).factor(Order::Z);
        let ds: Vec<String> = ideal_divisors(&twelve).iter().map(|d| d.ideal().to_string()).collect();
        assert_eq!(ds, ["(1)", "(2)", "(3)", "(4)", "(6)", "(12)"]);
        let five = GaussianIdeal::from_int(5).factor(Order::Zi);
        let ds: Vec<String> = ideal_divisors(&five).iter().map(|d| d.ideal().to_string()).collect();
        assert_eq!(ds, ["(1)", "(1+2i)", "(2+i)", "(5)"]);
        assert_eq!(ideal_divisors(&FactoredIdeal::unit()).len(), 1);
    }

    #[test]
    fn mobius_values() {
        assert_eq!(mobius(&GaussianIdeal::from_int(6).factor(Order::Z)), 1);
        assert_eq!(mobius(&GaussianIdeal::from_int(4).factor(Order::Z)), 0);
        assert_eq!(mobius(&FactoredIdeal::unit()), 1);
        assert_eq!(mobius(&GaussianIdeal::new(&GaussianInteger::new(1, 1)).factor(Order::Zi)), -1);
    }

    #[test]
    fn mobius_sum_examples() {
        // over Z the norm of (3) is deg[3] = 9
        let (s, p) = mobius_sum_and_euler_product(Order::Z, &GaussianIdeal::from_int(12), &GaussianIdeal::from_int(4));
        assert_eq!((s.clone(), p), (q(8, 9), q(8, 9)));
        let (s, p) = mobius_sum_and_euler_product(Order::Zi, &GaussianIdeal::from_int(5), &GaussianIdeal::unit());
        assert_eq!(s, q(1, 1) - q(1, 5) - q(1, 5) + q(1, 25));
        assert_eq!(p, q(16, 25));
        let (s, p) = mobius_sum_and_euler_product(Order::Z, &GaussianIdeal::unit(), &GaussianIdeal::from_int(7));
        assert_eq!((s, p), (q(1, 1), q(1, 1)));
    }
}
