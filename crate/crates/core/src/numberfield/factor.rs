//! Integer and Gaussian factorization: trial division, Miller-Rabin and
//! Brent's variant of Pollard rho.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::GaussianInteger;

const SIEVE_LIMIT: u64 = 1_000_000;
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Limits on how hard a factorization may try before giving up on a
/// composite cofactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorBudget {
    /// Trial division bound, capped at 10^6.
    pub trial_limit: u64,
    /// Iterations of the rho walk per attempt.
    pub rho_iterations: u64,
    /// Number of polynomial constants tried.
    pub rho_attempts: u32,
}

impl FactorBudget {
    /// Keeps going until every factor is (probably) prime.
    pub fn complete() -> Self {
        FactorBudget {
            trial_limit: SIEVE_LIMIT,
            rho_iterations: u64::MAX,
            rho_attempts: u32::MAX,
        }
    }

    /// Trial division only.
    pub fn trial(limit: u64) -> Self {
        FactorBudget {
            trial_limit: limit,
            rho_iterations: 0,
            rho_attempts: 0,
        }
    }
}

impl Default for FactorBudget {
    fn default() -> Self {
        FactorBudget {
            trial_limit: SIEVE_LIMIT,
            rho_iterations: 1 << 16,
            rho_attempts: 3,
        }
    }
}

/// Result of a possibly partial factorization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntegerFactorization {
    /// Prime factors, ascending.
    pub primes: Vec<(BigUint, u32)>,
    /// Composite cofactors the budget could not split, ascending.
    pub composites: Vec<(BigUint, u32)>,
}

impl IntegerFactorization {
    pub fn is_complete(&self) -> bool {
        self.composites.is_empty()
    }
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        out.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    out
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(SIEVE_LIMIT))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
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

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES[..12] {
        let p = p as u64;
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // the first twelve prime bases are a proof for every 64-bit input
    'bases: for &a in &MR_BASES[..12] {
        let mut x = powmod(a as u64, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first thirteen prime bases: a proof below
/// 3.3 * 10^24, a strong probable-prime test above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| ((mulmod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut ys) = (0u64, 2u64, 0u64);
        let (mut q, mut g, mut r) = (1u64, 1u64, 1u64);
        let m = 64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Complete factorization of a machine-sized integer, primes ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 needs n >= 1");
    let mut out = Vec::new();
    for &p in small_primes().iter().take_while(|&&p| p < 1000) {
        if p * p > n {
            break;
        }
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            out.push((m, 1));
            continue;
        }
        let d = rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
    merge_sorted(out)
}

fn merge_sorted<T: Ord>(mut v: Vec<(T, u32)>) -> Vec<(T, u32)> {
    v.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(T, u32)> = Vec::with_capacity(v.len());
    for (p, e) in v {
        match out.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => out.push((p, e)),
        }
    }
    out
}

fn rho_big(n: &BigUint, c: u64, max_iter: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let one = BigUint::one();
    let (mut x, mut y, mut ys) = (BigUint::zero(), BigUint::from(2u32), BigUint::zero());
    let (mut q, mut g) = (BigUint::one(), BigUint::one());
    let (mut r, m) = (1u64, 128u64);
    let mut spent = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                q = (&q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        spent = spent.saturating_add(2 * r);
        if g == one && spent > max_iter {
            return None;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if g > one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Writes `n = r^k` with `k` maximal, assuming `n` has no prime factor
/// below `2^min_bits`.
fn perfect_power(n: &BigUint, min_bits: u64) -> (BigUint, u32) {
    let bits = n.bits();
    let max_k = (bits / min_bits.max(1)).max(1);
    for k in (2..=max_k as u32).rev() {
        let r = n.nth_root(k);
        if &r.pow(k) == n {
            let (inner, j) = perfect_power(&r, min_bits);
            return (inner, j * k);
        }
    }
    (n.clone(), 1)
}

pub fn factor_integer_with(n: &BigUint, budget: FactorBudget) -> IntegerFactorization {
    assert!(!n.is_zero(), "factorization of zero");
    if let Some(small) = n.to_u64() {
        if budget.rho_attempts > 0 || small < budget.trial_limit.saturating_mul(budget.trial_limit) {
            let primes = factor_u64(small)
                .into_iter()
                .map(|(p, e)| (BigUint::from(p), e))
                .collect();
            return IntegerFactorization { primes, composites: Vec::new() };
        }
    }
    let limit = budget.trial_limit.min(SIEVE_LIMIT);
    let mut rest = n.clone();
    let mut primes = Vec::new();
    for &p in small_primes().iter().take_while(|&&p| p <= limit) {
        if rest.is_one() {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            primes.push((BigUint::from(p), e));
        }
        if BigUint::from(p * p) > rest {
            break;
        }
    }
    let mut composites = Vec::new();
    let bound = BigUint::from(limit) * BigUint::from(limit);
    let min_bits = (64 - limit.leading_zeros() as u64).saturating_sub(1);
    let mut stack = vec![(rest, 1u32)];
    while let Some((m, e)) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if m < bound || is_probable_prime(&m) {
            primes.push((m, e));
            continue;
        }
        if let Some(small) = m.to_u64() {
            if budget.rho_attempts > 0 {
                primes.extend(factor_u64(small).into_iter().map(|(p, f)| (BigUint::from(p), f * e)));
                continue;
            }
        }
        let (root, k) = perfect_power(&m, min_bits);
        if k > 1 {
            stack.push((root, e * k));
            continue;
        }
        let split = (1..=budget.rho_attempts as u64)
            .find_map(|c| rho_big(&m, c, budget.rho_iterations));
        match split {
            Some(d) => {
                let other = &m / &d;
                stack.push((d, e));
                stack.push((other, e));
            }
            None => composites.push((m, e)),
        }
    }
    IntegerFactorization {
        primes: merge_sorted(primes),
        composites: merge_sorted(composites),
    }
}

/// Complete factorization of `n >= 1`, primes ascending.
pub fn factor_integer(n: &BigUint) -> Vec<(BigUint, u32)> {
    factor_integer_with(n, FactorBudget::complete()).primes
}

/// A square root of -1 modulo a prime `p = 1 mod 4`: `a^((p-1)/4)` for the
/// smallest quadratic non-residue `a`.
pub fn sqrt_minus_one_mod(p: &BigUint) -> BigUint {
    assert!((p % 4u32) == BigUint::one(), "need p = 1 mod 4");
    let p_minus_1 = p - 1u32;
    let half = &p_minus_1 >> 1;
    let quarter = &p_minus_1 >> 2;
    let mut a = BigUint::from(2u32);
    loop {
        if a.modpow(&half, p) == p_minus_1 {
            let r = a.modpow(&quarter, p);
            assert_eq!((&r * &r) % p, p_minus_1, "square root of -1 failed to verify");
            return r;
        }
        a += 1u32;
    }
}

/// The canonical Gaussian prime `a+bi` above a rational prime `p = 1 mod 4`
/// whose conjugate is the other prime above `p`.
fn split_prime(p: &BigUint) -> GaussianInteger {
    let r = sqrt_minus_one_mod(p);
    let p = GaussianInteger::from_int(BigInt::from(p.clone()));
    p.gcd(&GaussianInteger::new(BigInt::from(r), 1))
}

/// Possibly partial factorization in Z[i].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianFactorization {
    pub unit: GaussianInteger,
    /// Canonical primes sorted by (norm, re, im).
    pub primes: Vec<(GaussianInteger, u32)>,
    /// Canonical unfactored parts.
    pub cofactors: Vec<(GaussianInteger, u32)>,
}

impl GaussianFactorization {
    pub fn is_complete(&self) -> bool {
        self.cofactors.is_empty()
    }
}

pub fn factor_gaussian_with(g: &GaussianInteger, budget: FactorBudget) -> GaussianFactorization {
    assert!(!g.is_zero(), "factorization of zero");
    let content = GaussianInteger::from_int(g.re.gcd(&g.im));
    let h = g.div_exact(&content).expect("content divides");
    let mut primes: Vec<(GaussianInteger, u32)> = Vec::new();
    let mut cofactors: Vec<(GaussianInteger, u32)> = Vec::new();

    let c = content.re.magnitude().clone();
    let cf = factor_integer_with(&c, budget);
    for (p, e) in &cf.primes {
        match (p % 4u32).to_u32() {
            Some(2) => primes.push((GaussianInteger::new(1, 1), 2 * e)),
            Some(3) => primes.push((GaussianInteger::from_int(BigInt::from(p.clone())), *e)),
            _ => {
                let pi = split_prime(p);
                primes.push((pi.conj().canonical_associate(), *e));
                primes.push((pi, *e));
            }
        }
    }
    for (m, e) in &cf.composites {
        cofactors.push((GaussianInteger::from_int(BigInt::from(m.clone())), *e));
    }

    let nf = factor_integer_with(&h.norm(), budget);
    for (p, e) in &nf.primes {
        if (p % 4u32).to_u32() == Some(2) {
            primes.push((GaussianInteger::new(1, 1), *e));
            continue;
        }
        let pi = split_prime(p);
        let pi = if pi.divides(&h) { pi } else { pi.conj().canonical_associate() };
        primes.push((pi, *e));
    }
    for (m, e) in &nf.composites {
        let part = h.gcd(&GaussianInteger::from_int(BigInt::from(m.pow(*e))));
        cofactors.push((part, 1));
    }

    let primes = merge_sorted(primes);
    let cofactors = merge_sorted(cofactors);
    let mut product = GaussianInteger::one();
    for (p, e) in primes.iter().chain(cofactors.iter()) {
        product = &product * &p.pow(*e);
    }
    let unit = g.div_exact(&product).expect("factors divide the input");
    debug_assert!(unit.is_unit());
    GaussianFactorization { unit, primes, cofactors }
}

/// Complete factorization `g = unit * prod p^e` in Z[i].
pub fn factor_gaussian(g: &GaussianInteger) -> (GaussianInteger, Vec<(GaussianInteger, u32)>) {
    let f = factor_gaussian_with(g, FactorBudget::complete());
    (f.unit, f.primes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn multiply(f: &[(BigUint, u32)]) -> BigUint {
        f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(factor_integer(&big(12)), vec![(big(2), 2), (big(3), 1)]);
        assert!(factor_integer(&big(1)).is_empty());
        assert_eq!(factor_u64(97), vec![(97, 1)]);
    }

    #[test]
    fn values_from_the_example_table_are_prime() {
        for p in [4890590069u64, 12338681, 6991, 3421265013773, 102625619] {
            assert_eq!(factor_integer(&big(p)), vec![(big(p), 1)], "{p}");
        }
    }

    #[test]
    fn semiprimes_beyond_u64() {
        let p = BigUint::parse_bytes(b"10000000019", 10).unwrap();
        let q = BigUint::parse_bytes(b"10000000033", 10).unwrap();
        let n = &p * &q * &p;
        let f = factor_integer(&n);
        assert_eq!(multiply(&f), n);
        assert_eq!(f, vec![(p, 2), (q, 1)]);
    }

    #[test]
    fn budget_leaves_composite_cofactor() {
        let p = BigUint::parse_bytes(b"10000000019", 10).unwrap();
        let q = BigUint::parse_bytes(b"10000000033", 10).unwrap();
        let n = &p * &q * 12u32;
        let f = factor_integer_with(&n, FactorBudget::trial(1000));
        assert_eq!(f.primes, vec![(big(2), 2), (big(3), 1)]);
        assert_eq!(f.composites, vec![(&p * &q, 1)]);
        let mut all = f.primes.clone();
        all.extend(f.composites.iter().cloned());
        assert_eq!(multiply(&all), n);
    }

    #[test]
    fn carmichael_numbers_are_composite() {
        for n in [561u64, 41041, 825265, 321197185, 3215031751] {
            assert!(!is_probable_prime(&big(n)), "{n}");
        }
    }

    #[test]
    fn sqrt_minus_one_squares_back() {
        for p in [5u64, 13, 17, 29, 1_000_000_009] {
            if p % 4 != 1 {
                continue;
            }
            let r = sqrt_minus_one_mod(&big(p));
            assert_eq!((&r * &r) % big(p), big(p - 1));
        }
    }

    #[test]
    fn gaussian_examples() {
        let (u, f) = factor_gaussian(&GaussianInteger::new(5, 0));
        assert_eq!(u, GaussianInteger::new(0, -1));
        assert_eq!(f, vec![(GaussianInteger::new(1, 2), 1), (GaussianInteger::new(2, 1), 1)]);
        let (u, f) = factor_gaussian(&GaussianInteger::new(2, 0));
        assert_eq!(u, GaussianInteger::new(0, -1));
        assert_eq!(f, vec![(GaussianInteger::new(1, 1), 2)]);
        let (u, f) = factor_gaussian(&GaussianInteger::new(1, 1));
        assert!(u.is_one());
        assert_eq!(f, vec![(GaussianInteger::new(1, 1), 1)]);
        let (u, f) = factor_gaussian(&GaussianInteger::new(3, 0));
        assert!(u.is_one());
        assert_eq!(f, vec![(GaussianInteger::new(3, 0), 1)]);
    }

    #[test]
    fn gaussian_round_trip_on_mixed_input() {
        // (2+i)^3 (1-2i) (1+i)^3 * 21
        let g = GaussianInteger::new(2, 1).pow(3)
            * GaussianInteger::new(1, -2)
            * GaussianInteger::new(1, 1).pow(3)
            * GaussianInteger::from(21);
        let (u, f) = factor_gaussian(&g);
        let mut prod = u.clone();
        for (p, e) in &f {
            assert_eq!(p, &p.canonical_associate());
            prod = prod * p.pow(*e);
        }
        assert_eq!(prod, g);
        assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
