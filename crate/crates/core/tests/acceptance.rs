//! End-to-end acceptance run. Prints `criterion N: PASS` or `FAIL` for
//! each criterion and exits nonzero if any fails or runs over its time
//! limit.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use edseq::curve::{CurvePoint, Term, WeierstrassCurve};
use edseq::heights::{canonical_height, check_height_axioms, TORSION_THRESHOLD};
use edseq::numberfield::{
    coset_min_norm, factor_gaussian, ideal_divisors, lemma_k_gap, mobius, mobius_sum_and_euler_product,
    GaussianIdeal, GaussianInteger, GaussianRational, Order,
};
use edseq::reduction::ann_ideal;
use edseq::report::{LemmaTag, Outcome};
use edseq::sequences::{index_sets, ip_jp, SequenceContext};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn curve() -> WeierstrassCurve {
    WeierstrassCurve::short(-11, 890).unwrap()
}

fn p() -> CurvePoint {
    CurvePoint::from_ints(-1, 30)
}

fn q() -> CurvePoint {
    CurvePoint::from_ints(7, 34)
}

fn ctx(cap: u64) -> SequenceContext {
    SequenceContext::new(curve(), p(), q(), Order::Z, cap).unwrap()
}

fn cm_curve() -> WeierstrassCurve {
    WeierstrassCurve::cm_family(GaussianRational::from_int(-2)).unwrap()
}

fn cm_point() -> CurvePoint {
    CurvePoint::new(GaussianRational::from_int(-1), GaussianRational::from_int(1))
}

fn z(n: i64) -> GaussianInteger {
    GaussianInteger::from(n)
}

fn id(n: i64) -> GaussianIdeal {
    GaussianIdeal::from_int(n)
}

fn golden_table() -> Check {
    let expected = [
        "(1)",
        "(2)^2",
        "(19)^2",
        "(6991)^2",
        "(12338681)^2",
        "(2)^2*(4890590069)^2",
    ];
    let e = curve();
    for (n, want) in expected.iter().enumerate() {
        let term = e.shifted_term(&p(), &q(), &z(n as i64)).map_err(|e| e.to_string())?;
        ensure(term.to_string() == *want, || format!("B_{} = {}, expected {}", n, term, want))?;
    }
    Ok(())
}

fn divisibility_pattern() -> Check {
    let mut c = ctx(100);
    let found: BTreeSet<i64> = c
        .divisibility_pattern(&id(19), 2500)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|a| a.re.to_i64().unwrap())
        .collect();
    let expected: BTreeSet<i64> = (-50..=50).filter(|k: &i64| k.rem_euclid(8) == 2).collect();
    ensure(found == expected, || format!("19 divides B_k for k in {:?}", found))
}

fn annihilator() -> Check {
    let ann = ann_ideal(&curve(), Order::Z, &id(19), &p()).map_err(|e| e.to_string())?;
    ensure(ann == id(8), || format!("Ann_19(P) = {}", ann))?;
    let aux = index_sets(Order::Z, &z(10), &id(4)).map_err(|e| e.to_string())?;
    ensure(aux.big_i == vec![id(2), id(10)], || format!("I = {:?}", aux.big_i))?;
    ensure(aux.big_j == vec![id(1), id(5)], || format!("J = {:?}", aux.big_j))?;
    ensure(aux.q == z(5), || format!("q = {}", aux.q))?;
    let (ip, jp) = ip_jp(&z(10), &ann, &id(4));
    ensure(ip == Some(id(2)) && jp == Some(id(5)), || format!("I_p = {:?}, J_p = {:?}", ip, jp))
}

fn auxiliary_sequence() -> Check {
    let mut c = ctx(100);
    let cases = [
        (10, 2, "(19)^2"),
        (18, 6, "(19)^2*(727)^2*(4877)^2*(102625619)^2"),
        (6, 6, "(43)^2*(59)^2*(3421265013773)^2"),
    ];
    for (alpha, m, want) in cases {
        let t = c.aux_term(&z(alpha), &id(m)).map_err(|e| e.to_string())?;
        ensure(t.to_string() == want, || format!("aux({}, ({})) = {}", alpha, m, t))?;
    }
    let b6 = c.term(&z(6)).map_err(|e| e.to_string())?;
    ensure(b6.to_string() == cases[2].2, || format!("B_6 = {}", b6))
}

fn lemma_suite() -> Check {
    let cap = 10_000;
    let mut c = ctx(cap);
    let reports = c.verify_all(1600, cap).map_err(|e| e.to_string())?;
    let failures: Vec<String> = reports.iter().filter(|r| r.failed()).map(|r| r.to_string()).collect();
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    let tags = [
        LemmaTag::Ipmid,
        LemmaTag::S,
        LemmaTag::Defk,
        LemmaTag::Primdiv,
        LemmaTag::Maxideal,
        LemmaTag::TwoNu,
        LemmaTag::Nuw,
    ];
    for tag in tags {
        let passes = reports.iter().filter(|r| r.lemma == tag && r.outcome == Outcome::Pass).count();
        ensure(passes > 0, || format!("lemma {} never exercised", tag))?;
    }
    let pairs = reports.len() / tags.len();
    println!("  {} (alpha, prime) pairs, {} reports", pairs, reports.len());
    Ok(())
}

fn mobius_oracle_z(alpha: u64, s: u64) -> BigRational {
    let mut sum = BigRational::zero();
    for d in 1..=alpha {
        if !alpha.is_multiple_of(d) || num_integer::gcd(d, s) != 1 {
            continue;
        }
        let mut m = d;
        let mut mu = 1i64;
        let mut f = 2;
        while f * f <= m {
            if m % f == 0 {
                m /= f;
                if m % f == 0 {
                    mu = 0;
                    break;
                }
                mu = -mu;
            }
            f += 1;
        }
        if mu != 0 && m > 1 {
            mu = -mu;
        }
        sum += BigRational::new(mu.into(), (d * d).into());
    }
    sum
}

fn propmu_holds(order: Order, g: &GaussianInteger) -> bool {
    let divs = ideal_divisors(&GaussianIdeal::new(g).factor(order));
    divs.iter().map(|d| mobius(d) as i64).sum::<i64>() == 0
}

fn mobius_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let a: u64 = rng.gen_range(1..=5000);
        let s: u64 = rng.gen_range(1..=60);
        let (sum, euler) = mobius_sum_and_euler_product(Order::Z, &id(a as i64), &id(s as i64));
        ensure(sum == euler, || format!("Z: alpha={} s={} sum={} euler={}", a, s, sum, euler))?;
        let oracle = mobius_oracle_z(a, s);
        ensure(sum == oracle, || format!("Z: alpha={} s={} sum={} oracle={}", a, s, sum, oracle))?;
    }
    for _ in 0..200 {
        let a = loop {
            let g = GaussianInteger::new(rng.gen_range(-80i64..=80), rng.gen_range(-80i64..=80));
            if !g.is_zero() {
                break g;
            }
        };
        let s = loop {
            let g = GaussianInteger::new(rng.gen_range(-8i64..=8), rng.gen_range(-8i64..=8));
            if !g.is_zero() {
                break g;
            }
        };
        let (sum, euler) = mobius_sum_and_euler_product(Order::Zi, &GaussianIdeal::new(&a), &GaussianIdeal::new(&s));
        ensure(sum == euler, || format!("Zi: alpha={} s={} sum={} euler={}", a, s, sum, euler))?;
        // oracle: Π over primes of (α) coprime to s of (1 - 1/N(p))
        let (_, primes) = factor_gaussian(&a);
        let mut prod = BigRational::one();
        for (pr, _) in primes {
            if pr.gcd(&s).is_unit() {
                prod *= BigRational::one() - BigRational::new(1.into(), pr.norm().into());
            }
        }
        ensure(sum == prod, || format!("Zi: alpha={} s={} sum={} oracle={}", a, s, sum, prod))?;
    }
    for n in 2..=10_000i64 {
        ensure(propmu_holds(Order::Z, &z(n)), || format!("propmu fails at ({})", n))?;
    }
    for a in 1..=100i64 {
        for b in 0..=100i64 {
            let g = GaussianInteger::new(a, b);
            if g.norm() > BigUint::from(10_000u32) || g.norm() < BigUint::from(2u32) {
                continue;
            }
            ensure(propmu_holds(Order::Zi, &g), || format!("propmu fails at ({})", g))?;
        }
    }
    Ok(())
}

fn heights() -> Check {
    let e = curve();
    let hq = canonical_height(&e, &q());
    ensure(hq.value < TORSION_THRESHOLD, || format!("h(Q) = {}", hq.value))?;
    for n in [2, 3, 5] {
        let r = check_height_axioms(&e, Order::Z, &p(), &z(n));
        ensure(!r.failed(), || r.to_string())?;
    }
    let r = check_height_axioms(&cm_curve(), Order::Zi, &cm_point(), &GaussianInteger::new(1, 1));
    ensure(!r.failed(), || r.to_string())
}

fn cm_scan() -> Check {
    let cap = 10_000;
    let e = cm_curve();
    let mut c = SequenceContext::new(e.clone(), cm_point(), CurvePoint::Infinity, Order::Zi, cap)
        .map_err(|e| e.to_string())?;
    let records = c.scan(50).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for rec in &records {
        if rec.index.is_zero() {
            continue;
        }
        let Term::Ideal(f) = &rec.term else { continue };
        for prime in f.primes() {
            if c.bad.contains(prime) || prime.norm() > BigUint::from(cap) {
                continue;
            }
            let ann = ann_ideal(&e, Order::Zi, prime, &cm_point()).map_err(|e| e.to_string())?;
            ensure(ann.divides(&GaussianIdeal::new(&rec.index)), || {
                format!("Ann_{}(P) = {} does not divide ({})", prime, ann, rec.index)
            })?;
            for r in c.verify_good_prime_lemmas(&rec.index, prime).map_err(|e| e.to_string())? {
                ensure(!r.failed(), || r.to_string())?;
            }
            checked += 1;
        }
    }
    ensure(checked > 0, || "no good primes below the cap".to_string())?;
    let report = c.zsygmondy(50).map_err(|e| e.to_string())?;
    let shown: Vec<String> = report.exceptional.iter().map(|a| a.to_string()).collect();
    println!(
        "  {} (alpha, prime) pairs; exceptional set [{}], largest norm {}",
        checked,
        shown.join(", "),
        report.largest_exceptional_norm.map_or("none".to_string(), |n| n.to_string())
    );
    Ok(())
}

fn norm_gaps() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut ideals = 0;
    for a in 1..=15i64 {
        for b in 0..=15i64 {
            let g = GaussianInteger::new(a, b);
            if g.norm() > BigUint::from(200u32) {
                continue;
            }
            ideals += 1;
            let ideal = GaussianIdeal::new(&g);
            for _ in 0..20 {
                let alpha = GaussianInteger::new(rng.gen_range(-500i64..=500), rng.gen_range(-500i64..=500));
                let beta = coset_min_norm(Order::Zi, &alpha, &ideal);
                ensure(ideal.contains(&(&alpha - &beta)), || format!("{} not in {} + {}", beta, alpha, ideal))?;
                // brute-force minimum over a window containing the coset's short vectors
                let (centre, _) = alpha.div_rem_round(&g);
                let mut best = None::<BigUint>;
                for x in -4i64..=4 {
                    for y in -4i64..=4 {
                        let cand = &alpha - &(&(&centre + &GaussianInteger::new(x, y)) * &g);
                        let n = cand.norm();
                        if best.as_ref().is_none_or(|b| n < *b) {
                            best = Some(n);
                        }
                    }
                }
                ensure(Some(beta.norm()) == best, || format!("coset minimum for {} mod {}", alpha, ideal))?;
                ensure(beta.norm() <= BigUint::from(4u32) * ideal.norm(), || {
                    format!("N({}) > 4 N({})", beta, ideal)
                })?;
            }
        }
    }
    ensure(ideals > 0, || "no ideals".to_string())?;
    let mut admissible = 0;
    let mut attempts = 0;
    while admissible < 500 {
        attempts += 1;
        ensure(attempts < 1_000_000, || "too few admissible samples".to_string())?;
        let mut g = || GaussianInteger::new(rng.gen_range(-30i64..=30), rng.gen_range(-30i64..=30));
        let (f, gg, alpha, beta) = (g(), g(), g(), g());
        if gg.is_zero() {
            continue;
        }
        match lemma_k_gap(&f, &gg, &alpha, &beta) {
            Ok((gap, ok)) => {
                admissible += 1;
                ensure(ok, || format!("gap {} too large for f={} g={} alpha={} beta={}", gap, f, gg, alpha, beta))?;
            }
            Err(_) => continue,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Check, Duration); 9] = [
        (1, golden_table, Duration::from_secs(1)),
        (2, divisibility_pattern, Duration::from_secs(30)),
        (3, annihilator, Duration::from_secs(30)),
        (4, auxiliary_sequence, Duration::from_secs(10)),
        (5, lemma_suite, Duration::from_secs(300)),
        (6, mobius_identity, Duration::from_secs(30)),
        (7, heights, Duration::from_secs(60)),
        (8, cm_scan, Duration::from_secs(300)),
        (9, norm_gaps, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (n, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|_| {
            ensure(elapsed <= limit, || format!("took {:.1?}, limit {:?}", elapsed, limit))
        });
        match result {
            Ok(()) => println!("criterion {}: PASS ({:.2?})", n, elapsed),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL ({:.2?}) {}", n, elapsed, msg);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
