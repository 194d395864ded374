//! Terms `B_α(P, Q)`, primitive divisors in norm order, the auxiliary
//! index sets and sequence, and the good-prime lemma checks.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{CurveError, CurvePoint, FieldTag, Term, Torsion, WeierstrassCurve};
use crate::numberfield::{
    coset_min_norm, ideal_divisors, mobius, FactorBudget, FactoredIdeal, GaussianIdeal, GaussianInteger, Order,
};
use crate::reduction::{
    ann_ideal, bad_places, integer_valuation, primes_up_to_norm, BadPlaceSet, ReductionError, ResidueField,
};
use crate::report::{LemmaReport, LemmaTag, Outcome};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SequenceError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("Q = {0} is not a torsion point")]
    QNotTorsion(String),
    #[error("P = {0} is a torsion point; the hypothesis P non-torsion is necessary")]
    PTorsion(String),
    #[error("{0} is a bad place")]
    BadPrime(GaussianIdeal),
    #[error("{prime} does not divide B_{alpha}")]
    PrimeDoesNotDivide { alpha: GaussianInteger, prime: GaussianIdeal },
    #[error("index must be nonzero")]
    ZeroIndex,
    #[error("{ideal} is not in the index set of {alpha}")]
    NotInIndexSet { alpha: GaussianInteger, ideal: GaussianIdeal },
    #[error("the auxiliary sequence needs order Z, or Q = O")]
    AuxUnsupported,
    #[error("decomposition rejected: {0}")]
    Decomposition(String),
}

/// Every `α` of `order` with `0 < N(α) <= n`, by norm and then the
/// canonical tie-break.
pub fn enumerate_indices(order: Order, n: u64) -> Vec<GaussianInteger> {
    let r = (n as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for a in -r..=r {
        match order {
            Order::Z => {
                if a != 0 && (a * a) as u64 <= n {
                    out.push(GaussianInteger::from(a));
                }
            }
            Order::Zi => {
                for b in -r..=r {
                    let nm = (a * a + b * b) as u64;
                    if nm > 0 && nm <= n {
                        out.push(GaussianInteger::new(a, b));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

const WITNESS_TRIAL_LIMIT: u64 = 10_000;

/// A prime certifying that a term has a primitive divisor. `Cofactor` is
/// an unfactored part of the term all of whose primes are primitive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Prime(GaussianIdeal),
    Cofactor(GaussianIdeal),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Prime(p) => write!(f, "{}", p),
            Witness::Cofactor(c) => write!(f, "[{}]", c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Absence {
    /// `α(P) + Q = O`.
    ZeroTerm,
    /// `B_α = (1)`.
    UnitTerm,
    /// Every prime of the term divides an earlier term.
    AllBlocked,
}

impl fmt::Display for Absence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Absence::ZeroTerm => "zero-term",
            Absence::UnitTerm => "unit-term",
            Absence::AllBlocked => "all-blocked",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Primitive { witness: Witness },
    Absent { reason: Absence },
}

impl Verdict {
    pub fn is_primitive(&self) -> bool {
        matches!(self, Verdict::Primitive { .. })
    }

    /// Nonzero term without a primitive divisor.
    pub fn is_exceptional(&self) -> bool {
        matches!(self, Verdict::Absent { reason } if *reason != Absence::ZeroTerm)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Primitive { witness } => write!(f, "primitive {}", witness),
            Verdict::Absent { reason } => write!(f, "none ({})", reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub index: GaussianInteger,
    pub term: Term,
    pub primitive: Verdict,
}

/// The index sets of the auxiliary sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryIndex {
    pub alpha: GaussianInteger,
    pub s: GaussianIdeal,
    /// `I | (α)` with `((α)/I, s) = 1`.
    pub big_i: Vec<GaussianIdeal>,
    /// `J | (α)` with `(J, s) = 1`.
    pub big_j: Vec<GaussianIdeal>,
    pub q: GaussianInteger,
}

/// `𝓘`, `𝓙` and the shift element `q` for `α` and `s`.
///
/// `q` is a shortest element of the smallest member `J₁` of `𝓙` with
/// `q ≡ 1 mod s`; when `s = (1)` that is the generator of `J₁`.
pub fn index_sets(order: Order, alpha: &GaussianInteger, s: &GaussianIdeal) -> Result<AuxiliaryIndex, SequenceError> {
    if alpha.is_zero() {
        return Err(SequenceError::ZeroIndex);
    }
    assert!(!s.is_zero(), "s must be nonzero");
    let a = GaussianIdeal::new(alpha);
    let divisors: Vec<GaussianIdeal> = ideal_divisors(&a.factor(order)).iter().map(|d| d.ideal()).collect();
    let big_i: Vec<GaussianIdeal> = divisors
        .iter()
        .filter(|i| a.quotient(i).expect("divisor").coprime(s))
        .cloned()
        .collect();
    let big_j: Vec<GaussianIdeal> = divisors.iter().filter(|j| j.coprime(s)).cloned().collect();
    let j1 = big_j.iter().fold(GaussianIdeal::unit(), |acc, j| acc.lcm(j));
    let q = shift_element(order, &j1, s);
    Ok(AuxiliaryIndex {
        alpha: alpha.clone(),
        s: s.clone(),
        big_i,
        big_j,
        q,
    })
}

fn shift_element(order: Order, j1: &GaussianIdeal, s: &GaussianIdeal) -> GaussianInteger {
    let j = j1.generator();
    if s.is_unit() {
        return j.clone();
    }
    // j t ≡ 1 mod s, then reduce modulo js
    let (g, x, _) = j.xgcd(s.generator());
    debug_assert!(g.is_unit());
    // g x j ≡ 1 after scaling by the inverse unit, which is its conjugate
    let t = &x * &g.conj();
    let modulus = j1.mul(s);
    let start = j * &t;
    let best = coset_min_norm(order, &start, &modulus);
    // equal-norm ties inside the coset, by canonical order
    let m = modulus.generator();
    let mut ties = vec![best.clone()];
    let steps: Vec<GaussianInteger> = match order {
        Order::Z => vec![m.clone(), -m.clone()],
        Order::Zi => (0..4).map(|k| m.mul_unit(k)).chain((0..4).map(|k| (m * &GaussianInteger::new(1, 1)).mul_unit(k))).collect(),
    };
    for d in &steps {
        let c = &best + d;
        if c.norm() == best.norm() {
            ties.push(c);
        }
    }
    ties.into_iter().min().expect("nonempty")
}

/// `(I_p, J_p) = (Ann_p(P)/s, (α)/I_p)`; `None` where a quotient is not
/// integral.
pub fn ip_jp(
    alpha: &GaussianInteger,
    ann: &GaussianIdeal,
    s: &GaussianIdeal,
) -> (Option<GaussianIdeal>, Option<GaussianIdeal>) {
    let ip = ann.quotient(s);
    let jp = ip.as_ref().and_then(|i| GaussianIdeal::new(alpha).quotient(i));
    (ip, jp)
}

/// Decomposition data `P = aR + T₁`, `Q = bR + T₂` over a rank-one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub r: CurvePoint,
    pub a: BigInt,
    pub b: BigInt,
    pub t1: CurvePoint,
    pub n1: u64,
    pub t2: CurvePoint,
    pub n2: u64,
}

/// `(f, g) = (bn, an)` with `n = lcm(n₁, n₂)`, so that `fP = gQ`.
pub fn shift_construction(
    e: &WeierstrassCurve,
    p: &CurvePoint,
    q: &CurvePoint,
    d: &Decomposition,
) -> Result<(GaussianInteger, GaussianInteger), SequenceError> {
    let bad = |m: &str| Err(SequenceError::Decomposition(m.to_string()));
    if d.a.is_zero() {
        return bad("a = 0 makes P torsion");
    }
    if d.n1 == 0 || d.n2 == 0 {
        return bad("torsion orders must be positive");
    }
    for pt in [p, q, &d.r, &d.t1, &d.t2] {
        e.check_point(pt)?;
    }
    if e.add(&e.mul(&d.a, &d.r), &d.t1) != *p {
        return bad("P != aR + T1");
    }
    if e.add(&e.mul(&d.b, &d.r), &d.t2) != *q {
        return bad("Q != bR + T2");
    }
    if !e.mul_int(d.n1 as i64, &d.t1).is_infinity() || !e.mul_int(d.n2 as i64, &d.t2).is_infinity() {
        return bad("torsion order does not kill its point");
    }
    let n = BigInt::from(d.n1.lcm(&d.n2));
    let f = &d.b * &n;
    let g = &d.a * &n;
    if e.mul(&f, p) != e.mul(&g, q) {
        return bad("fP != gQ");
    }
    Ok((GaussianInteger::from_int(f), GaussianInteger::from_int(g)))
}

/// Multiplies the stored term at `alpha` by `factor`. Only for exercising
/// the failure paths of the checkers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fault {
    pub alpha: GaussianInteger,
    pub factor: GaussianInteger,
}

/// The largest exceptional norm and the indices behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsygmondyReport {
    pub max_norm: u64,
    pub exceptional: Vec<GaussianInteger>,
    pub largest_exceptional_norm: Option<BigUint>,
}

/// A curve with base point `P` and torsion shift `Q`, with cached points
/// and terms.
pub struct SequenceContext {
    pub curve: WeierstrassCurve,
    pub p: CurvePoint,
    pub q: CurvePoint,
    pub order: Order,
    /// `Ann(Q)`.
    pub s: GaussianIdeal,
    pub bad: BadPlaceSet,
    budget: FactorBudget,
    fault: Option<Fault>,
    endo_p: HashMap<GaussianInteger, CurvePoint>,
    terms: HashMap<GaussianInteger, Option<GaussianInteger>>,
    anns: HashMap<GaussianIdeal, GaussianIdeal>,
    residue: HashMap<GaussianIdeal, ResidueField>,
}

impl SequenceContext {
    pub fn new(
        curve: WeierstrassCurve,
        p: CurvePoint,
        q: CurvePoint,
        order: Order,
        prime_cap: u64,
    ) -> Result<Self, SequenceError> {
        curve.check_order(order)?;
        curve.check_point(&p)?;
        curve.check_point(&q)?;
        let s = match curve.torsion_annihilator(order, &q)? {
            Torsion::Annihilator(s) => s,
            Torsion::NonTorsion => return Err(SequenceError::QNotTorsion(q.to_string())),
        };
        let bad = bad_places(&curve, order, &q, &s, prime_cap);
        Ok(SequenceContext {
            curve,
            p,
            q,
            order,
            s,
            bad,
            budget: FactorBudget::default(),
            fault: None,
            endo_p: HashMap::new(),
            terms: HashMap::new(),
            anns: HashMap::new(),
            residue: HashMap::new(),
        })
    }

    /// Budget used when terms are factored for output.
    pub fn with_budget(mut self, budget: FactorBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.terms.clear();
        self.fault = Some(fault);
        self
    }

    pub fn field(&self) -> FieldTag {
        self.curve.field
    }

    /// Errors unless `P` has infinite order.
    pub fn require_non_torsion(&self) -> Result<(), SequenceError> {
        match self.curve.torsion_annihilator(self.order, &self.p)? {
            Torsion::NonTorsion => Ok(()),
            Torsion::Annihilator(_) => Err(SequenceError::PTorsion(self.p.to_string())),
        }
    }

    /// `α(P)`, built from neighbouring cached multiples when possible.
    pub fn endo_point(&mut self, alpha: &GaussianInteger) -> Result<CurvePoint, SequenceError> {
        if let Some(pt) = self.endo_p.get(alpha) {
            return Ok(pt.clone());
        }
        let pt = if alpha.is_zero() {
            CurvePoint::Infinity
        } else if alpha.im.is_zero() && alpha.re.is_negative() {
            let pos = self.endo_point(&GaussianInteger::from_int(-&alpha.re))?;
            self.curve.negate(&pos)
        } else if alpha.im.is_zero() {
            let prev = GaussianInteger::from_int(&alpha.re - 1);
            match self.endo_p.get(&prev) {
                Some(pp) => {
                    let pp = pp.clone();
                    self.curve.add(&pp, &self.p)
                }
                None => self.curve.apply_endo(alpha, &self.p)?,
            }
        } else {
            let a = self.endo_point(&GaussianInteger::from_int(alpha.re.clone()))?;
            let b = self.endo_point(&GaussianInteger::from_int(alpha.im.clone()))?;
            self.curve.add(&a, &self.curve.i_action(&b)?)
        };
        self.endo_p.insert(alpha.clone(), pt.clone());
        Ok(pt)
    }

    /// Generator of `B_α`, or `None` for the zero term.
    pub fn term_generator(&mut self, alpha: &GaussianInteger) -> Result<Option<GaussianInteger>, SequenceError> {
        if let Some(t) = self.terms.get(alpha) {
            return Ok(t.clone());
        }
        let ap = self.endo_point(alpha)?;
        let r = self.curve.add(&ap, &self.q);
        let mut t = self.curve.x_denominator(&r);
        if let (Some(f), Some(g)) = (&self.fault, &t) {
            if &f.alpha == alpha {
                t = Some((g * &f.factor).canonical_associate());
            }
        }
        self.terms.insert(alpha.clone(), t.clone());
        Ok(t)
    }

    /// `B_α`, factored under the context budget.
    pub fn term(&mut self, alpha: &GaussianInteger) -> Result<Term, SequenceError> {
        Ok(match self.term_generator(alpha)? {
            None => Term::Zero,
            Some(g) if g.is_one() => Term::Ideal(FactoredIdeal::unit()),
            Some(g) => Term::Ideal(FactoredIdeal::factor(self.field().integers(), &g, self.budget)),
        })
    }

    /// Records for `α = 0` and every index of norm at most `n`, in
    /// enumeration order.
    ///
    /// A term's primitive part is what survives dividing out its gcd with
    /// every nonzero term of strictly smaller norm; it is nontrivial exactly
    /// when the term has a primitive prime.
    pub fn scan(&mut self, n: u64) -> Result<Vec<SequenceRecord>, SequenceError> {
        self.scan_with(n, true)
    }

    /// Verdicts alone, without factoring the terms. Witnesses come from
    /// trial division of the primitive part.
    pub fn verdicts(&mut self, n: u64) -> Result<Vec<(GaussianInteger, Verdict)>, SequenceError> {
        Ok(self.scan_with(n, false)?.into_iter().map(|r| (r.index, r.primitive)).collect())
    }

    fn scan_with(&mut self, n: u64, factor: bool) -> Result<Vec<SequenceRecord>, SequenceError> {
        let mut indices = vec![GaussianInteger::zero()];
        indices.extend(enumerate_indices(self.order, n));
        let mut records = Vec::with_capacity(indices.len());
        let mut blockers: Vec<GaussianInteger> = Vec::new();
        let mut pending: Vec<GaussianInteger> = Vec::new();
        let mut current_norm = BigUint::zero();
        for alpha in indices {
            let norm = alpha.norm();
            if norm != current_norm {
                blockers.append(&mut pending);
                current_norm = norm;
            }
            let gen = self.term_generator(&alpha)?;
            let term = if factor {
                self.term(&alpha)?
            } else {
                match &gen {
                    None => Term::Zero,
                    Some(_) => Term::Ideal(FactoredIdeal::unit()),
                }
            };
            let verdict = match &gen {
                None => Verdict::Absent { reason: Absence::ZeroTerm },
                Some(g) if g.is_one() => Verdict::Absent { reason: Absence::UnitTerm },
                Some(g) => {
                    let rest = primitive_part(g, &blockers);
                    if rest.is_unit() {
                        Verdict::Absent { reason: Absence::AllBlocked }
                    } else {
                        let known = if factor {
                            term.ideal().and_then(|f| f.primes().find(|p| p.contains(&rest)).cloned())
                        } else {
                            let order = self.field().integers();
                            let f = FactoredIdeal::factor(order, &rest, FactorBudget::trial(WITNESS_TRIAL_LIMIT));
                            let first = f.primes().next().cloned();
                            first
                        };
                        let witness = match known {
                            Some(p) => Witness::Prime(p),
                            None => Witness::Cofactor(GaussianIdeal::new(&rest)),
                        };
                        Verdict::Primitive { witness }
                    }
                }
            };
            if let Some(g) = gen {
                if !g.is_one() {
                    pending.push(g);
                }
            }
            records.push(SequenceRecord { index: alpha, term, primitive: verdict });
        }
        Ok(records)
    }

    /// Nonzero terms of norm at most `n` without a primitive divisor.
    pub fn zsygmondy(&mut self, n: u64) -> Result<ZsygmondyReport, SequenceError> {
        self.require_non_torsion()?;
        let exceptional: Vec<GaussianInteger> = self
            .verdicts(n)?
            .into_iter()
            .filter(|(_, v)| v.is_exceptional())
            .map(|(a, _)| a)
            .collect();
        let largest = exceptional.iter().map(|a| a.norm()).max();
        Ok(ZsygmondyReport {
            max_norm: n,
            exceptional,
            largest_exceptional_norm: largest,
        })
    }

    fn residue_field(&mut self, prime: &GaussianIdeal) -> Result<ResidueField, SequenceError> {
        if let Some(f) = self.residue.get(prime) {
            return Ok(*f);
        }
        let f = ResidueField::new(self.field(), prime)?;
        self.residue.insert(prime.clone(), f);
        Ok(f)
    }

    fn prime_divides(&mut self, prime: &GaussianIdeal, g: &GaussianInteger) -> Result<bool, SequenceError> {
        let f = self.residue_field(prime)?;
        Ok(f.reduce_integer(g) == f.zero())
    }

    /// Indices `α` (including 0) with `N(α) <= n` and `prime | B_α`, zero
    /// terms excluded.
    pub fn divisibility_pattern(&mut self, prime: &GaussianIdeal, n: u64) -> Result<Vec<GaussianInteger>, SequenceError> {
        let mut indices = vec![GaussianInteger::zero()];
        indices.extend(enumerate_indices(self.order, n));
        let mut out = Vec::new();
        for alpha in indices {
            if let Some(g) = self.term_generator(&alpha)? {
                if self.prime_divides(prime, &g)? {
                    out.push(alpha);
                }
            }
        }
        Ok(out)
    }

    /// Primes of residue norm at most `cap` dividing `B_α`.
    pub fn small_primes_of_term(&mut self, alpha: &GaussianInteger, cap: u64) -> Result<Vec<GaussianIdeal>, SequenceError> {
        let Some(g) = self.term_generator(alpha)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        if g.is_one() {
            return Ok(out);
        }
        for prime in primes_up_to_norm(self.field(), cap) {
            if self.prime_divides(&prime, &g)? {
                out.push(prime);
            }
        }
        Ok(out)
    }

    /// `Ann_p(P)`, cached.
    pub fn ann(&mut self, prime: &GaussianIdeal) -> Result<GaussianIdeal, SequenceError> {
        if let Some(a) = self.anns.get(prime) {
            return Ok(a.clone());
        }
        let a = ann_ideal(&self.curve, self.order, prime, &self.p)?;
        self.anns.insert(prime.clone(), a.clone());
        Ok(a)
    }

    pub fn index_sets(&self, alpha: &GaussianInteger) -> Result<AuxiliaryIndex, SequenceError> {
        index_sets(self.order, alpha, &self.s)
    }

    fn aux_supported(&self) -> bool {
        self.order == Order::Z || self.q.is_infinity()
    }

    /// Generator of `𝓑_I`. Over Z with `I = (m)` this is the denominator of
    /// `x(mP + (mq/α)Q)`; with `Q = O` it is that of `x(γP)` for `I = (γ)`.
    /// `𝓑_(α)` is `B_α` itself.
    pub fn aux_generator(
        &mut self,
        aux: &AuxiliaryIndex,
        ideal: &GaussianIdeal,
    ) -> Result<Option<GaussianInteger>, SequenceError> {
        if !self.aux_supported() {
            return Err(SequenceError::AuxUnsupported);
        }
        if !aux.big_i.contains(ideal) {
            return Err(SequenceError::NotInIndexSet {
                alpha: aux.alpha.clone(),
                ideal: ideal.clone(),
            });
        }
        if *ideal == GaussianIdeal::new(&aux.alpha) {
            return self.term_generator(&aux.alpha);
        }
        let m = ideal.generator().clone();
        let mp = self.endo_point(&m)?;
        let r = if self.q.is_infinity() {
            mp
        } else {
            let t = (&m * &aux.q).div_exact(&aux.alpha).expect("m q lies in (α)");
            self.curve.add(&mp, &self.curve.apply_endo(&t, &self.q)?)
        };
        Ok(self.curve.x_denominator(&r))
    }

    /// `𝓑_I`, fully factored.
    pub fn aux_term(&mut self, alpha: &GaussianInteger, ideal: &GaussianIdeal) -> Result<Term, SequenceError> {
        let aux = self.index_sets(alpha)?;
        Ok(match self.aux_generator(&aux, ideal)? {
            None => Term::Zero,
            Some(g) if g.is_one() => Term::Ideal(FactoredIdeal::unit()),
            Some(g) => Term::Ideal(FactoredIdeal::factor(self.field().integers(), &g, FactorBudget::complete())),
        })
    }

    /// Whether `prime` divides a nonzero term of norm below `N(α)`.
    fn divides_earlier(&mut self, alpha: &GaussianInteger, prime: &GaussianIdeal) -> Result<Option<GaussianInteger>, SequenceError> {
        let n = alpha.norm();
        let mut earlier = vec![GaussianInteger::zero()];
        if n > BigUint::one() {
            let below = (&n - 1u32).to_u64().expect("index norms fit in u64");
            earlier.extend(enumerate_indices(self.order, below));
        }
        for beta in earlier {
            if let Some(g) = self.term_generator(&beta)? {
                if self.prime_divides(prime, &g)? {
                    return Ok(Some(beta));
                }
            }
        }
        Ok(None)
    }

    fn valuation_of(&self, g: &GaussianInteger, prime: &GaussianIdeal) -> i64 {
        integer_valuation(self.field(), g, prime)
    }

    /// One report for each of the lemmas Ipmid, S, defK, primdiv,
    /// maxideal, 2nu and the nuW bound, at a good prime dividing `B_α`.
    pub fn verify_good_prime_lemmas(
        &mut self,
        alpha: &GaussianInteger,
        prime: &GaussianIdeal,
    ) -> Result<Vec<LemmaReport>, SequenceError> {
        if alpha.is_zero() {
            return Err(SequenceError::ZeroIndex);
        }
        if self.bad.contains(prime) {
            return Err(SequenceError::BadPrime(prime.clone()));
        }
        let term = match self.term_generator(alpha)? {
            Some(g) if self.prime_divides(prime, &g)? => g,
            _ => {
                return Err(SequenceError::PrimeDoesNotDivide {
                    alpha: alpha.clone(),
                    prime: prime.clone(),
                })
            }
        };
        let ann = self.ann(prime)?;
        let s = self.s.clone();
        let alpha_ideal = GaussianIdeal::new(alpha);
        let alpha_s = alpha_ideal.mul(&s);
        let (ip, jp) = ip_jp(alpha, &ann, &s);
        let blocker = self.divides_earlier(alpha, prime)?;
        let (curve_s, p_s, q_s, order) = (self.curve.to_string(), self.p.to_string(), self.q.to_string(), self.order);
        let base = |tag: LemmaTag| {
            let mut r = LemmaReport::new(tag, Some(prime.clone()), Some(alpha.clone()))
                .with("curve", &curve_s)
                .with("P", &p_s)
                .with("Q", &q_s)
                .with("order", order)
                .with("s", &s)
                .with("ann", &ann);
            if let Some(b) = &blocker {
                r = r.with("blocked_by", b);
            }
            r
        };
        let mut out = Vec::with_capacity(7);

        out.push(base(LemmaTag::Ipmid).with("alpha_s", &alpha_s).check(ann.divides(&alpha_s)));
        let defk = base(LemmaTag::Defk);
        out.push(match &ip {
            Some(i) => defk.with("i_p", i).check(true),
            None => defk.with("i_p", "non-integral").check(false),
        });
        let slemma = base(LemmaTag::S);
        out.push(match &jp {
            Some(j) => slemma.with("j_p", j).check(j.coprime(&s)),
            None => slemma.with("j_p", "non-integral").check(false),
        });
        let prim = base(LemmaTag::Primdiv);
        out.push(match &blocker {
            None => prim.outcome(Outcome::Vacuous),
            Some(_) => prim.with("alpha_s", &alpha_s).check(ann != alpha_s),
        });

        let aux_tags = [LemmaTag::Maxideal, LemmaTag::TwoNu, LemmaTag::Nuw];
        if !self.aux_supported() {
            out.extend(aux_tags.iter().map(|t| base(*t).outcome(Outcome::Skipped)));
            return Ok(out);
        }
        let aux = self.index_sets(alpha)?;
        let mut nus: Vec<(GaussianIdeal, Option<i64>)> = Vec::with_capacity(aux.big_i.len());
        for ideal in &aux.big_i {
            let nu = self.aux_generator(&aux, ideal)?.map(|g| self.valuation_of(&g, prime));
            nus.push((ideal.clone(), nu));
        }
        if nus.iter().any(|(_, v)| v.is_none()) {
            let zero_at: Vec<String> = nus.iter().filter(|(_, v)| v.is_none()).map(|(i, _)| i.to_string()).collect();
            out.extend(
                aux_tags
                    .iter()
                    .map(|t| base(*t).with("zero_aux_terms", zero_at.join(" ")).outcome(Outcome::Skipped)),
            );
            return Ok(out);
        }
        let nu_of = |i: &GaussianIdeal| nus.iter().find(|(j, _)| j == i).and_then(|(_, v)| *v).expect("in 𝓘");
        let i_p: Vec<&GaussianIdeal> = nus.iter().filter(|(_, v)| v.unwrap_or(0) > 0).map(|(i, _)| i).collect();
        let render = |v: &[&GaussianIdeal]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");

        let maxi = base(LemmaTag::Maxideal).with("index_set_p", render(&i_p));
        out.push(match &ip {
            None => maxi.with("i_p", "non-integral").check(false),
            Some(ipv) => {
                let expected: Vec<&GaussianIdeal> = aux.big_i.iter().filter(|i| ipv.divides(i)).collect();
                maxi.with("i_p", ipv)
                    .with("expected", render(&expected))
                    .check(i_p.contains(&ipv) && i_p == expected)
            }
        });

        let mut twonu = base(LemmaTag::TwoNu);
        let mut ok = true;
        let mut pairs = 0;
        for i1 in &i_p {
            for i2 in &i_p {
                if i1 == i2 || !i1.divides(i2) {
                    continue;
                }
                pairs += 1;
                let lhs = nu_of(i2);
                let rhs = nu_of(i1) + 2 * self.valuation_of(i2.generator(), prime)
                    - 2 * self.valuation_of(i1.generator(), prime);
                if lhs != rhs {
                    ok = false;
                    twonu = twonu.with(&format!("pair {} {}", i1, i2), format!("{} != {}", lhs, rhs));
                }
            }
        }
        out.push(if pairs == 0 {
            twonu.outcome(Outcome::Vacuous)
        } else {
            twonu.with("pairs", pairs).check(ok)
        });

        let nuw = base(LemmaTag::Nuw);
        out.push(match &blocker {
            None => nuw.outcome(Outcome::Vacuous),
            Some(_) => {
                let lhs = self.valuation_of(&term, prime);
                let mut rhs = 2 * self.valuation_of(alpha, prime);
                for (ideal, nu) in &nus {
                    if *ideal == alpha_ideal {
                        continue;
                    }
                    let quotient = alpha_ideal.quotient(ideal).expect("divisor");
                    rhs -= mobius(&quotient.factor(self.order)) as i64 * nu.expect("checked");
                }
                nuw.with("lhs", lhs).with("rhs", rhs).check(lhs <= rhs)
            }
        });
        Ok(out)
    }

    /// Lemma reports for every index of norm at most `n` and every good
    /// prime of residue norm at most `cap` dividing its term.
    pub fn verify_all(&mut self, n: u64, cap: u64) -> Result<Vec<LemmaReport>, SequenceError> {
        let mut out = Vec::new();
        for alpha in enumerate_indices(self.order, n) {
            for prime in self.small_primes_of_term(&alpha, cap)? {
                if self.bad.contains(&prime) {
                    continue;
                }
                out.extend(self.verify_good_prime_lemmas(&alpha, &prime)?);
            }
        }
        Ok(out)
    }
}

fn primitive_part(g: &GaussianInteger, blockers: &[GaussianInteger]) -> GaussianInteger {
    let mut rest = g.clone();
    for b in blockers {
        loop {
            if rest.is_unit() {
                return rest;
            }
            let d = rest.gcd(b);
            if d.is_unit() {
                break;
            }
            rest = rest.div_exact(&d).expect("gcd divides");
        }
    }
    rest
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::GaussianRational;

    fn z(n: i64) -> GaussianInteger {
        GaussianInteger::from(n)
    }

    fn id(n: i64) -> GaussianIdeal {
        GaussianIdeal::from_int(n)
    }

    fn example() -> SequenceContext {
        SequenceContext::new(
            WeierstrassCurve::short(-11, 890).unwrap(),
            CurvePoint::from_ints(-1, 30),
            CurvePoint::from_ints(7, 34),
            Order::Z,
            200,
        )
        .unwrap()
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(enumerate_indices(Order::Z, 4), vec![z(1), z(-1), z(2), z(-2)]);
        let units = enumerate_indices(Order::Zi, 1);
        assert_eq!(
            units,
            vec![GaussianInteger::one(), GaussianInteger::i(), z(-1), GaussianInteger::new(0, -1)]
        );
        let two = enumerate_indices(Order::Zi, 2);
        assert_eq!(two.len(), 8);
        assert!(two[4..].iter().all(|a| a.norm() == BigUint::from(2u32)));
    }

    #[test]
    fn index_set_examples() {
        let a = index_sets(Order::Z, &z(10), &id(4)).unwrap();
        assert_eq!(a.big_i, vec![id(2), id(10)]);
        assert_eq!(a.big_j, vec![id(1), id(5)]);
        assert_eq!(a.q, z(5));
        let a = index_sets(Order::Z, &z(18), &id(4)).unwrap();
        assert_eq!(a.big_i, vec![id(2), id(6), id(18)]);
        assert_eq!(a.big_j, vec![id(1), id(3), id(9)]);
        assert_eq!(a.q, z(9));
        let a = index_sets(Order::Z, &z(12), &id(1)).unwrap();
        assert_eq!(a.big_i, a.big_j);
        assert_eq!(a.big_i.len(), 6);
        assert_eq!(a.q, z(12));
    }

    #[test]
    fn ip_jp_examples() {
        assert_eq!(ip_jp(&z(10), &id(8), &id(4)), (Some(id(2)), Some(id(5))));
        assert_eq!(ip_jp(&z(2), &id(8), &id(4)), (Some(id(2)), Some(id(1))));
        assert_eq!(ip_jp(&z(6), &id(8), &id(1)).0, Some(id(8)));
    }

    #[test]
    fn scan_small() {
        let mut ctx = example();
        let recs = ctx.scan(4).unwrap();
        let shown: Vec<String> = recs.iter().map(|r| format!("{} {}", r.index, r.term)).collect();
        assert_eq!(shown[0], "0 (1)");
        assert_eq!(shown[1], "1 (2)^2");
        let two = recs.iter().find(|r| r.index == z(2)).unwrap();
        assert_eq!(two.term.to_string(), "(19)^2");
        assert_eq!(two.primitive, Verdict::Primitive { witness: Witness::Prime(id(19)) });
        assert_eq!(recs[0].primitive, Verdict::Absent { reason: Absence::UnitTerm });
    }

    #[test]
    fn five_is_primitive_through_the_large_prime() {
        let mut ctx = example();
        let recs = ctx.scan(25).unwrap();
        let five = recs.iter().find(|r| r.index == z(5)).unwrap();
        assert_eq!(five.term.to_string(), "(2)^2*(4890590069)^2");
        assert_eq!(five.primitive, Verdict::Primitive { witness: Witness::Prime(id(4890590069)) });
    }

    #[test]
    fn pattern_at_nineteen() {
        let mut ctx = example();
        let pat = ctx.divisibility_pattern(&id(19), 400).unwrap();
        let ks: Vec<i64> = pat.iter().map(|a| a.re.to_i64().unwrap()).collect();
        let mut expected: Vec<i64> = (-20..=20).filter(|k: &i64| k.rem_euclid(8) == 2).collect();
        expected.sort_by_key(|k| (k.abs(), *k < 0));
        assert_eq!(ks, expected);
    }

    #[test]
    fn aux_examples() {
        let mut ctx = example();
        assert_eq!(ctx.aux_term(&z(10), &id(2)).unwrap().to_string(), "(19)^2");
        assert_eq!(
            ctx.aux_term(&z(18), &id(6)).unwrap().to_string(),
            "(19)^2*(727)^2*(4877)^2*(102625619)^2"
        );
        assert_eq!(
            ctx.aux_term(&z(6), &id(6)).unwrap().to_string(),
            "(43)^2*(59)^2*(3421265013773)^2"
        );
        assert!(matches!(ctx.aux_term(&z(10), &id(5)), Err(SequenceError::NotInIndexSet { .. })));
    }

    #[test]
    fn lemmas_at_nineteen() {
        let mut ctx = example();
        let reps = ctx.verify_good_prime_lemmas(&z(10), &id(19)).unwrap();
        assert_eq!(reps.len(), 7);
        assert!(reps.iter().all(|r| !r.failed()), "{:#?}", reps);
        let maxi = reps.iter().find(|r| r.lemma == LemmaTag::Maxideal).unwrap();
        assert_eq!(maxi.diagnostics["index_set_p"], "(2) (10)");
        let reps = ctx.verify_good_prime_lemmas(&z(2), &id(19)).unwrap();
        let prim = reps.iter().find(|r| r.lemma == LemmaTag::Primdiv).unwrap();
        assert_eq!(prim.outcome, Outcome::Vacuous);
        let reps = ctx.verify_good_prime_lemmas(&z(18), &id(19)).unwrap();
        let two = reps.iter().find(|r| r.lemma == LemmaTag::TwoNu).unwrap();
        assert_eq!(two.outcome, Outcome::Pass);
        assert_eq!(two.diagnostics["pairs"], "3");
    }

    #[test]
    fn lemma_inputs_rejected() {
        let mut ctx = example();
        assert!(matches!(ctx.verify_good_prime_lemmas(&z(1), &id(2)), Err(SequenceError::BadPrime(_))));
        assert!(matches!(
            ctx.verify_good_prime_lemmas(&z(3), &id(19)),
            Err(SequenceError::PrimeDoesNotDivide { .. })
        ));
    }

    #[test]
    fn fault_is_caught() {
        let mut ctx = example().with_fault(Fault { alpha: z(10), factor: z(19) });
        let reps = ctx.verify_good_prime_lemmas(&z(10), &id(19)).unwrap();
        assert!(reps.iter().any(|r| r.failed()));
    }

    #[test]
    fn shift_examples() {
        let e = WeierstrassCurve::short(-11, 890).unwrap();
        let r = CurvePoint::from_ints(-1, 30);
        let t = CurvePoint::from_ints(7, 34);
        let t2 = e.mul_int(2, &t);
        let d = |a: i64, b: i64, t1: &CurvePoint, n1: u64, t2: &CurvePoint, n2: u64| Decomposition {
            r: r.clone(),
            a: a.into(),
            b: b.into(),
            t1: t1.clone(),
            n1,
            t2: t2.clone(),
            n2,
        };
        let o = CurvePoint::Infinity;
        let p2 = e.mul_int(2, &r);
        assert_eq!(shift_construction(&e, &r, &p2, &d(1, 2, &o, 1, &o, 1)).unwrap(), (z(2), z(1)));
        let p = e.add(&r, &t2);
        let q = e.mul_int(3, &r);
        assert_eq!(shift_construction(&e, &p, &q, &d(1, 3, &t2, 2, &o, 1)).unwrap(), (z(6), z(2)));
        assert_eq!(shift_construction(&e, &r, &t, &d(1, 0, &o, 1, &t, 4)).unwrap(), (z(0), z(4)));
        assert!(shift_construction(&e, &r, &t, &d(1, 0, &o, 1, &t, 2)).is_err());
        assert!(shift_construction(&e, &t, &t, &d(0, 0, &t, 4, &t, 4)).is_err());
    }

    #[test]
    fn gaussian_scan_includes_one_plus_i() {
        let e = WeierstrassCurve::cm_family(GaussianRational::from_int(-2)).unwrap();
        let mut ctx = SequenceContext::new(
            e,
            CurvePoint::new(GaussianRational::from_int(-1), GaussianRational::from_int(1)),
            CurvePoint::Infinity,
            Order::Zi,
            100,
        )
        .unwrap();
        let recs = ctx.scan(2).unwrap();
        assert_eq!(recs.len(), 9);
        let r = recs.iter().find(|r| r.index == GaussianInteger::new(1, 1)).unwrap();
        assert_eq!(r.term.to_string(), "(1+i)^2");
        assert_eq!(recs[0].term, Term::Zero);
    }
}
