use edseq::curve::CurvePoint;
use edseq::heights::{canonical_height, check_height_axioms, mobius_chain, naive_height, HeightValue};
use edseq::numberfield::{FactorBudget, FactoredIdeal, GaussianInteger, Order};
use edseq::report::{LemmaReport, Outcome};
use edseq::sequences::{enumerate_indices, Verdict, Witness};
use serde::{Deserialize, Serialize};

use crate::job::{InputError, Job};
use crate::output::Report;

/// What a command produced and whether every check held.
pub struct Outcomes {
    pub report: Report,
    pub failed: bool,
    pub summary: Option<String>,
}

fn ok(report: Report) -> Outcomes {
    Outcomes {
        report,
        failed: false,
        summary: None,
    }
}

fn verdict_cells(v: &Verdict) -> (String, String) {
    match v {
        Verdict::Primitive { witness } => (
            "primitive".into(),
            match witness {
                Witness::Prime(p) => p.to_string(),
                Witness::Cofactor(c) => format!("[{}]", c.generator()),
            },
        ),
        Verdict::Absent { reason } => (reason.to_string(), String::new()),
    }
}

pub fn sequence(job: &Job) -> Result<Outcomes, InputError> {
    let mut ctx = job.context()?;
    let mut report = Report::new(&["index", "norm", "term", "primitive", "witness"]);
    for rec in ctx.scan(job.max_norm)? {
        if !job.shows(&rec.index) {
            continue;
        }
        let (status, witness) = verdict_cells(&rec.primitive);
        let cells = vec![rec.index.to_string(), rec.index.norm().to_string(), rec.term.to_string(), status, witness];
        report.push(cells, &rec);
    }
    Ok(ok(report))
}

fn lemma_cells(r: &LemmaReport, full: bool) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let details = if full || r.outcome == Outcome::Fail {
        r.diagnostics
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect::<Vec<_>>()
            .join("; ")
    } else {
        String::new()
    };
    vec![
        r.lemma.to_string(),
        r.outcome.to_string(),
        opt(r.alpha.as_ref().map(|a| a.to_string())),
        opt(r.prime.as_ref().map(|p| p.to_string())),
        details,
    ]
}

/// Multipliers for the height scaling check.
fn height_multipliers(order: Order) -> Vec<GaussianInteger> {
    match order {
        Order::Z => vec![2.into(), 3.into(), 5.into()],
        Order::Zi => vec![GaussianInteger::new(1, 1), 2.into(), GaussianInteger::new(2, 1)],
    }
}

pub fn verify(job: &Job, full_details: bool) -> Result<Outcomes, InputError> {
    let mut ctx = job.context()?;
    let mut all = ctx.verify_all(job.max_norm, job.prime_cap)?;
    for alpha in height_multipliers(job.order) {
        all.push(check_height_axioms(&job.curve, job.order, &job.p, &alpha));
    }
    if !job.q.is_infinity() {
        all.push(check_height_axioms(&job.curve, job.order, &job.q, &2.into()));
    }
    for alpha in enumerate_indices(job.order, job.max_norm) {
        if alpha == alpha.canonical_associate() && !alpha.is_unit() {
            all.push(mobius_chain(job.order, &alpha, &ctx.s));
        }
    }
    let mut report = Report::new(&["lemma", "outcome", "alpha", "prime", "details"]);
    let mut counts = [0usize; 4];
    for r in &all {
        counts[match r.outcome {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Vacuous => 2,
            Outcome::Skipped => 3,
        }] += 1;
        if r.alpha.as_ref().is_none_or(|a| job.shows(a)) {
            report.push(lemma_cells(r, full_details), r);
        }
    }
    let summary = format!(
        "{} checks: {} pass, {} fail, {} vacuous, {} skipped",
        all.len(),
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    Ok(Outcomes {
        report,
        failed: counts[1] > 0,
        summary: Some(summary),
    })
}

pub fn zsygmondy(job: &Job) -> Result<Outcomes, InputError> {
    let mut ctx = job.context()?;
    let z = ctx.zsygmondy(job.max_norm)?;
    let mut report = Report::new(&["index", "norm"]);
    for a in z.exceptional.iter().filter(|a| job.shows(a)) {
        report.push_cells(vec![a.to_string(), a.norm().to_string()]);
    }
    report.push_record(&z);
    let largest = z.largest_exceptional_norm.as_ref().map_or("none".to_string(), |n| n.to_string());
    report.footer(format!(
        "{} exceptional indices up to norm {}; largest exceptional norm {}",
        z.exceptional.len(),
        z.max_norm,
        largest
    ));
    Ok(ok(report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightRecord {
    pub name: String,
    pub point: String,
    /// Naive height of the x-coordinate.
    pub naive: f64,
    pub canonical: HeightValue,
    /// `ĥ(αP)/N(α)` for multiples of `P`.
    pub per_norm: Option<f64>,
}

fn height_row(job: &Job, name: String, r: &CurvePoint, norm: Option<f64>) -> (Vec<String>, HeightRecord) {
    let naive = r.x().map_or(0.0, |x| naive_height(x, job.curve.field).value);
    let h = canonical_height(&job.curve, r);
    let per_norm = norm.map(|n| h.value / n);
    let cells = vec![
        name.clone(),
        r.to_string(),
        format!("{:.9}", naive),
        format!("{:.9}", h.value),
        format!("{:.2e}", h.error_bound),
        per_norm.map_or(String::new(), |v| format!("{:.9}", v)),
    ];
    let record = HeightRecord {
        name,
        point: r.to_string(),
        naive,
        canonical: h,
        per_norm,
    };
    (cells, record)
}

pub fn heights(job: &Job) -> Result<Outcomes, InputError> {
    let mut report = Report::new(&["name", "point", "naive", "canonical", "error", "per_norm"]);
    let (cells, rec) = height_row(job, "P".into(), &job.p, Some(1.0));
    report.push(cells, &rec);
    let (cells, rec) = height_row(job, "Q".into(), &job.q, None);
    report.push(cells, &rec);
    for alpha in enumerate_indices(job.order, job.max_norm) {
        if alpha != alpha.canonical_associate() || alpha.is_one() {
            continue;
        }
        let r = job
            .curve
            .apply_endo(&alpha, &job.p)
            .map_err(|e| InputError::Invalid(e.to_string()))?;
        let name = if alpha.is_rational() { format!("{}P", alpha) } else { format!("({})P", alpha) };
        let norm = alpha.norm().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
        let (cells, rec) = height_row(job, name, &r, Some(norm));
        report.push(cells, &rec);
    }
    Ok(ok(report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub value: GaussianInteger,
    pub order: Order,
    pub unit: GaussianInteger,
    pub factorization: FactoredIdeal,
}

pub fn factor(value: &str, order: Option<Order>) -> Result<Outcomes, InputError> {
    let g: GaussianInteger = value
        .parse()
        .map_err(|e: edseq::numberfield::ParseError| InputError::Invalid(e.to_string()))?;
    if g.is_zero() {
        return Err(InputError::Invalid("cannot factor 0".into()));
    }
    let order = order.unwrap_or(if g.is_rational() { Order::Z } else { Order::Zi });
    if !order.contains(&g) {
        return Err(InputError::Invalid(format!("{} is not in {}", g, order)));
    }
    let f = FactoredIdeal::factor(order, &g, FactorBudget::complete());
    let unit = g.div_exact(&f.generator()).expect("the factorization divides its input");
    let mut report = Report::new(&["value", "order", "unit", "factorization", "complete"]);
    let rec = FactorRecord {
        value: g.clone(),
        order,
        unit: unit.clone(),
        factorization: f.clone(),
    };
    report.push(vec![g.to_string(), order.to_string(), unit.to_string(), f.to_string(), f.is_complete().to_string()], &rec);
    Ok(ok(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use edseq::curve::WeierstrassCurve;

    #[test]
    fn factor_records_round_trip() {
        for (value, unit, text) in [("-12", "-1", "(2)^2*(3)"), ("3+4i", "1", "(2+i)^2"), ("7", "1", "(7)")] {
            let out = factor(value, None).unwrap();
            let line = out.report.render(crate::output::Format::Jsonl, "factor", false);
            let rec: FactorRecord = serde_json::from_str(line.trim_end()).unwrap();
            assert_eq!(rec.unit.to_string(), unit);
            assert_eq!(rec.factorization.to_string(), text);
            assert_eq!(serde_json::to_string(&rec).unwrap(), line.trim_end());
        }
        assert!(factor("3+4i", Some(Order::Z)).is_err());
        assert!(factor("0", None).is_err());
    }

    #[test]
    fn height_records_round_trip() {
        let curve = WeierstrassCurve::short(-11, 890).unwrap();
        let job = Job::new(curve, &["P=-1,30".to_string(), "Q=7,34".to_string()], Order::Z, 4, 100).unwrap();
        let out = heights(&job).unwrap();
        let text = out.report.render(crate::output::Format::Jsonl, "heights", false);
        let recs: Vec<HeightRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(recs.len(), 3);
        for (rec, line) in recs.iter().zip(text.lines()) {
            assert_eq!(serde_json::to_string(rec).unwrap(), line);
        }
        assert!(recs[1].canonical.value < 1e-6);
    }
}
