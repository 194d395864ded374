use std::fs;
use std::path::Path;

use edseq::curve::{CurvePoint, FieldTag, WeierstrassCurve};
use edseq::numberfield::{GaussianInteger, GaussianRational, Order};
use edseq::sequences::{Fault, SequenceContext, SequenceError};

/// Anything wrong with what the user asked for. Exit status 2.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("curve file line {line}: {reason}")]
    CurveFile { line: usize, reason: String },
    #[error("curve file: {0}")]
    CurveMissing(&'static str),
    #[error("--point {arg}: {reason}")]
    Point { arg: String, reason: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Parses the `field=`, `a=` and optional `cm=` lines of a curve file.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_curve(text: &str) -> Result<WeierstrassCurve, InputError> {
    let mut field = None;
    let mut coeffs = None;
    let mut cm = None;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| InputError::CurveFile { line: k + 1, reason };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {:?}", line)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "field" if field.is_none() => {
                field = Some(match value {
                    "Q" => FieldTag::Q,
                    "Qi" => FieldTag::Qi,
                    _ => return Err(bad(format!("field must be Q or Qi, got {:?}", value))),
                })
            }
            "a" if coeffs.is_none() => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 5 {
                    return Err(bad(format!("expected a1,a2,a3,a4,a6, got {} values", parts.len())));
                }
                let mut a = Vec::with_capacity(5);
                for p in parts {
                    a.push(p.parse::<GaussianRational>().map_err(|e| bad(e.to_string()))?);
                }
                coeffs = Some(a);
            }
            "cm" if cm.is_none() => {
                cm = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad(format!("cm must be true or false, got {:?}", value))),
                })
            }
            "field" | "a" | "cm" => return Err(bad(format!("duplicate key {}", key))),
            _ => return Err(bad(format!("unknown key {:?}", key))),
        }
    }
    let field = field.ok_or(InputError::CurveMissing("no field= line"))?;
    let a: [GaussianRational; 5] = coeffs
        .ok_or(InputError::CurveMissing("no a= line"))?
        .try_into()
        .expect("five coefficients");
    WeierstrassCurve::new(field, a, cm.unwrap_or(false)).map_err(|e| InputError::Invalid(e.to_string()))
}

pub fn read_curve(path: &Path) -> Result<WeierstrassCurve, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_curve(&text)
}

/// `NAME=x,y` or `NAME=O`.
pub fn parse_point(arg: &str) -> Result<(String, CurvePoint), InputError> {
    let bad = |reason: &str| InputError::Point {
        arg: arg.to_string(),
        reason: reason.to_string(),
    };
    let (name, coords) = arg.split_once('=').ok_or_else(|| bad("expected NAME=x,y or NAME=O"))?;
    let name = name.trim().to_string();
    if name.is_empty() {
        return Err(bad("missing point name"));
    }
    let coords = coords.trim();
    if coords == "O" {
        return Ok((name, CurvePoint::Infinity));
    }
    let (x, y) = coords.split_once(',').ok_or_else(|| bad("expected x,y"))?;
    let x: GaussianRational = x.parse().map_err(|e: edseq::numberfield::ParseError| bad(&e.to_string()))?;
    let y: GaussianRational = y.parse().map_err(|e: edseq::numberfield::ParseError| bad(&e.to_string()))?;
    Ok((name, CurvePoint::new(x, y)))
}

/// `ALPHA:FACTOR`, e.g. `10:7`.
pub fn parse_fault(arg: &str) -> Result<Fault, InputError> {
    let bad = || InputError::Invalid(format!("--fault {}: expected ALPHA:FACTOR", arg));
    let (a, f) = arg.split_once(':').ok_or_else(bad)?;
    Ok(Fault {
        alpha: a.parse().map_err(|_| bad())?,
        factor: f.parse().map_err(|_| bad())?,
    })
}

/// A curve job after validation.
pub struct Job {
    pub curve: WeierstrassCurve,
    pub p: CurvePoint,
    pub q: CurvePoint,
    pub order: Order,
    pub max_norm: u64,
    pub prime_cap: u64,
    pub canonical_only: bool,
    pub fault: Option<Fault>,
}

impl Job {
    pub fn new(
        curve: WeierstrassCurve,
        points: &[String],
        order: Order,
        max_norm: u64,
        prime_cap: u64,
    ) -> Result<Self, InputError> {
        if max_norm < 1 {
            return Err(InputError::Invalid("--max-norm must be at least 1".into()));
        }
        curve
            .check_order(order)
            .map_err(|e| InputError::Invalid(e.to_string()))?;
        let mut p = None;
        let mut q = None;
        for arg in points {
            let (name, pt) = parse_point(arg)?;
            let slot = match name.as_str() {
                "P" => &mut p,
                "Q" => &mut q,
                _ => {
                    return Err(InputError::Point {
                        arg: arg.clone(),
                        reason: "point name must be P or Q".into(),
                    })
                }
            };
            if slot.replace(pt).is_some() {
                return Err(InputError::Point {
                    arg: arg.clone(),
                    reason: format!("{} given twice", name),
                });
            }
        }
        let p = p.ok_or_else(|| InputError::Invalid("--point P=x,y is required".into()))?;
        if p.is_infinity() {
            return Err(InputError::Invalid("P must be an affine point".into()));
        }
        let q = q.unwrap_or(CurvePoint::Infinity);
        for (name, pt) in [("P", &p), ("Q", &q)] {
            curve
                .check_point(pt)
                .map_err(|e| InputError::Invalid(format!("{}: {}", name, e)))?;
        }
        Ok(Job {
            curve,
            p,
            q,
            order,
            max_norm,
            prime_cap,
            canonical_only: false,
            fault: None,
        })
    }

    pub fn context(&self) -> Result<SequenceContext, InputError> {
        let ctx = SequenceContext::new(self.curve.clone(), self.p.clone(), self.q.clone(), self.order, self.prime_cap)?;
        Ok(match &self.fault {
            Some(f) => ctx.with_fault(f.clone()),
            None => ctx,
        })
    }

    /// Whether rows for `alpha` are printed.
    pub fn shows(&self, alpha: &GaussianInteger) -> bool {
        !self.canonical_only || *alpha == alpha.canonical_associate()
    }
}
