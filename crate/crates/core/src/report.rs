//! Pass/fail records emitted by the verification routines.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numberfield::{GaussianIdeal, GaussianInteger};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaTag {
    /// `Ann_p(P) | (α)s`.
    Ipmid,
    /// `J_p` integral and coprime to `s`.
    S,
    /// `I_p` integral.
    Defk,
    /// `Ann_p(P) != (α)s` for non-primitive `p`.
    Primdiv,
    /// The members of the index set whose auxiliary term `p` divides are
    /// exactly the multiples of `I_p`.
    Maxideal,
    /// Valuation recurrence along nested indices.
    #[serde(rename = "2nu")]
    TwoNu,
    /// Valuation bound for non-primitive `p`.
    Nuw,
    /// Canonical height scaling and torsion agreement.
    Height,
    /// Möbius sum against the Euler product and the Mertens chain.
    Mobius,
}

impl fmt::Display for LemmaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LemmaTag::Ipmid => "ipmid",
            LemmaTag::S => "s",
            LemmaTag::Defk => "defk",
            LemmaTag::Primdiv => "primdiv",
            LemmaTag::Maxideal => "maxideal",
            LemmaTag::TwoNu => "2nu",
            LemmaTag::Nuw => "nuw",
            LemmaTag::Height => "height",
            LemmaTag::Mobius => "mobius",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// The hypothesis does not apply.
    Vacuous,
    /// Not checkable here, e.g. auxiliary terms over Z[i] with Q != O.
    Skipped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Vacuous => "vacuous",
            Outcome::Skipped => "skipped",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaTag,
    pub prime: Option<GaussianIdeal>,
    pub alpha: Option<GaussianInteger>,
    pub outcome: Outcome,
    /// Inputs and intermediate values, enough to replay a failure.
    pub diagnostics: BTreeMap<String, String>,
}

impl LemmaReport {
    pub fn new(lemma: LemmaTag, prime: Option<GaussianIdeal>, alpha: Option<GaussianInteger>) -> Self {
        LemmaReport {
            lemma,
            prime,
            alpha,
            outcome: Outcome::Pass,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.diagnostics.insert(key.to_string(), value.to_string());
        self
    }

    pub fn outcome(mut self, outcome: Outcome) -> Self {
        self.outcome = outcome;
        self
    }

    /// Pass when `ok`, fail otherwise.
    pub fn check(self, ok: bool) -> Self {
        self.outcome(if ok { Outcome::Pass } else { Outcome::Fail })
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.lemma, self.outcome)?;
        if let Some(a) = &self.alpha {
            write!(f, " alpha={}", a)?;
        }
        if let Some(p) = &self.prime {
            write!(f, " prime={}", p)?;
        }
        for (k, v) in &self.diagnostics {
            write!(f, " {}={}", k, v)?;
        }
        Ok(())
    }
}
