//! Accept / reject outcomes of the checkers, with evidence.

use std::fmt;

use serde::Serialize;

use crate::index_measure::{MeasureValue, SetExpr};
use crate::lattice::Element;

/// The clause of a definition a verdict is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `μ(Δ) = 1`.
    Measure,
    /// The dominating net decreases along `Δ`.
    Decreasing,
    /// Its infimum along `Δ` is the claimed limit.
    Infimum,
    /// `|x_α − x| ≤ p_α` on `Δ`.
    Domination,
    /// No element of the space dominates the net's tail.
    Unbounded,
    /// A subnet selector is cofinal.
    Cofinality,
    /// A relatively uniform bound `(1/m)u` is eventually met.
    Regulator,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Measure => "measure",
            Clause::Decreasing => "decreasing",
            Clause::Infimum => "infimum",
            Clause::Domination => "domination",
            Clause::Unbounded => "unbounded",
            Clause::Cofinality => "cofinality",
            Clause::Regulator => "regulator",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    /// For a rejection, the failed clause; for an acceptance, the last
    /// clause established.
    pub clause: Clause,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violating_pair: Option<(u64, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infimum: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<SetExpr>,
    /// Largest index checked explicitly; beyond it the tail was decided
    /// symbolically.
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Evidence {
    pub fn new(clause: Clause, horizon: u64) -> Self {
        Evidence {
            clause,
            violating_index: None,
            violating_pair: None,
            measure: None,
            infimum: None,
            set: None,
            horizon,
            note: None,
        }
    }

    pub fn index(mut self, n: u64) -> Self {
        self.violating_index = Some(n);
        self
    }

    pub fn pair(mut self, a: u64, b: u64) -> Self {
        self.violating_pair = Some((a, b));
        self
    }

    pub fn measure(mut self, v: MeasureValue) -> Self {
        self.measure = Some(v);
        self
    }

    pub fn infimum(mut self, x: Element) -> Self {
        self.infimum = Some(x);
        self
    }

    pub fn set(mut self, s: SetExpr) -> Self {
        self.set = Some(s);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub accepted: bool,
    pub evidence: Evidence,
}

impl Verdict {
    pub fn accept(evidence: Evidence) -> Self {
        Verdict { accepted: true, evidence }
    }

    pub fn reject(evidence: Evidence) -> Self {
        Verdict { accepted: false, evidence }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.evidence;
        if self.accepted {
            write!(f, "accept")?;
        } else {
            write!(f, "reject ({} clause failed)", e.clause)?;
        }
        if let Some(n) = e.violating_index {
            write!(f, "\n  violating index: {n}")?;
        }
        if let Some((a, b)) = e.violating_pair {
            write!(f, "\n  violating pair: ({a}, {b})")?;
        }
        if let Some(m) = &e.measure {
            write!(f, "\n  μ(Δ) = {m}")?;
        }
        if let Some(x) = &e.infimum {
            write!(f, "\n  infimum: {x}")?;
        }
        if let Some(s) = &e.set {
            write!(f, "\n  set: {s}")?;
        }
        write!(f, "\n  explicit horizon: {}", e.horizon)?;
        if let Some(n) = &e.note {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}
