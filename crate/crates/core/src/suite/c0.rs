//! The interleaved sequence `(e₁, 0, e₂, 0, ...)` in the finitely
//! supported sequences: statistically null under a measure that ignores
//! the odd positions, but neither order convergent nor statistically
//! convergent under asymptotic density.

use std::fmt::Write as _;

use serde::Serialize;

use crate::index_measure::{DirectedSetMeasure, SetExpr};
use crate::lattice::{Element, RieszSpace};
use crate::nets::{
    check_order_conv, exceptional_set, subnet, witness_search, Net, SearchOutcome, Selector, TailRule, Templates,
};
use crate::rational::{q, qu};
use crate::verdict::{Clause, Evidence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct C0MeasureRow {
    pub measure: String,
    /// `μ` of the exceptional set against `p ≡ 0`.
    pub exceptional_measure: String,
    pub st_accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub templates_tried: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct C0Report {
    pub net: String,
    pub dominating_templates: usize,
    /// Every dominating template was rejected.
    pub order_rejected: bool,
    /// The first rejection; its clause is `unbounded`.
    pub order_evidence: Option<Evidence>,
    pub exceptional_set: String,
    pub exceptional_density: String,
    pub measures: Vec<C0MeasureRow>,
    /// The subsequence along the evens, probed, is identically zero.
    pub evens_subsequence_zero: bool,
    pub discrepancy: String,
    /// Every expected value was reproduced.
    pub reproduced: bool,
}

/// `(e₁, 0, e₂, 0, ...)`: position `2k − 1` carries `e_k`.
pub fn c0_net() -> Net {
    Net::from_tail(RieszSpace::FinSuppSeq, TailRule::UnitSweep { offset: 1, period: 2 }).expect("valid in c00")
}

/// `0`, and `c·(e₁ + ... + e_m)` as a constant, harmonic and geometric
/// tail, for `c, m ∈ {1, 2, 4, 8}`.
fn dominating_family() -> Vec<Net> {
    let space = RieszSpace::FinSuppSeq;
    let mut out = vec![Net::constant(space.zero())];
    for c in [1u64, 2, 4, 8] {
        for m in [1u64, 2, 4, 8] {
            let u = Element::seq((1..=m).map(|k| (k, qu(c))));
            out.push(Net::constant(u.clone()));
            for tail in [TailRule::Harmonic(u.clone()), TailRule::Geometric(u, q(1, 2))] {
                out.push(Net::from_tail(space, tail).expect("valid in c00"));
            }
        }
    }
    out
}

pub fn c0_example_report(measures: &[DirectedSetMeasure]) -> C0Report {
    let net = c0_net();
    let zero = RieszSpace::FinSuppSeq.zero();
    let family = dominating_family();
    let verdicts: Vec<_> = family.iter().map(|y| check_order_conv(&net, &zero, y)).collect();
    let order_rejected = verdicts.iter().all(|v| matches!(v, Ok(v) if !v.accepted));
    let order_evidence =
        verdicts.iter().find_map(|v| v.as_ref().ok().filter(|v| !v.accepted)).map(|v| v.evidence.clone());
    let all_unbounded = verdicts.iter().all(|v| matches!(v, Ok(v) if v.evidence.clause == Clause::Unbounded));

    let exceptional = exceptional_set(&net, &zero, &Net::constant(zero.clone()));
    let exceptional_set = match &exceptional {
        Ok(s) => s.to_string(),
        Err(e) => format!("error: {e}"),
    };
    let density = exceptional.as_ref().ok().map(|s| DirectedSetMeasure::PeriodicDensity.eval(s));
    let exceptional_density = match &density {
        Some(Ok(v)) => v.to_string(),
        Some(Err(e)) => format!("error: {e}"),
        None => "undetermined".into(),
    };
    let density_half = matches!(&density, Some(Ok(v)) if v.is_exactly(&q(1, 2)));
    let odds = matches!(&exceptional, Ok(s) if *s == SetExpr::odds());

    let rows: Vec<C0MeasureRow> = measures
        .iter()
        .map(|mu| {
            let exceptional_measure = match exceptional.as_ref().map(|s| mu.eval(s)) {
                Ok(Ok(v)) => v.to_string(),
                Ok(Err(e)) => format!("error: {e}"),
                Err(e) => format!("error: {e}"),
            };
            let (st_accepted, witness, templates_tried) = match witness_search(&net, &zero, mu, &Templates::default()) {
                Ok(SearchOutcome::Found { witness, .. }) => {
                    (true, Some(format!("p = {}, Δ = {}", witness.p, witness.delta)), 0)
                }
                Ok(SearchOutcome::NotFound { tried }) => (false, None, tried),
                Err(e) => (false, Some(format!("error: {e}")), 0),
            };
            C0MeasureRow { measure: mu.name(), exceptional_measure, st_accepted, witness, templates_tried }
        })
        .collect();
    let density_rejects = rows
        .iter()
        .zip(measures)
        .filter(|(_, mu)| matches!(mu, DirectedSetMeasure::PeriodicDensity))
        .all(|(r, _)| !r.st_accepted);

    let evens_subsequence_zero = match subnet(&net, &Selector::Inclusion(SetExpr::evens()), 64) {
        Ok((sub, v)) => v.accepted && (1..=256).all(|k| sub.eval(k).is_zero()),
        Err(_) => false,
    };

    C0Report {
        net: net.to_string(),
        dominating_templates: family.len(),
        order_rejected,
        order_evidence,
        exceptional_set,
        exceptional_density,
        measures: rows,
        evens_subsequence_zero,
        discrepancy: "the subsequence along the evens is identically 0, yet under asymptotic density the \
                      evens have measure 1/2 and the exceptional set (the odds) is not null; restricting to a \
                      subnet transfers convergence only along a set of measure 1, so the example needs a \
                      measure giving the evens mass 1"
            .into(),
        reproduced: order_rejected
            && all_unbounded
            && odds
            && density_half
            && density_rejects
            && evens_subsequence_zero,
    }
}

impl C0Report {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "net: {}", self.net);
        let _ = writeln!(
            s,
            "order convergence: {} of {} dominating templates rejected",
            if self.order_rejected { "all" } else { "not all" },
            self.dominating_templates
        );
        if let Some(e) = &self.order_evidence {
            let idx = e.violating_index.map(|n| format!(" at index {n}")).unwrap_or_default();
            let _ = writeln!(s, "  first rejection: {} clause{idx}", e.clause);
        }
        let _ = writeln!(s, "exceptional set against p = 0: {}", self.exceptional_set);
        let _ = writeln!(s, "  asymptotic density: {}", self.exceptional_density);
        for r in &self.measures {
            let verdict = if r.st_accepted { "accept" } else { "reject" };
            let _ = write!(
                s,
                "{}: μ(exceptional) = {}, statistical convergence {verdict}",
                r.measure, r.exceptional_measure
            );
            match &r.witness {
                Some(w) => {
                    let _ = writeln!(s, " ({w})");
                }
                None => {
                    let _ = writeln!(s, " (NotFound, {} templates exhausted)", r.templates_tried);
                }
            }
        }
        let _ = writeln!(s, "evens subsequence identically zero: {}", self.evens_subsequence_zero);
        let _ = writeln!(s, "discrepancy: {}", self.discrepancy);
        let _ = writeln!(s, "reproduced: {}", self.reproduced);
        s
    }
}
