//! Directed index sets, finitely described subsets, exact asymptotic
//! density and directed-set measures.

mod density;
mod index;
mod measure;
mod periodic;
mod set_expr;

pub use density::{density, density_trace, prefix_densities, prefix_density, DensityStage, MeasureValue, Schedule};
pub use index::{DirectedIndex, Index};
pub use measure::{axioms_check, measure_eval, AxiomFailure, AxiomReport, AxiomResult, DirectedSetMeasure};
pub use periodic::{normalize, EventuallyPeriodic, MAX_PERIOD};
pub use set_expr::{CustomPredicate, Predicate, SetExpr, SetKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("not comparable: {lo} ≰ {hi}")]
    NotComparable { lo: String, hi: String },
    #[error("{index} is not an element of {set:?}")]
    InvalidIndex { index: String, set: DirectedIndex },
    #[error("pred:{0} has no eventually periodic form")]
    NotPeriodic(String),
    #[error("period {0} exceeds the normaliser limit")]
    PeriodTooLarge(u64),
    #[error("outside the measure's field: {0}")]
    OutsideField(String),
}

/// Whether `s` is certainly finite, and an upper bound on its elements
/// when it is. Predicate leaves are replaced by `∅` and `ℕ` in every
/// combination, which over-approximates `s`.
pub fn finite_bound(s: &SetExpr) -> Option<u64> {
    let mut max = 0;
    for a in s.predicate_assignments() {
        let n = normalize(&a).ok()?;
        if !n.is_finite() {
            return None;
        }
        max = max.max(n.max_element().unwrap_or(0));
    }
    Some(max)
}

/// Whether `s` is certainly empty.
pub fn certainly_empty(s: &SetExpr) -> bool {
    s.is_syntactically_empty() || finite_bound(s) == Some(0)
}

/// Whether `s` is certainly infinite: it keeps positive density after
/// certified-null predicates are discarded, is an unbounded built-in
/// predicate, or is a union with such a part.
pub fn certainly_infinite(s: &SetExpr) -> bool {
    match s {
        SetExpr::Pred(p) => !matches!(p, Predicate::Custom(_)),
        SetExpr::Union(a, b) if certainly_infinite(a) || certainly_infinite(b) => true,
        _ => {
            let reduced = s.substitute(&|p| p.certified_null().then_some(false));
            matches!(normalize(&reduced), Ok(n) if !n.is_finite())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finiteness_helpers() {
        let sq = SetExpr::pred(Predicate::squares());
        assert_eq!(finite_bound(&SetExpr::fin([3, 9])), Some(9));
        assert_eq!(finite_bound(&SetExpr::inter(sq.clone(), SetExpr::fin([2, 4]))), Some(4));
        assert!(certainly_empty(&SetExpr::inter(sq.clone(), SetExpr::complement(sq.clone()))));
        assert!(finite_bound(&sq).is_none());
        assert!(certainly_infinite(&SetExpr::complement(sq.clone())));
        assert!(certainly_infinite(&sq));
        assert!(!certainly_infinite(&SetExpr::inter(SetExpr::pred(Predicate::Primes), SetExpr::evens())));
    }
}
