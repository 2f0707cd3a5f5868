use std::collections::BTreeSet;
use std::fmt;

use super::set_expr::SetExpr;
use super::MeasureError;

/// An element of a directed index set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Nat(u64),
    Pair(u64, u64),
    Atom(String),
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Nat(n) => write!(f, "{n}"),
            Index::Pair(a, b) => write!(f, "({a},{b})"),
            Index::Atom(s) => f.write_str(s),
        }
    }
}

/// The infinite directed sets the library works over.
///
/// `SymbolicUncountable` carries the indiscrete preorder (every atom is
/// below every other): reflexive, transitive and trivially directed. Its
/// order intervals are the whole set, so it has no finite order intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectedIndex {
    /// ℕ≥1, usual order.
    Naturals,
    /// ℕ≥1 × ℕ≥1, componentwise order.
    PairNaturals,
    SymbolicUncountable,
}

impl DirectedIndex {
    pub fn is_valid(&self, ix: &Index) -> bool {
        matches!(
            (self, ix),
            (DirectedIndex::Naturals, Index::Nat(n)) if *n >= 1
        ) || matches!(
            (self, ix),
            (DirectedIndex::PairNaturals, Index::Pair(a, b)) if *a >= 1 && *b >= 1
        ) || matches!((self, ix), (DirectedIndex::SymbolicUncountable, Index::Atom(_)))
    }

    fn check(&self, ix: &Index) -> Result<(), MeasureError> {
        if self.is_valid(ix) {
            Ok(())
        } else {
            Err(MeasureError::InvalidIndex { index: ix.to_string(), set: *self })
        }
    }

    pub fn leq(&self, a: &Index, b: &Index) -> Result<bool, MeasureError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Index::Nat(x), Index::Nat(y)) => x <= y,
            (Index::Pair(x1, y1), Index::Pair(x2, y2)) => x1 <= x2 && y1 <= y2,
            _ => true,
        })
    }

    /// An upper bound of `a` and `b`: `max` on ℕ, componentwise `max` on
    /// pairs, `b` itself on the indiscrete atom set.
    pub fn join(&self, a: &Index, b: &Index) -> Result<Index, MeasureError> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (a, b) {
            (Index::Nat(x), Index::Nat(y)) => Index::Nat(*x.max(y)),
            (Index::Pair(x1, y1), Index::Pair(x2, y2)) => Index::Pair(*x1.max(x2), *y1.max(y2)),
            _ => b.clone(),
        })
    }

    /// `[a, b] = {x : a ≤ x ≤ b}` together with a finiteness flag.
    pub fn order_interval(&self, a: &Index, b: &Index) -> Result<(SetExpr, bool), MeasureError> {
        if !self.leq(a, b)? {
            return Err(MeasureError::NotComparable { lo: a.to_string(), hi: b.to_string() });
        }
        Ok(match (a, b) {
            (Index::Nat(x), Index::Nat(y)) => (SetExpr::Fin((*x..=*y).collect()), true),
            (Index::Pair(x1, y1), Index::Pair(x2, y2)) => {
                let pts: BTreeSet<(u64, u64)> = (*x1..=*x2).flat_map(|i| (*y1..=*y2).map(move |j| (i, j))).collect();
                (SetExpr::FinPairs(pts), true)
            }
            _ => (SetExpr::colisted(Vec::<String>::new()), false),
        })
    }

    /// The whole index set as a set expression.
    pub fn full_set(&self) -> SetExpr {
        match self {
            DirectedIndex::Naturals => SetExpr::naturals(),
            DirectedIndex::PairNaturals => SetExpr::complement(SetExpr::FinPairs(BTreeSet::new())),
            DirectedIndex::SymbolicUncountable => SetExpr::colisted(Vec::<String>::new()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_examples() {
        let n = DirectedIndex::Naturals;
        assert_eq!(n.join(&Index::Nat(3), &Index::Nat(7)).unwrap(), Index::Nat(7));
        assert_eq!(n.join(&Index::Nat(4), &Index::Nat(4)).unwrap(), Index::Nat(4));
        let p = DirectedIndex::PairNaturals;
        assert_eq!(p.join(&Index::Pair(2, 9), &Index::Pair(5, 1)).unwrap(), Index::Pair(5, 9));
        assert!(n.join(&Index::Nat(0), &Index::Nat(1)).is_err());
        assert!(n.join(&Index::Pair(1, 1), &Index::Nat(1)).is_err());
    }

    #[test]
    fn join_is_an_upper_bound() {
        let p = DirectedIndex::PairNaturals;
        for a in 1..6 {
            for b in 1..6 {
                let x = Index::Pair(a, 6 - a);
                let y = Index::Pair(b, b);
                let z = p.join(&x, &y).unwrap();
                assert!(p.leq(&x, &z).unwrap() && p.leq(&y, &z).unwrap());
            }
        }
        let u = DirectedIndex::SymbolicUncountable;
        let (a, b) = (Index::Atom("a".into()), Index::Atom("b".into()));
        let z = u.join(&a, &b).unwrap();
        assert!(u.leq(&a, &z).unwrap() && u.leq(&b, &z).unwrap());
    }

    #[test]
    fn intervals() {
        let n = DirectedIndex::Naturals;
        let (s, finite) = n.order_interval(&Index::Nat(2), &Index::Nat(5)).unwrap();
        assert!(finite);
        assert_eq!(s, SetExpr::fin([2, 3, 4, 5]));
        assert_eq!(
            n.order_interval(&Index::Nat(5), &Index::Nat(2)),
            Err(MeasureError::NotComparable { lo: "5".into(), hi: "2".into() })
        );
        let p = DirectedIndex::PairNaturals;
        let (s, finite) = p.order_interval(&Index::Pair(1, 1), &Index::Pair(2, 2)).unwrap();
        assert!(finite);
        match s {
            SetExpr::FinPairs(pts) => assert_eq!(pts.len(), 4),
            other => panic!("unexpected {other}"),
        }
        assert!(p.order_interval(&Index::Pair(1, 3), &Index::Pair(2, 2)).is_err());
        let u = DirectedIndex::SymbolicUncountable;
        let (s, finite) = u.order_interval(&Index::Atom("a".into()), &Index::Atom("b".into())).unwrap();
        assert!(!finite && s.is_syntactically_full());
    }
}
