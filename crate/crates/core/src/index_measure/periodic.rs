//! Canonical eventually-periodic form of subsets of ℕ built from finite
//! lists and arithmetic progressions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;

use super::set_expr::SetExpr;
use super::MeasureError;
use crate::rational::Q;

/// Largest period the normaliser will build before giving up.
pub const MAX_PERIOD: u64 = 1 << 20;

/// `{n ≥ 1 : n mod period ∈ residues}`, corrected on finitely many points.
///
/// Canonical: `period` is minimal, `added` holds members whose residue is
/// not in `residues`, `removed` holds non-members whose residue is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub period: u64,
    pub residues: BTreeSet<u64>,
    pub added: BTreeSet<u64>,
    pub removed: BTreeSet<u64>,
}

struct Working {
    pattern: Vec<bool>,
    added: BTreeSet<u64>,
    removed: BTreeSet<u64>,
}

impl Working {
    fn period(&self) -> u64 {
        self.pattern.len() as u64
    }

    fn on_pattern(&self, n: u64) -> bool {
        self.pattern[(n % self.period()) as usize]
    }

    fn contains(&self, n: u64) -> bool {
        if self.added.contains(&n) {
            true
        } else if self.removed.contains(&n) {
            false
        } else {
            self.on_pattern(n)
        }
    }

    fn complement(self) -> Working {
        Working { pattern: self.pattern.into_iter().map(|b| !b).collect(), added: self.removed, removed: self.added }
    }

    fn combine(a: &Working, b: &Working, op: fn(bool, bool) -> bool) -> Result<Working, MeasureError> {
        let period = a.period().lcm(&b.period());
        if period > MAX_PERIOD {
            return Err(MeasureError::PeriodTooLarge(period));
        }
        let pattern: Vec<bool> = (0..period)
            .map(|r| op(a.pattern[(r % a.period()) as usize], b.pattern[(r % b.period()) as usize]))
            .collect();
        let mut out = Working { pattern, added: BTreeSet::new(), removed: BTreeSet::new() };
        let candidates: BTreeSet<u64> =
            a.added.iter().chain(&a.removed).chain(&b.added).chain(&b.removed).copied().collect();
        for n in candidates {
            let actual = op(a.contains(n), b.contains(n));
            if actual != out.on_pattern(n) {
                if actual {
                    out.added.insert(n);
                } else {
                    out.removed.insert(n);
                }
            }
        }
        Ok(out)
    }

    fn canonical(self) -> EventuallyPeriodic {
        let len = self.pattern.len();
        let period = (1..=len)
            .filter(|p| len.is_multiple_of(*p))
            .find(|&p| (0..len).all(|r| self.pattern[r] == self.pattern[r % p]))
            .unwrap_or(len);
        EventuallyPeriodic {
            period: period as u64,
            residues: (0..period as u64).filter(|&r| self.pattern[r as usize]).collect(),
            added: self.added,
            removed: self.removed,
        }
    }
}

fn build(s: &SetExpr) -> Result<Working, MeasureError> {
    match s {
        SetExpr::Fin(items) => Ok(Working {
            pattern: vec![false],
            added: items.iter().copied().filter(|&n| n >= 1).collect(),
            removed: BTreeSet::new(),
        }),
        SetExpr::ArithProg { first, period } => {
            if *period > MAX_PERIOD {
                return Err(MeasureError::PeriodTooLarge(*period));
            }
            let mut pattern = vec![false; *period as usize];
            pattern[(first % period) as usize] = true;
            let mut removed = BTreeSet::new();
            let mut n = *first;
            while n > *period {
                n -= period;
                removed.insert(n);
            }
            Ok(Working { pattern, added: BTreeSet::new(), removed })
        }
        SetExpr::Union(a, b) => Working::combine(&build(a)?, &build(b)?, |x, y| x || y),
        SetExpr::Inter(a, b) => Working::combine(&build(a)?, &build(b)?, |x, y| x && y),
        SetExpr::Complement(a) => Ok(build(a)?.complement()),
        SetExpr::Pred(p) => Err(MeasureError::NotPeriodic(p.name())),
        SetExpr::FinPairs(_) | SetExpr::Listed(_) | SetExpr::CoListed(_) => {
            Err(MeasureError::OutsideField(format!("{s} is not a subset of ℕ")))
        }
    }
}

/// Canonical eventually-periodic form of `s`. Boolean combinations of
/// finite lists and arithmetic progressions are always eventually
/// periodic; predicate leaves are not.
pub fn normalize(s: &SetExpr) -> Result<EventuallyPeriodic, MeasureError> {
    Ok(build(s)?.canonical())
}

impl EventuallyPeriodic {
    pub fn contains(&self, n: u64) -> bool {
        if n == 0 || self.removed.contains(&n) {
            return false;
        }
        self.added.contains(&n) || self.residues.contains(&(n % self.period))
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.added.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn max_element(&self) -> Option<u64> {
        if self.is_finite() {
            self.added.iter().next_back().copied()
        } else {
            None
        }
    }

    /// Exact asymptotic density `|residues| / period`.
    pub fn density(&self) -> Q {
        Q::new(BigInt::from(self.residues.len()), BigInt::from(self.period))
    }

    /// `|s ∩ [1, k]|`.
    pub fn count_upto(&self, k: u64) -> u64 {
        let p = self.period;
        let periodic: u64 = self
            .residues
            .iter()
            .map(|&r| match r {
                0 => k / p,
                r if k >= r => (k - r) / p + 1,
                _ => 0,
            })
            .sum();
        let added = self.added.range(..=k).count() as u64;
        let removed = self.removed.range(..=k).count() as u64;
        periodic + added - removed
    }

    /// A set expression denoting exactly this set, built from `ap` and
    /// `fin` leaves.
    pub fn to_set_expr(&self) -> SetExpr {
        let p = self.period;
        let mut expr = if p == 1 && self.residues.contains(&0) {
            SetExpr::naturals()
        } else {
            self.residues
                .iter()
                .map(|&r| SetExpr::ap(if r == 0 { p } else { r }, p))
                .fold(SetExpr::empty(), SetExpr::union)
        };
        if !self.added.is_empty() {
            expr = SetExpr::union(expr, SetExpr::Fin(self.added.clone()));
        }
        if !self.removed.is_empty() {
            expr = SetExpr::minus(expr, SetExpr::Fin(self.removed.clone()));
        }
        expr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_measure::Predicate;
    use crate::rational::q;

    fn set(items: &[u64]) -> BTreeSet<u64> {
        items.iter().copied().collect()
    }

    #[test]
    fn evens_and_complement_of_odds() {
        let ev = normalize(&SetExpr::ap(2, 2)).unwrap();
        assert_eq!((ev.period, ev.residues.clone()), (2, set(&[0])));
        assert!(ev.added.is_empty() && ev.removed.is_empty());
        let c = normalize(&SetExpr::complement(SetExpr::ap(1, 2))).unwrap();
        assert_eq!(c, ev);
    }

    #[test]
    fn union_with_a_point_already_in_the_progression() {
        // 4 = 1 + 3 already lies in ap(1,3), so no exception survives.
        let s = normalize(&SetExpr::union(SetExpr::ap(1, 3), SetExpr::fin([4]))).unwrap();
        assert_eq!((s.period, s.residues.clone()), (3, set(&[1])));
        assert!(s.added.is_empty() && s.removed.is_empty());
        let s = normalize(&SetExpr::union(SetExpr::ap(1, 3), SetExpr::fin([5]))).unwrap();
        assert_eq!((s.period, s.residues.clone(), s.added.clone()), (3, set(&[1]), set(&[5])));
    }

    #[test]
    fn late_start_progression_records_removed_points() {
        let s = normalize(&SetExpr::ap(10, 3)).unwrap();
        assert_eq!((s.period, s.residues.clone(), s.removed.clone()), (3, set(&[1]), set(&[1, 4, 7])));
        assert_eq!(s.count_upto(9), 0);
        assert_eq!(s.count_upto(10), 1);
        assert_eq!(s.count_upto(16), 3);
    }

    #[test]
    fn minimal_period() {
        let s = normalize(&SetExpr::union(SetExpr::ap(2, 4), SetExpr::ap(4, 4))).unwrap();
        assert_eq!((s.period, s.residues.clone()), (2, set(&[0])));
        let full = normalize(&SetExpr::union(SetExpr::ap(1, 2), SetExpr::ap(2, 2))).unwrap();
        assert_eq!((full.period, full.residues.clone()), (1, set(&[0])));
        assert_eq!(full.density(), q(1, 1));
    }

    #[test]
    fn predicates_are_not_periodic() {
        assert_eq!(normalize(&SetExpr::pred(Predicate::squares())), Err(MeasureError::NotPeriodic("squares".into())));
    }

    #[test]
    fn to_set_expr_denotes_the_same_set() {
        let exprs = [
            SetExpr::ap(10, 3),
            SetExpr::union(SetExpr::ap(1, 3), SetExpr::fin([5, 2])),
            SetExpr::complement(SetExpr::ap(3, 4)),
            SetExpr::fin([1, 9]),
            SetExpr::naturals(),
            SetExpr::empty(),
        ];
        for e in exprs {
            let n = normalize(&e).unwrap();
            let back = n.to_set_expr();
            assert_eq!(normalize(&back).unwrap(), n, "{e} vs {back}");
            for k in 1..100 {
                assert_eq!(e.contains_nat(k), back.contains_nat(k));
                assert_eq!(e.contains_nat(k), n.contains(k));
            }
        }
    }
}
