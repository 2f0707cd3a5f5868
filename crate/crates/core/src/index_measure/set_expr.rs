//! Finitely described subsets of a directed index set.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::index::Index;

/// A membership oracle over ℕ. Sets built from predicates are only ever
/// measured by bounds, unless the predicate carries a density-zero
/// certificate.
#[derive(Clone)]
pub enum Predicate {
    /// k-th powers `{m^k : m ≥ 1}`, `k ≥ 2`.
    Powers(u32),
    /// `{1, 2, 4, 8, ...}`.
    PowersOfTwo,
    Primes,
    /// `n` with `⌊log₄ n⌋` even. Its prefix density swings between about
    /// 1/5 and 4/5 and has no limit.
    Oscillating,
    Custom(CustomPredicate),
}

#[derive(Clone)]
pub struct CustomPredicate {
    pub name: String,
    pub oracle: Arc<dyn Fn(u64) -> bool + Send + Sync>,
    /// The caller vouches that the set has asymptotic density zero.
    pub certified_null: bool,
}

impl Predicate {
    pub fn squares() -> Self {
        Predicate::Powers(2)
    }

    pub fn custom(
        name: impl Into<String>,
        certified_null: bool,
        oracle: impl Fn(u64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Predicate::Custom(CustomPredicate { name: name.into(), oracle: Arc::new(oracle), certified_null })
    }

    pub fn name(&self) -> String {
        match self {
            Predicate::Powers(2) => "squares".into(),
            Predicate::Powers(3) => "cubes".into(),
            Predicate::Powers(k) => format!("pow{k}"),
            Predicate::PowersOfTwo => "twopow".into(),
            Predicate::Primes => "primes".into(),
            Predicate::Oscillating => "oscillating".into(),
            Predicate::Custom(c) => c.name.clone(),
        }
    }

    /// Looks up a built-in predicate by its grammar name.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "squares" => Some(Predicate::Powers(2)),
            "cubes" => Some(Predicate::Powers(3)),
            "twopow" => Some(Predicate::PowersOfTwo),
            "primes" => Some(Predicate::Primes),
            "oscillating" => Some(Predicate::Oscillating),
            _ => {
                let k: u32 = name.strip_prefix("pow")?.parse().ok()?;
                (2..=64).contains(&k).then_some(Predicate::Powers(k))
            }
        }
    }

    /// Whether the set is known to have asymptotic density zero.
    pub fn certified_null(&self) -> bool {
        match self {
            Predicate::Powers(_) | Predicate::PowersOfTwo | Predicate::Primes => true,
            Predicate::Oscillating => false,
            Predicate::Custom(c) => c.certified_null,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        if n == 0 {
            return false;
        }
        match self {
            Predicate::Powers(k) => is_perfect_power(n, *k),
            Predicate::PowersOfTwo => n.is_power_of_two(),
            Predicate::Primes => is_prime(n),
            Predicate::Oscillating => ((63 - n.leading_zeros()) / 2).is_multiple_of(2),
            Predicate::Custom(c) => (c.oracle)(n),
        }
    }
}

impl PartialEq for Predicate {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Predicate::Powers(a), Predicate::Powers(b)) => a == b,
            (Predicate::PowersOfTwo, Predicate::PowersOfTwo)
            | (Predicate::Primes, Predicate::Primes)
            | (Predicate::Oscillating, Predicate::Oscillating) => true,
            (Predicate::Custom(a), Predicate::Custom(b)) => a.name == b.name && Arc::ptr_eq(&a.oracle, &b.oracle),
            _ => false,
        }
    }
}

impl Eq for Predicate {}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pred:{}", self.name())
    }
}

fn is_perfect_power(n: u64, k: u32) -> bool {
    let mut root = (n as f64).powf(1.0 / k as f64).round() as u64;
    root = root.saturating_sub(1);
    for r in root..root + 3 {
        match r.checked_pow(k) {
            Some(v) if v == n => return true,
            Some(v) if v > n => return false,
            None => return false,
            _ => {}
        }
    }
    false
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Which index set a set expression lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Naturals,
    Pairs,
    Atoms,
    /// Contains no kind-specific leaf (e.g. `fin{}`); fits any index.
    Any,
}

/// A finitely described subset. Complements are taken relative to the
/// index set the expression lives in.
#[derive(Clone, PartialEq, Eq)]
pub enum SetExpr {
    Fin(BTreeSet<u64>),
    FinPairs(BTreeSet<(u64, u64)>),
    /// `{first, first + period, first + 2·period, ...}`.
    ArithProg {
        first: u64,
        period: u64,
    },
    Union(Box<SetExpr>, Box<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    Listed(BTreeSet<String>),
    CoListed(BTreeSet<String>),
    Pred(Predicate),
}

impl SetExpr {
    pub fn empty() -> Self {
        SetExpr::Fin(BTreeSet::new())
    }

    /// All of ℕ.
    pub fn naturals() -> Self {
        SetExpr::ArithProg { first: 1, period: 1 }
    }

    pub fn fin(items: impl IntoIterator<Item = u64>) -> Self {
        SetExpr::Fin(items.into_iter().collect())
    }

    /// `ap(first, period)`. Panics on a zero `first` or `period`; the parser
    /// rejects those before construction.
    pub fn ap(first: u64, period: u64) -> Self {
        assert!(first >= 1 && period >= 1, "ap needs first ≥ 1 and period ≥ 1");
        SetExpr::ArithProg { first, period }
    }

    /// `{n : n ≥ from}`.
    pub fn at_least(from: u64) -> Self {
        SetExpr::ap(from.max(1), 1)
    }

    pub fn evens() -> Self {
        SetExpr::ap(2, 2)
    }

    pub fn odds() -> Self {
        SetExpr::ap(1, 2)
    }

    pub fn pred(p: Predicate) -> Self {
        SetExpr::Pred(p)
    }

    pub fn listed<S: Into<String>>(items: impl IntoIterator<Item = S>) -> Self {
        SetExpr::Listed(items.into_iter().map(Into::into).collect())
    }

    pub fn colisted<S: Into<String>>(items: impl IntoIterator<Item = S>) -> Self {
        SetExpr::CoListed(items.into_iter().map(Into::into).collect())
    }

    pub fn is_syntactically_empty(&self) -> bool {
        match self {
            SetExpr::Fin(s) => s.is_empty(),
            SetExpr::FinPairs(s) => s.is_empty(),
            SetExpr::Listed(s) => s.is_empty(),
            SetExpr::Complement(inner) => inner.is_syntactically_full(),
            _ => false,
        }
    }

    pub fn is_syntactically_full(&self) -> bool {
        match self {
            SetExpr::ArithProg { first: 1, period: 1 } => true,
            SetExpr::CoListed(s) => s.is_empty(),
            SetExpr::Complement(inner) => inner.is_syntactically_empty(),
            _ => false,
        }
    }

    pub fn union(a: SetExpr, b: SetExpr) -> SetExpr {
        if a.is_syntactically_empty() || b.is_syntactically_full() {
            b
        } else if b.is_syntactically_empty() || a.is_syntactically_full() || a == b {
            a
        } else {
            SetExpr::Union(Box::new(a), Box::new(b))
        }
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> SetExpr {
        if a.is_syntactically_full() || b.is_syntactically_empty() {
            b
        } else if b.is_syntactically_full() || a.is_syntactically_empty() || a == b {
            a
        } else {
            SetExpr::Inter(Box::new(a), Box::new(b))
        }
    }

    pub fn complement(a: SetExpr) -> SetExpr {
        match a {
            SetExpr::Complement(inner) => *inner,
            SetExpr::Listed(s) => SetExpr::CoListed(s),
            SetExpr::CoListed(s) => SetExpr::Listed(s),
            other => SetExpr::Complement(Box::new(other)),
        }
    }

    /// `a ∖ b`.
    pub fn minus(a: SetExpr, b: SetExpr) -> SetExpr {
        SetExpr::inter(a, SetExpr::complement(b))
    }

    pub fn kind(&self) -> Result<SetKind, String> {
        fn merge(a: SetKind, b: SetKind) -> Result<SetKind, String> {
            match (a, b) {
                (SetKind::Any, k) | (k, SetKind::Any) => Ok(k),
                (x, y) if x == y => Ok(x),
                (x, y) => Err(format!("mixes {x:?} and {y:?} sets")),
            }
        }
        match self {
            SetExpr::Fin(s) if s.is_empty() => Ok(SetKind::Any),
            SetExpr::Fin(_) | SetExpr::ArithProg { .. } | SetExpr::Pred(_) => Ok(SetKind::Naturals),
            SetExpr::FinPairs(s) if s.is_empty() => Ok(SetKind::Any),
            SetExpr::FinPairs(_) => Ok(SetKind::Pairs),
            SetExpr::Listed(_) | SetExpr::CoListed(_) => Ok(SetKind::Atoms),
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => merge(a.kind()?, b.kind()?),
            SetExpr::Complement(a) => a.kind(),
        }
    }

    /// Membership of a natural number (ℕ-sets only; other leaves never
    /// contain a natural).
    pub fn contains_nat(&self, n: u64) -> bool {
        match self {
            SetExpr::Fin(s) => s.contains(&n),
            SetExpr::ArithProg { first, period } => n >= *first && (n - first).is_multiple_of(*period),
            SetExpr::Union(a, b) => a.contains_nat(n) || b.contains_nat(n),
            SetExpr::Inter(a, b) => a.contains_nat(n) && b.contains_nat(n),
            SetExpr::Complement(a) => n >= 1 && !a.contains_nat(n),
            SetExpr::Pred(p) => p.contains(n),
            SetExpr::FinPairs(_) | SetExpr::Listed(_) | SetExpr::CoListed(_) => false,
        }
    }

    pub fn contains(&self, ix: &Index) -> bool {
        match ix {
            Index::Nat(n) => self.contains_nat(*n),
            Index::Pair(a, b) => self.contains_pair(*a, *b),
            Index::Atom(s) => self.contains_atom(s),
        }
    }

    fn contains_pair(&self, a: u64, b: u64) -> bool {
        match self {
            SetExpr::FinPairs(s) => s.contains(&(a, b)),
            SetExpr::Union(x, y) => x.contains_pair(a, b) || y.contains_pair(a, b),
            SetExpr::Inter(x, y) => x.contains_pair(a, b) && y.contains_pair(a, b),
            SetExpr::Complement(x) => !x.contains_pair(a, b),
            _ => false,
        }
    }

    fn contains_atom(&self, atom: &str) -> bool {
        match self {
            SetExpr::Listed(s) => s.contains(atom),
            SetExpr::CoListed(s) => !s.contains(atom),
            SetExpr::Union(x, y) => x.contains_atom(atom) || y.contains_atom(atom),
            SetExpr::Inter(x, y) => x.contains_atom(atom) && y.contains_atom(atom),
            SetExpr::Complement(x) => !x.contains_atom(atom),
            _ => false,
        }
    }

    /// Distinct predicate leaves, in first-occurrence order.
    pub fn predicates(&self) -> Vec<Predicate> {
        let mut out = Vec::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates(&self, out: &mut Vec<Predicate>) {
        match self {
            SetExpr::Pred(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => {
                a.collect_predicates(out);
                b.collect_predicates(out);
            }
            SetExpr::Complement(a) => a.collect_predicates(out),
            _ => {}
        }
    }

    pub fn has_predicates(&self) -> bool {
        match self {
            SetExpr::Pred(_) => true,
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) => a.has_predicates() || b.has_predicates(),
            SetExpr::Complement(a) => a.has_predicates(),
            _ => false,
        }
    }

    /// Replaces every predicate leaf for which `pick` returns a value by
    /// `∅` (false) or `ℕ` (true).
    pub fn substitute(&self, pick: &dyn Fn(&Predicate) -> Option<bool>) -> SetExpr {
        match self {
            SetExpr::Pred(p) => match pick(p) {
                Some(true) => SetExpr::naturals(),
                Some(false) => SetExpr::empty(),
                None => self.clone(),
            },
            SetExpr::Union(a, b) => SetExpr::union(a.substitute(pick), b.substitute(pick)),
            SetExpr::Inter(a, b) => SetExpr::inter(a.substitute(pick), b.substitute(pick)),
            SetExpr::Complement(a) => SetExpr::complement(a.substitute(pick)),
            other => other.clone(),
        }
    }

    /// Every set obtained by fixing each predicate leaf to `∅` or `ℕ`.
    /// The original set is contained in the union of these.
    pub fn predicate_assignments(&self) -> Vec<SetExpr> {
        let preds = self.predicates();
        if preds.is_empty() {
            return vec![self.clone()];
        }
        (0u32..1 << preds.len())
            .map(|mask| {
                self.substitute(&|p| {
                    let i = preds.iter().position(|q| q == p)?;
                    Some(mask >> i & 1 == 1)
                })
            })
            .collect()
    }

    /// Elements in `[1, upto]`, by scanning membership.
    pub fn elements_upto(&self, upto: u64) -> Vec<u64> {
        (1..=upto).filter(|&n| self.contains_nat(n)).collect()
    }

    /// The `k`-th smallest element (1-based), scanning at most `limit`
    /// candidates.
    pub fn nth_scan(&self, k: u64, limit: u64) -> Option<u64> {
        let mut seen = 0;
        for n in 1..=limit {
            if self.contains_nat(n) {
                seen += 1;
                if seen == k {
                    return Some(n);
                }
            }
        }
        None
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = T>) -> fmt::Result {
            for (i, x) in items.enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            SetExpr::Fin(s) => {
                f.write_str("fin{")?;
                list(f, s.iter())?;
                f.write_str("}")
            }
            SetExpr::FinPairs(s) => {
                f.write_str("fin{")?;
                list(f, s.iter().map(|(a, b)| format!("({a},{b})")))?;
                f.write_str("}")
            }
            SetExpr::ArithProg { first, period } => write!(f, "ap({first},{period})"),
            SetExpr::Union(a, b) => write!(f, "u({a},{b})"),
            SetExpr::Inter(a, b) => write!(f, "i({a},{b})"),
            SetExpr::Complement(a) => write!(f, "c({a})"),
            SetExpr::Listed(s) => {
                f.write_str("listed{")?;
                list(f, s.iter())?;
                f.write_str("}")
            }
            SetExpr::CoListed(s) => {
                f.write_str("colisted{")?;
                list(f, s.iter())?;
                f.write_str("}")
            }
            SetExpr::Pred(p) => write!(f, "pred:{}", p.name()),
        }
    }
}

impl fmt::Debug for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl serde::Serialize for SetExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
