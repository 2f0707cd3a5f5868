//! Directed-set measures and their axiom checks.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::density::{sampled_bounds, MeasureValue, Schedule};
use super::periodic::normalize;
use super::set_expr::{SetExpr, SetKind};
use super::MeasureError;
use crate::rational::{fmt_q, one, zero, Q};

type CustomEval = Arc<dyn Fn(&SetExpr) -> Result<MeasureValue, MeasureError> + Send + Sync>;

/// A finitely additive `[0,1]`-valued measure on an interval field.
#[derive(Clone)]
pub enum DirectedSetMeasure {
    /// Asymptotic density on the field of eventually periodic subsets of ℕ.
    PeriodicDensity,
    /// Asymptotic density on every ℕ-set expression. Predicates certified
    /// null are discarded (the set changes only inside a density-zero set),
    /// after which an eventually periodic remainder is measured exactly and
    /// anything else gets sampled prefix bounds.
    PrefixBoundsDensity { schedule: Schedule },
    /// Countable / co-countable field on an uncountable set: listed atoms
    /// stand in for countable sets and get 0, their complements get 1.
    CoCountable,
    /// `μ(S) = δ(S ∩ B) / δ(B)` for an eventually periodic `B` of positive
    /// density: the density conditioned on `B`. Every set disjoint from
    /// `B` is null.
    Conditional { base: SetExpr, base_density: Q },
    /// Caller-supplied evaluation. Nothing about it is assumed; run
    /// [`axioms_check`] to find out whether it is a directed set measure.
    Custom { name: String, eval: CustomEval },
}

impl fmt::Debug for DirectedSetMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn reduce_certified(s: &SetExpr) -> SetExpr {
    s.substitute(&|p| p.certified_null().then_some(false))
}

/// Normal form in the countable/co-countable algebra: `(co, atoms)` is the
/// listed set when `co` is false and its complement when true.
fn listed_form(s: &SetExpr) -> Result<(bool, BTreeSet<String>), MeasureError> {
    Ok(match s {
        SetExpr::Listed(a) => (false, a.clone()),
        SetExpr::CoListed(a) => (true, a.clone()),
        SetExpr::Fin(a) if a.is_empty() => (false, BTreeSet::new()),
        SetExpr::Complement(a) => {
            let (co, atoms) = listed_form(a)?;
            (!co, atoms)
        }
        SetExpr::Union(a, b) => {
            let (ca, xa) = listed_form(a)?;
            let (cb, xb) = listed_form(b)?;
            match (ca, cb) {
                (false, false) => (false, &xa | &xb),
                (true, false) => (true, &xa - &xb),
                (false, true) => (true, &xb - &xa),
                (true, true) => (true, &xa & &xb),
            }
        }
        SetExpr::Inter(a, b) => {
            let (ca, xa) = listed_form(a)?;
            let (cb, xb) = listed_form(b)?;
            match (ca, cb) {
                (false, false) => (false, &xa & &xb),
                (true, false) => (false, &xb - &xa),
                (false, true) => (false, &xa - &xb),
                (true, true) => (true, &xa | &xb),
            }
        }
        other => return Err(MeasureError::OutsideField(format!("{other} is not in the countable/co-countable field"))),
    })
}

impl DirectedSetMeasure {
    pub fn prefix_bounds() -> Self {
        DirectedSetMeasure::PrefixBoundsDensity { schedule: Schedule::default() }
    }

    /// Density conditioned on `base`; `base` must be eventually periodic
    /// (after discarding certified-null predicates) with positive density.
    pub fn conditional(base: SetExpr) -> Result<Self, MeasureError> {
        let norm = normalize(&reduce_certified(&base))?;
        let base_density = norm.density();
        if base_density == zero() {
            return Err(MeasureError::OutsideField(format!("{base} has density zero")));
        }
        Ok(DirectedSetMeasure::Conditional { base, base_density })
    }

    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&SetExpr) -> Result<MeasureValue, MeasureError> + Send + Sync + 'static,
    ) -> Self {
        DirectedSetMeasure::Custom { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn name(&self) -> String {
        match self {
            DirectedSetMeasure::PeriodicDensity => "periodic-density".into(),
            DirectedSetMeasure::PrefixBoundsDensity { .. } => "prefix-density".into(),
            DirectedSetMeasure::CoCountable => "cocountable".into(),
            DirectedSetMeasure::Conditional { base, .. } => format!("conditional:{base}"),
            DirectedSetMeasure::Custom { name, .. } => name.clone(),
        }
    }

    /// Human-readable description of the domain field.
    pub fn field_description(&self) -> &'static str {
        match self {
            DirectedSetMeasure::PeriodicDensity => "eventually periodic subsets of ℕ",
            DirectedSetMeasure::PrefixBoundsDensity { .. } => "all set expressions over ℕ",
            DirectedSetMeasure::CoCountable => "listed / co-listed atom sets",
            DirectedSetMeasure::Conditional { .. } => "subsets of ℕ whose trace on the base is eventually periodic",
            DirectedSetMeasure::Custom { .. } => "caller-defined",
        }
    }

    /// The index set kind the measure lives on.
    pub fn index_kind(&self) -> SetKind {
        match self {
            DirectedSetMeasure::CoCountable => SetKind::Atoms,
            DirectedSetMeasure::Custom { .. } => SetKind::Any,
            _ => SetKind::Naturals,
        }
    }

    /// The whole index set.
    pub fn full_set(&self) -> SetExpr {
        match self {
            DirectedSetMeasure::CoCountable => SetExpr::colisted(Vec::<String>::new()),
            _ => SetExpr::naturals(),
        }
    }

    fn check_kind(&self, s: &SetExpr) -> Result<(), MeasureError> {
        let kind = s.kind().map_err(|e| MeasureError::OutsideField(format!("{s}: {e}")))?;
        let want = self.index_kind();
        if kind == SetKind::Any || want == SetKind::Any || kind == want {
            Ok(())
        } else {
            Err(MeasureError::OutsideField(format!("{s} is a {kind:?} set but {} lives on {want:?}", self.name())))
        }
    }

    /// `μ(s)`.
    pub fn eval(&self, s: &SetExpr) -> Result<MeasureValue, MeasureError> {
        self.check_kind(s)?;
        match self {
            DirectedSetMeasure::PeriodicDensity => match normalize(s) {
                Ok(p) => Ok(MeasureValue::Exact(p.density())),
                Err(MeasureError::NotPeriodic(name)) => {
                    Err(MeasureError::OutsideField(format!("{s} uses pred:{name}, which is not eventually periodic")))
                }
                Err(e) => Err(e),
            },
            DirectedSetMeasure::PrefixBoundsDensity { schedule } => {
                let reduced = reduce_certified(s);
                match normalize(&reduced) {
                    Ok(p) => Ok(MeasureValue::Exact(p.density())),
                    Err(MeasureError::NotPeriodic(_)) => sampled_bounds(&reduced, schedule),
                    Err(e) => Err(e),
                }
            }
            DirectedSetMeasure::CoCountable => {
                let (co, _) = listed_form(s)?;
                Ok(MeasureValue::Exact(if co { one() } else { zero() }))
            }
            DirectedSetMeasure::Conditional { base, base_density } => {
                let trace = reduce_certified(&SetExpr::inter(s.clone(), base.clone()));
                match normalize(&trace) {
                    Ok(p) => Ok(MeasureValue::Exact(p.density() / base_density)),
                    Err(MeasureError::NotPeriodic(name)) => {
                        Err(MeasureError::OutsideField(format!("trace of {s} on {base} uses pred:{name}")))
                    }
                    Err(e) => Err(e),
                }
            }
            DirectedSetMeasure::Custom { eval, .. } => eval(s),
        }
    }

    /// Whether `s ∩ t = ∅`, decided on normal forms. `None` when the
    /// question cannot be settled symbolically.
    pub fn disjoint(&self, s: &SetExpr, t: &SetExpr) -> Option<bool> {
        let both = SetExpr::inter(s.clone(), t.clone());
        match both.kind().ok()? {
            SetKind::Atoms => listed_form(&both).ok().map(|(co, a)| !co && a.is_empty()),
            SetKind::Any | SetKind::Naturals => normalize(&both).ok().map(|p| p.is_empty()),
            SetKind::Pairs => None,
        }
    }
}

/// `μ(s)` for a set in `μ`'s field.
pub fn measure_eval(mu: &DirectedSetMeasure, s: &SetExpr) -> Result<MeasureValue, MeasureError> {
    mu.eval(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub sets: Vec<SetExpr>,
    pub values: Vec<MeasureValue>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomResult {
    fn new(axiom: &'static str) -> Self {
        AxiomResult { axiom, checked: 0, skipped: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub measure: String,
    pub seed: u64,
    pub axioms: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.axioms.iter().all(AxiomResult::passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomResult> {
        self.axioms.iter().find(|a| a.axiom == name)
    }
}

fn in_unit_interval(v: &MeasureValue) -> bool {
    let unit = |x: &Q| *x >= zero() && *x <= one();
    match v {
        MeasureValue::Exact(x) => unit(x),
        MeasureValue::Bounds { lo, hi, .. } => unit(lo) && unit(hi) && lo <= hi,
        MeasureValue::Undetermined => true,
    }
}

/// Checks every directed-set-measure axiom on `samples`: `μ(∅) = 0`,
/// `μ(A) = 1`, values in `[0,1]`, null finite order intervals, finite
/// additivity on disjoint pairs, and `μ(C) = 0` for `C ⊆ B` with
/// `μ(B) = 0`. Disjointness and nesting are established symbolically;
/// pairs involving predicate sets are skipped. Failures are data.
pub fn axioms_check(mu: &DirectedSetMeasure, samples: &[SetExpr], seed: u64) -> AxiomReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full = mu.full_set();
    let on_atoms = mu.index_kind() == SetKind::Atoms
        || (mu.index_kind() == SetKind::Any && samples.iter().any(|s| s.kind() == Ok(SetKind::Atoms)));
    let full = if on_atoms { SetExpr::colisted(Vec::<String>::new()) } else { full };
    let empty = if on_atoms { SetExpr::listed(Vec::<String>::new()) } else { SetExpr::empty() };

    let mut empty_null = AxiomResult::new("empty_null");
    let mut total_mass = AxiomResult::new("total_mass");
    let mut range = AxiomResult::new("unit_range");
    let mut intervals = AxiomResult::new("finite_intervals_null");
    let mut additivity = AxiomResult::new("finite_additivity");
    let mut monotone = AxiomResult::new("null_monotone");

    let expect = |res: &mut AxiomResult, s: &SetExpr, want: &Q, what: &str| {
        res.checked += 1;
        match mu.eval(s) {
            Ok(v) if v.is_exactly(want) => {}
            Ok(v) => res.failures.push(AxiomFailure {
                sets: vec![s.clone()],
                values: vec![v],
                detail: format!("{what}: expected {}", fmt_q(want)),
            }),
            Err(e) => res.failures.push(AxiomFailure {
                sets: vec![s.clone()],
                values: vec![],
                detail: format!("{what}: {e}"),
            }),
        }
    };
    expect(&mut empty_null, &empty, &zero(), "μ(∅)");
    expect(&mut total_mass, &full, &one(), "μ(A)");

    let values: Vec<Option<MeasureValue>> = samples.iter().map(|s| mu.eval(s).ok()).collect();
    for (s, v) in samples.iter().zip(&values) {
        match v {
            Some(v) => {
                range.checked += 1;
                if !in_unit_interval(v) {
                    range.failures.push(AxiomFailure {
                        sets: vec![s.clone()],
                        values: vec![v.clone()],
                        detail: "value outside [0,1]".into(),
                    });
                }
            }
            None => range.skipped += 1,
        }
    }

    if !on_atoms {
        // Atom sets carry the indiscrete preorder and have no finite order
        // intervals, so this axiom is vacuous there.
        for _ in 0..samples.len().max(1) {
            let a: u64 = rng.gen_range(1..=200);
            let b = a + rng.gen_range(0..=60);
            expect(&mut intervals, &SetExpr::Fin((a..=b).collect()), &zero(), "μ([a,b])");
        }
    }

    let exact = |s: &SetExpr| -> Option<Q> { mu.eval(s).ok()?.exact().cloned() };

    let additive_pair = |res: &mut AxiomResult, s: &SetExpr, t: &SetExpr| {
        if s.has_predicates() || t.has_predicates() || mu.disjoint(s, t) != Some(true) {
            res.skipped += 1;
            return;
        }
        let st = SetExpr::union(s.clone(), t.clone());
        match (exact(s), exact(t), exact(&st)) {
            (Some(ms), Some(mt), Some(mst)) => {
                res.checked += 1;
                if &ms + &mt != mst {
                    res.failures.push(AxiomFailure {
                        sets: vec![s.clone(), t.clone()],
                        values: vec![MeasureValue::Exact(ms), MeasureValue::Exact(mt), MeasureValue::Exact(mst)],
                        detail: "μ(s ∪ t) ≠ μ(s) + μ(t) for disjoint s, t".into(),
                    });
                }
            }
            _ => res.skipped += 1,
        }
    };
    for (i, s) in samples.iter().enumerate() {
        additive_pair(&mut additivity, s, &SetExpr::complement(s.clone()));
        let j = rng.gen_range(0..samples.len());
        if j != i {
            let t = SetExpr::minus(samples[j].clone(), s.clone());
            additive_pair(&mut additivity, s, &t);
        }
    }

    for (i, b) in samples.iter().enumerate() {
        let j = rng.gen_range(0..samples.len());
        let c = SetExpr::inter(b.clone(), samples[j].clone());
        let nested = mu.disjoint(&c, &SetExpr::complement(b.clone()));
        if b.has_predicates() || samples[j].has_predicates() || nested != Some(true) {
            monotone.skipped += 1;
            continue;
        }
        // Null supersets are rare among random samples; pair each sample
        // with a finite (hence null) superset too.
        let finite_b = if on_atoms {
            SetExpr::listed([format!("x{i}"), format!("y{i}")])
        } else {
            SetExpr::Fin((1..=rng.gen_range(1..30)).collect())
        };
        let finite_c = SetExpr::inter(finite_b.clone(), b.clone());
        for (big, small) in [(b.clone(), c), (finite_b, finite_c)] {
            match (exact(&big), exact(&small)) {
                (Some(mb), Some(mc)) if mb == zero() => {
                    monotone.checked += 1;
                    if mc != zero() {
                        monotone.failures.push(AxiomFailure {
                            sets: vec![small, big],
                            values: vec![MeasureValue::Exact(mc), MeasureValue::Exact(mb)],
                            detail: "C ⊆ B and μ(B) = 0 but μ(C) ≠ 0".into(),
                        });
                    }
                }
                (Some(_), Some(_)) => {}
                _ => monotone.skipped += 1,
            }
        }
    }

    AxiomReport {
        measure: mu.name(),
        seed,
        axioms: vec![empty_null, total_mass, range, intervals, additivity, monotone],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_measure::Predicate;
    use crate::rational::q;

    #[test]
    fn cocountable_examples() {
        let mu = DirectedSetMeasure::CoCountable;
        assert_eq!(mu.eval(&SetExpr::listed(["a", "b", "c"])).unwrap(), MeasureValue::Exact(zero()));
        assert_eq!(mu.eval(&SetExpr::colisted(["a"])).unwrap(), MeasureValue::Exact(one()));
        let mixed = SetExpr::union(SetExpr::listed(["a"]), SetExpr::colisted(["a", "b"]));
        assert_eq!(mu.eval(&mixed).unwrap(), MeasureValue::Exact(one()));
        assert!(matches!(mu.eval(&SetExpr::evens()), Err(MeasureError::OutsideField(_))));
    }

    #[test]
    fn periodic_density_examples() {
        let mu = DirectedSetMeasure::PeriodicDensity;
        assert_eq!(mu.eval(&SetExpr::complement(SetExpr::evens())).unwrap(), MeasureValue::Exact(q(1, 2)));
        assert_eq!(mu.eval(&SetExpr::naturals()).unwrap(), MeasureValue::Exact(one()));
        assert!(matches!(mu.eval(&SetExpr::pred(Predicate::squares())), Err(MeasureError::OutsideField(_))));
        assert!(matches!(mu.eval(&SetExpr::listed(["a"])), Err(MeasureError::OutsideField(_))));
    }

    #[test]
    fn prefix_bounds_reduces_certified_nulls() {
        let mu = DirectedSetMeasure::prefix_bounds();
        let sq = SetExpr::pred(Predicate::squares());
        assert_eq!(mu.eval(&SetExpr::complement(sq.clone())).unwrap(), MeasureValue::Exact(one()));
        assert_eq!(mu.eval(&SetExpr::union(sq, SetExpr::evens())).unwrap(), MeasureValue::Exact(q(1, 2)));
        let osc = mu.eval(&SetExpr::pred(Predicate::Oscillating)).unwrap();
        assert!(matches!(osc, MeasureValue::Bounds { .. }));
    }

    #[test]
    fn conditional_density() {
        let mu = DirectedSetMeasure::conditional(SetExpr::evens()).unwrap();
        assert_eq!(mu.eval(&SetExpr::evens()).unwrap(), MeasureValue::Exact(one()));
        assert_eq!(mu.eval(&SetExpr::odds()).unwrap(), MeasureValue::Exact(zero()));
        assert_eq!(mu.eval(&SetExpr::ap(4, 4)).unwrap(), MeasureValue::Exact(q(1, 2)));
        assert!(DirectedSetMeasure::conditional(SetExpr::fin([2])).is_err());
    }

    #[test]
    fn finite_intervals_are_null_for_every_measure() {
        let interval = SetExpr::Fin((3..=40).collect());
        for mu in [
            DirectedSetMeasure::PeriodicDensity,
            DirectedSetMeasure::prefix_bounds(),
            DirectedSetMeasure::conditional(SetExpr::ap(1, 3)).unwrap(),
        ] {
            assert_eq!(mu.eval(&interval).unwrap(), MeasureValue::Exact(zero()), "{mu:?}");
        }
    }

    #[test]
    fn corrupted_measure_fails_additivity() {
        let evens = normalize(&SetExpr::evens()).unwrap();
        let mu = DirectedSetMeasure::custom("corrupted", move |s| {
            let n = normalize(s)?;
            Ok(MeasureValue::Exact(if n == evens { q(3, 4) } else { n.density() }))
        });
        let report = axioms_check(&mu, &[SetExpr::evens(), SetExpr::odds()], 1);
        let add = report.axiom("finite_additivity").unwrap();
        assert!(!add.passed());
        let witness = &add.failures[0];
        assert_eq!(witness.sets.len(), 2);
        assert!(!report.passed());
        assert!(report.axiom("total_mass").unwrap().passed());
    }

    #[test]
    fn cocountable_axioms_pass() {
        let samples: Vec<SetExpr> = (0..20)
            .map(|i| {
                let atoms = [format!("a{}", i % 5), format!("b{}", i % 3)];
                if i % 2 == 0 {
                    SetExpr::Listed(atoms.into_iter().collect())
                } else {
                    SetExpr::CoListed(atoms.into_iter().collect())
                }
            })
            .collect();
        let report = axioms_check(&DirectedSetMeasure::CoCountable, &samples, 7);
        assert!(report.passed(), "{report:?}");
        assert!(report.axiom("finite_additivity").unwrap().checked > 0);
    }
}
