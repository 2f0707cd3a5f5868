//! Asymptotic density: exact on eventually periodic sets, prefix-ratio
//! bounds elsewhere.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use super::periodic::normalize;
use super::set_expr::SetExpr;
use super::MeasureError;
use crate::rational::{fmt_q, Q};

/// Horizons at which prefix densities are sampled for sets without a
/// closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(Vec<u64>);

impl Default for Schedule {
    /// `2^10, 2^12, ..., 2^20`.
    fn default() -> Self {
        Schedule((10..=20).step_by(2).map(|e| 1u64 << e).collect())
    }
}

impl Schedule {
    /// Sorted, deduplicated, zero dropped.
    pub fn new(points: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = points.into_iter().filter(|&k| k >= 1).collect();
        v.sort_unstable();
        v.dedup();
        Schedule(v)
    }

    pub fn single(horizon: u64) -> Self {
        Schedule::new([horizon])
    }

    pub fn points(&self) -> &[u64] {
        &self.0
    }

    pub fn horizon(&self) -> Option<u64> {
        self.0.last().copied()
    }

    /// The trailing half of the schedule (at least one point) over which
    /// reported bounds are taken.
    pub fn window(&self) -> &[u64] {
        let m = self.0.len();
        &self.0[m / 2..]
    }
}

/// Value of a measure or density on one set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureValue {
    Exact(Q),
    /// Lim-inf / lim-sup estimates from prefix densities, with the largest
    /// horizon used.
    Bounds {
        lo: Q,
        hi: Q,
        horizon: u64,
    },
    Undetermined,
}

impl MeasureValue {
    pub fn exact(&self) -> Option<&Q> {
        match self {
            MeasureValue::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_exactly(&self, v: &Q) -> bool {
        self.exact() == Some(v)
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Exact(q) => write!(f, "{} (exact)", fmt_q(q)),
            MeasureValue::Bounds { lo, hi, horizon } => {
                write!(f, "bounds [{}, {}] at horizon {horizon}", fmt_q(lo), fmt_q(hi))
            }
            MeasureValue::Undetermined => f.write_str("undetermined"),
        }
    }
}

impl Serialize for MeasureValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn ratio(count: u64, k: u64) -> Q {
    Q::new(BigInt::from(count), BigInt::from(k))
}

/// Exactly `(1/k)·|s ∩ [1, k]|`.
pub fn prefix_density(s: &SetExpr, k: u64) -> Result<Q, MeasureError> {
    assert!(k >= 1, "prefix density needs k ≥ 1");
    match normalize(s) {
        Ok(p) => Ok(ratio(p.count_upto(k), k)),
        Err(MeasureError::NotPeriodic(_)) => Ok(ratio((1..=k).filter(|&n| s.contains_nat(n)).count() as u64, k)),
        Err(e) => Err(e),
    }
}

/// Prefix densities at every schedule point, from one scan.
pub fn prefix_densities(s: &SetExpr, schedule: &Schedule) -> Result<Vec<(u64, Q)>, MeasureError> {
    if let Ok(p) = normalize(s) {
        return Ok(schedule.points().iter().map(|&k| (k, ratio(p.count_upto(k), k))).collect());
    }
    if let Err(e @ (MeasureError::OutsideField(_) | MeasureError::PeriodTooLarge(_))) = normalize(s) {
        return Err(e);
    }
    let mut out = Vec::with_capacity(schedule.points().len());
    let mut count = 0u64;
    let mut n = 0u64;
    for &k in schedule.points() {
        while n < k {
            n += 1;
            if s.contains_nat(n) {
                count += 1;
            }
        }
        out.push((k, ratio(count, k)));
    }
    Ok(out)
}

/// Asymptotic density. Exact for eventually periodic sets; otherwise the
/// min/max of prefix densities over the trailing half of the schedule.
/// Sampled bounds never collapse to an exact value here, even when they
/// coincide.
pub fn density(s: &SetExpr, schedule: &Schedule) -> Result<MeasureValue, MeasureError> {
    match normalize(s) {
        Ok(p) => return Ok(MeasureValue::Exact(p.density())),
        Err(MeasureError::NotPeriodic(_)) => {}
        Err(e) => return Err(e),
    }
    sampled_bounds(s, schedule)
}

pub(crate) fn sampled_bounds(s: &SetExpr, schedule: &Schedule) -> Result<MeasureValue, MeasureError> {
    let Some(horizon) = schedule.horizon() else {
        return Ok(MeasureValue::Undetermined);
    };
    let window = Schedule::new(schedule.window().iter().copied());
    let values = prefix_densities(s, &window)?;
    let lo = values.iter().map(|(_, d)| d).min().cloned().expect("window is non-empty");
    let hi = values.iter().map(|(_, d)| d).max().cloned().expect("window is non-empty");
    Ok(MeasureValue::Bounds { lo, hi, horizon })
}

/// One refinement stage: running inf / sup of prefix densities over the
/// schedule points from `from` onwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityStage {
    pub from: u64,
    pub lo: Q,
    pub hi: Q,
}

/// Tail bounds at every stage of the schedule. `lo` never decreases and
/// `hi` never increases from one stage to the next.
pub fn density_trace(s: &SetExpr, schedule: &Schedule) -> Result<Vec<DensityStage>, MeasureError> {
    let values = prefix_densities(s, schedule)?;
    let mut stages: Vec<DensityStage> = Vec::with_capacity(values.len());
    for (k, d) in values.into_iter().rev() {
        let stage = match stages.last() {
            None => DensityStage { from: k, lo: d.clone(), hi: d },
            Some(prev) => DensityStage { from: k, lo: prev.lo.clone().min(d.clone()), hi: prev.hi.clone().max(d) },
        };
        stages.push(stage);
    }
    stages.reverse();
    Ok(stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_measure::Predicate;
    use crate::rational::{q, zero};

    #[test]
    fn exact_examples() {
        let sch = Schedule::default();
        assert_eq!(density(&SetExpr::evens(), &sch).unwrap(), MeasureValue::Exact(q(1, 2)));
        assert_eq!(density(&SetExpr::Fin((1..=100).collect()), &sch).unwrap(), MeasureValue::Exact(zero()));
        assert_eq!(density(&SetExpr::complement(SetExpr::ap(1, 3)), &sch).unwrap(), MeasureValue::Exact(q(2, 3)));
    }

    #[test]
    fn squares_at_one_million() {
        // Oracle: there are exactly 1000 squares in [1, 10^6].
        let sq = SetExpr::pred(Predicate::squares());
        match density(&sq, &Schedule::single(1_000_000)).unwrap() {
            MeasureValue::Bounds { hi, horizon, .. } => {
                assert_eq!(horizon, 1_000_000);
                assert!(hi <= q(1, 1000));
            }
            other => panic!("expected bounds, got {other}"),
        }
    }

    #[test]
    fn prefix_density_examples() {
        assert_eq!(prefix_density(&SetExpr::evens(), 10).unwrap(), q(1, 2));
        // Oracle: squares ≤ 100 are 1,4,...,100, ten of them.
        let sq = SetExpr::pred(Predicate::squares());
        let brute = (1..=100u64).filter(|n| (1..=10u64).any(|m| m * m == *n)).count() as i64;
        assert_eq!(brute, 10);
        assert_eq!(prefix_density(&sq, 100).unwrap(), q(brute, 100));
        assert_eq!(prefix_density(&SetExpr::empty(), 7).unwrap(), zero());
    }

    #[test]
    fn oscillating_density_is_exposed() {
        let osc = SetExpr::pred(Predicate::Oscillating);
        match density(&osc, &Schedule::default()).unwrap() {
            MeasureValue::Bounds { lo, hi, .. } => {
                assert!(lo < q(1, 4), "lo = {lo}");
                assert!(hi > q(3, 4), "hi = {hi}");
            }
            other => panic!("expected bounds, got {other}"),
        }
    }

    #[test]
    fn trace_is_monotone() {
        for s in [
            SetExpr::pred(Predicate::squares()),
            SetExpr::pred(Predicate::Oscillating),
            SetExpr::union(SetExpr::pred(Predicate::Primes), SetExpr::ap(3, 5)),
        ] {
            let t = density_trace(&s, &Schedule::default()).unwrap();
            for w in t.windows(2) {
                assert!(w[0].lo <= w[1].lo && w[0].hi >= w[1].hi);
            }
        }
    }

    #[test]
    fn empty_schedule_is_undetermined() {
        let sq = SetExpr::pred(Predicate::squares());
        assert_eq!(density(&sq, &Schedule::new([])).unwrap(), MeasureValue::Undetermined);
    }

    #[test]
    fn listed_sets_are_not_subsets_of_the_naturals() {
        assert!(matches!(density(&SetExpr::listed(["a"]), &Schedule::default()), Err(MeasureError::OutsideField(_))));
    }
}
