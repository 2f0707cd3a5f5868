//! Convergence checkers. Each one checks an initial segment explicitly and
//! decides the rest of ℕ on the closed forms, so an acceptance covers every
//! index.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::net::{IndexMap, Net, TailRule};
use super::symbolic::{compile, TailForm};
use super::NetError;
use crate::index_measure::{
    certainly_empty, certainly_infinite, finite_bound, normalize, DirectedSetMeasure, MeasureValue, SetExpr,
};
use crate::lattice::{Element, LatticeError};
use crate::rational::{one, qu, Q};
use crate::verdict::{Clause, Evidence, Verdict};

/// Indices checked explicitly even when the closed forms settle earlier.
pub const DEFAULT_HORIZON: u64 = 32;
/// Explicit checking beyond this index is refused as undetermined.
pub const EXPLICIT_CAP: u64 = 1 << 16;
/// How far past the explicit segment concrete violations are searched for.
const SCAN_SPAN: u64 = 1 << 20;
/// Consecutive pairs evaluated when the closed forms cannot show decrease.
const PAIR_SCAN: u64 = 1 << 12;

/// A candidate dominating net `p` with the measure-one set `Δ` on which
/// it decreases to 0 and dominates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub p: Net,
    pub delta: SetExpr,
}

fn cap(t: u64) -> Result<u64, NetError> {
    if t > EXPLICIT_CAP {
        Err(NetError::Undetermined(format!("explicit segment up to {t} exceeds the cap {EXPLICIT_CAP}")))
    } else {
        Ok(t)
    }
}

fn first_in(set: &SetExpr, after: u64) -> Option<u64> {
    (after + 1..=after + SCAN_SPAN).find(|&n| set.contains_nat(n))
}

/// `net(n)`, through the closed forms when they apply.
fn value_at(net: &Net, form: &TailForm, n: u64) -> Element {
    if n >= form.start {
        if let Some(v) = form.eval(net.space(), n) {
            return v;
        }
    }
    net.eval(n)
}

/// Outcome of deciding `net(n) ≥ 0` for all `n ∈ Δ`.
struct Nonneg {
    /// Indices `≤ threshold` were evaluated directly.
    threshold: u64,
    bad: Vec<u64>,
    /// Regions of `Δ` where the value is eventually not positive, with a
    /// flag for a negative moving coordinate.
    bad_regions: Vec<(SetExpr, bool)>,
}

impl Nonneg {
    /// First concrete violation and whether it comes from a moving
    /// coordinate.
    fn first_violation(&self) -> Result<Option<(u64, bool)>, NetError> {
        if let Some(&n) = self.bad.first() {
            let moving = self.bad_regions.iter().any(|(r, m)| *m && r.contains_nat(n));
            return Ok(Some((n, moving)));
        }
        let mut best: Option<(u64, bool)> = None;
        for (region, moving) in &self.bad_regions {
            if let Some(n) = first_in(region, self.threshold) {
                if best.is_none_or(|(b, _)| n < b) {
                    best = Some((n, *moving));
                }
            }
        }
        match (best, self.bad_regions.is_empty()) {
            (Some(v), _) => Ok(Some(v)),
            (None, true) => Ok(None),
            (None, false) => {
                Err(NetError::Undetermined("eventual violation region has no element within the scan".into()))
            }
        }
    }
}

fn nonneg(net: &Net, delta: &SetExpr, horizon: u64) -> Result<Nonneg, NetError> {
    let form = compile(net)?;
    let mut threshold = (form.start - 1).max(horizon);
    let mut bad_regions = Vec::new();
    for piece in &form.pieces {
        let region = SetExpr::inter(piece.cell.clone(), delta.clone());
        if let Some(b) = finite_bound(&region) {
            threshold = threshold.max(b);
            continue;
        }
        let mut bad = false;
        for t in piece.value.coords.values() {
            let (s, n0) = t.eventual_sign().ok_or_else(|| NetError::Undetermined(format!("sign of {t}")))?;
            threshold = threshold.max(n0 - 1);
            bad |= s.is_lt();
        }
        let mut moving_bad = false;
        if let Some(m) = &piece.value.moving {
            let (s, n0) =
                m.term.eventual_sign().ok_or_else(|| NetError::Undetermined(format!("sign of {}", m.term)))?;
            threshold = threshold.max(n0 - 1);
            moving_bad = s.is_lt();
        }
        if bad || moving_bad {
            bad_regions.push((region, moving_bad));
        }
    }
    let threshold = cap(threshold)?;
    let bad = (1..=threshold).filter(|&n| delta.contains_nat(n) && !value_at(net, &form, n).is_positive()).collect();
    Ok(Nonneg { threshold, bad, bad_regions })
}

/// `p − |net − x|`.
fn domination_gap(net: &Net, x: &Element, p: &Net) -> Result<Net, NetError> {
    p.sub(&net.minus_element(x)?.abs())
}

enum Decrease {
    Yes { threshold: u64, infimum: Option<Element> },
    No { pair: (u64, u64) },
}

fn relevant<'a>(form: &'a TailForm, delta: &SetExpr, threshold: &mut u64) -> Vec<&'a super::symbolic::Piece> {
    let mut out = Vec::new();
    for p in &form.pieces {
        match finite_bound(&SetExpr::inter(p.cell.clone(), delta.clone())) {
            Some(b) => *threshold = (*threshold).max(b),
            None => out.push(p),
        }
    }
    out
}

fn decrease(net: &Net, delta: &SetExpr, horizon: u64) -> Result<Decrease, NetError> {
    let form = compile(net)?;
    let mut threshold = (form.start - 1).max(horizon);
    let pieces = relevant(&form, delta, &mut threshold);
    // Pieces A, B eventually satisfy f_A(m) ≥ f_B(m+1); with A = B this
    // makes each f_B non-increasing, and together every later value on B
    // lies below every earlier value on A.
    let mut sufficient = pieces.iter().all(|p| p.value.moving.is_none());
    let zero = super::term::Term::default();
    'pairs: for a in &pieces {
        for b in &pieces {
            if !sufficient {
                break 'pairs;
            }
            let keys: std::collections::BTreeSet<u64> =
                a.value.coords.keys().chain(b.value.coords.keys()).copied().collect();
            for k in keys {
                let fa = a.value.coords.get(&k).unwrap_or(&zero);
                let fb = b.value.coords.get(&k).unwrap_or(&zero);
                match super::term::Term::step_gap_sign(fa, fb) {
                    Some((s, n0)) if !s.is_lt() => threshold = threshold.max(n0),
                    _ => {
                        sufficient = false;
                        break 'pairs;
                    }
                }
            }
        }
    }
    let threshold = cap(threshold)?;
    let scan_to = if sufficient { threshold } else { threshold + PAIR_SCAN };
    let mut prev: Option<(u64, Element)> = None;
    let mut linked = false;
    for n in 1..=scan_to + SCAN_SPAN {
        if !delta.contains_nat(n) {
            continue;
        }
        let v = value_at(net, &form, n);
        if let Some((m, pv)) = &prev {
            if !v.leq(pv)? {
                return Ok(Decrease::No { pair: (*m, n) });
            }
        }
        prev = Some((n, v));
        // One element past the explicit segment links it to the tail.
        if n > scan_to {
            linked = true;
            break;
        }
    }
    if !sufficient || !linked {
        return Err(NetError::Undetermined(format!(
            "no violating pair up to {scan_to}, but the closed forms do not show decrease"
        )));
    }
    let mut limit: Option<BTreeMap<u64, Q>> = None;
    let mut agree = true;
    for p in &pieces {
        let c: BTreeMap<u64, Q> =
            p.value.coords.iter().filter(|(_, t)| !t.c.is_zero()).map(|(k, t)| (*k, t.c.clone())).collect();
        match &limit {
            None => limit = Some(c),
            Some(l) => agree &= *l == c,
        }
    }
    let infimum = match (agree, limit) {
        (true, Some(l)) => Some(net.space().from_coords(l)),
        _ => None,
    };
    Ok(Decrease::Yes { threshold, infimum })
}

fn check_delta(delta: &SetExpr) -> Result<Option<Verdict>, NetError> {
    if certainly_empty(delta) {
        return Err(NetError::EmptyDelta(delta.clone()));
    }
    Ok(finite_bound(delta).map(|b| {
        Verdict::reject(Evidence::new(Clause::Cofinality, b).set(delta.clone()).note("Δ is finite, hence not cofinal"))
    }))
}

/// Whether `net` decreases along the enumeration of `Δ`.
pub fn is_decreasing_on(net: &Net, delta: &SetExpr, horizon: u64) -> Result<Verdict, NetError> {
    if let Some(v) = check_delta(delta)? {
        return Ok(v);
    }
    Ok(match decrease(net, delta, horizon)? {
        Decrease::Yes { threshold, .. } => Verdict::accept(Evidence::new(Clause::Decreasing, threshold)),
        Decrease::No { pair } => Verdict::reject(Evidence::new(Clause::Decreasing, horizon).pair(pair.0, pair.1)),
    })
}

/// Infimum of `net` along `Δ`, for a net decreasing there. `None` when the
/// closed forms do not pin it down.
pub fn infimum_on(net: &Net, delta: &SetExpr, horizon: u64) -> Result<Option<Element>, NetError> {
    if check_delta(delta)?.is_some() {
        return Err(NetError::NotDecreasing(format!("{delta} is finite")));
    }
    match decrease(net, delta, horizon)? {
        Decrease::Yes { infimum, .. } => Ok(infimum),
        Decrease::No { pair } => Err(NetError::NotDecreasing(format!("violating pair {pair:?}"))),
    }
}

fn same_space(net: &Net, x: &Element) -> Result<(), NetError> {
    if net.space() == x.space() {
        Ok(())
    } else {
        Err(LatticeError::SpaceMismatch(net.space(), x.space()).into())
    }
}

/// Order convergence: `y` decreases on ℕ with infimum 0 and
/// `|x_n − x| ≤ y_n` for every `n`.
pub fn check_order_conv(net: &Net, x: &Element, y: &Net) -> Result<Verdict, NetError> {
    same_space(net, x)?;
    same_space(y, x)?;
    let full = SetExpr::naturals();
    let dom = nonneg(&domination_gap(net, x, y)?, &full, DEFAULT_HORIZON)?;
    let violation = dom.first_violation()?;
    if let Some((n, true)) = violation {
        return Ok(Verdict::reject(
            Evidence::new(Clause::Unbounded, dom.threshold)
                .index(n)
                .note("the net's mass moves to ever later coordinates; no element of the space bounds it"),
        ));
    }
    match decrease(y, &full, DEFAULT_HORIZON)? {
        Decrease::No { pair } => {
            Ok(Verdict::reject(Evidence::new(Clause::Decreasing, DEFAULT_HORIZON).pair(pair.0, pair.1)))
        }
        Decrease::Yes { infimum, threshold } => match infimum {
            Some(i) if i.is_zero() => {
                if let Some((n, _)) = violation {
                    return Ok(Verdict::reject(Evidence::new(Clause::Domination, dom.threshold).index(n)));
                }
                Ok(Verdict::accept(Evidence::new(Clause::Domination, dom.threshold.max(threshold)).infimum(i)))
            }
            Some(i) => Ok(Verdict::reject(Evidence::new(Clause::Infimum, threshold).infimum(i))),
            None => Err(NetError::Undetermined("infimum of the dominating net".into())),
        },
    }
}

fn measure_one(mu: &DirectedSetMeasure, delta: &SetExpr) -> Result<Result<(), Verdict>, NetError> {
    match mu.eval(delta)? {
        MeasureValue::Exact(v) if v == one() => Ok(Ok(())),
        m @ MeasureValue::Exact(_) => {
            Ok(Err(Verdict::reject(Evidence::new(Clause::Measure, 0).measure(m).set(delta.clone()))))
        }
        m => Err(NetError::UndeterminedMeasure { set: delta.clone(), value: Box::new(m) }),
    }
}

/// `μ(Δ) = 1` and `p` decreases along `Δ` with infimum `x`.
pub fn check_st_decreasing(
    p: &Net,
    x: &Element,
    delta: &SetExpr,
    mu: &DirectedSetMeasure,
) -> Result<Verdict, NetError> {
    same_space(p, x)?;
    if let Err(v) = measure_one(mu, delta)? {
        return Ok(v);
    }
    if let Some(v) = check_delta(delta)? {
        return Ok(v);
    }
    let measure = MeasureValue::Exact(one());
    match decrease(p, delta, DEFAULT_HORIZON)? {
        Decrease::No { pair } => Ok(Verdict::reject(
            Evidence::new(Clause::Decreasing, DEFAULT_HORIZON).pair(pair.0, pair.1).measure(measure),
        )),
        Decrease::Yes { infimum: None, .. } => Err(NetError::Undetermined("infimum along Δ".into())),
        Decrease::Yes { infimum: Some(i), threshold } => {
            let ev = Evidence::new(Clause::Infimum, threshold).measure(measure).infimum(i.clone());
            Ok(if &i == x { Verdict::accept(ev) } else { Verdict::reject(ev) })
        }
    }
}

/// Statistical order convergence with the shared set `Δ`: `p` decreases
/// to 0 along `Δ`, `μ(Δ) = 1`, and `|x_δ − x| ≤ p_δ` for every `δ ∈ Δ`.
pub fn check_st_order_conv(net: &Net, x: &Element, w: &Witness, mu: &DirectedSetMeasure) -> Result<Verdict, NetError> {
    same_space(net, x)?;
    let v = check_st_decreasing(&w.p, &net.space().zero(), &w.delta, mu)?;
    if !v.accepted {
        return Ok(v);
    }
    let dom = nonneg(&domination_gap(net, x, &w.p)?, &w.delta, DEFAULT_HORIZON)?;
    let horizon = dom.threshold.max(v.evidence.horizon);
    let measure = MeasureValue::Exact(one());
    Ok(match dom.first_violation()? {
        Some((n, moving)) => Verdict::reject(
            Evidence::new(if moving { Clause::Unbounded } else { Clause::Domination }, horizon)
                .index(n)
                .measure(measure),
        ),
        None => Verdict::accept(Evidence::new(Clause::Domination, horizon).measure(measure)),
    })
}

/// `{n : |x_n − x| ≰ p_n}`, as a set expression. Eventually periodic
/// results are returned in canonical form.
pub fn exceptional_set(net: &Net, x: &Element, p: &Net) -> Result<SetExpr, NetError> {
    same_space(net, x)?;
    let analysis = nonneg(&domination_gap(net, x, p)?, &SetExpr::naturals(), 0)?;
    let regions = analysis.bad_regions.iter().map(|(r, _)| r.clone()).fold(SetExpr::empty(), SetExpr::union);
    let t = analysis.threshold;
    // Prefer the bare regions when they already agree with the explicit
    // segment.
    let bare_ok = (1..=t).all(|n| regions.contains_nat(n) == analysis.bad.binary_search(&n).is_ok());
    let set = if bare_ok {
        regions
    } else {
        SetExpr::union(SetExpr::fin(analysis.bad.iter().copied()), SetExpr::inter(regions, SetExpr::at_least(t + 1)))
    };
    Ok(match normalize(&set) {
        Ok(n) => n.to_set_expr(),
        Err(_) => set,
    })
}

/// Relatively uniform convergence with regulator `u`: for each
/// `m ≤ horizon` some `α_m` has `|x_n − x| ≤ (1/m)u` for all `n ≥ α_m`.
pub fn ru_check(net: &Net, x: &Element, u: &Element, horizon: u64) -> Result<Verdict, NetError> {
    same_space(net, x)?;
    if !u.is_positive() {
        return Err(NetError::NotPositive(u.to_string()));
    }
    let horizon = horizon.max(1);
    let mut alphas = Vec::new();
    let mut reach = 0;
    for m in 1..=horizon {
        let bound = Net::constant(u.scale(&(one() / qu(m))));
        let a = nonneg(&domination_gap(net, x, &bound)?, &SetExpr::naturals(), 0)?;
        reach = reach.max(a.threshold);
        if !a.bad_regions.is_empty() {
            let tail = Nonneg { bad: Vec::new(), ..a };
            let (n, moving) = tail.first_violation()?.expect("non-empty regions yield a violation or an error");
            return Ok(Verdict::reject(
                Evidence::new(if moving { Clause::Unbounded } else { Clause::Regulator }, reach)
                    .index(n)
                    .note(format!("|x_n − x| ≤ (1/{m})u fails at indices beyond every bound")),
            ));
        }
        alphas.push(a.bad.last().map_or(1, |b| b + 1));
    }
    let shown: Vec<String> = alphas.iter().enumerate().take(8).map(|(i, a)| format!("α_{} = {a}", i + 1)).collect();
    Ok(Verdict::accept(Evidence::new(Clause::Regulator, reach).note(format!(
        "{}{}",
        shown.join(", "),
        if alphas.len() > 8 { format!(", ..., α_{horizon} = {}", alphas[alphas.len() - 1]) } else { String::new() }
    ))))
}

/// How a subnet picks its indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    /// Restriction to `Δ ⊆ ℕ`, in increasing order.
    Inclusion(SetExpr),
    /// Composition with a monotone map.
    Map(IndexMap),
}

/// `n ↦ net(t(n))` with its cofinality verdict.
pub fn subnet(net: &Net, selector: &Selector, horizon: u64) -> Result<(Net, Verdict), NetError> {
    let map = match selector {
        Selector::Inclusion(delta) => {
            if let Some(b) = finite_bound(delta) {
                return Err(NetError::NotCofinal { alpha: b + 1 });
            }
            if !certainly_infinite(delta) {
                return Err(NetError::Undetermined(format!("whether {delta} is infinite")));
            }
            IndexMap::Enumerate(delta.clone())
        }
        Selector::Map(m) => m.clone(),
    };
    if let IndexMap::Affine { mul: 0, add } = map {
        return Err(NetError::NotCofinal { alpha: add + 1 });
    }
    // Every map here is strictly increasing, so t(β) ≥ α from the first β
    // with t(β) ≥ α onwards. Those β are computed for α ≤ horizon.
    let mut beta = 1;
    let mut last = 0;
    for alpha in 1..=horizon {
        while map.apply(beta) < alpha {
            beta += 1;
        }
        last = beta;
    }
    let sub = Net::from_tail(net.space(), TailRule::Reindexed { source: Box::new(net.clone()), map: map.clone() })?;
    let verdict = Verdict::accept(
        Evidence::new(Clause::Cofinality, horizon)
            .note(format!("t = {map} is strictly increasing; β_α = {last} for α = {horizon}")),
    );
    Ok((sub, verdict))
}
