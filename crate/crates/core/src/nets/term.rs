//! Closed-form scalar tails `c + h/n + Σ g_r·rⁿ` and exact eventual-sign
//! analysis of sums of monomials `a·nᵉ·rⁿ`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{fmt_q, one, pow, qu, zero, Q};

/// Thresholds beyond this are not searched for; the analysis reports
/// `None` instead.
pub const THRESHOLD_CAP: u64 = 1 << 20;

/// `c + h/n + Σ g_r·rⁿ` with every ratio in `(0, 1)`. No zero
/// coefficients are stored in `geo`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Term {
    pub c: Q,
    pub h: Q,
    pub geo: BTreeMap<Q, Q>,
}

impl Term {
    pub fn constant(c: Q) -> Self {
        Term { c, ..Term::default() }
    }

    pub fn harmonic(h: Q) -> Self {
        Term { h, ..Term::default() }
    }

    pub fn geometric(g: Q, r: Q) -> Self {
        let mut t = Term::default();
        if !g.is_zero() {
            t.geo.insert(r, g);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.h.is_zero() && self.geo.is_empty()
    }

    pub fn eval(&self, n: u64) -> Q {
        let nq = qu(n);
        let mut v = &self.c + &self.h / &nq;
        for (r, g) in &self.geo {
            v += g * pow(r, n);
        }
        v
    }

    pub fn add(&self, o: &Term) -> Term {
        let mut geo = self.geo.clone();
        for (r, g) in &o.geo {
            let e = geo.entry(r.clone()).or_insert_with(zero);
            *e += g;
            if e.is_zero() {
                geo.remove(r);
            }
        }
        Term { c: &self.c + &o.c, h: &self.h + &o.h, geo }
    }

    pub fn scale(&self, q: &Q) -> Term {
        if q.is_zero() {
            return Term::default();
        }
        Term { c: &self.c * q, h: &self.h * q, geo: self.geo.iter().map(|(r, g)| (r.clone(), g * q)).collect() }
    }

    pub fn neg(&self) -> Term {
        self.scale(&-one())
    }

    pub fn sub(&self, o: &Term) -> Term {
        self.add(&o.neg())
    }

    /// `n · t(n)` as monomials; same sign as `t` for `n ≥ 1`.
    fn times_n(&self) -> ExpPoly {
        let mut p = ExpPoly::default();
        p.push(self.c.clone(), 1, one());
        p.push(self.h.clone(), 0, one());
        for (r, g) in &self.geo {
            p.push(g.clone(), 1, r.clone());
        }
        p
    }

    /// Eventual sign of `t(n)` and an index from which it holds.
    pub fn eventual_sign(&self) -> Option<(Ordering, u64)> {
        self.times_n().eventual_sign()
    }

    /// Eventual sign of `f(m) − g(m + 1)`: positive or zero means `f`
    /// eventually dominates `g` one step later.
    pub fn step_gap_sign(f: &Term, g: &Term) -> Option<(Ordering, u64)> {
        // m(m+1)·(f(m) − g(m+1)), expanded into monomials.
        let mut p = ExpPoly::default();
        let dc = &f.c - &g.c;
        p.push(dc.clone(), 2, one());
        p.push(dc + &f.h - &g.h, 1, one());
        p.push(f.h.clone(), 0, one());
        let ratios: std::collections::BTreeSet<&Q> = f.geo.keys().chain(g.geo.keys()).collect();
        for r in ratios {
            let z = zero();
            let a = f.geo.get(r).unwrap_or(&z) - g.geo.get(r).unwrap_or(&z) * r;
            p.push(a.clone(), 2, r.clone());
            p.push(a, 1, r.clone());
        }
        p.eventual_sign()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.c.is_zero() {
            parts.push(fmt_q(&self.c));
        }
        if !self.h.is_zero() {
            parts.push(format!("{}/n", fmt_q(&self.h)));
        }
        for (r, g) in &self.geo {
            parts.push(format!("{}·({})^n", fmt_q(g), fmt_q(r)));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `Σ a·nᵉ·rⁿ` with `r ∈ (0, 1]`, keyed by `(r, e)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpPoly {
    terms: BTreeMap<(Q, u32), Q>,
}

/// Smallest `m ≥ from` with `pred(m)`, for a predicate that stays true once
/// true. `None` if that point exceeds [`THRESHOLD_CAP`].
fn first_true(from: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if pred(from) {
        return Some(from);
    }
    let mut lo = from;
    let mut step = 1u64;
    let hi = loop {
        let probe = from + step;
        if probe > THRESHOLD_CAP {
            return None;
        }
        if pred(probe) {
            break probe;
        }
        lo = probe;
        step *= 2;
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn int_pow(m: u64, e: i64) -> Q {
    let p = pow(&qu(m), e.unsigned_abs());
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

impl ExpPoly {
    pub fn push(&mut self, coef: Q, e: u32, r: Q) {
        if coef.is_zero() {
            return;
        }
        let key = (r, e);
        let v = self.terms.entry(key.clone()).or_insert_with(zero);
        *v += coef;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn eval(&self, m: u64) -> Q {
        self.terms.iter().map(|((r, e), a)| a * pow(&qu(m), *e as u64) * pow(r, m)).fold(zero(), |acc, x| acc + x)
    }

    /// `(sign, N)` such that the sum has that sign for every `n ≥ N`.
    /// The leading monomial (largest `r`, then largest `e`) wins once the
    /// others, relative to it, are non-increasing and sum below it in
    /// absolute value; both conditions are found by exact search.
    pub fn eventual_sign(&self) -> Option<(Ordering, u64)> {
        let Some(((r0, e0), a0)) = self.terms.iter().next_back() else {
            return Some((Ordering::Equal, 1));
        };
        let sign = if a0.is_positive() { Ordering::Greater } else { Ordering::Less };
        let rest: Vec<(Q, i64, Q)> =
            self.terms.iter().rev().skip(1).map(|((r, e), a)| (r / r0, *e as i64 - *e0 as i64, a.abs())).collect();
        if rest.is_empty() {
            return Some((sign, 1));
        }
        // ratio_i(m) = m^k · s^m with (s, k) < (1, 0); it is non-increasing
        // from m on iff (m+1)^k · s ≤ m^k, which stays true once true.
        let mut start = 1;
        for (s, k, _) in &rest {
            if *k > 0 {
                let k = *k as u64;
                let from = first_true(1, |m| pow(&qu(m + 1), k) * s <= pow(&qu(m), k))?;
                start = start.max(from);
            }
        }
        let lead = a0.abs();
        let n0 = first_true(start, |m| {
            let total = rest.iter().map(|(s, k, a)| a * int_pow(m, *k) * pow(s, m)).fold(zero(), |acc, x| acc + x);
            total < lead
        })?;
        Some((sign, n0))
    }
}

/// Sign of a rational as an ordering against zero.
pub fn sign_of(x: &Q) -> Ordering {
    if x.is_zero() {
        Ordering::Equal
    } else if x > &Q::zero() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

pub(crate) fn is_unit_ratio(r: &Q) -> bool {
    r > &Q::zero() && r < &Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    /// Brute-force oracle: the sign holds on `[n0, n0 + span)`, and `n0`
    /// is returned as a threshold, so it must be exact from there on.
    fn sign_holds(t: &Term, sign: Ordering, n0: u64, span: u64) -> bool {
        (n0..n0 + span).all(|n| sign_of(&t.eval(n)) == sign)
    }

    #[test]
    fn harmonic_against_geometric() {
        // 1/n − 8·(1/2)^n: negative for small n, positive from n = 6 on.
        let t = Term::harmonic(one()).add(&Term::geometric(qi(-8), q(1, 2)));
        let (s, n0) = t.eventual_sign().unwrap();
        assert_eq!(s, Ordering::Greater);
        assert!(sign_holds(&t, s, n0, 200));
        let first_pos = (1..100).find(|&n| (n..200).all(|m| t.eval(m) > zero())).unwrap();
        assert!(n0 >= first_pos);
    }

    #[test]
    fn constant_dominates() {
        let t = Term::constant(q(1, 10)).add(&Term::harmonic(qi(-3)));
        let (s, n0) = t.eventual_sign().unwrap();
        assert_eq!(s, Ordering::Greater);
        assert!(n0 <= 31);
        assert!(sign_holds(&t, s, n0, 500));
        assert!(t.eval(30) == zero());
    }

    #[test]
    fn zero_term() {
        let t = Term::harmonic(one()).sub(&Term::harmonic(one()));
        assert_eq!(t.eventual_sign(), Some((Ordering::Equal, 1)));
    }

    #[test]
    fn harmonic_is_step_decreasing() {
        let u = Term::harmonic(qi(2));
        let (s, _) = Term::step_gap_sign(&u, &u).unwrap();
        assert_eq!(s, Ordering::Greater);
        let c = Term::constant(qi(3));
        assert_eq!(Term::step_gap_sign(&c, &c).unwrap().0, Ordering::Equal);
        let neg = Term::harmonic(qi(-1));
        assert_eq!(Term::step_gap_sign(&neg, &neg).unwrap().0, Ordering::Less);
    }

    #[test]
    fn step_gap_matches_brute_force() {
        let f = Term::harmonic(one()).add(&Term::geometric(qi(3), q(2, 3)));
        let g = Term::harmonic(qi(2));
        let (s, n0) = Term::step_gap_sign(&f, &g).unwrap();
        for m in n0..n0 + 200 {
            assert_eq!(sign_of(&(f.eval(m) - g.eval(m + 1))), s, "m = {m}");
        }
    }

    #[test]
    fn polynomial_times_geometric() {
        // n²·(9/10)^n − 1/1000: eventually negative.
        let mut p = ExpPoly::default();
        p.push(one(), 2, q(9, 10));
        p.push(q(-1, 1000), 0, one());
        let (s, n0) = p.eventual_sign().unwrap();
        assert_eq!(s, Ordering::Less);
        for m in n0..n0 + 100 {
            assert!(p.eval(m) < zero());
        }
        assert!(p.eval(n0 - 1) >= zero());
    }
}
