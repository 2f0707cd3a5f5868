//! Finitely described nets over ℕ: an explicit prefix followed by a
//! closed-form tail rule.

use std::fmt;

use super::NetError;
use crate::index_measure::{DirectedIndex, SetExpr, SetKind};
use crate::lattice::{Element, RieszSpace};
use crate::rational::{fmt_q, one, pow, qu, Q};

/// Largest index scanned when enumerating a set for a reindexed net.
pub const ENUMERATION_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Sup,
    Inf,
}

impl BinOp {
    pub fn apply(&self, a: &Element, b: &Element) -> Element {
        match self {
            BinOp::Add => a.add(b),
            BinOp::Sub => a.sub(b),
            BinOp::Sup => a.sup(b),
            BinOp::Inf => a.inf(b),
        }
        .expect("operands validated to share a space")
    }

    pub fn name(&self) -> &'static str {
        match self {
            BinOp::Add => "add",
            BinOp::Sub => "sub",
            BinOp::Sup => "sup",
            BinOp::Inf => "inf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnOp {
    Scale(Q),
    Neg,
    Abs,
}

impl UnOp {
    pub fn apply(&self, a: &Element) -> Element {
        match self {
            UnOp::Scale(q) => a.scale(q),
            UnOp::Neg => a.neg(),
            UnOp::Abs => a.abs(),
        }
    }
}

/// A strictly increasing map `t: ℕ → ℕ` used to form subnets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexMap {
    /// `k ↦ mul·k + add`.
    Affine { mul: u64, add: u64 },
    /// `k ↦ k^e`.
    Power(u32),
    /// `k ↦` the `k`-th smallest element of an infinite set.
    Enumerate(SetExpr),
}

impl IndexMap {
    pub fn apply(&self, k: u64) -> u64 {
        match self {
            IndexMap::Affine { mul, add } => mul * k + add,
            IndexMap::Power(e) => k.pow(*e),
            IndexMap::Enumerate(s) => s
                .nth_scan(k, ENUMERATION_LIMIT)
                .unwrap_or_else(|| panic!("{k}-th element of {s} lies beyond the enumeration limit")),
        }
    }
}

impl fmt::Display for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexMap::Affine { mul, add } => write!(f, "affine({mul},{add})"),
            IndexMap::Power(e) => write!(f, "pow({e})"),
            IndexMap::Enumerate(s) => write!(f, "enum({s})"),
        }
    }
}

/// The value of a net beyond its prefix, as a function of the index `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule {
    Constant(Element),
    /// `(1/n)·u`.
    Harmonic(Element),
    /// `rⁿ·u`, `0 < r < 1`.
    Geometric(Element, Q),
    /// `spike` on `set`, `base` elsewhere.
    SpikeOn {
        set: SetExpr,
        spike: Element,
        base: Box<TailRule>,
    },
    /// `inner` on `set`, zero elsewhere.
    Masked {
        set: SetExpr,
        inner: Box<TailRule>,
    },
    /// Finitely supported sequences only: index `offset + (k−1)·period`
    /// carries `e_k`, every other index carries 0. With `(1, 2)` this is
    /// `(e₁, 0, e₂, 0, e₃, ...)`.
    UnitSweep {
        offset: u64,
        period: u64,
    },
    Combine {
        op: BinOp,
        a: Box<TailRule>,
        b: Box<TailRule>,
    },
    Unary {
        op: UnOp,
        a: Box<TailRule>,
    },
    /// `n ↦ source(t(n))`. Evaluated exactly but opaque to the symbolic
    /// checkers.
    Reindexed {
        source: Box<Net>,
        map: IndexMap,
    },
}

impl TailRule {
    pub fn eval(&self, n: u64) -> Element {
        match self {
            TailRule::Constant(v) => v.clone(),
            TailRule::Harmonic(u) => u.scale(&(one() / qu(n))),
            TailRule::Geometric(u, r) => u.scale(&pow(r, n)),
            TailRule::SpikeOn { set, spike, base } => {
                if set.contains_nat(n) {
                    spike.clone()
                } else {
                    base.eval(n)
                }
            }
            TailRule::Masked { set, inner } => {
                let v = inner.eval(n);
                if set.contains_nat(n) {
                    v
                } else {
                    v.space().zero()
                }
            }
            TailRule::UnitSweep { offset, period } => {
                if n >= *offset && (n - offset).is_multiple_of(*period) {
                    Element::unit((n - offset) / period + 1)
                } else {
                    RieszSpace::FinSuppSeq.zero()
                }
            }
            TailRule::Combine { op, a, b } => op.apply(&a.eval(n), &b.eval(n)),
            TailRule::Unary { op, a } => op.apply(&a.eval(n)),
            TailRule::Reindexed { source, map } => source.eval(map.apply(n)),
        }
    }

    /// Pointwise `op`, simplified where the result has a simpler closed
    /// form.
    pub fn combine(op: BinOp, a: TailRule, b: TailRule) -> TailRule {
        use TailRule::*;
        let simplified = match (op, &a, &b) {
            (BinOp::Add | BinOp::Sub | BinOp::Sup | BinOp::Inf, Constant(x), Constant(y)) => {
                Some(Constant(op.apply(x, y)))
            }
            (BinOp::Add | BinOp::Sub, Harmonic(u), Harmonic(v)) => Some(Harmonic(op.apply(u, v))),
            (BinOp::Add | BinOp::Sub, Geometric(u, r), Geometric(v, s)) if r == s => {
                Some(Geometric(op.apply(u, v), r.clone()))
            }
            (BinOp::Add | BinOp::Sub, _, Constant(z)) if z.is_zero() => Some(a.clone()),
            (BinOp::Add, Constant(z), _) if z.is_zero() => Some(b.clone()),
            // u/n and rⁿu keep the sign pattern of u.
            (BinOp::Sup, Harmonic(u) | Geometric(u, _), Constant(z))
            | (BinOp::Sup, Constant(z), Harmonic(u) | Geometric(u, _))
                if z.is_zero() && u.is_positive() =>
            {
                Some(if matches!(a, Constant(_)) { b.clone() } else { a.clone() })
            }
            (BinOp::Inf, Harmonic(u) | Geometric(u, _), Constant(z))
            | (BinOp::Inf, Constant(z), Harmonic(u) | Geometric(u, _))
                if z.is_zero() && u.is_positive() =>
            {
                Some(Constant(z.clone()))
            }
            _ => None,
        };
        simplified.unwrap_or_else(|| Combine { op, a: Box::new(a), b: Box::new(b) })
    }

    pub fn unary(op: UnOp, a: TailRule) -> TailRule {
        use TailRule::*;
        match (&op, a) {
            (_, Constant(v)) => Constant(op.apply(&v)),
            (UnOp::Scale(_) | UnOp::Neg | UnOp::Abs, Harmonic(u)) => Harmonic(op.apply(&u)),
            (UnOp::Scale(_) | UnOp::Neg | UnOp::Abs, Geometric(u, r)) => Geometric(op.apply(&u), r),
            (_, a) => Unary { op, a: Box::new(a) },
        }
    }

    fn validate(&self, space: RieszSpace) -> Result<(), NetError> {
        let elem = |e: &Element| {
            if e.space() == space {
                Ok(())
            } else {
                Err(NetError::InvalidNet(format!("{e} is not in {space}")))
            }
        };
        let set = |s: &SetExpr| match s.kind() {
            Ok(SetKind::Naturals | SetKind::Any) => Ok(()),
            _ => Err(NetError::InvalidNet(format!("{s} is not a subset of ℕ"))),
        };
        match self {
            TailRule::Constant(v) | TailRule::Harmonic(v) => elem(v),
            TailRule::Geometric(u, r) => {
                elem(u)?;
                if super::term::is_unit_ratio(r) {
                    Ok(())
                } else {
                    Err(NetError::InvalidNet(format!("geometric ratio {} is not in (0,1)", fmt_q(r))))
                }
            }
            TailRule::SpikeOn { set: s, spike, base } => {
                set(s)?;
                elem(spike)?;
                base.validate(space)
            }
            TailRule::Masked { set: s, inner } => {
                set(s)?;
                inner.validate(space)
            }
            TailRule::UnitSweep { offset, period } => {
                if space != RieszSpace::FinSuppSeq {
                    Err(NetError::InvalidNet("sweep needs finitely supported sequences".into()))
                } else if *offset == 0 || *period == 0 {
                    Err(NetError::InvalidNet("sweep needs offset ≥ 1 and period ≥ 1".into()))
                } else {
                    Ok(())
                }
            }
            TailRule::Combine { a, b, .. } => {
                a.validate(space)?;
                b.validate(space)
            }
            TailRule::Unary { a, .. } => a.validate(space),
            TailRule::Reindexed { source, map } => {
                if source.space != space {
                    return Err(NetError::InvalidNet(format!("reindexed net lives in {}", source.space)));
                }
                match map {
                    IndexMap::Affine { mul, .. } if *mul == 0 => {
                        Err(NetError::InvalidNet("affine map needs mul ≥ 1".into()))
                    }
                    IndexMap::Power(0) => Err(NetError::InvalidNet("power map needs exponent ≥ 1".into())),
                    IndexMap::Enumerate(s) => set(s),
                    _ => Ok(()),
                }
            }
        }
    }

    /// All tail leaves, depth first.
    pub(crate) fn leaves(&self) -> Vec<&TailRule> {
        let mut out = Vec::new();
        fn walk<'a>(r: &'a TailRule, out: &mut Vec<&'a TailRule>) {
            match r {
                TailRule::SpikeOn { base, .. } => {
                    out.push(r);
                    walk(base, out);
                }
                TailRule::Masked { inner, .. } => walk(inner, out),
                TailRule::Combine { a, b, .. } => {
                    walk(a, out);
                    walk(b, out);
                }
                TailRule::Unary { a, .. } => walk(a, out),
                _ => out.push(r),
            }
        }
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Constant(v) => write!(f, "const({v})"),
            TailRule::Harmonic(u) => write!(f, "harmonic({u})"),
            TailRule::Geometric(u, r) => write!(f, "geometric({u}, {})", fmt_q(r)),
            TailRule::SpikeOn { set, spike, base } => write!(f, "spike({set}, {spike}, {base})"),
            TailRule::Masked { set, inner } => write!(f, "mask({set}, {inner})"),
            TailRule::UnitSweep { offset, period } => write!(f, "sweep({offset}, {period})"),
            TailRule::Combine { op, a, b } => write!(f, "{}({a}, {b})", op.name()),
            TailRule::Unary { op: UnOp::Scale(q), a } => write!(f, "scale({}, {a})", fmt_q(q)),
            TailRule::Unary { op: UnOp::Neg, a } => write!(f, "neg({a})"),
            TailRule::Unary { op: UnOp::Abs, a } => write!(f, "abs({a})"),
            TailRule::Reindexed { source, map } => write!(f, "reindex({source}, {map})"),
        }
    }
}

/// A net `ℕ → E`: `prefix[n−1]` for `n ≤ prefix.len()`, the tail rule
/// beyond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    space: RieszSpace,
    prefix: Vec<Element>,
    tail: TailRule,
}

impl Net {
    pub fn new(space: RieszSpace, prefix: Vec<Element>, tail: TailRule) -> Result<Net, NetError> {
        for (i, e) in prefix.iter().enumerate() {
            if e.space() != space {
                return Err(NetError::InvalidNet(format!("prefix entry {} = {e} is not in {space}", i + 1)));
            }
        }
        tail.validate(space)?;
        Ok(Net { space, prefix, tail })
    }

    /// A net given by its tail rule alone.
    pub fn from_tail(space: RieszSpace, tail: TailRule) -> Result<Net, NetError> {
        Net::new(space, Vec::new(), tail)
    }

    pub fn constant(v: Element) -> Net {
        Net { space: v.space(), prefix: Vec::new(), tail: TailRule::Constant(v) }
    }

    pub fn index(&self) -> DirectedIndex {
        DirectedIndex::Naturals
    }

    pub fn space(&self) -> RieszSpace {
        self.space
    }

    pub fn prefix(&self) -> &[Element] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// `x_n`. Panics on `n = 0`, which is not an index.
    pub fn eval(&self, n: u64) -> Element {
        assert!(n >= 1, "nets are indexed from 1");
        match self.prefix.get((n - 1) as usize) {
            Some(v) => v.clone(),
            None => self.tail.eval(n),
        }
    }

    fn check_space(&self, other: &Net) -> Result<(), NetError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(NetError::Lattice(crate::lattice::LatticeError::SpaceMismatch(self.space, other.space)))
        }
    }

    /// Pointwise `op`.
    pub fn combine(&self, other: &Net, op: BinOp) -> Result<Net, NetError> {
        self.check_space(other)?;
        let len = self.prefix.len().max(other.prefix.len()) as u64;
        let prefix = (1..=len).map(|n| op.apply(&self.eval(n), &other.eval(n))).collect();
        Ok(Net { space: self.space, prefix, tail: TailRule::combine(op, self.tail.clone(), other.tail.clone()) })
    }

    pub fn map(&self, op: UnOp) -> Net {
        Net {
            space: self.space,
            prefix: self.prefix.iter().map(|v| op.apply(v)).collect(),
            tail: TailRule::unary(op, self.tail.clone()),
        }
    }

    pub fn add(&self, other: &Net) -> Result<Net, NetError> {
        self.combine(other, BinOp::Add)
    }

    pub fn sub(&self, other: &Net) -> Result<Net, NetError> {
        self.combine(other, BinOp::Sub)
    }

    pub fn sup(&self, other: &Net) -> Result<Net, NetError> {
        self.combine(other, BinOp::Sup)
    }

    pub fn inf(&self, other: &Net) -> Result<Net, NetError> {
        self.combine(other, BinOp::Inf)
    }

    pub fn abs(&self) -> Net {
        self.map(UnOp::Abs)
    }

    pub fn scale(&self, q: &Q) -> Net {
        self.map(UnOp::Scale(q.clone()))
    }

    /// `x − v` for a fixed element `v`.
    pub fn minus_element(&self, v: &Element) -> Result<Net, NetError> {
        self.sub(&Net::constant(v.clone()))
    }

    /// The net `x·𝒳_Δ`: unchanged on `Δ`, zero off it.
    pub fn mask(&self, delta: &SetExpr) -> Result<Net, NetError> {
        let zero = self.space.zero();
        let prefix = self
            .prefix
            .iter()
            .enumerate()
            .map(|(i, v)| if delta.contains_nat(i as u64 + 1) { v.clone() } else { zero.clone() })
            .collect();
        Net::new(self.space, prefix, TailRule::Masked { set: delta.clone(), inner: Box::new(self.tail.clone()) })
    }
}

impl fmt::Display for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            let parts: Vec<String> = self.prefix.iter().enumerate().map(|(i, v)| format!("{} => {v}", i + 1)).collect();
            write!(f, "[{}] ", parts.join("; "))?;
        }
        write!(f, "{}", self.tail)
    }
}

/// Net-level [`Net::mask`].
pub fn mask(net: &Net, delta: &SetExpr) -> Result<Net, NetError> {
    net.mask(delta)
}

/// Net-level pointwise combination.
pub fn combine(a: &Net, b: &Net, op: BinOp) -> Result<Net, NetError> {
    a.combine(b, op)
}
