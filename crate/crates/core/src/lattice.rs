//! Exact-arithmetic Riesz spaces: the rationals, `Q^n` and finitely
//! supported sequences, all with the pointwise order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{fmt_q, one, qu, zero, Q};
use crate::verdict::{Clause, Evidence, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RieszSpace {
    Rationals,
    /// `Q^n`, `n ≥ 1`.
    RationalVector(usize),
    /// Finitely supported sequences indexed from 1; a desk-scale model of
    /// `c₀` that is not Dedekind complete.
    FinSuppSeq,
}

impl RieszSpace {
    pub fn is_dedekind_complete(&self) -> bool {
        !matches!(self, RieszSpace::FinSuppSeq)
    }

    pub fn zero(&self) -> Element {
        match self {
            RieszSpace::Rationals => Element::Scalar(zero()),
            RieszSpace::RationalVector(n) => Element::Vector(vec![zero(); *n]),
            RieszSpace::FinSuppSeq => Element::Seq(BTreeMap::new()),
        }
    }

    /// Builds an element from `(coordinate, value)` pairs; coordinates are
    /// 0-based for vectors, 1-based for sequences, and 0 for scalars.
    pub fn from_coords(&self, coords: impl IntoIterator<Item = (u64, Q)>) -> Element {
        let mut out = self.zero();
        for (k, v) in coords {
            match &mut out {
                Element::Scalar(x) => *x = v,
                Element::Vector(xs) => xs[k as usize] = v,
                Element::Seq(m) => {
                    if !v.is_zero() {
                        m.insert(k, v);
                    }
                }
            }
        }
        out
    }

    /// Text form used by net-spec files: `rationals`, `vector N`, `finsupp`.
    pub fn spec_name(&self) -> String {
        match self {
            RieszSpace::Rationals => "rationals".into(),
            RieszSpace::RationalVector(n) => format!("vector {n}"),
            RieszSpace::FinSuppSeq => "finsupp".into(),
        }
    }
}

impl fmt::Display for RieszSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RieszSpace::Rationals => f.write_str("Q"),
            RieszSpace::RationalVector(n) => write!(f, "Q^{n}"),
            RieszSpace::FinSuppSeq => f.write_str("c00"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("space mismatch: {0} vs {1}")]
    SpaceMismatch(RieszSpace, RieszSpace),
    #[error("{0} is not positive")]
    NotPositive(String),
    #[error("{0} is not Dedekind complete")]
    NotDedekindComplete(RieszSpace),
    #[error("supremum of an empty family")]
    Empty,
}

/// An element of one of the [`RieszSpace`]s. Sequences never store zero
/// entries, so structural equality is equality of elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Scalar(Q),
    Vector(Vec<Q>),
    Seq(BTreeMap<u64, Q>),
}

fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

impl Element {
    pub fn scalar(x: Q) -> Self {
        Element::Scalar(x)
    }

    pub fn vector(xs: Vec<Q>) -> Self {
        assert!(!xs.is_empty(), "vectors have at least one coordinate");
        Element::Vector(xs)
    }

    /// A sequence from `(index, value)` pairs; zero values are dropped.
    pub fn seq(entries: impl IntoIterator<Item = (u64, Q)>) -> Self {
        RieszSpace::FinSuppSeq.from_coords(entries)
    }

    /// The `k`-th standard unit sequence `e_k`, `k ≥ 1`.
    pub fn unit(k: u64) -> Self {
        Element::seq([(k, one())])
    }

    pub fn space(&self) -> RieszSpace {
        match self {
            Element::Scalar(_) => RieszSpace::Rationals,
            Element::Vector(xs) => RieszSpace::RationalVector(xs.len()),
            Element::Seq(_) => RieszSpace::FinSuppSeq,
        }
    }

    /// Non-zero coordinates for sequences, every coordinate otherwise.
    pub fn coords(&self) -> Vec<(u64, Q)> {
        match self {
            Element::Scalar(x) => vec![(0, x.clone())],
            Element::Vector(xs) => xs.iter().cloned().enumerate().map(|(i, x)| (i as u64, x)).collect(),
            Element::Seq(m) => m.iter().map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn coord(&self, k: u64) -> Q {
        match self {
            Element::Scalar(x) => x.clone(),
            Element::Vector(xs) => xs.get(k as usize).cloned().unwrap_or_else(zero),
            Element::Seq(m) => m.get(&k).cloned().unwrap_or_else(zero),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Element::Scalar(x) => x.is_zero(),
            Element::Vector(xs) => xs.iter().all(Zero::is_zero),
            Element::Seq(m) => m.is_empty(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.coords().iter().all(|(_, v)| !v.is_negative())
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> Element {
        match self {
            Element::Scalar(x) => Element::Scalar(f(x)),
            Element::Vector(xs) => Element::Vector(xs.iter().map(f).collect()),
            Element::Seq(m) => Element::seq(m.iter().map(|(k, v)| (*k, f(v)))),
        }
    }

    /// Pointwise combination. For sequences `f` must send `(0, 0)` to 0,
    /// which every lattice and linear operation does.
    fn zip(&self, other: &Element, f: impl Fn(&Q, &Q) -> Q) -> Result<Element, LatticeError> {
        check_same(self, other)?;
        Ok(match (self, other) {
            (Element::Scalar(a), Element::Scalar(b)) => Element::Scalar(f(a, b)),
            (Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            }
            (Element::Seq(a), Element::Seq(b)) => {
                let z = zero();
                let keys: std::collections::BTreeSet<u64> = a.keys().chain(b.keys()).copied().collect();
                Element::seq(keys.into_iter().map(|k| (k, f(a.get(&k).unwrap_or(&z), b.get(&k).unwrap_or(&z)))))
            }
            _ => unreachable!("spaces checked"),
        })
    }

    pub fn add(&self, other: &Element) -> Result<Element, LatticeError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, LatticeError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn sup(&self, other: &Element) -> Result<Element, LatticeError> {
        self.zip(other, max_q)
    }

    pub fn inf(&self, other: &Element) -> Result<Element, LatticeError> {
        self.zip(other, min_q)
    }

    pub fn neg(&self) -> Element {
        self.map(|a| -a)
    }

    pub fn scale(&self, q: &Q) -> Element {
        self.map(|a| a * q)
    }

    pub fn abs(&self) -> Element {
        self.map(Signed::abs)
    }

    /// `x⁺ = x ∨ 0`.
    pub fn pos(&self) -> Element {
        self.map(|a| max_q(a, &zero()))
    }

    /// `x⁻ = (−x) ∨ 0`.
    pub fn neg_part(&self) -> Element {
        self.map(|a| max_q(&-a, &zero()))
    }

    /// `(|x|, x⁺, x⁻)`.
    pub fn abs_parts(&self) -> (Element, Element, Element) {
        (self.abs(), self.pos(), self.neg_part())
    }

    /// Pointwise `≤`; incomparable pairs give `false` both ways.
    pub fn leq(&self, other: &Element) -> Result<bool, LatticeError> {
        let diff = other.sub(self)?;
        Ok(diff.is_positive())
    }
}

fn check_same(a: &Element, b: &Element) -> Result<(), LatticeError> {
    if a.space() == b.space() {
        Ok(())
    } else {
        Err(LatticeError::SpaceMismatch(a.space(), b.space()))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Scalar(x) => f.write_str(&fmt_q(x)),
            Element::Vector(xs) => {
                let parts: Vec<String> = xs.iter().map(fmt_q).collect();
                write!(f, "({})", parts.join(", "))
            }
            Element::Seq(m) => {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}: {}", fmt_q(v))).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Whether `|x∨w − x′∨w′| ≤ |x − x′| + |w − w′|`. This always holds;
/// a `false` means the lattice operations are broken.
pub fn birkhoff_check(x: &Element, x2: &Element, w: &Element, w2: &Element) -> Result<bool, LatticeError> {
    let lhs = x.sup(w)?.sub(&x2.sup(w2)?)?.abs();
    let rhs = x.sub(x2)?.abs().add(&w.sub(w2)?.abs())?;
    lhs.leq(&rhs)
}

/// Confirms `(1/n)x ↓ 0` for a positive `x`: explicit decrease for
/// `n ≤ horizon`, and the coordinatewise limit of `x_i / n` is 0.
pub fn archimedean_probe(x: &Element, horizon: u64) -> Result<Verdict, LatticeError> {
    if !x.is_positive() {
        return Err(LatticeError::NotPositive(x.to_string()));
    }
    let mut prev = x.clone();
    for n in 2..=horizon.max(1) {
        let cur = x.scale(&(one() / qu(n)));
        if !cur.leq(&prev)? {
            return Ok(Verdict::reject(Evidence::new(Clause::Decreasing, horizon).pair(n - 1, n)));
        }
        prev = cur;
    }
    // x_i / n → 0 for every rational x_i: the infimum is the zero element.
    Ok(Verdict::accept(Evidence::new(Clause::Infimum, horizon).infimum(x.space().zero())))
}

/// Least upper bound of a finite family in a Dedekind complete space.
pub fn dedekind_sup(elements: &[Element], space: RieszSpace) -> Result<Element, LatticeError> {
    if !space.is_dedekind_complete() {
        return Err(LatticeError::NotDedekindComplete(space));
    }
    let (first, rest) = elements.split_first().ok_or(LatticeError::Empty)?;
    check_same(first, &space.zero())?;
    rest.iter().try_fold(first.clone(), |acc, e| acc.sup(e))
}
