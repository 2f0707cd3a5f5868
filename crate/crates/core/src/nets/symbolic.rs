//! Piecewise closed forms of tail rules: on each cell of a partition of ℕ
//! the net is coordinatewise a [`Term`], plus possibly one unit coordinate
//! that moves with `n`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::net::{BinOp, Net, TailRule, UnOp};
use super::term::Term;
use super::NetError;
use crate::index_measure::{certainly_empty, SetExpr};
use crate::lattice::{Element, RieszSpace};

/// At `n = offset + (k−1)·period` the coordinate `k` additionally carries
/// `term(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Moving {
    pub offset: u64,
    pub period: u64,
    pub term: Term,
}

impl Moving {
    pub fn coordinate(&self, n: u64) -> u64 {
        (n - self.offset) / self.period + 1
    }

    /// First index from which the moving coordinate exceeds `key`.
    fn clears(&self, key: u64) -> u64 {
        self.offset + self.period * key
    }
}

/// A coordinatewise closed form; absent coordinates are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct SymElem {
    pub coords: BTreeMap<u64, Term>,
    pub moving: Option<Moving>,
}

impl SymElem {
    fn from_element(v: &Element, lift: impl Fn(crate::rational::Q) -> Term) -> SymElem {
        let coords = v.coords().into_iter().map(|(k, x)| (k, lift(x))).filter(|(_, t)| !t.is_zero()).collect();
        SymElem { coords, moving: None }
    }

    fn max_key(&self) -> u64 {
        self.coords.keys().next_back().copied().unwrap_or(0)
    }

    pub fn eval(&self, space: RieszSpace, n: u64) -> Element {
        let mut coords: BTreeMap<u64, crate::rational::Q> = self.coords.iter().map(|(k, t)| (*k, t.eval(n))).collect();
        if let Some(m) = &self.moving {
            *coords.entry(m.coordinate(n)).or_default() += m.term.eval(n);
        }
        space.from_coords(coords)
    }

    fn map_terms(&self, f: impl Fn(&Term) -> Result<(Term, u64), NetError>) -> Result<(SymElem, u64), NetError> {
        let mut start = 1;
        let mut coords = BTreeMap::new();
        for (k, t) in &self.coords {
            let (t2, s) = f(t)?;
            start = start.max(s);
            if !t2.is_zero() {
                coords.insert(*k, t2);
            }
        }
        let moving = match &self.moving {
            Some(m) => {
                let (t2, s) = f(&m.term)?;
                start = start.max(s);
                (!t2.is_zero()).then(|| Moving { term: t2, ..m.clone() })
            }
            None => None,
        };
        Ok((SymElem { coords, moving }, start))
    }

    fn zip(
        &self,
        other: &SymElem,
        f: impl Fn(&Term, &Term) -> Result<(Term, u64), NetError>,
    ) -> Result<(SymElem, u64), NetError> {
        let zero = Term::default();
        let mut start = 1;
        let mut coords = BTreeMap::new();
        let keys: BTreeSet<u64> = self.coords.keys().chain(other.coords.keys()).copied().collect();
        for k in keys {
            let (t, s) = f(self.coords.get(&k).unwrap_or(&zero), other.coords.get(&k).unwrap_or(&zero))?;
            start = start.max(s);
            if !t.is_zero() {
                coords.insert(k, t);
            }
        }
        // Past the guard the moving coordinate lies beyond every fixed key
        // of both operands, so there it meets only zeros or the other
        // operand's moving part at the same coordinate.
        let max_key = self.max_key().max(other.max_key());
        let (pattern, ta, tb) = match (&self.moving, &other.moving) {
            (None, None) => return Ok((SymElem { coords, moving: None }, start)),
            (Some(a), Some(b)) if (a.offset, a.period) == (b.offset, b.period) => (a, &a.term, &b.term),
            (Some(a), None) => (a, &a.term, &zero),
            (None, Some(b)) => (b, &zero, &b.term),
            (Some(_), Some(_)) => {
                return Err(NetError::Undetermined("two unit sweeps with different positions".into()))
            }
        };
        let (t, s) = f(ta, tb)?;
        start = start.max(s).max(pattern.clears(max_key));
        let moving = (!t.is_zero()).then(|| Moving { term: t, ..pattern.clone() });
        Ok((SymElem { coords, moving }, start))
    }
}

fn sign_or_undetermined(t: &Term) -> Result<(Ordering, u64), NetError> {
    t.eventual_sign().ok_or_else(|| NetError::Undetermined(format!("sign of {t} settles beyond the search cap")))
}

fn sup_term(a: &Term, b: &Term) -> Result<(Term, u64), NetError> {
    let (s, n) = sign_or_undetermined(&a.sub(b))?;
    Ok((if s == Ordering::Less { b.clone() } else { a.clone() }, n))
}

fn inf_term(a: &Term, b: &Term) -> Result<(Term, u64), NetError> {
    let (s, n) = sign_or_undetermined(&a.sub(b))?;
    Ok((if s == Ordering::Less { a.clone() } else { b.clone() }, n))
}

fn abs_term(a: &Term) -> Result<(Term, u64), NetError> {
    let (s, n) = sign_or_undetermined(a)?;
    Ok((if s == Ordering::Less { a.neg() } else { a.clone() }, n))
}

#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub cell: SetExpr,
    pub value: SymElem,
}

/// For every `n ≥ start`, the net's value at `n` is the value of the
/// unique piece whose cell contains `n`.
#[derive(Debug, Clone)]
pub(crate) struct TailForm {
    pub start: u64,
    pub pieces: Vec<Piece>,
}

impl TailForm {
    /// The value at `n ≥ start`, read off the closed forms.
    pub fn eval(&self, space: RieszSpace, n: u64) -> Option<Element> {
        debug_assert!(n >= self.start);
        self.pieces.iter().find(|p| p.cell.contains_nat(n)).map(|p| p.value.eval(space, n))
    }

    fn single(value: SymElem) -> TailForm {
        TailForm { start: 1, pieces: vec![Piece { cell: SetExpr::naturals(), value }] }
    }

    fn restrict(self, set: &SetExpr) -> Vec<Piece> {
        self.pieces
            .into_iter()
            .filter_map(|p| {
                let cell = SetExpr::inter(p.cell, set.clone());
                (!certainly_empty(&cell)).then_some(Piece { cell, value: p.value })
            })
            .collect()
    }

    fn map(&self, f: impl Fn(&Term) -> Result<(Term, u64), NetError>) -> Result<TailForm, NetError> {
        let mut start = self.start;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let (value, s) = p.value.map_terms(&f)?;
            start = start.max(s);
            pieces.push(Piece { cell: p.cell.clone(), value });
        }
        Ok(TailForm { start, pieces })
    }

    fn zip(
        &self,
        other: &TailForm,
        f: impl Fn(&Term, &Term) -> Result<(Term, u64), NetError>,
    ) -> Result<TailForm, NetError> {
        let mut start = self.start.max(other.start);
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let cell = SetExpr::inter(a.cell.clone(), b.cell.clone());
                if certainly_empty(&cell) {
                    continue;
                }
                let (value, s) = a.value.zip(&b.value, &f)?;
                start = start.max(s);
                pieces.push(Piece { cell, value });
            }
        }
        Ok(TailForm { start, pieces })
    }
}

pub(crate) fn compile_rule(rule: &TailRule) -> Result<TailForm, NetError> {
    Ok(match rule {
        TailRule::Constant(v) => TailForm::single(SymElem::from_element(v, Term::constant)),
        TailRule::Harmonic(u) => TailForm::single(SymElem::from_element(u, Term::harmonic)),
        TailRule::Geometric(u, r) => TailForm::single(SymElem::from_element(u, |x| Term::geometric(x, r.clone()))),
        TailRule::SpikeOn { set, spike, base } => {
            let base = compile_rule(base)?;
            let start = base.start;
            let mut pieces = base.restrict(&SetExpr::complement(set.clone()));
            pieces.push(Piece { cell: set.clone(), value: SymElem::from_element(spike, Term::constant) });
            TailForm { start, pieces }
        }
        TailRule::Masked { set, inner } => {
            let inner = compile_rule(inner)?;
            let start = inner.start;
            let mut pieces = inner.restrict(set);
            pieces.push(Piece { cell: SetExpr::complement(set.clone()), value: SymElem::default() });
            TailForm { start, pieces }
        }
        TailRule::UnitSweep { offset, period } => {
            let cell = SetExpr::ap(*offset, *period);
            TailForm {
                start: 1,
                pieces: vec![
                    Piece {
                        cell: cell.clone(),
                        value: SymElem {
                            coords: BTreeMap::new(),
                            moving: Some(Moving {
                                offset: *offset,
                                period: *period,
                                term: Term::constant(crate::rational::one()),
                            }),
                        },
                    },
                    Piece { cell: SetExpr::complement(cell), value: SymElem::default() },
                ],
            }
        }
        TailRule::Combine { op, a, b } => {
            let (a, b) = (compile_rule(a)?, compile_rule(b)?);
            match op {
                BinOp::Add => a.zip(&b, |x, y| Ok((x.add(y), 1)))?,
                BinOp::Sub => a.zip(&b, |x, y| Ok((x.sub(y), 1)))?,
                BinOp::Sup => a.zip(&b, sup_term)?,
                BinOp::Inf => a.zip(&b, inf_term)?,
            }
        }
        TailRule::Unary { op, a } => {
            let a = compile_rule(a)?;
            match op {
                UnOp::Scale(q) => a.map(|t| Ok((t.scale(q), 1)))?,
                UnOp::Neg => a.map(|t| Ok((t.neg(), 1)))?,
                UnOp::Abs => a.map(abs_term)?,
            }
        }
        TailRule::Reindexed { .. } => {
            return Err(NetError::Undetermined("reindexed nets have no closed form here".into()))
        }
    })
}

/// The closed form of `net` beyond its prefix.
pub(crate) fn compile(net: &Net) -> Result<TailForm, NetError> {
    let mut form = compile_rule(net.tail())?;
    form.start = form.start.max(net.prefix().len() as u64 + 1);
    Ok(form)
}
