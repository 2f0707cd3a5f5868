//! Text forms of set expressions, elements, nets, measures and net-spec
//! documents. Every parser accepts what the matching `Display` prints, so
//! printed values can be pasted back as input. The grammar is described in
//! `docs/grammar.md`.

use std::fmt;

use crate::index_measure::{DirectedSetMeasure, Predicate, SetExpr};
use crate::lattice::{Element, RieszSpace};
use crate::nets::{BinOp, IndexMap, Net, NetError, TailRule, Templates, UnOp, Witness};
use crate::rational::{fmt_q, parse_q, Q};

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let column = self.src[..pos].chars().count() + 1;
        ParseError { line: 1, column, message: message.into() }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            let found = self.rest().chars().next().map_or("end of input".to_string(), |c| format!("`{c}`"));
            Err(self.error(format!("expected `{tok}`, found {found}")))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        self.ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing input `{}`", self.rest())))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !f(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn word(&mut self) -> &'a str {
        self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return Err(self.error("expected a natural number"));
        }
        digits.parse().map_err(|_| self.error_at(start, format!("{digits} does not fit in 64 bits")))
    }

    fn positive(&mut self, what: &str) -> Result<u64, ParseError> {
        self.ws();
        let start = self.pos;
        match self.nat()? {
            0 => Err(self.error_at(start, format!("{what} must be at least 1"))),
            n => Ok(n),
        }
    }

    fn rational(&mut self) -> Result<Q, ParseError> {
        self.ws();
        let start = self.pos;
        let neg = self.eat("-");
        let num = self.take_while(|c| c.is_ascii_digit());
        if num.is_empty() {
            return Err(self.error_at(start, "expected a rational `p` or `p/q`"));
        }
        let save = self.pos;
        let den = if self.eat("/") {
            let d = self.take_while(|c| c.is_ascii_digit());
            if d.is_empty() {
                return Err(self.error("expected a denominator after `/`"));
            }
            d
        } else {
            self.pos = save;
            "1"
        };
        let text = format!("{}{num}/{den}", if neg { "-" } else { "" });
        parse_q(&text).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn list<T>(
        &mut self,
        close: &str,
        mut item: impl FnMut(&mut Self) -> Result<T, ParseError>,
    ) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn set(&mut self) -> Result<SetExpr, ParseError> {
        self.ws();
        let start = self.pos;
        if self.eat("pred:") {
            let name = self.word();
            return Predicate::by_name(name)
                .map(SetExpr::pred)
                .ok_or_else(|| self.error_at(start, format!("unknown predicate `{name}`")));
        }
        let head = self.word();
        match head {
            "fin" => {
                self.expect("{")?;
                if self.peek() == Some('(') {
                    let pairs = self.list("}", |p| {
                        p.expect("(")?;
                        let a = p.positive("a pair coordinate")?;
                        p.expect(",")?;
                        let b = p.positive("a pair coordinate")?;
                        p.expect(")")?;
                        Ok((a, b))
                    })?;
                    Ok(SetExpr::FinPairs(pairs.into_iter().collect()))
                } else {
                    let items = self.list("}", |p| p.positive("an index"))?;
                    Ok(SetExpr::fin(items))
                }
            }
            "ap" => {
                self.expect("(")?;
                let a = self.positive("the first element")?;
                self.expect(",")?;
                let d = self.positive("the period")?;
                self.expect(")")?;
                Ok(SetExpr::ap(a, d))
            }
            "u" | "i" => {
                self.expect("(")?;
                let a = self.set()?;
                self.expect(",")?;
                let b = self.set()?;
                self.expect(")")?;
                let (a, b) = (Box::new(a), Box::new(b));
                Ok(if head == "u" { SetExpr::Union(a, b) } else { SetExpr::Inter(a, b) })
            }
            "c" => {
                self.expect("(")?;
                let a = self.set()?;
                self.expect(")")?;
                Ok(SetExpr::Complement(Box::new(a)))
            }
            "listed" | "colisted" => {
                self.expect("{")?;
                let atoms = self.list("}", |p| {
                    let w = p.word();
                    if w.is_empty() {
                        Err(p.error("expected an atom name"))
                    } else {
                        Ok(w.to_string())
                    }
                })?;
                Ok(if head == "listed" { SetExpr::listed(atoms) } else { SetExpr::colisted(atoms) })
            }
            "" => Err(self.error("expected a set expression")),
            other => Err(self.error_at(start, format!("unknown set constructor `{other}`"))),
        }
    }

    fn element(&mut self, space: RieszSpace) -> Result<Element, ParseError> {
        self.ws();
        let start = self.pos;
        match space {
            RieszSpace::Rationals => Ok(Element::scalar(self.rational()?)),
            RieszSpace::RationalVector(n) => {
                self.expect("(")?;
                let xs = self.list(")", |p| p.rational())?;
                if xs.len() != n {
                    return Err(self.error_at(start, format!("expected {n} coordinates, found {}", xs.len())));
                }
                Ok(Element::vector(xs))
            }
            RieszSpace::FinSuppSeq => {
                self.expect("{")?;
                let entries = self.list("}", |p| {
                    let k = p.positive("a coordinate key")?;
                    p.expect(":")?;
                    Ok((k, p.rational()?))
                })?;
                let mut keys: Vec<u64> = entries.iter().map(|(k, _)| *k).collect();
                keys.sort_unstable();
                if keys.windows(2).any(|w| w[0] == w[1]) {
                    return Err(self.error_at(start, "repeated coordinate key"));
                }
                Ok(Element::seq(entries))
            }
        }
    }

    fn tail(&mut self, space: RieszSpace) -> Result<TailRule, ParseError> {
        self.ws();
        let start = self.pos;
        let head = self.word();
        let rule = match head {
            "const" | "harmonic" => {
                self.expect("(")?;
                let e = self.element(space)?;
                self.expect(")")?;
                if head == "const" {
                    TailRule::Constant(e)
                } else {
                    TailRule::Harmonic(e)
                }
            }
            "geometric" => {
                self.expect("(")?;
                let e = self.element(space)?;
                self.expect(",")?;
                let r = self.rational()?;
                self.expect(")")?;
                TailRule::Geometric(e, r)
            }
            "spike" => {
                self.expect("(")?;
                let set = self.set()?;
                self.expect(",")?;
                let spike = self.element(space)?;
                self.expect(",")?;
                let base = Box::new(self.tail(space)?);
                self.expect(")")?;
                TailRule::SpikeOn { set, spike, base }
            }
            "mask" => {
                self.expect("(")?;
                let set = self.set()?;
                self.expect(",")?;
                let inner = Box::new(self.tail(space)?);
                self.expect(")")?;
                TailRule::Masked { set, inner }
            }
            "sweep" => {
                self.expect("(")?;
                let offset = self.positive("the sweep offset")?;
                self.expect(",")?;
                let period = self.positive("the sweep period")?;
                self.expect(")")?;
                TailRule::UnitSweep { offset, period }
            }
            "add" | "sub" | "sup" | "inf" => {
                let op = match head {
                    "add" => BinOp::Add,
                    "sub" => BinOp::Sub,
                    "sup" => BinOp::Sup,
                    _ => BinOp::Inf,
                };
                self.expect("(")?;
                let a = Box::new(self.tail(space)?);
                self.expect(",")?;
                let b = Box::new(self.tail(space)?);
                self.expect(")")?;
                TailRule::Combine { op, a, b }
            }
            "scale" => {
                self.expect("(")?;
                let q = self.rational()?;
                self.expect(",")?;
                let a = Box::new(self.tail(space)?);
                self.expect(")")?;
                TailRule::Unary { op: UnOp::Scale(q), a }
            }
            "neg" | "abs" => {
                self.expect("(")?;
                let a = Box::new(self.tail(space)?);
                self.expect(")")?;
                TailRule::Unary { op: if head == "neg" { UnOp::Neg } else { UnOp::Abs }, a }
            }
            "reindex" => {
                self.expect("(")?;
                let source = Box::new(self.net(space)?);
                self.expect(",")?;
                let map = self.index_map()?;
                self.expect(")")?;
                TailRule::Reindexed { source, map }
            }
            "" => return Err(self.error("expected a tail rule")),
            other => return Err(self.error_at(start, format!("unknown tail rule `{other}`"))),
        };
        Ok(rule)
    }

    fn index_map(&mut self) -> Result<IndexMap, ParseError> {
        self.ws();
        let start = self.pos;
        match self.word() {
            "affine" => {
                self.expect("(")?;
                let mul = self.positive("the multiplier")?;
                self.expect(",")?;
                let add = self.nat()?;
                self.expect(")")?;
                Ok(IndexMap::Affine { mul, add })
            }
            "pow" => {
                self.expect("(")?;
                let e_start = self.pos;
                let e = self.positive("the exponent")?;
                self.expect(")")?;
                let e = u32::try_from(e).map_err(|_| self.error_at(e_start, "exponent too large"))?;
                Ok(IndexMap::Power(e))
            }
            "enum" => {
                self.expect("(")?;
                let s = self.set()?;
                self.expect(")")?;
                Ok(IndexMap::Enumerate(s))
            }
            other => Err(self.error_at(start, format!("unknown index map `{other}`"))),
        }
    }

    /// `n => e; n => e` with indices `1, 2, ...` in order.
    fn prefix_entries(&mut self, space: RieszSpace, close: Option<&str>) -> Result<Vec<Element>, ParseError> {
        let mut out = Vec::new();
        loop {
            if let Some(c) = close {
                if self.eat(c) {
                    return Ok(out);
                }
            } else if self.peek().is_none() {
                return Ok(out);
            }
            self.ws();
            let start = self.pos;
            let n = self.nat()?;
            if n != out.len() as u64 + 1 {
                return Err(self.error_at(start, format!("prefix index {n} out of order, expected {}", out.len() + 1)));
            }
            self.expect("=>")?;
            out.push(self.element(space)?);
            if !self.eat(";") {
                if let Some(c) = close {
                    self.expect(c)?;
                }
                return Ok(out);
            }
        }
    }

    fn net(&mut self, space: RieszSpace) -> Result<Net, ParseError> {
        self.ws();
        let start = self.pos;
        let prefix = if self.eat("[") { self.prefix_entries(space, Some("]"))? } else { Vec::new() };
        let tail = self.tail(space)?;
        Net::new(space, prefix, tail).map_err(|e| self.error_at(start, e.to_string()))
    }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser::new(src);
    let v = f(&mut p)?;
    p.finish()?;
    Ok(v)
}

pub fn parse_set(src: &str) -> Result<SetExpr, ParseError> {
    whole(src, |p| p.set())
}

pub fn parse_element(src: &str, space: RieszSpace) -> Result<Element, ParseError> {
    whole(src, |p| p.element(space))
}

pub fn parse_tail(src: &str, space: RieszSpace) -> Result<TailRule, ParseError> {
    whole(src, |p| p.tail(space))
}

/// `[1 => e; 2 => e] tail`, the prefix being optional.
pub fn parse_net(src: &str, space: RieszSpace) -> Result<Net, ParseError> {
    whole(src, |p| p.net(space))
}

/// `rationals`, `vector N` or `finsupp`; `Q`, `Q^N` and `c00` also work.
pub fn parse_space(src: &str) -> Result<RieszSpace, ParseError> {
    let t = src.trim();
    let err = |m: String| ParseError { line: 1, column: 1, message: m };
    let dim = |d: &str| match d.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(RieszSpace::RationalVector(n)),
        _ => Err(err(format!("`{d}` is not a dimension ≥ 1"))),
    };
    match t {
        "rationals" | "Q" => Ok(RieszSpace::Rationals),
        "finsupp" | "c00" => Ok(RieszSpace::FinSuppSeq),
        _ => match t.strip_prefix("vector ").or_else(|| t.strip_prefix("Q^")) {
            Some(d) => dim(d),
            None => Err(err(format!("unknown space `{t}`"))),
        },
    }
}

/// `periodic-density`, `prefix-density`, `cocountable` or
/// `conditional:<set>`.
pub fn parse_measure(src: &str) -> Result<DirectedSetMeasure, ParseError> {
    let t = src.trim();
    let offset = src.len() - src.trim_start().len();
    match t {
        "periodic-density" => Ok(DirectedSetMeasure::PeriodicDensity),
        "prefix-density" => Ok(DirectedSetMeasure::prefix_bounds()),
        "cocountable" => Ok(DirectedSetMeasure::CoCountable),
        _ => match t.strip_prefix("conditional:") {
            Some(base) => {
                let shift = offset + "conditional:".len();
                let set = parse_set(base).map_err(|e| ParseError {
                    column: e.column + shift,
                    ..e
                })?;
                DirectedSetMeasure::conditional(set).map_err(|e| ParseError {
                    line: 1,
                    column: shift + 1,
                    message: e.to_string(),
                })
            }
            None => Err(ParseError {
                line: 1,
                column: offset + 1,
                message: format!(
                    "unknown measure `{t}` (expected periodic-density, prefix-density, cocountable or conditional:<set>)"
                ),
            }),
        },
    }
}

/// `scales; ratios`, e.g. `1, 2, 4, 8; 1/2`. The ratio list may be
/// omitted.
pub fn parse_templates(src: &str) -> Result<Templates, ParseError> {
    whole(src, |p| {
        let mut scales = vec![p.rational()?];
        while p.eat(",") {
            scales.push(p.rational()?);
        }
        let mut ratios = Vec::new();
        if p.eat(";") {
            ratios.push(p.rational()?);
            while p.eat(",") {
                ratios.push(p.rational()?);
            }
        }
        Ok(Templates { scales, ratios })
    })
}

pub fn templates_to_string(t: &Templates) -> String {
    let list = |xs: &[Q]| xs.iter().map(fmt_q).collect::<Vec<_>>().join(", ");
    if t.ratios.is_empty() {
        list(&t.scales)
    } else {
        format!("{}; {}", list(&t.scales), list(&t.ratios))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderClaim {
    pub limit: Element,
    pub dominating: Net,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StClaim {
    pub limit: Element,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuClaim {
    pub limit: Element,
    pub regulator: Element,
}

/// A net over ℕ with optional convergence claims.
#[derive(Debug, Clone)]
pub struct NetSpec {
    pub net: Net,
    pub order: Option<OrderClaim>,
    pub st: Option<StClaim>,
    pub ru: Option<RuClaim>,
    pub measure: Option<DirectedSetMeasure>,
}

impl NetSpec {
    pub fn new(net: Net) -> Self {
        NetSpec { net, order: None, st: None, ru: None, measure: None }
    }
}

const KEYS: [&str; 12] = [
    "index",
    "space",
    "prefix",
    "tail",
    "order_limit",
    "dominating",
    "st_limit",
    "witness_p",
    "witness_delta",
    "ru_limit",
    "ru_regulator",
    "measure",
];

/// Parses a net-spec document: `key: value` lines, `#` comments and blank
/// lines. Each key appears at most once; `space` and `tail` are required.
pub fn parse_netspec(src: &str) -> Result<NetSpec, ParseError> {
    struct Entry<'a> {
        line: usize,
        column: usize,
        value: &'a str,
    }
    let mut entries: Vec<(&str, Entry)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let content = raw.split_once('#').map_or(raw, |(a, _)| a);
        if content.trim().is_empty() {
            continue;
        }
        let at = |column, message: String| ParseError { line, column, message };
        let Some((key, value)) = content.split_once(':') else {
            return Err(at(1, "expected `key: value`".into()));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(at(1, format!("unknown key `{key}`")));
        }
        if entries.iter().any(|(k, _)| *k == key) {
            return Err(at(1, format!("duplicate key `{key}`")));
        }
        let column = content.len() - value.len() + 1;
        entries.push((key, Entry { line, column, value }));
    }
    let get = |key: &str| entries.iter().find(|(k, _)| *k == key).map(|(_, e)| e);
    let relocate = |e: &Entry, err: ParseError| ParseError {
        line: e.line,
        column: e.column + err.column - 1,
        message: err.message,
    };
    let missing = |message: String| ParseError { line: src.lines().count().max(1), column: 1, message };

    if let Some(e) = get("index") {
        if e.value.trim() != "naturals" {
            return Err(relocate(
                e,
                ParseError {
                    line: 1,
                    column: 1,
                    message: format!("unsupported index `{}`; nets are indexed by naturals", e.value.trim()),
                },
            ));
        }
    }
    let space_entry = get("space").ok_or_else(|| missing("missing key `space`".into()))?;
    let space = parse_space(space_entry.value).map_err(|err| relocate(space_entry, err))?;
    let prefix = match get("prefix") {
        Some(e) => whole(e.value, |p| p.prefix_entries(space, None)).map_err(|err| relocate(e, err))?,
        None => Vec::new(),
    };
    let tail_entry = get("tail").ok_or_else(|| missing("missing key `tail`".into()))?;
    let tail = parse_tail(tail_entry.value, space).map_err(|err| relocate(tail_entry, err))?;
    let net = Net::new(space, prefix, tail).map_err(|err: NetError| ParseError {
        line: tail_entry.line,
        column: tail_entry.column,
        message: err.to_string(),
    })?;

    let element = |key: &str| -> Result<Option<Element>, ParseError> {
        get(key).map(|e| parse_element(e.value, space).map_err(|err| relocate(e, err))).transpose()
    };
    let net_at = |key: &str| -> Result<Option<Net>, ParseError> {
        get(key).map(|e| parse_net(e.value, space).map_err(|err| relocate(e, err))).transpose()
    };
    let pair = |a: &str, b: &str| -> Result<(), ParseError> {
        match (get(a), get(b)) {
            (Some(_), None) => Err(missing(format!("`{a}` needs `{b}`"))),
            (None, Some(_)) => Err(missing(format!("`{b}` needs `{a}`"))),
            _ => Ok(()),
        }
    };
    pair("order_limit", "dominating")?;
    pair("ru_limit", "ru_regulator")?;
    pair("st_limit", "witness_p")?;
    pair("witness_p", "witness_delta")?;

    let order = match (element("order_limit")?, net_at("dominating")?) {
        (Some(limit), Some(dominating)) => Some(OrderClaim { limit, dominating }),
        _ => None,
    };
    let delta = get("witness_delta").map(|e| parse_set(e.value).map_err(|err| relocate(e, err))).transpose()?;
    let st = match (element("st_limit")?, net_at("witness_p")?, delta) {
        (Some(limit), Some(p), Some(delta)) => Some(StClaim { limit, witness: Witness { p, delta } }),
        _ => None,
    };
    let ru = match (element("ru_limit")?, element("ru_regulator")?) {
        (Some(limit), Some(regulator)) => Some(RuClaim { limit, regulator }),
        _ => None,
    };
    let measure = get("measure").map(|e| parse_measure(e.value).map_err(|err| relocate(e, err))).transpose()?;
    Ok(NetSpec { net, order, st, ru, measure })
}

impl fmt::Display for NetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "index: naturals")?;
        writeln!(f, "space: {}", self.net.space().spec_name())?;
        if !self.net.prefix().is_empty() {
            let parts: Vec<String> =
                self.net.prefix().iter().enumerate().map(|(i, v)| format!("{} => {v}", i + 1)).collect();
            writeln!(f, "prefix: {}", parts.join("; "))?;
        }
        writeln!(f, "tail: {}", self.net.tail())?;
        if let Some(c) = &self.order {
            writeln!(f, "order_limit: {}", c.limit)?;
            writeln!(f, "dominating: {}", c.dominating)?;
        }
        if let Some(c) = &self.st {
            writeln!(f, "st_limit: {}", c.limit)?;
            writeln!(f, "witness_p: {}", c.witness.p)?;
            writeln!(f, "witness_delta: {}", c.witness.delta)?;
        }
        if let Some(c) = &self.ru {
            writeln!(f, "ru_limit: {}", c.limit)?;
            writeln!(f, "ru_regulator: {}", c.regulator)?;
        }
        if let Some(m) = &self.measure {
            writeln!(f, "measure: {}", m.name())?;
        }
        Ok(())
    }
}
