//! One runner per convergence theorem. A trial draws its hypotheses,
//! confirms them with the checkers (redrawing when they fail), builds the
//! witness the theorem's proof constructs, and asks the checkers to accept
//! the conclusion.

// Failures are built once per failing trial and carry the full evidence.
#![allow(clippy::result_large_err, clippy::large_enum_variant)]

use std::fmt::Display;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gen::{self, GenError, StCase, MAX_ATTEMPTS};
use crate::index_measure::{DirectedSetMeasure, SetExpr};
use crate::lattice::{Element, RieszSpace};
use crate::nets::{
    check_order_conv, check_st_decreasing, check_st_order_conv, infimum_on, is_decreasing_on, regulator, ru_check,
    subnet, witness_search, BinOp, Net, NetError, SearchOutcome, Selector, TailRule, Templates, Witness,
};
use crate::rational::{one, qi, zero};
use crate::verdict::{Evidence, Verdict};

/// Every property, in report order.
pub const PROPERTIES: [&str; 14] = [
    "basic_props",
    "dec_implies_conv",
    "dedekind_monotone",
    "ideal_bounded_null",
    "lattice_derived",
    "lattice_sup",
    "mask_characteristic",
    "monotone_order",
    "order_dec_null",
    "order_implies_st",
    "riesz_closure",
    "ru_implies_st",
    "squeeze",
    "subnet_implies",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Input {
    pub name: String,
    pub value: String,
}

/// A trial whose conclusion was not accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub space: String,
    pub measure: String,
    /// The conclusion that failed.
    pub check: String,
    pub inputs: Vec<Input>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub(crate) enum Stop {
    /// A hypothesis did not hold; draw again.
    Retry,
    Fail {
        check: String,
        evidence: Option<Evidence>,
        error: Option<String>,
    },
}

impl From<NetError> for Stop {
    fn from(e: NetError) -> Self {
        Stop::Fail { check: "construction".into(), evidence: None, error: Some(e.to_string()) }
    }
}

impl From<crate::lattice::LatticeError> for Stop {
    fn from(e: crate::lattice::LatticeError) -> Self {
        NetError::from(e).into()
    }
}

impl From<GenError> for Stop {
    fn from(e: GenError) -> Self {
        Stop::Fail { check: "generator".into(), evidence: None, error: Some(e.to_string()) }
    }
}

type Step<T = ()> = Result<T, Stop>;

pub(crate) struct Ctx<'a> {
    pub rng: ChaCha8Rng,
    pub space: RieszSpace,
    pub mu: &'a DirectedSetMeasure,
    pub horizon: u64,
    pub inputs: Vec<Input>,
    /// Draws discarded by a precondition filter.
    pub excluded: usize,
}

impl Ctx<'_> {
    fn log(&mut self, name: &str, value: impl Display) {
        self.inputs.push(Input { name: name.into(), value: value.to_string() });
    }

    fn log_case(&mut self, name: &str, c: &StCase) {
        self.log(name, &c.net);
        self.log(&format!("{name}.limit"), &c.limit);
        self.log(&format!("{name}.p"), &c.witness.p);
        self.log(&format!("{name}.delta"), &c.witness.delta);
    }

    fn element(&mut self) -> Element {
        gen::random_element(&mut self.rng, self.space)
    }

    fn st(&mut self, limit: &Element) -> Step<StCase> {
        Ok(gen::st_case(&mut self.rng, self.space, self.mu, limit)?)
    }

    fn st_random(&mut self) -> Step<StCase> {
        let limit = self.element();
        self.st(&limit)
    }

    /// A set of measure one inside `within`.
    fn measure_one_subset(&mut self, within: &SetExpr) -> Step<SetExpr> {
        let null = gen::null_set(&mut self.rng, self.mu);
        let sigma = SetExpr::inter(within.clone(), SetExpr::complement(null));
        if gen::measure_is(self.mu, &sigma, &one()) {
            Ok(sigma)
        } else {
            Err(Stop::Retry)
        }
    }
}

fn hyp(r: Result<Verdict, NetError>) -> Step {
    match r {
        Ok(v) if v.accepted => Ok(()),
        _ => Err(Stop::Retry),
    }
}

fn concl(check: &str, r: Result<Verdict, NetError>) -> Step {
    match r {
        Ok(v) if v.accepted => Ok(()),
        Ok(v) => Err(Stop::Fail { check: check.into(), evidence: Some(v.evidence), error: None }),
        Err(e) => Err(Stop::Fail { check: check.into(), evidence: None, error: Some(e.to_string()) }),
    }
}

fn ensure(check: &str, ok: bool, detail: impl FnOnce() -> String) -> Step {
    if ok {
        Ok(())
    } else {
        Err(Stop::Fail { check: check.into(), evidence: None, error: Some(detail()) })
    }
}

fn st_accepts(check: &str, net: &Net, x: &Element, p: &Net, delta: &SetExpr, mu: &DirectedSetMeasure) -> Step {
    let w = Witness { p: p.clone(), delta: delta.clone() };
    concl(check, check_st_order_conv(net, x, &w, mu))
}

fn both(a: &SetExpr, b: &SetExpr) -> SetExpr {
    SetExpr::inter(a.clone(), b.clone())
}

fn op(a: &Element, b: &Element, f: BinOp) -> Element {
    f.apply(a, b)
}

/// `x ≤ y ≤ z` with `x, z → ℓ` forces `y → ℓ`, witnessed by
/// `p_x + p_z` on `Δ_x ∩ Δ_z`.
fn squeeze(c: &mut Ctx) -> Step {
    let l = c.element();
    let zero_el = c.space.zero();
    let lo = c.st(&zero_el)?;
    let hi = c.st(&zero_el)?;
    let below = Net::constant(l.clone()).sub(&lo.net.abs())?;
    let above = Net::constant(l.clone()).add(&hi.net.abs())?;
    let wild = gen::wild_net(&mut c.rng, c.space)?;
    let mid = below.sup(&wild.inf(&above)?)?;
    c.log("lower", &below);
    c.log("upper", &above);
    c.log("middle", &mid);
    c.log("limit", &l);
    for n in 1..=c.horizon {
        let (a, b, z) = (below.eval(n), mid.eval(n), above.eval(n));
        ensure("ordered", a.leq(&b).unwrap_or(false) && b.leq(&z).unwrap_or(false), || format!("order fails at {n}"))?;
    }
    hyp(check_st_order_conv(&below, &l, &lo.witness, c.mu))?;
    hyp(check_st_order_conv(&above, &l, &hi.witness, c.mu))?;
    let p = lo.witness.p.add(&hi.witness.p)?;
    st_accepts("middle", &mid, &l, &p, &both(&lo.witness.delta, &hi.witness.delta), c.mu)
}

/// An order convergent net is statistically order convergent with its
/// dominating net and the full index set.
fn order_implies_st(c: &mut Ctx) -> Step {
    let l = c.element();
    let case = gen::order_case(&mut c.rng, c.space, &l)?;
    c.log("net", &case.net);
    c.log("limit", &l);
    c.log("dominating", &case.dominating);
    st_accepts("st", &case.net, &l, &case.dominating, &SetExpr::naturals(), c.mu)
}

/// A monotone net `ℓ ± y` and its limit, computed as an infimum.
fn monotone(c: &mut Ctx) -> Step<(Net, Element, bool)> {
    let l = c.element();
    let increasing = c.rng.gen_bool(0.5);
    let mutate = c.rng.gen_ratio(1, 5);
    let net = gen::monotone_net(&mut c.rng, c.space, &l, increasing, mutate)?;
    let down = if increasing { net.scale(&qi(-1)) } else { net.clone() };
    match is_decreasing_on(&down, &SetExpr::naturals(), c.horizon) {
        Ok(v) if v.accepted => Ok((net, l, increasing)),
        _ => {
            c.excluded += 1;
            Err(Stop::Retry)
        }
    }
}

fn monotone_limit(net: &Net, increasing: bool, horizon: u64) -> Step<Element> {
    let down = if increasing { net.scale(&qi(-1)) } else { net.clone() };
    match infimum_on(&down, &SetExpr::naturals(), horizon) {
        Ok(Some(i)) => Ok(if increasing { i.neg() } else { i }),
        Ok(None) => {
            Err(Stop::Fail { check: "infimum".into(), evidence: None, error: Some("infimum undetermined".into()) })
        }
        Err(e) => Err(e.into()),
    }
}

/// An order bounded monotone net in a Dedekind complete space converges
/// to its supremum or infimum.
fn dedekind_monotone(c: &mut Ctx) -> Step {
    let (net, l, increasing) = monotone(c)?;
    c.log("net", &net);
    c.log("increasing", increasing);
    let lim = monotone_limit(&net, increasing, c.horizon)?;
    c.log("infimum", &lim);
    ensure("limit", lim == l, || format!("computed bound {lim}, constructed {l}"))?;
    let p = net.minus_element(&lim)?.abs();
    concl("order", check_order_conv(&net, &lim, &p))?;
    st_accepts("st", &net, &lim, &p, &SetExpr::naturals(), c.mu)
}

/// Restricting a convergent net to `Σ ⊆ Δ` with `μ(Σ) = 1` keeps the
/// limit; the subnet along `Σ` is cofinal.
fn subnet_implies(c: &mut Ctx) -> Step {
    let case = c.st_random()?;
    c.log_case("net", &case);
    let sigma = c.measure_one_subset(&case.witness.delta)?;
    c.log("sigma", &sigma);
    let (sub, cof) = subnet(&case.net, &Selector::Inclusion(sigma.clone()), c.horizon)?;
    concl("cofinal", Ok(cof))?;
    let elems = sigma.elements_upto(4 * c.horizon + 64);
    for (k, n) in elems.iter().take(16).enumerate() {
        ensure("subnet values", sub.eval(k as u64 + 1) == case.net.eval(*n), || format!("mismatch at {n}"))?;
    }
    st_accepts("restricted", &case.net, &case.limit, &case.witness.p, &sigma, c.mu)
}

fn measure_one(check: &str, mu: &DirectedSetMeasure, s: &SetExpr) -> Step {
    ensure(check, gen::measure_is(mu, s, &one()), || format!("μ({s}) is not 1"))
}

/// `x_α ∨ w_α → x ∨ w`, witnessed by `p_x + p_w` on `Δ_x ∩ Δ_w`.
fn lattice_sup(c: &mut Ctx) -> Step {
    let a = c.st_random()?;
    let b = c.st_random()?;
    c.log_case("x", &a);
    c.log_case("w", &b);
    let gamma = both(&a.witness.delta, &b.witness.delta);
    measure_one("intersection", c.mu, &gamma)?;
    let p = a.witness.p.add(&b.witness.p)?;
    st_accepts("sup", &a.net.sup(&b.net)?, &op(&a.limit, &b.limit, BinOp::Sup), &p, &gamma, c.mu)
}

/// `x_α ∧ w_α`, `|x_α|`, `x_α⁺` and `x_α⁻` converge to the matching
/// operation on the limits.
fn lattice_derived(c: &mut Ctx) -> Step {
    let a = c.st_random()?;
    let b = c.st_random()?;
    c.log_case("x", &a);
    c.log_case("w", &b);
    let gamma = both(&a.witness.delta, &b.witness.delta);
    let p = a.witness.p.add(&b.witness.p)?;
    let zero_net = Net::constant(c.space.zero());
    let (x, pa, da) = (&a.limit, &a.witness.p, &a.witness.delta);
    st_accepts("inf", &a.net.inf(&b.net)?, &op(x, &b.limit, BinOp::Inf), &p, &gamma, c.mu)?;
    st_accepts("abs", &a.net.abs(), &x.abs(), pa, da, c.mu)?;
    st_accepts("pos", &a.net.sup(&zero_net)?, &x.pos(), pa, da, c.mu)?;
    st_accepts("neg", &a.net.scale(&qi(-1)).sup(&zero_net)?, &x.neg_part(), pa, da, c.mu)
}

/// Shifting, uniqueness of the limit, linearity, closedness of the
/// positive cone, and restriction to a further measure-one set.
fn basic_props(c: &mut Ctx) -> Step {
    let a = c.st_random()?;
    let b = c.st_random()?;
    c.log_case("x", &a);
    c.log_case("w", &b);
    let (x, p, delta) = (&a.limit, &a.witness.p, &a.witness.delta);
    let zero_el = c.space.zero();

    let shifted = a.net.minus_element(x)?;
    st_accepts("shift", &shifted, &zero_el, p, delta, c.mu)?;
    st_accepts("shift_abs", &shifted.abs(), &zero_el, p, delta, c.mu)?;

    // Uniqueness: no template witness reaches a different limit.
    let other = x.add(&gen::random_positive(&mut c.rng, c.space).add(&unit(c.space))?)?;
    c.log("other", &other);
    match witness_search(&a.net, &other, c.mu, &Templates::default()) {
        Ok(SearchOutcome::Found { witness, verdict }) => {
            return Err(Stop::Fail {
                check: "uniqueness".into(),
                evidence: Some(verdict.evidence),
                error: Some(format!("accepted toward {other} with p = {}, Δ = {}", witness.p, witness.delta)),
            })
        }
        Ok(SearchOutcome::NotFound { .. }) | Err(_) => {}
    }

    let (s, t) = (gen::small_q(&mut c.rng, -3, 3), gen::small_q(&mut c.rng, -3, 3));
    c.log("s", crate::rational::fmt_q(&s));
    c.log("t", crate::rational::fmt_q(&t));
    let comb = a.net.scale(&s).add(&b.net.scale(&t))?;
    let lim = x.scale(&s).add(&b.limit.scale(&t))?;
    let pc = p.scale(&abs_q(&s)).add(&b.witness.p.scale(&abs_q(&t)))?;
    st_accepts("linear", &comb, &lim, &pc, &both(delta, &b.witness.delta), c.mu)?;

    let positive = a.net.abs();
    st_accepts("cone", &positive, &x.abs(), p, delta, c.mu)?;
    ensure("cone", x.abs().is_positive(), || "limit of a positive net is not positive".into())?;

    let sigma = c.measure_one_subset(&c.mu.full_set())?;
    c.log("sigma", &sigma);
    st_accepts("restriction", &a.net, x, p, &both(delta, &sigma), c.mu)
}

fn abs_q(x: &crate::rational::Q) -> crate::rational::Q {
    if x < &zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

fn unit(space: RieszSpace) -> Element {
    space.from_coords([(if space == RieszSpace::FinSuppSeq { 1 } else { 0 }, one())])
}

/// A monotone statistically convergent net order converges to its
/// statistical limit, which is its infimum or supremum.
fn monotone_order(c: &mut Ctx) -> Step {
    let (net, l, increasing) = monotone(c)?;
    c.log("net", &net);
    c.log("limit", &l);
    let p = net.minus_element(&l)?.abs();
    let sigma = c.measure_one_subset(&SetExpr::naturals())?;
    c.log("delta", &sigma);
    hyp(check_st_order_conv(&net, &l, &Witness { p: p.clone(), delta: sigma }, c.mu))?;
    let lim = monotone_limit(&net, increasing, c.horizon)?;
    ensure("infimum", lim == l, || format!("infimum {lim} differs from the limit {l}"))?;
    concl("order", check_order_conv(&net, &l, &p))
}

/// If `x·𝒳_Δ` order converges to 0 for some `Δ` of measure one, then `x`
/// statistically order converges to 0.
fn mask_characteristic(c: &mut Ctx) -> Step {
    let zero_el = c.space.zero();
    let base = gen::order_case(&mut c.rng, c.space, &zero_el)?;
    let null = gen::null_set(&mut c.rng, c.mu);
    let delta = SetExpr::complement(null.clone());
    if !gen::measure_is(c.mu, &delta, &one()) {
        return Err(Stop::Retry);
    }
    let garbage = c.element().scale(&qi(8));
    let net = Net::new(
        c.space,
        base.net.prefix().to_vec(),
        TailRule::SpikeOn { set: null, spike: garbage, base: Box::new(base.net.tail().clone()) },
    )?;
    c.log("net", &net);
    c.log("delta", &delta);
    c.log("dominating", &base.dominating);
    hyp(check_order_conv(&net.mask(&delta)?, &zero_el, &base.dominating))?;
    st_accepts("st", &net, &zero_el, &base.dominating, &delta, c.mu)
}

/// Sums, scalar multiples and absolute values of convergent nets converge.
fn riesz_closure(c: &mut Ctx) -> Step {
    let a = c.st_random()?;
    let b = c.st_random()?;
    c.log_case("x", &a);
    c.log_case("w", &b);
    let gamma = both(&a.witness.delta, &b.witness.delta);
    let sum_p = a.witness.p.add(&b.witness.p)?;
    st_accepts("sum", &a.net.add(&b.net)?, &a.limit.add(&b.limit)?, &sum_p, &gamma, c.mu)?;
    let k = gen::small_q(&mut c.rng, -4, 4);
    c.log("k", crate::rational::fmt_q(&k));
    let kp = a.witness.p.scale(&abs_q(&k));
    st_accepts("scale", &a.net.scale(&k), &a.limit.scale(&k), &kp, &a.witness.delta, c.mu)?;
    st_accepts("abs", &a.net.abs(), &a.limit.abs(), &a.witness.p, &a.witness.delta, c.mu)
}

/// An order bounded `y` with `|y| ≤ |x|` for a statistically null `x` is
/// statistically null with the same witness.
fn ideal_bounded_null(c: &mut Ctx) -> Step {
    let zero_el = c.space.zero();
    let a = c.st(&zero_el)?;
    c.log_case("x", &a);
    let z = gen::wild_net(&mut c.rng, c.space)?;
    let ax = a.net.abs();
    let y = z.sup(&ax.scale(&qi(-1)))?.inf(&ax)?;
    c.log("y", &y);
    for n in 1..=c.horizon {
        ensure("dominated", y.eval(n).abs().leq(&ax.eval(n)).unwrap_or(false), || format!("|y| ≰ |x| at {n}"))?;
    }
    st_accepts("st", &y, &zero_el, &a.witness.p, &a.witness.delta, c.mu)
}

/// A statistically decreasing net converges to its statistical infimum,
/// witnessed by `p − ℓ` on the same `Δ`.
fn dec_implies_conv(c: &mut Ctx) -> Step {
    let l = c.element();
    let base = gen::monotone_net(&mut c.rng, c.space, &l, false, false)?;
    let null = gen::null_set(&mut c.rng, c.mu);
    let spike = c.element().scale(&qi(5));
    let p = Net::new(
        c.space,
        base.prefix().to_vec(),
        TailRule::SpikeOn { set: null.clone(), spike, base: Box::new(base.tail().clone()) },
    )?;
    let delta = SetExpr::complement(null);
    c.log("p", &p);
    c.log("limit", &l);
    c.log("delta", &delta);
    hyp(check_st_decreasing(&p, &l, &delta, c.mu))?;
    st_accepts("st", &p, &l, &p.minus_element(&l)?, &delta, c.mu)
}

fn decreasing_null(c: &mut Ctx) -> Step<Net> {
    let zero_el = c.space.zero();
    let p = gen::monotone_net(&mut c.rng, c.space, &zero_el, false, false)?;
    hyp(is_decreasing_on(&p, &SetExpr::naturals(), c.horizon))?;
    match infimum_on(&p, &SetExpr::naturals(), c.horizon) {
        Ok(Some(i)) if i.is_zero() => Ok(p),
        _ => Err(Stop::Retry),
    }
}

/// A decreasing null net is statistically decreasing to 0 and
/// statistically order null.
fn order_dec_null(c: &mut Ctx) -> Step {
    let p = decreasing_null(c)?;
    c.log("p", &p);
    let zero_el = c.space.zero();
    let full = SetExpr::naturals();
    concl("st_decreasing", check_st_decreasing(&p, &zero_el, &full, c.mu))?;
    st_accepts("st", &p, &zero_el, &p, &full, c.mu)
}

/// A decreasing relatively uniformly null net is statistically order null.
fn ru_implies_st(c: &mut Ctx) -> Step {
    let p = decreasing_null(c)?;
    let u = regulator(&p);
    c.log("p", &p);
    c.log("regulator", &u);
    hyp(ru_check(&p, &c.space.zero(), &u, c.horizon))?;
    st_accepts("st", &p, &c.space.zero(), &p, &SetExpr::naturals(), c.mu)
}

pub(crate) fn runner(name: &str) -> Option<fn(&mut Ctx) -> Step> {
    Some(match name {
        "basic_props" => basic_props,
        "dec_implies_conv" => dec_implies_conv,
        "dedekind_monotone" => dedekind_monotone,
        "ideal_bounded_null" => ideal_bounded_null,
        "lattice_derived" => lattice_derived,
        "lattice_sup" => lattice_sup,
        "mask_characteristic" => mask_characteristic,
        "monotone_order" => monotone_order,
        "order_dec_null" => order_dec_null,
        "order_implies_st" => order_implies_st,
        "riesz_closure" => riesz_closure,
        "ru_implies_st" => ru_implies_st,
        "squeeze" => squeeze,
        "subnet_implies" => subnet_implies,
        _ => return None,
    })
}

/// Runs one trial, redrawing while hypotheses fail.
pub(crate) fn run_trial(f: fn(&mut Ctx) -> Step, ctx: &mut Ctx) -> Option<(String, Option<Evidence>, Option<String>)> {
    for _ in 0..MAX_ATTEMPTS {
        ctx.inputs.clear();
        match f(ctx) {
            Ok(()) => return None,
            Err(Stop::Retry) => continue,
            Err(Stop::Fail { check, evidence, error }) => return Some((check, evidence, error)),
        }
    }
    Some(("generator".into(), None, Some(format!("hypotheses not met within {MAX_ATTEMPTS} draws"))))
}
