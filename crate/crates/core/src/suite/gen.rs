//! Seeded random elements, sets and nets. Every generated case is
//! re-verified by the checkers before it is handed out; a draw that the
//! checker does not accept is discarded and redrawn.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::index_measure::{DirectedSetMeasure, MeasureValue, Predicate, SetExpr};
use crate::lattice::{Element, RieszSpace};
use crate::nets::{check_order_conv, check_st_order_conv, BinOp, Net, NetError, TailRule, UnOp, Witness};
use crate::rational::{one, q, qi, Q};

/// Draws per generated case before the generator gives up.
pub const MAX_ATTEMPTS: usize = 64;
/// Coordinates used by finitely supported sequences.
const SEQ_KEYS: u64 = 5;

pub fn small_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    q(rng.gen_range(lo..=hi), rng.gen_range(1..=4))
}

pub fn random_element(rng: &mut ChaCha8Rng, space: RieszSpace) -> Element {
    coords_in(rng, space, |rng| small_q(rng, -6, 6))
}

/// A positive element, non-zero with high probability.
pub fn random_positive(rng: &mut ChaCha8Rng, space: RieszSpace) -> Element {
    loop {
        let e = coords_in(rng, space, |rng| small_q(rng, 0, 6));
        if !e.is_zero() || rng.gen_bool(0.05) {
            return e;
        }
    }
}

fn coords_in(rng: &mut ChaCha8Rng, space: RieszSpace, mut draw: impl FnMut(&mut ChaCha8Rng) -> Q) -> Element {
    match space {
        RieszSpace::Rationals => Element::scalar(draw(rng)),
        RieszSpace::RationalVector(n) => Element::vector((0..n).map(|_| draw(rng)).collect()),
        RieszSpace::FinSuppSeq => {
            let size = rng.gen_range(0..=3);
            let mut keys: Vec<u64> = (1..=SEQ_KEYS).collect();
            keys.shuffle(rng);
            Element::seq(keys.into_iter().take(size).map(|k| (k, draw(rng))).collect::<Vec<_>>())
        }
    }
}

fn ratio(rng: &mut ChaCha8Rng) -> Q {
    [q(1, 2), q(1, 3), q(2, 3), q(3, 4)].choose(rng).expect("non-empty").clone()
}

/// A random eventually periodic subset of ℕ.
pub fn periodic_set(rng: &mut ChaCha8Rng, depth: u32) -> SetExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..4) {
            0 => SetExpr::fin((0..rng.gen_range(0..6)).map(|_| rng.gen_range(1..=40)).collect::<Vec<_>>()),
            1 => SetExpr::at_least(rng.gen_range(1..=30)),
            _ => {
                let d = rng.gen_range(1..=12);
                SetExpr::ap(rng.gen_range(1..=d), d)
            }
        };
    }
    let a = periodic_set(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => SetExpr::union(a, periodic_set(rng, depth - 1)),
        1 => SetExpr::inter(a, periodic_set(rng, depth - 1)),
        2 => SetExpr::minus(a, periodic_set(rng, depth - 1)),
        _ => SetExpr::complement(a),
    }
}

fn finite_set(rng: &mut ChaCha8Rng) -> SetExpr {
    SetExpr::fin((0..rng.gen_range(1..=6)).map(|_| rng.gen_range(1..=48)).collect::<Vec<_>>())
}

fn null_predicate(rng: &mut ChaCha8Rng) -> SetExpr {
    SetExpr::pred(match rng.gen_range(0..3) {
        0 => Predicate::squares(),
        1 => Predicate::Powers(rng.gen_range(3..=4)),
        _ => Predicate::PowersOfTwo,
    })
}

/// A set that `mu` should assign measure 0, drawn from the sets its field
/// can express: finite lists, density-zero predicates, and for a
/// conditional measure the complement of its base.
pub fn null_set(rng: &mut ChaCha8Rng, mu: &DirectedSetMeasure) -> SetExpr {
    match mu {
        DirectedSetMeasure::PrefixBoundsDensity { .. } => match rng.gen_range(0..4) {
            0 => finite_set(rng),
            1 => SetExpr::union(null_predicate(rng), finite_set(rng)),
            _ => null_predicate(rng),
        },
        DirectedSetMeasure::Conditional { base, .. } => match rng.gen_range(0..4) {
            0 => finite_set(rng),
            1 => SetExpr::pred(Predicate::squares()),
            _ => SetExpr::complement(base.clone()),
        },
        _ => finite_set(rng),
    }
}

/// `mu(s)` is exactly `v`.
pub fn measure_is(mu: &DirectedSetMeasure, s: &SetExpr, v: &Q) -> bool {
    matches!(mu.eval(s), Ok(MeasureValue::Exact(m)) if &m == v)
}

/// Sample sets for the measure axioms, drawn from `mu`'s field.
pub fn sample_sets(rng: &mut ChaCha8Rng, mu: &DirectedSetMeasure, count: usize) -> Vec<SetExpr> {
    (0..count)
        .map(|_| match mu {
            DirectedSetMeasure::CoCountable => {
                let atoms: Vec<String> =
                    (0..rng.gen_range(0..4)).map(|_| format!("a{}", rng.gen_range(0..8))).collect();
                let s = if rng.gen_bool(0.5) { SetExpr::listed(atoms) } else { SetExpr::colisted(atoms) };
                if rng.gen_bool(0.3) {
                    let more: Vec<String> = (0..2).map(|_| format!("a{}", rng.gen_range(0..8))).collect();
                    SetExpr::union(s, SetExpr::listed(more))
                } else {
                    s
                }
            }
            DirectedSetMeasure::PrefixBoundsDensity { .. } if rng.gen_bool(0.2) => {
                SetExpr::union(null_predicate(rng), periodic_set(rng, 2))
            }
            _ => periodic_set(rng, 3),
        })
        .collect()
}

/// The tail of a positive dominating net decreasing to 0.
pub fn dominating_tail(rng: &mut ChaCha8Rng, space: RieszSpace) -> TailRule {
    let u = random_positive(rng, space);
    match rng.gen_range(0..4) {
        0 | 1 => TailRule::Harmonic(u),
        2 => TailRule::Geometric(u, ratio(rng)),
        _ => TailRule::combine(
            BinOp::Add,
            TailRule::Harmonic(u),
            TailRule::Geometric(random_positive(rng, space), ratio(rng)),
        ),
    }
}

/// `z` clamped into `[−y, y]`.
fn clamp(z: TailRule, y: &TailRule) -> TailRule {
    TailRule::combine(BinOp::Inf, TailRule::combine(BinOp::Sup, z, TailRule::unary(UnOp::Neg, y.clone())), y.clone())
}

fn clamp_elem(z: &Element, y: &Element) -> Element {
    z.sup(&y.neg()).and_then(|v| v.inf(y)).expect("same space")
}

/// A tail `d` with `|d_n| ≤ y_n` for every `n`.
fn perturbation(rng: &mut ChaCha8Rng, space: RieszSpace, y: &TailRule) -> TailRule {
    let s = [qi(-1), q(-1, 2), q(1, 3), one()].choose(rng).expect("non-empty").clone();
    match rng.gen_range(0..5) {
        0 => TailRule::unary(UnOp::Scale(s), y.clone()),
        1 => clamp(TailRule::Constant(random_element(rng, space)), y),
        2 => clamp(TailRule::Harmonic(random_element(rng, space)), y),
        3 => {
            TailRule::Masked { set: periodic_set(rng, 1), inner: Box::new(TailRule::unary(UnOp::Scale(s), y.clone())) }
        }
        _ => clamp(TailRule::Geometric(random_element(rng, space), ratio(rng)), y),
    }
}

/// A net order convergent to `limit`, with its dominating net.
#[derive(Debug, Clone)]
pub struct OrderCase {
    pub net: Net,
    pub limit: Element,
    pub dominating: Net,
}

/// A net statistically order convergent to `limit`, with its witness.
#[derive(Debug, Clone)]
pub struct StCase {
    pub net: Net,
    pub limit: Element,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no accepted case within {MAX_ATTEMPTS} draws")]
    Exhausted,
}

fn draw_order_case(rng: &mut ChaCha8Rng, space: RieszSpace, limit: &Element) -> Result<OrderCase, NetError> {
    let y = if rng.gen_ratio(1, 12) { TailRule::Constant(space.zero()) } else { dominating_tail(rng, space) };
    let dominating = Net::from_tail(space, y.clone())?;
    let d = perturbation(rng, space, &y);
    let prefix = (1..=rng.gen_range(0..=3))
        .map(|n| limit.add(&clamp_elem(&random_element(rng, space), &dominating.eval(n))).expect("same space"))
        .collect();
    let net = Net::new(space, prefix, TailRule::combine(BinOp::Add, TailRule::Constant(limit.clone()), d))?;
    Ok(OrderCase { net, limit: limit.clone(), dominating })
}

/// An order convergent net toward `limit`, accepted by
/// [`check_order_conv`].
pub fn order_case(rng: &mut ChaCha8Rng, space: RieszSpace, limit: &Element) -> Result<OrderCase, GenError> {
    for _ in 0..MAX_ATTEMPTS {
        let Ok(case) = draw_order_case(rng, space, limit) else { continue };
        if matches!(check_order_conv(&case.net, &case.limit, &case.dominating), Ok(v) if v.accepted) {
            return Ok(case);
        }
    }
    Err(GenError::Exhausted)
}

/// Adds spikes on a `mu`-null set to an order convergent net; the witness
/// set avoids them. Roughly one draw in four has no spikes.
pub fn st_case(
    rng: &mut ChaCha8Rng,
    space: RieszSpace,
    mu: &DirectedSetMeasure,
    limit: &Element,
) -> Result<StCase, GenError> {
    for _ in 0..MAX_ATTEMPTS {
        let base = order_case(rng, space, limit)?;
        let (net, delta) = if rng.gen_ratio(3, 4) {
            let set = null_set(rng, mu);
            let spike = random_element(rng, space).scale(&qi(4));
            let tail = TailRule::SpikeOn { set: set.clone(), spike, base: Box::new(base.net.tail().clone()) };
            let Ok(net) = Net::new(space, base.net.prefix().to_vec(), tail) else { continue };
            (net, SetExpr::complement(set))
        } else {
            (base.net, SetExpr::naturals())
        };
        let witness = Witness { p: base.dominating, delta };
        if matches!(check_st_order_conv(&net, limit, &witness, mu), Ok(v) if v.accepted) {
            return Ok(StCase { net, limit: limit.clone(), witness });
        }
    }
    Err(GenError::Exhausted)
}

/// An order bounded net with no convergence structure: large values on a
/// random periodic set, a constant plus a harmonic term elsewhere.
pub fn wild_net(rng: &mut ChaCha8Rng, space: RieszSpace) -> Result<Net, NetError> {
    let set = periodic_set(rng, 2);
    let spike = random_element(rng, space).scale(&qi(3));
    let base = TailRule::combine(
        BinOp::Add,
        TailRule::Constant(random_element(rng, space)),
        TailRule::Harmonic(random_element(rng, space)),
    );
    Net::from_tail(space, TailRule::SpikeOn { set, spike, base: Box::new(base) })
}

fn seeded(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// [`order_case`] from a seed, with a random limit.
pub fn gen_order_convergent_net(seed: u64, space: RieszSpace) -> Result<OrderCase, GenError> {
    let mut rng = seeded(seed);
    let limit = random_element(&mut rng, space);
    order_case(&mut rng, space, &limit)
}

/// [`st_case`] from a seed, with a random limit.
pub fn gen_st_convergent_net(seed: u64, space: RieszSpace, mu: &DirectedSetMeasure) -> Result<StCase, GenError> {
    let mut rng = seeded(seed);
    let limit = random_element(&mut rng, space);
    st_case(&mut rng, space, mu, &limit)
}

/// A monotone net `limit ± y` with a monotone prefix, decreasing unless
/// `increasing`. With `mutate` one prefix entry breaks monotonicity.
pub fn monotone_net(
    rng: &mut ChaCha8Rng,
    space: RieszSpace,
    limit: &Element,
    increasing: bool,
    mutate: bool,
) -> Result<Net, NetError> {
    let y = Net::from_tail(space, dominating_tail(rng, space))?;
    let len = rng.gen_range(0..=3);
    let bump = random_positive(rng, space);
    let mut prefix: Vec<Element> = (1..=len)
        .map(|n| y.eval(n).add(&bump.scale(&Q::from_integer((len + 1 - n).into()))).expect("same space"))
        .collect();
    if mutate {
        // x₂ ≰ x₁ once x₁ = x₂ − kick with kick ≥ 0 non-zero.
        let kick = random_positive(rng, space).add(&first_unit(space)).expect("same space");
        let second = prefix.get(1).cloned().unwrap_or_else(|| y.eval(2));
        let first = second.sub(&kick).expect("same space");
        match prefix.first_mut() {
            Some(p) => *p = first,
            None => prefix.push(first),
        }
    }
    let tail = y.tail().clone();
    let deviation = Net::new(space, prefix, tail)?;
    let signed = if increasing { deviation.scale(&qi(-1)) } else { deviation };
    signed.add(&Net::constant(limit.clone()))
}

fn first_unit(space: RieszSpace) -> Element {
    space.from_coords([(if space == RieszSpace::FinSuppSeq { 1 } else { 0 }, one())])
}
