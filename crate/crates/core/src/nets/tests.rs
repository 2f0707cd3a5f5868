use super::*;
use crate::index_measure::{DirectedSetMeasure, MeasureValue, Predicate, SetExpr};
use crate::lattice::{Element, RieszSpace};
use crate::rational::{one, q, qi, zero};
use crate::verdict::Clause;

fn v2(a: i64, b: i64) -> Element {
    Element::vector(vec![qi(a), qi(b)])
}

fn seq0() -> Element {
    RieszSpace::FinSuppSeq.zero()
}

fn squares() -> SetExpr {
    SetExpr::pred(Predicate::squares())
}

fn harmonic(u: Element) -> Net {
    Net::from_tail(u.space(), TailRule::Harmonic(u)).unwrap()
}

/// `(e₁, 0, e₂, 0, ...)`.
fn c0_net() -> Net {
    Net::from_tail(RieszSpace::FinSuppSeq, TailRule::UnitSweep { offset: 1, period: 2 }).unwrap()
}

fn spike(set: SetExpr, base: TailRule) -> Net {
    Net::from_tail(RieszSpace::FinSuppSeq, TailRule::SpikeOn { set, spike: Element::unit(1), base: Box::new(base) })
        .unwrap()
}

fn zero_tail() -> TailRule {
    TailRule::Constant(seq0())
}

#[test]
fn eval_examples() {
    assert_eq!(harmonic(Element::vector(vec![one(), one()])).eval(4), Element::vector(vec![q(1, 4), q(1, 4)]));
    assert_eq!(spike(squares(), zero_tail()).eval(9), Element::unit(1));
    assert_eq!(spike(squares(), zero_tail()).eval(10), seq0());
    let net =
        Net::new(RieszSpace::Rationals, vec![Element::scalar(qi(5))], TailRule::Constant(Element::scalar(zero())))
            .unwrap();
    assert_eq!(net.eval(1), Element::scalar(qi(5)));
    assert_eq!(net.eval(2), Element::scalar(zero()));
    let c0 = c0_net();
    assert_eq!(c0.eval(1), Element::unit(1));
    assert_eq!(c0.eval(2), seq0());
    assert_eq!(c0.eval(5), Element::unit(3));
}

#[test]
fn prefix_must_share_the_space() {
    let err = Net::new(RieszSpace::Rationals, vec![v2(1, 1)], TailRule::Constant(Element::scalar(zero())));
    assert!(matches!(err, Err(NetError::InvalidNet(_))));
    let bad_ratio = Net::from_tail(RieszSpace::Rationals, TailRule::Geometric(Element::scalar(one()), qi(2)));
    assert!(matches!(bad_ratio, Err(NetError::InvalidNet(_))));
}

#[test]
fn decreasing_examples() {
    let h = harmonic(v2(1, 3));
    assert!(is_decreasing_on(&h, &SetExpr::naturals(), DEFAULT_HORIZON).unwrap().accepted);

    let s = spike(SetExpr::evens(), zero_tail());
    let v = is_decreasing_on(&s, &SetExpr::naturals(), DEFAULT_HORIZON).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.evidence.violating_pair, Some((1, 2)));
    assert!(is_decreasing_on(&s, &SetExpr::odds(), DEFAULT_HORIZON).unwrap().accepted);

    assert!(matches!(is_decreasing_on(&h, &SetExpr::empty(), DEFAULT_HORIZON), Err(NetError::EmptyDelta(_))));
    let finite = is_decreasing_on(&h, &SetExpr::fin([1, 2, 3]), DEFAULT_HORIZON).unwrap();
    assert!(!finite.accepted);
    assert_eq!(finite.evidence.clause, Clause::Cofinality);
}

#[test]
fn increase_hidden_in_the_prefix_is_found() {
    let net = Net::new(
        RieszSpace::Rationals,
        vec![Element::scalar(one()), Element::scalar(qi(2))],
        TailRule::Harmonic(Element::scalar(one())),
    )
    .unwrap();
    let v = is_decreasing_on(&net, &SetExpr::naturals(), DEFAULT_HORIZON).unwrap();
    assert_eq!(v.evidence.violating_pair, Some((1, 2)));
    // The prefix-to-tail link: 1/3 at n = 3 follows 2 at n = 2.
    assert!(is_decreasing_on(&net, &SetExpr::at_least(2), DEFAULT_HORIZON).unwrap().accepted);
}

#[test]
fn infimum_examples() {
    let full = SetExpr::naturals();
    assert_eq!(infimum_on(&harmonic(v2(1, 2)), &full, 64).unwrap(), Some(v2(0, 0)));
    assert_eq!(infimum_on(&Net::constant(v2(3, -1)), &full, 64).unwrap(), Some(v2(3, -1)));
    let g = Net::from_tail(RieszSpace::RationalVector(2), TailRule::Geometric(v2(1, 5), q(1, 2))).unwrap();
    assert_eq!(infimum_on(&g, &full, 64).unwrap(), Some(v2(0, 0)));
    let up = harmonic(v2(-1, 0));
    assert!(matches!(infimum_on(&up, &full, 64), Err(NetError::NotDecreasing(_))));
}

#[test]
fn order_convergence_examples() {
    let x = v2(2, -1);
    let u = v2(1, 2);
    let net = harmonic(u.clone()).add(&Net::constant(x.clone())).unwrap();
    assert!(check_order_conv(&net, &x, &harmonic(u.clone())).unwrap().accepted);

    let slower = harmonic(u.scale(&q(1, 2)));
    let v = check_order_conv(&net, &x, &slower).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.evidence.clause, Clause::Domination);
    assert_eq!(v.evidence.violating_index, Some(1));

    let c = Net::constant(x.clone());
    assert!(check_order_conv(&c, &x, &Net::constant(v2(0, 0))).unwrap().accepted);

    let not_null = Net::constant(v2(1, 1));
    let v = check_order_conv(&c, &x, &not_null).unwrap();
    assert_eq!(v.evidence.clause, Clause::Infimum);
}

#[test]
fn c0_example_is_not_order_convergent() {
    let net = c0_net();
    let dominating = [
        Net::constant(seq0()),
        Net::constant(Element::seq([(1, qi(8)), (2, qi(8)), (3, qi(8))])),
        harmonic(Element::seq([(1, qi(4)), (5, one())])),
        Net::from_tail(RieszSpace::FinSuppSeq, TailRule::Geometric(Element::unit(2), q(1, 2))).unwrap(),
    ];
    for y in &dominating {
        let v = check_order_conv(&net, &seq0(), y).unwrap();
        assert!(!v.accepted, "{y}");
        assert_eq!(v.evidence.clause, Clause::Unbounded, "{y}");
        assert!(v.evidence.violating_index.unwrap() % 2 == 1);
    }
}

#[test]
fn st_decreasing_examples() {
    let u = v2(1, 1);
    let h = harmonic(u.clone());
    let pd = DirectedSetMeasure::PeriodicDensity;
    assert!(check_st_decreasing(&h, &v2(0, 0), &SetExpr::naturals(), &pd).unwrap().accepted);

    let s = spike(squares(), TailRule::Harmonic(Element::unit(1)));
    let off = SetExpr::complement(squares());
    let v = check_st_decreasing(&s, &seq0(), &off, &DirectedSetMeasure::prefix_bounds()).unwrap();
    assert!(v.accepted);
    assert!(matches!(
        check_st_decreasing(&s, &seq0(), &off, &pd),
        Err(NetError::Measure(_)) | Err(NetError::UndeterminedMeasure { .. })
    ));

    let v = check_st_decreasing(&h, &v2(0, 0), &SetExpr::evens(), &pd).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.evidence.clause, Clause::Measure);
    assert_eq!(v.evidence.measure, Some(MeasureValue::Exact(q(1, 2))));
    assert!(v.to_string().contains("μ(Δ) = 1/2"));

    let wrong = check_st_decreasing(&h, &v2(1, 0), &SetExpr::naturals(), &pd).unwrap();
    assert!(!wrong.accepted);
    assert_eq!(wrong.evidence.clause, Clause::Infimum);
}

#[test]
fn st_order_convergence_examples() {
    let mu = DirectedSetMeasure::prefix_bounds();
    let s = spike(squares(), zero_tail());
    let p = Net::constant(seq0());
    let off = Witness { p: p.clone(), delta: SetExpr::complement(squares()) };
    assert!(check_st_order_conv(&s, &seq0(), &off, &mu).unwrap().accepted);
    let full = Witness { p, delta: SetExpr::naturals() };
    let v = check_st_order_conv(&s, &seq0(), &full, &mu).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.evidence.clause, Clause::Domination);
    assert_eq!(v.evidence.violating_index, Some(1));

    let x = v2(1, 1);
    let u = v2(3, 1);
    let net = harmonic(u.clone()).add(&Net::constant(x.clone())).unwrap();
    let w = Witness { p: harmonic(u), delta: SetExpr::naturals() };
    for mu in [DirectedSetMeasure::PeriodicDensity, DirectedSetMeasure::prefix_bounds()] {
        assert!(check_st_order_conv(&net, &x, &w, &mu).unwrap().accepted);
    }
}

#[test]
fn c0_example_under_density() {
    let net = c0_net();
    let e = exceptional_set(&net, &seq0(), &Net::constant(seq0())).unwrap();
    assert_eq!(e, SetExpr::odds());
    assert_eq!(DirectedSetMeasure::PeriodicDensity.eval(&e).unwrap(), MeasureValue::Exact(q(1, 2)));
    // With mass on the evens the zero witness works.
    let evens = DirectedSetMeasure::conditional(SetExpr::evens()).unwrap();
    let w = Witness { p: Net::constant(seq0()), delta: SetExpr::evens() };
    assert!(check_st_order_conv(&net, &seq0(), &w, &evens).unwrap().accepted);
    let v = check_st_order_conv(&net, &seq0(), &w, &DirectedSetMeasure::PeriodicDensity).unwrap();
    assert_eq!(v.evidence.measure, Some(MeasureValue::Exact(q(1, 2))));
}

#[test]
fn exceptional_set_examples() {
    let s = spike(squares(), zero_tail());
    let e = exceptional_set(&s, &seq0(), &Net::constant(seq0())).unwrap();
    for n in 1..2000 {
        assert_eq!(e.contains_nat(n), squares().contains_nat(n), "n = {n}");
    }
    let x = v2(1, 2);
    let p = harmonic(v2(1, 1));
    assert_eq!(exceptional_set(&Net::constant(x.clone()), &x, &p).unwrap(), SetExpr::empty());

    // 1/n exceeds 1/10 exactly below n = 10.
    let net = harmonic(Element::scalar(one()));
    let p = Net::from_tail(RieszSpace::Rationals, TailRule::Constant(Element::scalar(q(1, 10)))).unwrap();
    let e = exceptional_set(&net, &Element::scalar(zero()), &p).unwrap();
    assert_eq!(e, SetExpr::fin(1..=9));
}

#[test]
fn mask_examples() {
    let one_net = Net::constant(Element::scalar(one()));
    let m = mask(&one_net, &SetExpr::evens()).unwrap();
    assert_eq!(m.eval(3), Element::scalar(zero()));
    assert_eq!(m.eval(4), Element::scalar(one()));
    let h = Net::new(RieszSpace::RationalVector(2), vec![v2(7, 7)], TailRule::Harmonic(v2(1, 2))).unwrap();
    let full = mask(&h, &SetExpr::naturals()).unwrap();
    for n in 1..100 {
        assert_eq!(full.eval(n), h.eval(n));
    }
    let odd = mask(&c0_net(), &SetExpr::odds()).unwrap();
    for k in 0..50 {
        assert_eq!(odd.eval(2 * k + 1), Element::unit(k + 1));
        assert_eq!(odd.eval(2 * k + 2), seq0());
    }
}

#[test]
fn combine_simplifies_closed_forms() {
    let u = v2(1, 2);
    let h = harmonic(u.clone());
    let s = combine(&h, &Net::constant(v2(0, 0)), BinOp::Sup).unwrap();
    assert_eq!(s.tail(), &TailRule::Harmonic(u.clone()));
    let a = combine(&h, &harmonic(v2(3, -1)), BinOp::Add).unwrap();
    assert_eq!(a.tail(), &TailRule::Harmonic(v2(4, 1)));
    let d = combine(&h, &harmonic(v2(3, -1)), BinOp::Sub).unwrap();
    for n in 1..50 {
        assert_eq!(d.eval(n), h.eval(n).sub(&harmonic(v2(3, -1)).eval(n)).unwrap());
    }
    let mismatch = combine(&h, &Net::constant(Element::scalar(one())), BinOp::Add);
    assert!(matches!(mismatch, Err(NetError::Lattice(_))));
}

#[test]
fn subnet_examples() {
    let net = harmonic(Element::scalar(one()));
    let (sub, v) = subnet(&net, &Selector::Inclusion(SetExpr::evens()), 32).unwrap();
    assert!(v.accepted);
    assert_eq!(sub.eval(3), Element::scalar(q(1, 6)));
    assert!(matches!(
        subnet(&net, &Selector::Inclusion(SetExpr::fin([1, 2, 3])), 32),
        Err(NetError::NotCofinal { alpha: 4 })
    ));
    let (sq, v) = subnet(&net, &Selector::Map(IndexMap::Power(2)), 32).unwrap();
    assert!(v.accepted);
    for k in 1..30 {
        assert_eq!(sq.eval(k), net.eval(k * k));
    }
    // Reindexed nets evaluate but are opaque to the symbolic checks.
    assert!(matches!(is_decreasing_on(&sq, &SetExpr::naturals(), 8), Err(NetError::Undetermined(_))));
}

#[test]
fn ru_examples() {
    let x = v2(1, -1);
    let u = v2(2, 1);
    let net = harmonic(u.clone()).add(&Net::constant(x.clone())).unwrap();
    let v = ru_check(&net, &x, &u, 16).unwrap();
    assert!(v.accepted);
    assert!(v.evidence.note.unwrap().contains("α_2 = 2"));

    let c0 = c0_net();
    let v = ru_check(&c0, &seq0(), &Element::seq([(1, qi(100)), (2, qi(100))]), 16).unwrap();
    assert!(!v.accepted);
    assert_eq!(v.evidence.clause, Clause::Unbounded);

    let c = Net::constant(x.clone());
    assert!(ru_check(&c, &x, &v2(0, 0), 16).unwrap().accepted);
    assert!(matches!(ru_check(&c, &x, &v2(-1, 0), 16), Err(NetError::NotPositive(_))));
}

#[test]
fn witness_search_examples() {
    let mu = DirectedSetMeasure::prefix_bounds();
    let s = spike(squares(), TailRule::Harmonic(Element::unit(2)));
    match witness_search(&s, &seq0(), &mu, &Templates::default()).unwrap() {
        SearchOutcome::Found { witness, verdict } => {
            assert!(verdict.accepted);
            assert_eq!(witness.delta, SetExpr::complement(squares()));
            assert_eq!(witness.p.tail(), &TailRule::Harmonic(Element::unit(2)));
        }
        other => panic!("{other:?}"),
    }

    let x = v2(1, 1);
    let net = harmonic(v2(1, 2)).add(&Net::constant(x.clone())).unwrap();
    match witness_search(&net, &x, &mu, &Templates::default()).unwrap() {
        SearchOutcome::Found { witness, .. } => assert_eq!(witness.delta, SetExpr::naturals()),
        other => panic!("{other:?}"),
    }

    let found =
        witness_search(&c0_net(), &seq0(), &DirectedSetMeasure::PeriodicDensity, &Templates::default()).unwrap();
    assert!(matches!(found, SearchOutcome::NotFound { .. }));
}
