//! Property tests of the library invariants over seeded and shrinkable
//! inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stnet_core::index_measure::{
    density, density_trace, measure_eval, DirectedSetMeasure, MeasureValue, Predicate, Schedule, SetExpr,
};
use stnet_core::lattice::{birkhoff_check, Element, RieszSpace};
use stnet_core::nets::{check_order_conv, check_st_order_conv, exceptional_set, infimum_on, is_decreasing_on, Witness};
use stnet_core::rational::{one, q, zero, Q};
use stnet_core::suite::gen::{measure_is, monotone_net, null_set, order_case, periodic_set, random_element, st_case};
use stnet_core::syntax::{parse_element, parse_net, parse_netspec, parse_set, NetSpec, StClaim};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exact(v: MeasureValue) -> Q {
    v.exact().cloned().expect("exact value")
}

fn measures() -> Vec<DirectedSetMeasure> {
    vec![
        DirectedSetMeasure::PeriodicDensity,
        DirectedSetMeasure::prefix_bounds(),
        DirectedSetMeasure::conditional(SetExpr::evens()).unwrap(),
    ]
}

fn rational() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn space() -> impl Strategy<Value = RieszSpace> {
    prop_oneof![
        Just(RieszSpace::Rationals),
        (1usize..=4).prop_map(RieszSpace::RationalVector),
        Just(RieszSpace::FinSuppSeq),
    ]
}

fn element(space: RieszSpace) -> BoxedStrategy<Element> {
    match space {
        RieszSpace::Rationals => rational().prop_map(Element::scalar).boxed(),
        RieszSpace::RationalVector(n) => prop::collection::vec(rational(), n).prop_map(Element::vector).boxed(),
        RieszSpace::FinSuppSeq => {
            prop::collection::btree_map(1u64..=6, rational(), 0..=4).prop_map(Element::seq).boxed()
        }
    }
}

fn quadruple() -> impl Strategy<Value = [Element; 4]> {
    space().prop_flat_map(|s| [element(s), element(s), element(s), element(s)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn density_of_complement(seed in any::<u64>()) {
        let s = periodic_set(&mut rng(seed), 3);
        let sch = Schedule::default();
        let d = exact(density(&s, &sch).unwrap());
        let dc = exact(density(&SetExpr::complement(s), &sch).unwrap());
        prop_assert_eq!(d + dc, one());
    }

    #[test]
    fn density_is_additive_on_disjoint_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = periodic_set(&mut r, 3);
        let b = SetExpr::minus(periodic_set(&mut r, 3), a.clone());
        let sch = Schedule::default();
        let du = exact(density(&SetExpr::union(a.clone(), b.clone()), &sch).unwrap());
        prop_assert_eq!(du, exact(density(&a, &sch).unwrap()) + exact(density(&b, &sch).unwrap()));
    }

    #[test]
    fn progressions_have_density_one_over_period(d in 1u64..=64, a in 1u64..=64) {
        prop_assume!(a <= d);
        prop_assert_eq!(density(&SetExpr::ap(a, d), &Schedule::default()).unwrap(), MeasureValue::Exact(q(1, d as i64)));
    }

    #[test]
    fn finite_sets_are_null(items in prop::collection::btree_set(1u64..500, 0..12)) {
        let s = SetExpr::fin(items.iter().copied());
        for mu in measures() {
            prop_assert_eq!(measure_eval(&mu, &s).unwrap(), MeasureValue::Exact(zero()));
        }
        let atoms = SetExpr::listed(items.iter().map(|n| format!("a{n}")));
        prop_assert_eq!(measure_eval(&DirectedSetMeasure::CoCountable, &atoms).unwrap(), MeasureValue::Exact(zero()));
    }

    #[test]
    fn lattice_laws(v in quadruple()) {
        let [x, y, z, w] = v;
        let sup = |a: &Element, b: &Element| a.sup(b).unwrap();
        let inf = |a: &Element, b: &Element| a.inf(b).unwrap();
        prop_assert_eq!(sup(&x, &y), sup(&y, &x));
        prop_assert_eq!(inf(&x, &y), inf(&y, &x));
        prop_assert_eq!(sup(&sup(&x, &y), &z), sup(&x, &sup(&y, &z)));
        prop_assert_eq!(inf(&inf(&x, &y), &z), inf(&x, &inf(&y, &z)));
        prop_assert_eq!(sup(&x, &inf(&x, &y)), x.clone());
        prop_assert_eq!(sup(&x.add(&z).unwrap(), &y.add(&z).unwrap()), sup(&x, &y).add(&z).unwrap());
        prop_assert_eq!(x.pos().sub(&x.neg_part()).unwrap(), x.clone());
        prop_assert_eq!(x.pos().add(&x.neg_part()).unwrap(), x.abs());
        prop_assert!(inf(&x.pos(), &x.neg_part()).is_zero());
        prop_assert!(birkhoff_check(&x, &y, &z, &w).unwrap());
    }

    #[test]
    fn elements_print_and_parse(v in space().prop_flat_map(element)) {
        prop_assert_eq!(parse_element(&v.to_string(), v.space()).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bounds_tighten_along_the_schedule(seed in any::<u64>(), k in 2u32..=5) {
        let set = SetExpr::union(SetExpr::pred(Predicate::Powers(k)), periodic_set(&mut rng(seed), 2));
        let sch = Schedule::new([64, 256, 1024, 4096, 16384]);
        let stages = density_trace(&set, &sch).unwrap();
        for w in stages.windows(2) {
            prop_assert!(w[0].lo <= w[1].lo && w[0].hi >= w[1].hi);
        }
    }

    #[test]
    fn sets_print_and_parse(seed in any::<u64>()) {
        let mut r = rng(seed);
        for mu in measures() {
            let s = SetExpr::union(periodic_set(&mut r, 3), null_set(&mut r, &mu));
            prop_assert_eq!(parse_set(&s.to_string()).unwrap(), s);
        }
    }

    #[test]
    fn order_convergence_implies_statistical(seed in any::<u64>(), s in space()) {
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let Ok(case) = order_case(&mut r, s, &limit) else { return Ok(()) };
        prop_assert!(check_order_conv(&case.net, &limit, &case.dominating).unwrap().accepted);
        let w = Witness { p: case.dominating.clone(), delta: SetExpr::naturals() };
        for mu in measures() {
            prop_assert!(check_st_order_conv(&case.net, &limit, &w, &mu).unwrap().accepted, "{}", mu.name());
        }
    }

    #[test]
    fn masking_by_the_full_set_changes_nothing(seed in any::<u64>(), s in space()) {
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let Ok(case) = st_case(&mut r, s, &DirectedSetMeasure::prefix_bounds(), &limit) else { return Ok(()) };
        let masked = case.net.mask(&SetExpr::naturals()).unwrap();
        for n in 1..=64 {
            prop_assert_eq!(masked.eval(n), case.net.eval(n));
        }
    }

    #[test]
    fn null_exceptional_set_matches_acceptance(seed in any::<u64>(), s in space(), m in 0usize..3) {
        let mu = &measures()[m];
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let Ok(case) = st_case(&mut r, s, mu, &limit) else { return Ok(()) };
        let p = &case.witness.p;
        let e = exceptional_set(&case.net, &limit, p).unwrap();
        let null = measure_is(mu, &e, &zero());
        let w = Witness { p: p.clone(), delta: SetExpr::complement(e.clone()) };
        let accepted = matches!(check_st_order_conv(&case.net, &limit, &w, mu), Ok(v) if v.accepted);
        prop_assert_eq!(null, accepted, "exceptional set {}", e);
    }

    #[test]
    fn restriction_to_a_measure_one_subset(seed in any::<u64>(), s in space(), m in 0usize..3) {
        let mu = &measures()[m];
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let Ok(case) = st_case(&mut r, s, mu, &limit) else { return Ok(()) };
        let sigma = SetExpr::complement(null_set(&mut r, mu));
        prop_assume!(measure_is(mu, &sigma, &one()));
        let gamma = SetExpr::inter(case.witness.delta.clone(), sigma);
        let w = Witness { p: case.witness.p.clone(), delta: gamma };
        prop_assert!(check_st_order_conv(&case.net, &limit, &w, mu).unwrap().accepted);
    }

    #[test]
    fn monotone_limits_are_infima(seed in any::<u64>(), dim in 1usize..=3) {
        let s = RieszSpace::RationalVector(dim);
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let net = monotone_net(&mut r, s, &limit, false, false).unwrap();
        prop_assume!(is_decreasing_on(&net, &SetExpr::naturals(), 32).map(|v| v.accepted).unwrap_or(false));
        let w = Witness { p: net.minus_element(&limit).unwrap().abs(), delta: SetExpr::naturals() };
        for mu in measures() {
            if check_st_order_conv(&net, &limit, &w, &mu).unwrap().accepted {
                prop_assert_eq!(infimum_on(&net, &SetExpr::naturals(), 32).unwrap(), Some(limit.clone()));
            }
        }
    }

    #[test]
    fn netspec_documents_round_trip(seed in any::<u64>(), s in space(), m in 0usize..3) {
        let mu = measures()[m].clone();
        let mut r = rng(seed);
        let limit = random_element(&mut r, s);
        let Ok(case) = st_case(&mut r, s, &mu, &limit) else { return Ok(()) };
        let mut spec = NetSpec::new(case.net.clone());
        spec.st = Some(StClaim { limit: limit.clone(), witness: case.witness.clone() });
        spec.measure = Some(mu);
        let printed = spec.to_string();
        let back = parse_netspec(&printed).unwrap();
        for n in 1..=64 {
            prop_assert_eq!(back.net.eval(n), case.net.eval(n));
        }
        prop_assert_eq!(back.st.as_ref(), spec.st.as_ref());
        prop_assert_eq!(back.to_string(), printed);
        prop_assert_eq!(parse_net(&case.net.to_string(), s).unwrap(), case.net);
    }
}
