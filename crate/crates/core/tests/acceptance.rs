//! Acceptance criteria, run in sequence so the timings are not skewed by
//! parallel tests. Prints one line per criterion and exits non-zero if any
//! fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stnet_core::index_measure::{axioms_check, density, DirectedSetMeasure, MeasureValue, Schedule, SetExpr};
use stnet_core::lattice::{Element, RieszSpace};
use stnet_core::nets::{check_st_order_conv, infimum_on, witness_search, BinOp, SearchOutcome, Templates, Witness};
use stnet_core::rational::{one, q, Q};
use stnet_core::suite::gen::{monotone_net, periodic_set, random_element, random_positive, sample_sets, small_q};
use stnet_core::suite::{
    birkhoff_selftest, c0_example_report, corrupted_measure, gen_st_convergent_net, run_all, StCase, Status,
    SuiteConfig, SuiteReport,
};
use stnet_core::verdict::Clause;

const SPACES: [RieszSpace; 3] = [RieszSpace::Rationals, RieszSpace::RationalVector(3), RieszSpace::FinSuppSeq];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exact(v: Result<MeasureValue, impl std::fmt::Debug>) -> Option<Q> {
    match v {
        Ok(MeasureValue::Exact(x)) => Some(x),
        _ => None,
    }
}

fn density_exactness() -> Outcome {
    let schedule = Schedule::default();
    let mut bad = Vec::new();
    for d in 1..=64u64 {
        for a in 1..=d {
            if exact(density(&SetExpr::ap(a, d), &schedule)) != Some(q(1, d as i64)) {
                bad.push(format!("ap({a},{d})"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut pairs_bad = 0;
    for _ in 0..1000 {
        let a = periodic_set(&mut rng, 3);
        let b = periodic_set(&mut rng, 3);
        let da = exact(density(&a, &schedule));
        let dc = exact(density(&SetExpr::complement(a.clone()), &schedule));
        let b_rest = SetExpr::inter(b, SetExpr::complement(a.clone()));
        let db = exact(density(&b_rest, &schedule));
        let du = exact(density(&SetExpr::union(a, b_rest), &schedule));
        let ok = match (da, dc, db, du) {
            (Some(da), Some(dc), Some(db), Some(du)) => dc == one() - &da && du == da + db,
            _ => false,
        };
        if !ok {
            pairs_bad += 1;
        }
    }
    outcome(
        bad.is_empty() && pairs_bad == 0,
        format!(
            "2080 progressions, {} wrong; 1000 pairs, {pairs_bad} with inexact complement or additivity",
            bad.len()
        ),
    )
}

fn measure_axioms() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, mu) in [DirectedSetMeasure::PeriodicDensity, DirectedSetMeasure::CoCountable].iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
        let samples = sample_sets(&mut rng, mu, 500);
        let report = axioms_check(mu, &samples, 7);
        ok &= samples.len() == 500 && report.passed();
        lines.push(format!("{} {}", mu.name(), if report.passed() { "passes" } else { "fails" }));
    }
    let corrupted = corrupted_measure();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut samples = sample_sets(&mut rng, &DirectedSetMeasure::PeriodicDensity, 500);
    samples.extend([SetExpr::evens(), SetExpr::odds()]);
    let report = axioms_check(&corrupted, &samples, 7);
    let witness = report
        .axioms
        .iter()
        .flat_map(|a| a.failures.iter().map(move |f| (a.axiom, f)))
        .find(|(_, f)| f.sets.len() >= 2);
    match witness {
        Some((axiom, f)) => {
            let sets: Vec<String> = f.sets.iter().map(|s| s.to_string()).collect();
            lines.push(format!("corrupted measure fails {axiom} on {}", sets.join(", ")));
        }
        None => {
            ok = false;
            lines.push("corrupted measure not caught".into());
        }
    }
    outcome(ok, lines.join("; "))
}

fn suite_green(report: &SuiteReport, elapsed: Duration) -> Outcome {
    let failing: Vec<String> = report
        .properties
        .iter()
        .filter(|p| p.status != Status::Pass || p.trials != 500)
        .map(|p| format!("{} ({} failures)", p.name, p.failures.len()))
        .collect();
    let trials: usize = report.properties.iter().map(|p| p.trials).sum();
    let in_time = elapsed < Duration::from_secs(60);
    outcome(
        failing.is_empty() && report.properties.len() == 14 && in_time && report.status == Status::Pass,
        format!(
            "{} properties, {trials} trials, failing: [{}], suite status {:?}, {:.1} s",
            report.properties.len(),
            failing.join(", "),
            report.status,
            elapsed.as_secs_f64()
        ),
    )
}

fn c0_example() -> Outcome {
    let start = Instant::now();
    let r = c0_example_report(&SuiteConfig::default().measures);
    let elapsed = start.elapsed();
    let unbounded = r.order_evidence.as_ref().is_some_and(|e| e.clause == Clause::Unbounded);
    let ok = r.order_rejected
        && unbounded
        && r.exceptional_set == "ap(1,2)"
        && r.exceptional_density == "1/2 (exact)"
        && !r.discrepancy.is_empty()
        && r.reproduced
        && elapsed < Duration::from_secs(1);
    outcome(
        ok,
        format!(
            "{} templates rejected with unbounded evidence: {}; exceptional set {} of density {}; discrepancy flagged; {:.3} s",
            r.dominating_templates,
            r.order_rejected && unbounded,
            r.exceptional_set,
            r.exceptional_density,
            elapsed.as_secs_f64()
        ),
    )
}

fn unit(space: RieszSpace) -> Element {
    space.from_coords([(if space == RieszSpace::FinSuppSeq { 1 } else { 0 }, one())])
}

fn uniqueness_and_linearity() -> Outcome {
    let measures = SuiteConfig::default().measures;
    let mut generated = 0;
    let mut second_limits = 0;
    let mut linear_ok = 0;
    let mut problems = Vec::new();
    // Unpaired cases, keyed by space and measure.
    let mut pending: HashMap<(usize, usize), StCase> = HashMap::new();
    for seed in 0..500u64 {
        let space = SPACES[seed as usize % 3];
        let mi = (seed as usize / 3) % measures.len();
        let mu = &measures[mi];
        let Ok(case) = gen_st_convergent_net(seed, space, mu) else {
            problems.push(format!("seed {seed}: generator exhausted"));
            continue;
        };
        generated += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let other = case.limit.add(&random_positive(&mut rng, space).add(&unit(space)).unwrap()).unwrap();
        if let Ok(SearchOutcome::Found { .. }) = witness_search(&case.net, &other, mu, &Templates::default()) {
            second_limits += 1;
            problems.push(format!("seed {seed}: a second limit {other} was accepted"));
        }
        let key = (seed as usize % 3, mi);
        if let Some(p) = pending.remove(&key) {
            let (s, t) = (small_q(&mut rng, -3, 3), small_q(&mut rng, -3, 3));
            let net = p.net.scale(&s).combine(&case.net.scale(&t), BinOp::Add).unwrap();
            let limit = p.limit.scale(&s).add(&case.limit.scale(&t)).unwrap();
            let witness = Witness {
                p: p.witness.p.scale(&s.abs()).combine(&case.witness.p.scale(&t.abs()), BinOp::Add).unwrap(),
                delta: SetExpr::inter(p.witness.delta.clone(), case.witness.delta.clone()),
            };
            match check_st_order_conv(&net, &limit, &witness, mu) {
                Ok(v) if v.accepted => linear_ok += 1,
                other => problems.push(format!("seed {seed}: combination rejected: {other:?}")),
            }
        } else {
            pending.insert(key, case);
        }
    }
    outcome(
        generated == 500 && second_limits == 0 && problems.is_empty(),
        format!(
            "{generated} nets, {second_limits} second limits accepted, {linear_ok} linear combinations accepted at the combined limit{}",
            problems.first().map(|p| format!("; first problem: {p}")).unwrap_or_default()
        ),
    )
}

fn monotone_bridge() -> Outcome {
    let mu = DirectedSetMeasure::PeriodicDensity;
    let mut checked = 0;
    let mut problems = Vec::new();
    let mut seed = 0u64;
    while checked < 200 && seed < 2000 {
        let space = [RieszSpace::Rationals, RieszSpace::RationalVector(3)][seed as usize % 2];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        seed += 1;
        let limit = random_element(&mut rng, space);
        let Ok(net) = monotone_net(&mut rng, space, &limit, false, false) else { continue };
        let witness = Witness { p: net.minus_element(&limit).unwrap().abs(), delta: SetExpr::naturals() };
        if !matches!(check_st_order_conv(&net, &limit, &witness, &mu), Ok(v) if v.accepted) {
            continue;
        }
        checked += 1;
        match infimum_on(&net, &SetExpr::naturals(), 32) {
            Ok(Some(i)) if i == limit => {}
            other => problems.push(format!("seed {}: infimum {other:?}, limit {limit}", seed - 1)),
        }
    }
    outcome(
        checked == 200 && problems.is_empty(),
        format!(
            "{checked} decreasing st-convergent nets, {} with infimum different from the limit{}",
            problems.len(),
            problems.first().map(|p| format!("; first: {p}")).unwrap_or_default()
        ),
    )
}

fn birkhoff() -> Outcome {
    match birkhoff_selftest(42, 10_000) {
        Ok(r) => outcome(
            r.passed && r.quadruples == 10_000,
            format!("{} quadruples over {}", r.quadruples, r.spaces.join(", ")),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |n: u32, name: &str, start: Instant, o: Outcome| {
        all &= o.passed;
        println!(
            "criterion {n} {}: {name}: {} [{:.2} s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    };

    let t = Instant::now();
    let mut o = density_exactness();
    if t.elapsed() >= Duration::from_secs(5) {
        o.passed = false;
        o.detail.push_str("; over the 5 s budget");
    }
    report(1, "density exactness", t, o);

    let t = Instant::now();
    report(2, "measure axioms", t, measure_axioms());

    let t = Instant::now();
    let first = run_all(&SuiteConfig::default());
    let elapsed = t.elapsed();
    let first = match first {
        Ok(r) => {
            report(3, "theorem suite, seed 42, 500 trials", t, suite_green(&r, elapsed));
            Some(r)
        }
        Err(e) => {
            report(3, "theorem suite, seed 42, 500 trials", t, outcome(false, e.to_string()));
            None
        }
    };

    let t = Instant::now();
    report(4, "c0 example", t, c0_example());

    let t = Instant::now();
    report(5, "uniqueness and linearity", t, uniqueness_and_linearity());

    let t = Instant::now();
    report(6, "monotone bridge", t, monotone_bridge());

    let t = Instant::now();
    let o = match (first, run_all(&SuiteConfig::default())) {
        (Some(a), Ok(b)) => {
            let (ja, jb) = (a.to_json(), b.to_json());
            outcome(ja == jb, format!("two seed-42 reports, {} bytes, identical: {}", ja.len(), ja == jb))
        }
        (_, Err(e)) => outcome(false, e.to_string()),
        (None, _) => outcome(false, "first run failed"),
    };
    report(7, "determinism", t, o);

    let t = Instant::now();
    report(8, "birkhoff inequality", t, birkhoff());

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
