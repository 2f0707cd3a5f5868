//! Self-tests of the lattice operations: the Birkhoff inequality and the
//! vector-lattice identities on random elements.

use serde::Serialize;

use super::gen::{random_element, random_positive, small_q};
use super::{trial_rng, SuiteError};
use crate::lattice::{archimedean_probe, birkhoff_check, Element, RieszSpace};
use crate::rational::qi;

pub const BIRKHOFF_QUADRUPLES: usize = 10_000;
/// Random triples per space for the identities.
pub const LAW_SAMPLES: usize = 300;

const BIRKHOFF_STREAM: u64 = u64::MAX;
const LAW_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BirkhoffReport {
    pub quadruples: usize,
    pub spaces: Vec<String>,
    pub passed: bool,
}

fn all_spaces() -> [RieszSpace; 3] {
    [RieszSpace::Rationals, RieszSpace::RationalVector(3), RieszSpace::FinSuppSeq]
}

/// `|x∨w − x′∨w′| ≤ |x − x′| + |w − w′|` on `count` quadruples spread over
/// all three spaces. A single `false` is an implementation bug and aborts.
pub fn birkhoff_selftest(seed: u64, count: usize) -> Result<BirkhoffReport, SuiteError> {
    let mut rng = trial_rng(seed, BIRKHOFF_STREAM);
    let spaces = all_spaces();
    for i in 0..count {
        let space = spaces[i % spaces.len()];
        let [x, x2, w, w2] = std::array::from_fn(|_| random_element(&mut rng, space));
        match birkhoff_check(&x, &x2, &w, &w2) {
            Ok(true) => {}
            other => {
                return Err(SuiteError::ImplementationBug(format!(
                    "birkhoff inequality returned {other:?} for x = {x}, x' = {x2}, w = {w}, w' = {w2}"
                )))
            }
        }
    }
    Ok(BirkhoffReport { quadruples: count, spaces: spaces.iter().map(|s| s.to_string()).collect(), passed: true })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

/// Lattice and vector-lattice identities on random triples from each
/// space.
pub fn lattice_laws(seed: u64, spaces: &[RieszSpace], samples: usize) -> LawReport {
    let mut rng = trial_rng(seed, LAW_STREAM);
    let mut report = LawReport { checked: 0, failures: Vec::new() };
    for &space in spaces {
        for _ in 0..samples {
            let [x, y, z] = std::array::from_fn(|_| random_element(&mut rng, space));
            let k = small_q(&mut rng, 0, 5);
            let pos = random_positive(&mut rng, space);
            let laws = laws(&x, &y, &z, &k, &pos);
            for (name, ok) in laws {
                report.checked += 1;
                if !ok {
                    report.failures.push(format!("{name} fails for x = {x}, y = {y}, z = {z} in {space}"));
                }
            }
        }
    }
    report
}

fn laws(x: &Element, y: &Element, z: &Element, k: &crate::rational::Q, pos: &Element) -> Vec<(&'static str, bool)> {
    let sup = |a: &Element, b: &Element| a.sup(b).expect("same space");
    let inf = |a: &Element, b: &Element| a.inf(b).expect("same space");
    let add = |a: &Element, b: &Element| a.add(b).expect("same space");
    let sub = |a: &Element, b: &Element| a.sub(b).expect("same space");
    let zero = x.space().zero();
    let archimedean = pos.is_zero() || matches!(archimedean_probe(pos, 16), Ok(v) if v.accepted);
    vec![
        ("sup_commutes", sup(x, y) == sup(y, x)),
        ("inf_commutes", inf(x, y) == inf(y, x)),
        ("sup_associates", sup(&sup(x, y), z) == sup(x, &sup(y, z))),
        ("absorption", sup(x, &inf(x, y)) == *x && inf(x, &sup(x, y)) == *x),
        ("distributive", inf(x, &sup(y, z)) == sup(&inf(x, y), &inf(x, z))),
        ("translation", sup(&add(x, z), &add(y, z)) == add(&sup(x, y), z)),
        ("homogeneity", sup(&x.scale(k), &y.scale(k)) == sup(x, y).scale(k)),
        ("sup_plus_inf", add(&sup(x, y), &inf(x, y)) == add(x, y)),
        ("parts", sub(&x.pos(), &x.neg_part()) == *x && add(&x.pos(), &x.neg_part()) == x.abs()),
        ("parts_disjoint", inf(&x.pos(), &x.neg_part()) == zero),
        ("abs_triangle", add(x, y).abs().leq(&add(&x.abs(), &y.abs())).unwrap_or(false)),
        ("neg_reverses", x.leq(&sup(x, y)).unwrap_or(false) && sup(x, y).neg() == inf(&x.neg(), &y.neg())),
        ("abs_scale", x.scale(&qi(-2)).abs() == x.abs().scale(&qi(2))),
        ("archimedean", archimedean),
    ]
}
