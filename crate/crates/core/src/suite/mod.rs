//! Seeded property suite: one runner per convergence theorem, the c₀
//! example, lattice self-tests and the measure axioms, assembled into a
//! deterministic report.
//!
//! Trial `t` of property `k` draws from a ChaCha8 stream keyed by
//! `(seed, k << 32 | t)`, so results do not depend on scheduling and a
//! failing trial can be replayed alone.

mod c0;
pub mod gen;
mod props;
mod selftest;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use c0::{c0_example_report, C0MeasureRow, C0Report};
pub use gen::{gen_order_convergent_net, gen_st_convergent_net, GenError, OrderCase, StCase};
pub use props::{Input, TrialFailure, PROPERTIES};
pub use selftest::{birkhoff_selftest, lattice_laws, BirkhoffReport, LawReport};

use crate::index_measure::{axioms_check, normalize, AxiomReport, DirectedSetMeasure, MeasureValue, SetExpr};
use crate::lattice::RieszSpace;
use crate::rational::q;

/// Bumped whenever a report field changes meaning or shape.
pub const SCHEMA_VERSION: u32 = 1;
/// Sampled sets per measure for the axiom check.
pub const AXIOM_SAMPLES: usize = 500;

#[derive(Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub spaces: Vec<RieszSpace>,
    pub measures: Vec<DirectedSetMeasure>,
    /// Explicit checking depth handed to the checkers.
    pub horizon: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 500,
            spaces: vec![RieszSpace::Rationals, RieszSpace::RationalVector(3), RieszSpace::FinSuppSeq],
            measures: vec![
                DirectedSetMeasure::PeriodicDensity,
                DirectedSetMeasure::prefix_bounds(),
                DirectedSetMeasure::conditional(SetExpr::evens()).expect("evens have density 1/2"),
            ],
            horizon: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("empty {0} roster")]
    EmptyRoster(&'static str),
    /// A lattice identity that always holds came out false.
    #[error("implementation bug: {0}")]
    ImplementationBug(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    /// Draws discarded by a precondition filter and redrawn.
    pub excluded: usize,
    pub status: Status,
    pub failures: Vec<TrialFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// The spaces a property runs on.
fn spaces_for(name: &str, config: &SuiteConfig) -> (Vec<RieszSpace>, Option<String>) {
    if name != "dedekind_monotone" {
        return (config.spaces.clone(), None);
    }
    let mut vs: Vec<RieszSpace> =
        config.spaces.iter().copied().filter(|s| matches!(s, RieszSpace::RationalVector(_))).collect();
    if vs.is_empty() {
        vs.push(RieszSpace::RationalVector(3));
    }
    let note = "runs on Q^n only: finitely supported sequences are not Dedekind complete".to_string();
    (vs, Some(note))
}

pub(crate) fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_property(name: &str, config: &SuiteConfig) -> Result<PropertyResult, SuiteError> {
    let f = props::runner(name).ok_or_else(|| SuiteError::UnknownProperty(name.to_string()))?;
    let index = PROPERTIES.iter().position(|p| *p == name).expect("runner names are listed") as u64;
    if config.measures.is_empty() {
        return Err(SuiteError::EmptyRoster("measure"));
    }
    let (spaces, note) = spaces_for(name, config);
    if spaces.is_empty() {
        return Err(SuiteError::EmptyRoster("space"));
    }
    let outcomes: Vec<(Option<TrialFailure>, usize)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let space = spaces[trial % spaces.len()];
            let mu = &config.measures[(trial / spaces.len()) % config.measures.len()];
            let mut ctx = props::Ctx {
                rng: trial_rng(config.seed, index << 32 | trial as u64),
                space,
                mu,
                horizon: config.horizon,
                inputs: Vec::new(),
                excluded: 0,
            };
            let failure = props::run_trial(f, &mut ctx).map(|(check, evidence, error)| TrialFailure {
                trial,
                space: space.to_string(),
                measure: mu.name(),
                check,
                inputs: std::mem::take(&mut ctx.inputs),
                evidence,
                error,
            });
            (failure, ctx.excluded)
        })
        .collect();
    let excluded = outcomes.iter().map(|(_, e)| e).sum();
    let failures: Vec<TrialFailure> = outcomes.into_iter().filter_map(|(f, _)| f).collect();
    Ok(PropertyResult {
        name: name.to_string(),
        trials: config.trials,
        excluded,
        status: Status::of(failures.is_empty()),
        failures,
        note,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub trials: usize,
    pub horizon: u64,
    pub spaces: Vec<String>,
    pub measures: Vec<String>,
    pub warnings: Vec<String>,
    pub properties: Vec<PropertyResult>,
    pub c0_example: C0Report,
    pub birkhoff: BirkhoffReport,
    pub lattice_laws: LawReport,
    pub axioms: Vec<AxiomReport>,
    pub status: Status,
}

/// The measures whose axioms are checked: the roster plus the co-countable
/// measure.
fn axiom_roster(config: &SuiteConfig) -> Vec<DirectedSetMeasure> {
    let mut ms = config.measures.clone();
    if !ms.iter().any(|m| matches!(m, DirectedSetMeasure::CoCountable)) {
        ms.push(DirectedSetMeasure::CoCountable);
    }
    ms
}

pub fn run_all(config: &SuiteConfig) -> Result<SuiteReport, SuiteError> {
    let birkhoff = birkhoff_selftest(config.seed, selftest::BIRKHOFF_QUADRUPLES)?;
    let lattice_laws = lattice_laws(config.seed, &config.spaces, selftest::LAW_SAMPLES);
    let properties = PROPERTIES.iter().map(|p| run_property(p, config)).collect::<Result<Vec<_>, _>>()?;
    let axioms: Vec<AxiomReport> = axiom_roster(config)
        .iter()
        .enumerate()
        .map(|(i, mu)| {
            let mut rng = trial_rng(config.seed, u64::MAX - 16 - i as u64);
            let samples = gen::sample_sets(&mut rng, mu, AXIOM_SAMPLES);
            axioms_check(mu, &samples, config.seed ^ i as u64)
        })
        .collect();
    let c0_example = c0_example_report(&config.measures);
    let mut warnings = Vec::new();
    if config.trials == 0 {
        warnings.push("trials = 0: every property passes vacuously".to_string());
    }
    let ok = properties.iter().all(|p| p.status == Status::Pass)
        && lattice_laws.failures.is_empty()
        && axioms.iter().all(AxiomReport::passed)
        && c0_example.reproduced;
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        trials: config.trials,
        horizon: config.horizon,
        spaces: config.spaces.iter().map(|s| s.to_string()).collect(),
        measures: config.measures.iter().map(|m| m.name()).collect(),
        warnings,
        properties,
        c0_example,
        birkhoff,
        lattice_laws,
        axioms,
        status: Status::of(ok),
    })
}

/// Asymptotic density except on the evens, which get mass 3/4. Finite
/// additivity fails on `{evens, odds}`; the measure exists to show that
/// the axiom check catches it.
pub fn corrupted_measure() -> DirectedSetMeasure {
    let evens = normalize(&SetExpr::evens()).expect("periodic");
    DirectedSetMeasure::custom("corrupted-density", move |s| {
        let n = normalize(s)?;
        Ok(MeasureValue::Exact(if n == evens { q(3, 4) } else { n.density() }))
    })
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "suite report (schema {}), seed {}, {} trials per property, horizon {}",
            self.schema_version, self.seed, self.trials, self.horizon
        );
        let _ = writeln!(s, "spaces: {}", self.spaces.join(", "));
        let _ = writeln!(s, "measures: {}", self.measures.join(", "));
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        let _ = writeln!(s, "\nproperties:");
        for p in &self.properties {
            let _ = writeln!(
                s,
                "  {:<20} {}  {} trials, {} failures, {} excluded",
                p.name,
                status_word(p.status),
                p.trials,
                p.failures.len(),
                p.excluded
            );
            if let Some(n) = &p.note {
                let _ = writeln!(s, "    note: {n}");
            }
            for f in p.failures.iter().take(3) {
                let _ = writeln!(s, "    trial {} ({}, {}): {} failed", f.trial, f.space, f.measure, f.check);
                for i in &f.inputs {
                    let _ = writeln!(s, "      {} = {}", i.name, i.value);
                }
                if let Some(e) = &f.error {
                    let _ = writeln!(s, "      error: {e}");
                }
            }
        }
        let _ = writeln!(s, "\nc0 example:");
        for line in self.c0_example.to_text().lines() {
            let _ = writeln!(s, "  {line}");
        }
        let _ = writeln!(
            s,
            "\nbirkhoff inequality: {} quadruples, {}",
            self.birkhoff.quadruples,
            status_word(Status::of(self.birkhoff.passed))
        );
        let _ = writeln!(
            s,
            "lattice laws: {} checks, {} failures",
            self.lattice_laws.checked,
            self.lattice_laws.failures.len()
        );
        for f in self.lattice_laws.failures.iter().take(5) {
            let _ = writeln!(s, "  {f}");
        }
        let _ = writeln!(s, "measure axioms:");
        for a in &self.axioms {
            let _ = writeln!(s, "  {:<24} {}", a.measure, status_word(Status::of(a.passed())));
            for ax in a.axioms.iter().filter(|ax| !ax.passed()) {
                let _ = writeln!(s, "    {} failed ({} of {} checks)", ax.axiom, ax.failures.len(), ax.checked);
                if let Some(f) = ax.failures.first() {
                    let sets: Vec<String> = f.sets.iter().map(|x| x.to_string()).collect();
                    let _ = writeln!(s, "      {}: {}", f.detail, sets.join(", "));
                }
            }
        }
        let _ = writeln!(s, "\nstatus: {}", status_word(self.status));
        s
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
    }
}
