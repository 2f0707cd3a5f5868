//! Constructive search for statistical-convergence witnesses over template
//! families.

use super::check::{check_st_order_conv, exceptional_set, Witness};
use super::net::{Net, TailRule};
use super::NetError;
use crate::index_measure::{DirectedSetMeasure, SetExpr};
use crate::lattice::Element;
use crate::rational::{q, qi, Q};
use crate::verdict::Verdict;

/// Indices scanned for a common point of `Δ` and the exceptional set.
const PRUNE_SCAN: u64 = 256;

/// Scales `c` and ratios `r` for the dominating-net templates
/// `0`, `(c/n)·u` and `c·rⁿ·u`, where `u` is the net's own regulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    pub scales: Vec<Q>,
    pub ratios: Vec<Q>,
}

impl Default for Templates {
    fn default() -> Self {
        Templates { scales: vec![qi(1), qi(2), qi(4), qi(8)], ratios: vec![q(1, 2)] }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum SearchOutcome {
    Found {
        witness: Witness,
        verdict: Verdict,
    },
    /// Every template was rejected. This is not a proof of divergence.
    NotFound {
        tried: usize,
    },
}

/// `Σ|u|` over the harmonic and geometric leaves of the tail.
pub fn regulator(net: &Net) -> Element {
    let mut u = net.space().zero();
    for leaf in net.tail().leaves() {
        if let TailRule::Harmonic(v) | TailRule::Geometric(v, _) = leaf {
            u = u.add(&v.abs()).expect("leaves share the net's space");
        }
    }
    u
}

/// Union of the sets on which the tail spikes or sweeps.
pub fn spike_set(net: &Net) -> SetExpr {
    net.tail()
        .leaves()
        .into_iter()
        .filter_map(|leaf| match leaf {
            TailRule::SpikeOn { set, .. } => Some(set.clone()),
            TailRule::UnitSweep { offset, period } => Some(SetExpr::ap(*offset, *period)),
            _ => None,
        })
        .fold(SetExpr::empty(), SetExpr::union)
}

/// Tries `p ∈ {0, (c/n)u, c·rⁿu}` against `Δ ∈ {ℕ, complement of the
/// spike set, complement of p's exceptional set when that is null}` and
/// returns the first pair [`check_st_order_conv`] accepts.
pub fn witness_search(
    net: &Net,
    x: &Element,
    mu: &DirectedSetMeasure,
    templates: &Templates,
) -> Result<SearchOutcome, NetError> {
    let space = net.space();
    let u = regulator(net);
    let mut ratios = templates.ratios.clone();
    for leaf in net.tail().leaves() {
        if let TailRule::Geometric(_, r) = leaf {
            if !ratios.contains(r) {
                ratios.push(r.clone());
            }
        }
    }
    let mut ps = vec![Net::constant(space.zero())];
    if !u.is_zero() {
        for c in &templates.scales {
            ps.push(Net::from_tail(space, TailRule::Harmonic(u.scale(c)))?);
        }
        for c in &templates.scales {
            for r in &ratios {
                ps.push(Net::from_tail(space, TailRule::Geometric(u.scale(c), r.clone()))?);
            }
        }
    }
    let spikes = spike_set(net);
    let mut tried = 0;
    for p in ps {
        let mut deltas = vec![SetExpr::naturals()];
        if !spikes.is_syntactically_empty() {
            deltas.push(SetExpr::complement(spikes.clone()));
        }
        let exceptional = exceptional_set(net, x, &p).ok();
        if let Some(e) = &exceptional {
            if matches!(mu.eval(e), Ok(v) if v.is_exactly(&crate::rational::zero())) {
                let d = SetExpr::complement(e.clone());
                if !deltas.contains(&d) {
                    deltas.push(d);
                }
            }
        }
        for delta in deltas {
            tried += 1;
            // Domination fails exactly on the exceptional set, so a visible
            // common index settles the rejection.
            if let Some(e) = &exceptional {
                if (1..=PRUNE_SCAN).any(|n| delta.contains_nat(n) && e.contains_nat(n)) {
                    continue;
                }
            }
            let witness = Witness { p: p.clone(), delta };
            match check_st_order_conv(net, x, &witness, mu) {
                Ok(verdict) if verdict.accepted => return Ok(SearchOutcome::Found { witness, verdict }),
                _ => {}
            }
        }
    }
    Ok(SearchOutcome::NotFound { tried })
}
