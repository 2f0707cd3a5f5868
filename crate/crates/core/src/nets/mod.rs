//! Nets over ℕ with closed-form tails, and checkers for order,
//! statistical and relatively uniform convergence.

mod check;
mod net;
mod search;
mod symbolic;
pub mod term;

pub use check::{
    check_order_conv, check_st_decreasing, check_st_order_conv, exceptional_set, infimum_on, is_decreasing_on,
    ru_check, subnet, Selector, Witness, DEFAULT_HORIZON, EXPLICIT_CAP,
};
pub use net::{combine, mask, BinOp, IndexMap, Net, TailRule, UnOp};
pub use search::{regulator, spike_set, witness_search, SearchOutcome, Templates};

use crate::index_measure::{MeasureError, MeasureValue, SetExpr};
use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("Δ = {0} is empty")]
    EmptyDelta(SetExpr),
    #[error("μ({set}) is {value}, not an exact value")]
    UndeterminedMeasure { set: SetExpr, value: Box<MeasureValue> },
    #[error("undetermined: {0}")]
    Undetermined(String),
    #[error("not decreasing: {0}")]
    NotDecreasing(String),
    #[error("not cofinal: no index beyond {alpha} is selected")]
    NotCofinal { alpha: u64 },
    #[error("{0} is not positive")]
    NotPositive(String),
}

#[cfg(test)]
mod tests;
