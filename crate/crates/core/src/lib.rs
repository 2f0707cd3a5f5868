//! Statistical order convergence of nets in Riesz spaces, made checkable:
//! directed-set measures with exact asymptotic density, exact-arithmetic
//! vector lattices, finitely described nets with symbolic convergence
//! checkers, and a seeded property suite.

pub mod index_measure;
pub mod lattice;
pub mod nets;
pub mod rational;
pub mod suite;
pub mod syntax;
pub mod verdict;
