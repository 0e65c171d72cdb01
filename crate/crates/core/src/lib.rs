//! Universal Drinfeld–Yetter algebras with exact arithmetic.
//!
//! The algebras are realized through a normal-ordering engine on diagrams
//! built from actions, coactions, brackets and cobrackets of a Lie
//! bialgebra. On top of it sit the cosimplicial structure, the Hochschild
//! complex, truncated associator and twist series, and evaluation on
//! concrete Drinfeld–Yetter modules.

pub mod algebra;
pub mod cohomology;
pub mod combinatorics;
pub mod error;
pub mod free_lie;
pub mod linalg;
pub mod rational;
pub mod realization;
pub mod rewriter;
pub mod suites;
pub mod twist_lab;

pub use error::{Error, Result};
