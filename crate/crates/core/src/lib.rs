//! Knot Floer staircase complexes, the concordance invariants τ, ν, ν′, ε,
//! and mechanical checks of staircase decompositions for torus knots and
//! iterated cables.

pub mod alexander;
pub mod cli;
pub mod error;
pub mod families;
pub mod filtcx;
pub mod invariants;
pub mod laurent;
pub mod staircase;

pub use error::{Error, Result};
