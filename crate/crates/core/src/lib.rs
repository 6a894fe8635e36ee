//! Finite relational constraints and the classes of functions they define.

pub mod cli;
pub mod clones;
pub mod error;
pub mod galois;
pub mod limits;
pub mod minors;
pub mod model;
pub mod oracle;
pub mod partials;
pub mod sample;
pub mod satisfaction;
mod search;
pub mod substitution;

pub use error::{Error, Result};
pub use limits::Limits;
pub use model::{Constraint, Element, FiniteDomain, FiniteFunction, IndexMap, Matrix, Relation, Tuple};
