//! Exact computational-algebra workbench: affine braid groups, tangle-type
//! quotient algebras, commuting-element families, baxterized generators,
//! conditional traces, transfer matrices, and flat difference connections,
//! all verified by exact rational arithmetic at randomly sampled generic
//! parameter points.

pub mod error;
pub mod expr;
pub mod field;
pub mod scalar;
pub mod ratfn;
pub mod word;
pub mod mpoly;
pub mod presentation;
pub mod rewrite;
pub mod algebra;
pub mod subst;
pub mod braid;
pub mod bmw;
pub mod affine;
pub mod trace;
pub mod bethe;
pub mod qkz;
pub mod report;

pub use error::{Error, Result};
pub use scalar::{ParameterPoint, Rat};
