//! Witness generation, satisfiability and containment for JSON Schema.

pub mod algebra;
pub mod decimal;
pub mod error;
pub mod generate;
pub mod json;
pub mod limits;
pub mod normalize;
pub mod pattern;
pub mod pipeline;
pub mod prepare;
pub mod reference;
pub mod translate;

pub use error::{Error, Result};
