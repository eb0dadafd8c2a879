//! Mini-gringo programs, their propositional and first-order translations,
//! program completion, tightness analysis, and bounded checkers for the
//! correspondence between stable models and completion models.

pub mod check;
pub mod error;
pub mod fol;
pub mod graphs;
pub mod ground;
pub mod parser;
pub mod random;
pub mod stable;
pub mod syntax;
pub mod values;

pub use error::Error;
