//! Text formats: the polynomial expression language and problem files.

mod parse;
mod problem;

pub use parse::{parse_poly, parse_rational, ParseError};
pub use problem::{DivisorEntry, IdealEntry, OriginTag, ProblemError, ProblemFile};
