//! LTL over comparison-form atomic propositions: parsing, negation normal
//! form and an exact satisfaction oracle for lasso-shaped traces.

mod ap;
mod formula;
mod lasso;
mod nnf;
mod parser;

pub use ap::{AtomicProp, Comparator};
pub use formula::{Formula, Ltl};
pub use lasso::{eval_lasso, eval_positions, LassoTrace, Label};
pub use nnf::{is_nnf, nnf, to_nnf};
pub use parser::{parse_ltl, parse_with_aps};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LtlError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("malformed atomic proposition \"{text}\": {reason}")]
    MalformedAp { text: String, reason: String },
    #[error("unknown operator '{op}' at {pos}")]
    UnknownOperator { pos: usize, op: String },
    #[error("lasso trace has an empty cycle")]
    EmptyCycle,
    #[error("unknown atomic proposition {0}")]
    UnknownAp(String),
}
