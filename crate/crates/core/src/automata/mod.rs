//! Limit-deterministic Büchi automata: representation, validation,
//! fragment translation, lasso runs, HOA and DOT interchange.

mod dot;
mod guard;
mod hoa;
mod ldba;
mod run;
mod translate;

pub use dot::emit_dot;
pub use guard::{bits, parse_guard, spread, Guard, ShannonTree};
pub use hoa::{emit_hoa, parse_hoa, EPS_LABEL};
pub use ldba::{Edge, Ldba, State, TransitionTable, Violation, ViolationKind};
pub use run::{run_lasso, run_lasso_table, EpsPolicy};
pub use translate::{translate_fragment, translate_fragment_with, DEFAULT_MAX_APS};

use thiserror::Error;

use crate::ltl::LtlError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomataError {
    #[error("formula outside the supported fragment: {0}")]
    OutsideFragment(String),
    #[error("{count} atomic propositions exceed the limit of {limit}")]
    TooManyAps { count: usize, limit: usize },
    #[error("HOA syntax: {0}")]
    HoaSyntax(String),
    #[error("unsupported acceptance: {0}")]
    UnsupportedAcceptance(String),
    #[error("unsupported HOA feature: {0}")]
    UnsupportedHoa(String),
    #[error("state {state}: overlapping (nondeterministic) labels")]
    Nondeterministic { state: usize },
    #[error("state {state}: label uses unknown AP index {index}")]
    UnknownAp { state: usize, index: u32 },
    #[error("invalid automaton: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Ltl(#[from] LtlError),
}
