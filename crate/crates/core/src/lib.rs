//! Differentiable LTL rewards: formula front end, LDBA construction, a
//! soft (sigmoid-labelled) product with automaton beliefs, small
//! differentiable environments and policy-gradient training.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix the
//! scalar type for the common cases.

pub mod automata;
pub mod bundled;
pub mod diff;
pub mod envs;
pub mod ltl;
pub mod product;
pub mod scalar;
pub mod trainer;

pub use scalar::{FloatBase, Real};

pub type Tape64 = diff::Tape<f64>;
pub type Var64<'t> = diff::Var<'t, f64>;
pub type Tape32 = diff::Tape<f32>;
pub type Var32<'t> = diff::Var<'t, f32>;
