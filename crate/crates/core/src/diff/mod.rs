//! Reverse-mode automatic differentiation on a flat, append-only tape.
//!
//! ```
//! use tempograd::diff::Tape;
//! use tempograd::Real;
//!
//! let tape = Tape::<f64>::new();
//! let w = tape.var(0.0);
//! let y = (w * Real::cst(1.0)).sigmoid();
//! assert_eq!(tape.backward(y, &[w]).unwrap(), vec![0.25]);
//! ```

mod gradcheck;
mod tape;

pub use gradcheck::{grad_check, GradCheckReport};
pub use tape::{Gradients, OpKind, Tape, Var};

use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffError {
    #[error("non-finite value at tape node {node} ({op})")]
    NonFinite { node: usize, op: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    NonPositiveLog(f64),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
}

/// Inner product with a length check.
pub fn dot<R: Real>(a: &[R], b: &[R]) -> Result<R, DiffError> {
    if a.len() != b.len() {
        return Err(DiffError::ShapeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(R::dot(a, b))
}

/// `w · x` for a row-major `rows × cols` matrix.
pub fn matvec<R: Real>(w: &[R], x: &[R], rows: usize) -> Result<Vec<R>, DiffError> {
    let cols = x.len();
    if w.len() != rows * cols {
        return Err(DiffError::ShapeMismatch {
            expected: rows * cols,
            found: w.len(),
        });
    }
    Ok(w.chunks_exact(cols.max(1))
        .take(rows)
        .map(|row| R::dot(row, x))
        .collect())
}
