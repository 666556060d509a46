//! Product of an environment with an LDBA, in two flavours: the discrete
//! product driven by hard labels, and the soft product where automaton
//! states become a belief vector driven by sigmoid label probabilities.

mod discrete;
mod labels;
mod soft;

pub use discrete::{step_discrete, step_discrete_env};
pub use labels::{pr_ap, Labeler};
pub use soft::{pr_guard, step_product, step_product_hard, ProductState, SoftAutomaton, DEFAULT_EPS_POWER};

use thiserror::Error;

use crate::scalar::Real;

/// Mass deviation that is silently renormalized.
pub const RENORM_TOLERANCE: f64 = 1e-9;
/// Mass deviation beyond which a belief is rejected.
pub const MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProductError {
    #[error("invalid {what}: total mass {mass} (length {len})")]
    InvalidSimplex {
        what: &'static str,
        mass: f64,
        len: usize,
    },
    #[error("{what} has length {found}, automaton has {expected} states")]
    WrongLength {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("signal '{signal}' for AP \"{ap}\" is not provided by environment '{env}'")]
    UnboundSignal {
        ap: String,
        signal: String,
        env: String,
    },
    #[error("temperature must be positive, got {0}")]
    BadTemperature(f64),
    #[error("discount factor must lie in (0, 1), got {0}")]
    BadGamma(f64),
}

/// Discounting parameters with `beta = 1 - sqrt(1 - gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardParams {
    pub gamma: f64,
    pub beta: f64,
}

impl RewardParams {
    pub fn new(gamma: f64) -> Result<Self, ProductError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(ProductError::BadGamma(gamma));
        }
        Ok(Self {
            gamma,
            beta: 1.0 - (1.0 - gamma).sqrt(),
        })
    }

    /// Explicit pair, for reproducing hand-computed examples.
    pub fn with_beta(gamma: f64, beta: f64) -> Result<Self, ProductError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(ProductError::BadGamma(gamma));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ProductError::BadGamma(beta));
        }
        Ok(Self { gamma, beta })
    }
}

/// Reward and discount of a belief:
/// `r = (1 - beta) * mass(B)`, `d = beta * mass(B) + gamma * mass(not B)`.
pub fn reward_discount<R: Real>(q: &[R], accepting: &[bool], p: &RewardParams) -> (R, R) {
    let acc: Vec<R> = q
        .iter()
        .zip(accepting)
        .filter(|(_, &b)| b)
        .map(|(&x, _)| x)
        .collect();
    let rej: Vec<R> = q
        .iter()
        .zip(accepting)
        .filter(|(_, &b)| !b)
        .map(|(&x, _)| x)
        .collect();
    let mass_b = R::sum(&acc);
    let mass_n = R::sum(&rej);
    let r = R::cst(1.0 - p.beta) * mass_b;
    let d = R::cst(p.beta) * mass_b + R::cst(p.gamma) * mass_n;
    (r, d)
}

/// Validate a probability vector, renormalizing tiny drift.
pub fn check_simplex<R: Real>(v: Vec<R>, what: &'static str) -> Result<Vec<R>, ProductError> {
    let mass: f64 = v.iter().map(|x| x.value()).sum();
    let dev = (mass - 1.0).abs();
    let negative = v.iter().any(|x| x.value() < -MASS_TOLERANCE);
    if !(dev <= MASS_TOLERANCE) || negative {
        return Err(ProductError::InvalidSimplex {
            what,
            mass,
            len: v.len(),
        });
    }
    if dev > RENORM_TOLERANCE {
        let total = R::sum(&v);
        return Ok(v.into_iter().map(|x| x / total).collect());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_from_gamma() {
        let p = RewardParams::new(0.999).unwrap();
        assert!((p.beta - 0.968_377_223_398_316).abs() < 1e-12);
        assert!(RewardParams::new(1.0).is_err());
    }

    #[test]
    fn reward_discount_examples() {
        let p = RewardParams::with_beta(0.99, 0.9).unwrap();
        let acc = [true, false];
        let (r, d) = reward_discount(&[1.0f64, 0.0], &acc, &p);
        assert!((r - 0.1).abs() < 1e-15 && (d - 0.9).abs() < 1e-15);
        let (r, d) = reward_discount(&[0.0, 1.0], &acc, &p);
        assert_eq!((r, d), (0.0, 0.99));
        let (r, d) = reward_discount(&[0.5f64, 0.5], &acc, &p);
        assert!((r - 0.05).abs() < 1e-15 && (d - 0.945).abs() < 1e-15);
    }

    #[test]
    fn simplex_tolerances() {
        let v = check_simplex(vec![0.5, 0.5 + 5e-7], "belief").unwrap();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(check_simplex(vec![0.5, 0.5 + 2e-6], "belief").is_err());
        assert!(check_simplex(vec![1.5, -0.5], "belief").is_err());
        assert!(check_simplex(vec![f64::NAN, 1.0], "belief").is_err());
    }
}
