//! Differentiable environments. Dynamics are written once over [`Real`]
//! and run either on plain floats or on tape variables.

mod cartpole;
mod parking;
mod pointmass;

pub use cartpole::{Cartpole, CartpoleParams};
pub use parking::{Parking, ParkingParams};
pub use pointmass::{PointMass, PointMassParams};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("unknown environment '{0}'")]
    UnknownEnv(String),
    #[error("environment '{env}' has no signal '{signal}'")]
    UnboundSignal { env: String, signal: String },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },
}

/// Static description of an environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvSpec {
    pub name: &'static str,
    pub state_dim: usize,
    pub action_low: Vec<f64>,
    pub action_high: Vec<f64>,
    /// Seconds per step.
    pub dt: f64,
    /// Names usable as AP signals, indexable by [`Env::signal`].
    pub signals: Vec<&'static str>,
}

impl EnvSpec {
    pub fn action_dim(&self) -> usize {
        self.action_low.len()
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| *s == name)
    }
}

pub trait Env {
    fn spec(&self) -> &EnvSpec;

    /// Draw `s0 ~ p0`.
    fn initial_state(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// `s' = f(s, a)`; actions outside the bounds are clamped.
    fn step<R: Real>(&self, s: &[R], a: &[R]) -> Vec<R>;

    /// Value of signal number `index` (see [`EnvSpec::signals`]).
    fn signal<R: Real>(&self, s: &[R], index: usize) -> R;

    /// Policy input features.
    fn observe<R: Real>(&self, s: &[R]) -> Vec<R> {
        s.to_vec()
    }
}

pub(crate) fn clamp_action<R: Real>(spec: &EnvSpec, a: &[R]) -> Vec<R> {
    a.iter()
        .zip(spec.action_low.iter().zip(&spec.action_high))
        .map(|(&x, (&lo, &hi))| x.clamp(lo, hi))
        .collect()
}

/// Environment selection from configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnvConfig {
    Parking(#[serde(default)] ParkingParams),
    Pointmass(#[serde(default)] PointMassParams),
    Cartpole(#[serde(default)] CartpoleParams),
}

impl EnvConfig {
    pub fn build(&self) -> Result<AnyEnv, EnvError> {
        Ok(match self {
            EnvConfig::Parking(p) => AnyEnv::Parking(Parking::new(p.clone())?),
            EnvConfig::Pointmass(p) => AnyEnv::PointMass(PointMass::new(p.clone())?),
            EnvConfig::Cartpole(p) => AnyEnv::Cartpole(Cartpole::new(p.clone())?),
        })
    }
}

/// Closed set of bundled environments.
#[derive(Debug, Clone)]
pub enum AnyEnv {
    Parking(Parking),
    PointMass(PointMass),
    Cartpole(Cartpole),
}

impl AnyEnv {
    pub fn by_name(name: &str) -> Result<Self, EnvError> {
        match name {
            "parking" => Ok(AnyEnv::Parking(Parking::default())),
            "pointmass" => Ok(AnyEnv::PointMass(PointMass::default())),
            "cartpole" => Ok(AnyEnv::Cartpole(Cartpole::default())),
            other => Err(EnvError::UnknownEnv(other.to_string())),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $e:ident => $body:expr) => {
        match $self {
            AnyEnv::Parking($e) => $body,
            AnyEnv::PointMass($e) => $body,
            AnyEnv::Cartpole($e) => $body,
        }
    };
}

impl Env for AnyEnv {
    fn spec(&self) -> &EnvSpec {
        dispatch!(self, e => e.spec())
    }
    fn initial_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        dispatch!(self, e => e.initial_state(rng))
    }
    fn step<R: Real>(&self, s: &[R], a: &[R]) -> Vec<R> {
        dispatch!(self, e => e.step(s, a))
    }
    fn signal<R: Real>(&self, s: &[R], index: usize) -> R {
        dispatch!(self, e => e.signal(s, index))
    }
    fn observe<R: Real>(&self, s: &[R]) -> Vec<R> {
        dispatch!(self, e => e.observe(s))
    }
}
