//! Policies, the soft-product episode loop, gradient estimators,
//! optimizers and satisfaction evaluation.

mod eval;
mod grad;
mod optim;
mod policy;
mod rollout;
mod snapshot;
mod train;

pub use eval::{eval_satisfaction, SatisfactionEstimate};
pub use grad::{grad_first, grad_zeroth, GradEstimate};
pub use optim::Optimizer;
pub use policy::{Policy, PolicyConfig, PolicyOutput, PolicyShape};
pub use rollout::{rollout_discrete, rollout_soft, DiscreteRollout, SoftRollout, StepRecord};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use train::{train, LogRow, TrainResult};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::Ldba;
use crate::diff::DiffError;
use crate::envs::Env;
use crate::product::{Labeler, ProductError, RewardParams, SoftAutomaton};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid value for '{key}': {reason}")]
    Config { key: &'static str, reason: String },
    #[error("non-finite value at rollout step {step}")]
    NonFinite { step: usize },
    #[error("diverged at iteration {iteration}: {reason}")]
    Diverged { iteration: usize, reason: String },
    #[error("policy does not fit the task: {0}")]
    PolicyMismatch(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    /// Backpropagation through the soft product.
    First,
    /// Likelihood-ratio (REINFORCE) estimate with Gaussian exploration.
    Zeroth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

/// Which return the zeroth-order estimator weights log-likelihoods with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    Soft,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub gamma: f64,
    /// Sigmoid temperature shared by all APs.
    pub tau: f64,
    /// Per-AP temperature, keyed by the quoted AP text.
    pub tau_overrides: BTreeMap<String, f64>,
    pub horizon: usize,
    pub iterations: usize,
    /// Rollouts per update.
    pub rollouts: usize,
    pub lr: f64,
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub estimator: Estimator,
    /// Exploration noise of the zeroth-order estimator.
    pub sigma: f64,
    /// Subtract the mean return in the zeroth-order estimator.
    pub baseline: bool,
    /// Rescale gradients whose norm exceeds this value.
    pub grad_clip: Option<f64>,
    pub zeroth_reward: RewardKind,
    pub eval_episodes: usize,
    pub eval_horizon: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            gamma: 0.999,
            tau: 1.0,
            tau_overrides: BTreeMap::new(),
            horizon: 200,
            iterations: 200,
            rollouts: 10,
            lr: 0.01,
            optimizer: OptimizerKind::Adam,
            seed: 0,
            estimator: Estimator::First,
            sigma: 0.5,
            baseline: true,
            grad_clip: None,
            zeroth_reward: RewardKind::Soft,
            eval_episodes: 10,
            eval_horizon: 1000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |key, reason: &str| {
            Err(TrainError::Config {
                key,
                reason: reason.to_string(),
            })
        };
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma", "must lie in (0, 1)");
        }
        if !(self.tau > 0.0) || self.tau_overrides.values().any(|t| !(*t > 0.0)) {
            return bad("tau", "must be positive");
        }
        if self.horizon == 0 {
            return bad("horizon", "must be positive");
        }
        if self.rollouts == 0 {
            return bad("rollouts", "must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr", "must be positive");
        }
        if self.estimator == Estimator::Zeroth && !(self.sigma > 0.0) {
            return bad("sigma", "must be positive for the zeroth-order estimator");
        }
        if matches!(self.grad_clip, Some(c) if !(c > 0.0)) {
            return bad("grad_clip", "must be positive");
        }
        if self.eval_episodes == 0 || self.eval_horizon == 0 {
            return bad("eval_episodes", "evaluation needs at least one episode and step");
        }
        Ok(())
    }

    pub fn reward(&self) -> Result<RewardParams, TrainError> {
        Ok(RewardParams::new(self.gamma)?)
    }
}

/// Environment plus automaton with bound labels.
#[derive(Debug, Clone)]
pub struct Task<E> {
    pub env: E,
    pub ldba: Ldba,
    pub soft: SoftAutomaton,
    pub labeler: Labeler,
}

impl<E: Env> Task<E> {
    pub fn new(
        env: E,
        ldba: Ldba,
        tau: f64,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<Self, ProductError> {
        let labeler = Labeler::bind(&env, &ldba.aps, tau, overrides)?;
        let soft = SoftAutomaton::new(&ldba);
        Ok(Self {
            env,
            ldba,
            soft,
            labeler,
        })
    }

    /// Width of the policy input: observation features plus belief.
    pub fn policy_input_dim(&self) -> usize {
        let zero = vec![0.0f64; self.env.spec().state_dim];
        self.env.observe(&zero).len() + self.soft.num_states()
    }

    pub fn make_policy(&self, cfg: &PolicyConfig, seed: u64) -> Policy {
        let spec = self.env.spec();
        let eps_dim = if self.soft.has_eps() {
            self.soft.num_states()
        } else {
            0
        };
        Policy::new(
            cfg,
            self.policy_input_dim(),
            &spec.action_low,
            &spec.action_high,
            eps_dim,
            seed,
        )
    }

    pub fn check_policy(&self, policy: &Policy) -> Result<(), TrainError> {
        let spec = self.env.spec();
        match &policy.shape {
            PolicyShape::Constant { action_dim } if *action_dim != spec.action_dim() => {
                Err(TrainError::PolicyMismatch(format!(
                    "constant policy has {} actions, environment '{}' expects {}",
                    action_dim,
                    spec.name,
                    spec.action_dim()
                )))
            }
            PolicyShape::Mlp { layers, eps_dim, .. }
                if layers[0] != self.policy_input_dim()
                    || *layers.last().unwrap() != spec.action_dim()
                    || (*eps_dim != 0 && *eps_dim != self.soft.num_states()) =>
            {
                Err(TrainError::PolicyMismatch(format!(
                    "mlp layers {:?} do not match input {} / action {}",
                    layers,
                    self.policy_input_dim(),
                    spec.action_dim()
                )))
            }
            _ if policy.params.len() != policy.shape.num_params() => Err(
                TrainError::PolicyMismatch("parameter count differs from shape".into()),
            ),
            _ => Ok(()),
        }
    }
}
