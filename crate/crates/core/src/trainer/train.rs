use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::envs::Env;

use super::grad::{grad_first, grad_zeroth};
use super::{Estimator, Optimizer, Policy, Task, TrainConfig, TrainError};

/// Gradient norm treated as divergence.
pub const DIVERGENCE_NORM: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRow {
    pub iteration: usize,
    pub mean_return: f64,
    pub grad_norm: f64,
    pub wallclock_s: f64,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub log: Vec<LogRow>,
    pub final_policy: Policy,
    /// Parameters with the highest mean return seen during training.
    pub best_policy: Policy,
    pub best_return: f64,
}

/// Rollout, gradient, optimizer step; `cfg.iterations` times.
pub fn train<E: Env>(
    task: &Task<E>,
    init: Policy,
    cfg: &TrainConfig,
) -> Result<TrainResult, TrainError> {
    cfg.validate()?;
    task.check_policy(&init)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut policy = init;
    let mut opt = Optimizer::from_config(cfg, policy.num_params());
    let mut log = Vec::with_capacity(cfg.iterations);
    let mut best = (f64::NEG_INFINITY, policy.clone());
    let clock = Instant::now();
    for it in 0..cfg.iterations {
        let starts: Vec<Vec<f64>> = (0..cfg.rollouts)
            .map(|_| task.env.initial_state(&mut rng))
            .collect();
        let est = match cfg.estimator {
            Estimator::First => grad_first(task, &policy, &starts, cfg)?,
            Estimator::Zeroth => grad_zeroth(task, &policy, &starts, cfg, &mut rng)?,
        };
        let mean = est.mean_return();
        let norm = est.norm();
        if !mean.is_finite() {
            return Err(TrainError::Diverged {
                iteration: it,
                reason: format!("mean return {mean}"),
            });
        }
        if !(norm <= DIVERGENCE_NORM) {
            return Err(TrainError::Diverged {
                iteration: it,
                reason: format!("gradient norm {norm:e}"),
            });
        }
        log.push(LogRow {
            iteration: it,
            mean_return: mean,
            grad_norm: norm,
            wallclock_s: clock.elapsed().as_secs_f64(),
        });
        if mean > best.0 {
            best = (mean, policy.clone());
        }
        let mut g = est.grad;
        if let Some(c) = cfg.grad_clip {
            if norm > c {
                g.iter_mut().for_each(|x| *x *= c / norm);
            }
        }
        opt.step(&mut policy.params, &g);
    }
    Ok(TrainResult {
        log,
        final_policy: policy,
        best_policy: best.1,
        best_return: best.0,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::automata::translate_fragment;
    use crate::envs::Parking;
    use crate::ltl::parse_ltl;
    use crate::trainer::PolicyConfig;

    #[test]
    fn zero_iterations_keeps_the_policy() {
        let f = parse_ltl("F\"x>10\"").unwrap();
        let t = Task::new(Parking::default(), translate_fragment(&f).unwrap(), 1.0, &BTreeMap::new())
            .unwrap();
        let p = t.make_policy(&PolicyConfig::Constant { init: vec![1.0] }, 0);
        let cfg = TrainConfig {
            iterations: 0,
            ..TrainConfig::default()
        };
        let r = train(&t, p.clone(), &cfg).unwrap();
        assert_eq!(r.final_policy, p);
        assert!(r.log.is_empty());
    }

    #[test]
    fn mismatched_policy_is_rejected() {
        let f = parse_ltl("F\"x>10\"").unwrap();
        let t = Task::new(Parking::default(), translate_fragment(&f).unwrap(), 1.0, &BTreeMap::new())
            .unwrap();
        let p = t.make_policy(&PolicyConfig::Constant { init: vec![1.0, 2.0] }, 0);
        assert!(matches!(
            train(&t, p, &TrainConfig::default()),
            Err(TrainError::PolicyMismatch(_))
        ));
    }
}
