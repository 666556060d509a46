use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::diff::Tape;
use crate::envs::Env;
use crate::scalar::Real;

use super::rollout::{rollout_discrete, rollout_soft};
use super::{Policy, RewardKind, Task, TrainConfig, TrainError};

#[derive(Debug, Clone, PartialEq)]
pub struct GradEstimate {
    pub grad: Vec<f64>,
    /// Return of each rollout that entered the estimate.
    pub returns: Vec<f64>,
}

impl GradEstimate {
    pub fn mean_return(&self) -> f64 {
        self.returns.iter().sum::<f64>() / self.returns.len() as f64
    }

    pub fn norm(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// `(1/N) sum_i grad_theta G(sigma_i)` by reverse mode through the soft
/// product, one tape per rollout.
pub fn grad_first<E: Env>(
    task: &Task<E>,
    policy: &Policy,
    starts: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<GradEstimate, TrainError> {
    let reward = cfg.reward()?;
    let mut grad = vec![0.0; policy.num_params()];
    let mut returns = Vec::with_capacity(starts.len());
    for s0 in starts {
        let tape = Tape::<f64>::new();
        let theta = tape.vars(&policy.params);
        let out = rollout_soft(task, policy, &theta, s0, &reward, cfg.horizon, None)?;
        let g = tape.backward(out.ret, &theta)?;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        returns.push(out.ret.value());
    }
    let n = starts.len() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    Ok(GradEstimate { grad, returns })
}

/// Likelihood-ratio estimate `(1/N) sum_i (G_i - b) sum_t grad log pi(a_t|s_t)`
/// under Gaussian exploration of width `cfg.sigma` around the mean action.
/// `b` is the mean return when `cfg.baseline` is set, else 0.
pub fn grad_zeroth<E: Env>(
    task: &Task<E>,
    policy: &Policy,
    starts: &[Vec<f64>],
    cfg: &TrainConfig,
    rng: &mut dyn RngCore,
) -> Result<GradEstimate, TrainError> {
    if !(cfg.sigma > 0.0) {
        return Err(TrainError::Config {
            key: "sigma",
            reason: "must be positive".into(),
        });
    }
    let reward = cfg.reward()?;
    let act_dim = task.env.spec().action_dim();
    let mut returns = Vec::with_capacity(starts.len());
    let mut scores = Vec::with_capacity(starts.len());
    for s0 in starts {
        let noise: Vec<Vec<f64>> = (0..cfg.horizon)
            .map(|_| {
                (0..act_dim)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        cfg.sigma * z
                    })
                    .collect()
            })
            .collect();
        let (ret, steps) = match cfg.zeroth_reward {
            RewardKind::Soft => {
                let out = rollout_soft(
                    task,
                    policy,
                    &policy.params,
                    s0,
                    &reward,
                    cfg.horizon,
                    Some(&noise),
                )?;
                (out.ret, out.steps)
            }
            RewardKind::Discrete => {
                let out = rollout_discrete(task, policy, s0, &reward, cfg.horizon, Some(&noise));
                (out.ret, out.steps)
            }
        };
        returns.push(ret);
        scores.push(score(policy, &steps, cfg.sigma)?);
    }
    let n = starts.len() as f64;
    let b = if cfg.baseline {
        returns.iter().sum::<f64>() / n
    } else {
        0.0
    };
    let mut grad = vec![0.0; policy.num_params()];
    for (g_i, sc) in returns.iter().zip(&scores) {
        grad.iter_mut()
            .zip(sc)
            .for_each(|(a, s)| *a += (g_i - b) * s / n);
    }
    Ok(GradEstimate { grad, returns })
}

/// `sum_t grad_theta log N(a_t; mu_theta(s_t), sigma^2)`.
fn score(
    policy: &Policy,
    steps: &[super::StepRecord],
    sigma: f64,
) -> Result<Vec<f64>, TrainError> {
    let tape = Tape::<f64>::new();
    let theta = tape.vars(&policy.params);
    let mut terms = Vec::new();
    for st in steps {
        let obs: Vec<_> = st.obs.iter().map(|&x| tape.constant(x)).collect();
        let q: Vec<_> = st.q.iter().map(|&x| tape.constant(x)).collect();
        let mu = policy.forward(&theta, &obs, &q).action;
        for (m, &a) in mu.iter().zip(&st.action) {
            terms.push((tape.constant(a) - *m).square());
        }
    }
    let total = Real::sum(&terms) * tape.constant(-0.5 / (sigma * sigma));
    Ok(tape.backward(total, &theta)?)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::automata::translate_fragment;
    use crate::envs::Parking;
    use crate::ltl::parse_ltl;
    use crate::trainer::PolicyConfig;

    fn rejecting_task() -> Task<Parking> {
        let f = parse_ltl("G\"x<-100\"").unwrap();
        Task::new(Parking::default(), translate_fragment(&f).unwrap(), 1.0, &BTreeMap::new())
            .unwrap()
    }

    #[test]
    fn zero_return_means_zero_gradient() {
        let t = rejecting_task();
        let cfg = TrainConfig {
            horizon: 20,
            ..TrainConfig::default()
        };
        let p = t.make_policy(&PolicyConfig::default(), 1);
        let starts = vec![vec![0.0, 10.0]];
        let g = grad_first(&t, &p, &starts, &cfg).unwrap();
        assert!(g.grad.iter().all(|&x| x == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = grad_zeroth(&t, &p, &starts, &cfg, &mut rng).unwrap();
        assert!(z.grad.iter().all(|&x| x == 0.0));
        let bare = TrainConfig {
            baseline: false,
            ..cfg.clone()
        };
        let z = grad_zeroth(&t, &p, &starts, &bare, &mut rng).unwrap();
        assert!(z.grad.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zeroth_needs_noise() {
        let t = rejecting_task();
        let cfg = TrainConfig {
            sigma: 0.0,
            ..TrainConfig::default()
        };
        let p = t.make_policy(&PolicyConfig::Constant { init: vec![1.0] }, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(grad_zeroth(&t, &p, &[vec![0.0, 10.0]], &cfg, &mut rng).is_err());
    }
}
