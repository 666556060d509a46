use crate::envs::Env;
use crate::product::{reward_discount, step_discrete, RewardParams};
use crate::scalar::Real;

use super::{Policy, Task, TrainError};

/// Plain-valued record of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// Policy input: observation features.
    pub obs: Vec<f64>,
    /// Policy input: belief before the step.
    pub q: Vec<f64>,
    /// Action actually applied, before environment clamping.
    pub action: Vec<f64>,
    pub r: f64,
    pub d: f64,
}

#[derive(Debug, Clone)]
pub struct SoftRollout<R> {
    /// `sum_t r_t prod_{i<t} d_i`.
    pub ret: R,
    pub steps: Vec<StepRecord>,
    pub final_state: Vec<f64>,
    pub final_belief: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DiscreteRollout {
    pub ret: f64,
    pub steps: Vec<StepRecord>,
    /// Automaton state before each step, plus the final one.
    pub automaton_states: Vec<usize>,
    pub final_state: Vec<f64>,
}

fn values<R: Real>(v: &[R]) -> Vec<f64> {
    v.iter().map(|x| x.value()).collect()
}

/// One soft-product episode. `noise[t]` is added to the mean action at
/// step `t`; with `R = Var` and no noise the return is differentiable in
/// `theta` end to end.
pub fn rollout_soft<R: Real, E: Env>(
    task: &Task<E>,
    policy: &Policy,
    theta: &[R],
    s0: &[f64],
    reward: &RewardParams,
    horizon: usize,
    noise: Option<&[Vec<f64>]>,
) -> Result<SoftRollout<R>, TrainError> {
    let mut s: Vec<R> = s0.iter().map(|&x| R::cst(x)).collect();
    let mut q: Vec<R> = task.soft.initial_belief();
    let mut ret = R::cst(0.0);
    let mut disc = R::cst(1.0);
    let mut steps = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let obs = task.env.observe(&s);
        let out = policy.forward(theta, &obs, &q);
        let action: Vec<R> = match noise {
            Some(n) => out
                .action
                .iter()
                .zip(&n[t])
                .map(|(&a, &z)| a + R::cst(z))
                .collect(),
            None => out.action,
        };
        let p = task.labeler.probabilities(&task.env, &s);
        let e = match out.eps {
            Some(e) => e,
            None => task.soft.default_eps(&p),
        };
        let q1 = task.soft.step_eps(&q, &e)?;
        let q2 = task.soft.step_label(&p, &q1)?;
        let s2 = task.env.step(&s, &action);
        let (r, d) = reward_discount(&q2, &task.soft.accepting, reward);
        ret = ret + disc * r;
        disc = disc * d;
        if !ret.value().is_finite() || s2.iter().any(|x| !x.value().is_finite()) {
            return Err(TrainError::NonFinite { step: t });
        }
        steps.push(StepRecord {
            obs: values(&obs),
            q: values(&q),
            action: values(&action),
            r: r.value(),
            d: d.value(),
        });
        s = s2;
        q = q2;
    }
    Ok(SoftRollout {
        ret,
        steps,
        final_state: values(&s),
        final_belief: values(&q),
    })
}

/// One step of the discrete product under `policy`: returns
/// `(s', q', applied action)`.
pub(crate) fn discrete_step<E: Env>(
    task: &Task<E>,
    policy: &Policy,
    s: &[f64],
    q: usize,
    noise: Option<&[f64]>,
) -> (Vec<f64>, usize, Vec<f64>, Vec<f64>) {
    let n = task.soft.num_states();
    let belief: Vec<f64> = (0..n).map(|k| if k == q { 1.0 } else { 0.0 }).collect();
    let obs = task.env.observe(s);
    let out = policy.forward(&policy.params, &obs, &belief);
    let mut action = out.action;
    if let Some(z) = noise {
        action.iter_mut().zip(z).for_each(|(a, z)| *a += z);
    }
    let label = task.labeler.label(&task.env, s);
    let choice = match out.eps {
        Some(e) => argmax(&e),
        None => task.soft.default_eps_choice(q, label),
    };
    let q2 = step_discrete(&task.ldba, q, label, choice);
    (task.env.step(s, &action), q2, action, obs)
}

fn argmax(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b >= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

/// Episode of the discrete product with hard labels.
pub fn rollout_discrete<E: Env>(
    task: &Task<E>,
    policy: &Policy,
    s0: &[f64],
    reward: &RewardParams,
    horizon: usize,
    noise: Option<&[Vec<f64>]>,
) -> DiscreteRollout {
    let n = task.soft.num_states();
    let mut s = s0.to_vec();
    let mut q = task.ldba.initial;
    let mut ret = 0.0;
    let mut disc = 1.0;
    let mut steps = Vec::with_capacity(horizon);
    let mut automaton_states = vec![q];
    for t in 0..horizon {
        let (s2, q2, action, obs) = discrete_step(task, policy, &s, q, noise.map(|z| &z[t][..]));
        let (r, d) = if task.ldba.is_accepting(q2) {
            (1.0 - reward.beta, reward.beta)
        } else {
            (0.0, reward.gamma)
        };
        ret += disc * r;
        disc *= d;
        steps.push(StepRecord {
            obs,
            q: (0..n).map(|k| if k == q { 1.0 } else { 0.0 }).collect(),
            action,
            r,
            d,
        });
        automaton_states.push(q2);
        s = s2;
        q = q2;
    }
    DiscreteRollout {
        ret,
        steps,
        automaton_states,
        final_state: s,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::automata::translate_fragment;
    use crate::envs::Parking;
    use crate::ltl::parse_ltl;
    use crate::trainer::PolicyConfig;

    fn task(formula: &str) -> Task<Parking> {
        let f = parse_ltl(formula).unwrap();
        let a = translate_fragment(&f).unwrap();
        Task::new(Parking::default(), a, 0.1, &BTreeMap::new()).unwrap()
    }

    fn constant(a: f64) -> Policy {
        Policy::new(&PolicyConfig::Constant { init: vec![a] }, 0, &[0.0], &[10.0], 0, 0)
    }

    #[test]
    fn accepting_loop_geometric_series() {
        let t = task("true");
        let rp = RewardParams::with_beta(0.5, 0.9).unwrap();
        let p = constant(0.0);
        let out = rollout_soft(&t, &p, &p.params, &[0.0, 10.0], &rp, 3, None).unwrap();
        assert!((out.ret - 0.271).abs() < 1e-12);
        let d = rollout_discrete(&t, &p, &[0.0, 10.0], &rp, 3, None);
        assert!((d.ret - 0.271).abs() < 1e-12);
    }

    #[test]
    fn rejecting_automaton_gives_zero() {
        let t = task("G\"x<-100\"");
        let rp = RewardParams::new(0.99).unwrap();
        let p = constant(0.0);
        let out = rollout_soft(&t, &p, &p.params, &[0.0, 10.0], &rp, 50, None).unwrap();
        assert!(out.ret.abs() < 1e-12);
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[0.2, 0.5, 0.5]), Some(1));
        assert_eq!(argmax(&[]), None);
    }
}
