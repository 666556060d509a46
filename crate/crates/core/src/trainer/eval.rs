use rand::RngCore;
use serde::Serialize;

use crate::envs::Env;

use super::rollout::discrete_step;
use super::{Policy, Task};

/// Revisit tolerance for lasso detection (max-norm on the env state).
pub const REVISIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatisfactionEstimate {
    pub psat: f64,
    pub episodes: usize,
    /// Episodes decided by the accepting-frequency proxy instead of an
    /// exact lasso.
    pub approximate_episodes: usize,
}

impl SatisfactionEstimate {
    pub fn is_exact(&self) -> bool {
        self.approximate_episodes == 0
    }
}

/// Outcome of one evaluation episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Verdict {
    /// A product state repeated; the cycle decides Büchi acceptance.
    Lasso(bool),
    /// Fraction of the last half of the horizon spent accepting.
    Proxy(f64),
}

pub(crate) fn episode<E: Env>(task: &Task<E>, policy: &Policy, s0: &[f64], horizon: usize) -> Verdict {
    let n = task.ldba.num_states();
    let accept_sink: Vec<bool> = (0..n).map(|q| task.ldba.is_accepting_sink(q)).collect();
    let reject_sink: Vec<bool> = (0..n).map(|q| task.ldba.is_rejecting_sink(q)).collect();
    let mut history: Vec<(Vec<f64>, usize)> = vec![(s0.to_vec(), task.ldba.initial)];
    for _ in 0..horizon {
        let (s, q) = history.last().unwrap().clone();
        let (s2, q2, _, _) = discrete_step(task, policy, &s, q, None);
        // Sinks decide acceptance regardless of the remaining trajectory.
        if accept_sink[q2] || reject_sink[q2] {
            return Verdict::Lasso(accept_sink[q2]);
        }
        if let Some(k) = history.iter().position(|(hs, hq)| {
            *hq == q2
                && hs
                    .iter()
                    .zip(&s2)
                    .all(|(a, b)| (a - b).abs() <= REVISIT_TOLERANCE)
        }) {
            let accepting = history[k..].iter().any(|(_, q)| task.ldba.is_accepting(*q));
            return Verdict::Lasso(accepting);
        }
        history.push((s2, q2));
    }
    let tail = &history[history.len() - (horizon / 2).max(1)..];
    let hits = tail.iter().filter(|(_, q)| task.ldba.is_accepting(*q)).count();
    Verdict::Proxy(hits as f64 / tail.len() as f64)
}

/// Monte Carlo estimate of the satisfaction probability of the policy's
/// deterministic head, using the discrete product with hard labels.
pub fn eval_satisfaction<E: Env>(
    task: &Task<E>,
    policy: &Policy,
    n_episodes: usize,
    horizon: usize,
    rng: &mut dyn RngCore,
) -> SatisfactionEstimate {
    let mut total = 0.0;
    let mut approximate = 0;
    for _ in 0..n_episodes {
        let s0 = task.env.initial_state(rng);
        match episode(task, policy, &s0, horizon) {
            Verdict::Lasso(acc) => total += if acc { 1.0 } else { 0.0 },
            Verdict::Proxy(f) => {
                approximate += 1;
                total += f;
            }
        }
    }
    SatisfactionEstimate {
        psat: total / n_episodes.max(1) as f64,
        episodes: n_episodes,
        approximate_episodes: approximate,
    }
}
