use std::collections::BTreeMap;

use crate::envs::Env;
use crate::ltl::{AtomicProp, Label};
use crate::scalar::Real;

use super::ProductError;

/// Probability that an AP holds: `sigmoid(g(s) / tau)`.
pub fn pr_ap<R: Real>(ap: &AtomicProp, signal_value: R, tau: f64) -> R {
    (ap.margin(signal_value) / R::cst(tau)).sigmoid()
}

/// APs bound to environment signals, with per-AP temperatures.
#[derive(Debug, Clone)]
pub struct Labeler {
    pub aps: Vec<AtomicProp>,
    signal: Vec<usize>,
    tau: Vec<f64>,
}

impl Labeler {
    pub fn bind<E: Env>(
        env: &E,
        aps: &[AtomicProp],
        tau: f64,
        overrides: &BTreeMap<String, f64>,
    ) -> Result<Self, ProductError> {
        let spec = env.spec();
        let mut signal = Vec::with_capacity(aps.len());
        let mut taus = Vec::with_capacity(aps.len());
        for ap in aps {
            let idx = spec
                .signal_index(&ap.signal)
                .ok_or_else(|| ProductError::UnboundSignal {
                    ap: ap.name.clone(),
                    signal: ap.signal.clone(),
                    env: spec.name.to_string(),
                })?;
            let t = overrides.get(&ap.name).copied().unwrap_or(tau);
            if !(t > 0.0) {
                return Err(ProductError::BadTemperature(t));
            }
            signal.push(idx);
            taus.push(t);
        }
        Ok(Self {
            aps: aps.to_vec(),
            signal,
            tau: taus,
        })
    }

    pub fn probabilities<R: Real, E: Env>(&self, env: &E, s: &[R]) -> Vec<R> {
        self.aps
            .iter()
            .zip(self.signal.iter().zip(&self.tau))
            .map(|(ap, (&i, &t))| pr_ap(ap, env.signal(s, i), t))
            .collect()
    }

    /// Thresholded probabilities: exactly 1 where `g(s) > 0`, else 0.
    pub fn hard_probabilities<R: Real, E: Env>(&self, env: &E, s: &[R]) -> Vec<R> {
        self.aps
            .iter()
            .zip(&self.signal)
            .map(|(ap, &i)| {
                let g = ap.margin(env.signal(s, i)).value();
                R::cst(if g > 0.0 { 1.0 } else { 0.0 })
            })
            .collect()
    }

    pub fn label<E: Env>(&self, env: &E, s: &[f64]) -> Label {
        self.aps
            .iter()
            .zip(&self.signal)
            .enumerate()
            .fold(0, |acc, (k, (ap, &i))| {
                if ap.holds(env.signal(s, i)) {
                    acc | 1 << k
                } else {
                    acc
                }
            })
    }
}
