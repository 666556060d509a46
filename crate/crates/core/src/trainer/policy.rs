use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Policy architecture, as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PolicyConfig {
    /// Open-loop constant action; `init` has one entry per action dimension.
    Constant { init: Vec<f64> },
    /// Tanh MLP over `observe(s) ++ q`.
    Mlp {
        #[serde(default = "default_hidden")]
        hidden: Vec<usize>,
        /// Add a softmax ε head when the automaton has ε-edges.
        #[serde(default = "default_true")]
        eps_head: bool,
        #[serde(default = "default_init_scale")]
        init_scale: f64,
    },
}

fn default_hidden() -> Vec<usize> {
    vec![64, 64]
}

fn default_true() -> bool {
    true
}

fn default_init_scale() -> f64 {
    1.0
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig::Mlp {
            hidden: default_hidden(),
            eps_head: true,
            init_scale: 1.0,
        }
    }
}

/// Layer structure of a policy; parameters live in a flat vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PolicyShape {
    Constant {
        action_dim: usize,
    },
    Mlp {
        /// Widths `[input, hidden.., action]`.
        layers: Vec<usize>,
        /// Width of the ε head, 0 when absent.
        eps_dim: usize,
        action_low: Vec<f64>,
        action_high: Vec<f64>,
    },
}

/// What a policy emits at one step.
pub struct PolicyOutput<R> {
    pub action: Vec<R>,
    pub eps: Option<Vec<R>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub shape: PolicyShape,
    pub params: Vec<f64>,
}

impl Policy {
    /// Build a policy. `input_dim` counts observation plus belief entries.
    pub fn new(
        cfg: &PolicyConfig,
        input_dim: usize,
        action_low: &[f64],
        action_high: &[f64],
        eps_dim: usize,
        seed: u64,
    ) -> Self {
        match cfg {
            PolicyConfig::Constant { init } => Policy {
                shape: PolicyShape::Constant {
                    action_dim: init.len(),
                },
                params: init.clone(),
            },
            PolicyConfig::Mlp {
                hidden,
                eps_head,
                init_scale,
            } => {
                let mut layers = vec![input_dim];
                layers.extend(hidden);
                layers.push(action_low.len());
                let eps_dim = if *eps_head { eps_dim } else { 0 };
                let shape = PolicyShape::Mlp {
                    layers: layers.clone(),
                    eps_dim,
                    action_low: action_low.to_vec(),
                    action_high: action_high.to_vec(),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut params = Vec::with_capacity(shape.num_params());
                let last_hidden = layers[layers.len() - 2];
                let mut dense = |params: &mut Vec<f64>, fan_in: usize, fan_out: usize, gain: f64| {
                    let bound = gain * init_scale * (6.0 / (fan_in + fan_out) as f64).sqrt();
                    for _ in 0..fan_in * fan_out {
                        params.push(rng.gen_range(-bound..bound));
                    }
                    params.extend(std::iter::repeat(0.0).take(fan_out));
                };
                let depth = layers.len() - 1;
                for (k, w) in layers.windows(2).enumerate() {
                    let gain = if k + 1 == depth { 0.1 } else { 1.0 };
                    dense(&mut params, w[0], w[1], gain);
                }
                if eps_dim > 0 {
                    dense(&mut params, last_hidden, eps_dim, 0.1);
                }
                debug_assert_eq!(params.len(), shape.num_params());
                Policy { shape, params }
            }
        }
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn has_eps_head(&self) -> bool {
        matches!(self.shape, PolicyShape::Mlp { eps_dim, .. } if eps_dim > 0)
    }

    /// Evaluate with parameters `theta` (same layout as `self.params`).
    pub fn forward<R: Real>(&self, theta: &[R], obs: &[R], q: &[R]) -> PolicyOutput<R> {
        match &self.shape {
            PolicyShape::Constant { .. } => PolicyOutput {
                action: theta.to_vec(),
                eps: None,
            },
            PolicyShape::Mlp {
                layers,
                eps_dim,
                action_low,
                action_high,
            } => {
                let mut h: Vec<R> = obs.iter().chain(q).copied().collect();
                let mut off = 0;
                let depth = layers.len() - 1;
                let mut hidden_out = Vec::new();
                for (k, w) in layers.windows(2).enumerate() {
                    let z = dense(theta, &mut off, &h, w[0], w[1]);
                    if k + 1 < depth {
                        h = z.into_iter().map(|v| v.tanh()).collect();
                        hidden_out = h.clone();
                    } else {
                        h = z;
                    }
                }
                let action = h
                    .into_iter()
                    .zip(action_low.iter().zip(action_high))
                    .map(|(z, (&lo, &hi))| {
                        R::cst(0.5 * (lo + hi)) + R::cst(0.5 * (hi - lo)) * z.tanh()
                    })
                    .collect();
                let eps = (*eps_dim > 0).then(|| {
                    let last = layers[depth - 1];
                    let logits = dense(theta, &mut off, &hidden_out, last, *eps_dim);
                    R::softmax(&logits)
                });
                PolicyOutput { action, eps }
            }
        }
    }
}

impl PolicyShape {
    pub fn num_params(&self) -> usize {
        match self {
            PolicyShape::Constant { action_dim } => *action_dim,
            PolicyShape::Mlp { layers, eps_dim, .. } => {
                let body: usize = layers.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
                let last = layers[layers.len() - 2];
                body + if *eps_dim > 0 { last * eps_dim + eps_dim } else { 0 }
            }
        }
    }
}

/// Row-major `W x + b`, consuming parameters from `theta[*off..]`.
fn dense<R: Real>(theta: &[R], off: &mut usize, x: &[R], n_in: usize, n_out: usize) -> Vec<R> {
    let w = &theta[*off..*off + n_in * n_out];
    let b = &theta[*off + n_in * n_out..*off + n_in * n_out + n_out];
    *off += n_in * n_out + n_out;
    (0..n_out)
        .map(|r| R::dot(&w[r * n_in..(r + 1) * n_in], x) + b[r])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_policy_echoes_parameters() {
        let p = Policy::new(&PolicyConfig::Constant { init: vec![1.0] }, 2, &[0.0], &[10.0], 0, 0);
        let out = p.forward(&p.params, &[0.3, 0.4], &[1.0]);
        assert_eq!(out.action, vec![1.0]);
        assert!(out.eps.is_none());
    }

    #[test]
    fn mlp_shapes_and_bounds() {
        let cfg = PolicyConfig::Mlp {
            hidden: vec![8, 8],
            eps_head: true,
            init_scale: 50.0,
        };
        let p = Policy::new(&cfg, 6, &[-1.0, -1.0], &[1.0, 1.0], 3, 7);
        assert_eq!(p.num_params(), 6 * 8 + 8 + 8 * 8 + 8 + 8 * 2 + 2 + 8 * 3 + 3);
        let out = p.forward(&p.params, &[9.0, -9.0, 3.0], &[0.2, 0.3, 0.5]);
        assert!(out.action.iter().all(|a| (-1.0..=1.0).contains(a)));
        let e = out.eps.unwrap();
        assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(Policy::new(&cfg, 6, &[-1.0, -1.0], &[1.0, 1.0], 3, 7), p);
    }

    #[test]
    fn config_parses() {
        let c: PolicyConfig = serde_json::from_str(r#"{"kind":"mlp","hidden":[4]}"#).unwrap();
        assert!(matches!(c, PolicyConfig::Mlp { eps_head: true, .. }));
        assert!(serde_json::from_str::<PolicyConfig>(r#"{"kind":"mlp","width":4}"#).is_err());
    }
}
