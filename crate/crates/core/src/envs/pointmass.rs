use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{clamp_action, Env, EnvError, EnvSpec};
use crate::scalar::Real;

/// Planar point mass with linear drag. State `[x, y, vx, vy]`, action `[fx, fy]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointMassParams {
    pub dt: f64,
    pub drag: f64,
    pub force_limit: f64,
    /// Initial position drawn uniformly from `[-init_spread, init_spread]²`, at rest.
    pub init_spread: f64,
}

impl Default for PointMassParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            drag: 0.1,
            force_limit: 1.0,
            init_spread: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointMass {
    pub params: PointMassParams,
    spec: EnvSpec,
}

impl Default for PointMass {
    fn default() -> Self {
        Self::new(PointMassParams::default()).expect("default parameters are valid")
    }
}

impl PointMass {
    pub fn new(params: PointMassParams) -> Result<Self, EnvError> {
        if !(params.dt > 0.0) {
            return Err(EnvError::InvalidParam {
                name: "dt",
                reason: "must be positive".into(),
            });
        }
        if !(params.force_limit > 0.0) || params.init_spread < 0.0 {
            return Err(EnvError::InvalidParam {
                name: "force_limit",
                reason: "force limit must be positive and spread non-negative".into(),
            });
        }
        let f = params.force_limit;
        let spec = EnvSpec {
            name: "pointmass",
            state_dim: 4,
            action_low: vec![-f, -f],
            action_high: vec![f, f],
            dt: params.dt,
            signals: vec!["x", "y", "vx", "vy"],
        };
        Ok(Self { params, spec })
    }
}

impl Env for PointMass {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn initial_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let w = self.params.init_spread;
        if w == 0.0 {
            return vec![0.0; 4];
        }
        vec![rng.gen_range(-w..=w), rng.gen_range(-w..=w), 0.0, 0.0]
    }

    fn step<R: Real>(&self, s: &[R], a: &[R]) -> Vec<R> {
        let a = clamp_action(&self.spec, a);
        let dt = R::cst(self.params.dt);
        let drag = R::cst(self.params.drag);
        let vx = s[2] + (a[0] - drag * s[2]) * dt;
        let vy = s[3] + (a[1] - drag * s[3]) * dt;
        vec![s[0] + vx * dt, s[1] + vy * dt, vx, vy]
    }

    fn signal<R: Real>(&self, s: &[R], index: usize) -> R {
        s[index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_is_a_fixed_point() {
        let s = PointMass::default().step(&[0.0; 4], &[0.0, 0.0]);
        assert_eq!(s, vec![0.0; 4]);
    }

    #[test]
    fn unit_force_one_step() {
        let s: Vec<f64> = PointMass::default().step(&[0.0; 4], &[1.0, 0.0]);
        assert!((s[2] - 0.1).abs() < 1e-15);
        assert!((s[0] - 0.01).abs() < 1e-15);
        assert_eq!((s[1], s[3]), (0.0, 0.0));
    }

    /// Independent plain-float simulator.
    fn reference(mut s: [f64; 4], actions: &[[f64; 2]]) -> [f64; 4] {
        for a in actions {
            let fx = a[0].clamp(-1.0, 1.0);
            let fy = a[1].clamp(-1.0, 1.0);
            s[2] += (fx - 0.1 * s[2]) * 0.1;
            s[3] += (fy - 0.1 * s[3]) * 0.1;
            s[0] += s[2] * 0.1;
            s[1] += s[3] * 0.1;
        }
        s
    }

    #[test]
    fn matches_reference_bit_for_bit() {
        let env = PointMass::default();
        let actions: Vec<[f64; 2]> = (0..100)
            .map(|k| {
                let t = k as f64 * 0.37;
                [1.5 * t.sin(), t.cos() - 0.2]
            })
            .collect();
        let mut s = vec![0.05, -0.03, 0.0, 0.0];
        for a in &actions {
            s = env.step(&s, a);
        }
        let r = reference([0.05, -0.03, 0.0, 0.0], &actions);
        assert_eq!(s, r.to_vec());
    }
}
