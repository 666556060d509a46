use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{clamp_action, Env, EnvError, EnvSpec};
use crate::scalar::Real;

/// Braking car on a line. State `[x, v]`, action: deceleration in m/s².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParkingParams {
    pub dt: f64,
    pub x0: f64,
    pub v0: f64,
    pub max_decel: f64,
}

impl Default for ParkingParams {
    fn default() -> Self {
        Self {
            dt: 0.1,
            x0: 0.0,
            v0: 10.0,
            max_decel: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Parking {
    pub params: ParkingParams,
    spec: EnvSpec,
}

impl Default for Parking {
    fn default() -> Self {
        Self::new(ParkingParams::default()).expect("default parameters are valid")
    }
}

impl Parking {
    pub fn new(params: ParkingParams) -> Result<Self, EnvError> {
        if !(params.dt > 0.0) {
            return Err(EnvError::InvalidParam {
                name: "dt",
                reason: "must be positive".into(),
            });
        }
        if params.v0 < 0.0 {
            return Err(EnvError::InvalidParam {
                name: "v0",
                reason: "braking-only dynamics need v0 >= 0".into(),
            });
        }
        let spec = EnvSpec {
            name: "parking",
            state_dim: 2,
            action_low: vec![0.0],
            action_high: vec![params.max_decel],
            dt: params.dt,
            signals: vec!["x", "v"],
        };
        Ok(Self { params, spec })
    }
}

impl Env for Parking {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn initial_state(&self, _rng: &mut dyn RngCore) -> Vec<f64> {
        vec![self.params.x0, self.params.v0]
    }

    fn step<R: Real>(&self, s: &[R], a: &[R]) -> Vec<R> {
        let a = clamp_action(&self.spec, a)[0];
        let dt = R::cst(self.params.dt);
        let (x, v) = (s[0], s[1]);
        vec![x + v * dt, (v - a * dt).relu()]
    }

    fn signal<R: Real>(&self, s: &[R], index: usize) -> R {
        s[index]
    }

    fn observe<R: Real>(&self, s: &[R]) -> Vec<R> {
        vec![s[0] * R::cst(0.05), s[1] * R::cst(0.1)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stop_position(a: f64) -> f64 {
        let env = Parking::default();
        let mut s = vec![0.0, 10.0];
        for _ in 0..400 {
            s = env.step(&s, &[a]);
        }
        s[0]
    }

    #[test]
    fn no_braking_advances_one_meter() {
        let s = Parking::default().step(&[0.0, 10.0], &[0.0]);
        assert_eq!(s, vec![1.0, 10.0]);
    }

    #[test]
    fn stop_event_clamps_velocity() {
        let s = Parking::default().step(&[0.0, 0.05], &[1.0]);
        assert_eq!(s[1], 0.0);
    }

    #[test]
    fn stop_position_at_four() {
        // explicit Euler: x_stop = sum_{k<n} (10 - 0.4k) * 0.1, n = 25
        let oracle: f64 = (0..25).map(|k| (10.0 - 0.4 * k as f64) * 0.1).sum();
        let x = stop_position(4.0);
        assert!((x - oracle).abs() < 1e-9);
        assert!((12.0..=13.0 + 1e-9).contains(&x), "{x}");
    }

    #[test]
    fn action_is_clamped() {
        let env = Parking::default();
        assert_eq!(env.step(&[0.0, 10.0], &[20.0]), env.step(&[0.0, 10.0], &[10.0]));
        assert_eq!(env.step(&[0.0, 10.0], &[-3.0]), env.step(&[0.0, 10.0], &[0.0]));
    }
}
