use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{clamp_action, Env, EnvError, EnvSpec};
use crate::scalar::Real;

/// Frictionless cart-pole, semi-implicit Euler.
///
/// State `[x, x_dot, theta, theta_dot]` with `theta = 0` meaning the pole
/// hangs straight down. `pole_z = -cos(theta) * pole_length` is the tip
/// height relative to the pivot, where `pole_length = 2 * half_length`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CartpoleParams {
    pub dt: f64,
    pub gravity: f64,
    pub cart_mass: f64,
    pub pole_mass: f64,
    pub half_length: f64,
    pub force_limit: f64,
    /// Each state coordinate starts uniformly in `[-init_spread, init_spread]`.
    pub init_spread: f64,
}

impl Default for CartpoleParams {
    fn default() -> Self {
        Self {
            dt: 0.02,
            gravity: 9.81,
            cart_mass: 1.0,
            pole_mass: 0.1,
            half_length: 0.5,
            force_limit: 20.0,
            init_spread: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cartpole {
    pub params: CartpoleParams,
    spec: EnvSpec,
}

impl Default for Cartpole {
    fn default() -> Self {
        Self::new(CartpoleParams::default()).expect("default parameters are valid")
    }
}

const SIGNALS: [&str; 8] = [
    "position_x",
    "velocity_x",
    "cos_theta",
    "sin_theta",
    "omega",
    "pole_z",
    "cart_x",
    "cart_vx",
];

impl Cartpole {
    pub fn new(params: CartpoleParams) -> Result<Self, EnvError> {
        let positive = [
            ("dt", params.dt),
            ("cart_mass", params.cart_mass),
            ("pole_mass", params.pole_mass),
            ("half_length", params.half_length),
            ("force_limit", params.force_limit),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(EnvError::InvalidParam {
                    name,
                    reason: format!("must be positive, got {v}"),
                });
            }
        }
        let f = params.force_limit;
        let spec = EnvSpec {
            name: "cartpole",
            state_dim: 4,
            action_low: vec![-f],
            action_high: vec![f],
            dt: params.dt,
            signals: SIGNALS.to_vec(),
        };
        Ok(Self { params, spec })
    }

    /// Total mechanical energy (rod pole, pivot on the cart).
    pub fn energy(&self, s: &[f64]) -> f64 {
        let p = &self.params;
        let (m, l) = (p.pole_mass, p.half_length);
        let total = p.cart_mass + m;
        let (xd, th, thd) = (s[1], s[2], s[3]);
        0.5 * total * xd * xd
            - m * l * xd * thd * th.cos()
            + 0.5 * (4.0 / 3.0) * m * l * l * thd * thd
            - m * p.gravity * l * th.cos()
    }
}

impl Env for Cartpole {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn initial_state(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let w = self.params.init_spread;
        if w == 0.0 {
            return vec![0.0; 4];
        }
        (0..4).map(|_| rng.gen_range(-w..=w)).collect()
    }

    fn step<R: Real>(&self, s: &[R], a: &[R]) -> Vec<R> {
        let p = &self.params;
        let force = clamp_action(&self.spec, a)[0];
        let (m, l) = (R::cst(p.pole_mass), R::cst(p.half_length));
        let total = R::cst(p.cart_mass + p.pole_mass);
        let (x, xd, th, thd) = (s[0], s[1], s[2], s[3]);
        let (sin, cos) = (th.sin(), th.cos());
        let temp = (force - m * l * thd * thd * sin) / total;
        let thdd = (R::cst(-p.gravity) * sin + cos * temp)
            / (l * (R::cst(4.0 / 3.0) - m * cos * cos / total));
        let xdd = temp + m * l * thdd * cos / total;
        let dt = R::cst(p.dt);
        let xd2 = xd + xdd * dt;
        let thd2 = thd + thdd * dt;
        vec![x + xd2 * dt, xd2, th + thd2 * dt, thd2]
    }

    fn signal<R: Real>(&self, s: &[R], index: usize) -> R {
        match SIGNALS[index] {
            "position_x" | "cart_x" => s[0],
            "velocity_x" | "cart_vx" => s[1],
            "cos_theta" => s[2].cos(),
            "sin_theta" => s[2].sin(),
            "omega" => s[3],
            "pole_z" => -(s[2].cos()) * R::cst(2.0 * self.params.half_length),
            _ => unreachable!("signal table and match are in sync"),
        }
    }

    fn observe<R: Real>(&self, s: &[R]) -> Vec<R> {
        vec![s[0], s[1], s[2].cos(), s[2].sin(), s[3]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hanging_pole_is_fixed() {
        let env = Cartpole::default();
        let s = env.step(&[0.0; 4], &[0.0]);
        assert_eq!(s, vec![0.0; 4]);
        assert_eq!(env.signal(&s, 5), -1.0);
    }

    #[test]
    fn upright_equilibrium_persists() {
        let env = Cartpole::default();
        let mut s = vec![0.0, 0.0, std::f64::consts::PI, 0.0];
        for _ in 0..10 {
            s = env.step(&s, &[0.0]);
        }
        // sin(pi) is 1.2e-16 in floating point, so only approximately
        assert!((s[2] - std::f64::consts::PI).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
    }

    #[test]
    fn passive_energy_has_no_secular_drift() {
        let env = Cartpole::default();
        let mut s = vec![0.0, 0.0, 0.8, 0.0];
        let e0 = env.energy(&s);
        let mut es = Vec::new();
        for _ in 0..500 {
            s = env.step(&s, &[0.0]);
            es.push(env.energy(&s));
        }
        // least-squares slope of energy over the run
        let n = es.len() as f64;
        let tm = (n - 1.0) / 2.0;
        let em = es.iter().sum::<f64>() / n;
        let num: f64 = es.iter().enumerate().map(|(t, e)| (t as f64 - tm) * (e - em)).sum();
        let den: f64 = (0..es.len()).map(|t| (t as f64 - tm).powi(2)).sum();
        let drift = (num / den * n).abs() / e0.abs();
        assert!(drift < 0.01, "relative drift over run {drift}");
        let rel_mean = ((em - e0) / e0).abs();
        assert!(rel_mean < 0.05, "mean offset {rel_mean}");
    }

    #[test]
    fn force_pushes_cart() {
        let env = Cartpole::default();
        let s = env.step(&[0.0; 4], &[100.0]);
        assert!(s[1] > 0.0);
        let capped = env.step(&[0.0; 4], &[20.0]);
        assert_eq!(s, capped);
    }
}
