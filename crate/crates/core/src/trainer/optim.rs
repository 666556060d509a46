use super::{OptimizerKind, TrainConfig};

/// Gradient-ascent optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Sgd {
        lr: f64,
    },
    Adam {
        lr: f64,
        beta1: f64,
        beta2: f64,
        eps: f64,
        m: Vec<f64>,
        v: Vec<f64>,
        t: u32,
    },
}

impl Optimizer {
    pub fn sgd(lr: f64) -> Self {
        Optimizer::Sgd { lr }
    }

    pub fn adam(lr: f64, n: usize) -> Self {
        Optimizer::Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn from_config(cfg: &TrainConfig, n: usize) -> Self {
        match cfg.optimizer {
            OptimizerKind::Sgd => Self::sgd(cfg.lr),
            OptimizerKind::Adam => Self::adam(cfg.lr, n),
        }
    }

    /// Move `params` uphill along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        match self {
            Optimizer::Sgd { lr } => {
                params.iter_mut().zip(grad).for_each(|(p, g)| *p += *lr * g);
            }
            Optimizer::Adam {
                lr,
                beta1,
                beta2,
                eps,
                m,
                v,
                t,
            } => {
                *t += 1;
                let c1 = 1.0 - beta1.powi(*t as i32);
                let c2 = 1.0 - beta2.powi(*t as i32);
                for i in 0..params.len() {
                    m[i] = *beta1 * m[i] + (1.0 - *beta1) * grad[i];
                    v[i] = *beta2 * v[i] + (1.0 - *beta2) * grad[i] * grad[i];
                    params[i] += *lr * (m[i] / c1) / ((v[i] / c2).sqrt() + *eps);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_ascends() {
        let mut o = Optimizer::sgd(0.1);
        let mut p = vec![1.0, 2.0];
        o.step(&mut p, &[1.0, -2.0]);
        assert_eq!(p, vec![1.1, 1.8]);
    }

    #[test]
    fn adam_first_step_is_lr_sized() {
        let mut o = Optimizer::adam(0.01, 2);
        let mut p = vec![0.0, 0.0];
        o.step(&mut p, &[3.0, -0.5]);
        assert!((p[0] - 0.01).abs() < 1e-8 && (p[1] + 0.01).abs() < 1e-8);
    }

    #[test]
    fn adam_climbs_a_quadratic() {
        let mut o = Optimizer::adam(0.05, 1);
        let mut p = vec![0.0];
        for _ in 0..2000 {
            let g = -2.0 * (p[0] - 3.0);
            o.step(&mut p, &[g]);
        }
        assert!((p[0] - 3.0).abs() < 1e-3);
    }
}
