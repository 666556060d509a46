use crate::automata::{Ldba, ShannonTree};
use crate::envs::Env;
use crate::scalar::Real;

use super::{check_simplex, Labeler, ProductError};

/// Probability that a label with independent AP probabilities `p`
/// satisfies `guard`.
pub fn pr_guard<R: Real>(guard: &crate::automata::Guard, p: &[R]) -> R {
    guard.shannon_tree().probability(p)
}

/// An LDBA compiled for belief propagation.
#[derive(Debug, Clone)]
pub struct SoftAutomaton {
    /// Per source state: (guard tree, target).
    edges: Vec<Vec<(ShannonTree, usize)>>,
    eps: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
    pub initial: usize,
    /// Index that carries "no ε-move" mass in the default ε rule.
    pub stay: usize,
    /// ε-targets with their survival guards.
    targets: Vec<(usize, ShannonTree)>,
    /// Exponent applied to survival probabilities in [`Self::default_eps`].
    pub eps_power: i32,
}

/// Default exponent of the label-guided ε rule.
pub const DEFAULT_EPS_POWER: i32 = 8;

impl SoftAutomaton {
    pub fn new(a: &Ldba) -> Self {
        let edges = a
            .states
            .iter()
            .map(|s| {
                s.edges
                    .iter()
                    .map(|e| (e.guard.shannon_tree(), e.target))
                    .collect()
            })
            .collect();
        let is_target = a.eps_targets();
        let stay = if !is_target[a.initial] {
            a.initial
        } else {
            is_target.iter().position(|t| !t).unwrap_or(a.initial)
        };
        let targets = (0..a.num_states())
            .filter(|&j| is_target[j])
            .map(|j| (j, a.survival_guard(j).shannon_tree()))
            .collect();
        Self {
            edges,
            eps: a.states.iter().map(|s| s.eps.clone()).collect(),
            accepting: a.states.iter().map(|s| s.accepting).collect(),
            initial: a.initial,
            stay,
            targets,
            eps_power: DEFAULT_EPS_POWER,
        }
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn has_eps(&self) -> bool {
        !self.targets.is_empty()
    }

    pub fn initial_belief<R: Real>(&self) -> Vec<R> {
        self.one_hot(self.initial)
    }

    pub fn one_hot<R: Real>(&self, i: usize) -> Vec<R> {
        (0..self.num_states())
            .map(|k| R::cst(if k == i { 1.0 } else { 0.0 }))
            .collect()
    }

    fn check_len<R>(&self, v: &[R], what: &'static str) -> Result<(), ProductError> {
        if v.len() != self.num_states() {
            return Err(ProductError::WrongLength {
                what,
                expected: self.num_states(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Label transition: `q'[t] = sum_q q[q] * Pr(guard q->t)`.
    pub fn step_label<R: Real>(&self, p: &[R], q: &[R]) -> Result<Vec<R>, ProductError> {
        self.check_len(q, "belief")?;
        check_simplex(q.to_vec(), "belief")?;
        let mut terms: Vec<Vec<R>> = vec![Vec::new(); self.num_states()];
        for (src, out) in self.edges.iter().enumerate() {
            for (tree, t) in out {
                match tree {
                    ShannonTree::Zero => {}
                    ShannonTree::One => terms[*t].push(q[src]),
                    _ => terms[*t].push(q[src] * tree.probability(p)),
                }
            }
        }
        let next = terms.iter().map(|t| R::sum(t)).collect();
        check_simplex(next, "belief")
    }

    /// ε transition with a shared attempt distribution `e`.
    pub fn step_eps<R: Real>(&self, q: &[R], e: &[R]) -> Result<Vec<R>, ProductError> {
        self.check_len(q, "belief")?;
        self.check_len(e, "eps action")?;
        check_simplex(q.to_vec(), "belief")?;
        check_simplex(e.to_vec(), "eps action")?;
        let n = self.num_states();
        let mut terms: Vec<Vec<R>> = vec![Vec::new(); n];
        for (i, out) in self.eps.iter().enumerate() {
            for &j in out {
                terms[j].push(q[i] * e[j]);
            }
            // Attempts along missing ε-edges leave mass in place.
            let idle: Vec<R> = (0..n).filter(|k| !out.contains(k)).map(|k| e[k]).collect();
            terms[i].push(q[i] * R::sum(&idle));
        }
        let next = terms.iter().map(|t| R::sum(t)).collect();
        check_simplex(next, "belief")
    }

    /// Default ε distribution when no policy head is present: each
    /// ε-target gets `Pr(survive)^k / K`, the remainder stays. Jumped mass
    /// is lost with probability `1 - Pr(survive)`, so the power keeps
    /// half-certain jumps rare.
    pub fn default_eps<R: Real>(&self, p: &[R]) -> Vec<R> {
        let mut e = vec![R::cst(0.0); self.num_states()];
        if self.targets.is_empty() {
            e[self.stay] = R::cst(1.0);
            return e;
        }
        let k = R::cst(self.targets.len() as f64);
        for (j, tree) in &self.targets {
            e[*j] = powi(tree.probability(p), self.eps_power) / k;
        }
        let taken: Vec<R> = self.targets.iter().map(|(j, _)| e[*j]).collect();
        e[self.stay] = R::cst(1.0) - R::sum(&taken);
        e
    }

    /// Discrete counterpart of [`Self::default_eps`]: jump to the first
    /// ε-successor of `q` whose survival guard holds under `label`.
    pub fn default_eps_choice(&self, q: usize, label: crate::ltl::Label) -> Option<usize> {
        self.eps[q].iter().copied().find(|j| {
            self.targets
                .iter()
                .find(|(t, _)| t == j)
                .map_or(false, |(_, tree)| tree.eval(label))
        })
    }
}

fn powi<R: Real>(x: R, n: i32) -> R {
    (1..n).fold(x, |acc, _| acc * x)
}

/// Soft product state `<s, q>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState<R> {
    pub s: Vec<R>,
    pub q: Vec<R>,
}

/// One soft product step: ε-move, label transition on the pre-step env
/// state, then the env step.
pub fn step_product<R: Real, E: Env>(
    env: &E,
    auto: &SoftAutomaton,
    labeler: &Labeler,
    ps: &ProductState<R>,
    action: &[R],
    e: &[R],
) -> Result<ProductState<R>, ProductError> {
    let p = labeler.probabilities(env, &ps.s);
    let q1 = auto.step_eps(&ps.q, e)?;
    let q2 = auto.step_label(&p, &q1)?;
    Ok(ProductState {
        s: env.step(&ps.s, action),
        q: q2,
    })
}

/// [`step_product`] with thresholded labels; with a one-hot belief and
/// ε-vector this is the discrete product step.
pub fn step_product_hard<R: Real, E: Env>(
    env: &E,
    auto: &SoftAutomaton,
    labeler: &Labeler,
    ps: &ProductState<R>,
    action: &[R],
    e: &[R],
) -> Result<ProductState<R>, ProductError> {
    let p = labeler.hard_probabilities(env, &ps.s);
    let q1 = auto.step_eps(&ps.q, e)?;
    let q2 = auto.step_label(&p, &q1)?;
    Ok(ProductState {
        s: env.step(&ps.s, action),
        q: q2,
    })
}
