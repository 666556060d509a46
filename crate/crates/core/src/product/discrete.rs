use crate::automata::Ldba;
use crate::envs::Env;
use crate::ltl::Label;

use super::Labeler;

/// Automaton half of the discrete product step. An `eps_choice` that is
/// not an ε-successor of `q` is ignored. Labels without a successor leave
/// the state unchanged; validated automata are complete.
pub fn step_discrete(a: &Ldba, q: usize, label: Label, eps_choice: Option<usize>) -> usize {
    let q = match eps_choice {
        Some(j) if a.is_eps_edge(q, j) => j,
        _ => q,
    };
    a.step(q, label).unwrap_or(q)
}

/// Full discrete product step: `(s', q')` with `q'` computed from the
/// pre-step label `L(s)`.
pub fn step_discrete_env<E: Env>(
    env: &E,
    a: &Ldba,
    labeler: &Labeler,
    s: &[f64],
    q: usize,
    action: &[f64],
    eps_choice: Option<usize>,
) -> (Vec<f64>, usize) {
    let label = labeler.label(env, s);
    let q2 = step_discrete(a, q, label, eps_choice);
    (env.step(s, action), q2)
}
