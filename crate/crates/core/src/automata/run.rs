use crate::ltl::LassoTrace;

use super::ldba::{Ldba, TransitionTable};

/// How ε-moves are resolved when running an automaton on a lasso.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsPolicy {
    /// Accept if any placement of ε-moves yields an accepting run.
    Search,
    /// Entry `k` is the ε-target attempted before consuming position `k`;
    /// `None` or a target without an ε-edge means stay.
    Fixed(Vec<Option<usize>>),
}

/// Büchi acceptance of `prefix · cycle^ω`.
pub fn run_lasso(a: &Ldba, t: &LassoTrace, policy: &EpsPolicy) -> bool {
    run_lasso_table(&a.table(), t, policy)
}

/// As [`run_lasso`], on a precomputed table.
pub fn run_lasso_table(a: &TransitionTable, t: &LassoTrace, policy: &EpsPolicy) -> bool {
    if t.cycle.is_empty() {
        return false;
    }
    match policy {
        EpsPolicy::Search => search(a, t),
        EpsPolicy::Fixed(choices) => fixed(a, t, choices),
    }
}

/// Nodes are (state, folded position). Label edges form a functional
/// graph, so a node lies in a nontrivial SCC exactly when it is on a cycle.
fn search(a: &TransitionTable, t: &LassoTrace) -> bool {
    let n = t.len();
    let node = |q: usize, pos: usize| q * n + pos;
    let total = a.num_states() * n;
    let label_succ = |v: usize| -> Option<usize> {
        let (q, pos) = (v / n, v % n);
        a.step(q, t.at(pos)).map(|q2| node(q2, t.succ(pos)))
    };

    let mut reached = vec![false; total];
    let start = node(a.initial, 0);
    reached[start] = true;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        let (q, pos) = (v / n, v % n);
        let eps = a.eps[q].iter().map(|&j| node(j, pos));
        for w in label_succ(v).into_iter().chain(eps) {
            if !reached[w] {
                reached[w] = true;
                stack.push(w);
            }
        }
    }

    // 0 unvisited, 1 on current path, 2 done
    let mut color = vec![0u8; total];
    let mut on_cycle = vec![false; total];
    let mut path = Vec::new();
    for s in 0..total {
        if !reached[s] || color[s] != 0 {
            continue;
        }
        let mut v = s;
        loop {
            color[v] = 1;
            path.push(v);
            match label_succ(v) {
                Some(w) if color[w] == 0 => v = w,
                Some(w) if color[w] == 1 => {
                    let from = path.iter().position(|&x| x == w).unwrap();
                    for &x in &path[from..] {
                        on_cycle[x] = true;
                    }
                    break;
                }
                _ => break,
            }
        }
        for &x in &path {
            color[x] = 2;
        }
        path.clear();
    }
    (0..total).any(|v| reached[v] && on_cycle[v] && a.accepting[v / n])
}

fn fixed(a: &TransitionTable, t: &LassoTrace, choices: &[Option<usize>]) -> bool {
    let n = t.len();
    let mut q = a.initial;
    let mut pos = 0;
    for choice in choices {
        if let Some(j) = choice {
            if a.eps[q].contains(j) {
                q = *j;
            }
        }
        match a.step(q, t.at(pos)) {
            Some(q2) => q = q2,
            None => return false,
        }
        pos = t.succ(pos);
    }
    // deterministic from here on: walk until a (state, position) repeats
    let mut seen = vec![usize::MAX; a.num_states() * n];
    let mut trail = Vec::new();
    loop {
        let v = q * n + pos;
        if seen[v] != usize::MAX {
            return trail[seen[v]..].iter().any(|&s: &usize| a.accepting[s]);
        }
        seen[v] = trail.len();
        trail.push(q);
        match a.step(q, t.at(pos)) {
            Some(q2) => q = q2,
            None => return false,
        }
        pos = t.succ(pos);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::translate_fragment;
    use crate::ltl::parse_ltl;

    fn tr(text: &str) -> Ldba {
        translate_fragment(&parse_ltl(text).unwrap()).unwrap()
    }

    #[test]
    fn safety_on_constant_cycle() {
        let a = tr("G\"a>0\"");
        assert!(run_lasso(&a, &LassoTrace::new(vec![], vec![1]), &EpsPolicy::Search));
        assert!(!run_lasso(&a, &LassoTrace::new(vec![1, 0], vec![1]), &EpsPolicy::Search));
    }

    #[test]
    fn parking_trace_through_grass_rejected() {
        // AP 0 = park, AP 1 = grass
        let a = tr("FG\"park>0\" & G!\"grass>0\"");
        let t = LassoTrace::new(vec![0, 0, 2, 2, 0], vec![1]);
        assert!(!run_lasso(&a, &t, &EpsPolicy::Search));
        let ok = LassoTrace::new(vec![0, 0, 1], vec![1]);
        assert!(run_lasso(&a, &ok, &EpsPolicy::Search));
    }

    #[test]
    fn persistence_needs_the_jump() {
        let a = tr("FG\"a>0\"");
        let t = LassoTrace::new(vec![0], vec![1]);
        assert!(run_lasso(&a, &t, &EpsPolicy::Search));
        assert!(!run_lasso(&a, &t, &EpsPolicy::Fixed(vec![])));
        let target = a.states[0].eps[0];
        assert!(!run_lasso(&a, &t, &EpsPolicy::Fixed(vec![Some(target)])));
        assert!(run_lasso(&a, &t, &EpsPolicy::Fixed(vec![None, Some(target)])));
        // a target without an ε-edge is ignored
        assert!(!run_lasso(&a, &t, &EpsPolicy::Fixed(vec![None, Some(0)])));
    }
}
