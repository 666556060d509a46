use std::collections::VecDeque;
use std::fmt;

use crate::ltl::{AtomicProp, Label};

use super::guard::{bits, spread, Guard};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub guard: Guard,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct State {
    pub name: Option<String>,
    pub edges: Vec<Edge>,
    pub eps: Vec<usize>,
    pub accepting: bool,
}

/// Limit-deterministic Büchi automaton with state-based acceptance.
///
/// `initial_component[q]` marks Q_I. Label edges of each state partition
/// the alphabet; ε-edges leave Q_I and enter the accepting component.
#[derive(Debug, Clone, PartialEq)]
pub struct Ldba {
    pub aps: Vec<AtomicProp>,
    pub states: Vec<State>,
    pub initial: usize,
    pub initial_component: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    BadIndex,
    UnknownAp,
    GuardsOverlap,
    GuardsIncomplete,
    EpsFromAccepting,
    EpsIntoInitial,
    EdgeBackIntoInitial,
    AcceptingInInitial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub state: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self.kind {
            ViolationKind::BadIndex => "state index out of range",
            ViolationKind::UnknownAp => "guard references unknown AP",
            ViolationKind::GuardsOverlap => "guards not disjoint",
            ViolationKind::GuardsIncomplete => "guards not exhaustive",
            ViolationKind::EpsFromAccepting => "eps edge in Q_A",
            ViolationKind::EpsIntoInitial => "eps edge targets Q_I",
            ViolationKind::EdgeBackIntoInitial => "edge from Q_A into Q_I",
            ViolationKind::AcceptingInInitial => "accepting state in Q_I",
        };
        write!(f, "state {}: {msg}", self.state)
    }
}

impl Ldba {
    /// Build an automaton and derive Q_I from its structure.
    pub fn new(aps: Vec<AtomicProp>, states: Vec<State>, initial: usize) -> Self {
        let mut a = Self {
            initial_component: vec![false; states.len()],
            aps,
            states,
            initial,
        };
        a.initial_component = a.derive_initial_component();
        a
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.states[q].accepting
    }

    pub fn has_eps(&self) -> bool {
        self.states.iter().any(|s| !s.eps.is_empty())
    }

    /// Deterministic label successor.
    pub fn step(&self, q: usize, label: Label) -> Option<usize> {
        self.states[q]
            .edges
            .iter()
            .find(|e| e.guard.eval(label))
            .map(|e| e.target)
    }

    pub fn is_eps_edge(&self, from: usize, to: usize) -> bool {
        self.states[from].eps.contains(&to)
    }

    /// Targets of any ε-edge.
    pub fn eps_targets(&self) -> Vec<bool> {
        let mut t = vec![false; self.states.len()];
        for s in &self.states {
            for &j in &s.eps {
                if j < t.len() {
                    t[j] = true;
                }
            }
        }
        t
    }

    /// Q_I: states not reachable by label edges from ε-targets or accepting states.
    pub fn derive_initial_component(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut in_a = vec![false; n];
        let mut queue = VecDeque::new();
        let targets = self.eps_targets();
        for q in 0..n {
            if targets[q] || self.states[q].accepting {
                in_a[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            for e in &self.states[q].edges {
                if e.target < n && !in_a[e.target] {
                    in_a[e.target] = true;
                    queue.push_back(e.target);
                }
            }
        }
        in_a.into_iter().map(|a| !a).collect()
    }

    /// Non-accepting state whose only way out is a self loop.
    pub fn is_rejecting_sink(&self, q: usize) -> bool {
        let s = &self.states[q];
        !s.accepting && s.eps.is_empty() && s.edges.iter().all(|e| e.target == q)
    }

    /// Accepting state that stays put on every label.
    pub fn is_accepting_sink(&self, q: usize) -> bool {
        let s = &self.states[q];
        s.accepting
            && s.eps.is_empty()
            && s.edges.iter().all(|e| e.target == q)
            && self.covers_all_labels(q)
    }

    fn covers_all_labels(&self, q: usize) -> bool {
        let vars = self.state_support(q);
        (0..1u32 << vars.len()).all(|m| self.step(q, spread(m, &vars)).is_some())
    }

    fn state_support(&self, q: usize) -> Vec<u32> {
        bits(self.states[q]
            .edges
            .iter()
            .fold(0, |m, e| m | e.guard.support()))
    }

    /// States reachable from the initial state via label and ε-edges.
    pub fn reachable(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            let s = &self.states[q];
            for j in s.edges.iter().map(|e| e.target).chain(s.eps.iter().copied()) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Reachable states that are not rejecting sinks.
    pub fn live_states(&self) -> Vec<usize> {
        let reach = self.reachable();
        (0..self.states.len())
            .filter(|&q| reach[q] && !self.is_rejecting_sink(q))
            .collect()
    }

    /// Number of concrete labels over the full AP set with a successor from `q`.
    pub fn label_transitions(&self, q: usize) -> usize {
        (0..1u32 << self.aps.len())
            .filter(|&l| self.step(q, l).is_some())
            .count()
    }

    /// Survival guard of `q`: labels whose successor is not a rejecting sink.
    pub fn survival_guard(&self, q: usize) -> Guard {
        self.states[q]
            .edges
            .iter()
            .filter(|e| !self.is_rejecting_sink(e.target))
            .fold(Guard::False, |g, e| Guard::or(g, e.guard.clone()))
    }

    /// Dense successor table, `table[q << n | label]`, `u32::MAX` when undefined.
    pub fn table(&self) -> TransitionTable {
        let n = self.aps.len();
        let labels = 1usize << n;
        let mut next = vec![u32::MAX; self.states.len() * labels];
        for (q, _) in self.states.iter().enumerate() {
            for l in 0..labels {
                if let Some(t) = self.step(q, l as Label) {
                    next[q * labels + l] = t as u32;
                }
            }
        }
        TransitionTable {
            ap_bits: n,
            next,
            accepting: self.states.iter().map(|s| s.accepting).collect(),
            eps: self.states.iter().map(|s| s.eps.clone()).collect(),
            initial: self.initial,
        }
    }

    /// Check the structural invariants; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.states.len();
        let mut out = Vec::new();
        if self.initial >= n {
            out.push(Violation { state: self.initial, kind: ViolationKind::BadIndex });
            return out;
        }
        for (q, s) in self.states.iter().enumerate() {
            if s.edges.iter().any(|e| e.target >= n) || s.eps.iter().any(|&j| j >= n) {
                out.push(Violation { state: q, kind: ViolationKind::BadIndex });
            }
            if s
                .edges
                .iter()
                .any(|e| e.guard.max_ap().is_some_and(|i| i as usize >= self.aps.len()))
            {
                out.push(Violation { state: q, kind: ViolationKind::UnknownAp });
            }
        }
        if !out.is_empty() {
            return out;
        }
        for q in 0..n {
            let vars = self.state_support(q);
            let (mut overlap, mut gap) = (false, false);
            for m in 0..1u32 << vars.len() {
                let l = spread(m, &vars);
                let hits = self.states[q].edges.iter().filter(|e| e.guard.eval(l)).count();
                overlap |= hits > 1;
                gap |= hits == 0;
            }
            if overlap {
                out.push(Violation { state: q, kind: ViolationKind::GuardsOverlap });
            }
            if gap {
                out.push(Violation { state: q, kind: ViolationKind::GuardsIncomplete });
            }
        }
        let qi = &self.initial_component;
        for (q, s) in self.states.iter().enumerate() {
            if !qi[q] {
                if !s.eps.is_empty() {
                    out.push(Violation { state: q, kind: ViolationKind::EpsFromAccepting });
                }
                if s.edges.iter().any(|e| qi[e.target]) {
                    out.push(Violation { state: q, kind: ViolationKind::EdgeBackIntoInitial });
                }
            }
            if s.eps.iter().any(|&j| qi[j]) {
                out.push(Violation { state: q, kind: ViolationKind::EpsIntoInitial });
            }
            if s.accepting && qi[q] {
                out.push(Violation { state: q, kind: ViolationKind::AcceptingInInitial });
            }
        }
        out
    }
}

/// Flattened successor function for fast repeated simulation.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    pub ap_bits: usize,
    pub next: Vec<u32>,
    pub accepting: Vec<bool>,
    pub eps: Vec<Vec<usize>>,
    pub initial: usize,
}

impl TransitionTable {
    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    /// Bits of `label` beyond the automaton's APs are ignored.
    #[inline]
    pub fn step(&self, q: usize, label: Label) -> Option<usize> {
        let mask = (1usize << self.ap_bits) - 1;
        let t = self.next[q << self.ap_bits | (label as usize & mask)];
        (t != u32::MAX).then_some(t as usize)
    }
}
