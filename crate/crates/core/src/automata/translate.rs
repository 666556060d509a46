//! Compositional LDBA construction for a conjunctive LTL fragment.
//!
//! Accepted conjuncts, with `b` propositional:
//!
//! | shape                       | component                           |
//! |-----------------------------|-------------------------------------|
//! | `b`                         | one-shot check of the first label   |
//! | `G b`                       | safety monitor                      |
//! | `F G b`                     | wait, ε-jump, then `G b` checker    |
//! | `b1 U b2`                   | until monitor                       |
//! | `F(b1 & F(b2 & ...))`       | greedy sequencing chain             |
//! | `G F b`                     | recurrence (degeneralized)          |
//!
//! All non-recurrence components are "persistent": once accepting they stay
//! accepting or fall into the trap. Recurrence conditions are tracked by a
//! round-robin counter that only runs while every persistent component is
//! accepting; a state is accepting when the counter has just wrapped.

use std::collections::HashMap;

use crate::ltl::{nnf, Formula, Label, Ltl};

use super::guard::{bits, Guard};
use super::ldba::{Edge, Ldba, State};
use super::AutomataError;

pub const DEFAULT_MAX_APS: usize = 16;

#[derive(Debug, Clone)]
enum Component {
    Init(Ltl),
    Safety(Ltl),
    Persistence(Ltl),
    Until(Ltl, Ltl),
    Sequence(Vec<Ltl>),
}

const TRAP: u8 = u8::MAX;

impl Component {
    fn start(&self) -> u8 {
        0
    }

    fn step(&self, s: u8, l: Label) -> u8 {
        match self {
            Component::Init(b) => match s {
                0 if b.eval_prop(l) => 1,
                0 => TRAP,
                _ => s,
            },
            Component::Safety(b) => {
                if b.eval_prop(l) {
                    0
                } else {
                    TRAP
                }
            }
            Component::Persistence(b) => match s {
                0 => 0,
                _ if b.eval_prop(l) => 1,
                _ => TRAP,
            },
            Component::Until(b1, b2) => match s {
                0 if b2.eval_prop(l) => 1,
                0 if b1.eval_prop(l) => 0,
                0 => TRAP,
                _ => s,
            },
            Component::Sequence(bs) => {
                let mut i = s as usize;
                while i < bs.len() && bs[i].eval_prop(l) {
                    i += 1;
                }
                i as u8
            }
        }
    }

    fn accepting(&self, s: u8) -> bool {
        match self {
            Component::Init(_) | Component::Persistence(_) | Component::Until(..) => s == 1,
            Component::Safety(_) => s == 0,
            Component::Sequence(bs) => s as usize == bs.len(),
        }
    }

    fn waiting(&self, s: u8) -> bool {
        matches!(self, Component::Persistence(_)) && s == 0
    }

    fn state_name(&self, s: u8) -> String {
        match self {
            Component::Init(_) => ["start", "ok"][s as usize].into(),
            Component::Safety(_) => "ok".into(),
            Component::Persistence(_) => ["wait", "check"][s as usize].into(),
            Component::Until(..) => ["wait", "done"][s as usize].into(),
            Component::Sequence(_) => format!("s{s}"),
        }
    }

    fn support(&self) -> u32 {
        match self {
            Component::Init(b) | Component::Safety(b) | Component::Persistence(b) => b.support(),
            Component::Until(a, b) => a.support() | b.support(),
            Component::Sequence(bs) => bs.iter().fold(0, |m, b| m | b.support()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Key {
    parts: Vec<u8>,
    counter: u8,
    flag: bool,
}

struct Product {
    comps: Vec<Component>,
    recur: Vec<Ltl>,
}

impl Product {
    fn all_accepting(&self, parts: &[u8]) -> bool {
        self.comps.iter().zip(parts).all(|(c, &s)| c.accepting(s))
    }

    fn accepting(&self, k: &Key) -> bool {
        self.all_accepting(&k.parts) && (self.recur.is_empty() || k.flag)
    }

    fn step(&self, k: &Key, l: Label) -> Option<Key> {
        let mut parts = Vec::with_capacity(k.parts.len());
        for (c, &s) in self.comps.iter().zip(&k.parts) {
            let t = c.step(s, l);
            if t == TRAP {
                return None;
            }
            parts.push(t);
        }
        let (mut counter, mut flag) = (0u8, false);
        if !self.recur.is_empty() && self.all_accepting(&parts) {
            let mut c = k.counter as usize;
            while c < self.recur.len() && self.recur[c].eval_prop(l) {
                c += 1;
            }
            if c == self.recur.len() {
                c = 0;
                flag = true;
            }
            counter = c as u8;
        }
        Some(Key {
            parts,
            counter,
            flag,
        })
    }

    fn jump(&self, k: &Key) -> Option<Key> {
        let mut any = false;
        let parts = self
            .comps
            .iter()
            .zip(&k.parts)
            .map(|(c, &s)| {
                if c.waiting(s) {
                    any = true;
                    1
                } else {
                    s
                }
            })
            .collect();
        any.then(|| Key {
            parts,
            counter: k.counter,
            flag: k.flag,
        })
    }

    fn name(&self, k: &Key) -> String {
        let mut parts: Vec<String> = self
            .comps
            .iter()
            .zip(&k.parts)
            .map(|(c, &s)| c.state_name(s))
            .collect();
        if !self.recur.is_empty() {
            parts.push(format!("r{}{}", k.counter, if k.flag { "*" } else { "" }));
        }
        if parts.is_empty() {
            "accept".into()
        } else {
            parts.join(",")
        }
    }
}

fn conjuncts(f: &Ltl, out: &mut Vec<Ltl>) {
    match f {
        Ltl::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn conj(parts: Vec<Ltl>) -> Ltl {
    parts
        .into_iter()
        .reduce(Ltl::and)
        .unwrap_or(Ltl::True)
}

/// `F(b1 & F(b2 & ...))` body → `[b1, b2, ...]`.
fn sequence(inner: &Ltl) -> Option<Vec<Ltl>> {
    let mut parts = Vec::new();
    conjuncts(inner, &mut parts);
    let (props, temporal): (Vec<Ltl>, Vec<Ltl>) =
        parts.into_iter().partition(Ltl::is_propositional);
    let mut seq = vec![conj(props)];
    match temporal.as_slice() {
        [] => {}
        [Ltl::Eventually(next)] => seq.extend(sequence(next)?),
        _ => return None,
    }
    Some(seq)
}

fn classify(f: &Ltl, comps: &mut Vec<Component>, recur: &mut Vec<Ltl>) -> bool {
    if f.is_propositional() {
        if *f != Ltl::True {
            comps.push(Component::Init(f.clone()));
        }
        return true;
    }
    match f {
        Ltl::Always(b) if b.is_propositional() => comps.push(Component::Safety((**b).clone())),
        Ltl::Always(inner) => match &**inner {
            Ltl::Eventually(b) if b.is_propositional() => recur.push((**b).clone()),
            _ => return false,
        },
        Ltl::Eventually(inner) => match &**inner {
            Ltl::Always(b) if b.is_propositional() => {
                comps.push(Component::Persistence((**b).clone()))
            }
            body => match sequence(body) {
                Some(seq) => comps.push(Component::Sequence(seq)),
                None => return false,
            },
        },
        Ltl::Until(a, b) if a.is_propositional() && b.is_propositional() => {
            comps.push(Component::Until((**a).clone(), (**b).clone()))
        }
        _ => return false,
    }
    true
}

/// Translate with the default AP limit.
pub fn translate_fragment(f: &Formula) -> Result<Ldba, AutomataError> {
    translate_fragment_with(f, DEFAULT_MAX_APS)
}

pub fn translate_fragment_with(f: &Formula, max_aps: usize) -> Result<Ldba, AutomataError> {
    let n = f.aps.len();
    if n > max_aps {
        return Err(AutomataError::TooManyAps {
            count: n,
            limit: max_aps,
        });
    }
    let root = nnf(&f.root, false);
    let mut parts = Vec::new();
    conjuncts(&root, &mut parts);
    let mut comps = Vec::new();
    let mut recur = Vec::new();
    for p in &parts {
        if !classify(p, &mut comps, &mut recur) {
            return Err(AutomataError::OutsideFragment(p.display(&f.aps).to_string()));
        }
    }
    let support = comps.iter().fold(0, |m, c| m | c.support())
        | recur.iter().fold(0, |m, b| m | b.support());
    let vars = bits(support);
    let product = Product { comps, recur };

    let start = Key {
        parts: product.comps.iter().map(Component::start).collect(),
        counter: 0,
        flag: false,
    };
    let mut keys = vec![start.clone()];
    let mut index: HashMap<Key, usize> = HashMap::from([(start, 0)]);
    let mut trap: Option<usize> = None;
    // (label-successor per minterm, eps successor) for each discovered key
    let mut raw: Vec<(Vec<usize>, Option<usize>)> = Vec::new();
    let mut q = 0;
    while q < keys.len() {
        if Some(q) == trap {
            raw.push((vec![q; 1 << vars.len()], None));
            q += 1;
            continue;
        }
        let key = keys[q].clone();
        let mut succ = Vec::with_capacity(1 << vars.len());
        for m in 0..1u32 << vars.len() {
            let l = super::guard::spread(m, &vars);
            let t = match product.step(&key, l) {
                Some(k) => intern(k, &mut keys, &mut index),
                None => *trap.get_or_insert_with(|| {
                    keys.push(Key {
                        parts: vec![TRAP],
                        counter: 0,
                        flag: false,
                    });
                    keys.len() - 1
                }),
            };
            succ.push(t);
        }
        let eps = product.jump(&key).map(|k| intern(k, &mut keys, &mut index));
        raw.push((succ, eps));
        q += 1;
    }

    let states = keys
        .iter()
        .enumerate()
        .map(|(i, k)| {
            if Some(i) == trap {
                return State {
                    name: Some("trap".into()),
                    edges: vec![Edge {
                        guard: Guard::True,
                        target: i,
                    }],
                    eps: vec![],
                    accepting: false,
                };
            }
            let (succ, eps) = &raw[i];
            State {
                name: Some(product.name(k)),
                edges: group_edges(succ, &vars),
                eps: eps.iter().copied().collect(),
                accepting: product.accepting(k),
            }
        })
        .collect();
    let a = Ldba::new(f.aps.clone(), states, 0);
    let violations = a.validate();
    if !violations.is_empty() {
        return Err(AutomataError::Invalid(
            violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    Ok(a)
}

fn intern(k: Key, keys: &mut Vec<Key>, index: &mut HashMap<Key, usize>) -> usize {
    *index.entry(k).or_insert_with_key(|k| {
        keys.push(k.clone());
        keys.len() - 1
    })
}

/// One edge per distinct target, guard built from its minterms.
fn group_edges(succ: &[usize], vars: &[u32]) -> Vec<Edge> {
    let mut targets: Vec<usize> = succ.to_vec();
    targets.sort_unstable();
    targets.dedup();
    targets
        .into_iter()
        .map(|t| {
            let table: Vec<bool> = succ.iter().map(|&s| s == t).collect();
            Edge {
                guard: Guard::from_truth_table(vars, &table),
                target: t,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    fn tr(text: &str) -> Ldba {
        translate_fragment(&parse_ltl(text).unwrap()).unwrap()
    }

    #[test]
    fn safety_has_monitor_and_trap() {
        let a = tr("G\"a>0\"");
        assert_eq!(a.num_states(), 2);
        assert!(a.is_accepting(0));
        assert!(a.is_rejecting_sink(1));
    }

    #[test]
    fn parking_formula_shape() {
        let a = tr("FG\"park>0\" & G!\"grass>0\"");
        assert_eq!(a.num_states(), 3);
        assert_eq!(a.states[0].eps.len(), 1);
        let check = a.states[0].eps[0];
        assert!(a.is_accepting(check));
        assert!(a.initial_component[0]);
        assert!(!a.initial_component[check]);
        assert_eq!(a.states[0].name.as_deref(), Some("wait,ok"));
    }

    #[test]
    fn legged_shape_counts() {
        let a = tr("G\"torso_height>-11.0\" & GF\"torso_height>-10.5\" & F(\"torso_velocity_x>1.0\" & F\"torso_velocity_x<0\")");
        let live = a.live_states();
        assert_eq!(live.len(), 4);
        for q in live {
            assert_eq!(a.label_transitions(q), 16);
        }
    }

    #[test]
    fn cartpole_shape_counts() {
        let a = tr("G(\"position_x>-10\" & \"position_x<10\") & G(\"velocity_x>-10.0\" & \"velocity_x<10.0\") & F(\"cos_theta<-0.5\" & F\"cos_theta>0.5\")");
        let live = a.live_states();
        assert_eq!(live.len(), 3);
        for &q in &live {
            assert_eq!(a.label_transitions(q), 64);
        }
        assert_eq!(live.iter().filter(|&&q| a.is_accepting(q)).count(), 1);
    }

    #[test]
    fn reduced_reachability_is_small() {
        let a = tr("F\"pole_z>-1.25\"");
        assert_eq!(a.live_states().len(), 2);
    }

    #[test]
    fn rejects_outside_fragment() {
        let f = parse_ltl("G(\"a>0\" U \"b>0\")").unwrap();
        match translate_fragment(&f) {
            Err(AutomataError::OutsideFragment(s)) => assert!(s.contains('U'), "{s}"),
            other => panic!("{other:?}"),
        }
        let f = parse_ltl("F(\"a>0\" & F\"b>0\" & F\"c>0\")").unwrap();
        assert!(translate_fragment(&f).is_err());
    }

    #[test]
    fn ap_limit() {
        let f = parse_ltl("G(\"a>0\" & \"b>0\" & \"c>0\")").unwrap();
        assert!(matches!(
            translate_fragment_with(&f, 2),
            Err(AutomataError::TooManyAps { count: 3, limit: 2 })
        ));
    }

    #[test]
    fn true_formula_is_one_accepting_state() {
        let a = tr("true");
        assert_eq!(a.num_states(), 1);
        assert!(a.is_accepting(0));
        assert_eq!(a.states[0].edges[0].guard, Guard::True);
    }
}
