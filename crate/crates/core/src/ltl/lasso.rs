use serde::{Deserialize, Serialize};

use super::formula::Ltl;
use super::LtlError;

/// Set of APs holding at one position, as a bitmask over AP indices.
pub type Label = u32;

/// Ultimately periodic trace `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoTrace {
    pub prefix: Vec<Label>,
    pub cycle: Vec<Label>,
}

impl LassoTrace {
    pub fn new(prefix: Vec<Label>, cycle: Vec<Label>) -> Self {
        Self { prefix, cycle }
    }

    /// Build from AP-name lists, given the AP order of the formula.
    pub fn from_names(
        ap_names: &[&str],
        prefix: &[&[&str]],
        cycle: &[&[&str]],
    ) -> Result<Self, LtlError> {
        let encode = |set: &&[&str]| -> Result<Label, LtlError> {
            set.iter().try_fold(0, |acc, name| {
                let i = ap_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| LtlError::UnknownAp(name.to_string()))?;
                Ok(acc | 1 << i)
            })
        };
        Ok(Self {
            prefix: prefix.iter().map(encode).collect::<Result<_, _>>()?,
            cycle: cycle.iter().map(encode).collect::<Result<_, _>>()?,
        })
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Label at position `i` of the infinite unrolling.
    pub fn at(&self, i: usize) -> Label {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Successor of position `i` within the folded `prefix ++ cycle` layout.
    pub fn succ(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// Same infinite word, with the cycle rotated left by `k` and the
    /// rotated-out elements appended to the prefix.
    pub fn rotated(&self, k: usize) -> Self {
        let mut prefix = self.prefix.clone();
        let c = self.cycle.len();
        prefix.extend((0..k).map(|i| self.cycle[i % c]));
        let cycle = (0..c).map(|i| self.cycle[(i + k) % c]).collect();
        Self { prefix, cycle }
    }

    fn check(&self) -> Result<(), LtlError> {
        if self.cycle.is_empty() {
            return Err(LtlError::EmptyCycle);
        }
        Ok(())
    }
}

/// Decide whether `prefix · cycle^ω` satisfies `f`.
///
/// Every subformula is evaluated at all `|prefix| + |cycle|` positions,
/// bottom-up. Position values determine the value at every later
/// position of the unrolling because suffixes repeat with the cycle.
pub fn eval_lasso(f: &Ltl, t: &LassoTrace) -> Result<bool, LtlError> {
    t.check()?;
    Ok(eval_positions(f, t)[0])
}

/// Truth value of `f` at each folded position of the trace.
pub fn eval_positions(f: &Ltl, t: &LassoTrace) -> Vec<bool> {
    let n = t.len();
    let horizon = t.prefix.len() + 2 * t.cycle.len();
    match f {
        Ltl::True => vec![true; n],
        Ltl::False => vec![false; n],
        Ltl::Ap(i) => (0..n).map(|k| t.at(k) >> i & 1 == 1).collect(),
        Ltl::Not(a) => eval_positions(a, t).into_iter().map(|v| !v).collect(),
        Ltl::And(a, b) => zip_with(eval_positions(a, t), eval_positions(b, t), |x, y| x && y),
        Ltl::Or(a, b) => zip_with(eval_positions(a, t), eval_positions(b, t), |x, y| x || y),
        Ltl::Next(a) => {
            let va = eval_positions(a, t);
            (0..n).map(|k| va[t.succ(k)]).collect()
        }
        Ltl::Until(a, b) => until(&eval_positions(a, t), &eval_positions(b, t), t, horizon),
        Ltl::Release(a, b) => {
            let na: Vec<bool> = eval_positions(a, t).into_iter().map(|v| !v).collect();
            let nb: Vec<bool> = eval_positions(b, t).into_iter().map(|v| !v).collect();
            until(&na, &nb, t, horizon).into_iter().map(|v| !v).collect()
        }
        Ltl::Eventually(a) => until(&vec![true; n], &eval_positions(a, t), t, horizon),
        Ltl::Always(a) => {
            let na: Vec<bool> = eval_positions(a, t).into_iter().map(|v| !v).collect();
            until(&vec![true; n], &na, t, horizon)
                .into_iter()
                .map(|v| !v)
                .collect()
        }
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

fn until(a: &[bool], b: &[bool], t: &LassoTrace, horizon: usize) -> Vec<bool> {
    (0..a.len())
        .map(|start| {
            let mut k = start;
            for _ in 0..=horizon {
                if b[k] {
                    return true;
                }
                if !a[k] {
                    return false;
                }
                k = t.succ(k);
            }
            false
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    #[test]
    fn always_on_constant_cycle() {
        let f = parse_ltl("G\"a>0\"").unwrap();
        assert!(eval_lasso(&f.root, &LassoTrace::new(vec![], vec![1])).unwrap());
    }

    #[test]
    fn recurrence_needs_infinitely_many() {
        let f = parse_ltl("GF\"a>0\"").unwrap();
        assert!(!eval_lasso(&f.root, &LassoTrace::new(vec![1], vec![0])).unwrap());
        assert!(eval_lasso(&f.root, &LassoTrace::new(vec![], vec![0, 0, 1])).unwrap());
    }

    #[test]
    fn empty_cycle_is_an_error() {
        let f = parse_ltl("\"a>0\"").unwrap();
        assert_eq!(
            eval_lasso(&f.root, &LassoTrace::new(vec![1], vec![])),
            Err(LtlError::EmptyCycle)
        );
    }

    #[test]
    fn until_and_next() {
        let f = parse_ltl("\"a>0\" U \"b>0\"").unwrap();
        // a a b ...
        assert!(eval_lasso(&f.root, &LassoTrace::new(vec![1, 1], vec![2])).unwrap());
        // a a a ... forever
        assert!(!eval_lasso(&f.root, &LassoTrace::new(vec![], vec![1])).unwrap());
        let g = parse_ltl("XX\"b>0\"").unwrap();
        assert!(eval_lasso(&g.root, &LassoTrace::new(vec![0], vec![0, 1])).unwrap());
        assert!(!eval_lasso(&g.root, &LassoTrace::new(vec![0], vec![1, 0])).unwrap());
    }

    #[test]
    fn names_encode_by_formula_order() {
        let t = LassoTrace::from_names(&["a>0", "b>0"], &[&["b>0"]], &[&["a>0", "b>0"]]).unwrap();
        assert_eq!(t.prefix, vec![2]);
        assert_eq!(t.cycle, vec![3]);
        assert!(LassoTrace::from_names(&["a>0"], &[&["z>0"]], &[&[]]).is_err());
    }

    #[test]
    fn rotation_keeps_the_word() {
        let t = LassoTrace::new(vec![1], vec![2, 3, 0]);
        let r = t.rotated(2);
        for i in 0..20 {
            assert_eq!(t.at(i), r.at(i));
        }
    }
}
