use std::fmt;

use crate::ltl::{Label, Ltl};

/// Propositional edge label over AP indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    True,
    False,
    Ap(u32),
    Not(Box<Guard>),
    And(Vec<Guard>),
    Or(Vec<Guard>),
}

impl Guard {
    pub fn eval(&self, label: Label) -> bool {
        match self {
            Guard::True => true,
            Guard::False => false,
            Guard::Ap(i) => label >> i & 1 == 1,
            Guard::Not(g) => !g.eval(label),
            Guard::And(gs) => gs.iter().all(|g| g.eval(label)),
            Guard::Or(gs) => gs.iter().any(|g| g.eval(label)),
        }
    }

    /// Bitmask of AP indices mentioned.
    pub fn support(&self) -> u32 {
        match self {
            Guard::True | Guard::False => 0,
            Guard::Ap(i) => 1 << i,
            Guard::Not(g) => g.support(),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().fold(0, |m, g| m | g.support()),
        }
    }

    pub fn max_ap(&self) -> Option<u32> {
        match self {
            Guard::True | Guard::False => None,
            Guard::Ap(i) => Some(*i),
            Guard::Not(g) => g.max_ap(),
            Guard::And(gs) | Guard::Or(gs) => gs.iter().filter_map(Guard::max_ap).max(),
        }
    }

    pub fn not(g: Guard) -> Guard {
        match g {
            Guard::True => Guard::False,
            Guard::False => Guard::True,
            Guard::Not(inner) => *inner,
            g => Guard::Not(Box::new(g)),
        }
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::False, _) | (_, Guard::False) => Guard::False,
            (Guard::True, g) | (g, Guard::True) => g,
            (Guard::And(mut xs), Guard::And(ys)) => {
                xs.extend(ys);
                Guard::And(xs)
            }
            (Guard::And(mut xs), g) => {
                xs.push(g);
                Guard::And(xs)
            }
            (g, Guard::And(mut ys)) => {
                ys.insert(0, g);
                Guard::And(ys)
            }
            (a, b) => Guard::And(vec![a, b]),
        }
    }

    pub fn or(a: Guard, b: Guard) -> Guard {
        match (a, b) {
            (Guard::True, _) | (_, Guard::True) => Guard::True,
            (Guard::False, g) | (g, Guard::False) => g,
            (Guard::Or(mut xs), Guard::Or(ys)) => {
                xs.extend(ys);
                Guard::Or(xs)
            }
            (Guard::Or(mut xs), g) => {
                xs.push(g);
                Guard::Or(xs)
            }
            (g, Guard::Or(mut ys)) => {
                ys.insert(0, g);
                Guard::Or(ys)
            }
            (a, b) => Guard::Or(vec![a, b]),
        }
    }

    /// Convert a propositional LTL formula. Returns `None` on temporal input.
    pub fn from_ltl(f: &Ltl) -> Option<Guard> {
        Some(match f {
            Ltl::True => Guard::True,
            Ltl::False => Guard::False,
            Ltl::Ap(i) => Guard::Ap(*i as u32),
            Ltl::Not(a) => Guard::not(Guard::from_ltl(a)?),
            Ltl::And(a, b) => Guard::and(Guard::from_ltl(a)?, Guard::from_ltl(b)?),
            Ltl::Or(a, b) => Guard::or(Guard::from_ltl(a)?, Guard::from_ltl(b)?),
            _ => return None,
        })
    }

    /// Guard accepting exactly the labels `l` (over `vars`) with `table[minterm(l)]`.
    ///
    /// Bit `k` of a minterm index is the value of `vars[k]`.
    pub fn from_truth_table(vars: &[u32], table: &[bool]) -> Guard {
        assert_eq!(table.len(), 1 << vars.len());
        if table.iter().all(|&b| b) {
            return Guard::True;
        }
        if !table.iter().any(|&b| b) {
            return Guard::False;
        }
        // split on the lowest variable: even indices have it false
        let lo: Vec<bool> = table.iter().step_by(2).copied().collect();
        let hi: Vec<bool> = table.iter().skip(1).step_by(2).copied().collect();
        let rest = &vars[1..];
        if lo == hi {
            return Guard::from_truth_table(rest, &lo);
        }
        let x = Guard::Ap(vars[0]);
        let g_hi = Guard::from_truth_table(rest, &hi);
        let g_lo = Guard::from_truth_table(rest, &lo);
        match (&g_hi, &g_lo) {
            (Guard::True, _) => Guard::or(x, g_lo),
            (_, Guard::True) => Guard::or(Guard::not(x), g_hi),
            (_, Guard::False) => Guard::and(x, g_hi),
            (Guard::False, _) => Guard::and(Guard::not(x), g_lo),
            _ => Guard::Or(vec![Guard::and(x.clone(), g_hi), Guard::and(Guard::not(x), g_lo)]),
        }
    }

    /// Decision tree over the guard's support, lowest AP index first.
    pub fn shannon_tree(&self) -> ShannonTree {
        let vars = bits(self.support());
        let table: Vec<bool> = (0..1u32 << vars.len())
            .map(|m| self.eval(spread(m, &vars)))
            .collect();
        ShannonTree::build(&vars, &table)
    }

    fn precedence(&self) -> u8 {
        match self {
            Guard::Or(_) => 1,
            Guard::And(_) => 2,
            _ => 3,
        }
    }

    fn write(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Guard::True => f.write_str("t")?,
            Guard::False => f.write_str("f")?,
            Guard::Ap(i) => write!(f, "{i}")?,
            Guard::Not(g) => {
                f.write_str("!")?;
                g.write(3, f)?;
            }
            Guard::And(gs) => write_joined(gs, " & ", 3, f)?,
            Guard::Or(gs) => write_joined(gs, " | ", 2, f)?,
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_joined(gs: &[Guard], sep: &str, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (k, g) in gs.iter().enumerate() {
        if k > 0 {
            f.write_str(sep)?;
        }
        g.write(min, f)?;
    }
    Ok(())
}

/// HOA label syntax: `t`, `f`, AP indices, `!`, `&`, `|`, parentheses.
impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(0, f)
    }
}

/// Indices of set bits, ascending.
pub fn bits(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Place bit `k` of `m` at position `vars[k]`.
pub fn spread(m: u32, vars: &[u32]) -> Label {
    vars.iter()
        .enumerate()
        .fold(0, |acc, (k, v)| acc | ((m >> k) & 1) << v)
}

/// Shannon expansion of a guard; leaves are constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShannonTree {
    Zero,
    One,
    Node {
        var: u32,
        hi: Box<ShannonTree>,
        lo: Box<ShannonTree>,
    },
}

impl ShannonTree {
    fn build(vars: &[u32], table: &[bool]) -> ShannonTree {
        if table.iter().all(|&b| b) {
            return ShannonTree::One;
        }
        if !table.iter().any(|&b| b) {
            return ShannonTree::Zero;
        }
        let lo: Vec<bool> = table.iter().step_by(2).copied().collect();
        let hi: Vec<bool> = table.iter().skip(1).step_by(2).copied().collect();
        if lo == hi {
            return ShannonTree::build(&vars[1..], &lo);
        }
        ShannonTree::Node {
            var: vars[0],
            hi: Box::new(ShannonTree::build(&vars[1..], &hi)),
            lo: Box::new(ShannonTree::build(&vars[1..], &lo)),
        }
    }

    pub fn eval(&self, label: Label) -> bool {
        match self {
            ShannonTree::Zero => false,
            ShannonTree::One => true,
            ShannonTree::Node { var, hi, lo } => {
                if label >> var & 1 == 1 {
                    hi.eval(label)
                } else {
                    lo.eval(label)
                }
            }
        }
    }

    /// Probability that a label with independent AP inclusion
    /// probabilities `p` satisfies the guard.
    pub fn probability<R: crate::Real>(&self, p: &[R]) -> R {
        match self {
            ShannonTree::Zero => R::cst(0.0),
            ShannonTree::One => R::cst(1.0),
            ShannonTree::Node { var, hi, lo } => {
                let px = p[*var as usize];
                match (&**hi, &**lo) {
                    (ShannonTree::One, ShannonTree::Zero) => px,
                    (ShannonTree::Zero, ShannonTree::One) => R::cst(1.0) - px,
                    (h, ShannonTree::Zero) => px * h.probability(p),
                    (ShannonTree::Zero, l) => (R::cst(1.0) - px) * l.probability(p),
                    (h, l) => {
                        px * h.probability(p) + (R::cst(1.0) - px) * l.probability(p)
                    }
                }
            }
        }
    }
}

/// Parse a HOA label expression.
pub fn parse_guard(text: &str) -> Result<Guard, String> {
    let toks: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = GuardParser { toks, at: 0 };
    let g = p.or()?;
    if p.at != p.toks.len() {
        return Err(format!("trailing input in label '{text}'"));
    }
    Ok(g)
}

struct GuardParser {
    toks: Vec<char>,
    at: usize,
}

impl GuardParser {
    fn peek(&self) -> Option<char> {
        self.toks.get(self.at).copied()
    }

    fn or(&mut self) -> Result<Guard, String> {
        let mut parts = vec![self.and()?];
        while self.peek() == Some('|') {
            self.at += 1;
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Guard::Or(parts)
        })
    }

    fn and(&mut self) -> Result<Guard, String> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some('&') {
            self.at += 1;
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Guard::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Guard, String> {
        match self.peek() {
            Some('!') => {
                self.at += 1;
                Ok(Guard::Not(Box::new(self.unary()?)))
            }
            Some('t') => {
                self.at += 1;
                Ok(Guard::True)
            }
            Some('f') => {
                self.at += 1;
                Ok(Guard::False)
            }
            Some('(') => {
                self.at += 1;
                let g = self.or()?;
                if self.peek() != Some(')') {
                    return Err("expected ')' in label".into());
                }
                self.at += 1;
                Ok(g)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.at;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.at += 1;
                }
                let s: String = self.toks[start..self.at].iter().collect();
                s.parse()
                    .map(Guard::Ap)
                    .map_err(|_| format!("bad AP index '{s}'"))
            }
            Some(c) => Err(format!("unexpected '{c}' in label")),
            None => Err("empty label".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        for text in ["t", "f", "0 & !1", "(0 | 1) & 2", "!(0 & 1) | 2", "0 | 1 & !2"] {
            let g = parse_guard(text).unwrap();
            assert_eq!(parse_guard(&g.to_string()).unwrap(), g, "{text}");
        }
        assert_eq!(parse_guard("!0&1").unwrap().to_string(), "!0 & 1");
    }

    #[test]
    fn truth_table_builds_equivalent_guard() {
        let vars = [0, 2, 3];
        let table: Vec<bool> = (0..8u32).map(|m| m.count_ones() >= 2).collect();
        let g = Guard::from_truth_table(&vars, &table);
        for m in 0..8u32 {
            assert_eq!(g.eval(spread(m, &vars)), table[m as usize]);
        }
        assert_eq!(Guard::from_truth_table(&[1], &[false, true]), Guard::Ap(1));
        assert_eq!(
            Guard::from_truth_table(&[0, 1], &[false, true, false, true]),
            Guard::Ap(0)
        );
    }

    #[test]
    fn tree_probability_matches_enumeration() {
        let g = parse_guard("0 | 1").unwrap();
        let p = g.shannon_tree().probability(&[0.9f64, 0.2]);
        assert!((p - 0.92).abs() < 1e-15);
        let g = parse_guard("0 & 1").unwrap();
        assert_eq!(g.shannon_tree().probability(&[0.5f64, 0.5]), 0.25);
        assert_eq!(Guard::True.shannon_tree().probability::<f64>(&[]), 1.0);
    }
}
