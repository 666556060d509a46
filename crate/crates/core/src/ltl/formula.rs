use std::fmt;

use super::ap::AtomicProp;

/// LTL syntax tree. APs are indices into the owning [`Formula`]'s AP table.
///
/// `False` and `Release` only arise from negation normal form; the
/// surface syntax has no `R` operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ltl {
    True,
    False,
    Ap(usize),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
    Eventually(Box<Ltl>),
    Always(Box<Ltl>),
}

impl Ltl {
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }
    pub fn next(a: Ltl) -> Ltl {
        Ltl::Next(Box::new(a))
    }
    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(a: Ltl) -> Ltl {
        Ltl::Eventually(Box::new(a))
    }
    pub fn always(a: Ltl) -> Ltl {
        Ltl::Always(Box::new(a))
    }

    /// True when no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Ap(_) => true,
            Ltl::Not(a) => a.is_propositional(),
            Ltl::And(a, b) | Ltl::Or(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    /// Evaluate a propositional formula on a label bitmask.
    pub fn eval_prop(&self, label: u32) -> bool {
        match self {
            Ltl::True => true,
            Ltl::False => false,
            Ltl::Ap(i) => label >> i & 1 == 1,
            Ltl::Not(a) => !a.eval_prop(label),
            Ltl::And(a, b) => a.eval_prop(label) && b.eval_prop(label),
            Ltl::Or(a, b) => a.eval_prop(label) || b.eval_prop(label),
            _ => panic!("eval_prop called on a temporal formula"),
        }
    }

    /// Bitmask of AP indices mentioned.
    pub fn support(&self) -> u32 {
        match self {
            Ltl::True | Ltl::False => 0,
            Ltl::Ap(i) => 1 << i,
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Always(a) => a.support(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.support() | b.support()
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Ap(_) => 1,
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Always(a) => 1 + a.size(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Ltl::Or(..) => 1,
            Ltl::And(..) => 2,
            Ltl::Until(..) => 3,
            Ltl::Not(_) | Ltl::Next(_) | Ltl::Eventually(_) | Ltl::Always(_) => 4,
            // printed as a negated until
            Ltl::Release(..) => 4,
            Ltl::True | Ltl::False | Ltl::Ap(_) => 5,
        }
    }

    /// Render in the surface syntax, using `aps` for AP names.
    pub fn display<'a>(&'a self, aps: &'a [AtomicProp]) -> Display<'a> {
        Display { ltl: self, aps }
    }

    fn write(&self, aps: &[AtomicProp], min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Ltl::True => f.write_str("true")?,
            Ltl::False => f.write_str("false")?,
            Ltl::Ap(i) => match aps.get(*i) {
                Some(ap) => write!(f, "{ap}")?,
                None => write!(f, "\"ap{i}\"")?,
            },
            Ltl::Not(a) => write_unary("!", a, aps, f)?,
            Ltl::Next(a) => write_unary("X", a, aps, f)?,
            Ltl::Eventually(a) => write_unary("F", a, aps, f)?,
            Ltl::Always(a) => write_unary("G", a, aps, f)?,
            Ltl::And(a, b) => {
                a.write(aps, 2, f)?;
                f.write_str(" & ")?;
                b.write(aps, 3, f)?;
            }
            Ltl::Or(a, b) => {
                a.write(aps, 1, f)?;
                f.write_str(" | ")?;
                b.write(aps, 2, f)?;
            }
            Ltl::Until(a, b) => {
                a.write(aps, 4, f)?;
                f.write_str(" U ")?;
                b.write(aps, 3, f)?;
            }
            Ltl::Release(a, b) => {
                f.write_str("!(")?;
                Ltl::not((**a).clone()).write(aps, 4, f)?;
                f.write_str(" U ")?;
                Ltl::not((**b).clone()).write(aps, 3, f)?;
                f.write_str(")")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn write_unary(op: &str, a: &Ltl, aps: &[AtomicProp], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(op)?;
    // keep `G true` from lexing as one word
    if matches!(a, Ltl::True | Ltl::False) {
        f.write_str(" ")?;
    }
    a.write(aps, 4, f)
}

pub struct Display<'a> {
    ltl: &'a Ltl,
    aps: &'a [AtomicProp],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ltl.write(self.aps, 0, f)
    }
}

/// A parsed formula: syntax tree plus its AP table (order of first occurrence).
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub aps: Vec<AtomicProp>,
    pub root: Ltl,
}

impl Formula {
    pub fn ap_names(&self) -> Vec<&str> {
        self.aps.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a.name == name)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(&self.aps, 0, f)
    }
}
