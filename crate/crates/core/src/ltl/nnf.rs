use super::formula::{Formula, Ltl};

/// Push negations down to the APs using the standard dualities
/// (`!F a = G !a`, `!(a U b) = !a R !b`, `!X a = X !a`).
pub fn to_nnf(f: &Formula) -> Formula {
    Formula {
        aps: f.aps.clone(),
        root: nnf(&f.root, false),
    }
}

pub fn nnf(f: &Ltl, negate: bool) -> Ltl {
    match (f, negate) {
        (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
        (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
        (Ltl::Ap(i), false) => Ltl::Ap(*i),
        (Ltl::Ap(i), true) => Ltl::not(Ltl::Ap(*i)),
        (Ltl::Not(a), n) => nnf(a, !n),
        (Ltl::And(a, b), false) => Ltl::and(nnf(a, false), nnf(b, false)),
        (Ltl::And(a, b), true) => Ltl::or(nnf(a, true), nnf(b, true)),
        (Ltl::Or(a, b), false) => Ltl::or(nnf(a, false), nnf(b, false)),
        (Ltl::Or(a, b), true) => Ltl::and(nnf(a, true), nnf(b, true)),
        (Ltl::Next(a), n) => Ltl::next(nnf(a, n)),
        (Ltl::Until(a, b), false) => Ltl::until(nnf(a, false), nnf(b, false)),
        (Ltl::Until(a, b), true) => Ltl::release(nnf(a, true), nnf(b, true)),
        (Ltl::Release(a, b), false) => Ltl::release(nnf(a, false), nnf(b, false)),
        (Ltl::Release(a, b), true) => Ltl::until(nnf(a, true), nnf(b, true)),
        (Ltl::Eventually(a), false) => Ltl::eventually(nnf(a, false)),
        (Ltl::Eventually(a), true) => Ltl::always(nnf(a, true)),
        (Ltl::Always(a), false) => Ltl::always(nnf(a, false)),
        (Ltl::Always(a), true) => Ltl::eventually(nnf(a, true)),
    }
}

/// Negations occur only directly above APs.
pub fn is_nnf(f: &Ltl) -> bool {
    match f {
        Ltl::True | Ltl::False | Ltl::Ap(_) => true,
        Ltl::Not(a) => matches!(**a, Ltl::Ap(_)),
        Ltl::Next(a) | Ltl::Eventually(a) | Ltl::Always(a) => is_nnf(a),
        Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
            is_nnf(a) && is_nnf(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;

    #[test]
    fn dualities() {
        let f = parse_ltl("!F\"p>0\"").unwrap();
        assert_eq!(to_nnf(&f).root, Ltl::always(Ltl::not(Ltl::Ap(0))));
        let f = parse_ltl("!!\"p>0\"").unwrap();
        assert_eq!(to_nnf(&f).root, Ltl::Ap(0));
        let f = parse_ltl("!(\"p>0\" U \"q>0\")").unwrap();
        assert_eq!(
            to_nnf(&f).root,
            Ltl::release(Ltl::not(Ltl::Ap(0)), Ltl::not(Ltl::Ap(1)))
        );
        let f = parse_ltl("!G(\"p>0\" | X!\"q>0\")").unwrap();
        let n = to_nnf(&f).root;
        assert!(is_nnf(&n));
        assert_eq!(
            n,
            Ltl::eventually(Ltl::and(Ltl::not(Ltl::Ap(0)), Ltl::next(Ltl::Ap(1))))
        );
    }
}
