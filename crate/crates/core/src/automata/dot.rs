use std::fmt::Write;

use super::ldba::Ldba;

/// Graphviz rendering: accepting states double-circled, ε-edges dashed,
/// rejecting sinks grey.
pub fn emit_dot(a: &Ldba) -> String {
    let mut out = String::from("digraph ldba {\n  rankdir=LR;\n  init [shape=point];\n");
    for (q, s) in a.states.iter().enumerate() {
        let shape = if s.accepting { "doublecircle" } else { "circle" };
        let label = s.name.clone().unwrap_or_else(|| q.to_string());
        let _ = write!(out, "  q{q} [shape={shape}, label=\"{}\"", escape(&label));
        if a.is_rejecting_sink(q) {
            out.push_str(", style=filled, fillcolor=grey");
        }
        out.push_str("];\n");
    }
    let _ = writeln!(out, "  init -> q{};", a.initial);
    for (q, s) in a.states.iter().enumerate() {
        for e in &s.edges {
            let _ = writeln!(out, "  q{q} -> q{} [label=\"{}\"];", e.target, e.guard);
        }
        for j in &s.eps {
            let _ = writeln!(out, "  q{q} -> q{j} [label=\"ε\", style=dashed];");
        }
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::translate_fragment;
    use crate::ltl::parse_ltl;

    #[test]
    fn single_state() {
        let a = translate_fragment(&parse_ltl("true").unwrap()).unwrap();
        let dot = emit_dot(&a);
        assert_eq!(dot.matches("shape=doublecircle").count(), 1);
        assert_eq!(dot.matches("q0 -> q0").count(), 1);
    }

    #[test]
    fn parking_has_dashed_eps_and_grey_trap() {
        let a = translate_fragment(&parse_ltl("FG\"park>0\" & G!\"grass>0\"").unwrap()).unwrap();
        let dot = emit_dot(&a);
        assert!(dot.matches("[shape=").count() >= 3);
        assert_eq!(dot.matches("style=dashed").count(), 1);
        assert_eq!(dot.matches("fillcolor=grey").count(), 1);
    }
}
