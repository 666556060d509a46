//! HOA v1 subset with an ε-edge extension.
//!
//! Supported: `HOA: v1`, `States:`, a single `Start:`, `AP:`,
//! `acc-name: Buchi`, `Acceptance: 1 Inf(0)`, state-based acceptance marks
//! `{0}`, explicit labels `[guard] target`. The label `[@eps]` marks an
//! ε-edge. Other header items (`name:`, `tool:`, `properties:`) are
//! accepted and ignored. Label gaps are closed with an added rejecting sink.

use std::fmt::Write;

use crate::ltl::AtomicProp;

use super::guard::{bits, parse_guard, spread, Guard};
use super::ldba::{Edge, Ldba, State};
use super::AutomataError;

pub const EPS_LABEL: &str = "@eps";

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Label(String),
    Acc(Vec<u32>),
}

fn syntax(msg: impl Into<String>) -> AutomataError {
    AutomataError::HoaSyntax(msg.into())
}

fn lex(text: &str) -> Result<Vec<Tok>, AutomataError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, '\\')) => {
                            if let Some((_, e)) = chars.next() {
                                s.push(e);
                            }
                        }
                        Some((_, ch)) => s.push(ch),
                        None => return Err(syntax(format!("unterminated string at {i}"))),
                    }
                }
                out.push(Tok::Str(s));
            }
            '[' | '{' => {
                let close = if c == '[' { ']' } else { '}' };
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, ch)) if ch == close => break,
                        Some((_, ch)) => s.push(ch),
                        None => return Err(syntax(format!("unclosed '{c}' at {i}"))),
                    }
                }
                if c == '[' {
                    out.push(Tok::Label(s.trim().to_string()));
                } else {
                    let marks = s
                        .split_whitespace()
                        .map(|m| m.parse().map_err(|_| syntax(format!("bad acceptance mark '{m}'"))))
                        .collect::<Result<_, _>>()?;
                    out.push(Tok::Acc(marks));
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_whitespace() || matches!(ch, '"' | '[' | '{') {
                        break;
                    }
                    s.push(ch);
                    chars.next();
                }
                out.push(Tok::Word(s));
            }
        }
    }
    Ok(out)
}

fn is_header_key(t: &Tok) -> bool {
    matches!(t, Tok::Word(w) if w.ends_with(':') && w != "State:")
}

fn int(t: Option<&Tok>, what: &str) -> Result<usize, AutomataError> {
    match t {
        Some(Tok::Word(w)) => w.parse().map_err(|_| syntax(format!("expected {what}, found '{w}'"))),
        other => Err(syntax(format!("expected {what}, found {other:?}"))),
    }
}

/// Parse an automaton; the result satisfies [`Ldba::validate`].
pub fn parse_hoa(text: &str) -> Result<Ldba, AutomataError> {
    let toks = lex(text)?;
    let body_at = toks
        .iter()
        .position(|t| *t == Tok::Word("--BODY--".into()))
        .ok_or_else(|| syntax("missing --BODY--"))?;
    let header = &toks[..body_at];
    if header.first() != Some(&Tok::Word("HOA:".into()))
        || header.get(1) != Some(&Tok::Word("v1".into()))
    {
        return Err(syntax("file must start with 'HOA: v1'"));
    }

    let mut n_states = None;
    let mut start = None;
    let mut aps: Vec<AtomicProp> = Vec::new();
    let mut seen_acceptance = false;
    let mut i = 2;
    while i < header.len() {
        let Tok::Word(key) = &header[i] else {
            return Err(syntax(format!("unexpected header token {:?}", header[i])));
        };
        let mut j = i + 1;
        while j < header.len() && !is_header_key(&header[j]) {
            j += 1;
        }
        let vals = &header[i + 1..j];
        match key.as_str() {
            "States:" => n_states = Some(int(vals.first(), "state count")?),
            "Start:" => {
                if start.is_some() || vals.len() != 1 {
                    return Err(AutomataError::UnsupportedHoa(
                        "exactly one initial state is required".into(),
                    ));
                }
                start = Some(int(vals.first(), "initial state")?);
            }
            "AP:" => {
                let count = int(vals.first(), "AP count")?;
                for v in &vals[1..] {
                    let Tok::Str(name) = v else {
                        return Err(syntax("AP names must be quoted"));
                    };
                    aps.push(AtomicProp::parse(name)?);
                }
                if aps.len() != count {
                    return Err(syntax(format!("AP: declares {count} names, found {}", aps.len())));
                }
            }
            "acc-name:" => {
                if vals.first() != Some(&Tok::Word("Buchi".into())) {
                    return Err(AutomataError::UnsupportedAcceptance(words(vals)));
                }
            }
            "Acceptance:" => {
                let text = words(vals);
                if text.replace(' ', "") != "1Inf(0)" {
                    return Err(AutomataError::UnsupportedAcceptance(text));
                }
                seen_acceptance = true;
            }
            _ => {}
        }
        i = j;
    }
    if !seen_acceptance {
        return Err(AutomataError::UnsupportedAcceptance("missing Acceptance:".into()));
    }
    let n = n_states.ok_or_else(|| syntax("missing States:"))?;
    let start = start.ok_or_else(|| syntax("missing Start:"))?;

    let mut states: Vec<Option<State>> = vec![None; n];
    let body = &toks[body_at + 1..];
    let mut k = 0;
    let mut current: Option<usize> = None;
    let mut ended = false;
    while k < body.len() {
        match &body[k] {
            Tok::Word(w) if w == "--END--" => {
                ended = true;
                break;
            }
            Tok::Word(w) if w == "State:" => {
                let q = int(body.get(k + 1), "state index")?;
                if q >= n {
                    return Err(syntax(format!("state {q} out of range")));
                }
                if states[q].is_some() {
                    return Err(syntax(format!("state {q} defined twice")));
                }
                k += 2;
                let mut s = State::default();
                if let Some(Tok::Str(name)) = body.get(k) {
                    s.name = Some(name.clone());
                    k += 1;
                }
                if let Some(Tok::Acc(marks)) = body.get(k) {
                    if marks.iter().any(|&m| m != 0) {
                        return Err(AutomataError::UnsupportedAcceptance(format!(
                            "acceptance set {marks:?}"
                        )));
                    }
                    s.accepting = !marks.is_empty();
                    k += 1;
                }
                states[q] = Some(s);
                current = Some(q);
            }
            Tok::Label(label) => {
                let q = current.ok_or_else(|| syntax("edge before any State:"))?;
                let target = int(body.get(k + 1), "edge target")?;
                if target >= n {
                    return Err(syntax(format!("edge target {target} out of range")));
                }
                k += 2;
                if let Some(Tok::Acc(_)) = body.get(k) {
                    return Err(AutomataError::UnsupportedAcceptance(
                        "transition-based acceptance".into(),
                    ));
                }
                let s = states[q].as_mut().expect("current state exists");
                if label == EPS_LABEL {
                    s.eps.push(target);
                } else {
                    let guard = parse_guard(label).map_err(syntax)?;
                    if let Some(i) = guard.max_ap().filter(|&i| i as usize >= aps.len()) {
                        return Err(AutomataError::UnknownAp { state: q, index: i });
                    }
                    s.edges.push(Edge { guard, target });
                }
                continue;
            }
            Tok::Word(w) if w.parse::<usize>().is_ok() => {
                return Err(AutomataError::UnsupportedHoa(
                    "implicit (unlabeled) edges".into(),
                ))
            }
            other => return Err(syntax(format!("unexpected body token {other:?}"))),
        }
    }
    if !ended {
        return Err(syntax("missing --END--"));
    }
    let mut states: Vec<State> = states
        .into_iter()
        .enumerate()
        .map(|(q, s)| s.ok_or_else(|| syntax(format!("state {q} has no State: block"))))
        .collect::<Result<_, _>>()?;
    if start >= n {
        return Err(syntax(format!("start state {start} out of range")));
    }

    for (q, s) in states.iter().enumerate() {
        if overlapping(s, aps.len()) {
            return Err(AutomataError::Nondeterministic { state: q });
        }
    }
    complete(&mut states, aps.len());

    let a = Ldba::new(aps, states, start);
    let violations = a.validate();
    if !violations.is_empty() {
        return Err(AutomataError::Invalid(
            violations.iter().map(|v| v.to_string()).collect(),
        ));
    }
    Ok(a)
}

fn words(vals: &[Tok]) -> String {
    vals.iter()
        .map(|t| match t {
            Tok::Word(w) | Tok::Str(w) => w.clone(),
            other => format!("{other:?}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn support_vars(s: &State) -> Vec<u32> {
    bits(s.edges.iter().fold(0, |m, e| m | e.guard.support()))
}

fn overlapping(s: &State, _n_aps: usize) -> bool {
    let vars = support_vars(s);
    (0..1u32 << vars.len()).any(|m| {
        let l = spread(m, &vars);
        s.edges.iter().filter(|e| e.guard.eval(l)).count() > 1
    })
}

/// Send labels that no edge covers to a fresh rejecting sink.
fn complete(states: &mut Vec<State>, _n_aps: usize) {
    let sink = states.len();
    let mut needed = false;
    for s in states.iter_mut() {
        let vars = support_vars(s);
        let table: Vec<bool> = (0..1u32 << vars.len())
            .map(|m| {
                let l = spread(m, &vars);
                !s.edges.iter().any(|e| e.guard.eval(l))
            })
            .collect();
        if table.iter().any(|&b| b) {
            s.edges.push(Edge {
                guard: Guard::from_truth_table(&vars, &table),
                target: sink,
            });
            needed = true;
        }
    }
    if needed {
        states.push(State {
            name: Some("sink".into()),
            edges: vec![Edge {
                guard: Guard::True,
                target: sink,
            }],
            eps: vec![],
            accepting: false,
        });
    }
}

/// Render in the supported HOA subset.
pub fn emit_hoa(a: &Ldba) -> String {
    let mut out = String::new();
    out.push_str("HOA: v1\n");
    let _ = writeln!(out, "States: {}", a.num_states());
    let _ = writeln!(out, "Start: {}", a.initial);
    let _ = write!(out, "AP: {}", a.aps.len());
    for ap in &a.aps {
        let _ = write!(out, " \"{}\"", ap.name);
    }
    out.push('\n');
    out.push_str("acc-name: Buchi\n");
    out.push_str("Acceptance: 1 Inf(0)\n");
    out.push_str("properties: trans-labels explicit-labels state-acc\n");
    out.push_str("--BODY--\n");
    for (q, s) in a.states.iter().enumerate() {
        let _ = write!(out, "State: {q}");
        if let Some(name) = &s.name {
            let _ = write!(out, " \"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""));
        }
        if s.accepting {
            out.push_str(" {0}");
        }
        out.push('\n');
        for e in &s.edges {
            let _ = writeln!(out, "[{}] {}", e.guard, e.target);
        }
        for j in &s.eps {
            let _ = writeln!(out, "[{EPS_LABEL}] {j}");
        }
    }
    out.push_str("--END--\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::translate_fragment;
    use crate::ltl::parse_ltl;

    const MINIMAL: &str = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";

    #[test]
    fn minimal_always_accepting() {
        let a = parse_hoa(MINIMAL).unwrap();
        assert_eq!(a.num_states(), 1);
        assert!(a.is_accepting(0));
        assert_eq!(a.states[0].edges[0].guard, Guard::True);
        let again = parse_hoa(&emit_hoa(&a)).unwrap();
        assert_eq!(again, a);
    }

    #[test]
    fn translated_round_trip() {
        for text in [
            "FG\"park>0\" & G!\"grass>0\"",
            "G\"a>0\" & GF\"b>0\" & F(\"c>0\" & F\"a<0\")",
            "\"a>0\" U \"b>0\"",
        ] {
            let a = translate_fragment(&parse_ltl(text).unwrap()).unwrap();
            let h = emit_hoa(&a);
            let b = parse_hoa(&h).unwrap();
            assert_eq!(b, a, "{text}");
            assert_eq!(emit_hoa(&b), h);
        }
    }

    #[test]
    fn rejects_other_acceptance() {
        let t = MINIMAL.replace("Acceptance: 1 Inf(0)", "Acceptance: 2 Inf(0)&Fin(1)");
        assert!(matches!(parse_hoa(&t), Err(AutomataError::UnsupportedAcceptance(_))));
        let t = MINIMAL.replace("acc-name: Buchi", "acc-name: Rabin 1");
        assert!(matches!(parse_hoa(&t), Err(AutomataError::UnsupportedAcceptance(_))));
        let t = MINIMAL.replace("State: 0 {0}\n[t] 0", "State: 0\n[t] 0 {0}");
        assert!(matches!(parse_hoa(&t), Err(AutomataError::UnsupportedAcceptance(_))));
    }

    #[test]
    fn rejects_nondeterminism_and_unknown_ap() {
        let base = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a>0\"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n";
        let t = format!("{base}[0] 0\n[t] 0\n--END--\n");
        assert!(matches!(parse_hoa(&t), Err(AutomataError::Nondeterministic { state: 0 })));
        let t = format!("{base}[1] 0\n[!1] 0\n--END--\n");
        assert!(matches!(parse_hoa(&t), Err(AutomataError::UnknownAp { index: 1, .. })));
    }

    #[test]
    fn gaps_go_to_added_sink() {
        let t = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a>0\"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[0] 0\n--END--\n";
        let a = parse_hoa(t).unwrap();
        assert_eq!(a.num_states(), 2);
        assert_eq!(a.step(0, 0), Some(1));
        assert!(a.is_rejecting_sink(1));
    }
}
