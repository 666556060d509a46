//! Recursive-descent parser for the formula syntax.
//!
//! ```text
//! or      := and ('|' and)*
//! and     := until ('&' until)*
//! until   := unary ('U' until)?
//! unary   := ('!' | 'G' | 'F' | 'X') unary | primary
//! primary := '(' or ')' | 'true' | 'false' | '"' ident ('>'|'<') number '"'
//! ```
//!
//! A run of operator letters such as `GF` is read as consecutive operators.

use super::ap::AtomicProp;
use super::formula::{Formula, Ltl};
use super::LtlError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Not,
    And,
    Or,
    Always,
    Eventually,
    Next,
    Until,
    True,
    False,
    Ap(String),
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, LtlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b'!' => {
                out.push((Tok::Not, i));
                i += 1;
            }
            b'&' => {
                out.push((Tok::And, i));
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
            }
            b'|' => {
                out.push((Tok::Or, i));
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
            }
            b'"' => {
                let start = i;
                let close = text[i + 1..]
                    .find('"')
                    .ok_or_else(|| LtlError::Syntax {
                        pos: start,
                        msg: "unterminated quoted proposition".into(),
                    })?;
                let inner = &text[i + 1..i + 1 + close];
                out.push((Tok::Ap(inner.to_string()), start));
                i += close + 2;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "true" => out.push((Tok::True, start)),
                    "false" => out.push((Tok::False, start)),
                    _ => {
                        for (k, ch) in word.char_indices() {
                            let tok = match ch {
                                'G' => Tok::Always,
                                'F' => Tok::Eventually,
                                'X' => Tok::Next,
                                'U' => Tok::Until,
                                _ => {
                                    return Err(LtlError::UnknownOperator {
                                        pos: start,
                                        op: word.to_string(),
                                    })
                                }
                            };
                            out.push((tok, start + k));
                        }
                    }
                }
            }
            _ => {
                return Err(LtlError::UnknownOperator {
                    pos: i,
                    op: text[i..].chars().next().unwrap_or('?').to_string(),
                })
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    aps: Vec<AtomicProp>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LtlError> {
        Err(LtlError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn or(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Ltl::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ltl, LtlError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Ltl::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ltl, LtlError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::Until {
            self.bump();
            return Ok(Ltl::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ltl, LtlError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Ltl::not(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                Ok(Ltl::always(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(Ltl::eventually(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Ltl::next(self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Ltl, LtlError> {
        let pos = self.pos();
        match self.bump() {
            Tok::LParen => {
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::True => Ok(Ltl::True),
            Tok::False => Ok(Ltl::False),
            Tok::Ap(text) => {
                if let Some(i) = self.aps.iter().position(|a| a.name == text) {
                    return Ok(Ltl::Ap(i));
                }
                let ap = AtomicProp::parse(&text)?;
                self.aps.push(ap);
                Ok(Ltl::Ap(self.aps.len() - 1))
            }
            Tok::End => Err(LtlError::Syntax {
                pos,
                msg: "unexpected end of formula".into(),
            }),
            other => Err(LtlError::Syntax {
                pos,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse a formula in the `G"x>0" & F("a>1" U "b<2")` syntax.
pub fn parse_ltl(text: &str) -> Result<Formula, LtlError> {
    parse_with_aps(text, Vec::new())
}

/// Parse while extending an existing AP table (shared indices across formulas).
pub fn parse_with_aps(text: &str, aps: Vec<AtomicProp>) -> Result<Formula, LtlError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        aps,
    };
    let root = p.or()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    Ok(Formula { aps: p.aps, root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::Comparator;

    #[test]
    fn hopper_safety() {
        let f = parse_ltl("G\"torso_height>-11.0\"").unwrap();
        assert_eq!(f.root, Ltl::always(Ltl::Ap(0)));
        assert_eq!(f.aps[0].signal, "torso_height");
        assert_eq!(f.aps[0].threshold, -11.0);
        assert_eq!(f.aps[0].comparator, Comparator::Gt);
    }

    #[test]
    fn single_ap() {
        let f = parse_ltl("\"x>0\"").unwrap();
        assert_eq!(f.root, Ltl::Ap(0));
    }

    #[test]
    fn nested_eventually() {
        let f = parse_ltl("F(\"a>1\" & F\"b<2\")").unwrap();
        assert_eq!(
            f.root,
            Ltl::eventually(Ltl::and(Ltl::Ap(0), Ltl::eventually(Ltl::Ap(1))))
        );
        let again = parse_ltl(&f.to_string()).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn letter_runs_split_into_operators() {
        let f = parse_ltl("GF\"a>0\"").unwrap();
        assert_eq!(f.root, Ltl::always(Ltl::eventually(Ltl::Ap(0))));
        assert_eq!(f.to_string(), "GF\"a>0\"");
    }

    #[test]
    fn duplicate_aps_unified() {
        let f = parse_ltl("\"a>0\" U (\"b>0\" | \"a>0\")").unwrap();
        assert_eq!(f.aps.len(), 2);
        assert_eq!(f.root, Ltl::until(Ltl::Ap(0), Ltl::or(Ltl::Ap(1), Ltl::Ap(0))));
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_ltl("\"a>0\" | \"b>0\" & \"c>0\" U \"a>0\" U \"b>0\"").unwrap();
        let expected = Ltl::or(
            Ltl::Ap(0),
            Ltl::and(
                Ltl::Ap(1),
                Ltl::until(Ltl::Ap(2), Ltl::until(Ltl::Ap(0), Ltl::Ap(1))),
            ),
        );
        assert_eq!(f.root, expected);
    }

    #[test]
    fn cartpole_formula_parses() {
        let text = "G(\"position_x>-10\" & \"position_x<10\") & G(\"velocity_x>-10.0\" & \"velocity_x<10.0\")\n& F(\"cos_theta<-0.5\" & F\"cos_theta>0.5\")";
        let f = parse_ltl(text).unwrap();
        assert_eq!(f.aps.len(), 6);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_ltl("G(\"a>0\"") {
            Err(LtlError::Syntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_ltl("W\"a>0\""),
            Err(LtlError::UnknownOperator { pos: 0, .. })
        ));
        assert!(matches!(
            parse_ltl("G\"a=0\""),
            Err(LtlError::MalformedAp { .. })
        ));
        assert!(matches!(parse_ltl("\"a>0\" \"b>0\""), Err(LtlError::Syntax { .. })));
        assert!(matches!(parse_ltl("G \"a>0"), Err(LtlError::Syntax { .. })));
    }

    #[test]
    fn keywords_survive_round_trip() {
        let f = parse_ltl("G true & F false").unwrap();
        assert_eq!(f.to_string(), "G true & F false");
        assert_eq!(parse_ltl(&f.to_string()).unwrap(), f);
    }
}
