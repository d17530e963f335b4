//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! formula := or
//! or      := and ('|' and)*
//! and     := until ('&' until)*
//! until   := unary ('U' unary)*            (left associative)
//! unary   := '!' unary | 'X' unary | 'F' unary | 'G' unary
//!          | '(' formula ')' | 'true' | 'false' | atom
//! ```
//!
//! `&&`, `||` and `~` are accepted as synonyms.

use super::{is_valid_prop, Formula, Prop};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Not,
    And,
    Or,
    Next,
    Eventually,
    Globally,
    Until,
    LParen,
    RParen,
    True,
    False,
    Atom(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Next => "`X`".into(),
            Tok::Eventually => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'!' | b'~' => {
                out.push((i, Tok::Not));
                i += 1;
            }
            b'&' => {
                out.push((i, Tok::And));
                i += if bytes.get(i + 1) == Some(&b'&') { 2 } else { 1 };
            }
            b'|' => {
                out.push((i, Tok::Or));
                i += if bytes.get(i + 1) == Some(&b'|') { 2 } else { 1 };
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "X" => Tok::Next,
                    "F" => Tok::Eventually,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    w if is_valid_prop(w) => Tok::Atom(w.to_string()),
                    w => {
                        return Err(ParseError {
                            offset: start,
                            expected: "an operator or an atom matching [a-z][a-z0-9_]*".into(),
                            found: format!("`{w}`"),
                        })
                    }
                };
                out.push((start, tok));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    expected: "a formula token".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Until {
            self.bump();
            lhs = Formula::until(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                Ok(Formula::eventually(self.unary()?))
            }
            Tok::Globally => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Atom(name) => {
                self.bump();
                Ok(Formula::Atom(Prop::new(&name).expect("tokenizer validated atom")))
            }
            _ => Err(self.error("`!`, `X`, `F`, `G`, `(`, `true`, `false` or an atom")),
        }
    }
}

/// Parses a formula from its textual form.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return Err(p.error("a binary operator or end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn parses_problem1_goal() {
        let f = parse("F(on_b2_b1 & X(F(on_b3_b2)))").unwrap();
        let expected = Formula::eventually(Formula::and(
            a("on_b2_b1"),
            Formula::next(Formula::eventually(a("on_b3_b2"))),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn constants() {
        assert_eq!(parse("true").unwrap(), Formula::True);
        assert_eq!(parse(" false ").unwrap(), Formula::False);
    }

    #[test]
    fn until_binds_tighter_than_or() {
        let f = parse("p U q | r").unwrap();
        assert_eq!(f, Formula::or(Formula::until(a("p"), a("q")), a("r")));
        assert_eq!(f.to_string(), "p U q | r");
    }

    #[test]
    fn until_is_left_associative() {
        let f = parse("p U q U r").unwrap();
        assert_eq!(f, Formula::until(Formula::until(a("p"), a("q")), a("r")));
    }

    #[test]
    fn ascii_synonyms() {
        assert_eq!(parse("~p && q || r").unwrap(), parse("!p & q | r").unwrap());
    }

    #[test]
    fn unary_chains() {
        assert_eq!(
            parse("!X F G p").unwrap(),
            Formula::not(Formula::next(Formula::eventually(Formula::globally(a("p")))))
        );
    }

    #[test]
    fn errors_carry_offsets() {
        let e = parse("p & ").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.found.contains("end of input"));

        let e = parse("(p | q").unwrap_err();
        assert_eq!(e.offset, 6);
        assert_eq!(e.expected, "`)`");

        let e = parse("p q").unwrap_err();
        assert_eq!(e.offset, 2);

        let e = parse("Fp").unwrap_err();
        assert_eq!(e.offset, 0);

        let e = parse("p # q").unwrap_err();
        assert_eq!(e.offset, 2);

        assert!(parse("").is_err());
    }
}
