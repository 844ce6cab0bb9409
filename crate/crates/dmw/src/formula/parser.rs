//! Recursive-descent parser for the formula text syntax.
//!
//! Grammar (precedence low to high, `->` right-associative, `&`, `|`, `<->`
//! left-associative):
//!
//! ```text
//! formula := iff
//! iff     := implies ( "<->" implies )*
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := ( "~" | "[h]" | "[v]" | "<h>" | "<v>"
//!            | "[h+]" | "[v+]" | "<h+>" | "<v+>" ) unary | atom
//! atom    := "diag" | "false" | VAR | "(" formula ")"
//! VAR     := [A-Za-z0-9_]+ other than the reserved words
//! ```

use super::{Formula, RESERVED_WORDS};

/// Syntax error with the byte position where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Diag,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    BoxH,
    BoxV,
    DiaH,
    DiaV,
    BoxHPlus,
    BoxVPlus,
    DiaHPlus,
    DiaVPlus,
    LParen,
    RParen,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'~' => {
                toks.push((i, Tok::Not));
                i += 1;
            }
            b'&' => {
                toks.push((i, Tok::And));
                i += 1;
            }
            b'|' => {
                toks.push((i, Tok::Or));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Implies));
                    i += 2;
                } else {
                    return err(i, "expected \"->\"");
                }
            }
            b'<' => match bytes.get(i + 1) {
                Some(b'-') => {
                    if bytes.get(i + 2) == Some(&b'>') {
                        toks.push((i, Tok::Iff));
                        i += 3;
                    } else {
                        return err(i, "expected \"<->\"");
                    }
                }
                Some(d @ (b'h' | b'v')) => {
                    let dia = *d == b'h';
                    match (bytes.get(i + 2), bytes.get(i + 3)) {
                        (Some(b'>'), _) => {
                            toks.push((i, if dia { Tok::DiaH } else { Tok::DiaV }));
                            i += 3;
                        }
                        (Some(b'+'), Some(b'>')) => {
                            toks.push((i, if dia { Tok::DiaHPlus } else { Tok::DiaVPlus }));
                            i += 4;
                        }
                        _ => return err(i, "malformed diamond, expected \"<h>\"-style token"),
                    }
                }
                _ => return err(i, "malformed token after \"<\""),
            },
            b'[' => match bytes.get(i + 1) {
                Some(d @ (b'h' | b'v')) => {
                    let h = *d == b'h';
                    match (bytes.get(i + 2), bytes.get(i + 3)) {
                        (Some(b']'), _) => {
                            toks.push((i, if h { Tok::BoxH } else { Tok::BoxV }));
                            i += 3;
                        }
                        (Some(b'+'), Some(b']')) => {
                            toks.push((i, if h { Tok::BoxHPlus } else { Tok::BoxVPlus }));
                            i += 4;
                        }
                        _ => return err(i, "malformed box, expected \"[h]\"-style token"),
                    }
                }
                _ => return err(i, "malformed token after \"[\""),
            },
            b if b.is_ascii_alphanumeric() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                toks.push((
                    start,
                    match word {
                        "diag" => Tok::Diag,
                        "false" => Tok::False,
                        _ => Tok::Ident(word.to_string()),
                    },
                ));
            }
            _ => return err(i, format!("unexpected character {:?}", text[i..].chars().next().unwrap())),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        self.pos += 1;
        t
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let wrap = match self.peek() {
            Some(Tok::Not) => Formula::not as fn(Formula) -> Formula,
            Some(Tok::BoxH) => Formula::box_h,
            Some(Tok::BoxV) => Formula::box_v,
            Some(Tok::DiaH) => Formula::dia_h,
            Some(Tok::DiaV) => Formula::dia_v,
            Some(Tok::BoxHPlus) => Formula::box_h_plus,
            Some(Tok::BoxVPlus) => Formula::box_v_plus,
            Some(Tok::DiaHPlus) => Formula::dia_h_plus,
            Some(Tok::DiaVPlus) => Formula::dia_v_plus,
            _ => return self.atom(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Diag) => {
                self.bump();
                Ok(Formula::Diag)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(_)) => {
                let Tok::Ident(name) = self.bump() else {
                    unreachable!()
                };
                debug_assert!(!RESERVED_WORDS.contains(&name.as_str()));
                Ok(Formula::Var(name))
            }
            Some(Tok::LParen) => {
                self.bump();
                let f = self.iff()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(f)
                } else {
                    err(self.here(), "expected \")\"")
                }
            }
            Some(other) => err(at, format!("expected a formula, found {other:?}")),
            None => err(at, "expected a formula, found end of input"),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return err(p.here(), "trailing input after formula");
    }
    Ok(f)
}
