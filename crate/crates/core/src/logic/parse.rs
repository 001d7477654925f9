//! Recursive-descent parser for the textual formula syntax.
//!
//! ```text
//! formula := term (('+' | '-') term)*
//! term    := factor ('*' factor | '/' REAL)*
//! factor  := REAL | '-' factor | IDENT '(' args ')' | '|' formula '|' | '(' formula ')'
//!          | 'max(' formula ',' formula ')' | 'min(' formula ',' formula ')'
//!          | 'int[' IDENT '](' formula ')'
//! statement := formula ('==' | '>=') REAL
//! ```

use std::fmt;

use super::syntax::{is_reserved, Comparison, Formula, Language, Statement, Term};
use super::{derive_lattice, LatticeKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("relation `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` is already bound by an enclosing integral")]
    ShadowedVariable(String),
    #[error("constant `{0}` cannot be bound by an integral")]
    BoundConstant(String),
    #[error("literal `{0}` is not a finite real")]
    NonFinite(String),
    #[error("division by zero literal")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    GtEq,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Ident(i) => format!("identifier `{i}`"),
            Tok::End => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Bar => "|",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::EqEq => "==",
            Tok::GtEq => ">=",
            _ => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'|' => Some(Tok::Bar),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((start, tok));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'=' || c == b'>' {
            if bytes.get(i + 1) == Some(&b'=') {
                out.push((start, if c == b'=' { Tok::EqEq } else { Tok::GtEq }));
                i += 2;
            } else {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax(format!("expected `{}=`", c as char)),
                });
            }
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            if lit == "." {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax("stray `.`".into()),
                });
            }
            out.push((start, Tok::Number(lit.to_string())));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: start,
                kind: ParseErrorKind::Syntax(format!("unexpected character `{ch}`")),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    language: &'a Language,
    bound: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind,
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(ParseErrorKind::Syntax(format!(
                "expected `{}`, found {}",
                want.symbol(),
                self.peek().describe()
            )))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Formula::add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Formula::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = Formula::mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let divisor = self.signed_real()?;
                    if divisor == 0.0 {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::DivisionByZero,
                        });
                    }
                    lhs = Formula::mul(lhs, Formula::Real(1.0 / divisor));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Number(lit) => {
                let value: f64 = lit.parse().map_err(|_| ParseError {
                    offset: at,
                    kind: ParseErrorKind::Syntax(format!("malformed number `{lit}`")),
                })?;
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::NonFinite(lit),
                    })
                }
            }
            other => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Syntax(format!(
                    "expected a number, found {}",
                    other.describe()
                )),
            }),
        }
    }

    fn signed_real(&mut self) -> Result<f64, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.number()?)
            }
            Tok::Plus => {
                self.bump();
                self.number()
            }
            _ => self.number(),
        }
    }

    fn factor(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Number(_) => Ok(Formula::Real(self.number()?)),
            Tok::Minus | Tok::Plus => {
                let negative = matches!(self.peek(), Tok::Minus);
                if matches!(self.peek_at(1), Tok::Number(_)) {
                    return Ok(Formula::Real(self.signed_real()?));
                }
                self.bump();
                let inner = self.factor()?;
                Ok(if negative { Formula::neg(inner) } else { inner })
            }
            Tok::Bar => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::Bar)?;
                Ok(Formula::abs(inner))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.ident_factor(name),
            other => self.err(ParseErrorKind::Syntax(format!(
                "expected a formula, found {}",
                other.describe()
            ))),
        }
    }

    fn ident_factor(&mut self, name: String) -> Result<Formula, ParseError> {
        let at = self.offset();
        self.bump();
        match name.as_str() {
            "max" | "min" => {
                self.expect(Tok::LParen)?;
                let f = self.formula()?;
                self.expect(Tok::Comma)?;
                let g = self.formula()?;
                self.expect(Tok::RParen)?;
                let kind = if name == "max" {
                    LatticeKind::Max
                } else {
                    LatticeKind::Min
                };
                Ok(derive_lattice(kind, f, g))
            }
            "int" => {
                self.expect(Tok::LBracket)?;
                let var_at = self.offset();
                let var = match self.bump() {
                    Tok::Ident(v) if !is_reserved(&v) => v,
                    other => {
                        return Err(ParseError {
                            offset: var_at,
                            kind: ParseErrorKind::Syntax(format!(
                                "expected a variable, found {}",
                                other.describe()
                            )),
                        })
                    }
                };
                if self.language.is_constant(&var) {
                    return Err(ParseError {
                        offset: var_at,
                        kind: ParseErrorKind::BoundConstant(var),
                    });
                }
                if self.bound.contains(&var) {
                    return Err(ParseError {
                        offset: var_at,
                        kind: ParseErrorKind::ShadowedVariable(var),
                    });
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                self.bound.push(var.clone());
                let body = self.formula();
                self.bound.pop();
                let body = body?;
                self.expect(Tok::RParen)?;
                Ok(Formula::integral(var, body))
            }
            _ => {
                let Some((arity, _)) = self.language.relation(&name) else {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::UnknownSymbol(name),
                    });
                };
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                loop {
                    let arg_at = self.offset();
                    match self.bump() {
                        Tok::Ident(a) if !is_reserved(&a) => {
                            if self.language.is_constant(&a) {
                                args.push(Term::Const(a));
                            } else {
                                args.push(Term::Var(a));
                            }
                        }
                        other => {
                            return Err(ParseError {
                                offset: arg_at,
                                kind: ParseErrorKind::Syntax(format!(
                                    "expected a variable or constant, found {}",
                                    other.describe()
                                )),
                            })
                        }
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        _ => break,
                    }
                }
                self.expect(Tok::RParen)?;
                if args.len() != arity {
                    return Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        },
                    });
                }
                Ok(Formula::Rel(name, args))
            }
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            other => self.err(ParseErrorKind::Syntax(format!(
                "unexpected {} after formula",
                other.describe()
            ))),
        }
    }
}

fn parser<'a>(text: &str, language: &'a Language) -> Result<Parser<'a>, ParseError> {
    Ok(Parser {
        toks: lex(text)?,
        pos: 0,
        language,
        bound: Vec::new(),
    })
}

/// Parses a formula over `language`, desugaring `-`, `/`, `max` and `min`.
pub fn parse_formula(text: &str, language: &Language) -> Result<Formula, ParseError> {
    let mut p = parser(text, language)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses `formula == r` or `formula >= r`.
pub fn parse_statement(text: &str, language: &Language) -> Result<Statement, ParseError> {
    let mut p = parser(text, language)?;
    let formula = p.formula()?;
    let comparison = match p.peek() {
        Tok::EqEq => Comparison::Equal,
        Tok::GtEq => Comparison::AtLeast,
        other => {
            return p.err(ParseErrorKind::Syntax(format!(
                "expected `==` or `>=`, found {}",
                other.describe()
            )))
        }
    };
    p.bump();
    let threshold = p.signed_real()?;
    p.finish()?;
    Ok(Statement {
        formula,
        comparison,
        threshold,
    })
}
